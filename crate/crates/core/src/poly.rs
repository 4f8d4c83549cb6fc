//! Exact bivariate polynomials over the rationals, and the half-integer
//! exponent ring used by the blow-up substitution `z = w * sqrt(|u|)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::upoly::{NestedPoly, UniPoly};

/// Names of the two variables, first then second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vars(pub &'static str, pub &'static str);

impl Vars {
    pub const XY: Vars = Vars("x", "y");
    pub const UZ: Vars = Vars("u", "z");
    pub const UW: Vars = Vars("u", "w");
    pub const VZ: Vars = Vars("v", "z");
    pub const VR: Vars = Vars("v", "r");
}

/// Exponent pair `x^i y^j`, ordered graded-lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono {
    pub i: u32,
    pub j: u32,
}

impl Mono {
    pub fn new(i: u32, j: u32) -> Self {
        Mono { i, j }
    }

    pub fn degree(self) -> u32 {
        self.i + self.j
    }

    pub fn divides(self, other: Mono) -> bool {
        self.i <= other.i && self.j <= other.j
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.i.cmp(&other.i))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("divisor does not divide the dividend exactly")]
pub struct NotDivisible;

/// Exact bivariate polynomial. Zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct RationalPoly {
    terms: BTreeMap<Mono, Rational>,
    vars: Vars,
}

impl PartialEq for RationalPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for RationalPoly {}

impl std::hash::Hash for RationalPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl Default for RationalPoly {
    fn default() -> Self {
        RationalPoly::zero(Vars::XY)
    }
}

impl RationalPoly {
    pub fn zero(vars: Vars) -> Self {
        RationalPoly {
            terms: BTreeMap::new(),
            vars,
        }
    }

    pub fn constant(c: Rational, vars: Vars) -> Self {
        Self::monomial(c, 0, 0, vars)
    }

    pub fn monomial(c: Rational, i: u32, j: u32, vars: Vars) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Mono::new(i, j), c);
        p
    }

    pub fn x(vars: Vars) -> Self {
        Self::monomial(Rational::one(), 1, 0, vars)
    }

    pub fn y(vars: Vars) -> Self {
        Self::monomial(Rational::one(), 0, 1, vars)
    }

    /// Builds from `(coefficient, i, j)` triples with integer coefficients.
    pub fn from_int_terms(terms: &[(i64, u32, u32)], vars: Vars) -> Self {
        let mut p = Self::zero(vars);
        for &(c, i, j) in terms {
            p.add_term(Mono::new(i, j), rational::int(c));
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Rational)>, vars: Vars) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn with_vars(mut self, vars: Vars) -> Self {
        self.vars = vars;
        self
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (Mono, &Rational)> {
        self.terms.iter().rev().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms
            .get(&Mono::new(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.i).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.j).max()
    }

    /// Largest `k` such that `x^k` divides the polynomial (`None` for zero).
    pub fn ord_x(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.i).min()
    }

    pub fn ord_y(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.j).min()
    }

    pub fn leading(&self) -> Option<(Mono, &Rational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c * k)), self.vars)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rational::one(), self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.i > 0)
                .map(|(m, c)| (Mono::new(m.i - 1, m.j), c * rational::int(m.i as i64))),
            self.vars,
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.j > 0)
                .map(|(m, c)| (Mono::new(m.i, m.j - 1), c * rational::int(m.j as i64))),
            self.vars,
        )
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            acc += c * num_traits::pow(x.clone(), m.i as usize) * num_traits::pow(y.clone(), m.j as usize);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| rational::to_f64(c) * x.powi(m.i as i32) * y.powi(m.j as i32))
            .sum()
    }

    /// Polynomial composition `p(fx, fy)`; the result carries `fx`'s vars.
    pub fn substitute(&self, fx: &RationalPoly, fy: &RationalPoly) -> RationalPoly {
        let vars = fx.vars;
        let max_i = self.degree_x().unwrap_or(0) as usize;
        let max_j = self.degree_y().unwrap_or(0) as usize;
        let mut px = vec![RationalPoly::constant(Rational::one(), vars)];
        for k in 0..max_i {
            let next = &px[k] * fx;
            px.push(next);
        }
        let mut py = vec![RationalPoly::constant(Rational::one(), vars)];
        for k in 0..max_j {
            let next = &py[k] * fy;
            py.push(next);
        }
        let mut out = RationalPoly::zero(vars);
        for (m, c) in &self.terms {
            let t = (&px[m.i as usize] * &py[m.j as usize]).scale(c);
            out = &out + &t;
        }
        out
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone())),
            self.vars,
        )
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Exact quotient by `den`; fails unless `den` divides `self`.
    pub fn divide_exact(&self, den: &RationalPoly) -> Result<RationalPoly, NotDivisible> {
        let (lm, lc) = den.leading().ok_or(NotDivisible)?;
        let lc = lc.clone();
        let mut rem = self.clone();
        let mut q = RationalPoly::zero(self.vars);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return Err(NotDivisible);
            }
            let t = RationalPoly::monomial(c / &lc, m.i - lm.i, m.j - lm.j, self.vars);
            rem = &rem - &(&t * den);
            q = &q + &t;
        }
        Ok(q)
    }

    /// Coefficients as a polynomial in the second variable, each coefficient a
    /// univariate polynomial in the first.
    pub fn nested_in_y(&self) -> NestedPoly {
        let dj = self.degree_y().map_or(0, |d| d as usize + 1);
        let mut out: Vec<Vec<Rational>> = vec![Vec::new(); dj];
        for (m, c) in &self.terms {
            let v = &mut out[m.j as usize];
            if v.len() <= m.i as usize {
                v.resize(m.i as usize + 1, Rational::zero());
            }
            v[m.i as usize] = c.clone();
        }
        out.into_iter().map(UniPoly::new).collect()
    }

    pub fn nested_in_x(&self) -> NestedPoly {
        self.swap_vars().nested_in_y()
    }

    pub fn from_nested_in_y(n: &NestedPoly, vars: Vars) -> Self {
        let mut p = Self::zero(vars);
        for (j, u) in n.iter().enumerate() {
            for (i, c) in u.coeffs().iter().enumerate() {
                p.add_term(Mono::new(i as u32, j as u32), c.clone());
            }
        }
        p
    }

    /// Exchanges the roles of the two variables (names are kept in place).
    pub fn swap_vars(&self) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(m, c)| (Mono::new(m.j, m.i), c.clone())),
            self.vars,
        )
    }

    /// Univariate polynomial in the first variable if the second is absent.
    pub fn as_uni_in_x(&self) -> Option<UniPoly> {
        if self.terms.keys().any(|m| m.j > 0) {
            return None;
        }
        Some(self.restrict_y(&Rational::zero()))
    }

    /// `p(x, c)` as a univariate polynomial in x.
    pub fn restrict_y(&self, c: &Rational) -> UniPoly {
        let n = self.nested_in_x();
        UniPoly::new(n.iter().map(|u| u.eval(c)).collect())
    }

    /// `p(c, y)` as a univariate polynomial in y.
    pub fn restrict_x(&self, c: &Rational) -> UniPoly {
        let n = self.nested_in_y();
        UniPoly::new(n.iter().map(|u| u.eval(c)).collect())
    }

    pub fn from_uni_in_x(u: &UniPoly, vars: Vars) -> Self {
        Self::from_terms(
            u.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (Mono::new(i as u32, 0), c.clone())),
            vars,
        )
    }

    pub fn from_uni_in_y(u: &UniPoly, vars: Vars) -> Self {
        Self::from_uni_in_x(u, vars).swap_vars()
    }

    /// Scaled to coprime integer coefficients with a positive leading term.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        use num_bigint::BigInt;
        use num_integer::Integer;
        let l = rational::lcm_of_denominators(self.terms.values());
        let scaled = self.scale(&Rational::from_integer(l));
        let g = scaled
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
        let mut k = Rational::from_integer(g);
        if scaled.leading().unwrap().1.is_negative() {
            k = -k;
        }
        scaled.scale(&(Rational::one() / k))
    }

    /// Scaled so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&(Rational::one() / c)),
            None => self.clone(),
        }
    }

    /// Canonical text form, parseable by [`crate::parse::parse_poly`].
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in self.terms() {
            push_term(&mut out, c, &mono_text(m, self.vars));
        }
        out
    }
}

fn mono_text(m: Mono, vars: Vars) -> String {
    let mut parts = Vec::new();
    for (e, v) in [(m.i, vars.0), (m.j, vars.1)] {
        match e {
            0 => {}
            1 => parts.push(v.to_string()),
            _ => parts.push(format!("{}^{}", v, e)),
        }
    }
    parts.join("*")
}

/// Appends `c*mono` with the sign folded into the separator.
pub(crate) fn push_term(out: &mut String, c: &Rational, mono: &str) {
    let neg = c.is_negative();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let a = c.abs();
    if mono.is_empty() {
        out.push_str(&a.to_string());
    } else if a.is_one() {
        out.push_str(mono);
    } else {
        out.push_str(&format!("{}*{}", a, mono));
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, o: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, o: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, o: &RationalPoly) -> RationalPoly {
        let mut out = RationalPoly::zero(self.vars);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(Mono::new(a.i + b.i, a.j + b.j), ca * cb);
            }
        }
        out
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        self.scale(&-Rational::one())
    }
}

/// Which half-plane the blow-up substitution lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `u > 0`, `s = sqrt(u)`
    Positive,
    /// `u < 0`, `s = sqrt(-u)`
    Negative,
}

impl Branch {
    /// Sign relating `u` to `s^2`: `u = sign * s^2`.
    pub fn sign(self) -> i64 {
        match self {
            Branch::Positive => 1,
            Branch::Negative => -1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Positive => "u>0",
            Branch::Negative => "u<0",
        }
    }
}

/// Polynomial in `s = sqrt(|u|)` (integer, possibly negative exponent) and a
/// second variable. The `s` exponent counts halves of a power of `|u|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPowerPoly {
    terms: BTreeMap<(i32, u32), Rational>,
    branch: Branch,
    vars: Vars,
}

impl HalfPowerPoly {
    pub fn zero(branch: Branch, vars: Vars) -> Self {
        HalfPowerPoly {
            terms: BTreeMap::new(),
            branch,
            vars,
        }
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, half_exp: i32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((half_exp, j)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(half_exp, j));
        }
    }

    /// `(s exponent, second exponent, coefficient)` in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, u32, &Rational)> {
        self.terms.iter().map(|((k, j), c)| (*k, *j, c))
    }

    pub fn min_half_exponent(&self) -> Option<i32> {
        self.terms.keys().map(|(k, _)| *k).min()
    }

    /// Lifts an ordinary polynomial in `(u, ·)` by writing `u = ±s^2`.
    pub fn from_rational(p: &RationalPoly, branch: Branch) -> Self {
        let mut out = Self::zero(branch, p.vars());
        for (m, c) in p.terms() {
            let sgn = if branch.sign() < 0 && m.i % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term(2 * m.i as i32, m.j, sgn);
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Self::zero(self.branch, self.vars);
        for ((e, j), c) in &self.terms {
            out.add_term(*e, *j, c * k);
        }
        out
    }

    /// Multiplies by `s^k`.
    pub fn shift_half(&self, k: i32) -> Self {
        let mut out = Self::zero(self.branch, self.vars);
        for ((e, j), c) in &self.terms {
            out.add_term(e + k, *j, c.clone());
        }
        out
    }

    /// Exact quotient by the monomial `c * s^k * v^j`.
    pub fn divide_by_monomial(&self, c: &Rational, k: i32, j: u32) -> Result<Self, NotDivisible> {
        if c.is_zero() {
            return Err(NotDivisible);
        }
        let mut out = Self::zero(self.branch, self.vars);
        for ((e, jj), cc) in &self.terms {
            if *jj < j {
                return Err(NotDivisible);
            }
            out.add_term(e - k, jj - j, cc / c);
        }
        Ok(out)
    }

    /// Ordinary polynomial in `(u, ·)` when every `s` exponent is even and
    /// nonnegative.
    pub fn to_rational(&self) -> Option<RationalPoly> {
        let mut out = RationalPoly::zero(self.vars);
        for ((e, j), c) in &self.terms {
            if *e < 0 || e % 2 != 0 {
                return None;
            }
            let m = (e / 2) as u32;
            let sgn = if self.branch.sign() < 0 && m % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term(Mono::new(m, *j), sgn);
        }
        Some(out)
    }

    /// Terms whose `s` exponent is odd; these obstruct conversion back.
    pub fn odd_part(&self) -> Self {
        let mut out = Self::zero(self.branch, self.vars);
        for ((e, j), c) in &self.terms {
            if e % 2 != 0 {
                out.add_term(*e, *j, c.clone());
            }
        }
        out
    }

    pub fn with_vars(mut self, vars: Vars) -> Self {
        self.vars = vars;
        self
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let base = match self.branch {
            Branch::Positive => self.vars.0.to_string(),
            Branch::Negative => format!("(-{})", self.vars.0),
        };
        let mut out = String::new();
        for ((e, j), c) in self.terms.iter().rev() {
            let mut parts = Vec::new();
            match *e {
                0 => {}
                2 => parts.push(base.clone()),
                e if e % 2 == 0 => parts.push(format!("{}^{}", base, e / 2)),
                e => parts.push(format!("{}^({}/2)", base, e)),
            }
            match *j {
                0 => {}
                1 => parts.push(self.vars.1.to_string()),
                j => parts.push(format!("{}^{}", self.vars.1, j)),
            }
            push_term(&mut out, c, &parts.join("*"));
        }
        out
    }
}

impl Add for &HalfPowerPoly {
    type Output = HalfPowerPoly;
    fn add(self, o: &HalfPowerPoly) -> HalfPowerPoly {
        assert_eq!(self.branch, o.branch, "mixing blow-up branches");
        let mut out = self.clone();
        for ((e, j), c) in &o.terms {
            out.add_term(*e, *j, c.clone());
        }
        out
    }
}

impl Sub for &HalfPowerPoly {
    type Output = HalfPowerPoly;
    fn sub(self, o: &HalfPowerPoly) -> HalfPowerPoly {
        self + &o.scale(&-Rational::one())
    }
}

impl Mul for &HalfPowerPoly {
    type Output = HalfPowerPoly;
    fn mul(self, o: &HalfPowerPoly) -> HalfPowerPoly {
        assert_eq!(self.branch, o.branch, "mixing blow-up branches");
        let mut out = HalfPowerPoly::zero(self.branch, self.vars);
        for ((ea, ja), ca) in &self.terms {
            for ((eb, jb), cb) in &o.terms {
                out.add_term(ea + eb, ja + jb, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for HalfPowerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Substitutes `z = w * s` into a polynomial in `(u, z)`, where
/// `s = sqrt(u)` on the positive branch and `s = sqrt(-u)` on the negative
/// one. The result is a polynomial in `(s, w)`.
pub fn substitute_halfpower(p: &RationalPoly, branch: Branch) -> HalfPowerPoly {
    let vars = Vars(p.vars().0, "w");
    let mut out = HalfPowerPoly::zero(branch, vars);
    for (m, c) in p.terms() {
        // u^i = (±1)^i s^(2i), z^j = w^j s^j
        let sgn = if branch.sign() < 0 && m.i % 2 == 1 { -c.clone() } else { c.clone() };
        out.add_term(2 * m.i as i32 + m.j as i32, m.j, sgn);
    }
    out
}

/// Formal inverse `w = z / s` on the same branch.
pub fn unsubstitute_halfpower(p: &HalfPowerPoly, second: &'static str) -> HalfPowerPoly {
    let mut out = HalfPowerPoly::zero(p.branch, Vars(p.vars.0, second));
    for ((e, j), c) in &p.terms {
        out.add_term(e - *j as i32, *j, c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::rational::frac;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn xy(s: &str) -> RationalPoly {
        parse_poly(s, Vars::XY, &HashMap::new()).unwrap()
    }

    fn uz(s: &str) -> RationalPoly {
        parse_poly(s, Vars::UZ, &HashMap::new()).unwrap()
    }

    #[test]
    fn canonical_rendering_is_graded_lex() {
        let p = xy("1 + y^3 + x - x^2*y + 1/2*x*y^2");
        assert_eq!(p.render(), "-x^2*y + 1/2*x*y^2 + y^3 + x + 1");
        assert_eq!(xy(&p.render()), p);
        assert_eq!(xy("0").render(), "0");
    }

    #[test]
    fn derivatives() {
        let p = xy("x^3*y + 2*y^2");
        assert_eq!(p.dx(), xy("3*x^2*y"));
        assert_eq!(p.dy(), xy("x^3 + 4*y"));
    }

    #[test]
    fn exact_division() {
        let num = uz("1/2*u*z - u*z^3 - 2*u^2*z - 1/2*u^3*z");
        let q = num.divide_exact(&uz("u")).unwrap();
        assert_eq!(q, uz("1/2*z - z^3 - 2*u*z - 1/2*u^2*z"));
        assert_eq!(uz("0").divide_exact(&uz("u")).unwrap(), uz("0"));
        assert_eq!(uz("u^2 + u").divide_exact(&uz("u^2")), Err(NotDivisible));
        assert_eq!(
            xy("x^2 - y^2").divide_exact(&xy("x - y")).unwrap(),
            xy("x + y")
        );
    }

    #[test]
    fn halfpower_substitution_positive() {
        let p = uz("z*(z^2 - u)");
        let h = substitute_halfpower(&p, Branch::Positive);
        // u^(3/2) w (w^2 - 1)
        let mut expect = HalfPowerPoly::zero(Branch::Positive, Vars::UW);
        expect.add_term(3, 3, frac(1, 1));
        expect.add_term(3, 1, frac(-1, 1));
        assert_eq!(h, expect);
        assert_eq!(h.render(), "u^(3/2)*w^3 - u^(3/2)*w");
    }

    #[test]
    fn z_free_polynomials_pass_through() {
        let p = uz("u^2*(1 - u^2)");
        for b in [Branch::Positive, Branch::Negative] {
            let h = substitute_halfpower(&p, b);
            assert_eq!(h.to_rational().unwrap(), p.clone().with_vars(Vars::UW));
        }
    }

    #[test]
    fn halfpower_substitution_negative_tracks_signs() {
        // z^2 = -u w^2 on u < 0
        let h = substitute_halfpower(&uz("z^2"), Branch::Negative);
        assert_eq!(
            h.to_rational().unwrap(),
            parse_poly("-u*w^2", Vars::UW, &HashMap::new()).unwrap()
        );
    }

    #[test]
    fn compactified_component_substitution() {
        let mut params = HashMap::new();
        params.insert("p".to_string(), frac(3, 1));
        let p = parse_poly("-z*(z^2 - u + p*u^2 + u^3)", Vars::UZ, &params).unwrap();
        let h = substitute_halfpower(&p, Branch::Positive);
        // -u^(1/2) w (u w^2 - u + p u^2 + u^3)
        let inner = parse_poly("u*w^2 - u + p*u^2 + u^3", Vars::UW, &params).unwrap();
        let expect = (&HalfPowerPoly::from_rational(&inner, Branch::Positive)
            * &{
                let mut m = HalfPowerPoly::zero(Branch::Positive, Vars::UW);
                m.add_term(1, 1, frac(-1, 1));
                m
            })
            .with_vars(Vars::UW);
        assert_eq!(h, expect);
    }

    fn small_poly() -> impl Strategy<Value = RationalPoly> {
        proptest::collection::vec((-5i64..=5, 0u32..3, 0u32..3), 0..5)
            .prop_map(|t| RationalPoly::from_int_terms(&t, Vars::XY))
    }

    fn small_uz_poly() -> impl Strategy<Value = RationalPoly> {
        proptest::collection::vec((-5i64..=5, 0u32..3, 0u32..3), 0..5)
            .prop_map(|t| RationalPoly::from_int_terms(&t, Vars::UZ))
    }

    proptest! {
        #[test]
        fn distributive(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        }

        #[test]
        fn divide_undoes_multiply(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).divide_exact(&b).unwrap(), a);
        }

        #[test]
        fn halfpower_inverse_round_trip(p in small_uz_poly(), neg in any::<bool>()) {
            let branch = if neg { Branch::Negative } else { Branch::Positive };
            let h = substitute_halfpower(&p, branch);
            let back = unsubstitute_halfpower(&h, "z").to_rational().unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn render_parse_round_trip(p in small_poly()) {
            prop_assert_eq!(xy(&p.render()), p);
        }
    }
}
