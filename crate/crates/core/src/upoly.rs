//! Dense univariate polynomials over the rationals, Sturm sequences and
//! real-root isolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

/// Coefficients stored low degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The identity polynomial `t`.
    pub fn var() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `t - r`
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + rational::to_f64(c))
    }

    pub fn sign_at(&self, t: &Rational) -> i32 {
        rational::sign(&self.eval(t))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.lc();
        self.scale(&(Rational::one() / lc))
    }

    /// Integer coefficients with gcd 1 and positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        use num_integer::Integer;
        let l = rational::lcm_of_denominators(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let mut g = if g.is_zero() { BigInt::one() } else { g };
        if ints.last().is_some_and(|v| v.is_negative()) {
            g = -g;
        }
        Self::new(ints.into_iter().map(|v| Rational::new(v, g.clone())).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Polynomial division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let inv = Rational::one() / d.lc();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    /// Quotient when `d` divides `self`.
    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g` monic.
    pub fn ext_gcd(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (UniPoly::one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = Rational::one() / r0.lc();
        (r0.scale(&k), s0.scale(&k), t0.scale(&k))
    }

    pub fn squarefree(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").primitive()
    }

    /// Composition `self(other(t))`.
    pub fn compose(&self, other: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &UniPoly::constant(c.clone());
        }
        acc
    }

    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            // positive rescaling keeps sign variations intact
            let r = -r;
            let lc = r.lc().abs();
            seq.push(r.scale(&(Rational::one() / lc)));
        }
        if seq.last().is_some_and(UniPoly::is_zero) {
            seq.pop();
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        if self.is_zero() {
            return 0;
        }
        let seq = self.squarefree().sturm_sequence();
        let va = sign_variations(&seq, a);
        let vb = sign_variations(&seq, b);
        va.saturating_sub(vb)
    }

    /// Upper bound on the absolute value of every complex root.
    pub fn cauchy_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &lc)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{}^{}", var, i),
            };
            crate::poly::push_term(&mut out, c, &mono);
        }
        out
    }
}

fn sign_variations(seq: &[UniPoly], t: &Rational) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in seq {
        let s = p.sign_at(t);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

/// Interval isolating one real root of a squarefree polynomial.
///
/// Exact rational roots are stored as degenerate intervals `lo == hi` with a
/// linear defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub poly: UniPoly,
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn exact(r: Rational) -> Self {
        RootInterval {
            poly: UniPoly::linear_root(&r),
            lo: r.clone(),
            hi: r,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    /// Bisect once, keeping the half that contains the root.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / rational::int(2);
        let sm = self.poly.sign_at(&mid);
        if sm == 0 {
            // only happens for polynomials carrying a rational root
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        if sm == self.poly.sign_at(&self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    pub fn refine_to(&mut self, width: &Rational) {
        while &self.hi - &self.lo > *width {
            self.bisect();
        }
    }

    pub fn approx(&self) -> f64 {
        if self.is_exact() {
            return rational::to_f64(&self.lo);
        }
        let mut r = self.clone();
        r.refine_to(&Rational::new(BigInt::one(), BigInt::one() << 60));
        rational::to_f64(&((&r.lo + &r.hi) / rational::int(2)))
    }
}

fn isolate_in(
    f: &UniPoly,
    seq: &[UniPoly],
    lo: Rational,
    hi: Rational,
    out: &mut Vec<RootInterval>,
) {
    let n = sign_variations(seq, &lo) - sign_variations(seq, &hi);
    match n {
        0 => {}
        1 => out.push(RootInterval {
            poly: f.clone(),
            lo,
            hi,
        }),
        _ => {
            // pick a split point that is not a root
            let two = rational::int(2);
            let mut k = 0i64;
            let mid = loop {
                let w = rational::frac(k + 1, k + 2);
                let m = &lo + (&hi - &lo) * w / &two;
                if f.sign_at(&m) != 0 {
                    break m;
                }
                k += 1;
            };
            isolate_in(f, seq, lo, mid.clone(), out);
            isolate_in(f, seq, mid, hi, out);
        }
    }
}

/// All distinct real roots, sorted increasingly. Rational roots come back
/// exact; the rest as isolating intervals of the rational-root-free
/// squarefree cofactor.
pub fn real_roots(f: &UniPoly) -> Vec<RootInterval> {
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut sf = f.squarefree();
    let mut exact = Vec::new();
    for r in isolate_all(&sf) {
        if let Some(q) = rational_root_in(&sf, &r) {
            exact.push(q);
        }
    }
    for q in &exact {
        sf = sf.exact_div(&UniPoly::linear_root(q)).expect("root").primitive();
    }
    let mut roots: Vec<RootInterval> = exact.into_iter().map(RootInterval::exact).collect();
    roots.extend(isolate_all(&sf));
    sort_roots(&mut roots);
    roots
}

fn isolate_all(sf: &UniPoly) -> Vec<RootInterval> {
    if sf.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let b = sf.cauchy_bound();
    let seq = sf.sturm_sequence();
    let mut out = Vec::new();
    isolate_in(sf, &seq, -b.clone(), b, &mut out);
    out
}

/// The rational root inside `r`, if the root it isolates is rational.
fn rational_root_in(sf: &UniPoly, r: &RootInterval) -> Option<Rational> {
    if r.is_exact() {
        return Some(r.lo.clone());
    }
    let p = sf.primitive();
    let lc = p.lc().abs();
    // distinct rationals with denominator <= lc differ by >= 1/lc^2
    let width = Rational::one() / (&lc * &lc * rational::int(2));
    let mut r = r.clone();
    r.refine_to(&width);
    if r.is_exact() {
        return Some(r.lo);
    }
    let cand = rational::simplest_between(&r.lo, &r.hi);
    p.eval(&cand).is_zero().then_some(cand)
}

/// Sorts roots of (possibly different) polynomials, refining until the
/// intervals are disjoint.
pub fn sort_roots(roots: &mut [RootInterval]) {
    // intervals from different polynomials can overlap; refine pairwise
    for _ in 0..512 {
        let mut changed = false;
        for i in 0..roots.len() {
            for j in 0..roots.len() {
                if i == j {
                    continue;
                }
                let overlap = roots[i].lo <= roots[j].hi
                    && roots[j].lo <= roots[i].hi
                    && !(roots[i].is_exact() && roots[j].is_exact());
                if overlap {
                    let before = (roots[i].hi.clone() - &roots[i].lo, roots[j].hi.clone() - &roots[j].lo);
                    roots[i].bisect();
                    roots[j].bisect();
                    let after = (roots[i].hi.clone() - &roots[i].lo, roots[j].hi.clone() - &roots[j].lo);
                    if before != after {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    roots.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
}

/// Univariate polynomial whose coefficients are themselves polynomials in a
/// second variable; index = degree in the main variable.
pub type NestedPoly = Vec<UniPoly>;

fn trim_nested(p: &mut NestedPoly) {
    while p.last().is_some_and(UniPoly::is_zero) {
        p.pop();
    }
}

/// Resultant with respect to the main variable, via a fraction-free
/// Bareiss determinant of the Sylvester matrix.
pub fn resultant(a: &NestedPoly, b: &NestedPoly) -> UniPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    trim_nested(&mut a);
    trim_nested(&mut b);
    if a.is_empty() || b.is_empty() {
        return UniPoly::zero();
    }
    let m = a.len() - 1;
    let n = b.len() - 1;
    if m == 0 && n == 0 {
        return UniPoly::one();
    }
    if m == 0 {
        return a[0].pow(n as u32);
    }
    if n == 0 {
        return b[0].pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![UniPoly::zero(); size]; size];
    for row in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            mat[n + row][row + k] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut mat: Vec<Vec<UniPoly>>) -> UniPoly {
    let n = mat.len();
    let mut prev = UniPoly::one();
    let mut negate = false;
    for k in 0..n {
        if mat[k][k].is_zero() {
            match (k + 1..n).find(|&i| !mat[i][k].is_zero()) {
                Some(i) => {
                    mat.swap(i, k);
                    negate = !negate;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &(&mat[i][j] * &mat[k][k]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = v.exact_div(&prev).expect("Bareiss division is exact");
            }
            mat[i][k] = UniPoly::zero();
        }
        prev = mat[k][k].clone();
    }
    let det = mat[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}
