//! Invariant algebraic curves, exponential factors and Darboux first
//! integrals for systems `x' = x + P3`, `y' = y + Q3`.
//!
//! Invariant curves of degree at most two are found by splitting on the top
//! homogeneous part: it must be invariant under the cubic part of the field,
//! so it is built from factors of `x Q3 - y P3`. The remaining unknowns enter
//! through a handful of closed-form cases.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::compactify::{characteristic_form, cubic_parts};
use crate::linalg::nullspace;
use crate::poly::{Mono, RationalPoly, Vars};
use crate::rational::{self, Rational};
use crate::system::PlanarSystem;
use crate::upoly::{real_roots, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DarbouxError {
    #[error("invariant search incomplete: {0}")]
    SolverIncomplete(String),
    #[error("degree bound {0} is outside the supported range 1..=2")]
    DegreeOutOfRange(u32),
    #[error("exponents do not annihilate the cofactors")]
    RelationFails,
    #[error("exponent vector has {got} entries for {want} factors")]
    LengthMismatch { got: usize, want: usize },
    #[error("point lies on a pole or branch cut of the integral")]
    PoleOrBranch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    AlgebraicCurve,
    ExponentialFactor,
}

/// An invariant curve `L = 0` with `D(L) = k L`, or an exponential factor
/// `e^g` with `D(g) = k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxObject {
    pub kind: ObjectKind,
    pub body: RationalPoly,
    pub cofactor: RationalPoly,
    /// Cofactor degree within `n - 1` for a degree-`n` system.
    pub bounded: bool,
}

impl DarbouxObject {
    pub fn render(&self) -> String {
        match self.kind {
            ObjectKind::AlgebraicCurve => self.body.render(),
            ObjectKind::ExponentialFactor => format!("exp({})", self.body.render()),
        }
    }

    /// Re-derives the defining identity from scratch.
    pub fn verify(&self, sys: &PlanarSystem) -> bool {
        let d = sys.derivation(&self.body);
        match self.kind {
            ObjectKind::AlgebraicCurve => d == &self.cofactor * &self.body,
            ObjectKind::ExponentialFactor => d == self.cofactor,
        }
    }

    pub fn summary(&self) -> ObjectSummary {
        ObjectSummary {
            kind: self.kind,
            body: self.body.render(),
            cofactor: self.cofactor.render(),
            bounded: self.bounded,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObjectSummary {
    pub kind: ObjectKind,
    pub body: String,
    pub cofactor: String,
    pub bounded: bool,
}

/// Checks a candidate; `None` when a curve is not invariant or its cofactor
/// exceeds degree `n - 1`.
pub fn cofactor_of(sys: &PlanarSystem, candidate: &RationalPoly, kind: ObjectKind) -> Option<DarbouxObject> {
    if candidate.is_zero() {
        return None;
    }
    let limit = sys.total_degree().saturating_sub(1);
    let d = sys.derivation(candidate);
    match kind {
        ObjectKind::AlgebraicCurve => {
            let k = d.divide_exact(candidate).ok()?;
            if k.total_degree().unwrap_or(0) > limit {
                return None;
            }
            Some(DarbouxObject {
                kind,
                body: candidate.clone(),
                cofactor: k,
                bounded: true,
            })
        }
        ObjectKind::ExponentialFactor => Some(DarbouxObject {
            kind,
            bounded: d.total_degree().unwrap_or(0) <= limit,
            body: candidate.clone(),
            cofactor: d,
        }),
    }
}

/// Invariant curves found by [`find_algebraic_invariants`].
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSet {
    pub curves: Vec<DarbouxObject>,
    /// Every line through the origin is invariant (`x Q3 - y P3` vanishes).
    pub pencil: bool,
}

/// Homogeneous form in `(x, y)` from a polynomial in `t = y/x` of the given
/// total degree.
fn homogenize(f: &UniPoly, degree: usize, vars: Vars) -> RationalPoly {
    let mut out = RationalPoly::zero(vars);
    for (j, c) in f.coeffs().iter().enumerate() {
        out.add_term(Mono::new((degree - j) as u32, j as u32), c.clone());
    }
    out
}

/// Rational linear factors of a binary form (with multiplicity one each)
/// and its irreducible rational quadratic factors.
fn split_form(c: &RationalPoly) -> (Vec<RationalPoly>, Vec<RationalPoly>) {
    let vars = c.vars();
    let deg = c.total_degree().unwrap_or(0) as usize;
    let f = c.restrict_x(&Rational::one());
    let mut lines = Vec::new();
    let fdeg = f.degree().unwrap_or(0);
    if fdeg < deg {
        lines.push(RationalPoly::x(vars));
    }
    let mut rest = f.clone();
    for r in real_roots(&f.squarefree()) {
        if let Some(q) = r.as_rational() {
            let lin = UniPoly::linear_root(q);
            lines.push(homogenize(&lin, 1, vars).primitive());
            while let Some(d) = rest.exact_div(&lin) {
                rest = d;
            }
        }
    }
    let mut quads = Vec::new();
    let rest = rest.squarefree();
    match rest.degree() {
        Some(2) => quads.push(rest.clone()),
        Some(4) => quads.extend(quadratic_pairs(&rest)),
        _ => {}
    }
    let quads = quads.iter().map(|q| homogenize(q, 2, vars).primitive()).collect();
    (lines, quads)
}

/// Rational quadratic factors of a quartic without rational roots, found by
/// pairing its complex roots and checking the candidate exactly.
fn quadratic_pairs(f: &UniPoly) -> Vec<UniPoly> {
    use nalgebra::{DMatrix, Schur};
    let m = f.monic();
    let n = 4;
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -rational::to_f64(&m.coeff(i));
    }
    // the unshifted QR iteration can stall on rotation-like companions
    let Some(roots) = [0.0, 0.37, -1.3].iter().find_map(|&shift| {
        let shifted = &comp + DMatrix::<f64>::identity(n, n) * shift;
        let schur = Schur::try_new(shifted, 1e-14, 2000)?;
        Some(schur.complex_eigenvalues().iter().map(|r| r - shift).collect::<Vec<_>>())
    }) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (0, 3)] {
        let (r1, r2) = (roots[a], roots[b]);
        let s = r1 + r2;
        let p = r1 * r2;
        if s.im.abs() > 1e-6 || p.im.abs() > 1e-6 {
            continue;
        }
        let near = |v: f64| {
            let lo = rational::from_f64(v - 1e-7)?;
            let hi = rational::from_f64(v + 1e-7)?;
            Some(rational::simplest_between(&lo, &hi))
        };
        let (Some(sr), Some(pr)) = (near(s.re), near(p.re)) else { continue };
        let q = UniPoly::new(vec![pr, -sr, Rational::one()]);
        if let Some(other) = m.exact_div(&q) {
            out.push(q);
            out.push(other);
            break;
        }
    }
    out
}

/// `X3(f)`: derivation of `f` along the cubic part only.
fn cubic_derivation(p3: &RationalPoly, q3: &RationalPoly, f: &RationalPoly) -> RationalPoly {
    &(&f.dx() * p3) + &(&f.dy() * q3)
}

fn quotient_constant(num: &RationalPoly, den: &RationalPoly) -> Option<Rational> {
    let q = num.divide_exact(den).ok()?;
    if q.is_constant() {
        Some(if q.is_zero() { Rational::zero() } else { q.coeff(0, 0) })
    } else {
        None
    }
}

/// Irreducible invariant curves of degree at most `maxdeg` (1 or 2).
pub fn find_algebraic_invariants(sys: &PlanarSystem, maxdeg: u32) -> Result<InvariantSet, DarbouxError> {
    if !(1..=2).contains(&maxdeg) {
        return Err(DarbouxError::DegreeOutOfRange(maxdeg));
    }
    let (p3, q3) = cubic_parts(sys)
        .map_err(|_| DarbouxError::SolverIncomplete("system is not x' = x + cubic, y' = y + cubic".into()))?;
    let vars = sys.vars();
    let c = characteristic_form(sys).expect("shape checked");
    if c.is_zero() {
        return Ok(InvariantSet {
            curves: Vec::new(),
            pencil: true,
        });
    }
    let (lines, quads) = split_form(&c);
    let x3 = |f: &RationalPoly| cubic_derivation(&p3, &q3, f);
    let constant = |r: Rational| RationalPoly::constant(r, vars);
    let mut candidates: Vec<RationalPoly> = Vec::new();

    for l in &lines {
        // L = l with cofactor 1 + X3(l)/l
        candidates.push(l.clone());
        // L = l + c with X3(l) = -l^3 / c^2
        if let Some(mu) = quotient_constant(&x3(l), &l.pow(3)) {
            if mu.is_negative() {
                if let Some(c) = rational::rational_sqrt(&(-Rational::one() / &mu)) {
                    candidates.push(l + &constant(c.clone()));
                    candidates.push(l - &constant(c));
                }
            }
        }
    }

    if maxdeg >= 2 {
        let mut tops: Vec<(RationalPoly, bool)> = quads.iter().map(|q| (q.clone(), true)).collect();
        for i in 0..lines.len() {
            for j in i..lines.len() {
                tops.push((&lines[i] * &lines[j], false));
            }
        }
        for (l2, irreducible_top) in &tops {
            let Ok(k2) = x3(l2).divide_exact(l2) else { continue };
            if *irreducible_top {
                // homogeneous invariant L2 with cofactor 2 + k2
                candidates.push(l2.clone());
            }
            // L = L2 + c with k2 = lambda L2, c = 2 / lambda
            if let Some(lambda) = quotient_constant(&k2, l2) {
                if !lambda.is_zero() {
                    candidates.push(l2 + &constant(Rational::from_integer(2.into()) / lambda));
                }
            }
            // L = L2 + t l + c with L2 = c (q_l - k2), t^2 = c (2 L2 - c k2) / l^2
            for l in &lines {
                let ql = x3(l).divide_exact(l).expect("factor of the characteristic form");
                let diff = &ql - &k2;
                let Some(mu) = quotient_constant(&diff, l2) else { continue };
                if mu.is_zero() {
                    continue;
                }
                let c = Rational::one() / mu;
                let num = (&l2.scale(&Rational::from_integer(2.into())) - &k2.scale(&c)).scale(&c);
                let Some(t2) = quotient_constant(&num, &l.pow(2)) else { continue };
                if !t2.is_positive() {
                    continue;
                }
                let Some(t) = rational::rational_sqrt(&t2) else { continue };
                for s in [t.clone(), -t] {
                    candidates.push(&(l2 + &l.scale(&s)) + &constant(c.clone()));
                }
            }
        }
    }

    let mut curves: Vec<DarbouxObject> = Vec::new();
    for cand in candidates {
        let cand = cand.primitive();
        if curves.iter().any(|o| o.body == cand) {
            continue;
        }
        if cand.total_degree() == Some(2) && has_rational_line_factor(&cand, &curves) {
            continue;
        }
        if let Some(obj) = cofactor_of(sys, &cand, ObjectKind::AlgebraicCurve) {
            curves.push(obj);
        }
    }
    // lines first so conics are checked against every line
    curves.sort_by(|a, b| {
        a.body
            .total_degree()
            .cmp(&b.body.total_degree())
            .then_with(|| a.body.render().cmp(&b.body.render()))
    });
    let lines_found: Vec<DarbouxObject> = curves.iter().filter(|o| o.body.total_degree() == Some(1)).cloned().collect();
    curves.retain(|o| o.body.total_degree() == Some(1) || !has_rational_line_factor(&o.body, &lines_found));
    Ok(InvariantSet { curves, pencil: false })
}

/// Any rational factor of an invariant curve is itself an invariant line,
/// so reducibility over Q is decided against the lines already found.
fn has_rational_line_factor(conic: &RationalPoly, lines: &[DarbouxObject]) -> bool {
    lines
        .iter()
        .filter(|o| o.body.total_degree() == Some(1))
        .any(|o| conic.divide_exact(&o.body).is_ok())
}

/// Exponent candidates `g` of degree `1..=maxdeg`: every monomial, plus a
/// basis of the `g` whose `D(g)` stays within degree `n - 1`.
pub fn find_exponential_factors(sys: &PlanarSystem, maxdeg: u32) -> Result<Vec<DarbouxObject>, DarbouxError> {
    if !(1..=2).contains(&maxdeg) {
        return Err(DarbouxError::DegreeOutOfRange(maxdeg));
    }
    let vars = sys.vars();
    let limit = sys.total_degree().saturating_sub(1);
    let monos: Vec<Mono> = (1..=maxdeg)
        .flat_map(|d| (0..=d).rev().map(move |j| Mono::new(d - j, j)))
        .collect();
    let images: Vec<RationalPoly> = monos
        .iter()
        .map(|m| sys.derivation(&RationalPoly::monomial(Rational::one(), m.i, m.j, vars)))
        .collect();
    // rows: coefficients of D(g) above the degree limit
    let mut high: Vec<Mono> = images
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m).filter(|m| m.degree() > limit).collect::<Vec<_>>())
        .collect();
    high.sort();
    high.dedup();
    let rows: Vec<Vec<Rational>> = high
        .iter()
        .map(|h| images.iter().map(|p| p.coeff(h.i, h.j)).collect())
        .collect();
    let mut gs: Vec<RationalPoly> = nullspace(&rows, monos.len())
        .into_iter()
        .map(|v| {
            RationalPoly::from_terms(monos.iter().cloned().zip(v), vars).primitive()
        })
        .collect();
    for m in &monos {
        gs.push(RationalPoly::monomial(Rational::one(), m.i, m.j, vars));
    }
    let mut out: Vec<DarbouxObject> = Vec::new();
    for g in gs {
        if out.iter().any(|o| o.body == g) {
            continue;
        }
        out.extend(cofactor_of(sys, &g, ObjectKind::ExponentialFactor));
    }
    Ok(out)
}

/// Basis of exponent vectors `a` with `sum a_i k_i = 0`.
pub fn solve_exponent_relation(objects: &[DarbouxObject]) -> Vec<Vec<Rational>> {
    let mut monos: Vec<Mono> = objects
        .iter()
        .flat_map(|o| o.cofactor.terms().map(|(m, _)| m).collect::<Vec<_>>())
        .collect();
    monos.sort();
    monos.dedup();
    let rows: Vec<Vec<Rational>> = monos
        .iter()
        .map(|m| objects.iter().map(|o| o.cofactor.coeff(m.i, m.j)).collect())
        .collect();
    nullspace(&rows, objects.len())
}

/// `H = prod L_i^{a_i} * exp(sum a_j g_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstIntegral {
    pub factors: Vec<(DarbouxObject, Rational)>,
    pub verified: bool,
    /// Levels whose level sets are unions of invariant curves.
    pub remarkable_values: Vec<String>,
}

impl FirstIntegral {
    /// All factors constant: the product carries no information.
    pub fn is_constant(&self) -> bool {
        self.factors.iter().all(|(o, _)| o.body.is_constant())
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (o, a) in &self.factors {
            let base = o.body.render();
            let s = match o.kind {
                ObjectKind::AlgebraicCurve if a.is_one() => format!("({})", base),
                ObjectKind::AlgebraicCurve => format!("({})^({})", base, a),
                ObjectKind::ExponentialFactor if a.is_one() => format!("exp({})", base),
                ObjectKind::ExponentialFactor => format!("exp({}*({}))", a, base),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" * ")
        }
    }

    /// Clears exponent denominators: returns `(d, N, D)` with
    /// `H^d = N / D`, or `None` if an exponential factor is present.
    pub fn rational_form(&self) -> Option<(u64, RationalPoly, RationalPoly)> {
        if self.factors.iter().any(|(o, _)| o.kind == ObjectKind::ExponentialFactor) {
            return None;
        }
        let l = rational::lcm_of_denominators(self.factors.iter().map(|(_, a)| a));
        let d: u64 = l.try_into().ok()?;
        let vars = self.factors.first().map_or(Vars::XY, |(o, _)| o.body.vars());
        let mut num = RationalPoly::constant(Rational::one(), vars);
        let mut den = num.clone();
        for (o, a) in &self.factors {
            let e = a * Rational::from_integer(d.into());
            let k: u32 = e.abs().to_integer().try_into().ok()?;
            if e.is_positive() {
                num = &num * &o.body.pow(k);
            } else {
                den = &den * &o.body.pow(k);
            }
        }
        Some((d, num, den))
    }

    pub fn summary(&self) -> IntegralSummary {
        IntegralSummary {
            expression: self.render(),
            factors: self
                .factors
                .iter()
                .map(|(o, a)| FactorSummary {
                    object: o.summary(),
                    exponent: a.to_string(),
                })
                .collect(),
            verified: self.verified,
            remarkable_values: self.remarkable_values.clone(),
            rational_form: self.rational_form().map(|(d, n, den)| RationalForm {
                power: d,
                numerator: n.render(),
                denominator: den.render(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorSummary {
    pub object: ObjectSummary,
    pub exponent: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalForm {
    /// `H^power = numerator / denominator`
    pub power: u64,
    pub numerator: String,
    pub denominator: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralSummary {
    pub expression: String,
    pub factors: Vec<FactorSummary>,
    pub verified: bool,
    pub remarkable_values: Vec<String>,
    pub rational_form: Option<RationalForm>,
}

/// Builds `H` from an exponent vector after checking `sum a_i k_i = 0`.
pub fn build_first_integral(objects: &[DarbouxObject], alpha: &[Rational]) -> Result<FirstIntegral, DarbouxError> {
    if objects.len() != alpha.len() {
        return Err(DarbouxError::LengthMismatch {
            got: alpha.len(),
            want: objects.len(),
        });
    }
    let vars = objects.first().map_or(Vars::XY, |o| o.cofactor.vars());
    let mut sum = RationalPoly::zero(vars);
    for (o, a) in objects.iter().zip(alpha) {
        sum = &sum + &o.cofactor.scale(a);
    }
    if !sum.is_zero() {
        return Err(DarbouxError::RelationFails);
    }
    let factors: Vec<(DarbouxObject, Rational)> = objects
        .iter()
        .cloned()
        .zip(alpha.iter().cloned())
        .filter(|(_, a)| !a.is_zero())
        .collect();
    let curve = |o: &DarbouxObject| o.kind == ObjectKind::AlgebraicCurve && !o.body.is_constant();
    let mut remarkable = Vec::new();
    if factors.iter().any(|(o, a)| curve(o) && a.is_positive()) {
        remarkable.push("0".to_string());
    }
    if factors.iter().any(|(o, a)| curve(o) && a.is_negative()) {
        remarkable.push("inf".to_string());
    }
    Ok(FirstIntegral {
        factors,
        verified: true,
        remarkable_values: remarkable,
    })
}

/// Double-precision value of `H` at a point.
pub fn evaluate_integral(h: &FirstIntegral, (x, y): (f64, f64)) -> Result<f64, DarbouxError> {
    let mut acc = 1.0;
    let mut expo = 0.0;
    for (o, a) in &h.factors {
        let v = o.body.eval_f64(x, y);
        let af = rational::to_f64(a);
        match o.kind {
            ObjectKind::ExponentialFactor => expo += af * v,
            ObjectKind::AlgebraicCurve => {
                if a.is_integer() {
                    if v == 0.0 && a.is_negative() {
                        return Err(DarbouxError::PoleOrBranch);
                    }
                    let k: i32 = a.to_integer().try_into().map_err(|_| DarbouxError::PoleOrBranch)?;
                    acc *= v.powi(k);
                } else {
                    if v < 0.0 || (v == 0.0 && a.is_negative()) {
                        return Err(DarbouxError::PoleOrBranch);
                    }
                    acc *= v.powf(af);
                }
            }
        }
    }
    let out = acc * expo.exp();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(DarbouxError::PoleOrBranch)
    }
}

/// Outcome of the full search.
#[derive(Clone, Debug)]
pub struct IntegralSearch {
    pub invariants: InvariantSet,
    pub exponentials: Vec<DarbouxObject>,
    /// Objects entering the relation, in order.
    pub objects: Vec<DarbouxObject>,
    pub relations: Vec<Vec<Rational>>,
    pub integral: Option<FirstIntegral>,
    /// The integral needed exponential factors.
    pub used_exponential: bool,
}

/// Ordering key among candidate integrals: fewer factors, then smaller
/// weighted degree `sum deg(L) |a|`, then smaller coefficients.
fn simplicity(h: &FirstIntegral) -> (usize, Rational, BigInt) {
    let weighted: Rational = h
        .factors
        .iter()
        .map(|(o, a)| a.abs() * Rational::from_integer(o.body.total_degree().unwrap_or(0).into()))
        .sum();
    let height = h
        .factors
        .iter()
        .flat_map(|(o, _)| o.body.terms().map(|(_, k)| k.numer().abs().max(k.denom().clone())).collect::<Vec<_>>())
        .max()
        .unwrap_or_default();
    (h.factors.len(), weighted, height)
}

/// The simplest nonconstant integral spanned by single basis vectors, scaled
/// so that its last exponent is one.
fn simplest_nonconstant(objects: &[DarbouxObject], basis: &[Vec<Rational>]) -> Option<FirstIntegral> {
    basis
        .iter()
        .filter_map(|a| {
            let last = a.iter().rev().find(|v| !v.is_zero())?;
            let scaled: Vec<Rational> = a.iter().map(|v| v / last).collect();
            build_first_integral(objects, &scaled).ok()
        })
        .filter(|h| !h.is_constant())
        .min_by(|a, b| simplicity(a).cmp(&simplicity(b)))
}

/// Algebraic invariants first; when they admit no nonconstant relation,
/// bounded exponential factors are added.
pub fn find_first_integral(sys: &PlanarSystem, maxdeg: u32) -> Result<IntegralSearch, DarbouxError> {
    let maxdeg = maxdeg.clamp(1, 2);
    let invariants = find_algebraic_invariants(sys, maxdeg)?;
    let exponentials = find_exponential_factors(sys, maxdeg)?;
    let mut objects = invariants.curves.clone();
    let mut relations = solve_exponent_relation(&objects);
    let mut integral = simplest_nonconstant(&objects, &relations);
    let mut used_exponential = false;
    if integral.is_none() {
        objects.extend(exponentials.iter().filter(|o| o.bounded).cloned());
        relations = solve_exponent_relation(&objects);
        integral = simplest_nonconstant(&objects, &relations);
        used_exponential = integral.is_some();
    }
    Ok(IntegralSearch {
        invariants,
        exponentials,
        objects,
        relations,
        integral,
        used_exponential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::rational::{frac, int};
    use crate::system::family_two;
    use std::collections::HashMap;

    fn xy(s: &str, p: &Rational) -> RationalPoly {
        let mut m = HashMap::new();
        m.insert("p".to_string(), p.clone());
        parse_poly(s, Vars::XY, &m).unwrap()
    }

    fn curve(sys: &PlanarSystem, s: &str, p: &Rational) -> DarbouxObject {
        cofactor_of(sys, &xy(s, p), ObjectKind::AlgebraicCurve).unwrap()
    }

    fn bodies(set: &InvariantSet) -> Vec<String> {
        set.curves.iter().map(|o| o.body.render()).collect()
    }

    #[test]
    fn cofactors_by_hand() {
        let p = int(2);
        let s = family_two(&p);
        assert_eq!(curve(&s, "1 + p*y^2", &p).cofactor, xy("4*y^2", &p));
        assert_eq!(curve(&s, "x + y", &p).cofactor, xy("1 - x*y + y^2 + p*y^2", &p));
        let e = cofactor_of(&s, &xy("y^2", &p), ObjectKind::ExponentialFactor).unwrap();
        assert_eq!(e.cofactor, xy("2*y^2*(1 + p*y^2)", &p));
        assert!(cofactor_of(&s, &xy("x", &p), ObjectKind::AlgebraicCurve).is_none());
    }

    #[test]
    fn invariants_of_family_two() {
        let p = int(1);
        let set = find_algebraic_invariants(&family_two(&p), 2).unwrap();
        // the hyperbola y (x - y) = 2 is an extra invariant at p = 1
        assert_eq!(bodies(&set), vec!["x + y", "x - y", "y", "x*y - y^2 - 2", "y^2 + 1"]);
        let s = family_two(&p);
        for o in &set.curves {
            assert!(o.verify(&s));
        }
        let want = ["1 - x*y + y^2 + p*y^2", "1 - x*y - y^2 + p*y^2", "1 + p*y^2", "y^2 - x*y", "2*p*y^2"];
        for (o, k) in set.curves.iter().zip(want) {
            assert_eq!(o.cofactor, xy(k, &p));
        }

        let set = find_algebraic_invariants(&family_two(&int(0)), 1).unwrap();
        assert_eq!(bodies(&set), vec!["x + y", "x - y", "y"]);
        let set = find_algebraic_invariants(&family_two(&int(0)), 2).unwrap();
        assert_eq!(bodies(&set), vec!["x + y", "x - y", "y"]);
    }

    #[test]
    fn negative_p_splits_the_conic() {
        let set = find_algebraic_invariants(&family_two(&int(-1)), 2).unwrap();
        assert_eq!(bodies(&set), vec!["x + y", "x - y", "y", "y + 1", "y - 1", "x*y + y^2 - 2"]);
        let set = find_algebraic_invariants(&family_two(&int(-2)), 2).unwrap();
        assert_eq!(bodies(&set), vec!["x + y", "x - y", "y", "2*y^2 - 1"]);
        let set = find_algebraic_invariants(&family_two(&frac(1, 2)), 2).unwrap();
        assert_eq!(bodies(&set), vec!["x + y", "x - y", "y", "y^2 + 2"]);
    }

    #[test]
    fn star_is_a_pencil() {
        let s = PlanarSystem::new(xy("x", &int(0)), xy("y", &int(0)), Vars::XY);
        let set = find_algebraic_invariants(&s, 1).unwrap();
        assert!(set.pencil);
        let e = cofactor_of(&s, &xy("x + y", &int(0)), ObjectKind::ExponentialFactor).unwrap();
        assert_eq!(e.cofactor, xy("x + y", &int(0)));
    }

    #[test]
    fn irreducible_quadratic_top() {
        // rotation-like cubic part: x Q3 - y P3 = (x^2 + y^2)^2, the circle
        // x^2 + y^2 is invariant with cofactor 2
        let s = PlanarSystem::new(
            xy("x - y*(x^2 + y^2)", &int(0)),
            xy("y + x*(x^2 + y^2)", &int(0)),
            Vars::XY,
        );
        let set = find_algebraic_invariants(&s, 2).unwrap();
        assert_eq!(bodies(&set), vec!["x^2 + y^2"]);
        assert_eq!(set.curves[0].cofactor, xy("2", &int(0)));
    }

    #[test]
    fn quartic_splits_into_quadratics() {
        let f = UniPoly::new(vec![int(2), int(0), int(3), int(0), int(1)]);
        let mut qs: Vec<_> = quadratic_pairs(&f).into_iter().map(|q| q.coeff(0)).collect();
        qs.sort();
        assert_eq!(qs, vec![int(1), int(2)]);
        let irreducible = UniPoly::new(vec![int(2), int(0), int(0), int(0), int(1)]);
        assert!(quadratic_pairs(&irreducible).is_empty());
        // t^4 + 4 = (t^2 + 2t + 2)(t^2 - 2t + 2)
        let sophie = UniPoly::new(vec![int(4), int(0), int(0), int(0), int(1)]);
        assert_eq!(quadratic_pairs(&sophie).len(), 2);
    }

    #[test]
    fn conic_with_linear_part() {
        // L = y^2 + 2y + 2 style: build a system around L = x^2 + y (not
        // through the case split's lines) and just check every reported
        // curve re-verifies and is irreducible
        for p in [-3, -1, 1, 3] {
            let pr = frac(p, 2);
            let s = family_two(&pr);
            let set = find_algebraic_invariants(&s, 2).unwrap();
            for o in &set.curves {
                assert!(o.verify(&s));
                assert!(o.cofactor.total_degree().unwrap_or(0) <= 2);
            }
        }
        assert_eq!(find_algebraic_invariants(&family_two(&int(1)), 3), Err(DarbouxError::DegreeOutOfRange(3)));
    }

    #[test]
    fn exponential_candidates() {
        let p = int(1);
        let s = family_two(&p);
        let ex = find_exponential_factors(&s, 2).unwrap();
        let x = ex.iter().find(|o| o.body == xy("x", &p)).unwrap();
        assert_eq!(&x.cofactor, s.p());
        assert!(!x.bounded);
        let y2 = ex.iter().find(|o| o.body == xy("y^2", &p)).unwrap();
        assert_eq!(y2.cofactor, xy("2*y^2*(1 + p*y^2)", &p));
        assert!(!y2.bounded);
        let ex = find_exponential_factors(&family_two(&int(0)), 2).unwrap();
        let bounded: Vec<_> = ex.iter().filter(|o| o.bounded).map(|o| o.body.render()).collect();
        assert_eq!(bounded, vec!["y", "y^2"]);
    }

    #[test]
    fn relations() {
        let p = int(2);
        let s = family_two(&p);
        let objs = vec![curve(&s, "x - y", &p), curve(&s, "x + y", &p), curve(&s, "1 + p*y^2", &p)];
        assert_eq!(solve_exponent_relation(&objs), vec![vec![int(2), int(-2), int(1)]]);
        let h = build_first_integral(&objs, &[int(2), int(-2), int(1)]).unwrap();
        assert!(h.verified);
        assert!(build_first_integral(&objs, &[int(1), int(1), int(1)]).is_err());

        let z = int(0);
        let s0 = family_two(&z);
        let e = cofactor_of(&s0, &xy("y^2", &z), ObjectKind::ExponentialFactor).unwrap();
        let objs0 = vec![curve(&s0, "x - y", &z), curve(&s0, "x + y", &z), e];
        assert_eq!(solve_exponent_relation(&objs0), vec![vec![int(1), int(-1), int(1)]]);

        let one = int(1);
        let s1 = family_two(&one);
        assert!(solve_exponent_relation(&[curve(&s1, "y", &one)]).is_empty());
    }

    #[test]
    fn integral_for_p_one() {
        let p = int(1);
        let s = family_two(&p);
        let objs = vec![curve(&s, "x - y", &p), curve(&s, "x + y", &p), curve(&s, "1 + y^2", &p)];
        let h = build_first_integral(&objs, &[int(1), int(-1), int(1)]).unwrap();
        assert_eq!(h.render(), "(x - y) * (x + y)^(-1) * (y^2 + 1)");
        assert_eq!(h.remarkable_values, vec!["0", "inf"]);
        let v = evaluate_integral(&h, (2.0, 1.0)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(evaluate_integral(&h, (1.0, -1.0)), Err(DarbouxError::PoleOrBranch));
        let (d, n, den) = h.rational_form().unwrap();
        assert_eq!(d, 1);
        assert_eq!(n, &xy("x - y", &p) * &xy("y^2 + 1", &p));
        assert_eq!(den, xy("x + y", &p));
    }

    #[test]
    fn search_prefers_the_simplest_integral() {
        // at p = 1 the relations also give y (x y - y^2 - 2)/(x + y) = H - 1
        let search = find_first_integral(&family_two(&int(1)), 2).unwrap();
        assert_eq!(search.relations.len(), 2);
        let h = search.integral.unwrap();
        assert_eq!(h.render(), "(x + y)^(-1) * (x - y) * (y^2 + 1)");
        let h = find_first_integral(&family_two(&int(2)), 2).unwrap().integral.unwrap();
        assert_eq!(h.render(), "(x + y)^(-2) * (x - y)^(2) * (2*y^2 + 1)");
    }

    #[test]
    fn integral_for_p_zero_uses_exponential() {
        let search = find_first_integral(&family_two(&int(0)), 2).unwrap();
        assert!(search.used_exponential);
        let h = search.integral.unwrap();
        assert_eq!(h.render(), "(x + y)^(-1) * (x - y) * exp(y^2)");
        assert!(h.rational_form().is_none());
        for x in [-3.0, 0.5, 2.0] {
            assert!((evaluate_integral(&h, (x, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_product_at_p_zero() {
        // L4 = 1 + p y^2 is the constant 1 at p = 0
        let z = int(0);
        let s = family_two(&z);
        let one = cofactor_of(&s, &xy("1 + p*y^2", &z), ObjectKind::AlgebraicCurve).unwrap();
        let objs = vec![curve(&s, "x - y", &z), curve(&s, "x + y", &z), one];
        let h = build_first_integral(&objs, &[z.clone(), z.clone(), int(1)]).unwrap();
        assert!(h.is_constant());
    }

    #[test]
    fn rational_integral_for_rational_p() {
        for p in [int(1), int(2), int(-2), frac(1, 2), frac(-3, 4)] {
            let s = family_two(&p);
            let search = find_first_integral(&s, 2).unwrap();
            assert!(!search.used_exponential, "p = {}", p);
            let h = search.integral.unwrap();
            let (d, n, den) = h.rational_form().unwrap();
            assert!(d >= 1);
            // D(N) D - N D(D) = 0 exactly: N/D is a first integral
            let lhs = &(&s.derivation(&n) * &den) - &(&n * &s.derivation(&den));
            assert!(lhs.is_zero(), "p = {}", p);
        }
    }

    #[test]
    fn branch_guard() {
        let p = frac(1, 2);
        let s = family_two(&p);
        let objs = vec![curve(&s, "x - y", &p), curve(&s, "x + y", &p), curve(&s, "1 + p*y^2", &p)];
        let h = build_first_integral(&objs, &[frac(1, 2), frac(-1, 2), int(1)]).unwrap();
        assert_eq!(evaluate_integral(&h, (-2.0, 1.0)), Err(DarbouxError::PoleOrBranch));
        assert!(evaluate_integral(&h, (2.0, 1.0)).is_ok());
        assert_eq!(h.rational_form().unwrap().0, 2);
    }
}
