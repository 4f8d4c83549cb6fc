//! Planar polynomial systems `x' = P(x, y)`, `y' = Q(x, y)`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebraic::{AlgebraicPoint, FieldElem, PointSummary};
use crate::classify::ClassificationTag;
use crate::parse::{parse_param, parse_poly, ParseError};
use crate::poly::{Branch, RationalPoly, Vars};
use crate::rational::{self, Rational};
use crate::upoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid system description: {0}")]
    Description(String),
    #[error("expected a polynomial of degree exactly one, got `{0}`")]
    NotALine(String),
    #[error("line `{0}` is not invariant")]
    NotInvariant(String),
    #[error("the equilibrium set contains a curve")]
    PositiveDimensional,
    #[error("the components share a nonconstant factor; its real zero set is not analyzed")]
    CommonFactor,
    #[error("equilibrium solving is only implemented up to total degree 3 (got {0})")]
    DegreeTooHigh(u32),
    #[error("equilibrium solver could not reach general position")]
    SolverIncomplete,
}

/// One step of the coordinate/time transformation history of a system.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    /// `u = y/x, z = 1/x`, time multiplied by `z^2`.
    ChartX,
    /// `v = x/y, z = 1/y`, time multiplied by `z^2`.
    ChartY,
    /// First variable shifted: `new = old - shift`.
    Translate {
        #[serde(with = "rational_text")]
        shift: Rational,
    },
    /// `w = z / sqrt(|u|)` on one half-plane.
    HalfPowerBlowup { branch: Branch },
    /// Field divided by `factor`; orbits kept, orientation flips where the
    /// factor is negative.
    TimeRescale {
        #[serde(serialize_with = "poly_text")]
        factor: RationalPoly,
    },
    /// `u = v r^2, z = sign * r` with `r >= 0`, field scaled by `r^(2 - power)`.
    DirectionalChart { sign: i8, power: u32 },
}

fn poly_text<S: serde::Serializer>(p: &RationalPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.render())
}

pub(crate) mod rational_text {
    use super::Rational;
    pub fn serialize<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }
}

impl Transform {
    /// Maps a point of the transformed chart back to the coordinates of the
    /// predecessor system.
    pub fn map_back(&self, (a, b): (f64, f64)) -> Option<(f64, f64)> {
        match self {
            Transform::ChartX => (b != 0.0).then(|| (1.0 / b, a / b)),
            Transform::ChartY => (b != 0.0).then(|| (a / b, 1.0 / b)),
            Transform::Translate { shift } => Some((a + rational::to_f64(shift), b)),
            Transform::HalfPowerBlowup { branch } => {
                let s = (a * branch.sign() as f64).max(0.0).sqrt();
                Some((a, b * s))
            }
            Transform::TimeRescale { .. } => Some((a, b)),
            Transform::DirectionalChart { sign, .. } => Some((a * b * b, *sign as f64 * b)),
        }
    }

    /// `-1` when this step reverses time at the given (post-step) point.
    pub fn orientation_at(&self, (a, b): (f64, f64)) -> i32 {
        match self {
            Transform::TimeRescale { factor } => {
                if factor.eval_f64(a, b) < 0.0 {
                    -1
                } else {
                    1
                }
            }
            // the chart divides by r^power
            Transform::DirectionalChart { power, .. } if power % 2 == 1 && b < 0.0 => -1,
            _ => 1,
        }
    }
}

/// A planar polynomial vector field with its transformation lineage.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSystem {
    p: RationalPoly,
    q: RationalPoly,
    vars: Vars,
    lineage: Vec<Transform>,
}

impl PlanarSystem {
    pub fn new(p: RationalPoly, q: RationalPoly, vars: Vars) -> Self {
        PlanarSystem {
            p: p.with_vars(vars),
            q: q.with_vars(vars),
            vars,
            lineage: Vec::new(),
        }
    }

    /// Successor system produced by `step` from `self`.
    pub fn derived(&self, p: RationalPoly, q: RationalPoly, vars: Vars, step: Transform) -> Self {
        let mut lineage = self.lineage.clone();
        lineage.push(step);
        PlanarSystem {
            p: p.with_vars(vars),
            q: q.with_vars(vars),
            vars,
            lineage,
        }
    }

    pub fn p(&self) -> &RationalPoly {
        &self.p
    }

    pub fn q(&self) -> &RationalPoly {
        &self.q
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn lineage(&self) -> &[Transform] {
        &self.lineage
    }

    pub fn total_degree(&self) -> u32 {
        self.p
            .total_degree()
            .unwrap_or(0)
            .max(self.q.total_degree().unwrap_or(0))
    }

    /// Lie derivative of `f` along the field: `f_x P + f_y Q`.
    pub fn derivation(&self, f: &RationalPoly) -> RationalPoly {
        &(&f.dx() * &self.p) + &(&f.dy() * &self.q)
    }

    pub fn eval_f64(&self, a: f64, b: f64) -> (f64, f64) {
        (self.p.eval_f64(a, b), self.q.eval_f64(a, b))
    }

    /// Replays `lineage` on `root`, returning the reconstructed system.
    pub fn replay(root: &PlanarSystem, lineage: &[Transform]) -> Result<PlanarSystem, String> {
        let mut sys = root.clone();
        for step in lineage {
            sys = apply_transform(&sys, step)?;
        }
        Ok(sys)
    }

    /// Maps a point in this system's coordinates back to the root system,
    /// together with the accumulated time orientation.
    pub fn to_root_coords(&self, pt: (f64, f64)) -> Option<((f64, f64), i32)> {
        let mut cur = pt;
        let mut orient = 1;
        for step in self.lineage.iter().rev() {
            orient *= step.orientation_at(cur);
            cur = step.map_back(cur)?;
        }
        Some((cur, orient))
    }

    pub fn describe(&self) -> SystemSummary {
        SystemSummary {
            vars: [self.vars.0.to_string(), self.vars.1.to_string()],
            p_comp: self.p.render(),
            q_comp: self.q.render(),
        }
    }
}

fn apply_transform(sys: &PlanarSystem, step: &Transform) -> Result<PlanarSystem, String> {
    use crate::{blowup, compactify};
    match step {
        Transform::ChartX => compactify::chart_x(sys).map_err(|e| e.to_string()),
        Transform::ChartY => compactify::chart_y(sys).map_err(|e| e.to_string()),
        Transform::Translate { shift } => Ok(translate_first(sys, shift)),
        Transform::HalfPowerBlowup { branch } => blowup::half_power_blowup(sys, *branch)
            .map(|c| c.sys)
            .map_err(|e| e.to_string()),
        Transform::TimeRescale { factor } => {
            rescale(sys, factor).map_err(|e| e.to_string())
        }
        Transform::DirectionalChart { sign, .. } => {
            blowup::directional_chart(sys, *sign).map_err(|e| e.to_string())
        }
    }
}

/// Shifts the first variable so that `old = new + shift`.
pub fn translate_first(sys: &PlanarSystem, shift: &Rational) -> PlanarSystem {
    let v = sys.vars;
    let nx = &RationalPoly::x(v) + &RationalPoly::constant(shift.clone(), v);
    let ny = RationalPoly::y(v);
    sys.derived(
        sys.p.substitute(&nx, &ny),
        sys.q.substitute(&nx, &ny),
        v,
        Transform::Translate {
            shift: shift.clone(),
        },
    )
}

/// Divides both components by `factor`.
pub fn rescale(sys: &PlanarSystem, factor: &RationalPoly) -> Result<PlanarSystem, crate::poly::NotDivisible> {
    let p = sys.p.divide_exact(factor)?;
    let q = sys.q.divide_exact(factor)?;
    Ok(sys.derived(
        p,
        q,
        sys.vars,
        Transform::TimeRescale {
            factor: factor.clone().with_vars(sys.vars),
        },
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SystemSummary {
    pub vars: [String; 2],
    pub p_comp: String,
    pub q_comp: String,
}

/// JSON form `{"p_comp": "...", "q_comp": "...", "params": {"p": "1/2"}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemDescription {
    pub p_comp: String,
    pub q_comp: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl SystemDescription {
    pub fn parse_params(&self) -> Result<HashMap<String, Rational>, SystemError> {
        let mut out = HashMap::new();
        for (k, v) in &self.params {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => {
                    return Err(SystemError::Description(format!(
                        "parameter `{}` must be a number or string, got {}",
                        k, other
                    )))
                }
            };
            out.insert(k.clone(), parse_param(&text)?);
        }
        Ok(out)
    }

    pub fn build(&self) -> Result<PlanarSystem, SystemError> {
        let params = self.parse_params()?;
        let p = parse_poly(&self.p_comp, Vars::XY, &params)?;
        let q = parse_poly(&self.q_comp, Vars::XY, &params)?;
        Ok(PlanarSystem::new(p, q, Vars::XY))
    }
}

impl PlanarSystem {
    pub fn from_json(text: &str) -> Result<PlanarSystem, SystemError> {
        let desc: SystemDescription =
            serde_json::from_str(text).map_err(|e| SystemError::Description(e.to_string()))?;
        desc.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SystemDescription {
            p_comp: self.p.render(),
            q_comp: self.q.render(),
            params: BTreeMap::new(),
        })
        .expect("serializable")
    }
}

/// `x' = x - x^2 y + p x y^2 + y^3`, `y' = y + p y^3`.
pub fn family_two(p: &Rational) -> PlanarSystem {
    let v = Vars::XY;
    let mut px = RationalPoly::from_int_terms(&[(1, 1, 0), (-1, 2, 1), (1, 0, 3)], v);
    px = &px + &RationalPoly::monomial(p.clone(), 1, 2, v);
    let mut qy = RationalPoly::from_int_terms(&[(1, 0, 1)], v);
    qy = &qy + &RationalPoly::monomial(p.clone(), 0, 3, v);
    PlanarSystem::new(px, qy, v)
}

/// Exact 2x2 Jacobian, entries in the point's number field.
#[derive(Clone, Debug)]
pub struct Jacobian(pub [[FieldElem; 2]; 2]);

impl Jacobian {
    pub fn trace(&self) -> FieldElem {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn det(&self) -> FieldElem {
        &(&self.0[0][0] * &self.0[1][1]) - &(&self.0[0][1] * &self.0[1][0])
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.0[0][0].to_f64(), self.0[0][1].to_f64()],
            [self.0[1][0].to_f64(), self.0[1][1].to_f64()],
        ]
    }

    pub fn as_rational(&self) -> Option<[[Rational; 2]; 2]> {
        Some([
            [self.0[0][0].as_rational()?, self.0[0][1].as_rational()?],
            [self.0[1][0].as_rational()?, self.0[1][1].as_rational()?],
        ])
    }

    pub fn texts(&self) -> [[String; 2]; 2] {
        [
            [self.0[0][0].exact_text(), self.0[0][1].exact_text()],
            [self.0[1][0].exact_text(), self.0[1][1].exact_text()],
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(FieldElem::is_zero)
    }
}

pub fn jacobian_at(sys: &PlanarSystem, pt: &AlgebraicPoint) -> Jacobian {
    Jacobian([
        [pt.eval(&sys.p.dx()), pt.eval(&sys.p.dy())],
        [pt.eval(&sys.q.dx()), pt.eval(&sys.q.dy())],
    ])
}

/// A singular point with its linearization and type.
#[derive(Clone, Debug)]
pub struct Equilibrium {
    pub point: AlgebraicPoint,
    pub jacobian: Jacobian,
    pub tag: ClassificationTag,
    pub context: String,
}

impl Equilibrium {
    pub fn at(sys: &PlanarSystem, point: AlgebraicPoint, context: &str) -> Self {
        let jacobian = jacobian_at(sys, &point);
        let tag = crate::classify::classify_linear(&jacobian);
        Equilibrium {
            point,
            jacobian,
            tag,
            context: context.to_string(),
        }
    }

    pub fn summary(&self) -> EquilibriumSummary {
        EquilibriumSummary {
            context: self.context.clone(),
            point: self.point.summary(),
            jacobian: self.jacobian.texts(),
            tag: self.tag.label(),
            star: self.tag.star,
            evidence: self.tag.evidence.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EquilibriumSummary {
    pub context: String,
    pub point: PointSummary,
    pub jacobian: [[String; 2]; 2],
    pub tag: String,
    pub star: bool,
    pub evidence: crate::classify::Evidence,
}

/// Cofactor `k` with `D(line) = k * line`, or `None` when the line is not
/// invariant.
pub fn invariant_line_check(
    sys: &PlanarSystem,
    line: &RationalPoly,
) -> Result<Option<RationalPoly>, SystemError> {
    if line.total_degree() != Some(1) {
        return Err(SystemError::NotALine(line.render()));
    }
    Ok(sys.derivation(line).divide_exact(line).ok())
}

/// A line `y = slope * x` or `y = level`.
#[derive(Clone, Debug, PartialEq)]
pub enum Line {
    Through(Rational),
    Horizontal(Rational),
}

impl Line {
    pub fn poly(&self) -> RationalPoly {
        let v = Vars::XY;
        match self {
            Line::Through(c) => &RationalPoly::y(v) - &RationalPoly::x(v).scale(c),
            Line::Horizontal(c) => &RationalPoly::y(v) - &RationalPoly::constant(c.clone(), v),
        }
    }
}

/// The flow restricted to an invariant line, parametrized by `x`:
/// returns `(x', y')` as univariate polynomials in `x`.
pub fn restrict_to_line(sys: &PlanarSystem, line: &Line) -> Result<(UniPoly, UniPoly), SystemError> {
    let v = sys.vars;
    let (fy, slope) = match line {
        Line::Through(c) => (RationalPoly::x(v).scale(c), c.clone()),
        Line::Horizontal(c) => (RationalPoly::constant(c.clone(), v), Rational::zero()),
    };
    let fx = RationalPoly::x(v);
    let p = sys.p.substitute(&fx, &fy);
    let q = sys.q.substitute(&fx, &fy);
    // tangency: y' - slope * x' vanishes along the line
    if !(&q - &p.scale(&slope)).is_zero() {
        return Err(SystemError::NotInvariant(line.poly().render()));
    }
    let zero = Rational::zero();
    Ok((p.restrict_y(&zero), q.restrict_y(&zero)))
}

pub use crate::equilibria::finite_equilibria;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn xy(s: &str, p: i64) -> RationalPoly {
        let mut m = HashMap::new();
        m.insert("p".to_string(), int(p));
        parse_poly(s, Vars::XY, &m).unwrap()
    }

    #[test]
    fn family_two_components() {
        let s = family_two(&int(1));
        assert_eq!(s.p(), &xy("x - x^2*y + x*y^2 + y^3", 0));
        assert_eq!(s.q(), &xy("y + y^3", 0));
        let s = family_two(&int(0));
        assert_eq!(s.p(), &xy("x - x^2*y + y^3", 0));
        assert_eq!(s.q(), &xy("y", 0));
        let s = family_two(&int(-1));
        assert_eq!(s.p(), &xy("x - x^2*y - x*y^2 + y^3", 0));
        assert_eq!(s.q(), &xy("y - y^3", 0));
    }

    #[test]
    fn jacobian_at_rational_point() {
        // hand differentiation of the p = -1 system at (1, 1):
        // P_x = 1 - 2xy - y^2 = -2, P_y = -x^2 - 2xy + 3y^2 = 0,
        // Q_x = 0, Q_y = 1 - 3y^2 = -2
        let s = family_two(&int(-1));
        let j = jacobian_at(&s, &AlgebraicPoint::rational(int(1), int(1)));
        assert_eq!(j.as_rational().unwrap(), [[int(-2), int(0)], [int(0), int(-2)]]);
    }

    #[test]
    fn origin_is_star_node_for_all_p() {
        for p in [-2, -1, 0, 1, 2] {
            let s = family_two(&int(p));
            let j = jacobian_at(&s, &AlgebraicPoint::rational(int(0), int(0)));
            assert_eq!(j.as_rational().unwrap(), [[int(1), int(0)], [int(0), int(1)]]);
        }
    }

    #[test]
    fn invariant_lines_and_cofactors() {
        for p in [-1, 0, 2] {
            let s = family_two(&int(p));
            let k = invariant_line_check(&s, &xy("y", p)).unwrap().unwrap();
            assert_eq!(k, xy("1 + p*y^2", p));
            let k = invariant_line_check(&s, &xy("x - y", p)).unwrap().unwrap();
            assert_eq!(k, xy("1 - x*y - y^2 + p*y^2", p));
            let k = invariant_line_check(&s, &xy("x + y", p)).unwrap().unwrap();
            assert_eq!(k, xy("1 - x*y + y^2 + p*y^2", p));
        }
        let s = family_two(&int(1));
        assert_eq!(invariant_line_check(&s, &xy("x", 1)).unwrap(), None);
        assert!(matches!(
            invariant_line_check(&s, &xy("x*y", 1)),
            Err(SystemError::NotALine(_))
        ));
    }

    #[test]
    fn restricted_dynamics() {
        let p = frac(-3, 2);
        let s = family_two(&p);
        let cubic = UniPoly::new(vec![int(0), int(1), int(0), p.clone()]);
        let (dx, dy) = restrict_to_line(&s, &Line::Through(int(1))).unwrap();
        assert_eq!((dx.clone(), dy), (cubic.clone(), cubic.clone()));
        let (dx, dy) = restrict_to_line(&s, &Line::Through(int(-1))).unwrap();
        assert_eq!(dx, cubic);
        assert_eq!(dy, -cubic);
        let (dx, dy) = restrict_to_line(&s, &Line::Horizontal(int(0))).unwrap();
        assert_eq!(dx, UniPoly::var());
        assert!(dy.is_zero());
        assert!(matches!(
            restrict_to_line(&s, &Line::Through(int(2))),
            Err(SystemError::NotInvariant(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = PlanarSystem::from_json(
            r#"{"p_comp": "x - x^2*y + p*x*y^2 + y^3", "q_comp": "y + p*y^3", "params": {"p": "1/2"}}"#,
        )
        .unwrap();
        assert_eq!(s, family_two(&frac(1, 2)));
        assert_eq!(PlanarSystem::from_json(&s.to_json()).unwrap(), s);
        let s = PlanarSystem::from_json(r#"{"p_comp": "x", "q_comp": "y + p*y^3", "params": {"p": 0.25}}"#)
            .unwrap();
        assert_eq!(s.q(), &(&xy("y", 0) + &xy("y^3", 0).scale(&frac(1, 4))));
        assert!(PlanarSystem::from_json(r#"{"p_comp": "x"}"#).is_err());
        assert!(PlanarSystem::from_json(r#"{"p_comp": "x", "q_comp": "q*y"}"#).is_err());
        assert!(PlanarSystem::from_json(r#"{"p_comp": "x", "q_comp": "y", "params": {"p": [1]}}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn jacobian_matches_central_differences(
            pn in -4i64..=4, xn in -20i64..=20, yn in -20i64..=20, d in 1i64..=7,
        ) {
            let s = family_two(&frac(pn, 2));
            let (x, y) = (frac(xn, d), frac(yn, d));
            let j = jacobian_at(&s, &AlgebraicPoint::rational(x.clone(), y.clone())).to_f64();
            let (xf, yf) = (rational::to_f64(&x), rational::to_f64(&y));
            let h = 1e-6;
            let fd = |dx: f64, dy: f64| {
                let a = s.eval_f64(xf + dx, yf + dy);
                let b = s.eval_f64(xf - dx, yf - dy);
                ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h))
            };
            let (px, qx) = fd(h, 0.0);
            let (py, qy) = fd(0.0, h);
            for (exact, approx) in [(j[0][0], px), (j[0][1], py), (j[1][0], qx), (j[1][1], qy)] {
                prop_assert!((exact - approx).abs() <= 1e-8 * exact.abs().max(1.0) * 10.0,
                    "{} vs {}", exact, approx);
            }
        }
    }
}
