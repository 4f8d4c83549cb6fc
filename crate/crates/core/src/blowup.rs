//! Weighted blow-up of a linearly-zero point at the origin of a `(u, z)`
//! chart: `z = w sqrt(|u|)` on each half-plane plus the two directional
//! charts `u = v r^2, z = ±r`, followed by sector assembly on the divisor.

use std::f64::consts::PI;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebraic::{roots_as_fields, AlgebraicPoint, FieldElem};
use crate::classify::{classify_linear, ClassificationTag};
use crate::poly::{substitute_halfpower, Branch, HalfPowerPoly, RationalPoly, Vars};
use crate::rational::{self, Rational};
use crate::system::{jacobian_at, rescale, Equilibrium, Jacobian, PlanarSystem, Transform};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("origin is not an equilibrium with zero linear part")]
    NotLinearlyZero,
    #[error("odd powers of sqrt(u) survive the substitution")]
    HalfPowerResidue,
    #[error("negative powers of u survive the substitution")]
    NotPolynomial,
    #[error("components are not divisible by u^{0}")]
    NotDivisible(u32),
    #[error("the blown-up field vanishes identically")]
    ZeroField,
    #[error("divisor point {point} in {chart} is not hyperbolic; a further blow-up is needed")]
    NonHyperbolicDivisor { chart: String, point: String },
    #[error("divisor carries no equilibria; the point is monodromic")]
    Monodromic,
    #[error("the divisor is not invariant in this chart (dicritical)")]
    Dicritical,
    #[error("the divisor is dicritical in some charts only")]
    MixedDicritical,
}

/// One half-plane of the blow-up, in `(u, w)`.
#[derive(Clone, Debug)]
pub struct BlowupChart {
    pub branch: Branch,
    pub sys: PlanarSystem,
    /// Power `k` of the time rescale `dtau = u^k dt` applied so far.
    pub rescale_power: u32,
}

impl BlowupChart {
    /// Orientation reversed with respect to the original time.
    pub fn orientation_reversed(&self) -> bool {
        self.branch == Branch::Negative && self.rescale_power % 2 == 1
    }

    pub fn time_sign(&self) -> i32 {
        if self.orientation_reversed() {
            -1
        } else {
            1
        }
    }
}

fn check_linearly_zero(sys: &PlanarSystem) -> Result<(), BlowupError> {
    for f in [sys.p(), sys.q()] {
        if f.terms().any(|(m, _)| m.degree() <= 1) {
            return Err(BlowupError::NotLinearlyZero);
        }
    }
    Ok(())
}

/// Substitutes `z = w s`, `u = ±s^2` into a `(u, z)` system:
/// `w' = Z / s - w U / (2u)`.
pub fn half_power_blowup(sys: &PlanarSystem, branch: Branch) -> Result<BlowupChart, BlowupError> {
    check_linearly_zero(sys)?;
    let us = substitute_halfpower(sys.p(), branch);
    let zs = substitute_halfpower(sys.q(), branch);
    let mut w = HalfPowerPoly::zero(branch, Vars(sys.vars().0, "w"));
    w.add_term(0, 1, Rational::one());
    let half = Rational::new(branch.sign().into(), 2.into());
    let dw = &zs.shift_half(-1) - &(&w * &us).shift_half(-2).scale(&half);
    if !us.odd_part().is_zero() || !dw.odd_part().is_zero() {
        return Err(BlowupError::HalfPowerResidue);
    }
    let du = us.to_rational().ok_or(BlowupError::NotPolynomial)?;
    let dw = dw.to_rational().ok_or(BlowupError::NotPolynomial)?;
    Ok(BlowupChart {
        branch,
        sys: sys.derived(du, dw, Vars::UW, Transform::HalfPowerBlowup { branch }),
        rescale_power: 0,
    })
}

fn u_power(k: u32, vars: Vars) -> RationalPoly {
    RationalPoly::monomial(Rational::one(), k, 0, vars)
}

/// Divides the chart field by `u^power`.
pub fn rescale_time(chart: &BlowupChart, power: u32) -> Result<BlowupChart, BlowupError> {
    let sys = rescale(&chart.sys, &u_power(power, chart.sys.vars()))
        .map_err(|_| BlowupError::NotDivisible(power))?;
    Ok(BlowupChart {
        branch: chart.branch,
        sys,
        rescale_power: chart.rescale_power + power,
    })
}

/// Rescales by the largest power of `u` dividing both components.
pub fn rescale_maximal(chart: &BlowupChart) -> Result<BlowupChart, BlowupError> {
    let k = match (chart.sys.p().ord_x(), chart.sys.q().ord_x()) {
        (None, None) => return Err(BlowupError::ZeroField),
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => a.min(b),
    };
    if k == 0 {
        return Ok(chart.clone());
    }
    rescale_time(chart, k)
}

/// `u = v r^2, z = sign * r` (`r >= 0`), the field multiplied by `r^2` and
/// divided by the largest power of `r` dividing both components.
pub fn directional_chart(sys: &PlanarSystem, sign: i8) -> Result<PlanarSystem, BlowupError> {
    check_linearly_zero(sys)?;
    let vars = Vars::VR;
    let v = RationalPoly::x(vars);
    let r = RationalPoly::y(vars);
    let sg = rational::int(sign as i64);
    let ut = sys.p().substitute(&(&v * &(&r * &r)), &r.scale(&sg));
    let zt = sys.q().substitute(&(&v * &(&r * &r)), &r.scale(&sg));
    // r' = sign Z, v' = (U - 2 sign v r Z) / r^2
    let a = &ut - &(&(&v * &r) * &zt).scale(&(&sg * rational::int(2)));
    let b = (&(&r * &r) * &zt).scale(&sg);
    let k = match (a.ord_y(), b.ord_y()) {
        (None, None) => return Err(BlowupError::ZeroField),
        (Some(x), None) | (None, Some(x)) => x,
        (Some(x), Some(y)) => x.min(y),
    };
    let den = RationalPoly::monomial(Rational::one(), 0, k, vars);
    let a = a.divide_exact(&den).expect("power of r divides");
    let b = b.divide_exact(&den).expect("power of r divides");
    Ok(sys.derived(a, b, vars, Transform::DirectionalChart { sign, power: k }))
}

/// Both half-planes, each rescaled maximally.
pub fn blow_up_origin(sys: &PlanarSystem) -> Result<(BlowupChart, BlowupChart), BlowupError> {
    let pos = rescale_maximal(&half_power_blowup(sys, Branch::Positive)?)?;
    let neg = rescale_maximal(&half_power_blowup(sys, Branch::Negative)?)?;
    Ok((pos, neg))
}

/// Linear type in the original time, given the chart's time sign.
fn oriented_tag(j: &Jacobian, time_sign: i32) -> ClassificationTag {
    if time_sign > 0 {
        classify_linear(j)
    } else {
        let n = |e: &FieldElem| -e;
        classify_linear(&Jacobian([
            [n(&j.0[0][0]), n(&j.0[0][1])],
            [n(&j.0[1][0]), n(&j.0[1][1])],
        ]))
    }
}

/// Equilibria on the divisor of a chart. `along_first` selects which
/// coordinate runs along the divisor; the other one vanishes on it.
/// Returns `None` when the divisor is not invariant (dicritical chart).
fn divisor_points(
    sys: &PlanarSystem,
    along_first: bool,
    closed: bool,
    time_sign: i32,
    context: &str,
) -> Result<Option<Vec<Equilibrium>>, BlowupError> {
    let zero = Rational::zero();
    // (transverse component, along component) restricted to the divisor
    let (trans, along) = if along_first {
        (sys.q().restrict_y(&zero), sys.p().restrict_y(&zero))
    } else {
        (sys.p().restrict_x(&zero), sys.q().restrict_x(&zero))
    };
    if !trans.is_zero() {
        return Ok(None);
    }
    if along.is_zero() {
        return Err(BlowupError::ZeroField);
    }
    let mut out = Vec::new();
    for root in roots_as_fields(&along) {
        let t = FieldElem::generator(root.clone());
        let one = FieldElem::from_rational(root.clone(), Rational::one());
        let s = (&t.square() - &one).sign();
        if s > 0 || (s == 0 && !closed) {
            continue;
        }
        let z = FieldElem::from_rational(root, zero.clone());
        let pt = if along_first { AlgebraicPoint::new(t, z) } else { AlgebraicPoint::new(z, t) };
        let jacobian = jacobian_at(sys, &pt);
        let tag = oriented_tag(&jacobian, time_sign);
        out.push(Equilibrium {
            point: pt,
            jacobian,
            tag,
            context: context.to_string(),
        });
    }
    Ok(Some(out))
}

fn chart_context(chart: &BlowupChart) -> String {
    let mut s = format!("blowup {}", chart.branch.label());
    if chart.orientation_reversed() {
        s.push_str(" (time reversed)");
    }
    s
}

/// Equilibria on `{u = 0}` with `|w| <= 1`, typed in the original time.
pub fn divisor_equilibria(chart: &BlowupChart) -> Result<Vec<Equilibrium>, BlowupError> {
    divisor_points(&chart.sys, false, true, chart.time_sign(), &chart_context(chart))?
        .ok_or(BlowupError::Dicritical)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// `u > 0`, direction `(1, w)`, `|w| <= 1`
    PositiveU,
    /// `z > 0`, direction `(v, 1)`, `|v| < 1`
    PositiveZ,
    /// `u < 0`, direction `(-1, w)`, `|w| <= 1`
    NegativeU,
    /// `z < 0`, direction `(v, -1)`, `|v| < 1`
    NegativeZ,
}

impl Segment {
    const ALL: [Segment; 4] = [
        Segment::PositiveU,
        Segment::PositiveZ,
        Segment::NegativeU,
        Segment::NegativeZ,
    ];

    /// `+1` when the angle increases with the segment parameter.
    fn factor(self) -> i32 {
        match self {
            Segment::PositiveU | Segment::NegativeZ => 1,
            Segment::PositiveZ | Segment::NegativeU => -1,
        }
    }

    fn is_z(self) -> bool {
        matches!(self, Segment::PositiveZ | Segment::NegativeZ)
    }

    /// Angle of the weighted direction, in `[0, 2pi)`.
    pub fn angle(self, t: f64) -> f64 {
        let c = t.signum() * t.abs().sqrt();
        let a = match self {
            Segment::PositiveU => t.atan2(1.0),
            Segment::PositiveZ => 1f64.atan2(c),
            Segment::NegativeU => t.atan2(-1.0),
            Segment::NegativeZ => (-1f64).atan2(c),
        };
        a.rem_euclid(2.0 * PI)
    }

    /// Inverse of [`Segment::angle`].
    fn locate(theta: f64) -> (Segment, f64) {
        let th = (theta + PI / 4.0).rem_euclid(2.0 * PI) - PI / 4.0;
        let sq = |c: f64| c * c.abs();
        if th <= PI / 4.0 {
            (Segment::PositiveU, th.tan())
        } else if th < 3.0 * PI / 4.0 {
            (Segment::PositiveZ, sq(1.0 / th.tan()))
        } else if th <= 5.0 * PI / 4.0 {
            (Segment::NegativeU, -th.tan())
        } else {
            (Segment::NegativeZ, sq(-1.0 / th.tan()))
        }
    }
}

/// A chart covering one segment of the divisor circle.
#[derive(Clone, Debug)]
pub struct DivisorChart {
    pub segment: Segment,
    pub sys: PlanarSystem,
    pub time_sign: i32,
}

impl DivisorChart {
    /// Flow along the divisor at parameter `t`, exact.
    fn along(&self, t: &Rational) -> Rational {
        let zero = Rational::zero();
        if self.segment.is_z() {
            self.sys.p().eval(t, &zero)
        } else {
            self.sys.q().eval(&zero, t)
        }
    }

    /// Point `(param, distance)` in chart coordinates.
    pub fn chart_point(&self, t: f64, d: f64) -> (f64, f64) {
        if self.segment.is_z() {
            (t, d)
        } else {
            let u = if self.segment == Segment::NegativeU { -d } else { d };
            (u, t)
        }
    }
}

/// An equilibrium on the divisor circle.
#[derive(Clone, Debug)]
pub struct DivisorPoint {
    pub chart: usize,
    pub segment: Segment,
    pub param: FieldElem,
    pub angle: f64,
    pub eq: Equilibrium,
    /// `+1` when the point repels from the divisor in the original time.
    pub transverse: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorKind {
    Parabolic,
    Hyperbolic,
    Elliptic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sector {
    pub kind: SectorKind,
    /// Bounding directions as angles of the weighted direction `(u, z)`.
    pub from_angle: f64,
    pub to_angle: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorCounts {
    pub nodal: usize,
    pub saddle: usize,
    pub elliptic: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorPointSummary {
    pub segment: Segment,
    pub param: String,
    pub approx: f64,
    pub angle: f64,
    pub tag: String,
    pub transverse: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorStructure {
    pub counts: SectorCounts,
    pub sectors: Vec<Sector>,
    pub divisor_points: Vec<DivisorPointSummary>,
    /// Leading-order curves of the separatrices through the point.
    pub asymptotics: Vec<String>,
    pub dicritical: bool,
}

/// Everything computed while resolving the point.
#[derive(Clone, Debug)]
pub struct BlowupAnalysis {
    pub charts: Vec<DivisorChart>,
    pub points: Vec<DivisorPoint>,
    pub structure: SectorStructure,
}

fn build_charts(
    pos: &BlowupChart,
    neg: &BlowupChart,
    original: &PlanarSystem,
) -> Result<Vec<DivisorChart>, BlowupError> {
    Segment::ALL
        .iter()
        .map(|&segment| -> Result<DivisorChart, BlowupError> {
            Ok(match segment {
                Segment::PositiveU => DivisorChart {
                    segment,
                    sys: pos.sys.clone(),
                    time_sign: pos.time_sign(),
                },
                Segment::NegativeU => DivisorChart {
                    segment,
                    sys: neg.sys.clone(),
                    time_sign: neg.time_sign(),
                },
                Segment::PositiveZ => DivisorChart {
                    segment,
                    sys: directional_chart(original, 1)?,
                    time_sign: 1,
                },
                Segment::NegativeZ => DivisorChart {
                    segment,
                    sys: directional_chart(original, -1)?,
                    time_sign: 1,
                },
            })
        })
        .collect()
}

fn asymptotic_curve(p: &DivisorPoint) -> String {
    let t2 = p.param.square();
    let c = t2.exact_text();
    match p.segment {
        Segment::PositiveU if t2.is_zero() => "z = o(sqrt(u)), u > 0".into(),
        Segment::NegativeU if t2.is_zero() => "z = o(sqrt(-u)), u < 0".into(),
        Segment::PositiveU => format!("z^2 = {}*u, z {} 0", c, if p.param.sign() > 0 { ">" } else { "<" }),
        Segment::NegativeU => format!("z^2 = -{}*u, z {} 0", c, if p.param.sign() > 0 { ">" } else { "<" }),
        Segment::PositiveZ | Segment::NegativeZ => {
            let side = if p.segment == Segment::PositiveZ { "z > 0" } else { "z < 0" };
            if p.param.is_zero() {
                format!("u = o(z^2), {}", side)
            } else {
                format!("u = {}*z^2, {}", p.param.exact_text(), side)
            }
        }
    }
}

/// Rational sample strictly inside the arc `(a, b)` of angles, `b > a`.
fn arc_sample(a: f64, b: f64) -> (Segment, Rational) {
    let mid = 0.5 * (a + b);
    let (seg, t) = Segment::locate(mid);
    // a short binary fraction keeps exact evaluation cheap
    let t = (t * 1048576.0).round() / 1048576.0;
    (seg, rational::from_f64(t).expect("finite"))
}

/// Sector structure of the linearly-zero origin of `original`, from the
/// two rescaled half-plane charts.
pub fn assemble_sectors(
    pos: &BlowupChart,
    neg: &BlowupChart,
    original: &PlanarSystem,
) -> Result<BlowupAnalysis, BlowupError> {
    let charts = build_charts(pos, neg, original)?;
    let mut found = Vec::new();
    let mut dicritical = Vec::new();
    for (i, ch) in charts.iter().enumerate() {
        let ctx = match ch.segment {
            Segment::PositiveU => chart_context(pos),
            Segment::NegativeU => chart_context(neg),
            Segment::PositiveZ => "blowup z>0".to_string(),
            Segment::NegativeZ => "blowup z<0".to_string(),
        };
        match divisor_points(&ch.sys, ch.segment.is_z(), !ch.segment.is_z(), ch.time_sign, &ctx)? {
            None => dicritical.push(i),
            Some(eqs) => found.extend(eqs.into_iter().map(|e| (i, e))),
        }
    }
    if !dicritical.is_empty() {
        if dicritical.len() != charts.len() {
            return Err(BlowupError::MixedDicritical);
        }
        let structure = SectorStructure {
            counts: SectorCounts {
                nodal: 2,
                saddle: 0,
                elliptic: 0,
            },
            sectors: vec![
                Sector {
                    kind: SectorKind::Parabolic,
                    from_angle: 1.5 * PI,
                    to_angle: 2.5 * PI,
                },
                Sector {
                    kind: SectorKind::Parabolic,
                    from_angle: 0.5 * PI,
                    to_angle: 1.5 * PI,
                },
            ],
            divisor_points: Vec::new(),
            asymptotics: Vec::new(),
            dicritical: true,
        };
        return Ok(BlowupAnalysis {
            charts,
            points: Vec::new(),
            structure,
        });
    }

    let mut points = Vec::new();
    for (i, eq) in found {
        let ch = &charts[i];
        let (param, trans_entry) = if ch.segment.is_z() {
            (eq.point.x.clone(), eq.jacobian.0[1][1].clone())
        } else {
            (eq.point.y.clone(), eq.jacobian.0[0][0].clone())
        };
        let along_entry = if ch.segment.is_z() { &eq.jacobian.0[0][0] } else { &eq.jacobian.0[1][1] };
        if trans_entry.is_zero() || along_entry.is_zero() {
            return Err(BlowupError::NonHyperbolicDivisor {
                chart: eq.context.clone(),
                point: format!("{:?}", eq.point.approx()),
            });
        }
        let angle = ch.segment.angle(param.to_f64());
        points.push(DivisorPoint {
            chart: i,
            segment: ch.segment,
            param,
            angle,
            transverse: trans_entry.sign() * ch.time_sign,
            eq,
        });
    }
    if points.is_empty() {
        return Err(BlowupError::Monodromic);
    }
    points.sort_by(|a, b| a.angle.total_cmp(&b.angle));

    // one arc per consecutive pair, cyclically
    let n = points.len();
    let mut arcs = Vec::with_capacity(n);
    for k in 0..n {
        let a = &points[k];
        let b = &points[(k + 1) % n];
        let hi = if k + 1 == n { b.angle + 2.0 * PI } else { b.angle };
        let (seg, t) = arc_sample(a.angle, hi);
        let ch = charts.iter().find(|c| c.segment == seg).expect("chart for every segment");
        let dir = rational::sign(&ch.along(&t)) * seg.factor() * ch.time_sign;
        assert!(dir != 0, "arc sample hit an equilibrium");
        let (start, end) = if dir > 0 { (a, b) } else { (b, a) };
        let from_origin = start.transverse > 0;
        let to_origin = end.transverse < 0;
        let kind = match (from_origin, to_origin) {
            (true, true) => SectorKind::Elliptic,
            (false, false) => SectorKind::Hyperbolic,
            _ => SectorKind::Parabolic,
        };
        arcs.push(Sector {
            kind,
            from_angle: a.angle,
            to_angle: hi,
        });
    }
    let sectors = merge_parabolic(arcs);
    let count = |k| sectors.iter().filter(|s| s.kind == k).count();
    let counts = SectorCounts {
        nodal: count(SectorKind::Parabolic),
        saddle: count(SectorKind::Hyperbolic),
        elliptic: count(SectorKind::Elliptic),
    };
    let asymptotics = points
        .iter()
        .filter(|p| p.eq.tag.is_saddle())
        .map(asymptotic_curve)
        .collect();
    let divisor_points = points
        .iter()
        .map(|p| DivisorPointSummary {
            segment: p.segment,
            param: p.param.exact_text(),
            approx: p.param.to_f64(),
            angle: p.angle,
            tag: p.eq.tag.label(),
            transverse: p.transverse,
        })
        .collect();
    Ok(BlowupAnalysis {
        charts,
        points,
        structure: SectorStructure {
            counts,
            sectors,
            divisor_points,
            asymptotics,
            dicritical: false,
        },
    })
}

/// Joins runs of adjacent parabolic arcs, wrapping around the circle.
fn merge_parabolic(arcs: Vec<Sector>) -> Vec<Sector> {
    if arcs.iter().all(|a| a.kind == SectorKind::Parabolic) {
        let from = arcs[0].from_angle;
        return vec![Sector {
            kind: SectorKind::Parabolic,
            from_angle: from,
            to_angle: from + 2.0 * PI,
        }];
    }
    // rotate so the list starts right after a non-parabolic arc
    let first = arcs.iter().position(|a| a.kind != SectorKind::Parabolic).expect("exists");
    let n = arcs.len();
    let mut out: Vec<Sector> = Vec::new();
    for k in 1..=n {
        let arc = &arcs[(first + k) % n];
        let wrap = if first + k >= n { 2.0 * PI } else { 0.0 };
        let arc = Sector {
            kind: arc.kind,
            from_angle: arc.from_angle + wrap,
            to_angle: arc.to_angle + wrap,
        };
        match out.last_mut() {
            Some(last) if last.kind == SectorKind::Parabolic && arc.kind == SectorKind::Parabolic => {
                last.to_angle = arc.to_angle;
            }
            _ => out.push(arc),
        }
    }
    for s in &mut out {
        if s.from_angle >= 2.0 * PI {
            s.from_angle -= 2.0 * PI;
            s.to_angle -= 2.0 * PI;
        }
    }
    out.sort_by(|a, b| a.from_angle.total_cmp(&b.from_angle));
    out
}

/// Resolves the linearly-zero origin of a `(u, z)` chart.
pub fn analyze_origin(original: &PlanarSystem) -> Result<BlowupAnalysis, BlowupError> {
    let (pos, neg) = blow_up_origin(original)?;
    assemble_sectors(&pos, &neg, original)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compactify::chart_x;
    use crate::parse::parse_poly;
    use crate::rational::{frac, int};
    use crate::system::family_two;
    use std::collections::HashMap;

    fn poly(s: &str, v: Vars, p: &Rational) -> RationalPoly {
        let mut m = HashMap::new();
        m.insert("p".to_string(), p.clone());
        parse_poly(s, v, &m).unwrap()
    }

    fn uz(p: &str, q: &str) -> PlanarSystem {
        PlanarSystem::new(poly(p, Vars::UZ, &int(0)), poly(q, Vars::UZ, &int(0)), Vars::UZ)
    }

    #[test]
    fn half_plane_charts_of_family_two() {
        for p in [int(1), int(0), frac(-1, 2)] {
            let c = chart_x(&family_two(&p)).unwrap();
            let pos = half_power_blowup(&c, Branch::Positive).unwrap();
            assert_eq!(pos.sys.p(), &poly("u^2*(1 - u^2)", Vars::UW, &p));
            assert_eq!(pos.sys.q(), &poly("1/2*u*w - u*w^3 - p*u^2*w - 1/2*u^3*w", Vars::UW, &p));
            let neg = half_power_blowup(&c, Branch::Negative).unwrap();
            assert_eq!(neg.sys.q(), &poly("1/2*u*w + u*w^3 - p*u^2*w - 1/2*u^3*w", Vars::UW, &p));

            let pos = rescale_time(&pos, 1).unwrap();
            assert_eq!(pos.sys.p(), &poly("u*(1 - u^2)", Vars::UW, &p));
            assert_eq!(pos.sys.q(), &poly("1/2*w - w^3 - p*u*w - 1/2*u^2*w", Vars::UW, &p));
            let neg = rescale_time(&neg, 1).unwrap();
            assert_eq!(neg.sys.q(), &poly("1/2*w + w^3 - p*u*w - 1/2*u^2*w", Vars::UW, &p));
            assert!(neg.orientation_reversed());
            assert!(!pos.orientation_reversed());
        }
    }

    /// Reverse substitution `w = z / sqrt(u)` of the rescaled u > 0 chart,
    /// multiplied back by u, gives the original chart:
    /// `U = u * U9`, `Z = d/dt (w sqrt(u)) = u (sqrt(u) W9 + w U9 / (2 sqrt(u)))`.
    #[test]
    fn round_trip_on_positive_half_plane() {
        let p = int(2);
        let c = chart_x(&family_two(&p)).unwrap();
        let r = rescale_time(&half_power_blowup(&c, Branch::Positive).unwrap(), 1).unwrap();
        let u9 = HalfPowerPoly::from_rational(r.sys.p(), Branch::Positive);
        let w9 = HalfPowerPoly::from_rational(r.sys.q(), Branch::Positive);
        let mut w = HalfPowerPoly::zero(Branch::Positive, Vars::UW);
        w.add_term(0, 1, Rational::one());
        // u * (s W9 + w U9 / (2 s)), with s = sqrt(u) = s^1
        let z_dot = (&w9.shift_half(1) + &(&w * &u9).shift_half(-1).scale(&frac(1, 2))).shift_half(2);
        let u_dot = u9.shift_half(2);
        let back_z = crate::poly::unsubstitute_halfpower(&z_dot, "z");
        let back_u = crate::poly::unsubstitute_halfpower(&u_dot, "z");
        assert_eq!(back_u.to_rational().unwrap().with_vars(Vars::UZ), c.p().clone());
        assert_eq!(back_z.to_rational().unwrap().with_vars(Vars::UZ), c.q().clone());
    }

    #[test]
    fn residue_and_divisibility_errors() {
        // z' = z^2: w' = w^2 s - ..., odd power of s remains
        let s = uz("u^2", "z^2");
        assert_eq!(half_power_blowup(&s, Branch::Positive).unwrap_err(), BlowupError::HalfPowerResidue);
        let s = uz("u + z^2", "z^3");
        assert_eq!(half_power_blowup(&s, Branch::Positive).unwrap_err(), BlowupError::NotLinearlyZero);
        let c = BlowupChart {
            branch: Branch::Positive,
            sys: PlanarSystem::new(poly("u", Vars::UW, &int(0)), poly("w", Vars::UW, &int(0)), Vars::UW),
            rescale_power: 0,
        };
        assert_eq!(rescale_time(&c, 1).unwrap_err(), BlowupError::NotDivisible(1));
    }

    #[test]
    fn oracle_for_u_squared_minus_z_cubed() {
        // u' = u^2, z' = -z^3 on u > 0: w' = -u w^3 - 1/2 u w, by hand from
        // w' = z'/sqrt(u) - w u'/(2u)
        let s = uz("u^2", "-z^3");
        let c = half_power_blowup(&s, Branch::Positive).unwrap();
        assert_eq!(c.sys.p(), &poly("u^2", Vars::UW, &int(0)));
        assert_eq!(c.sys.q(), &poly("-u*w^3 - 1/2*u*w", Vars::UW, &int(0)));
    }

    #[test]
    fn divisor_points_of_family_two() {
        let c = chart_x(&family_two(&int(1))).unwrap();
        let (pos, neg) = blow_up_origin(&c).unwrap();
        let eqs = divisor_equilibria(&pos).unwrap();
        let got: Vec<_> = eqs.iter().map(|e| (e.point.approx().1, e.tag.label())).collect();
        let h = 0.5f64.sqrt();
        assert_eq!(got.len(), 3);
        assert!((got[0].0 + h).abs() < 1e-15 && got[0].1 == "hyperbolic-saddle");
        assert!(got[1].0 == 0.0 && got[1].1 == "hyperbolic-node-unstable");
        assert!((got[2].0 - h).abs() < 1e-15 && got[2].1 == "hyperbolic-saddle");
        assert_eq!(eqs[1].jacobian.as_rational().unwrap(), [[int(1), int(0)], [int(0), frac(1, 2)]]);
        // saddles: [[1, 0], [-+p/sqrt 2, -1]] with eigenvalues 1, -1
        let j = &eqs[2].jacobian;
        assert_eq!(j.0[0][0].as_rational(), Some(int(1)));
        assert_eq!(j.0[1][1].as_rational(), Some(int(-1)));
        assert!((j.0[1][0].to_f64() + h).abs() < 1e-15);

        let eqs = divisor_equilibria(&neg).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].tag.label(), "hyperbolic-node-stable");
        assert!(eqs[0].context.contains("time reversed"));
    }

    #[test]
    fn sectors_of_family_two() {
        for p in [int(-2), int(-1), frac(-1, 2), int(0), frac(1, 2), int(1), int(2)] {
            let c = chart_x(&family_two(&p)).unwrap();
            let a = analyze_origin(&c).unwrap();
            assert_eq!(
                a.structure.counts,
                SectorCounts {
                    nodal: 2,
                    saddle: 2,
                    elliptic: 0
                },
                "p = {}",
                p
            );
            assert_eq!(a.points.len(), 6);
            let mut asym = a.structure.asymptotics.clone();
            asym.sort();
            assert!(asym.contains(&"z^2 = 1/2*u, z > 0".to_string()), "{:?}", asym);
            assert!(asym.contains(&"z^2 = 1/2*u, z < 0".to_string()));
        }
    }

    #[test]
    fn dicritical_star() {
        let s = uz("2*u*(u^2 + z^4)", "z*(u^2 + z^4)");
        let a = analyze_origin(&s).unwrap();
        assert!(a.structure.dicritical);
        assert_eq!(
            a.structure.counts,
            SectorCounts {
                nodal: 2,
                saddle: 0,
                elliptic: 0
            }
        );
    }

    /// Winding number of the field along the unit circle.
    fn winding(s: &PlanarSystem) -> i64 {
        let n = 20000;
        let mut total = 0.0;
        let mut prev = None;
        for k in 0..=n {
            let t = 2.0 * PI * k as f64 / n as f64;
            let (a, b) = s.eval_f64(t.cos(), t.sin());
            let ang = b.atan2(a);
            if let Some(p) = prev {
                let mut d: f64 = ang - p;
                if d > PI {
                    d -= 2.0 * PI;
                }
                if d < -PI {
                    d += 2.0 * PI;
                }
                total += d;
            }
            prev = Some(ang);
        }
        (total / (2.0 * PI)).round() as i64
    }

    #[test]
    fn index_formula_on_weighted_homogeneous_fields() {
        // u' = a u^2 + b u z^2 + c z^4, z' = e u z + f z^3 has the origin as
        // its only equilibrium when isolated; index = 1 + (e - h) / 2
        let mut elliptic_seen = false;
        let mut checked = 0;
        for a in -1..=1 {
            for b in -1..=1 {
                for c in -1..=1 {
                    for e in -1..=1 {
                        for f in -1..=1 {
                            let s = PlanarSystem::new(
                                RationalPoly::from_int_terms(&[(a, 2, 0), (b, 1, 2), (c, 0, 4)], Vars::UZ),
                                RationalPoly::from_int_terms(&[(e, 1, 1), (f, 0, 3)], Vars::UZ),
                                Vars::UZ,
                            );
                            let Ok(an) = analyze_origin(&s) else { continue };
                            if an.structure.dicritical {
                                continue;
                            }
                            let k = &an.structure.counts;
                            let index = 2 + k.elliptic as i64 - k.saddle as i64;
                            assert_eq!(index % 2, 0);
                            assert_eq!(index / 2, winding(&s), "{:?} for {} {} {} {} {}", k, a, b, c, e, f);
                            elliptic_seen |= k.elliptic > 0;
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 50, "{}", checked);
        assert!(elliptic_seen);
    }

    #[test]
    fn angles_invert() {
        for seg in Segment::ALL {
            for t in [-0.9, -0.3, 0.0, 0.4, 0.8] {
                let th = seg.angle(t);
                let (s2, t2) = Segment::locate(th);
                assert_eq!(s2, seg);
                assert!((t2 - t).abs() < 1e-12, "{:?} {} {}", seg, t, t2);
            }
        }
    }
}
