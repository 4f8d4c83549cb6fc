//! The two standard charts at infinity for `x' = x + P3`, `y' = y + Q3`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebraic::{roots_as_fields, AlgebraicPoint, FieldElem};
use crate::poly::{RationalPoly, Vars};
use crate::rational::Rational;
use crate::system::{Equilibrium, PlanarSystem, Transform};
use crate::upoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompactifyError {
    #[error("system is not of the form x' = x + cubic, y' = y + cubic")]
    Shape,
    #[error("the whole equator consists of equilibria")]
    DegenerateEquator,
}

/// Homogeneous cubic parts `(P3, Q3)`, checking the shape.
pub fn cubic_parts(sys: &PlanarSystem) -> Result<(RationalPoly, RationalPoly), CompactifyError> {
    let v = sys.vars();
    let p3 = sys.p() - &RationalPoly::x(v);
    let q3 = sys.q() - &RationalPoly::y(v);
    let ok = |f: &RationalPoly| f.is_zero() || f.is_homogeneous(3);
    if ok(&p3) && ok(&q3) {
        Ok((p3, q3))
    } else {
        Err(CompactifyError::Shape)
    }
}

/// `f(1, t)` as a polynomial in the first variable of `vars`.
fn dehomogenize(f: &RationalPoly, first_is_one: bool, vars: Vars) -> RationalPoly {
    let one = RationalPoly::constant(Rational::one(), vars);
    let t = RationalPoly::x(vars);
    if first_is_one {
        f.substitute(&one, &t)
    } else {
        f.substitute(&t, &one)
    }
}

fn chart(sys: &PlanarSystem, along_x: bool) -> Result<PlanarSystem, CompactifyError> {
    let (p3, q3) = cubic_parts(sys)?;
    let vars = if along_x { Vars::UZ } else { Vars::VZ };
    // lead = component along the chart axis, other = the transverse one
    let (lead, other) = if along_x { (&p3, &q3) } else { (&q3, &p3) };
    let lead1 = dehomogenize(lead, along_x, vars);
    let other1 = dehomogenize(other, along_x, vars);
    let t = RationalPoly::x(vars);
    let z = RationalPoly::y(vars);
    let dt = &other1 - &(&t * &lead1);
    let dz = -&(&z * &(&(&z * &z) + &lead1));
    let step = if along_x { Transform::ChartX } else { Transform::ChartY };
    Ok(sys.derived(dt, dz, vars, step))
}

/// `u = y/x, z = 1/x`, time rescaled by `z^2`:
/// `u' = Q3(1,u) - u P3(1,u)`, `z' = -z (z^2 + P3(1,u))`.
pub fn chart_x(sys: &PlanarSystem) -> Result<PlanarSystem, CompactifyError> {
    chart(sys, true)
}

/// `v = x/y, z = 1/y`, time rescaled by `z^2`.
pub fn chart_y(sys: &PlanarSystem) -> Result<PlanarSystem, CompactifyError> {
    chart(sys, false)
}

/// Roots of `f` as field generators, restricted by `keep`.
fn equator_roots(f: &UniPoly, keep: impl Fn(&FieldElem) -> bool) -> Vec<FieldElem> {
    roots_as_fields(f)
        .into_iter()
        .map(FieldElem::generator)
        .filter(|t| keep(t))
        .collect()
}

/// Equilibria on `z = 0`: chart x for `|u| <= 1`, chart y for `|v| < 1`.
pub fn equator_equilibria(sys: &PlanarSystem) -> Result<Vec<Equilibrium>, CompactifyError> {
    let cx = chart_x(sys)?;
    let cy = chart_y(sys)?;
    let zero = Rational::zero();
    let ux = cx.p().restrict_y(&zero);
    let vy = cy.p().restrict_y(&zero);
    if ux.is_zero() || vy.is_zero() {
        return Err(CompactifyError::DegenerateEquator);
    }
    let mut out = Vec::new();
    let one = |t: &FieldElem| FieldElem::from_rational(t.root().clone(), Rational::one());
    for u in equator_roots(&ux, |t| (&t.square() - &one(t)).sign() <= 0) {
        let z = FieldElem::from_rational(u.root().clone(), zero.clone());
        out.push(Equilibrium::at(&cx, AlgebraicPoint::new(u, z), "chart-x"));
    }
    for v in equator_roots(&vy, |t| (&t.square() - &one(t)).sign() < 0) {
        let z = FieldElem::from_rational(v.root().clone(), zero.clone());
        out.push(Equilibrium::at(&cy, AlgebraicPoint::new(v, z), "chart-y"));
    }
    Ok(out)
}

/// Directions `x Q3 - y P3` of the cubic part; its real linear factors are
/// the characteristic directions at infinity.
pub fn characteristic_form(sys: &PlanarSystem) -> Result<RationalPoly, CompactifyError> {
    let (p3, q3) = cubic_parts(sys)?;
    let v = sys.vars();
    Ok(&(&RationalPoly::x(v) * &q3) - &(&RationalPoly::y(v) * &p3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::rational::{frac, int};
    use crate::system::family_two;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn poly(s: &str, v: Vars, p: &Rational) -> RationalPoly {
        let mut m = HashMap::new();
        m.insert("p".to_string(), p.clone());
        parse_poly(s, v, &m).unwrap()
    }

    fn sys_xy(p: &str, q: &str) -> PlanarSystem {
        let z = int(0);
        PlanarSystem::new(poly(p, Vars::XY, &z), poly(q, Vars::XY, &z), Vars::XY)
    }

    #[test]
    fn family_two_chart_x() {
        for p in [int(1), int(0), frac(-3, 2)] {
            let c = chart_x(&family_two(&p)).unwrap();
            assert_eq!(c.p(), &poly("u^2*(1 - u^2)", Vars::UZ, &p));
            assert_eq!(c.q(), &poly("-z*(z^2 - u + p*u^2 + u^3)", Vars::UZ, &p));
            assert_eq!(c.lineage(), &[Transform::ChartX]);
        }
    }

    #[test]
    fn family_two_chart_y() {
        let p = frac(2, 3);
        let c = chart_y(&family_two(&p)).unwrap();
        assert_eq!(c.p(), &poly("1 - v^2", Vars::VZ, &p));
        assert_eq!(c.q(), &poly("-z*(z^2 + p)", Vars::VZ, &p));
    }

    #[test]
    fn linear_star_and_pure_cubes() {
        let c = chart_x(&sys_xy("x", "y")).unwrap();
        assert!(c.p().is_zero());
        assert_eq!(c.q(), &poly("-z^3", Vars::UZ, &int(0)));
        let c = chart_y(&sys_xy("x", "y")).unwrap();
        assert!(c.p().is_zero());
        let c = chart_x(&sys_xy("x + x^3", "y + y^3")).unwrap();
        assert_eq!(c.p(), &poly("u^3 - u", Vars::UZ, &int(0)));
        assert_eq!(c.q(), &poly("-z*(z^2 + 1)", Vars::UZ, &int(0)));
    }

    #[test]
    fn shape_is_enforced() {
        assert_eq!(chart_x(&sys_xy("x + x^2", "y")), Err(CompactifyError::Shape));
        assert_eq!(chart_y(&sys_xy("2*x", "y")), Err(CompactifyError::Shape));
    }

    fn labels(p: Rational) -> Vec<(String, (f64, f64), String)> {
        equator_equilibria(&family_two(&p))
            .unwrap()
            .into_iter()
            .map(|e| (e.context.clone(), e.point.approx(), e.tag.label()))
            .collect()
    }

    #[test]
    fn family_two_equator_by_sign_of_p() {
        let l = labels(int(1));
        assert_eq!(l.len(), 3);
        assert_eq!(l[0].1, (-1.0, 0.0));
        assert_eq!(l[0].2, "hyperbolic-saddle");
        assert_eq!(l[1].1, (0.0, 0.0));
        assert_eq!(l[1].2, "linearly-zero");
        assert_eq!(l[2].1, (1.0, 0.0));
        assert_eq!(l[2].2, "hyperbolic-node-stable");

        let l = labels(int(-1));
        assert_eq!(l[0].2, "hyperbolic-node-unstable");
        assert_eq!(l[2].2, "hyperbolic-saddle");

        let l = labels(int(0));
        assert_eq!(l[0].2, "semi-hyperbolic");
        assert_eq!(l[2].2, "semi-hyperbolic");
        assert!(l.iter().all(|e| e.0 == "chart-x"));
    }

    #[test]
    fn chart_y_picks_up_directions_beyond_the_diagonal() {
        // x Q3 - y P3 = -y^3 x + ... : P3 = -x y^2 * 4, Q3 = 0
        // u' = 4 u^3, v' = -4 v: direction along the y axis (v = 0)
        let s = sys_xy("x - 4*x*y^2", "y");
        let eqs = equator_equilibria(&s).unwrap();
        let ctx: Vec<_> = eqs.iter().map(|e| (e.context.as_str(), e.point.approx())).collect();
        assert_eq!(ctx, vec![("chart-x", (0.0, 0.0)), ("chart-y", (0.0, 0.0))]);
    }

    #[test]
    fn characteristic_directions_match_equator() {
        let s = family_two(&int(1));
        let c = characteristic_form(&s).unwrap();
        assert_eq!(c, poly("y^2*(x^2 - y^2)", Vars::XY, &int(0)));
        // c(1, u) has the same roots as u'(u, 0)
        let c1 = c.restrict_x(&int(1));
        let u = chart_x(&s).unwrap().p().restrict_y(&int(0));
        assert_eq!(c1.squarefree(), u.squarefree());
    }

    /// Substitution oracle: with `x = 1/z, y = u/z`,
    /// `x^4 U = x Q - y P` and `x^4 Z = -P` for the chart components.
    fn check_oracle(sys: &PlanarSystem) {
        let c = chart_x(sys).unwrap();
        let (xv, yv) = (RationalPoly::x(Vars::XY), RationalPoly::y(Vars::XY));
        // U(y/x, 1/x) * x^4 and Z(y/x, 1/x) * x^4 as polynomials in (x, y):
        // every monomial u^i z^j becomes y^i x^(4 - i - j)
        let lift = |f: &RationalPoly| {
            let mut out = RationalPoly::zero(Vars::XY);
            for (m, k) in f.terms() {
                assert!(m.i + m.j <= 4);
                out = &out + &RationalPoly::monomial(k.clone(), 4 - m.i - m.j, m.i, Vars::XY);
            }
            out
        };
        assert_eq!(lift(c.p()), &(&xv * sys.q()) - &(&yv * sys.p()));
        assert_eq!(lift(c.q()), -sys.p());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn chart_x_matches_substitution(cs in proptest::collection::vec(-3i64..=3, 8)) {
            let p3 = RationalPoly::from_int_terms(&[(cs[0], 3, 0), (cs[1], 2, 1), (cs[2], 1, 2), (cs[3], 0, 3)], Vars::XY);
            let q3 = RationalPoly::from_int_terms(&[(cs[4], 3, 0), (cs[5], 2, 1), (cs[6], 1, 2), (cs[7], 0, 3)], Vars::XY);
            let s = PlanarSystem::new(&RationalPoly::x(Vars::XY) + &p3, &RationalPoly::y(Vars::XY) + &q3, Vars::XY);
            check_oracle(&s);
        }

        #[test]
        fn chart_transition_consistency(pn in -6i64..=6) {
            // u = 1/v: nonzero equator points of chart x reappear in chart y
            let s = family_two(&frac(pn, 2));
            let cy = chart_y(&s).unwrap();
            for e in equator_equilibria(&s).unwrap() {
                let (u, _) = e.point.approx();
                if u != 0.0 {
                    let (dv, dz) = cy.eval_f64(1.0 / u, 0.0);
                    prop_assert!(dv.abs() < 1e-12 && dz.abs() < 1e-12);
                }
            }
        }
    }
}
