//! Exact common real zeros of two bivariate polynomials.
//!
//! Eliminate `y` with a resultant, then for each squarefree factor `m(x)`
//! compute `gcd(P(x, y), Q(x, y))` over `Q[x]/(m)`, splitting `m` whenever a
//! zero divisor shows up. If some gcd has degree above one in `y` the
//! coordinates are sheared and the whole computation restarts.

use std::cmp::Ordering;

use num_traits::One;

use crate::algebraic::{roots_as_fields, AlgebraicPoint, FieldElem};
use crate::poly::RationalPoly;
use crate::rational::{int, Rational};
use crate::system::{Equilibrium, PlanarSystem, SystemError};
use crate::upoly::{resultant, NestedPoly, UniPoly};

const SHEARS: [i64; 9] = [0, 1, -1, 2, -2, 3, -3, 5, 7];
const MAX_DEGREE: u32 = 3;

/// All finite equilibria, sorted by `(x, y)`, each with its linear type.
pub fn finite_equilibria(sys: &PlanarSystem) -> Result<Vec<Equilibrium>, SystemError> {
    let deg = sys.total_degree();
    if deg > MAX_DEGREE {
        return Err(SystemError::DegreeTooHigh(deg));
    }
    let pts = common_zeros(sys.p(), sys.q())?;
    Ok(pts
        .into_iter()
        .map(|pt| Equilibrium::at(sys, pt, "finite"))
        .collect())
}

/// Real points where both polynomials vanish.
pub fn common_zeros(p: &RationalPoly, q: &RationalPoly) -> Result<Vec<AlgebraicPoint>, SystemError> {
    for c in SHEARS {
        match solve_sheared(p, q, &int(c)) {
            Ok(mut pts) => {
                pts.sort_by(cmp_points);
                return Ok(pts);
            }
            Err(Outcome::NeedShear) => continue,
            Err(Outcome::Curve) => return Err(SystemError::PositiveDimensional),
            Err(Outcome::CommonFactor) => return Err(SystemError::CommonFactor),
        }
    }
    Err(SystemError::SolverIncomplete)
}

fn cmp_points(a: &AlgebraicPoint, b: &AlgebraicPoint) -> Ordering {
    let (ax, ay) = a.approx();
    let (bx, by) = b.approx();
    ax.total_cmp(&bx).then(ay.total_cmp(&by))
}

enum Outcome {
    NeedShear,
    Curve,
    /// `P` and `Q` share a factor whose real zero set was not decided.
    CommonFactor,
}

/// Solves in coordinates `x' = x + c*y`, returning points in the original
/// coordinates.
fn solve_sheared(p: &RationalPoly, q: &RationalPoly, c: &Rational) -> Result<Vec<AlgebraicPoint>, Outcome> {
    let v = p.vars();
    // x = x' - c*y
    let fx = &RationalPoly::x(v) - &RationalPoly::y(v).scale(c);
    let fy = RationalPoly::y(v);
    let ps = p.substitute(&fx, &fy);
    let qs = q.clone().with_vars(v).substitute(&fx, &fy);
    if ps.is_zero() || qs.is_zero() {
        let other = if ps.is_zero() { &qs } else { &ps };
        let odd = |d: Option<u32>| d.is_some_and(|d| d % 2 == 1);
        return if other.is_zero() || odd(other.degree_x()) || odd(other.degree_y()) {
            // odd degree in one variable forces real points on every generic line
            Err(Outcome::Curve)
        } else if !other.is_constant() {
            Err(Outcome::CommonFactor)
        } else {
            Ok(Vec::new())
        };
    }
    let a = ps.nested_in_y();
    let b = qs.nested_in_y();
    let r = if a.len() <= 1 && b.len() <= 1 {
        // neither depends on y: the zero set is a union of vertical lines
        let g = a[0].gcd(&b[0]);
        if g.degree().unwrap_or(0) >= 1 && !crate::upoly::real_roots(&g).is_empty() {
            return Err(Outcome::Curve);
        }
        return Ok(Vec::new());
    } else {
        resultant(&a, &b)
    };
    if r.is_zero() {
        return Err(Outcome::CommonFactor);
    }
    if r.is_constant() {
        return Ok(Vec::new());
    }
    let mut pending = vec![r.squarefree()];
    let mut out = Vec::new();
    while let Some(m) = pending.pop() {
        match ring_gcd(&a, &b, &m) {
            Err(Split(g)) => {
                let h = m.exact_div(&g).expect("factor divides modulus");
                pending.push(g);
                pending.push(h.monic());
            }
            Ok(None) => return Err(Outcome::CommonFactor),
            Ok(Some(g)) => match g.len() {
                1 => {}
                2 => {
                    // monic linear: y = -g0(x')
                    let y_of = -g[0].clone();
                    for root in roots_as_fields(&m) {
                        let xs = FieldElem::generator(root.clone());
                        let y = FieldElem::new(root.clone(), y_of.clone());
                        let x = &xs - &y.scale(c);
                        out.push(AlgebraicPoint::new(x, y));
                    }
                }
                _ => return Err(Outcome::NeedShear),
            },
        }
    }
    Ok(out)
}

/// A nontrivial monic factor of the modulus exposed by a zero divisor.
struct Split(UniPoly);

fn reduce(u: &UniPoly, m: &UniPoly) -> UniPoly {
    u.rem(m)
}

fn inverse(a: &UniPoly, m: &UniPoly) -> Result<UniPoly, Split> {
    let (g, s, _) = UniPoly::ext_gcd(a, m);
    if g.degree() == Some(0) {
        Ok(reduce(&s.scale(&(Rational::one() / g.lc())), m))
    } else {
        Err(Split(g.monic()))
    }
}

/// Drops leading coefficients that vanish modulo `m`, splitting when one is
/// a zero divisor.
fn normalize(p: &NestedPoly, m: &UniPoly) -> Result<NestedPoly, Split> {
    let mut v: NestedPoly = p.iter().map(|c| reduce(c, m)).collect();
    while let Some(last) = v.last() {
        if last.is_zero() {
            v.pop();
            continue;
        }
        let g = last.gcd(m);
        if g.degree().unwrap_or(0) >= 1 {
            return Err(Split(g));
        }
        break;
    }
    Ok(v)
}

fn make_monic(p: &NestedPoly, m: &UniPoly) -> Result<NestedPoly, Split> {
    let inv = inverse(p.last().expect("nonzero"), m)?;
    Ok(p.iter().map(|c| reduce(&(c * &inv), m)).collect())
}

fn rem_monic(a: &NestedPoly, b: &NestedPoly, m: &UniPoly) -> NestedPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.pop().expect("nonempty");
        let shift = r.len() - db;
        for (k, bc) in b.iter().take(db).enumerate() {
            r[shift + k] = reduce(&(&r[shift + k] - &(&lead * bc)), m);
        }
    }
    r
}

/// Monic gcd over `Q[x]/(m)`; `None` when both inputs vanish identically.
fn ring_gcd(a: &NestedPoly, b: &NestedPoly, m: &UniPoly) -> Result<Option<NestedPoly>, Split> {
    let mut a = normalize(a, m)?;
    let mut b = normalize(b, m)?;
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    if a.is_empty() {
        return Ok(None);
    }
    loop {
        if b.is_empty() {
            return make_monic(&a, m).map(Some);
        }
        let bm = make_monic(&b, m)?;
        let r = normalize(&rem_monic(&a, &bm, m), m)?;
        a = bm;
        b = r;
    }
}
