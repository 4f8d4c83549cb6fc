//! Real algebraic numbers in primitive-element form.
//!
//! Every value lives in `Q[t]/(m)` evaluated at one isolated real root `α`
//! of a squarefree `m`. Signs are decided exactly: zero via `gcd(m, g)`,
//! nonzero by refining the isolating interval until `g` has no root in it.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::poly::RationalPoly;
use crate::rational::{self, Rational};
use crate::upoly::{real_roots, resultant, RootInterval, UniPoly};

/// A real root shared by all elements of one number field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot(pub RootInterval);

impl RealRoot {
    pub fn rational(q: Rational) -> Arc<Self> {
        Arc::new(RealRoot(RootInterval::exact(q)))
    }

    pub fn defining_poly(&self) -> &UniPoly {
        &self.0.poly
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.0.as_rational()
    }

    pub fn approx(&self) -> f64 {
        self.0.approx()
    }

    /// Exact sign of `g(α)`.
    pub fn sign_of(&self, g: &UniPoly) -> i32 {
        if let Some(q) = self.as_rational() {
            return g.sign_at(q);
        }
        let m = &self.0.poly;
        let g = g.rem(m);
        if g.is_zero() {
            return 0;
        }
        let h = m.gcd(&g);
        if h.degree().unwrap_or(0) >= 1 && h.sign_at(&self.0.lo) * h.sign_at(&self.0.hi) < 0 {
            return 0;
        }
        let mut iv = self.0.clone();
        let gs = g.squarefree();
        loop {
            if gs.count_roots(&iv.lo, &iv.hi) == 0 && g.sign_at(&iv.hi) != 0 {
                return g.sign_at(&iv.hi);
            }
            iv.bisect();
            if iv.is_exact() {
                return g.sign_at(&iv.lo);
            }
        }
    }
}

/// Element of `Q(α)`, kept reduced modulo the defining polynomial.
#[derive(Clone, Debug)]
pub struct FieldElem {
    root: Arc<RealRoot>,
    value: UniPoly,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        (self - other).sign() == 0
    }
}

impl FieldElem {
    pub fn new(root: Arc<RealRoot>, value: UniPoly) -> Self {
        let value = if root.defining_poly().degree().unwrap_or(0) >= 1 {
            value.rem(root.defining_poly())
        } else {
            value
        };
        FieldElem { root, value }
    }

    pub fn from_rational(root: Arc<RealRoot>, q: Rational) -> Self {
        FieldElem::new(root, UniPoly::constant(q))
    }

    /// The primitive element `α` itself.
    pub fn generator(root: Arc<RealRoot>) -> Self {
        FieldElem::new(root, UniPoly::var())
    }

    pub fn root(&self) -> &Arc<RealRoot> {
        &self.root
    }

    pub fn value(&self) -> &UniPoly {
        &self.value
    }

    pub fn sign(&self) -> i32 {
        self.root.sign_of(&self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if let Some(q) = self.root.as_rational() {
            return Some(self.value.eval(q));
        }
        if self.value.is_constant() {
            return Some(self.value.coeff(0));
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.as_rational() {
            return rational::to_f64(&q);
        }
        let mut iv = self.root.0.clone();
        iv.refine_to(&Rational::new(1.into(), num_bigint::BigInt::one() << 80));
        let mid = (&iv.lo + &iv.hi) / rational::int(2);
        rational::to_f64(&self.value.eval(&mid))
    }

    pub fn square(&self) -> FieldElem {
        self * self
    }

    pub fn scale(&self, k: &Rational) -> FieldElem {
        FieldElem::new(self.root.clone(), self.value.scale(k))
    }

    /// Defining polynomial of this value over Q (squarefree, primitive), from
    /// `res_t(m(t), s - value(t))`, restricted to the factor that carries it.
    pub fn own_polynomial(&self) -> UniPoly {
        if let Some(q) = self.as_rational() {
            return UniPoly::linear_root(&q).primitive();
        }
        let m = self.root.defining_poly();
        // main variable t, coefficients in s
        let a: Vec<UniPoly> = m.coeffs().iter().map(|c| UniPoly::constant(c.clone())).collect();
        let b: Vec<UniPoly> = self
            .value
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    &UniPoly::var() - &UniPoly::constant(c.clone())
                } else {
                    UniPoly::constant(-c.clone())
                }
            })
            .collect();
        resultant(&a, &b).squarefree()
    }

    /// Isolating interval for this value as a root of [`Self::own_polynomial`].
    pub fn isolate(&self) -> RootInterval {
        if let Some(q) = self.as_rational() {
            return RootInterval::exact(q);
        }
        let f = self.own_polynomial();
        let roots = real_roots(&f);
        // select the candidate whose interval certifiably contains the value
        for r in &roots {
            let below = self - &FieldElem::from_rational(self.root.clone(), r.lo.clone());
            let above = self - &FieldElem::from_rational(self.root.clone(), r.hi.clone());
            if below.sign() > 0 && above.sign() < 0 {
                return r.clone();
            }
            if let Some(q) = r.as_rational() {
                if (self - &FieldElem::from_rational(self.root.clone(), q.clone())).is_zero() {
                    return r.clone();
                }
            }
        }
        unreachable!("value is a root of its own polynomial")
    }

    /// Text such as `1/2` or `root(2*t^2 - 1, [7/10, 3/4])`.
    pub fn exact_text(&self) -> String {
        let iv = self.isolate();
        match iv.as_rational() {
            Some(q) => q.to_string(),
            None => format!("root({}, [{}, {}])", iv.poly.render("t"), iv.lo, iv.hi),
        }
    }
}

impl std::ops::Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        FieldElem::new(self.root.clone(), &self.value + &o.value)
    }
}

impl std::ops::Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        FieldElem::new(self.root.clone(), &self.value - &o.value)
    }
}

impl std::ops::Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        FieldElem::new(self.root.clone(), &self.value * &o.value)
    }
}

impl std::ops::Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(self.root.clone(), -self.value.clone())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.exact_text())
    }
}

/// A point of the real plane with coordinates in a common number field.
#[derive(Clone, Debug)]
pub struct AlgebraicPoint {
    pub x: FieldElem,
    pub y: FieldElem,
    approx: (f64, f64),
}

impl AlgebraicPoint {
    pub fn new(x: FieldElem, y: FieldElem) -> Self {
        let approx = (x.to_f64(), y.to_f64());
        AlgebraicPoint { x, y, approx }
    }

    pub fn rational(x: Rational, y: Rational) -> Self {
        let root = RealRoot::rational(Rational::zero());
        AlgebraicPoint::new(
            FieldElem::from_rational(root.clone(), x),
            FieldElem::from_rational(root, y),
        )
    }

    pub fn root(&self) -> &Arc<RealRoot> {
        self.x.root()
    }

    pub fn approx(&self) -> (f64, f64) {
        self.approx
    }

    pub fn as_rational(&self) -> Option<(Rational, Rational)> {
        Some((self.x.as_rational()?, self.y.as_rational()?))
    }

    /// Value of a bivariate polynomial at this point, in the point's field.
    pub fn eval(&self, p: &RationalPoly) -> FieldElem {
        let root = self.root().clone();
        let xs = self.x.value().clone();
        let ys = self.y.value().clone();
        let m = root.defining_poly().clone();
        let reduce = |u: UniPoly| if m.degree().unwrap_or(0) >= 1 { u.rem(&m) } else { u };
        let mut acc = UniPoly::zero();
        for (mono, c) in p.terms() {
            let t = reduce(&reduce(xs.pow(mono.i)) * &reduce(ys.pow(mono.j)));
            acc = &acc + &t.scale(c);
        }
        FieldElem::new(root, acc)
    }

    pub fn summary(&self) -> PointSummary {
        PointSummary {
            x: self.x.exact_text(),
            y: self.y.exact_text(),
            approx: [self.approx.0, self.approx.1],
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PointSummary {
    pub x: String,
    pub y: String,
    pub approx: [f64; 2],
}

/// Roots of a univariate polynomial as field generators.
pub fn roots_as_fields(f: &UniPoly) -> Vec<Arc<RealRoot>> {
    real_roots(f).into_iter().map(|r| Arc::new(RealRoot(r))).collect()
}
