//! Singular point types from exact linear data and center manifolds.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::RationalPoly;
use crate::rational::{self, Rational};
use crate::system::{Equilibrium, Jacobian, PlanarSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    fn from_sign(s: i32) -> Self {
        if s < 0 {
            Stability::Stable
        } else {
            Stability::Unstable
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    HyperbolicNode(Stability),
    HyperbolicSaddle,
    HyperbolicFocus(Stability),
    LinearCenter,
    /// One zero eigenvalue, the nonlinear type not yet resolved.
    SemiHyperbolic,
    SemiHyperbolicNode(Stability),
    SemiHyperbolicSaddle,
    SemiHyperbolicSaddleNode,
    Nilpotent,
    LinearlyZero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Linear {
        trace: String,
        det: String,
        /// sign of `tr^2 - 4 det`
        discriminant_sign: i32,
    },
    CenterManifold {
        /// multiplicity `m` of the reduced flow `a_m z^m`
        multiplicity: u32,
        coefficient: String,
        eigenvalue: String,
        order: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationTag {
    pub category: Category,
    /// `J` is a nonzero multiple of the identity.
    pub star: bool,
    pub evidence: Evidence,
}

impl ClassificationTag {
    pub fn label(&self) -> String {
        use Category::*;
        match self.category {
            HyperbolicNode(s) => format!("hyperbolic-node-{}", s.label()),
            HyperbolicSaddle => "hyperbolic-saddle".into(),
            HyperbolicFocus(s) => format!("hyperbolic-focus-{}", s.label()),
            LinearCenter => "linear-center".into(),
            SemiHyperbolic => "semi-hyperbolic".into(),
            SemiHyperbolicNode(s) => format!("semi-hyperbolic-node-{}", s.label()),
            SemiHyperbolicSaddle => "semi-hyperbolic-saddle".into(),
            SemiHyperbolicSaddleNode => "semi-hyperbolic-saddle-node".into(),
            Nilpotent => "nilpotent".into(),
            LinearlyZero => "linearly-zero".into(),
        }
    }

    pub fn is_saddle(&self) -> bool {
        matches!(
            self.category,
            Category::HyperbolicSaddle | Category::SemiHyperbolicSaddle
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("point does not have exactly one zero eigenvalue")]
    NotSemiHyperbolic,
    #[error("center-manifold reduction needs a rational point")]
    IrrationalPoint,
    #[error("reduced flow vanishes through order {0}; raise the order")]
    UndeterminedAtOrder(u32),
    #[error("truncation order must be at least 2")]
    OrderTooSmall,
}

/// Type from exact trace and determinant signs.
pub fn classify_linear(j: &Jacobian) -> ClassificationTag {
    let tr = j.trace();
    let det = j.det();
    let disc = &tr.square() - &det.scale(&rational::int(4));
    let (ts, ds, qs) = (tr.sign(), det.sign(), disc.sign());
    let star = j.0[0][1].is_zero() && j.0[1][0].is_zero() && j.0[0][0] == j.0[1][1] && ts != 0;
    let category = if j.is_zero() {
        Category::LinearlyZero
    } else if ds < 0 {
        Category::HyperbolicSaddle
    } else if ds > 0 {
        if ts == 0 {
            Category::LinearCenter
        } else if qs >= 0 {
            Category::HyperbolicNode(Stability::from_sign(ts))
        } else {
            Category::HyperbolicFocus(Stability::from_sign(ts))
        }
    } else if ts != 0 {
        Category::SemiHyperbolic
    } else {
        Category::Nilpotent
    };
    ClassificationTag {
        category,
        star,
        evidence: Evidence::Linear {
            trace: tr.exact_text(),
            det: det.exact_text(),
            discriminant_sign: qs,
        },
    }
}

type Series = Vec<Rational>;

fn series_mul(a: &Series, b: &Series, n: usize) -> Series {
    let mut out = vec![Rational::zero(); n + 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (k, y) in b.iter().enumerate() {
            if i + k > n {
                break;
            }
            out[i + k] += x * y;
        }
    }
    out
}

/// `f(X, h(X))` truncated after degree `n`.
fn compose_graph(f: &RationalPoly, h: &Series, n: usize) -> Series {
    let mut xpow = vec![vec![Rational::zero(); n + 1]];
    xpow[0][0] = Rational::one();
    let mut hpow = vec![xpow[0].clone()];
    let mut out = vec![Rational::zero(); n + 1];
    for (m, c) in f.terms() {
        while xpow.len() <= m.i as usize {
            let mut next = vec![Rational::zero(); n + 1];
            next[1..].clone_from_slice(&xpow.last().unwrap()[..n]);
            xpow.push(next);
        }
        while hpow.len() <= m.j as usize {
            let next = series_mul(hpow.last().unwrap(), h, n);
            hpow.push(next);
        }
        let t = series_mul(&xpow[m.i as usize], &hpow[m.j as usize], n);
        for (o, v) in out.iter_mut().zip(t) {
            *o += c * v;
        }
    }
    out
}

fn kernel_vector(a: [[Rational; 2]; 2]) -> [Rational; 2] {
    let row = if !a[0][0].is_zero() || !a[0][1].is_zero() { &a[0] } else { &a[1] };
    let v = [-row[1].clone(), row[0].clone()];
    // first nonzero component scaled to one
    let lead = if v[0].is_zero() { v[1].clone() } else { v[0].clone() };
    [&v[0] / &lead, &v[1] / &lead]
}

/// Center-manifold reduction at a semi-hyperbolic rational point.
///
/// The zero-eigenvector coordinate `X` (first nonzero component one) carries
/// the reduced flow `X' = a_m X^m + ...`.
pub fn classify_semihyperbolic(
    sys: &PlanarSystem,
    eq: &Equilibrium,
    order: u32,
) -> Result<ClassificationTag, ClassifyError> {
    if order < 2 {
        return Err(ClassifyError::OrderTooSmall);
    }
    let tr = eq.jacobian.trace();
    if !eq.jacobian.det().is_zero() || tr.is_zero() {
        return Err(ClassifyError::NotSemiHyperbolic);
    }
    let (x0, y0) = eq.point.as_rational().ok_or(ClassifyError::IrrationalPoint)?;
    let jm = eq.jacobian.as_rational().ok_or(ClassifyError::IrrationalPoint)?;
    let lambda = tr.as_rational().ok_or(ClassifyError::IrrationalPoint)?;
    let v0 = kernel_vector(jm.clone());
    let shifted = [
        [&jm[0][0] - &lambda, jm[0][1].clone()],
        [jm[1][0].clone(), &jm[1][1] - &lambda],
    ];
    let v1 = kernel_vector(shifted);
    // (x, y) = (x0, y0) + X v0 + Y v1
    let vars = sys.vars();
    let xv = RationalPoly::x(vars);
    let yv = RationalPoly::y(vars);
    let fx = &(&RationalPoly::constant(x0, vars) + &xv.scale(&v0[0])) + &yv.scale(&v1[0]);
    let fy = &(&RationalPoly::constant(y0, vars) + &xv.scale(&v0[1])) + &yv.scale(&v1[1]);
    let p = sys.p().substitute(&fx, &fy);
    let q = sys.q().substitute(&fx, &fy);
    // inverse of T = [v0 v1]
    let det = &v0[0] * &v1[1] - &v1[0] * &v0[1];
    let f = (&p.scale(&v1[1]) - &q.scale(&v1[0])).scale(&(Rational::one() / &det));
    let g = (&q.scale(&v0[0]) - &p.scale(&v0[1])).scale(&(Rational::one() / &det));

    let n = order as usize + 1;
    let mut h: Series = vec![Rational::zero(); n + 1];
    for k in 2..=order as usize {
        // residual of h' F(X, h) = G(X, h) at X^k; c_k enters only via lambda c_k
        let fs = compose_graph(&f, &h, n);
        let gs = compose_graph(&g, &h, n);
        let dh: Series = (0..=n)
            .map(|i| h.get(i + 1).map_or(Rational::zero(), |c| c * Rational::from_integer((i + 1).into())))
            .collect();
        let lhs = series_mul(&dh, &fs, n);
        h[k] = (&lhs[k] - &gs[k]) / &lambda;
    }
    let reduced = compose_graph(&f, &h, n);
    let (m, am) = reduced
        .iter()
        .enumerate()
        .take(order as usize + 1)
        .find(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as u32, c.clone()))
        .ok_or(ClassifyError::UndeterminedAtOrder(order))?;
    let sa = rational::sign(&am);
    let sl = rational::sign(&lambda);
    let category = if m % 2 == 0 {
        Category::SemiHyperbolicSaddleNode
    } else if sa == sl {
        Category::SemiHyperbolicNode(Stability::from_sign(sl))
    } else {
        Category::SemiHyperbolicSaddle
    };
    Ok(ClassificationTag {
        category,
        star: false,
        evidence: Evidence::CenterManifold {
            multiplicity: m,
            coefficient: am.to_string(),
            eigenvalue: lambda.to_string(),
            order,
        },
    })
}
