//! Floating-point checks: adaptive integration, conservation of first
//! integrals, separatrix tracing and an algebraicity probe for the curve
//! `(x - y)/(x + y) e^(y^2) = 1`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::darboux::{evaluate_integral, FirstIntegral, ObjectKind};
use crate::system::{Equilibrium, PlanarSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("step size underflow at t = {t}, ({x}, {y})")]
    StepUnderflow { t: f64, x: f64, y: f64 },
    #[error("equilibrium is not a saddle")]
    NotASaddle,
    #[error("seed point does not map back to the original plane")]
    Unmappable,
    #[error("sample of {points} points cannot determine {columns} coefficients; widen the range or add points")]
    IllConditioned { points: usize, columns: usize },
    #[error("invalid range [{0}, {1}]")]
    InvalidRange(f64, f64),
    #[error("curve degree must be at least 1")]
    ZeroDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub rtol: f64,
    pub atol: f64,
    pub escape_radius: f64,
    pub min_speed: f64,
    pub max_steps: usize,
}

impl Settings {
    pub fn with_tol(tol: f64) -> Self {
        Settings { rtol: tol, atol: tol, ..Settings::default() }
    }
}

impl Default for Settings {
    fn default() -> Self {
        Settings { rtol: 1e-10, atol: 1e-10, escape_radius: 1e6, min_speed: 1e-12, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    TimeLimit,
    EscapeRadius,
    Equilibrium,
    StepLimit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Stats {
    pub steps: usize,
    pub rejected: usize,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// `(t, x, y)`
    pub points: Vec<(f64, f64, f64)>,
    pub stats: Stats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> (f64, f64) {
        let &(_, x, y) = self.points.last().expect("trajectory has a start point");
        (x, y)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y\n");
        for (t, x, y) in &self.points {
            s.push_str(&format!("{t},{x},{y}\n"));
        }
        s
    }
}

// Dormand-Prince 5(4)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive DOPRI5 on an arbitrary planar field. `t1 < t0` integrates
/// backwards.
pub fn integrate_with<F>(f: F, start: (f64, f64), (t0, t1): (f64, f64), cfg: &Settings) -> Result<Trajectory, NumericError>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let (mut t, mut y) = (t0, [start.0, start.1]);
    let mut points = vec![(t, y[0], y[1])];
    let mut stats = Stats::default();
    let ev = |y: [f64; 2]| {
        let (a, b) = f(y[0], y[1]);
        [a, b]
    };
    let mut k1 = ev(y);
    let scale = cfg.atol + cfg.rtol * y[0].abs().max(y[1].abs());
    let speed0 = k1[0].hypot(k1[1]);
    let mut h = dir * (0.01 * scale / speed0.max(1e-300)).sqrt().clamp(1e-8, 0.1).min((t1 - t0).abs().max(1e-300));
    loop {
        if (t1 - t) * dir <= 0.0 {
            return Ok(Trajectory { points, stats, termination: Termination::TimeLimit });
        }
        if y[0].hypot(y[1]) > cfg.escape_radius {
            return Ok(Trajectory { points, stats, termination: Termination::EscapeRadius });
        }
        if k1[0].hypot(k1[1]) < cfg.min_speed {
            return Ok(Trajectory { points, stats, termination: Termination::Equilibrium });
        }
        if stats.steps + stats.rejected >= cfg.max_steps {
            return Ok(Trajectory { points, stats, termination: Termination::StepLimit });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(NumericError::StepUnderflow { t, x: y[0], y: y[1] });
        }
        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for d in 0..2 {
                    yi[d] += h * A[s][j] * kj[d];
                }
            }
            k[s] = ev(yi);
        }
        let mut y5 = y;
        let mut err = 0.0;
        for d in 0..2 {
            let (mut s5, mut s4) = (0.0, 0.0);
            for s in 0..7 {
                s5 += B5[s] * k[s][d];
                s4 += B4[s] * k[s][d];
            }
            y5[d] += h * s5;
            let sc = cfg.atol + cfg.rtol * y[d].abs().max(y5[d].abs());
            err += (h * (s5 - s4) / sc).powi(2);
        }
        let err = (err / 2.0).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.2;
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            // FSAL: the last stage is the derivative at the new point
            k1 = k[6];
            stats.steps += 1;
            stats.max_error = stats.max_error.max(err);
            points.push((t, y[0], y[1]));
        } else {
            stats.rejected += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { fac } else { fac.min(1.0) };
    }
}

pub fn integrate_trajectory(sys: &PlanarSystem, start: (f64, f64), t_span: (f64, f64), tol: f64) -> Result<Trajectory, NumericError> {
    integrate_with(|x, y| sys.eval_f64(x, y), start, t_span, &Settings::with_tol(tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialDrift {
    pub start: (f64, f64),
    pub h0: f64,
    pub drift: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyReport {
    pub trials: Vec<TrialDrift>,
    pub max_drift: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Beyond this radius `H` is too badly conditioned in double precision to
/// say anything (cancellation in `x - y`, growth of `exp(y^2)`), so
/// conservation runs stop there.
pub const CONSTANCY_RADIUS: f64 = 10.0;

/// `|pt| |grad log|H||`: relative change of `H` per relative perturbation of
/// the point.
pub fn condition_number(h: &FirstIntegral, (x, y): (f64, f64)) -> f64 {
    let (mut gx, mut gy) = (0.0, 0.0);
    for (o, a) in &h.factors {
        let a = crate::rational::to_f64(a);
        let (dx, dy) = (o.body.dx().eval_f64(x, y), o.body.dy().eval_f64(x, y));
        let w = match o.kind {
            ObjectKind::ExponentialFactor => a,
            ObjectKind::AlgebraicCurve => a / o.body.eval_f64(x, y),
        };
        gx += w * dx;
        gy += w * dy;
    }
    x.hypot(y) * gx.hypot(gy)
}

/// Random starts in `[-2, 2]^2` kept away from the zero sets of the
/// factors, each integrated over `t in [0, 1]` or until `CONSTANCY_RADIUS`.
/// The drift of a trial is the largest `|H - H0| / (|H0| max(1, kappa))`
/// along it, `kappa` the condition number at the point: orbits running into
/// an invariant curve make `H` arbitrarily sensitive to rounding.
pub fn check_integral_constancy(sys: &PlanarSystem, h: &FirstIntegral, trials: usize, tol: f64, seed: u64) -> ConstancyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(trials);
    let mut attempts = 0;
    while starts.len() < trials && attempts < 100 * trials.max(1) {
        attempts += 1;
        let pt = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let clear = h.factors.iter().all(|(o, _)| o.body.is_constant() || o.body.eval_f64(pt.0, pt.1).abs() > 0.1);
        if clear && evaluate_integral(h, pt).is_ok() {
            starts.push(pt);
        }
    }
    let cfg = Settings { escape_radius: CONSTANCY_RADIUS, ..Settings::with_tol(1e-12) };
    let out: Vec<TrialDrift> = starts
        .par_iter()
        .map(|&start| {
            let h0 = evaluate_integral(h, start).unwrap_or(f64::NAN);
            let traj = integrate_with(|x, y| sys.eval_f64(x, y), start, (0.0, 1.0), &cfg);
            let (drift, termination) = match traj {
                Ok(tr) => {
                    let d = tr
                        .points
                        .iter()
                        .map(|&(_, x, y)| {
                            let kappa = condition_number(h, (x, y)).max(1.0);
                            evaluate_integral(h, (x, y)).map_or(f64::INFINITY, |v| (v - h0).abs() / h0.abs().max(1e-300) / kappa)
                        })
                        .fold(0.0, f64::max);
                    (d, tr.termination)
                }
                Err(_) => (f64::INFINITY, Termination::StepLimit),
            };
            TrialDrift { start, h0, drift, termination }
        })
        .collect();
    let max_drift = out.iter().map(|t| t.drift).fold(0.0, f64::max);
    ConstancyReport { pass: out.len() == trials && max_drift <= tol, trials: out, max_drift, tol }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Manifold {
    Unstable,
    Stable,
}

/// Separatrix of a saddle, seeded at `saddle + eps * side * v` with `v` the
/// eigenvector of the chosen manifold, integrated for `length` units of chart
/// time and mapped back to the original plane through the lineage. Stability
/// refers to the original time.
pub fn trace_separatrix(
    sys: &PlanarSystem,
    saddle: &Equilibrium,
    manifold: Manifold,
    side: f64,
    length: f64,
    eps: f64,
    cfg: &Settings,
) -> Result<Trajectory, NumericError> {
    if !saddle.tag.is_saddle() {
        return Err(NumericError::NotASaddle);
    }
    let j = saddle.jacobian.to_f64();
    let (tr, det) = (j[0][0] + j[1][1], j[0][0] * j[1][1] - j[0][1] * j[1][0]);
    if det >= 0.0 {
        return Err(NumericError::NotASaddle);
    }
    let root = (tr * tr - 4.0 * det).sqrt();
    let (lp, lm) = ((tr + root) / 2.0, (tr - root) / 2.0);
    // kernel of J - l I from its larger row
    let eigvec = |l: f64| {
        let (r0, r1) = ((j[0][0] - l, j[0][1]), (j[1][0], j[1][1] - l));
        let (a, b) = if r0.0.hypot(r0.1) >= r1.0.hypot(r1.1) { (r0.1, -r0.0) } else { (-r1.1, r1.0) };
        let n = a.hypot(b);
        (a / n, b / n)
    };
    let (x0, y0) = saddle.point.approx();
    // orientation of chart time relative to original time, next to the saddle
    let probe = |l: f64| {
        let v = eigvec(l);
        let seed = (x0 + eps * side * v.0, y0 + eps * side * v.1);
        sys.to_root_coords(seed).map(|(_, o)| (seed, o))
    };
    let want_growth = manifold == Manifold::Unstable;
    let mut chosen = None;
    for l in [lp, lm] {
        let (seed, orient) = probe(l).ok_or(NumericError::Unmappable)?;
        let grows = (l > 0.0) == (orient > 0);
        if grows == want_growth {
            chosen = Some((seed, l));
            break;
        }
    }
    let (seed, l) = chosen.ok_or(NumericError::NotASaddle)?;
    let t1 = if l > 0.0 { length } else { -length };
    let traj = integrate_with(|x, y| sys.eval_f64(x, y), seed, (0.0, t1), cfg)?;
    let points = traj
        .points
        .iter()
        .filter_map(|&(t, a, b)| sys.to_root_coords((a, b)).map(|((x, y), _)| (t, x, y)))
        .filter(|&(_, x, y)| x.is_finite() && y.is_finite())
        .collect();
    Ok(Trajectory { points, ..traj })
}

/// Closed form of the curve `(x - y)/(x + y) e^(y^2) = 1` for `y > 0`.
pub fn gamma_x(y: f64) -> f64 {
    y * (1.0 + 2.0 / (y * y).exp_m1())
}

pub fn gamma_residual((x, y): (f64, f64)) -> f64 {
    ((x - y) / (x + y) * (y * y).exp() - 1.0).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSample {
    pub points: Vec<(f64, f64)>,
    pub parametrization: String,
    pub y_range: (f64, f64),
}

pub fn sample_gamma(count: usize, (y_min, y_max): (f64, f64)) -> Result<GammaSample, NumericError> {
    if !(y_min > 0.0 && y_min < y_max && y_max.is_finite()) {
        return Err(NumericError::InvalidRange(y_min, y_max));
    }
    let points: Vec<(f64, f64)> = (0..count)
        .map(|i| {
            let s = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            let y = y_min + s * (y_max - y_min);
            (gamma_x(y), y)
        })
        .collect();
    debug_assert!(points.iter().all(|&p| gamma_residual(p) <= 1e-12));
    Ok(GammaSample {
        points,
        parametrization: "x = y*(exp(y^2) + 1)/(exp(y^2) - 1), y uniform".into(),
        y_range: (y_min, y_max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub degree: u32,
    /// Smallest singular value over the whole sample.
    pub sigma_min: f64,
    /// Residual on the second half of the sample of the best curve fitted
    /// to the first half.
    pub holdout: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub points: usize,
    pub rows: Vec<ProbeRow>,
    pub min_holdout: f64,
}

impl ProbeReport {
    pub fn at(&self, degree: u32) -> Option<&ProbeRow> {
        self.rows.iter().find(|r| r.degree == degree)
    }
}

fn chebyshev(t: f64, n: usize) -> Vec<f64> {
    let mut v = vec![1.0, t];
    for k in 2..=n {
        v.push(2.0 * t * v[k - 1] - v[k - 2]);
    }
    v.truncate(n + 1);
    v
}

fn to_unit(vals: impl Iterator<Item = f64> + Clone) -> impl Fn(f64) -> f64 {
    let lo = vals.clone().fold(f64::INFINITY, f64::min);
    let hi = vals.fold(f64::NEG_INFINITY, f64::max);
    let (mid, half) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
    let half = if half > 0.0 { half } else { 1.0 };
    move |v| (v - mid) / half
}

fn smallest(m: DMatrix<f64>) -> (f64, Vec<f64>) {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    (*s, vt.row(k).iter().cloned().collect())
}

/// Basis `T_i(x) T_j(y)`, `i + j <= n`, coordinates mapped to `[-1, 1]`.
/// For each degree the report gives the smallest singular value of the
/// column-normalized matrix over all points, and a held-out residual: the
/// null vector of the first half of the sample (in the given order),
/// evaluated on the second half and scaled to the same units. A curve of
/// degree `<= n` through all points makes both near zero; an analytic
/// non-algebraic arc is fitted well on one half but does not extend.
pub fn algebraicity_probe(points: &[(f64, f64)], maxdeg: u32) -> Result<ProbeReport, NumericError> {
    let n = maxdeg as usize;
    let columns = (n + 1) * (n + 2) / 2;
    if maxdeg == 0 {
        return Err(NumericError::ZeroDegree);
    }
    if points.len() < 3 * columns {
        return Err(NumericError::IllConditioned { points: points.len(), columns });
    }
    let fx = to_unit(points.iter().map(|p| p.0));
    let fy = to_unit(points.iter().map(|p| p.1));
    let tabs: Vec<(Vec<f64>, Vec<f64>)> = points.iter().map(|&(x, y)| (chebyshev(fx(x), n), chebyshev(fy(y), n))).collect();
    let half = points.len() / 2;
    let mut rows = Vec::new();
    for deg in 1..=n {
        let idx: Vec<(usize, usize)> = (0..=deg).flat_map(|t| (0..=t).map(move |i| (i, t - i))).collect();
        let build = |r: std::ops::Range<usize>| {
            let mut m = DMatrix::<f64>::from_fn(r.len(), idx.len(), |i, c| tabs[r.start + i].0[idx[c].0] * tabs[r.start + i].1[idx[c].1]);
            let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
            for (mut col, &nm) in m.column_iter_mut().zip(&norms) {
                if nm > 0.0 {
                    col /= nm;
                }
            }
            (m, norms)
        };
        let (all, _) = build(0..points.len());
        let (sigma_min, _) = smallest(all);
        let (fit, norms) = build(0..half);
        let (_, c) = smallest(fit);
        let rest = points.len() - half;
        let mut sq = 0.0;
        for r in half..points.len() {
            let v: f64 = idx
                .iter()
                .zip(&c)
                .zip(&norms)
                .map(|((&(i, j), ck), nm)| if *nm > 0.0 { ck * tabs[r].0[i] * tabs[r].1[j] / nm } else { 0.0 })
                .sum();
            sq += v * v;
        }
        let holdout = (sq * half as f64 / rest as f64).sqrt();
        rows.push(ProbeRow { degree: deg as u32, sigma_min, holdout });
    }
    let min_holdout = rows.iter().map(|r| r.holdout).fold(f64::INFINITY, f64::min);
    Ok(ProbeReport { points: points.len(), rows, min_holdout })
}
