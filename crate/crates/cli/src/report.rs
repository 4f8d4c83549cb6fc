//! The `analyze` and `gamma-probe` reports.

use num_traits::Zero;
use serde::Serialize;

use darboux_core::blowup::{analyze_origin, blow_up_origin, divisor_equilibria, BlowupAnalysis, BlowupError, SectorStructure};
use darboux_core::classify::{classify_semihyperbolic, Category};
use darboux_core::compactify::{chart_x, chart_y, equator_equilibria};
use darboux_core::darboux::{find_first_integral, DarbouxError, IntegralSummary, ObjectSummary};
use darboux_core::numeric::{
    algebraicity_probe, check_integral_constancy, gamma_x, sample_gamma, trace_separatrix, Manifold, NumericError,
    ProbeReport, ProbeRow,
};
use darboux_core::rational::Rational;
use darboux_core::system::{family_two, finite_equilibria, translate_first, Equilibrium, EquilibriumSummary, PlanarSystem, SystemSummary};

use crate::config::Config;

pub const SCHEMA_VERSION: &str = "1.0.0";

/// What to analyze: the one-parameter family, or any system.
#[derive(Debug, Clone)]
pub enum Input {
    Family(Rational),
    System(PlanarSystem),
}

impl Input {
    pub fn system(&self) -> PlanarSystem {
        match self {
            Input::Family(p) => family_two(p),
            Input::System(s) => s.clone(),
        }
    }

    fn parameter(&self) -> Option<&Rational> {
        match self {
            Input::Family(p) => Some(p),
            Input::System(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSummary {
    pub parameter: Option<String>,
    pub system: SystemSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneratePoint {
    pub context: String,
    pub point: [String; 2],
    pub structure: SectorStructure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DarbouxSection {
    pub invariants: Vec<ObjectSummary>,
    pub pencil: bool,
    pub exponential_factors: Vec<ObjectSummary>,
    /// Bodies of the objects the relations refer to, in order.
    pub relation_objects: Vec<String>,
    pub relations: Vec<Vec<String>>,
    pub first_integral: Option<IntegralSummary>,
    pub rational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationSummary {
    pub trials: usize,
    pub tol: f64,
    pub max_drift: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSection {
    pub probe: ProbeSummary,
    pub control: ProbeSummary,
    /// Smallest Γ residual over the degree-3 control residual.
    pub separation: f64,
    /// Largest `|x - gamma(y)|` along the traced separatrix, `y in [0.5, 2]`.
    pub separatrix_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub curve: String,
    pub points: usize,
    pub y_range: (f64, f64),
    pub rows: Vec<ProbeRow>,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub stage: String,
    pub message: String,
    /// The analysis could not be finished at this stage.
    pub incomplete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub tool: Tool,
    pub config_hash: String,
    pub input: InputSummary,
    pub finite_equilibria: Option<Vec<EquilibriumSummary>>,
    pub equator_equilibria: Option<Vec<EquilibriumSummary>>,
    pub degenerate_points: Vec<DegeneratePoint>,
    pub darboux: Option<DarbouxSection>,
    pub conservation: Option<ConservationSummary>,
    pub gamma: Option<GammaSection>,
    pub issues: Vec<Issue>,
}

impl AnalysisReport {
    pub fn incomplete(&self) -> bool {
        self.issues.iter().any(|i| i.incomplete)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn tool() -> Tool {
    Tool { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() }
}

fn issue(stage: &str, message: impl ToString, incomplete: bool) -> Issue {
    Issue { stage: stage.into(), message: message.to_string(), incomplete }
}

/// Replaces unresolved semi-hyperbolic tags by the center-manifold verdict.
fn resolve(sys: &PlanarSystem, eq: &mut Equilibrium, order: u32, stage: &str, issues: &mut Vec<Issue>) {
    if eq.tag.category != Category::SemiHyperbolic {
        return;
    }
    match classify_semihyperbolic(sys, eq, order) {
        Ok(tag) => eq.tag = tag,
        Err(e) => issues.push(issue(stage, format!("{} at ({}, {}): {e}", eq.context, eq.point.summary().x, eq.point.summary().y), true)),
    }
}

fn degenerate_point(chart: &PlanarSystem, eq: &Equilibrium) -> Result<(DegeneratePoint, BlowupAnalysis), String> {
    let (u0, z0) = eq.point.as_rational().ok_or("linearly zero point at an irrational position")?;
    if !z0.is_zero() {
        return Err("linearly zero point off the equator".into());
    }
    let centered = if u0.is_zero() { chart.clone() } else { translate_first(chart, &u0) };
    let analysis = analyze_origin(&centered).map_err(|e: BlowupError| e.to_string())?;
    let ps = eq.point.summary();
    let point = DegeneratePoint { context: eq.context.clone(), point: [ps.x, ps.y], structure: analysis.structure.clone() };
    Ok((point, analysis))
}

/// Classified equilibria, shared by the report and the portrait.
pub struct Inventory {
    pub finite: Option<Vec<Equilibrium>>,
    pub equator: Option<Vec<Equilibrium>>,
    /// Charts x and y at infinity.
    pub charts: Option<(PlanarSystem, PlanarSystem)>,
    pub degenerate: Vec<(DegeneratePoint, BlowupAnalysis)>,
    pub issues: Vec<Issue>,
}

impl Inventory {
    /// The chart an equator equilibrium lives in.
    pub fn chart_of(&self, eq: &Equilibrium) -> Option<&PlanarSystem> {
        let (cx, cy) = self.charts.as_ref()?;
        Some(if eq.context == "chart-x" { cx } else { cy })
    }
}

pub fn inventory(sys: &PlanarSystem, cfg: &Config) -> Inventory {
    let order = cfg.analysis.center_manifold_order;
    let mut issues = Vec::new();
    let finite = match finite_equilibria(sys) {
        Ok(mut eqs) => {
            for eq in &mut eqs {
                resolve(sys, eq, order, "finite", &mut issues);
            }
            Some(eqs)
        }
        Err(e) => {
            issues.push(issue("finite", e, true));
            None
        }
    };
    let mut degenerate = Vec::new();
    let (equator, charts) = match (equator_equilibria(sys), chart_x(sys), chart_y(sys)) {
        (Ok(mut eqs), Ok(cx), Ok(cy)) => {
            for eq in &mut eqs {
                let chart = if eq.context == "chart-x" { &cx } else { &cy };
                resolve(chart, eq, order, "equator", &mut issues);
                if eq.tag.category == Category::LinearlyZero {
                    match degenerate_point(chart, eq) {
                        Ok(d) => degenerate.push(d),
                        Err(e) => issues.push(issue("blowup", format!("{}: {e}", eq.context), true)),
                    }
                }
            }
            (Some(eqs), Some((cx, cy)))
        }
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
            issues.push(issue("equator", e, true));
            (None, None)
        }
    };
    Inventory { finite, equator, charts, degenerate, issues }
}

pub fn analyze(input: &Input, cfg: &Config) -> AnalysisReport {
    let sys = input.system();
    let inv = inventory(&sys, cfg);
    let mut issues = inv.issues;
    let summaries = |v: &Option<Vec<Equilibrium>>| v.as_ref().map(|eqs| eqs.iter().map(Equilibrium::summary).collect());
    let finite = summaries(&inv.finite);
    let equator = summaries(&inv.equator);
    let degenerate = inv.degenerate.into_iter().map(|d| d.0).collect();

    let (darboux, conservation) = match find_first_integral(&sys, cfg.analysis.maxdeg) {
        Ok(search) => {
            let conservation = search.integral.as_ref().map(|h| {
                let c = &cfg.conservation;
                let r = check_integral_constancy(&sys, h, c.trials, c.tol, c.seed);
                ConservationSummary { trials: r.trials.len(), tol: r.tol, max_drift: r.max_drift, pass: r.pass }
            });
            if search.integral.is_none() {
                issues.push(issue("darboux", "no first integral of Darboux type within the degree bound", false));
            }
            let section = DarbouxSection {
                invariants: search.invariants.curves.iter().map(|o| o.summary()).collect(),
                pencil: search.invariants.pencil,
                exponential_factors: search.exponentials.iter().map(|o| o.summary()).collect(),
                relation_objects: search.objects.iter().map(|o| o.render()).collect(),
                relations: search.relations.iter().map(|v| v.iter().map(|r| r.to_string()).collect()).collect(),
                rational: search.integral.as_ref().is_some_and(|h| h.rational_form().is_some()),
                first_integral: search.integral.as_ref().map(|h| h.summary()),
            };
            (Some(section), conservation)
        }
        Err(e) => {
            let incomplete = matches!(e, DarbouxError::SolverIncomplete(_));
            issues.push(issue("darboux", e, incomplete));
            (None, None)
        }
    };

    let gamma = match input.parameter() {
        Some(p) if p.is_zero() => match gamma_section(cfg) {
            Ok(g) => Some(g),
            Err(e) => {
                issues.push(issue("gamma", e, false));
                None
            }
        },
        _ => None,
    };

    AnalysisReport {
        schema_version: SCHEMA_VERSION.into(),
        tool: tool(),
        config_hash: cfg.hash(),
        input: InputSummary { parameter: input.parameter().map(|p| p.to_string()), system: sys.describe() },
        finite_equilibria: finite,
        equator_equilibria: equator,
        degenerate_points: degenerate,
        darboux,
        conservation,
        gamma,
        issues,
    }
}

/// Points of the algebraic control: the branch `x y = 2 + y^2` of the level
/// set `H = 1` of the rational integral at `p = 1`.
pub fn control_points(count: usize, y_range: (f64, f64)) -> Result<Vec<(f64, f64)>, NumericError> {
    Ok(sample_gamma(count, y_range)?.points.into_iter().map(|(_, y)| ((2.0 + y * y) / y, y)).collect())
}

fn summarize(curve: &str, report: ProbeReport, y_range: (f64, f64), statistic: f64, threshold: f64, pass: bool) -> ProbeSummary {
    ProbeSummary { curve: curve.into(), points: report.points, y_range, rows: report.rows, statistic, threshold, pass }
}

pub fn probe_gamma(count: usize, y_range: (f64, f64), maxdeg: u32, cfg: &Config) -> Result<ProbeSummary, NumericError> {
    let sample = sample_gamma(count, y_range)?;
    let r = algebraicity_probe(&sample.points, maxdeg)?;
    let stat = r.min_holdout;
    let thr = cfg.probe.gamma_threshold;
    Ok(summarize("gamma", r, y_range, stat, thr, stat >= thr))
}

pub fn probe_control(count: usize, y_range: (f64, f64), maxdeg: u32, cfg: &Config) -> Result<ProbeSummary, NumericError> {
    let r = algebraicity_probe(&control_points(count, y_range)?, maxdeg)?;
    let deg = maxdeg.min(3);
    let stat = r.at(deg).map_or(f64::NAN, |row| row.holdout.max(row.sigma_min));
    let thr = cfg.probe.control_threshold;
    Ok(summarize("algebraic", r, y_range, stat, thr, stat <= thr))
}

/// Unstable separatrix of the divisor saddle above the origin of chart x at
/// `p = 0`, mapped to the plane; returns the largest `|x - gamma(y)|` for
/// `y in [0.5, 2]`.
pub fn separatrix_deviation(cfg: &Config) -> Result<f64, String> {
    let chart = chart_x(&family_two(&Rational::zero())).map_err(|e| e.to_string())?;
    let (pos, _) = blow_up_origin(&chart).map_err(|e| e.to_string())?;
    let saddle = divisor_equilibria(&pos)
        .map_err(|e| e.to_string())?
        .into_iter()
        .find(|e| e.tag.is_saddle() && e.point.approx().1 > 0.0)
        .ok_or("no divisor saddle")?;
    let settings = darboux_core::numeric::Settings { rtol: 1e-12, atol: 1e-12, ..cfg.integrator };
    let tr = trace_separatrix(&pos.sys, &saddle, Manifold::Unstable, 1.0, cfg.separatrix.length, cfg.separatrix.eps, &settings)
        .map_err(|e| e.to_string())?;
    let dev = tr
        .points
        .iter()
        .filter(|p| (0.5..=2.0).contains(&p.2))
        .map(|&(_, x, y)| (x - gamma_x(y)).abs())
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    dev.ok_or_else(|| "separatrix does not reach y in [0.5, 2]".into())
}

fn gamma_section(cfg: &Config) -> Result<GammaSection, String> {
    let pr = &cfg.probe;
    let range = (pr.y_min, pr.y_max);
    let probe = probe_gamma(pr.count, range, pr.maxdeg, cfg).map_err(|e| e.to_string())?;
    let control = probe_control(pr.count, range, 3, cfg).map_err(|e| e.to_string())?;
    Ok(GammaSection {
        separation: probe.statistic / control.statistic.max(f64::MIN_POSITIVE),
        probe,
        control,
        separatrix_deviation: separatrix_deviation(cfg)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaProbeReport {
    pub schema_version: String,
    pub tool: Tool,
    pub config_hash: String,
    pub maxdeg: u32,
    pub result: ProbeSummary,
}

impl GammaProbeReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn gamma_probe(count: usize, y_range: (f64, f64), maxdeg: u32, algebraic: bool, cfg: &Config) -> Result<GammaProbeReport, NumericError> {
    let result = if algebraic { probe_control(count, y_range, maxdeg, cfg)? } else { probe_gamma(count, y_range, maxdeg, cfg)? };
    Ok(GammaProbeReport { schema_version: SCHEMA_VERSION.into(), tool: tool(), config_hash: cfg.hash(), maxdeg, result })
}
