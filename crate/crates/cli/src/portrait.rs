//! Poincare-disk portraits as SVG.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use darboux_core::classify::{Category, Stability};
use darboux_core::numeric::{integrate_with, trace_separatrix, Manifold, Settings};
use darboux_core::system::{Equilibrium, PlanarSystem};

use crate::config::Config;
use crate::report::{analyze, inventory, AnalysisReport, Input};

/// One equilibrium as drawn; antipodal copies of equator points are not
/// listed separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub context: String,
    pub point: [String; 2],
    pub tag: String,
}

pub struct Drawing {
    pub svg: String,
    pub report: AnalysisReport,
    pub markers: Vec<Marker>,
}

/// Plane to the open unit disk.
fn to_disk((x, y): (f64, f64)) -> (f64, f64) {
    let n = (1.0 + x * x + y * y).sqrt();
    (x / n, y / n)
}

fn from_disk((a, b): (f64, f64)) -> (f64, f64) {
    let n = (1.0 - a * a - b * b).sqrt();
    (a / n, b / n)
}

struct Canvas {
    size: f64,
    body: String,
}

impl Canvas {
    fn screen(&self, (a, b): (f64, f64)) -> (f64, f64) {
        let c = self.size / 2.0;
        let r = 0.45 * self.size;
        (c + r * a, c - r * b)
    }

    /// Disk-coordinate polyline, thinned to about a pixel.
    fn polyline(&mut self, pts: &[(f64, f64)], class: &str) {
        let mut kept: Vec<(f64, f64)> = Vec::new();
        for &p in pts {
            let s = self.screen(p);
            if kept.last().is_none_or(|l| (l.0 - s.0).hypot(l.1 - s.1) >= 1.0) {
                kept.push(s);
            }
        }
        if kept.len() < 2 {
            return;
        }
        let coords: Vec<String> = kept.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(self.body, r#"<polyline class="{class}" points="{}"/>"#, coords.join(" "));
    }

    /// Arrowhead at `pts[i]` pointing toward `pts[i + dir]`.
    fn arrow(&mut self, pts: &[(f64, f64)], forward: bool) {
        if pts.len() < 3 {
            return;
        }
        let i = pts.len() / 3;
        let (p, q) = (self.screen(pts[i]), self.screen(pts[if forward { i + 1 } else { i - 1 }]));
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        let n = dx.hypot(dy);
        if n == 0.0 || !n.is_finite() {
            return;
        }
        let (ux, uy) = (dx / n, dy / n);
        let s = 5.0;
        let tip = (p.0 + ux * s, p.1 + uy * s);
        let l = (p.0 - uy * s * 0.6, p.1 + ux * s * 0.6);
        let r = (p.0 + uy * s * 0.6, p.1 - ux * s * 0.6);
        let _ = writeln!(
            self.body,
            r#"<polygon class="arrow" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"#,
            tip.0, tip.1, l.0, l.1, r.0, r.1
        );
    }

    fn marker(&mut self, at: (f64, f64), eq: &Equilibrium, extra: &str) {
        let (x, y) = self.screen(at);
        let ps = eq.point.summary();
        let shape = match eq.tag.category {
            Category::HyperbolicNode(s) | Category::SemiHyperbolicNode(s) => {
                let fill = if s == Stability::Stable { "black" } else { "white" };
                let mut g = format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}"/>"#);
                if eq.tag.star {
                    for k in 0..4 {
                        let a = k as f64 * std::f64::consts::FRAC_PI_4;
                        let (c, s) = (8.0 * a.cos(), 8.0 * a.sin());
                        let _ = write!(g, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, x - c, y - s, x + c, y + s);
                    }
                }
                g
            }
            Category::HyperbolicSaddle | Category::SemiHyperbolicSaddle => format!(
                r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" transform="rotate(45 {x:.2} {y:.2})"/>"#,
                x - 4.0,
                y - 4.0
            ),
            Category::SemiHyperbolicSaddleNode => {
                format!(r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"#, x, y - 6.0, x - 5.0, y + 4.0, x + 5.0, y + 4.0)
            }
            Category::HyperbolicFocus(s) => {
                let fill = if s == Stability::Stable { "black" } else { "white" };
                format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}"/><circle cx="{x:.2}" cy="{y:.2}" r="2"/>"#)
            }
            Category::LinearCenter => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="none"/>"#),
            _ => format!(r#"<rect x="{:.2}" y="{:.2}" width="9" height="9" fill="white"/>"#, x - 4.5, y - 4.5),
        };
        let _ = writeln!(
            self.body,
            r#"<g class="eq" data-context="{}" data-point="{}, {}" data-tag="{}"{extra}>{shape}</g>"#,
            eq.context,
            ps.x,
            ps.y,
            eq.tag.label()
        );
    }
}

/// Directions on the boundary circle of an equator point and its antipode.
fn equator_directions(eq: &Equilibrium) -> [(f64, f64); 2] {
    let (t, _) = eq.point.approx();
    let d = if eq.context == "chart-x" { (1.0, t) } else { (t, 1.0) };
    let n = d.0.hypot(d.1);
    [(d.0 / n, d.1 / n), (-d.0 / n, -d.1 / n)]
}

/// All four separatrix branches of a saddle, mapped into the disk, each
/// with its orientation in the original time (true: away from the saddle).
fn separatrices(sys: &PlanarSystem, eq: &Equilibrium, cfg: &Config) -> Vec<(Vec<(f64, f64)>, bool)> {
    let settings = Settings { escape_radius: 1e8, ..cfg.integrator };
    let mut out = Vec::new();
    for m in [Manifold::Unstable, Manifold::Stable] {
        for side in [1.0, -1.0] {
            if let Ok(tr) = trace_separatrix(sys, eq, m, side, cfg.separatrix.length, cfg.separatrix.eps, &settings) {
                let pts: Vec<(f64, f64)> = tr.points.iter().map(|&(_, x, y)| to_disk((x, y))).collect();
                out.push((pts, m == Manifold::Unstable));
            }
        }
    }
    out
}

/// Seeds of background orbits: a jittered grid inside the disk.
fn orbit_seeds(grid: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let a = -0.85 + 1.7 * (i as f64 + 0.5) / grid as f64 + rng.gen_range(-0.05..0.05);
            let b = -0.85 + 1.7 * (j as f64 + 0.5) / grid as f64 + rng.gen_range(-0.05..0.05);
            if a * a + b * b < 0.9 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Orbit through a seed, backward then forward, in disk coordinates.
fn orbit(sys: &PlanarSystem, start: (f64, f64), cfg: &Config) -> Vec<(f64, f64)> {
    let settings = Settings { escape_radius: 1e4, max_steps: 20_000, ..cfg.integrator };
    let f = |x: f64, y: f64| sys.eval_f64(x, y);
    let t = cfg.portrait.orbit_time;
    let back = integrate_with(f, start, (0.0, -t), &settings).map(|tr| tr.points).unwrap_or_default();
    let fwd = integrate_with(f, start, (0.0, t), &settings).map(|tr| tr.points).unwrap_or_default();
    back.iter().rev().chain(fwd.iter().skip(1)).map(|&(_, x, y)| to_disk((x, y))).collect()
}

const STYLE: &str = "polyline{fill:none;stroke-width:0.8}\
.orbit{stroke:#999}.separatrix{stroke:#c00;stroke-width:1.4}\
.arrow{fill:#333}.eq{stroke:black;stroke-width:1}.boundary{fill:none;stroke:black}";

pub fn portrait(input: &Input, cfg: &Config) -> Drawing {
    let sys = input.system();
    let report = analyze(input, cfg);
    let inv = inventory(&sys, cfg);
    let size = cfg.portrait.size as f64;
    let mut cv = Canvas { size, body: String::new() };
    let (cx, cy) = cv.screen((0.0, 0.0));
    let _ = writeln!(cv.body, r#"<circle class="boundary" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}"/>"#, 0.45 * size);

    let seeds = orbit_seeds(cfg.portrait.grid, cfg.portrait.seed);
    let orbits: Vec<Vec<(f64, f64)>> = seeds.par_iter().map(|&s| orbit(&sys, from_disk(s), cfg)).collect();
    for o in &orbits {
        cv.polyline(o, "orbit");
    }
    for (o, s) in orbits.iter().zip(&seeds) {
        // arrow at the seed, along the forward orbit
        if let Some(i) = o.iter().position(|p| (p.0 - s.0).hypot(p.1 - s.1) < 1e-12) {
            if i + 1 < o.len() {
                cv.arrow(&o[i.saturating_sub(1)..], true);
            }
        }
    }

    let mut saddles: Vec<(PlanarSystem, Equilibrium)> = Vec::new();
    for eq in inv.finite.iter().flatten().filter(|e| e.tag.is_saddle()) {
        saddles.push((sys.clone(), eq.clone()));
    }
    for eq in inv.equator.iter().flatten().filter(|e| e.tag.is_saddle()) {
        if let Some(chart) = inv.chart_of(eq) {
            saddles.push((chart.clone(), eq.clone()));
        }
    }
    for (_, analysis) in &inv.degenerate {
        for pt in analysis.points.iter().filter(|p| p.eq.tag.is_saddle()) {
            saddles.push((analysis.charts[pt.chart].sys.clone(), pt.eq.clone()));
        }
    }
    let curves: Vec<Vec<(Vec<(f64, f64)>, bool)>> = saddles.par_iter().map(|(s, e)| separatrices(s, e, cfg)).collect();
    for (pts, away) in curves.iter().flatten() {
        cv.polyline(pts, "separatrix");
        cv.arrow(pts, *away);
    }

    let mut markers = Vec::new();
    for eq in inv.finite.iter().flatten() {
        cv.marker(to_disk(eq.point.approx()), eq, "");
        markers.push(marker(eq));
    }
    for eq in inv.equator.iter().flatten() {
        let sectors = inv
            .degenerate
            .iter()
            .find(|(d, _)| d.context == eq.context && d.point == [eq.point.summary().x, eq.point.summary().y])
            .map(|(d, _)| {
                let c = &d.structure.counts;
                format!(r#" data-sectors="nodal={} saddle={} elliptic={}""#, c.nodal, c.saddle, c.elliptic)
            })
            .unwrap_or_default();
        let [d, anti] = equator_directions(eq);
        cv.marker(d, eq, &sectors);
        cv.marker(anti, eq, &format!(r#"{sectors} data-antipode="1""#));
        markers.push(marker(eq));
    }

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        cfg.portrait.size
    );
    let title = match input {
        Input::Family(p) => format!("p = {p}"),
        Input::System(s) => format!("{}' = {}, {}' = {}", s.vars().0, s.p().render(), s.vars().1, s.q().render()),
    };
    let _ = writeln!(svg, "<title>{}</title>", escape(&title));
    let _ = writeln!(svg, "<desc>config {}</desc>", report.config_hash);
    let _ = writeln!(svg, "<style>{STYLE}</style>");
    svg.push_str(&cv.body);
    svg.push_str("</svg>\n");
    Drawing { svg, report, markers }
}

fn marker(eq: &Equilibrium) -> Marker {
    let ps = eq.point.summary();
    Marker { context: eq.context.clone(), point: [ps.x, ps.y], tag: eq.tag.label() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
