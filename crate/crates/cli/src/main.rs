use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use darboux_cli::config::Config;
use darboux_cli::portrait::portrait;
use darboux_cli::report::{analyze, gamma_probe, Input};
use darboux_core::rational::parse_rational;
use darboux_core::system::SystemDescription;

#[derive(Parser)]
#[command(name = "darboux", version, about = "Qualitative analysis of planar cubic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Parameter of the family x' = x - x^2 y + p x y^2 + y^3, y' = y + p y^3
    #[arg(long, allow_hyphen_values = true, conflicts_with = "system")]
    p: Option<String>,
    /// JSON system description: {"p_comp": ..., "q_comp": ..., "params": {...}}
    #[arg(long)]
    system: Option<PathBuf>,
    /// TOML file with tolerances
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline, JSON report
    Analyze {
        #[command(flatten)]
        source: Source,
        /// Degree bound for invariant curves (at most 2)
        #[arg(long)]
        maxdeg: Option<u32>,
        /// Output file (stdout when absent)
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// SVG portrait on the Poincare disk
    Portrait {
        #[command(flatten)]
        source: Source,
        /// Background orbits per side of the seed grid
        #[arg(long)]
        grid: Option<usize>,
        /// Seed for the jitter of the orbit grid
        #[arg(long)]
        seed: Option<u64>,
        /// Output file (stdout when absent)
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Algebraicity probe of the separatrix curve
    GammaProbe {
        /// Number of sample points
        #[arg(long)]
        count: Option<usize>,
        /// Lower end of the sampled y range
        #[arg(long, allow_hyphen_values = true)]
        y_min: Option<f64>,
        /// Upper end of the sampled y range
        #[arg(long)]
        y_max: Option<f64>,
        /// Highest curve degree tried
        #[arg(long)]
        maxdeg: Option<u32>,
        /// Curve to sample: the separatrix, or the algebraic control
        #[arg(long, value_enum, default_value_t = Control::Gamma)]
        control: Control,
        /// TOML file with tolerances
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file (stdout when absent)
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Control {
    Gamma,
    Algebraic,
}

fn input(src: &Source) -> Result<Input, String> {
    match (&src.p, &src.system) {
        (Some(p), None) => parse_rational(p).map(Input::Family).ok_or_else(|| format!("--p must be rational, got `{p}`")),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let desc: SystemDescription = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            desc.build().map(Input::System).map_err(|e| e.to_string())
        }
        _ => Err("give exactly one of --p or --system".into()),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Analyze { source, maxdeg, out } => {
            let mut cfg = Config::load(source.config.as_deref()).map_err(|e| e.to_string())?;
            if let Some(d) = maxdeg {
                if d > 2 {
                    return Err("--maxdeg must be at most 2".into());
                }
                cfg.analysis.maxdeg = d;
            }
            let report = analyze(&input(&source)?, &cfg);
            emit(&report.to_json(), out.as_ref())?;
            for i in &report.issues {
                eprintln!("{}: {}", i.stage, i.message);
            }
            Ok(!report.incomplete())
        }
        Command::Portrait { source, grid, seed, out } => {
            let mut cfg = Config::load(source.config.as_deref()).map_err(|e| e.to_string())?;
            if let Some(g) = grid {
                cfg.portrait.grid = g.min(64);
            }
            if let Some(s) = seed {
                cfg.portrait.seed = s;
            }
            let drawing = portrait(&input(&source)?, &cfg);
            emit(&drawing.svg, out.as_ref())?;
            Ok(!drawing.report.incomplete())
        }
        Command::GammaProbe { count, y_min, y_max, maxdeg, control, config, out } => {
            let cfg = Config::load(config.as_deref()).map_err(|e| e.to_string())?;
            let pr = &cfg.probe;
            let range = (y_min.unwrap_or(pr.y_min), y_max.unwrap_or(pr.y_max));
            let r = gamma_probe(
                count.unwrap_or(pr.count),
                range,
                maxdeg.unwrap_or(pr.maxdeg),
                control == Control::Algebraic,
                &cfg,
            )
            .map_err(|e| e.to_string())?;
            emit(&r.to_json(), out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
