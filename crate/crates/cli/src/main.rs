//! `braidmat`: build, verify and analyse multiparameter braid matrices from JSON configs.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or config error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use braidmat::config::{parse_angle, Config};
use braidmat::entangle::{detect_period, exceptional_scan};
use braidmat::verify::{
    check_composition_law, check_reference_forms, run_suite, Suite, COMPOSITION_TOL,
};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "braidmat", version, about = "Multiparameter braid matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write R(theta) as matrix JSON.
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Decimal or rational multiple of pi, e.g. `0.5`, `pi/4`, `-3pi/4`.
        #[arg(long, value_parser = angle, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write the report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Schmidt data of R(theta) on every basis product state (unitary mode).
    Entangle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = angle, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Period of theta -> R(theta) from exact rational parameters (unitary mode).
    Period {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Composition law and phase form of the single-parameter reference family.
    Reference {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = angle, allow_hyphen_values = true)]
        z1: f64,
        #[arg(long, value_parser = angle, allow_hyphen_values = true)]
        z2: f64,
        #[arg(long, default_value_t = COMPOSITION_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn angle(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Verification,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { config, theta, out } => {
            let family = Config::load(&config)?.braid()?.family()?;
            let r = family.build_r(theta)?;
            emit(&serde_json::to_value(&r)?, out.as_deref())
        }
        Command::Verify {
            config,
            suite,
            samples,
            seed,
            tol,
            report,
        } => {
            if !(tol > 0.0) {
                return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
            }
            let cfg = Config::load(&config)?;
            let rep = run_suite(&cfg, suite, samples, seed, tol);
            emit(&rep.to_json(), report.as_deref())?;
            for c in rep.failures() {
                eprintln!(
                    "check {} failed: residual {:e} > {:e}",
                    c.name, c.residual, c.tolerance
                );
            }
            if rep.passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Entangle { config, theta, out } => {
            let family = Config::load(&config)?.braid()?.family()?;
            let scan = exceptional_scan(&family, theta)?;
            emit(&scan.to_json(), out.as_deref())
        }
        Command::Period { config, out } => {
            let cfg = Config::load(&config)?;
            let braid = cfg.braid()?;
            let exact = braid.exact_params()?;
            let result = detect_period(&braid.family()?, exact.as_ref())?;
            emit(&serde_json::to_value(&result)?, out.as_deref())?;
            if result.commensurate == Some(true) && !result.periodic {
                eprintln!("period not confirmed numerically");
                return Err(Failure::Verification);
            }
            Ok(())
        }
        Command::Reference {
            n,
            z1,
            z2,
            tol,
            out,
        } => {
            let composition = check_composition_law(n, z1, z2, tol)?;
            let forms = [z1, z2]
                .into_iter()
                .map(|z| check_reference_forms(n, z, tol))
                .collect::<Result<Vec<_>, _>>()?;
            let passed = composition.passed && forms.iter().all(|c| c.passed);
            let value = json!({
                "n": n,
                "z1": z1,
                "z2": z2,
                "z3": composition.context["z3"],
                "scalar": composition.context["scalar"],
                "residual": composition.residual,
                "tolerance": tol,
                "checks": std::iter::once(&composition).chain(&forms).collect::<Vec<_>>(),
                "passed": passed,
            });
            emit(&value, out.as_deref())?;
            if passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
