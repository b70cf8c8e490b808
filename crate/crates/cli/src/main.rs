//! `nacap`: capacities, Dirichlet solutions and walk statistics on graphs
//! with non-Archimedean edge weights.
//!
//! Exit codes: 0 ok, 2 spec error, 3 precision exhausted, 4 precondition
//! failed.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nacap_core::field::{format_rational, parse_rational, Rational};
use nacap_core::graph::spec_file::GraphSpec;
use nacap_core::{CoreError, ErrorClass};
use serde_json::{json, Value};

use commands::Command;
use report::{Audit, PrecisionAudit, RunReport};

#[derive(Debug, Parser)]
#[command(name = "nacap", version, about = "Capacity and potential theory over ordered non-Archimedean fields")]
struct Cli {
    /// Graph spec (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Truncation window, overriding the spec.
    #[arg(long, global = true)]
    window: Option<u32>,
    #[arg(long, global = true)]
    max_terms: Option<usize>,
    /// Fail with exit code 3 if any reported element is only known below
    /// this exponent.
    #[arg(long, global = true)]
    min_guarantee: Option<String>,
    #[arg(long, global = true, conflicts_with = "human")]
    json: bool,
    /// Aligned tables instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

enum Failure {
    Core(CoreError),
    Guarantee(Box<(Rational, Rational)>),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) => match e.class() {
                ErrorClass::Spec => 2,
                ErrorClass::PrecisionExhausted => 3,
                ErrorClass::Precondition => 4,
            },
            Failure::Guarantee(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Guarantee(bounds) => format!(
                "precision audit failed: an element is only known up to O(e^({})), threshold {}",
                format_rational(&bounds.0),
                format_rational(&bounds.1)
            ),
        }
    }
}

fn run(cli: &Cli) -> Result<RunReport, Failure> {
    let path = cli.spec.as_ref().ok_or_else(|| CoreError::Spec("--spec is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::Spec(format!("{}: {e}", path.display())))?;
    let echo: Value = serde_json::from_str(&text).map_err(|e| CoreError::Spec(e.to_string()))?;
    let spec = GraphSpec::from_json(&text)?;

    let mut cfg = spec.precision()?;
    if let Some(w) = cli.window {
        if w == 0 {
            return Err(CoreError::Spec("--window must be positive".into()).into());
        }
        cfg.window = Rational::from_integer(w.into());
    }
    if let Some(m) = cli.max_terms {
        if m == 0 {
            return Err(CoreError::Spec("--max-terms must be positive".into()).into());
        }
        cfg.max_terms = m;
    }
    let threshold = cli
        .min_guarantee
        .as_deref()
        .map(|t| parse_rational(t).map_err(|e| CoreError::Spec(format!("--min-guarantee: {e}"))))
        .transpose()?;

    let mut audit = Audit::default();
    let outputs = cfg.scope(|| commands::execute(&spec, &cli.command, &mut audit))?;
    if let (Some(min), Some(t)) = (audit.min_guarantee(), &threshold) {
        if min < t {
            return Err(Failure::Guarantee(Box::new((min.clone(), t.clone()))));
        }
    }
    let mut flags = serde_json::to_value(&cli.command).expect("flags serialize");
    if let Value::Object(m) = &mut flags {
        m.remove("command");
    }
    Ok(RunReport {
        command: cli.command.name().to_string(),
        inputs: json!({ "spec": echo, "flags": flags }),
        outputs,
        precision: PrecisionAudit::new(&cfg, &audit, threshold.as_ref()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.human {
                print!("{}", report.to_human());
            } else {
                println!("{}", report.to_json());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("nacap: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
