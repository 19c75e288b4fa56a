//! `pvsym`: command-line front end to the symmetry workbench.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::{load_config, Config};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "pvsym", version, about = "Symmetry analysis of the barotropic potential vorticity equation")]
pub struct Cli {
    /// Config file, `key = value` lines or a JSON object.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Inverse squared deformation radius.
    #[arg(long = "F", global = true, allow_negative_numbers = true)]
    f: Option<f64>,
    /// Planetary vorticity gradient.
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override for pass/fail decisions.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file for reports, output directory for `simulate`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lie bracket of two algebra elements.
    Bracket {
        #[arg(allow_hyphen_values = true)]
        v1: String,
        #[arg(allow_hyphen_values = true)]
        v2: String,
    },
    /// Adjoint action Ad(exp(eps v)) w by series, ODE and matrix exponential.
    Adjoint {
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[arg(allow_hyphen_values = true)]
        w: String,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = 40)]
        order: usize,
    },
    /// Canonical form of a one- or two-dimensional subalgebra.
    Classify {
        #[arg(long)]
        dim: usize,
        #[arg(allow_hyphen_values = true)]
        elements: Vec<String>,
    },
    /// Invariant ansatz and reduced equation for a one-dimensional class.
    Reduce {
        #[arg(long)]
        case: u8,
        /// Numeric a; without a and c the catalogue form is printed.
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        /// The ± of case 3.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i8,
    },
    /// Run a verification suite (`all` runs every suite).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Pseudo-spectral integration driven by the config file.
    Simulate,
    /// Map a solution by a symmetry flow or by the beta-eliminating transformation.
    Transform {
        /// Stream function in t, x, y.
        #[arg(long)]
        psi: String,
        /// Generator spec; without it the beta transformation is applied.
        #[arg(long)]
        generator: Option<String>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
        /// Map a beta-plane solution back to beta = 0 instead.
        #[arg(long)]
        inverse: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bracket { .. } => "bracket",
            Command::Adjoint { .. } => "adjoint",
            Command::Classify { .. } => "classify",
            Command::Reduce { .. } => "reduce",
            Command::Verify { .. } => "verify",
            Command::Simulate => "simulate",
            Command::Transform { .. } => "transform",
        }
    }
}

/// Result of one command: a JSON body and whether every check passed.
pub struct Outcome {
    pub body: Value,
    pub ok: bool,
}

fn resolve_config(cli: &Cli) -> anyhow::Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => Config::default(),
    };
    if let Some(f) = cli.f {
        cfg.f = f;
    }
    if let Some(b) = cli.beta {
        cfg.beta = b;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn envelope(command: &str, ok: bool, body: Value) -> Value {
    let mut out = json!({ "schema_version": SCHEMA_VERSION, "command": command, "ok": ok });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let result = resolve_config(&cli).and_then(|cfg| commands::dispatch(&cli.command, &cfg).map(|o| (o, cfg)));
    match result {
        Ok((outcome, cfg)) => {
            let report = envelope(name, outcome.ok, outcome.body);
            let text = serde_json::to_string_pretty(&report).expect("JSON values serialize");
            emit(&text);
            if let (Some(path), false) = (&cfg.out, matches!(cli.command, Command::Simulate)) {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::FAILURE;
                }
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            let report = envelope(name, false, json!({ "error": format!("{e:#}") }));
            emit(&serde_json::to_string_pretty(&report).expect("JSON values serialize"));
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
