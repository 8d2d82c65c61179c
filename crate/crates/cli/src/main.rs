//! `biham`: reproducible reports for alternative Hermitian structures.
//!
//! Exit codes: 0 success, 1 failed computation or failed check, 2 malformed
//! flags or input.

mod commands;
mod drive;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use biham_core::hermpair::Tolerances;
use clap::{Args, Parser, Subcommand};

use commands::{DeformArgs, DeformTolerances, Field, Format, GenericArgs, QdynArgs};
use io::CliResult;

#[derive(Parser)]
#[command(name = "biham", version, about = "Alternative Hermitian structures: reports and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Seed {
    /// Seed for every randomized trial.
    #[arg(long, env = "BIHAM_SEED", default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct Output {
    /// Report destination; standard output when omitted or `-`.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Connecting operator, genericity predicates and bi-unitary group of a pair of forms.
    GenericReport {
        /// JSON object {"field", "h1", "h2"}: inline, a path, or `-`.
        #[arg(long, conflicts_with_all = ["h1", "h2"])]
        input: Option<String>,
        /// Gram matrix of the first form (matrix JSON, inline or a path).
        #[arg(long, requires = "h2")]
        h1: Option<String>,
        #[arg(long, requires = "h1")]
        h2: Option<String>,
        #[arg(long, value_enum, default_value = "complex")]
        field: Field,
        #[arg(long, default_value_t = 1e-10)]
        hermitian_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        cluster_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        rank_tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        null_tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Laws of the product A K B, the subalgebras S and S_K, derivations and adjoints.
    Deform {
        #[arg(long)]
        k: String,
        /// Connecting operator for the adjoint checks.
        #[arg(long)]
        g: Option<String>,
        /// Hamiltonian for the derivation check.
        #[arg(long)]
        h: Option<String>,
        #[arg(long, value_enum, default_value = "complex")]
        field: Field,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        null_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        span_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        derivation_threshold: f64,
        #[arg(long, default_value_t = biham_core::defalg::MAX_CONDITION)]
        max_condition: f64,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        out: Output,
    },
    /// Invariance, chart and bracket defects of the lambda-deformed oscillator structures.
    GeometryDemo {
        #[arg(long, default_value_t = 0.3)]
        lambda: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Sample points are uniform in [-radius, radius] per coordinate.
        #[arg(long, default_value_t = 1.5)]
        radius: f64,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        out: Output,
    },
    /// Samples the Darboux function f for a density F.
    Darboux {
        /// `identity`, `lambda:<x>` or polynomial coefficients `c0,c1,...`.
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        #[arg(long, default_value_t = 4.0)]
        s_max: f64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        residual_step: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Integrates the quaternionic two-level system; CSV trajectory plus JSON summary.
    QdynSim {
        /// Detuning: expression in t, `@file.json` or an inline JSON drive table.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        omega: String,
        /// Real part of the coupling (expression in t); default 1.
        #[arg(long = "Omega0", allow_hyphen_values = true)]
        omega0: Option<String>,
        /// Imaginary part of the coupling (expression in t); default 0.
        #[arg(long = "Omega1", allow_hyphen_values = true)]
        omega1: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// `re,im`.
        #[arg(long, default_value = "0,0.5", allow_hyphen_values = true, value_parser = parse_complex)]
        z: (f64, f64),
        #[arg(long = "T", default_value_t = std::f64::consts::TAU)]
        total: f64,
        #[arg(long, default_value_t = biham_core::qdyn::DEFAULT_DT)]
        dt: f64,
        /// Keep every n-th step in the CSV (the last step is always kept).
        #[arg(long, default_value_t = 1)]
        every: usize,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Summary destination; standard error when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Runs the acceptance criteria; exits 1 if any fails.
    PaperCheck {
        #[command(flatten)]
        seed: Seed,
        /// Full JSON report instead of one line per criterion.
        #[arg(long)]
        json: bool,
        /// Restrict to these criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
}

fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [re, im] = parts.as_slice() else {
        return Err(format!("expected re,im, got '{s}'"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    Ok((num(re)?, num(im)?))
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::GenericReport { input, h1, h2, field, hermitian_tol, cluster_tol, rank_tol, null_tol, out } => {
            let tolerances = Tolerances { hermitian: hermitian_tol, cluster: cluster_tol, rank: rank_tol, null: null_tol };
            let args = GenericArgs { input: input.as_deref(), h1: h1.as_deref(), h2: h2.as_deref(), field, tolerances };
            commands::generic_report(args, out.output.as_deref())?;
        }
        Command::Deform { k, g, h, field, trials, null_tol, span_tol, derivation_threshold, max_condition, seed, out } => {
            let tolerances = DeformTolerances { null: null_tol, span: span_tol, derivation: derivation_threshold, max_condition };
            let args = DeformArgs { k: &k, g: g.as_deref(), h: h.as_deref(), field, trials, seed: seed.seed, tolerances };
            commands::deform(args, out.output.as_deref())?;
        }
        Command::GeometryDemo { lambda, points, radius, seed, out } => {
            commands::geometry_demo(lambda, points, seed.seed, radius, out.output.as_deref())?;
        }
        Command::Darboux { family, s_max, samples, residual_step, format, out } => {
            commands::darboux(&family, s_max, samples, residual_step, format, out.output.as_deref())?;
        }
        Command::QdynSim { omega, omega0, omega1, a, z, total, dt, every, csv, summary } => {
            let args = QdynArgs { omega: &omega, omega0: omega0.as_deref(), omega1: omega1.as_deref(), a, z, total, dt, every };
            commands::qdyn_sim(args, csv.as_deref(), summary.as_deref())?;
        }
        Command::PaperCheck { seed, json, only, out } => {
            return commands::paper_check(seed.seed, &only, json, out.output.as_deref());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("biham: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
