//! `gue`: command-line front end for the finite-N GUE library.
//!
//! Exit codes: 0 success, 1 numeric failure, 2 usage error. `GUE_THREADS`
//! sets the worker count of the sampling pool.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod function;
mod output;

use clap::{Args, Parser, Subcommand};
use function::FunctionSpec;
use num_complex::Complex64;
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "gue", version, about = "Finite-N GUE density, Laplace transforms and the 1/N expansion")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mean eigenvalue density p_N on a uniform grid.
    Density(DensityArgs),
    /// Closed-form Laplace transform of the kernel or the density.
    Laplace(LaplaceArgs),
    /// α-sequence and partial sums of the 1/N² expansion of ∫f p_N.
    Resum(ResumArgs),
    /// Polynomial moments by quadrature and by the finite α-series.
    Moments(MomentsArgs),
    /// Unsigned Stirling numbers of the first kind.
    Stirling(StirlingArgs),
    /// Sample GUE spectra and write a batch file.
    Sample(SampleArgs),
    /// Run named property suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub points: usize,
    /// Also print p', p'' and p'''.
    #[arg(long)]
    pub derivs: bool,
}

#[derive(Args, Debug)]
pub struct LaplaceArgs {
    #[arg(long)]
    pub n: u32,
    /// Transform variable as RE or RE,IM.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub s: Complex64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0, conflicts_with = "density")]
    pub lambda_minus: f64,
    /// Transform of the density (kernel transform divided by N at λ₋ = 0).
    #[arg(long)]
    pub density: bool,
    /// Also integrate numerically and report the relative error.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct ResumArgs {
    #[arg(long)]
    pub n: u32,
    /// monomial:P, exp:A, gauss:SIGMA (e^{σt²}), cos:A or taylor-file:PATH.
    #[arg(long, allow_hyphen_values = true)]
    pub function: FunctionSpec,
    /// Highest α index M.
    #[arg(long)]
    pub terms: usize,
    /// Type used for the growth check and the certified truncation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Compare partial sums with a quadrature value of ∫f p_N.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub max: usize,
}

#[derive(Args, Debug)]
pub struct StirlingArgs {
    #[arg(long)]
    pub max_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BatchFormat {
    Csv,
    Binary,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub batch_format: BatchFormat,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite to run; all suites when omitted.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(gue_core::verify::SUITES))]
    pub suite: Option<String>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |v: &str| -> Result<f64, String> {
        let x: f64 = v.trim().parse().map_err(|_| format!("not a number: {v:?}"))?;
        x.is_finite().then_some(x).ok_or_else(|| format!("not finite: {v:?}"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE or RE,IM, got {s:?}")),
    }
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<gue_core::Error> for Failure {
    fn from(e: gue_core::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("i/o error: {e}"))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("GUE_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("GUE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Numeric(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(&cli));
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            use clap::CommandFactory;
            eprintln!("error: {msg}\n");
            let mut cmd = Cli::command();
            cmd.build();
            let name = commands::name(&cli.command);
            let usage = cmd
                .find_subcommand_mut(name)
                .map(|c| c.render_usage())
                .unwrap_or_else(|| cmd.render_usage());
            eprintln!("{usage}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
