//! `ebpois`: predictive pmf tables, risk curves, figure data and the
//! numerical verification suite for Poisson predictive densities.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification failure.

mod config;
mod figures;
mod output;
mod predict;
mod risk_curve;
mod svg;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ebpois::{ModelConfig, QuadraturePolicy, SeriesPolicy};

use config::ConfigFile;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Verification(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ebpois::Error> for CliError {
    fn from(e: ebpois::Error) -> Self {
        match e {
            ebpois::Error::Domain(_) | ebpois::Error::Contract(_) | ebpois::Error::UndefinedEstimator(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Parser)]
#[command(name = "ebpois", version, about = "Predictive densities for Poisson counts under Kullback-Leibler loss")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Past observation time r (default 1)
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Future observation time s (default 1)
    #[arg(long, global = true)]
    s: Option<f64>,
    /// Dimension d
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Worker threads for parallel sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Absolute tolerance for truncated Poisson series (default 1e-12)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Absolute tolerance for adaptive quadrature (default 1e-9)
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Seed for sampled verification grids (default 42)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for CSV, SVG and report files (default ".")
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Output format for printed results
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Flat key=value file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the predictive pmf of future counts y given past counts x
    Predict(predict::PredictArgs),
    /// Risk reduction relative to the Jeffreys predictive along a μ grid
    RiskCurve(risk_curve::RiskCurveArgs),
    /// Write the standard risk-difference and f(λ) plots with their data
    Figures(figures::FiguresArgs),
    /// Run the numerical verification suite
    Verify(verify::VerifyArgs),
}

/// Global settings after merging flags, the config file and defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub r: f64,
    pub s: f64,
    pub d: Option<usize>,
    pub policy: SeriesPolicy,
    pub quad: QuadraturePolicy,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: Option<Format>,
    pub file: ConfigFile,
}

impl Settings {
    fn resolve(g: GlobalArgs) -> Result<(Self, Option<usize>), CliError> {
        let file = match &g.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let tol = file.pick(g.tol, "tol")?.unwrap_or(1e-12);
        let quad_tol = file.pick(g.quad_tol, "quad-tol")?.unwrap_or(1e-9);
        let policy = SeriesPolicy::default().with_tol(tol);
        policy.validate()?;
        let quad = QuadraturePolicy::default().with_tol(quad_tol);
        quad.validate()?;
        let settings = Settings {
            r: file.pick(g.r, "r")?.unwrap_or(1.0),
            s: file.pick(g.s, "s")?.unwrap_or(1.0),
            d: file.pick(g.d, "d")?,
            policy,
            quad,
            seed: file.pick(g.seed, "seed")?.unwrap_or(42),
            out_dir: file.pick(g.out_dir, "out-dir")?.unwrap_or_else(|| PathBuf::from(".")),
            format: file.pick(g.format, "format")?,
            file,
        };
        let threads = settings.file.pick(g.threads, "threads")?;
        Ok((settings, threads))
    }

    /// Model configuration with dimension `d`, validated.
    pub fn model(&self, d: usize) -> Result<ModelConfig, CliError> {
        Ok(ModelConfig::new(d, self.r, self.s)?)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (settings, threads) = Settings::resolve(cli.global)?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))?;
    }
    match cli.command {
        Command::Predict(a) => predict::run(a, &settings),
        Command::RiskCurve(a) => risk_curve::run(a, &settings),
        Command::Figures(a) => figures::run(a, &settings),
        Command::Verify(a) => verify::run(a, &settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
