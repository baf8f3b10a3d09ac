use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l1logit::baselines::Method;
use l1logit::calibration::DEFAULT_C;
use l1logit::simulation::DEFAULT_LAMBDA_MIN_RATIO;
use l1logit::solver::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "l1logit",
    version,
    about = "Sparse logistic regression with testing-based tuning parameter calibration"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: one per core).
    /// Results do not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the JSON report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Emit the JSON report on a single line.
    #[arg(long, global = true)]
    pub compact: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the whole regularization path.
    FitPath(FitPathArgs),
    /// Select the tuning parameter by pairwise tests along the path.
    Calibrate(CalibrateArgs),
    /// Run the simulation study on synthetic instances.
    Simulate(SimulateArgs),
    /// Leave-one-out evaluation of selection methods on a data set.
    Evaluate(EvaluateArgs),
    /// Design conditions and noise event for a data set with known truth.
    Diagnose(DiagnoseArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FitPath(_) => "fit-path",
            Command::Calibrate(_) => "calibrate",
            Command::Simulate(_) => "simulate",
            Command::Evaluate(_) => "evaluate",
            Command::Diagnose(_) => "diagnose",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// CSV file: first column the 0/1 response, then one column per
    /// predictor. A header row is optional.
    pub input: PathBuf,

    /// Center and scale predictors before fitting; coefficients are reported
    /// on the original scale.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Largest tuning parameter (default: 10 log(p) / n).
    #[arg(long)]
    pub lambda_max: Option<f64>,

    #[arg(long, default_value_t = DEFAULT_LAMBDA_MIN_RATIO)]
    pub lambda_min_ratio: f64,

    #[arg(long, default_value_t = 500)]
    pub n_lambda: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// KKT residual at which a fit counts as converged.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Coordinate sweeps allowed per tuning parameter.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    /// Fit an unpenalized intercept.
    #[arg(long)]
    pub intercept: bool,
}

#[derive(Debug, Args)]
pub struct FitPathArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    /// Also write nonzero coefficients as `lambda,index,value` rows.
    #[arg(long)]
    pub path_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, default_value_t = DEFAULT_C)]
    pub constant_c: f64,

    /// Fit every grid value first instead of stopping at the first rejected
    /// test. The selection is the same.
    #[arg(long)]
    pub full_path: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// n=200, p=200, kappa=0.5, s=5, 50 replications, all methods.
    Fig1Desk,
    /// n=200, p=2000, kappa=0.5, s=5, 10 replications of testing, BIC and
    /// CV in timing mode.
    Fig2Desk,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Start from a named configuration; explicit flags still win.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,

    /// Comma-separated subset of testing, bic, cv, aic.
    #[arg(long = "method", alias = "methods", value_delimiter = ',', value_parser = parse_method)]
    pub methods: Vec<Method>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    #[arg(long, default_value_t = DEFAULT_C)]
    pub constant_c: f64,

    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_MIN_RATIO)]
    pub lambda_min_ratio: f64,
    #[arg(long)]
    pub n_lambda: Option<usize>,

    /// Run replications one after another and record wall-clock times.
    #[arg(long)]
    pub timing_mode: bool,

    /// Also write one CSV row per replication and method.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,

    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    /// Comma-separated subset of testing, bic, cv, aic (default: all).
    #[arg(long = "method", alias = "methods", value_delimiter = ',', value_parser = parse_method)]
    pub methods: Vec<Method>,

    #[arg(long, default_value_t = DEFAULT_C)]
    pub constant_c: f64,

    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Skip the unpenalized refit on the selected support.
    #[arg(long)]
    pub no_refit: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// CSV file laid out as for the other commands.
    pub input: PathBuf,

    /// True coefficients, one value per predictor (a single CSV column or
    /// row, header optional). Required.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// Tuning parameter at which the noise event and the error bound are
    /// evaluated (default: the largest value the theory covers).
    #[arg(long)]
    pub lambda: Option<f64>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}
