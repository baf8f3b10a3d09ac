use std::path::Path;

use l1logit::baselines::{self, EvaluationReport, Method, MethodConfig};
use l1logit::calibration::{self, TestRecord};
use l1logit::diagnostics::{self, AssumptionDiagnostics};
use l1logit::model::{self, Standardization};
use l1logit::simulation::{self, MethodSummary, ReplicationRecord, SimulationConfig};
use l1logit::{solver, Coefficients, Dataset, LambdaGrid, SolverOptions};
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::io;
use crate::report::{one_based, sparse, Entry, Manifest, Report};

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))?;
    }
    let out = cli.out.as_deref();
    let name = cli.command.name();
    match &cli.command {
        Command::FitPath(a) => fit_path(name, a, out, cli.compact),
        Command::Calibrate(a) => calibrate(name, a, out, cli.compact),
        Command::Simulate(a) => simulate(name, a, out, cli.compact),
        Command::Evaluate(a) => evaluate(name, a, out, cli.compact),
        Command::Diagnose(a) => diagnose(name, a, out, cli.compact),
    }
}

/// The data as fitted, plus the map back to the raw columns if standardized.
struct Loaded {
    data: Dataset,
    scaling: Option<Standardization>,
}

impl Loaded {
    fn open(args: &DataArgs) -> CliResult<Self> {
        let raw = io::read_dataset(&args.input)?;
        Ok(if args.standardize {
            let (data, scaling) = raw.standardized();
            Loaded {
                data,
                scaling: Some(scaling),
            }
        } else {
            Loaded {
                data: raw,
                scaling: None,
            }
        })
    }

    fn original(&self, coef: &Coefficients) -> Coefficients {
        match &self.scaling {
            Some(s) => s.to_original_scale(coef),
            None => coef.clone(),
        }
    }
}

fn grid(args: &GridArgs, data: &Dataset) -> CliResult<LambdaGrid> {
    Ok(simulation::grid_with(
        data.n(),
        data.p(),
        args.n_lambda,
        args.lambda_max,
        args.lambda_min_ratio,
    )?)
}

fn solver_options(args: &SolverArgs) -> SolverOptions {
    SolverOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        intercept: args.intercept,
    }
}

#[derive(Serialize)]
struct GridParams<'a> {
    #[serde(flatten)]
    data: &'a DataArgs,
    #[serde(flatten)]
    grid: &'a GridArgs,
    /// The top grid value actually used.
    lambda_max_resolved: f64,
    #[serde(flatten)]
    solver: &'a SolverArgs,
}

#[derive(Serialize)]
struct PointOut {
    lambda: f64,
    intercept: f64,
    beta: Vec<Entry>,
    nonzeros: usize,
    kkt_residual: f64,
    iterations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct FitPathBody {
    n: usize,
    p: usize,
    standardized: bool,
    /// Smallest tuning parameter with an all-zero estimate.
    lambda_zero_threshold: f64,
    all_converged: bool,
    points: Vec<PointOut>,
}

#[derive(Serialize)]
struct PathCsvRow {
    lambda: f64,
    index: usize,
    value: f64,
}

fn fit_path(
    name: &'static str,
    a: &FitPathArgs,
    out: Option<&Path>,
    compact: bool,
) -> CliResult<()> {
    let loaded = Loaded::open(&a.data)?;
    let data = &loaded.data;
    let grid = grid(&a.grid, data)?;
    let path = solver::fit_path(data, &grid, &solver_options(&a.solver))?;
    let points: Vec<PointOut> = path
        .points
        .iter()
        .map(|pt| {
            let coef = loaded.original(&pt.beta);
            PointOut {
                lambda: pt.lambda,
                intercept: coef.intercept,
                nonzeros: pt.beta.support().len(),
                beta: sparse(&coef),
                kkt_residual: pt.kkt_residual,
                iterations: pt.iterations,
                converged: pt.converged,
            }
        })
        .collect();
    if let Some(csv_path) = &a.path_csv {
        let rows: Vec<PathCsvRow> = points
            .iter()
            .flat_map(|pt| {
                pt.beta.iter().map(|e| PathCsvRow {
                    lambda: pt.lambda,
                    index: e.index,
                    value: e.value,
                })
            })
            .collect();
        io::write_csv(&rows, csv_path)?;
    }
    let params = GridParams {
        data: &a.data,
        grid: &a.grid,
        lambda_max_resolved: grid.max(),
        solver: &a.solver,
    };
    let body = FitPathBody {
        n: data.n(),
        p: data.p(),
        standardized: a.data.standardize,
        lambda_zero_threshold: solver::lambda_zero_threshold(data),
        all_converged: path.all_converged(),
        points,
    };
    let manifest = Manifest::new(name, params).input(&a.data.input).output(out);
    io::write_json(&Report::new(manifest, body), out, compact)
}

#[derive(Serialize)]
struct TraceOut {
    lambda_index: usize,
    lambda: f64,
    statistic: f64,
    passed: bool,
}

impl From<&TestRecord> for TraceOut {
    fn from(r: &TestRecord) -> Self {
        TraceOut {
            lambda_index: r.lambda_index + 1,
            lambda: r.lambda,
            statistic: r.statistic,
            passed: r.passed,
        }
    }
}

#[derive(Serialize)]
struct CalibrateBody {
    n: usize,
    p: usize,
    standardized: bool,
    grid_size: usize,
    points_fitted: usize,
    constant_c: f64,
    lambda_hat: f64,
    /// 1-based position in the ascending grid.
    lambda_index: usize,
    /// Coefficients at or above this magnitude (on the fitted scale) form
    /// the support.
    threshold: f64,
    support: Vec<usize>,
    intercept: f64,
    beta_hat: Vec<Entry>,
    test_trace: Vec<TraceOut>,
}

#[derive(Serialize)]
struct CalibrateParams<'a> {
    #[serde(flatten)]
    common: GridParams<'a>,
    constant_c: f64,
    full_path: bool,
}

fn calibrate(
    name: &'static str,
    a: &CalibrateArgs,
    out: Option<&Path>,
    compact: bool,
) -> CliResult<()> {
    let loaded = Loaded::open(&a.data)?;
    let data = &loaded.data;
    let grid = grid(&a.grid, data)?;
    let opts = solver_options(&a.solver);
    let res = if a.full_path {
        let path = solver::fit_path(data, &grid, &opts)?;
        calibration::result_from_path(&path, a.constant_c)?
    } else {
        calibration::calibrate(data, &grid, a.constant_c, &opts)?
    };
    let coef = loaded.original(&res.beta_hat);
    let body = CalibrateBody {
        n: data.n(),
        p: data.p(),
        standardized: a.data.standardize,
        grid_size: grid.len(),
        points_fitted: res.points_fitted,
        constant_c: res.constant_c,
        lambda_hat: res.lambda_hat,
        lambda_index: res.lambda_index + 1,
        threshold: 3.0 * res.constant_c * res.lambda_hat,
        support: one_based(&res.support_hat),
        intercept: coef.intercept,
        beta_hat: sparse(&coef),
        test_trace: res.test_trace.iter().map(TraceOut::from).collect(),
    };
    let params = CalibrateParams {
        common: GridParams {
            data: &a.data,
            grid: &a.grid,
            lambda_max_resolved: grid.max(),
            solver: &a.solver,
        },
        constant_c: a.constant_c,
        full_path: a.full_path,
    };
    let manifest = Manifest::new(name, params).input(&a.data.input).output(out);
    io::write_json(&Report::new(manifest, body), out, compact)
}

fn resolve_simulation(a: &SimulateArgs) -> SimulationConfig {
    let mut cfg = SimulationConfig::default();
    match a.preset {
        Some(Preset::Fig1Desk) => {
            cfg.n_reps = 50;
        }
        Some(Preset::Fig2Desk) => {
            cfg.p = 2000;
            cfg.n_reps = 10;
            cfg.methods = vec![Method::Testing, Method::Bic, Method::Cv];
            cfg.timing_mode = true;
        }
        None => {}
    }
    cfg.n = a.n.unwrap_or(cfg.n);
    cfg.p = a.p.unwrap_or(cfg.p);
    cfg.kappa = a.kappa.unwrap_or(cfg.kappa);
    cfg.s = a.s.unwrap_or(cfg.s);
    cfg.n_reps = a.reps.unwrap_or(cfg.n_reps);
    cfg.n_lambda = a.n_lambda.unwrap_or(cfg.n_lambda);
    if !a.methods.is_empty() {
        cfg.methods = dedup(&a.methods);
    }
    cfg.seed = a.seed;
    cfg.folds = a.folds;
    cfg.constant_c = a.constant_c;
    cfg.lambda_max = a.lambda_max;
    cfg.lambda_min_ratio = a.lambda_min_ratio;
    cfg.timing_mode |= a.timing_mode;
    cfg.solver = solver_options(&a.solver);
    cfg
}

fn dedup(methods: &[Method]) -> Vec<Method> {
    let mut seen = Vec::new();
    for &m in methods {
        if !seen.contains(&m) {
            seen.push(m);
        }
    }
    seen
}

#[derive(Serialize)]
struct SimulateParams<'a> {
    preset: Option<Preset>,
    #[serde(flatten)]
    config: &'a SimulationConfig,
    lambda_max_resolved: f64,
}

#[derive(Serialize)]
struct SimulateBody {
    methods: Vec<MethodSummary>,
    records: Vec<ReplicationRecord>,
}

#[derive(Serialize)]
struct TraceRow {
    rep: usize,
    method: Method,
    lambda: Option<f64>,
    hamming: Option<usize>,
    seconds: Option<f64>,
}

fn simulate(
    name: &'static str,
    a: &SimulateArgs,
    out: Option<&Path>,
    compact: bool,
) -> CliResult<()> {
    let cfg = resolve_simulation(a);
    cfg.validate()?;
    let grid = cfg.grid()?;
    let summary = simulation::run_experiment(&cfg)?;
    if let Some(path) = &a.trace_csv {
        let rows: Vec<TraceRow> = summary
            .records
            .iter()
            .map(|r| TraceRow {
                rep: r.rep,
                method: r.method,
                lambda: r.lambda,
                hamming: r.hamming,
                seconds: r.seconds,
            })
            .collect();
        io::write_csv(&rows, path)?;
    }
    let params = SimulateParams {
        preset: a.preset,
        config: &cfg,
        lambda_max_resolved: grid.max(),
    };
    let manifest = Manifest::new(name, params).seed(cfg.seed).output(out);
    let body = SimulateBody {
        methods: summary.methods,
        records: summary.records,
    };
    io::write_json(&Report::new(manifest, body), out, compact)
}

#[derive(Serialize)]
struct EvaluateParams<'a> {
    #[serde(flatten)]
    common: GridParams<'a>,
    methods: &'a [Method],
    constant_c: f64,
    folds: usize,
    seed: u64,
    refit: bool,
}

#[derive(Serialize)]
struct EvaluateBody {
    n: usize,
    p: usize,
    standardized: bool,
    methods: Vec<EvaluationReport>,
}

fn evaluate(
    name: &'static str,
    a: &EvaluateArgs,
    out: Option<&Path>,
    compact: bool,
) -> CliResult<()> {
    let loaded = Loaded::open(&a.data)?;
    let data = &loaded.data;
    let grid = grid(&a.grid, data)?;
    let methods = if a.methods.is_empty() {
        Method::ALL.to_vec()
    } else {
        dedup(&a.methods)
    };
    let cfg = MethodConfig {
        constant_c: a.constant_c,
        folds: a.folds,
        seed: a.seed,
        solver: solver_options(&a.solver),
        ..MethodConfig::default()
    };
    if methods.contains(&Method::Cv) && (a.folds < 2 || a.folds >= data.n()) {
        return Err(CliError::Usage(format!(
            "--folds must lie in [2, n - 1] for leave-one-out runs, got {} with n = {}",
            a.folds,
            data.n()
        )));
    }
    let reports = methods
        .iter()
        .map(|&m| baselines::loocv_evaluate(data, &grid, m, !a.no_refit, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let params = EvaluateParams {
        common: GridParams {
            data: &a.data,
            grid: &a.grid,
            lambda_max_resolved: grid.max(),
            solver: &a.solver,
        },
        methods: &methods,
        constant_c: a.constant_c,
        folds: a.folds,
        seed: a.seed,
        refit: !a.no_refit,
    };
    let manifest = Manifest::new(name, params)
        .seed(a.seed)
        .input(&a.data.input)
        .output(out);
    let body = EvaluateBody {
        n: data.n(),
        p: data.p(),
        standardized: a.data.standardize,
        methods: reports,
    };
    io::write_json(&Report::new(manifest, body), out, compact)
}

#[derive(Serialize)]
struct DiagnoseParams {
    lambda: Option<f64>,
}

#[derive(Serialize)]
struct DiagnoseBody {
    n: usize,
    p: usize,
    /// Nonzero entries of the truth.
    support: Vec<usize>,
    diagnostics: AssumptionDiagnostics,
    /// Where the noise event is evaluated: `--lambda`, else `lambda_cap`.
    lambda: Option<f64>,
    noise_statistic: Option<f64>,
    event_holds: Option<bool>,
    /// Sup-norm error bound at `lambda`, when the design assumptions hold.
    error_bound: Option<f64>,
    notes: Vec<String>,
}

fn diagnose(
    name: &'static str,
    a: &DiagnoseArgs,
    out: Option<&Path>,
    compact: bool,
) -> CliResult<()> {
    let Some(truth_path) = &a.truth else {
        return Err(CliError::Usage(
            "diagnose needs the true coefficients: pass --truth FILE".into(),
        ));
    };
    if let Some(l) = a.lambda {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CliError::Usage(format!(
                "--lambda must be positive, got {l}"
            )));
        }
    }
    let data = io::read_dataset(&a.input)?;
    let truth = Coefficients::new(io::read_truth(truth_path, data.p())?);
    let support = truth.support();
    let diag = diagnostics::assumption_quantities(data.x(), &truth, &support)?;
    let eps = model::residuals(&data, &truth)?;

    let mut notes = Vec::new();
    let lambda = a.lambda.or(diag.lambda_cap);
    let gamma = diag.gamma.filter(|g| *g > 0.0 && *g <= 1.0);
    let (noise, event) = match (gamma, lambda) {
        (Some(g), Some(l)) => (
            Some(diagnostics::noise_statistic(data.x(), &eps, g)),
            Some(diagnostics::event_holds(data.x(), &eps, g, l)?),
        ),
        (Some(g), None) => {
            notes.push("no tuning parameter to evaluate the noise event at".into());
            (Some(diagnostics::noise_statistic(data.x(), &eps, g)), None)
        }
        (None, _) => {
            notes.push("gamma outside (0, 1]: the noise event is undefined".into());
            (None, None)
        }
    };
    let bound = match lambda.map(|l| diagnostics::sup_error_bound(&diag, l)) {
        Some(Ok(b)) => Some(b),
        Some(Err(e)) => {
            notes.push(e.to_string());
            None
        }
        None => None,
    };
    let manifest = Manifest::new(name, DiagnoseParams { lambda: a.lambda })
        .input(&a.input)
        .truth(truth_path)
        .output(out);
    let body = DiagnoseBody {
        n: data.n(),
        p: data.p(),
        support: one_based(&support),
        diagnostics: diag,
        lambda,
        noise_statistic: noise,
        event_holds: event,
        error_bound: bound,
        notes,
    };
    io::write_json(&Report::new(manifest, body), out, compact)
}
