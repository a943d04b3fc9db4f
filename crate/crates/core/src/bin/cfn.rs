//! Command-line interface: dataset generation, training, prediction,
//! cross-validation, and the benchmark runner.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cfn_core::cfn::EmptyCellRule;
use cfn_core::harness::{
    build_chain, cross_validate, parse_methods, rmse, CfnWidth, ChosenParams, CvPlan,
};
use cfn_core::{
    generate, run_benchmark, BenchSpec, CfnModel, DatasetSpec, Method, ModelMetadata, SampleSet,
    Sigmoid, TargetFn, TrainedModel,
};

#[derive(Parser)]
#[command(name = "cfn", version, about = "Constructive network regression toolkit")]
struct Cli {
    /// Optional TOML config file; a table per subcommand supplies flag
    /// defaults, explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic train/test pair as CSV.
    GenData(GenDataArgs),
    /// Train one model with fixed parameters and save it as JSON.
    Train(TrainArgs),
    /// Load a model and predict a data file.
    Predict(PredictArgs),
    /// Cross-validate one method and print the selected parameters.
    Cv(CvArgs),
    /// Run a multi-trial benchmark and write CSV/JSON reports.
    Benchmark(BenchmarkArgs),
}

#[derive(Args, Clone)]
struct GenDataArgs {
    /// Target function: f1..f5.
    #[arg(long = "fn")]
    target: Option<TargetFn>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m_train: Option<usize>,
    #[arg(long)]
    m_test: Option<usize>,
    /// Gaussian train-noise variance.
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_train: Option<PathBuf>,
    #[arg(long)]
    out_test: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct TrainArgs {
    /// Training data CSV (header x1,..,xd,y).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    /// Center count (cfn) or hidden-unit count (elm).
    #[arg(long)]
    n: Option<usize>,
    /// Iteration order (cfn only).
    #[arg(long)]
    r: Option<usize>,
    /// Width: `auto`, a positive number, or `gap:ALPHA`.
    #[arg(long)]
    w: Option<String>,
    /// logistic | tanh | arctan | gompertz[:a,b]
    #[arg(long)]
    activation: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output model path (JSON).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Empty-cell handling for cfn: zero | carry.
    #[arg(long)]
    empty_cell: Option<String>,
    /// Kernel width (krr only).
    #[arg(long)]
    gamma: Option<f64>,
    /// Ridge parameter (krr only).
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args, Clone)]
struct PredictArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CvArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    folds: Option<usize>,
    /// Comma-separated center counts (cfn).
    #[arg(long)]
    n_grid: Option<String>,
    /// Comma-separated iteration orders (cfn).
    #[arg(long)]
    r_grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Optional JSON output with the full CV table.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct BenchmarkArgs {
    #[arg(long = "fn")]
    target: Option<TargetFn>,
    #[arg(long)]
    d: Option<usize>,
    /// Training set size.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    m_test: Option<usize>,
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated method list, e.g. cfn,elm,krr.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report CSV path; `<stem>.times.csv` and `<stem>.json` are written
    /// next to it.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    r_grid: Option<String>,
    /// Width policy for cfn: auto | NUMBER | gap:ALPHA.
    #[arg(long)]
    w: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let result = match cli.command {
        Command::GenData(a) => cmd_gen_data(a, &config),
        Command::Train(a) => cmd_train(a, &config),
        Command::Predict(a) => cmd_predict(a, &config),
        Command::Cv(a) => cmd_cv(a, &config),
        Command::Benchmark(a) => cmd_benchmark(a, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type Dyn<T> = Result<T, Box<dyn std::error::Error>>;

fn load_config(path: Option<&Path>) -> Dyn<toml::Table> {
    match path {
        None => Ok(toml::Table::new()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            Ok(text.parse::<toml::Table>()?)
        }
    }
}

/// Flag value, else config `[section] key`, else default (when given).
fn resolve<T: Clone + std::str::FromStr>(
    flag: Option<T>,
    config: &toml::Table,
    section: &str,
    key: &str,
    default: Option<T>,
) -> Dyn<T>
where
    <T as std::str::FromStr>::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = config.get(section).and_then(|s| s.get(key)) {
        let text = match v {
            toml::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        return text
            .parse::<T>()
            .map_err(|e| format!("config {section}.{key} = {text:?}: {e}").into());
    }
    match default {
        Some(v) => Ok(v),
        None => Err(format!("missing --{} (or config {section}.{key})", key.replace('_', "-")).into()),
    }
}

fn parse_usize_list(s: &str) -> Dyn<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad list entry {t:?}: {e}").into()))
        .collect()
}

fn cmd_gen_data(a: GenDataArgs, cfg: &toml::Table) -> Dyn<()> {
    let sec = "gen-data";
    let target: TargetFn = resolve(a.target, cfg, sec, "fn", None)?;
    let d = resolve(a.d, cfg, sec, "d", Some(1))?;
    let m_train = resolve(a.m_train, cfg, sec, "m_train", None)?;
    let m_test = resolve(a.m_test, cfg, sec, "m_test", None)?;
    let noise_var = resolve(a.noise_var, cfg, sec, "noise_var", Some(0.1))?;
    let seed = resolve(a.seed, cfg, sec, "seed", Some(0))?;
    let out_train: PathBuf = resolve(a.out_train, cfg, sec, "out_train", None)?;
    let out_test: PathBuf = resolve(a.out_test, cfg, sec, "out_test", None)?;

    let spec = DatasetSpec::new(target, d, m_train, m_test)
        .with_noise(noise_var)
        .with_seed(seed);
    let (train, test) = generate(&spec)?;
    fs::write(&out_train, train.to_csv())?;
    fs::write(&out_test, test.to_csv())?;
    println!(
        "wrote {} train rows to {} and {} test rows to {}",
        train.m(),
        out_train.display(),
        test.m(),
        out_test.display()
    );
    Ok(())
}

fn parse_empty_cell(s: &str) -> Dyn<EmptyCellRule> {
    match s {
        "zero" => Ok(EmptyCellRule::ZeroMean),
        "carry" => Ok(EmptyCellRule::CarryForward),
        other => Err(format!("empty-cell must be zero or carry, got {other}").into()),
    }
}

fn cmd_train(a: TrainArgs, cfg: &toml::Table) -> Dyn<()> {
    let sec = "train";
    let data: PathBuf = resolve(a.data, cfg, sec, "data", None)?;
    let method: Method = resolve(a.method, cfg, sec, "method", None)?;
    let seed = resolve(a.seed, cfg, sec, "seed", Some(0))?;
    let model_path: PathBuf = resolve(a.model, cfg, sec, "model", None)?;
    let activation: Sigmoid =
        resolve(a.activation, cfg, sec, "activation", Some("logistic".to_string()))?.parse()?;

    let samples = SampleSet::from_csv(&fs::read_to_string(&data)?)?;
    let model = match method {
        Method::Cfn => {
            let n = resolve(a.n, cfg, sec, "n", None)?;
            let r = resolve(a.r, cfg, sec, "r", Some(1))?;
            let width: CfnWidth =
                resolve(a.w, cfg, sec, "w", Some("auto".to_string()))?.parse()?;
            let rule = parse_empty_cell(&resolve(
                a.empty_cell,
                cfg,
                sec,
                "empty_cell",
                Some("zero".to_string()),
            )?)?;
            let chain = build_chain(&samples, n)?;
            let w = width.resolve(&chain, activation)?;
            TrainedModel::Cfn(CfnModel::train(chain, activation, w, r, &samples, rule)?)
        }
        Method::Elm => {
            let n = resolve(a.n, cfg, sec, "n", None)?;
            TrainedModel::Elm(cfn_core::elm_train(&samples, n, activation, seed)?)
        }
        Method::Krr => {
            let gamma = resolve(a.gamma, cfg, sec, "gamma", None)?;
            let lambda = resolve(a.lambda, cfg, sec, "lambda", None)?;
            TrainedModel::Krr(cfn_core::krr_train(&samples, gamma, lambda)?)
        }
    };
    let train_rmse = rmse(&model.predict_samples(&samples), samples.outputs())?;
    let meta = ModelMetadata { seed: Some(seed), train_rmse: Some(train_rmse) };
    fs::write(&model_path, model.to_json(&meta)?)?;
    println!("trained {} model, train rmse {train_rmse:.6}, saved to {}", model.family(), model_path.display());
    Ok(())
}

fn cmd_predict(a: PredictArgs, cfg: &toml::Table) -> Dyn<()> {
    let sec = "predict";
    let model_path: PathBuf = resolve(a.model, cfg, sec, "model", None)?;
    let data: PathBuf = resolve(a.data, cfg, sec, "data", None)?;
    let out: PathBuf = resolve(a.out, cfg, sec, "out", None)?;

    let (model, _meta) = TrainedModel::from_json(&fs::read_to_string(&model_path)?)?;
    let samples = SampleSet::from_csv(&fs::read_to_string(&data)?)?;
    if samples.d() != model.d() {
        return Err(format!(
            "model dimension {} does not match data dimension {}",
            model.d(),
            samples.d()
        )
        .into());
    }
    let pred = model.predict_samples(&samples);
    let mut text = String::from("prediction\n");
    for p in &pred {
        text.push_str(&format!("{p:.16e}\n"));
    }
    fs::write(&out, text)?;
    let r = rmse(&pred, samples.outputs())?;
    println!("wrote {} predictions to {} (rmse against data file: {r:.6})", pred.len(), out.display());
    Ok(())
}

fn cmd_cv(a: CvArgs, cfg: &toml::Table) -> Dyn<()> {
    let sec = "cv";
    let data: PathBuf = resolve(a.data, cfg, sec, "data", None)?;
    let method: Method = resolve(a.method, cfg, sec, "method", None)?;
    let folds = resolve(a.folds, cfg, sec, "folds", Some(5))?;
    let seed = resolve(a.seed, cfg, sec, "seed", Some(0))?;

    let samples = SampleSet::from_csv(&fs::read_to_string(&data)?)?;
    let mut plan = CvPlan::default_for(samples.d());
    plan.folds = folds;
    if let Ok(n_grid) = resolve(a.n_grid.clone(), cfg, sec, "n_grid", Some(String::new())) {
        if !n_grid.is_empty() {
            plan.n_grid = parse_usize_list(&n_grid)?;
        }
    }
    if let Ok(r_grid) = resolve(a.r_grid.clone(), cfg, sec, "r_grid", Some(String::new())) {
        if !r_grid.is_empty() {
            plan.r_grid = parse_usize_list(&r_grid)?;
        }
    }
    let outcome = cross_validate(&samples, &plan, method, seed)?;
    for cell in &outcome.table {
        println!("{:<24} {:.6}", cell.label, cell.mean_rmse);
    }
    match outcome.chosen {
        ChosenParams::Cfn { n, r } => println!("selected: n={n} r={r}"),
        ChosenParams::Elm { n_hidden } => println!("selected: n_hidden={n_hidden}"),
        ChosenParams::Krr { gamma, lambda } => println!("selected: gamma={gamma} lambda={lambda}"),
    }
    if let Some(out) = a.out {
        fs::write(&out, serde_json::to_string_pretty(&outcome)?)?;
        println!("cv table written to {}", out.display());
    }
    Ok(())
}

fn cmd_benchmark(a: BenchmarkArgs, cfg: &toml::Table) -> Dyn<()> {
    let sec = "benchmark";
    let target: TargetFn = resolve(a.target, cfg, sec, "fn", None)?;
    let d = resolve(a.d, cfg, sec, "d", Some(1))?;
    let m = resolve(a.m, cfg, sec, "m", Some(1024))?;
    let m_test = resolve(a.m_test, cfg, sec, "m_test", Some(1000))?;
    let noise_var = resolve(a.noise_var, cfg, sec, "noise_var", Some(0.1))?;
    let trials = resolve(a.trials, cfg, sec, "trials", Some(20))?;
    let methods = parse_methods(&resolve(
        a.methods,
        cfg,
        sec,
        "methods",
        Some("cfn,elm,krr".to_string()),
    )?)?;
    let seed = resolve(a.seed, cfg, sec, "seed", Some(0))?;
    let report_path: PathBuf = resolve(a.report, cfg, sec, "report", None)?;

    let mut plan = CvPlan::default_for(d);
    if let Some(n_grid) = a.n_grid {
        plan.n_grid = parse_usize_list(&n_grid)?;
    }
    if let Some(r_grid) = a.r_grid {
        plan.r_grid = parse_usize_list(&r_grid)?;
    }
    if let Some(w) = a.w {
        plan.width = w.parse::<CfnWidth>()?;
    }
    let spec = BenchSpec {
        dataset: DatasetSpec::new(target, d, m, m_test).with_noise(noise_var).with_seed(seed),
        trials,
        methods,
        plan,
    };
    let report = run_benchmark(&spec)?;

    println!("{:<6} {:>12} {:>12} {:>12} {:>12}", "method", "train_mean", "train_std", "test_mean", "test_std");
    for row in &report.rows {
        println!(
            "{:<6} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            row.method.to_string(),
            row.train_rmse_mean,
            row.train_rmse_std,
            row.test_rmse_mean,
            row.test_rmse_std
        );
        for f in &row.failures {
            eprintln!("warning: {} failed: {f}", row.method);
        }
    }
    fs::write(&report_path, report.csv())?;
    let times_path = report_path.with_extension("times.csv");
    fs::write(&times_path, report.times_csv())?;
    let json_path = report_path.with_extension("json");
    fs::write(&json_path, report.to_json()?)?;
    println!(
        "reports written: {} (+ {} and {})",
        report_path.display(),
        times_path.display(),
        json_path.display()
    );
    Ok(())
}
