//! Command-line front end for the dpquant estimators.
//!
//! Subcommands: `estimate` a quantile of a partially observed outcome in a
//! CSV file, `mask` a complete dataset with a logistic missingness
//! mechanism, `simulate` the replicated study, `sweep` the contaminated
//! outcome value across a grid, and `report` either output as a table.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpquant::estimators::{
    estimate_quantile, EstimateResult, FittedDistribution, Method, ObservedSample, RegressionKind,
};
use dpquant::linmod::{expit, DesignSpec};
use dpquant::simulate::{
    contamination_sweep, mse, run_study, Contamination, ErrorLaw, MseSummary, RngStream, Scenario,
    ScenarioSpec, StudyRow, SweepPoint, TRUE_MEDIAN,
};
use nalgebra::DMatrix;
use rand::Rng;

/// Stdout write that exits quietly when the reader closes the pipe, so
/// `dpquant ... | head` does not panic.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(err) = write!(std::io::stdout(), $($arg)*) {
            if err.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            eprintln!("error: failed to write to stdout: {err}");
            std::process::exit(2);
        }
    }};
}

/// Newline-terminated `out!`.
macro_rules! outln {
    () => { out!("\n") };
    ($($arg:tt)*) => {{
        out!($($arg)*);
        out!("\n");
    }};
}

/// Failure of a subcommand, split by exit code: 1 for bad flags, 2 for
/// unreadable or malformed data, 3 for an estimator failing on valid data.
#[derive(Debug)]
enum CmdError {
    Usage(String),
    Data(String),
    Estimator(String),
}

impl CmdError {
    fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 1,
            CmdError::Data(_) => 2,
            CmdError::Estimator(_) => 3,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (CmdError::Usage(msg) | CmdError::Data(msg) | CmdError::Estimator(msg)) = self;
        f.write_str(msg)
    }
}

type CmdResult<T> = Result<T, CmdError>;

#[derive(Parser)]
#[command(
    name = "dpquant",
    version,
    about = "Quantile estimation when outcomes are missing at random",
    after_help = "Replicates run on a rayon thread pool; set RAYON_NUM_THREADS to bound it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a quantile of a partially observed outcome in a CSV file
    Estimate(EstimateArgs),
    /// Add a response indicator to a complete dataset and blank the
    /// unobserved outcomes
    Mask(MaskArgs),
    /// Run replicated studies of one scenario and error law
    Simulate(StudyArgs),
    /// Rerun the study across a grid of contaminated outcome values
    Sweep(SweepArgs),
    /// Summarize simulate or sweep output as CSV or markdown
    Report(ReportArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Input CSV with covariate columns, an indicator column `a` (0/1), and
    /// an outcome column `y` left empty where a=0
    #[arg(long)]
    data: PathBuf,
    /// Estimator: ipw, sy, dp-s, dp-s-rob, dp-g, or dp-g-rob
    #[arg(long)]
    method: Method,
    /// Probability level of the quantile, strictly between 0 and 1
    #[arg(long, default_value_t = 0.5, value_parser = parse_probability)]
    p: f64,
    /// Covariate columns of the propensity design, comma separated; all of
    /// them by default, always after an intercept
    #[arg(long, value_delimiter = ',')]
    ps_cols: Option<Vec<String>>,
    /// Covariate columns of the regression design, comma separated; all of
    /// them by default, always after an intercept
    #[arg(long, value_delimiter = ',')]
    or_cols: Option<Vec<String>>,
    /// Seed of the robust-fit subsampler
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the estimated distribution here: `location,weight` rows
    /// for atomic estimates, a `y,f_hat` grid when Gaussian parts are present
    #[arg(long)]
    dump_cdf: Option<PathBuf>,
}

#[derive(Args)]
struct MaskArgs {
    /// Input CSV with an outcome column `y` and no `a` column
    #[arg(long)]
    data: PathBuf,
    /// Column whose value drives the missingness logit
    #[arg(long)]
    logit_col: String,
    /// Slope of the missingness logit
    #[arg(long, allow_negative_numbers = true)]
    slope: f64,
    /// Intercept of the missingness logit
    #[arg(long, allow_negative_numbers = true)]
    intercept: f64,
    /// Seed of the indicator draws
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StudyArgs {
    /// Scenario: s1 both fits correct, s2 the regression drops X₂, s3 the
    /// propensity drops X₂, s4 both drop X₂
    #[arg(long)]
    scenario: Scenario,
    /// Error law of the outcome noise: normal, t3, or cauchy
    #[arg(long)]
    errors: ErrorLaw,
    /// Rows per replicate
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Number of replicates
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Estimators to run, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = Method::ALL)]
    methods: Vec<Method>,
    /// Probability level of the estimated quantile
    #[arg(long, default_value_t = 0.5, value_parser = parse_probability)]
    p: f64,
    /// Base seed of the replicate RNG streams
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path prefix; the written CSVs get suffixed names next to it
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    study: StudyArgs,
    /// Fraction of rows contaminated in every replicate; the contaminated
    /// rows get covariates (1, 2, 0) and outcome y0
    #[arg(long, default_value_t = 0.1, value_parser = parse_fraction)]
    fraction: f64,
    /// Contaminated outcome values: start:stop:step or a comma-separated list
    #[arg(long, default_value = "-100:100:10", allow_hyphen_values = true)]
    y0_grid: String,
}

#[derive(Args)]
struct ReportArgs {
    /// Input CSV: simulate long-format output or sweep grid output
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Markdown,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = i32::from(err.use_stderr());
            let _ = err.print();
            return code;
        }
    };
    let command = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Mask(args) => cmd_mask(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
    };
    match command {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn parse_probability(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|_| format!("{text:?} is not a number"))?;
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err("must be strictly between 0 and 1".into())
    }
}

fn parse_fraction(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|_| format!("{text:?} is not a number"))?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err("must be between 0 and 1".into())
    }
}

// ---------------------------------------------------------------- estimate

fn cmd_estimate(args: EstimateArgs) -> CmdResult<()> {
    let dataset = read_dataset(&args.data)?;
    let ps_spec = design_from_names(args.ps_cols.as_deref(), &dataset.covariate_names, "--ps-cols")?;
    let or_spec = design_from_names(args.or_cols.as_deref(), &dataset.covariate_names, "--or-cols")?;
    let result =
        estimate_quantile(&dataset.sample, args.method, args.p, &ps_spec, &or_spec, args.seed)
            .map_err(|e| CmdError::Estimator(format!("{}: {e}", args.method)))?;
    print_estimate(&dataset.sample, &result, args.p);
    if let Some(path) = &args.dump_cdf {
        write_file(path, &distribution_csv(&result.distribution))?;
        outln!("wrote {}", path.display());
    }
    Ok(())
}

fn print_estimate(sample: &ObservedSample, result: &EstimateResult, p: f64) {
    outln!("method: {}", result.method);
    outln!("quantile p={p}: {}", result.quantile_p);
    outln!("rows: {} ({} observed)", sample.n(), sample.m());
    outln!("total_mass: {}", result.distribution.total_mass());
    if let Some(fit) = &result.propensity {
        if fit.gamma.is_empty() {
            outln!("propensity: every response observed, pi_hat fixed at 1");
        } else {
            outln!("gamma_hat: {}", join_coefficients(fit.gamma.iter()));
        }
    }
    match &result.regression {
        Some(RegressionKind::Classical(fit)) => {
            outln!("beta_hat: {}", join_coefficients(fit.beta.iter()));
            outln!("sigma_hat: {}", fit.sigma_hat);
        }
        Some(RegressionKind::Robust(fit)) => {
            outln!("beta_hat: {}", join_coefficients(fit.beta.iter()));
            outln!("scale_hat: {}", fit.scale);
            outln!("mm_converged: {}", fit.converged);
        }
        None => {}
    }
}

fn join_coefficients<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    values.map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn distribution_csv(distribution: &FittedDistribution) -> String {
    match distribution {
        FittedDistribution::Atoms(mix) => mix.to_csv(),
        FittedDistribution::Hybrid(h) if h.gaussians.is_empty() => h.atoms.to_csv(),
        FittedDistribution::Hybrid(h) => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut spread = 0.0_f64;
            for &(x, _) in h.atoms.atoms() {
                lo = lo.min(x);
                hi = hi.max(x);
            }
            for g in &h.gaussians {
                lo = lo.min(g.mean);
                hi = hi.max(g.mean);
                spread = spread.max(g.scale);
            }
            lo -= 10.0 * spread;
            hi += 10.0 * spread;
            let steps = 1000;
            let mut out = String::from("y,f_hat\n");
            for i in 0..=steps {
                let y = lo + (hi - lo) * i as f64 / steps as f64;
                out.push_str(&format!("{y},{}\n", h.evaluate(y)));
            }
            out
        }
    }
}

// -------------------------------------------------------------------- mask

fn cmd_mask(args: MaskArgs) -> CmdResult<()> {
    let (headers, records) = read_raw_csv(&args.data)?;
    if headers.iter().any(|h| h == "a") {
        return Err(CmdError::Data(
            "column \"a\" already present; mask expects a complete dataset".into(),
        ));
    }
    let y_idx = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| CmdError::Data("missing column \"y\"".into()))?;
    let logit_idx = headers
        .iter()
        .position(|h| *h == args.logit_col)
        .ok_or_else(|| CmdError::Data(format!("missing column {:?}", args.logit_col)))?;
    if records.len() < 10 {
        return Err(CmdError::Data(format!("need at least 10 data rows, found {}", records.len())));
    }

    let mut logits = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let row = i + 1;
        if rec[y_idx].trim().is_empty() {
            return Err(CmdError::Data(format!("row {row}: y is empty; mask expects complete outcomes")));
        }
        let value = parse_cell(rec[logit_idx].trim(), row, &args.logit_col)?;
        logits.push(args.slope * value + args.intercept);
    }

    let mut writer = csv::Writer::from_path(&args.out)
        .map_err(|e| CmdError::Data(format!("{}: {e}", args.out.display())))?;
    let mut out_header: Vec<&str> = headers[..y_idx].iter().map(String::as_str).collect();
    out_header.push("a");
    out_header.extend(headers[y_idx..].iter().map(String::as_str));
    writer
        .write_record(&out_header)
        .map_err(|e| CmdError::Data(format!("{}: {e}", args.out.display())))?;

    let mut rng = RngStream::new(args.seed).stream(0);
    let mut missing = 0usize;
    for (rec, &logit) in records.iter().zip(&logits) {
        let observed = rng.random::<f64>() < expit(logit);
        let mut out_row: Vec<&str> = rec[..y_idx].iter().map(String::as_str).collect();
        out_row.push(if observed { "1" } else { "0" });
        out_row.push(if observed { &rec[y_idx] } else { "" });
        out_row.extend(rec[y_idx + 1..].iter().map(String::as_str));
        writer
            .write_record(&out_row)
            .map_err(|e| CmdError::Data(format!("{}: {e}", args.out.display())))?;
        missing += usize::from(!observed);
    }
    writer.flush().map_err(|e| CmdError::Data(format!("{}: {e}", args.out.display())))?;

    outln!("wrote {}", args.out.display());
    let fraction = missing as f64 / records.len() as f64;
    outln!("missing fraction: {fraction} ({missing} of {} rows)", records.len());
    Ok(())
}

// ------------------------------------------------------- simulate and sweep

fn cmd_simulate(args: StudyArgs) -> CmdResult<()> {
    let spec = ScenarioSpec::table_default(args.scenario, args.errors, args.n);
    let streams = RngStream::new(args.seed);
    let rows = run_study(&spec, &args.methods, args.p, args.reps, &streams);
    let groups = vec![(
        args.scenario.name().to_string(),
        args.errors.name().to_string(),
        mse(&rows, TRUE_MEDIAN),
    )];

    let long_path = suffixed(&args.out, "_long.csv");
    let summary_path = suffixed(&args.out, "_summary.csv");
    write_file(&long_path, &long_csv(&rows, args.scenario.name(), args.errors.name()))?;
    let summary = summary_csv(&groups);
    write_file(&summary_path, &summary)?;
    outln!("wrote {} ({} rows)", long_path.display(), rows.len());
    outln!("wrote {}", summary_path.display());
    out!("{summary}");
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CmdResult<()> {
    let grid = parse_y0_grid(&args.y0_grid)?;
    let study = args.study;
    let mut spec = ScenarioSpec::table_default(study.scenario, study.errors, study.n);
    spec.contamination =
        Some(Contamination { fraction: args.fraction, x0: vec![1.0, 2.0, 0.0], y0: 0.0 });
    let streams = RngStream::new(study.seed);
    let points = contamination_sweep(&spec, &study.methods, study.p, study.reps, &grid, &streams)
        .map_err(|e| CmdError::Estimator(e.to_string()))?;

    let grid_path = suffixed(&study.out, "_grid.csv");
    let summary_path = suffixed(&study.out, "_summary.csv");
    let (grid_contents, grid_rows) =
        sweep_grid_csv(&points, study.scenario.name(), study.errors.name());
    write_file(&grid_path, &grid_contents)?;
    let summary = sweep_summary_csv(&points, study.scenario.name(), study.errors.name());
    write_file(&summary_path, &summary)?;
    outln!("wrote {} ({} rows)", grid_path.display(), grid_rows);
    outln!("wrote {}", summary_path.display());
    out!("{summary}");
    Ok(())
}

fn parse_y0_grid(text: &str) -> CmdResult<Vec<f64>> {
    let usage = |msg: String| CmdError::Usage(format!("--y0-grid: {msg}"));
    let parse_one = |token: &str| -> CmdResult<f64> {
        let value: f64 =
            token.trim().parse().map_err(|_| usage(format!("{token:?} is not a number")))?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(usage(format!("{value} is not finite")))
        }
    };
    let text = text.trim();
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let start = parse_one(parts[0])?;
        let stop = parse_one(parts[1])?;
        let step = parse_one(parts[2])?;
        if step <= 0.0 {
            return Err(usage("step must be positive".into()));
        }
        if stop < start {
            return Err(usage("stop must not be below start".into()));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    if parts.len() != 1 {
        return Err(usage("expected start:stop:step or a comma-separated list".into()));
    }
    text.split(',').map(parse_one).collect()
}

fn long_csv(rows: &[StudyRow], scenario: &str, errors: &str) -> String {
    let mut out = String::from("method,scenario,errors,replicate,estimate\n");
    for row in rows {
        let estimate = match &row.outcome {
            Ok(value) => value.to_string(),
            Err(_) => String::new(),
        };
        out.push_str(&format!("{},{scenario},{errors},{},{estimate}\n", row.method, row.replicate));
    }
    out
}

fn summary_csv(groups: &[(String, String, Vec<MseSummary>)]) -> String {
    let mut out = String::from("method,scenario,errors,mse,failures\n");
    for (scenario, errors, summaries) in groups {
        for s in summaries {
            out.push_str(&format!("{},{scenario},{errors},{},{}\n", s.method, s.mse, s.failures));
        }
    }
    out
}

fn summary_markdown(groups: &[(String, String, Vec<MseSummary>)]) -> String {
    let mut out = String::from(
        "| method | scenario | errors | mse | failures |\n| --- | --- | --- | --- | --- |\n",
    );
    for (scenario, errors, summaries) in groups {
        for s in summaries {
            out.push_str(&format!(
                "| {} | {scenario} | {errors} | {:.3} | {} |\n",
                s.method, s.mse, s.failures
            ));
        }
    }
    out
}

fn sweep_grid_csv(points: &[SweepPoint], scenario: &str, errors: &str) -> (String, usize) {
    let mut out = String::from("y0,method,scenario,errors,mse,failures\n");
    let mut rows = 0usize;
    for point in points {
        for s in &point.summaries {
            out.push_str(&format!(
                "{},{},{scenario},{errors},{},{}\n",
                point.y0, s.method, s.mse, s.failures
            ));
            rows += 1;
        }
    }
    (out, rows)
}

fn sweep_summary_csv(points: &[SweepPoint], scenario: &str, errors: &str) -> String {
    let mut out = String::from("method,scenario,errors,max_mse,worst_y0\n");
    let methods: Vec<Method> = points
        .first()
        .map(|point| point.summaries.iter().map(|s| s.method).collect())
        .unwrap_or_default();
    for method in methods {
        let mut max_mse = f64::NAN;
        let mut worst_y0 = f64::NAN;
        for point in points {
            if let Some(s) = point.summaries.iter().find(|s| s.method == method) {
                if s.mse.is_finite() && (max_mse.is_nan() || s.mse > max_mse) {
                    max_mse = s.mse;
                    worst_y0 = point.y0;
                }
            }
        }
        out.push_str(&format!("{method},{scenario},{errors},{max_mse},{worst_y0}\n"));
    }
    out
}

// ------------------------------------------------------------------ report

fn cmd_report(args: ReportArgs) -> CmdResult<()> {
    let (headers, records) = read_raw_csv(&args.input)?;
    let names: Vec<&str> = headers.iter().map(String::as_str).collect();
    if names == ["method", "scenario", "errors", "replicate", "estimate"] {
        report_long(&records, args.format)
    } else if names == ["y0", "method", "scenario", "errors", "mse", "failures"] {
        report_grid(&records, args.format)
    } else {
        Err(CmdError::Data(format!(
            "unrecognized header {:?}; expected simulate long-format or sweep grid output",
            headers.join(",")
        )))
    }
}

fn report_long(records: &[Vec<String>], format: ReportFormat) -> CmdResult<()> {
    let mut groups: Vec<((String, String), Vec<StudyRow>)> = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let row = i + 1;
        let method: Method = rec[0]
            .trim()
            .parse()
            .map_err(|e| CmdError::Data(format!("row {row}: {e}")))?;
        let replicate: usize = rec[3]
            .trim()
            .parse()
            .map_err(|_| CmdError::Data(format!("row {row}: bad replicate {:?}", rec[3])))?;
        let estimate = rec[4].trim();
        let outcome = if estimate.is_empty() {
            Err("recorded failure".to_string())
        } else {
            Ok(estimate
                .parse::<f64>()
                .map_err(|_| CmdError::Data(format!("row {row}: bad estimate {:?}", rec[4])))?)
        };
        let key = (rec[1].trim().to_string(), rec[2].trim().to_string());
        let study_row = StudyRow { method, replicate, outcome };
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(study_row),
            None => groups.push((key, vec![study_row])),
        }
    }
    let summarized: Vec<(String, String, Vec<MseSummary>)> = groups
        .into_iter()
        .map(|((scenario, errors), rows)| (scenario, errors, mse(&rows, TRUE_MEDIAN)))
        .collect();
    match format {
        ReportFormat::Csv => out!("{}", summary_csv(&summarized)),
        ReportFormat::Markdown => out!("{}", summary_markdown(&summarized)),
    }
    Ok(())
}

fn report_grid(records: &[Vec<String>], format: ReportFormat) -> CmdResult<()> {
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("y0,mse,method\n");
            for rec in records {
                out.push_str(&format!("{},{},{}\n", rec[0].trim(), rec[4].trim(), rec[1].trim()));
            }
            out!("{out}");
        }
        ReportFormat::Markdown => {
            let mut out = String::from("| y0 | mse | method |\n| --- | --- | --- |\n");
            for (i, rec) in records.iter().enumerate() {
                let row = i + 1;
                let mse_value: f64 = rec[4]
                    .trim()
                    .parse()
                    .map_err(|_| CmdError::Data(format!("row {row}: bad mse {:?}", rec[4])))?;
                out.push_str(&format!("| {} | {mse_value:.3} | {} |\n", rec[0].trim(), rec[1].trim()));
            }
            out!("{out}");
        }
    }
    Ok(())
}

// ------------------------------------------------------------ file plumbing

/// A parsed dataset file: the covariate column names in header order and
/// the assembled sample.
struct Dataset {
    covariate_names: Vec<String>,
    sample: ObservedSample,
}

fn read_dataset(path: &Path) -> CmdResult<Dataset> {
    let (headers, records) = read_raw_csv(path)?;
    let a_idx = headers
        .iter()
        .position(|h| h == "a")
        .ok_or_else(|| CmdError::Data("missing column \"a\"".into()))?;
    let y_idx = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| CmdError::Data("missing column \"y\"".into()))?;
    let cov_indices: Vec<usize> =
        (0..headers.len()).filter(|&i| i != a_idx && i != y_idx).collect();
    let covariate_names: Vec<String> = cov_indices.iter().map(|&i| headers[i].clone()).collect();
    if records.len() < 10 {
        return Err(CmdError::Data(format!("need at least 10 data rows, found {}", records.len())));
    }

    let mut a = Vec::with_capacity(records.len());
    let mut y = Vec::with_capacity(records.len());
    let mut flat = Vec::with_capacity(records.len() * cov_indices.len());
    for (i, rec) in records.iter().enumerate() {
        let row = i + 1;
        let a_cell = rec[a_idx].trim();
        let a_i = match a_cell {
            "0" => false,
            "1" => true,
            _ => {
                return Err(CmdError::Data(format!(
                    "row {row}: indicator a must be 0 or 1, got {a_cell:?}"
                )))
            }
        };
        let y_cell = rec[y_idx].trim();
        let y_i = if a_i {
            if y_cell.is_empty() {
                return Err(CmdError::Data(format!("row {row}: y is empty although a=1")));
            }
            parse_cell(y_cell, row, "y")?
        } else {
            if !y_cell.is_empty() {
                return Err(CmdError::Data(format!(
                    "row {row}: y must be empty when a=0, got {y_cell:?}"
                )));
            }
            f64::NAN
        };
        a.push(a_i);
        y.push(y_i);
        for &c in &cov_indices {
            flat.push(parse_cell(rec[c].trim(), row, &headers[c])?);
        }
    }
    let covariates = DMatrix::from_row_slice(records.len(), cov_indices.len(), &flat);
    let sample =
        ObservedSample::new(covariates, a, y).map_err(|e| CmdError::Data(e.to_string()))?;
    Ok(Dataset { covariate_names, sample })
}

fn read_raw_csv(path: &Path) -> CmdResult<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut records = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CmdError::Data(format!("row {}: {e}", i + 1)))?;
        records.push(record.iter().map(str::to_string).collect());
    }
    Ok((headers, records))
}

fn parse_cell(cell: &str, row: usize, column: &str) -> CmdResult<f64> {
    let value: f64 = cell.parse().map_err(|_| {
        CmdError::Data(format!("row {row}: column {column:?}: cannot parse {cell:?} as a number"))
    })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(CmdError::Data(format!("row {row}: column {column:?}: {value} is not finite")))
    }
}

fn design_from_names(
    selected: Option<&[String]>,
    names: &[String],
    flag: &str,
) -> CmdResult<DesignSpec> {
    let indices = match selected {
        None => (0..names.len()).collect::<Vec<_>>(),
        Some(list) => {
            let mut indices = Vec::with_capacity(list.len());
            for raw in list {
                let name = raw.trim();
                let pos = names.iter().position(|h| h == name).ok_or_else(|| {
                    CmdError::Data(format!(
                        "{flag}: no covariate column {name:?}; the covariate columns are {names:?}"
                    ))
                })?;
                if indices.contains(&pos) {
                    return Err(CmdError::Usage(format!("{flag}: column {name:?} repeats")));
                }
                indices.push(pos);
            }
            indices
        }
    };
    Ok(DesignSpec::with_intercept(&indices))
}

fn write_file(path: &Path, contents: &str) -> CmdResult<()> {
    fs::write(path, contents).map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name =
        prefix.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    name.push_str(suffix);
    prefix.with_file_name(name)
}
