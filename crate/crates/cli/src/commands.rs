//! Command implementations. Each returns its complete output so nothing is
//! written when a command fails part-way.

use std::path::PathBuf;

use asn_core::estimators::Method;
use asn_core::{fit, gof_report, run_study, Config, FitResult, InitMode, OrderedSample, Params};
use clap::{Args, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{load_csv, log_transform, raw_values, Layout, LoadReport, MonthlySeries};
use crate::error::{CliError, Result};
use crate::summary::summarize;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the distribution to flux data and print JSON.
    Fit(FitArgs),
    /// Run a bias/MSE simulation study and write a CSV report.
    Simulate(SimulateArgs),
    /// Draw a random sample, one value per line.
    Sample(SampleArgs),
    /// Print quantiles as a CSV table.
    Quantile(QuantileArgs),
    /// Kolmogorov-Smirnov check of a fit, as JSON.
    Gof(GofArgs),
    /// Per-month summary statistics as CSV.
    Summarize(InputArgs),
    /// Density and distribution function on a grid, as CSV.
    Curve(CurveArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "long")]
    pub layout: Layout,
    /// Fail when more than half of the data rows are malformed.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<Params> {
        Params::new(self.mu, self.sigma, self.alpha).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, required_unless_present = "all_methods", value_parser = parse_method)]
    pub method: Option<Method>,
    /// Fit the natural log of the strictly positive fluxes.
    #[arg(long)]
    pub log: bool,
    /// Fit all seven methods and report each, converged or not.
    #[arg(long, conflicts_with = "method")]
    pub all_methods: bool,
    /// Fit each station separately instead of pooling.
    #[arg(long)]
    pub per_station: bool,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Data,
    Truth,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_delimiter = ',', default_value = "40,100,200")]
    pub n_grid: Vec<usize>,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "MLE,MPS,ADE")]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "data")]
    pub init: InitArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct QuantileArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,0.5,0.99,0.9999")]
    pub p: Vec<f64>,
    /// Exponentiate, giving quantiles on the flux scale for a log-scale fit.
    #[arg(long)]
    pub exp: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse::<Method>().map_err(|_| "expected one of MLE, LSQ, WLQ, MPS, CME, ADE, RADE".to_string())
}

pub fn run(command: &Command) -> Result<String> {
    match command {
        Command::Fit(a) => fit_command(a),
        Command::Simulate(a) => simulate_command(a),
        Command::Sample(a) => sample_command(a),
        Command::Quantile(a) => quantile_command(a),
        Command::Gof(a) => gof_command(a),
        Command::Summarize(a) => summarize_command(a),
        Command::Curve(a) => curve_command(a),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Data(format!("cannot encode JSON: {e}")))
}

fn csv_text(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::Data(format!("cannot write CSV: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(format!("cannot write CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Data(e.to_string()))
}

/// How the fitted values were derived from the file.
#[derive(Debug, Clone, Serialize)]
pub struct DataSummary {
    pub rows_read: usize,
    pub malformed_rows: usize,
    pub used: usize,
    pub missing: usize,
    /// Only counted under `--log`.
    pub zeros: usize,
    pub negatives: usize,
    pub log: bool,
}

fn prepare(series: &[MonthlySeries], report: &LoadReport, log: bool) -> Result<(OrderedSample<f64>, DataSummary)> {
    let mut summary = DataSummary {
        rows_read: report.rows_read,
        malformed_rows: report.faults.len(),
        used: 0,
        missing: 0,
        zeros: 0,
        negatives: 0,
        log,
    };
    let sample = if log {
        let l = log_transform(series)?;
        (summary.used, summary.missing, summary.zeros, summary.negatives) = (l.used, l.missing, l.zeros, l.negatives);
        l.sample
    } else {
        let values = raw_values(series);
        summary.used = values.len();
        summary.missing = series.iter().map(|s| s.rows.len()).sum::<usize>() - values.len();
        let sample = OrderedSample::new(values)?;
        sample.require_fit_size()?;
        sample
    };
    Ok((sample, summary))
}

#[derive(Debug, Serialize)]
pub struct FitRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub station: Option<String>,
    #[serde(flatten)]
    pub fit: FitResult<f64>,
    pub data: DataSummary,
}

fn fit_group(series: &[MonthlySeries], report: &LoadReport, args: &FitArgs, station: Option<String>) -> Result<Vec<FitRecord>> {
    let (sample, data) = prepare(series, report, args.log)?;
    let methods: Vec<Method> = if args.all_methods { Method::ALL.to_vec() } else { args.method.into_iter().collect() };
    methods
        .into_iter()
        .map(|m| {
            let result = fit(&sample, m)?;
            if !args.all_methods && !result.converged {
                return Err(CliError::Convergence(format!(
                    "{m} fit did not converge after {} iterations{}",
                    result.iterations,
                    station.as_ref().map_or(String::new(), |s| format!(" for station {s}"))
                )));
            }
            Ok(FitRecord { station: station.clone(), fit: result, data: data.clone() })
        })
        .collect()
}

fn fit_command(args: &FitArgs) -> Result<String> {
    let report = load_csv(&args.input.input, args.input.layout, args.input.strict)?;
    let mut records = Vec::new();
    if args.per_station {
        for s in &report.series {
            records.extend(fit_group(std::slice::from_ref(s), &report, args, Some(s.station_id.clone()))?);
        }
    } else {
        records = fit_group(&report.series, &report, args, None)?;
    }
    if records.len() == 1 {
        json(&records[0])
    } else {
        json(&records)
    }
}

#[derive(Debug, Serialize)]
struct GofOutput {
    method: Method,
    params: Params,
    statistic: f64,
    p_value: f64,
    n: usize,
    converged: bool,
    data: DataSummary,
}

fn gof_command(args: &GofArgs) -> Result<String> {
    let report = load_csv(&args.input.input, args.input.layout, args.input.strict)?;
    let (sample, data) = prepare(&report.series, &report, args.log)?;
    let result = fit(&sample, args.method)?;
    if !result.converged {
        return Err(CliError::Convergence(format!("{} fit did not converge", args.method)));
    }
    let g = gof_report(&sample, &result);
    json(&GofOutput {
        method: g.method,
        params: result.params,
        statistic: g.statistic,
        p_value: g.p_value,
        n: g.n,
        converged: result.converged,
        data,
    })
}

fn summarize_command(args: &InputArgs) -> Result<String> {
    let report = load_csv(&args.input, args.layout, args.strict)?;
    if report.series.is_empty() {
        return Err(CliError::Data("no usable rows".into()));
    }
    let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    let mut rows = vec![["month", "min", "q1", "median", "mean", "q3", "max", "na_count"].map(String::from).to_vec()];
    for r in summarize(&report.series) {
        rows.push(vec![
            r.month.to_string(),
            cell(r.min),
            cell(r.q1),
            cell(r.median),
            cell(r.mean),
            cell(r.q3),
            cell(r.max),
            r.na_count.to_string(),
        ]);
    }
    csv_text(rows)
}

fn simulate_command(args: &SimulateArgs) -> Result<String> {
    let init = match args.init {
        InitArg::Data => InitMode::Data,
        InitArg::Truth => InitMode::Truth,
    };
    let config = Config::new(args.params.params()?, args.n_grid.clone(), args.reps, args.methods.iter().copied(), args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .with_init(init);
    let report = run_study(&config)?;
    let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    let mut rows = vec![["method", "n", "parameter", "bias", "mse", "failures"].map(String::from).to_vec()];
    for c in &report.cells {
        for (j, name) in ["mu", "sigma", "alpha"].iter().enumerate() {
            rows.push(vec![
                c.method.to_string(),
                c.n.to_string(),
                name.to_string(),
                cell(c.bias.map(|b| b[j])),
                cell(c.mse.map(|m| m[j])),
                c.failure_count.to_string(),
            ]);
        }
    }
    let text = csv_text(rows)?;
    std::fs::write(&args.out, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(String::new())
}

fn sample_command(args: &SampleArgs) -> Result<String> {
    let params = args.params.params()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    Ok(params.sample(args.n, &mut rng).iter().map(|v| format!("{v}\n")).collect())
}

fn quantile_command(args: &QuantileArgs) -> Result<String> {
    let params = args.params.params()?;
    let mut rows = vec![vec!["p".to_string(), if args.exp { "exp_quantile" } else { "quantile" }.to_string()]];
    for &p in &args.p {
        let q = params.quantile(p).map_err(|e| CliError::Usage(e.to_string()))?;
        rows.push(vec![p.to_string(), (if args.exp { q.exp() } else { q }).to_string()]);
    }
    csv_text(rows)
}

fn curve_command(args: &CurveArgs) -> Result<String> {
    let params = args.params.params()?;
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    if !(args.from.is_finite() && args.to.is_finite() && args.from < args.to) {
        return Err(CliError::Usage(format!("need finite --from < --to, got {} and {}", args.from, args.to)));
    }
    let step = (args.to - args.from) / (args.points - 1) as f64;
    let mut rows = vec![vec!["t".to_string(), "pdf".to_string(), "cdf".to_string()]];
    for k in 0..args.points {
        let t = if k + 1 == args.points { args.to } else { args.from + k as f64 * step };
        rows.push(vec![t.to_string(), params.pdf(t).to_string(), params.cdf(t).to_string()]);
    }
    csv_text(rows)
}
