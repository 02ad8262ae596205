//! Argument parsing and command execution for the `hardy` binary.
//!
//! Exit codes: `0` success, `1` computational failure (with a JSON error
//! object on stderr), `2` usage error.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hardy_core::empirical::{
    est_lower_bound, format_sig17, gen_a_limit, gen_a_partial, power_probe, verify_inequality, EmpiricalError,
    VerifyConfig,
};
use hardy_core::family::{FamilyError, MeanFamily, MethodChoice};
use hardy_core::hardy::{HardyConstantResult, HardyError};
use hardy_core::homogenize::{homogenize, HomogenizeError};
use hardy_core::weights::{EtaEstimate, WeightsError};
use hardy_core::WeightSequence;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Horizon used when the weight limit has to be profiled numerically.
pub const PROFILE_HORIZON: usize = 100_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// `--help` or `--version` output.
    #[error("{0}")]
    Help(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Empirical(#[from] EmpiricalError),
    #[error(transparent)]
    Homogenize(#[from] HomogenizeError),
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error("weight ratio lambda_n / Lambda_n does not settle below 1")]
    EtaNotConvergent,
    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Help(_) => EXIT_OK,
            _ => EXIT_COMPUTATION,
        }
    }

    fn kind(&self) -> &'static str {
        if let Some(k) = h_kind(self) {
            return k;
        }
        match self {
            CliError::Usage(_) => "usage",
            CliError::Help(_) => "help",
            CliError::Family(FamilyError::Unsupported(_)) => "unsupported",
            CliError::Empirical(EmpiricalError::ViolationFound { .. }) => "violation_found",
            CliError::Homogenize(HomogenizeError::NoConvergence(_)) => "no_convergence",
            CliError::Weights(_) => "weights",
            CliError::EtaNotConvergent => "eta_not_convergent",
            CliError::Io { .. } => "io",
            _ => "computation",
        }
    }

    /// The machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("error".into(), json!(self.kind()));
        obj.insert("message".into(), json!(self.to_string()));
        match self {
            CliError::Empirical(EmpiricalError::ViolationFound { trial, sequence, ratio, bound }) => {
                obj.insert("trial".into(), json!(trial));
                obj.insert("ratio".into(), num(*ratio));
                obj.insert("bound".into(), num(*bound));
                obj.insert("sequence".into(), Value::Array(sequence.iter().map(|v| num(*v)).collect()));
            }
            CliError::Homogenize(HomogenizeError::NoConvergence(est)) => {
                obj.insert("estimate".into(), num(est.value));
                obj.insert("spread".into(), num(est.spread));
                obj.insert("ladder".into(), ladder_json(&est.t_ladder));
            }
            _ => {}
        }
        Value::Object(obj)
    }
}

fn h_kind(e: &CliError) -> Option<&'static str> {
    match e {
        CliError::Family(FamilyError::Hardy(h)) => Some(match h {
            HardyError::NoBracket { .. } => "no_bracket",
            HardyError::NotIntegrable => "not_integrable",
            HardyError::TailBoundFailure { .. } => "tail_bound_failure",
            HardyError::LimitNotDetected { .. } => "limit_not_detected",
            HardyError::DomainError(_) => "domain_error",
            _ => "computation",
        }),
        _ => None,
    }
}

/// A JSON number, or the string `"inf"` / `"-inf"` / `"nan"`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(format_sig17(v))
    }
}

fn ladder_json(ladder: &[(f64, f64)]) -> Value {
    Value::Array(ladder.iter().map(|(t, v)| json!([num(*t), num(*v)])).collect())
}

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Weighted means and sharp weighted Hardy constants")]
struct Cli {
    /// Plain `key=value` file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Hardy constant of a mean family.
    Constant {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        /// closed, root, both or auto.
        #[arg(long, default_value = "auto")]
        method: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Root of the characteristic equation of a family's generator.
    Solve {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized check of the weighted Hardy inequality.
    Verify {
        #[arg(long)]
        mean: String,
        #[arg(long)]
        weights: String,
        /// `auto` or a positive number.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        constant: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum sequence length.
        #[arg(long = "N", default_value_t = 50)]
        n: usize,
        /// Where to write the violating sequence, one value per line.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Witness-sequence lower estimate of the weighted Hardy constant.
    Est {
        #[arg(long)]
        mean: String,
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        y: f64,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Weighted Riemann sum of `x^-p` against its limit.
    Gena {
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long)]
        weights: String,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Constants over a grid of eta values, `start:stop:step`.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long)]
        eta: String,
        #[arg(long, default_value = "auto")]
        method: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Homogenization of a mean at a point.
    Homogenize {
        #[arg(long)]
        mean: String,
        /// Comma-separated positive values.
        #[arg(long)]
        x: String,
        /// Comma-separated weights; defaults to ones.
        #[arg(long)]
        lam: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Choice(MethodChoice),
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantArg {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone)]
pub enum Command {
    Constant { family: MeanFamily, eta: f64, method: MethodArg },
    Solve { family: MeanFamily, eta: f64 },
    Verify {
        family: MeanFamily,
        weights: WeightSequence,
        constant: ConstantArg,
        trials: usize,
        seed: u64,
        n: usize,
        witness: Option<PathBuf>,
    },
    Est { family: MeanFamily, weights: WeightSequence, y: f64, n: usize },
    Gena { p: f64, weights: WeightSequence, n: usize },
    Sweep { family: MeanFamily, etas: Vec<f64>, method: MethodChoice },
    Homogenize { family: MeanFamily, x: Vec<f64>, lam: Vec<f64>, tol: f64 },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

fn usage(flag: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{flag}: {reason}"))
}

fn family_arg(flag: &str, text: &str) -> Result<MeanFamily, CliError> {
    text.parse().map_err(|e| usage(flag, e))
}

fn weights_arg(text: &str) -> Result<WeightSequence, CliError> {
    WeightSequence::parse(text).map_err(|e| usage("--weights", e))
}

fn eta_arg(eta: f64) -> Result<f64, CliError> {
    if (0.0..1.0).contains(&eta) {
        Ok(eta)
    } else {
        Err(usage("--eta", format!("must lie in [0, 1), got {eta}")))
    }
}

fn method_arg(text: &str) -> Result<MethodArg, CliError> {
    if text == "both" {
        return Ok(MethodArg::Both);
    }
    text.parse().map(MethodArg::Choice).map_err(|_| usage("--method", "expected closed, root, both or auto"))
}

fn positive(flag: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        Err(usage(flag, "must be at least 1"))
    } else {
        Ok(v)
    }
}

fn list_arg(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(flag, format!("'{s}' is not a number"))))
        .collect()
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums = parts
        .iter()
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|_| usage("--eta", format!("expected start:stop:step, got '{text}'")))?;
    let (start, stop, step) = match nums.as_slice() {
        [v] => return eta_arg(*v).map(|v| vec![v]),
        [a, b, s] => (*a, *b, *s),
        _ => return Err(usage("--eta", format!("expected start:stop:step, got '{text}'"))),
    };
    if !(step > 0.0) || stop < start {
        return Err(usage("--eta", "need step > 0 and stop >= start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // snap to 12 decimals so 0.1-steps print as written
    let grid: Vec<f64> = (0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect();
    for &e in &grid {
        eta_arg(e)?;
    }
    Ok(grid)
}

/// Reads `key=value` lines (with `#` comments) and appends `--key value`
/// for every key not already given on the command line.
fn merge_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv.get(pos + 1).cloned().ok_or_else(|| usage("--config", "missing path"))?,
    };
    let text = fs::read_to_string(&path).map_err(|e| usage("--config", format!("{path}: {e}")))?;
    let given: HashSet<String> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut merged = argv.clone();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage("--config", format!("{path} line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if key == "config" || given.contains(key) {
            continue;
        }
        merged.push(format!("--{key}={}", value.trim()));
    }
    Ok(merged)
}

fn output(o: OutputArgs) -> (OutputFormat, Option<PathBuf>) {
    let format = if o.format == "csv" { OutputFormat::Csv } else { OutputFormat::Json };
    (format, o.out)
}

/// Parses `argv` (without the program name) into a validated configuration.
pub fn parse_args<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = merge_config(argv.into_iter().map(Into::into).collect())?;
    let cli = Cli::try_parse_from(std::iter::once("hardy".to_string()).chain(argv))
        .map_err(|e| {
            let text = e.render().to_string().trim_end().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Help(text),
                _ => CliError::Usage(text),
            }
        })?;
    let (command, (format, out)) = match cli.command {
        Cmd::Constant { family, eta, method, output: o } => (
            Command::Constant { family: family_arg("--family", &family)?, eta: eta_arg(eta)?, method: method_arg(&method)? },
            output(o),
        ),
        Cmd::Solve { family, eta, output: o } => {
            (Command::Solve { family: family_arg("--family", &family)?, eta: eta_arg(eta)? }, output(o))
        }
        Cmd::Verify { mean, weights, constant, trials, seed, n, witness, output: o } => {
            let constant = match constant.as_str() {
                "auto" => ConstantArg::Auto,
                text => match text.parse::<f64>() {
                    Ok(v) if v > 0.0 => ConstantArg::Value(v),
                    _ => return Err(usage("--constant", format!("expected auto or a positive number, got '{text}'"))),
                },
            };
            (
                Command::Verify {
                    family: family_arg("--mean", &mean)?,
                    weights: weights_arg(&weights)?,
                    constant,
                    trials: positive("--trials", trials)?,
                    seed,
                    n: positive("--N", n)?,
                    witness,
                },
                output(o),
            )
        }
        Cmd::Est { mean, weights, y, n, output: o } => {
            if !(y > 0.0 && y.is_finite()) {
                return Err(usage("--y", format!("must be positive, got {y}")));
            }
            (
                Command::Est { family: family_arg("--mean", &mean)?, weights: weights_arg(&weights)?, y, n: positive("--N", n)? },
                output(o),
            )
        }
        Cmd::Gena { p, weights, n, output: o } => {
            if !(p < 1.0) {
                return Err(usage("--p", format!("must be < 1, got {p}")));
            }
            (Command::Gena { p, weights: weights_arg(&weights)?, n: positive("--N", n)? }, output(o))
        }
        Cmd::Sweep { family, eta, method, output: o } => {
            let method = match method_arg(&method)? {
                MethodArg::Choice(m) => m,
                MethodArg::Both => return Err(usage("--method", "sweep takes closed, root or auto")),
            };
            let (_, out) = output(o);
            (
                Command::Sweep { family: family_arg("--family", &family)?, etas: parse_grid(&eta)?, method },
                (OutputFormat::Csv, out),
            )
        }
        Cmd::Homogenize { mean, x, lam, tol, output: o } => {
            let x = list_arg("--x", &x)?;
            if x.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(usage("--x", "values must be positive and finite"));
            }
            let lam = match lam {
                Some(l) => list_arg("--lam", &l)?,
                None => vec![1.0; x.len()],
            };
            if lam.len() != x.len() {
                return Err(usage("--lam", format!("{} weights for {} values", lam.len(), x.len())));
            }
            if !(tol > 0.0) {
                return Err(usage("--tol", "must be positive"));
            }
            (Command::Homogenize { family: family_arg("--mean", &mean)?, x, lam, tol }, output(o))
        }
    };
    Ok(RunConfig { command, format, out })
}

fn eta_of(w: &WeightSequence) -> Result<f64, CliError> {
    if let Some(eta) = w.analytic_eta() {
        return Ok(eta);
    }
    match w.profile(PROFILE_HORIZON)?.eta {
        EtaEstimate::Limit(eta) => Ok(eta),
        EtaEstimate::NotConvergent => Err(CliError::EtaNotConvergent),
    }
}

fn result_json(family: &MeanFamily, r: &HardyConstantResult) -> Value {
    json!({
        "family": family.to_string(),
        "value": num(r.value),
        "method": r.method.as_str(),
        "residual": num(r.residual),
        "bracket": [num(r.bracket.0), num(r.bracket.1)],
        "eta": num(r.eta),
    })
}

const CONSTANT_CSV_HEADER: &str = "family,eta,value,method,residual";

fn result_csv_row(family: &MeanFamily, r: &HardyConstantResult) -> String {
    format!(
        "{},{},{},{},{}\n",
        family,
        format_sig17(r.eta),
        format_sig17(r.value),
        r.method.as_str(),
        format_sig17(r.residual)
    )
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    let csv = cfg.format == OutputFormat::Csv;
    let text = match &cfg.command {
        Command::Constant { family, eta, method } => match method {
            MethodArg::Choice(m) => {
                let r = family.constant(*eta, *m)?;
                if csv {
                    format!("{CONSTANT_CSV_HEADER}\n{}", result_csv_row(family, &r))
                } else {
                    json_text(&result_json(family, &r))
                }
            }
            MethodArg::Both => {
                let closed = family.constant(*eta, MethodChoice::Closed)?;
                let root = family.constant(*eta, MethodChoice::Root)?;
                let diff = if closed.value == root.value { 0.0 } else { (closed.value - root.value).abs() };
                if csv {
                    format!(
                        "{CONSTANT_CSV_HEADER}\n{}{}",
                        result_csv_row(family, &closed),
                        result_csv_row(family, &root)
                    )
                } else {
                    json_text(&json!({
                        "closed": result_json(family, &closed),
                        "root": result_json(family, &root),
                        "difference": num(diff),
                    }))
                }
            }
        },
        Command::Solve { family, eta } => {
            let r = family.constant(*eta, MethodChoice::Root)?;
            if csv {
                format!("{CONSTANT_CSV_HEADER}\n{}", result_csv_row(family, &r))
            } else {
                json_text(&result_json(family, &r))
            }
        }
        Command::Verify { family, weights, constant, trials, seed, n, witness } => {
            let eta = eta_of(weights)?;
            let constant = match constant {
                ConstantArg::Value(v) => *v,
                ConstantArg::Auto => family.constant(eta, MethodChoice::Auto)?.value,
            };
            let ones = family.constant(0.0, MethodChoice::Auto).ok().map(|r| r.value).filter(|v| v.is_finite());
            let vcfg = VerifyConfig { constant, trials: *trials, seed: *seed, max_len: *n, ones_constant: ones };
            let report = match verify_inequality(&family.mean_spec(), weights, &vcfg) {
                Ok(r) => r,
                Err(e) => {
                    if let (EmpiricalError::ViolationFound { sequence, .. }, Some(path)) = (&e, witness) {
                        let body: String = sequence.iter().map(|v| format_sig17(*v) + "\n").collect();
                        fs::write(path, body).map_err(|err| CliError::Io {
                            path: path.display().to_string(),
                            reason: err.to_string(),
                        })?;
                    }
                    return Err(e.into());
                }
            };
            let v = json!({
                "mean": family.to_string(),
                "weights": weights.to_string(),
                "eta": num(eta),
                "constant": num(report.constant),
                "ones_constant": report.ones_constant.map(num),
                "trials": report.trials,
                "seed": report.seed,
                "N": report.max_len,
                "max_ratio": num(report.max_ratio),
                "worst_trial": report.worst_trial,
                "violations": report.violations,
            });
            if csv {
                format!(
                    "trials,seed,N,constant,max_ratio,worst_trial,violations\n{},{},{},{},{},{},{}\n",
                    report.trials,
                    report.seed,
                    report.max_len,
                    format_sig17(report.constant),
                    format_sig17(report.max_ratio),
                    report.worst_trial,
                    report.violations
                )
            } else {
                json_text(&v)
            }
        }
        Command::Est { family, weights, y, n } => {
            let trace = est_lower_bound(&family.mean_spec(), weights, *y, *n)?;
            if csv || cfg.out.is_some() {
                trace.to_csv()
            } else {
                json_text(&json!({
                    "mean": family.to_string(),
                    "weights": weights.to_string(),
                    "y": num(*y),
                    "N": n,
                    "tail_inf": num(trace.tail_inf()),
                    "points": trace.points.iter().map(|(k, v)| json!([k, num(*v)])).collect::<Vec<_>>(),
                }))
            }
        }
        Command::Gena { p, weights, n } => {
            let eta = eta_of(weights)?;
            let partial = gen_a_partial(power_probe(*p), weights, *n);
            let limit = gen_a_limit(*p, eta)?;
            if csv {
                format!(
                    "p,eta,N,partial,limit,error\n{},{},{},{},{},{}\n",
                    format_sig17(*p),
                    format_sig17(eta),
                    n,
                    format_sig17(partial),
                    format_sig17(limit),
                    format_sig17((partial - limit).abs())
                )
            } else {
                json_text(&json!({
                    "p": num(*p),
                    "weights": weights.to_string(),
                    "eta": num(eta),
                    "N": n,
                    "partial": num(partial),
                    "limit": num(limit),
                    "error": num((partial - limit).abs()),
                }))
            }
        }
        Command::Sweep { family, etas, method } => {
            let rows: Vec<Result<HardyConstantResult, FamilyError>> =
                etas.par_iter().map(|&eta| family.constant(eta, *method)).collect();
            let mut s = String::from("eta,value,method,residual\n");
            for r in rows {
                let r = r?;
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    format_sig17(r.eta),
                    format_sig17(r.value),
                    r.method.as_str(),
                    format_sig17(r.residual)
                ));
            }
            s
        }
        Command::Homogenize { family, x, lam, tol } => {
            let est = homogenize(&family.mean_spec(), x, lam, *tol)?;
            let mean = family.mean_spec().eval(x, lam).map_err(|e| CliError::Usage(format!("--x: {e}")))?;
            if csv {
                let mut s = String::from("t,value\n");
                for (t, v) in &est.t_ladder {
                    s.push_str(&format!("{},{}\n", format_sig17(*t), format_sig17(*v)));
                }
                s
            } else {
                json_text(&json!({
                    "mean": family.to_string(),
                    "value": num(est.value),
                    "mean_at_x": num(mean),
                    "converged": est.converged,
                    "spread": num(est.spread),
                    "ladder": ladder_json(&est.t_ladder),
                }))
            }
        }
    };
    Ok(text)
}

/// Runs a parsed configuration, writing results to `stdout` (or `--out`)
/// and errors to `stderr`. Returns the exit code.
pub fn run_with(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = execute(cfg).and_then(|text| match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), reason: e.to_string() }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), reason: e.to_string() }),
    });
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}

/// Parses and runs `argv`, returning the exit code.
pub fn main_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    match parse_args(argv) {
        Ok(cfg) => run_with(&cfg, stdout, stderr),
        Err(CliError::Help(text)) => {
            let _ = writeln!(stdout, "{text}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}
