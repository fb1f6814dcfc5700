//! Command-line interface: formulas, sampling experiments, and the
//! verification battery under reproducible configuration.
//!
//! Subcommands: `prob`, `chi`, `sample`, `verify`. Every run echoes its
//! fully-resolved configuration into the output; exact rationals are
//! serialized as "p/q" strings; exit codes are 0 (pass), 1 (numeric failure
//! or failed checks), 2 (invalid flags, from the parser).
//!
//! A config file (`--config`, flat `key=value` lines, `#` comments) supplies
//! defaults; explicit flags override file values.

use crate::chi::{chi_poly_coeffs, chi_xstate, ChiEvaluator};
use crate::harness::{
    residual_csv, residual_curve_for, run_experiment, Axis, Ensemble, ExperimentConfig,
};
use crate::prob::{
    prob_ansatz_2d, prob_concise, prob_dunkl_exact, prob_induced_6f5, prob_via_t_integral,
    single_report,
};
use crate::rational::{rat, Rational};
use crate::real::Prec;
use crate::verify::{run_full_battery, BatteryOptions};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "sepprob",
    version,
    about = "Two-qubit Hilbert-Schmidt separability probabilities: exact formulas, \
             separability functions, Monte Carlo experiments, verification battery"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Separability/PPT probability by one or all formulas
    Prob(ProbArgs),
    /// Separability functions chi_d: values or exact coefficients
    Chi(ChiArgs),
    /// Monte Carlo sampling experiments with binned curves
    Sample(SampleArgs),
    /// Cross-check battery (exact / numeric / mc suites)
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ProbArgs {
    /// Dyson index d
    #[arg(long)]
    pub d: Option<u32>,
    /// inclusive range A..B of d values
    #[arg(long, value_name = "A..B", conflicts_with = "d")]
    pub d_range: Option<String>,
    /// dunkl | concise | 6f5 | integral | ansatz | all
    #[arg(long, default_value = "all")]
    pub formula: String,
    /// separability function for --formula ansatz: master | epsilonK (e.g. epsilon2)
    #[arg(long, default_value = "master")]
    pub chi: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// csv | json
    #[arg(long, default_value = "json")]
    pub format: String,
    /// flat key=value defaults file; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ChiArgs {
    #[arg(long)]
    pub d: u32,
    /// evaluation point in [0,1]
    #[arg(long)]
    pub eps: Option<f64>,
    /// print the exact polynomial coefficients (even d)
    #[arg(long, default_value_t = false)]
    pub coeffs: bool,
    /// csv | json | plain
    #[arg(long, default_value = "plain")]
    pub format: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// rebit4 | qubit4 | rebit_retrit6 | qubit_qutrit6 | xstate_real | xstate_complex
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<u32>,
    /// 1-d bin count
    #[arg(long)]
    pub bins: Option<usize>,
    /// comma-separated subset of: epsilon,mu,tau,grid2d
    #[arg(long)]
    pub axes: Option<String>,
    /// output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// exact | numeric | mc | all
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// wall-clock budget in seconds; sizes the Monte Carlo sample counts
    #[arg(long, default_value_t = 600)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// test hook: force the named check to fail
    #[arg(long, hide = true)]
    pub inject_failure: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flat key=value file; '#' starts a comment.
fn load_config(path: &PathBuf) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                out.insert(k.trim().to_string(), v.trim().to_string());
            }
            None => {
                return Err(Error::Config(format!(
                    "{}:{}: expected key=value, got '{}'",
                    path.display(),
                    lineno + 1,
                    line
                )))
            }
        }
    }
    Ok(out)
}

fn file_get<T: std::str::FromStr>(file: &HashMap<String, String>, key: &str) -> Result<Option<T>> {
    match file.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Config(format!("config key '{}': cannot parse '{}'", key, s))),
    }
}

fn parse_d_list(d: Option<u32>, d_range: &Option<String>) -> Result<Vec<u32>> {
    if let Some(d) = d {
        return Ok(vec![d]);
    }
    if let Some(r) = d_range {
        let (a, b) = r
            .split_once("..")
            .ok_or_else(|| Error::Config(format!("--d-range wants A..B, got '{}'", r)))?;
        let a: u32 = a
            .parse()
            .map_err(|_| Error::Config(format!("bad range start '{}'", a)))?;
        let b: u32 = b
            .parse()
            .map_err(|_| Error::Config(format!("bad range end '{}'", b)))?;
        if a == 0 || b < a {
            return Err(Error::Config("range must satisfy 1 <= A <= B".into()));
        }
        return Ok((a..=b).collect());
    }
    Err(Error::Config("pass --d or --d-range".into()))
}

/// "master" or "epsilonK" with a (possibly fractional) exponent K.
fn parse_chi_selector(s: &str) -> Result<Option<Rational>> {
    if s == "master" {
        return Ok(None);
    }
    if let Some(tail) = s.strip_prefix("epsilon") {
        if let Ok(k) = tail.parse::<i64>() {
            return Ok(Some(rat(k, 1)));
        }
        if let Some((n, d)) = tail.split_once('/') {
            if let (Ok(n), Ok(d)) = (n.parse::<i64>(), d.parse::<i64>()) {
                return Ok(Some(rat(n, d)));
            }
        }
        if let Ok(f) = tail.parse::<f64>() {
            // small-denominator rational from the decimal
            let denom = 10f64.powi(tail.split('.').nth(1).map_or(0, |t| t.len()) as i32);
            return Ok(Some(rat((f * denom).round() as i64, denom as i64)));
        }
    }
    Err(Error::Config(format!(
        "--chi accepts 'master' or 'epsilonK' (e.g. epsilon2, epsilon3/2); got '{}'",
        s
    )))
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(Error::from),
    }
}

pub fn run_prob(args: &ProbArgs) -> Result<i32> {
    let file = match &args.config {
        Some(p) => load_config(p)?,
        None => HashMap::new(),
    };
    // flags override file values; clap defaults come last
    let d = args.d.or(file_get(&file, "d")?);
    let d_range = args.d_range.clone().or(file.get("d_range").cloned());
    let ds = parse_d_list(d, &d_range)?;
    let prec = Prec::from_env();
    let tol = args.tol;
    let chi_sel = parse_chi_selector(&args.chi)?;
    let mut rows: Vec<Value> = Vec::new();
    for &d in &ds {
        let entry = match args.formula.as_str() {
            "dunkl" => {
                let v = prob_dunkl_exact(d)?;
                json!({ "d": d, "formula": "dunkl", "value": format!("{}", v) })
            }
            "concise" => {
                let v = prob_concise(&rat(d as i64, 2), tol, prec)?;
                json!({ "d": d, "formula": "concise", "value": v.value.to_f64(),
                        "measured_ratio": v.measured_ratio, "terms": v.terms })
            }
            "6f5" => {
                let v = prob_induced_6f5(d, tol, prec)?;
                json!({ "d": d, "formula": "6f5", "value": v.to_f64() })
            }
            "integral" => {
                let v = prob_via_t_integral(d, tol, prec)?;
                json!({ "d": d, "formula": "integral", "value": v.to_f64() })
            }
            "ansatz" => {
                let r = match &chi_sel {
                    None => {
                        let ev = ChiEvaluator::new(d, prec)?;
                        prob_ansatz_2d(d, |e| ev.eval(e), tol, prec)?
                    }
                    Some(k) => prob_ansatz_2d(
                        d,
                        |e| chi_xstate(k, e, prec).unwrap_or_else(|_| prec.zero()),
                        tol,
                        prec,
                    )?,
                };
                json!({ "d": d, "formula": "ansatz", "chi": args.chi,
                        "value": r.value.to_f64(),
                        "numerator": r.numerator.to_f64(),
                        "denominator": format!("{}", r.denominator) })
            }
            "all" => {
                let rep = single_report(d, tol, prec)?;
                serde_json::to_value(&rep).expect("report serializes")
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown formula '{}' (dunkl, concise, 6f5, integral, ansatz, all)",
                    other
                )))
            }
        };
        rows.push(entry);
    }
    match args.format.as_str() {
        "json" => {
            let doc = json!({
                "config": {
                    "command": "prob",
                    "d_values": ds,
                    "formula": args.formula,
                    "chi": args.chi,
                    "tol": tol,
                    "precision_bits": prec.bits(),
                },
                "results": rows,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        }
        "csv" => {
            let mut csv = String::new();
            if args.formula == "all" {
                csv.push_str(
                    "d,value_dunkl,value_concise,value_6f5,value_integral,value_ansatz2d,max_pairwise_dev\n",
                );
                for r in &rows {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r["d"],
                        r["value_dunkl"].as_str().unwrap_or(""),
                        r["value_concise"],
                        r["value_6f5"],
                        r["value_integral"],
                        r["value_ansatz2d"],
                        r["max_pairwise_dev"],
                    ));
                }
            } else {
                csv.push_str("d,formula,value\n");
                for r in &rows {
                    let v = if r["value"].is_string() {
                        r["value"].as_str().unwrap().to_string()
                    } else {
                        r["value"].to_string()
                    };
                    csv.push_str(&format!("{},{},{}\n", r["d"], args.formula, v));
                }
            }
            print!("{}", csv);
        }
        other => {
            return Err(Error::Config(format!(
                "unknown format '{}' (csv, json)",
                other
            )))
        }
    }
    Ok(0)
}

pub fn run_chi(args: &ChiArgs) -> Result<i32> {
    let prec = Prec::from_env();
    if args.coeffs {
        let coeffs = chi_poly_coeffs(args.d)?;
        let rendered: Vec<String> = coeffs.iter().map(|c| format!("{}", c)).collect();
        match args.format.as_str() {
            "json" => {
                let doc = json!({
                    "config": { "command": "chi", "d": args.d, "coeffs": true },
                    "powers": (0..coeffs.len()).map(|k| args.d + 2 * k as u32).collect::<Vec<_>>(),
                    "coefficients": rendered,
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            }
            "csv" => {
                println!("power,coefficient");
                for (k, c) in rendered.iter().enumerate() {
                    println!("{},{}", args.d + 2 * k as u32, c);
                }
            }
            _ => println!("{}", rendered.join(", ")),
        }
        return Ok(0);
    }
    let eps = args
        .eps
        .ok_or_else(|| Error::Config("pass --eps or --coeffs".into()))?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain("--eps must lie in [0, 1]".into()));
    }
    let ev = ChiEvaluator::new(args.d, prec)?;
    let v = ev.eval(&prec.f64(eps));
    match args.format.as_str() {
        "json" => {
            let doc = json!({
                "config": { "command": "chi", "d": args.d, "eps": eps,
                            "precision_bits": prec.bits() },
                "value": v.to_f64(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        }
        "csv" => {
            println!("d,eps,chi");
            println!("{},{},{:.17e}", args.d, eps, v.to_f64());
        }
        _ => println!("{:.17}", v.to_f64()),
    }
    Ok(0)
}

pub fn run_sample(args: &SampleArgs) -> Result<i32> {
    let file = match &args.config {
        Some(p) => load_config(p)?,
        None => HashMap::new(),
    };
    let ensemble_name = args
        .ensemble
        .clone()
        .or(file.get("ensemble").cloned())
        .ok_or_else(|| Error::Config("pass --ensemble".into()))?;
    let ensemble = Ensemble::parse(&ensemble_name)?;
    let n = args.n.or(file_get(&file, "n")?).unwrap_or(1_000_000);
    let seed = args.seed.or(file_get(&file, "seed")?).unwrap_or(0);
    let workers = args.workers.or(file_get(&file, "workers")?).unwrap_or(2);
    let bins = args.bins.or(file_get(&file, "bins")?).unwrap_or(200);
    let format = args
        .format
        .clone()
        .or(file.get("format").cloned())
        .unwrap_or_else(|| "json".into());
    let mut cfg = ExperimentConfig::new(ensemble, n, seed);
    cfg.worker_count = workers;
    cfg.bin_count = bins;
    if let Some(axes) = args.axes.clone().or(file.get("axes").cloned()) {
        cfg.axes = axes
            .split(',')
            .map(|a| Axis::parse(a.trim()))
            .collect::<Result<Vec<_>>>()?;
    }
    let prec = Prec::from_env();
    let result = run_experiment(&cfg)?;
    let curve = residual_curve_for(&result, prec)?;
    let content = match format.as_str() {
        "csv" => {
            let pts = curve.ok_or_else(|| {
                Error::Config(
                    "csv output needs an epsilon axis with a reference separability function"
                        .into(),
                )
            })?;
            residual_csv(&pts)
        }
        "json" => {
            let mut doc = json!({
                "config": serde_json::to_value(&cfg).expect("config serializes"),
                "summary": {
                    "total": result.total,
                    "separable": result.separable,
                    "p_hat": result.p_hat,
                    "stderr": result.stderr,
                    "neg2_fraction": result.neg2_fraction,
                    "dominance_violations": result.dominance_violations,
                },
                "bins": serde_json::to_value(&result.bins).expect("bins serialize"),
            });
            if let Some(pts) = curve {
                doc["residual_curve"] = serde_json::to_value(&pts).expect("curve serializes");
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
        other => {
            return Err(Error::Config(format!(
                "unknown format '{}' (csv, json)",
                other
            )))
        }
    };
    write_out(&args.out, &content)?;
    Ok(0)
}

pub fn run_verify(args: &VerifyArgs) -> Result<i32> {
    let suites: Vec<String> = match args.suite.as_str() {
        "all" => vec!["exact".into(), "numeric".into(), "mc".into()],
        s @ ("exact" | "numeric" | "mc") => vec![s.to_string()],
        other => {
            return Err(Error::Config(format!(
                "unknown suite '{}' (exact, numeric, mc, all)",
                other
            )))
        }
    };
    // size the Monte Carlo load to the wall-clock budget (conservative
    // aggregate throughput of ~1.5e5 samples/s across the six ensembles)
    let mc_samples = (args.budget.saturating_mul(150_000)).clamp(100_000, 10_000_000);
    let opts = BatteryOptions {
        suites,
        mc_samples,
        workers: 2,
        seed: 2024,
        inject_failure: args.inject_failure.clone(),
        prec: Prec::from_env(),
    };
    let report = run_full_battery(&opts)?;
    let doc = json!({
        "config": {
            "command": "verify",
            "suite": args.suite,
            "budget_secs": args.budget,
            "mc_samples": mc_samples,
            "precision_bits": opts.prec.bits(),
        },
        "passed": report.passed,
        "failed": report.failed,
        "elapsed_secs": report.elapsed_secs,
        "checks": serde_json::to_value(&report.checks).expect("checks serialize"),
    });
    let mut content = serde_json::to_string_pretty(&doc).expect("json");
    content.push('\n');
    write_out(&args.out, &content)?;
    if args.out.is_some() {
        // short human summary when the full report went to a file
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!(
                "FAIL {}: expected {}, got {}",
                c.check_id, c.expected, c.computed
            );
        }
        eprintln!("{} passed, {} failed", report.passed, report.failed);
    }
    Ok(if report.failed == 0 { 0 } else { 1 })
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Prob(a) => run_prob(a),
        Command::Chi(a) => run_chi(a),
        Command::Sample(a) => run_sample(a),
        Command::Verify(a) => run_verify(a),
    }
}
