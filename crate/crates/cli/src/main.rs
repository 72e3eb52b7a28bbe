mod manifest;
mod range;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entlab::bounds::{
    builtin_fixture_text, first_violating_d, fixture_drift, fmt_sig, format_fixtures, generate_fixtures, hlw_bound,
    parse_fixtures, prod_entropy_upper, thm1_rhs, thm2_rhs, violation_lower, violation_lower_general, BoundParams,
    BoundReport, FIXTURE_D_MAX, FIXTURE_D_MIN,
};
use entlab::channels::{ChannelPair, Side};
use entlab::experiments::{
    estimate_min_output_entropy, estimate_product_entropy, gradient_check, inequality_suite, overlap_law_campaign,
    pushforward_campaign, spectrum_law_campaign, tube_fraction_campaign, typicality_campaign, CampaignResult,
    OptimizerConfig, TrialConfig,
};
use entlab::randq::{mu_cdf_numeric, random_isometry, RngStream, MIN_GRID};
use serde_json::json;

use manifest::{
    params, MinEntRow, MinEntSummary, OracleSummary, ResultRecord, RunManifest, ViolationEntry,
};
use range::{parse_dims, parse_reals};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const DRIFT_TOLERANCE: f64 = 1e-9;
const TAG_MINENT: u32 = 0x201;
const MU_TABLES: [(usize, usize); 3] = [(2, 2), (2, 4), (3, 3)];

#[derive(Parser)]
#[command(name = "entlab", version, about = "Entanglement bounds and random-subspace verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output encoding.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Bound tables over (s, n, d).
    Bounds(BoundsArgs),
    /// Monte Carlo verification campaigns.
    Verify(VerifyArgs),
    /// Minimum output entropy estimates for random embeddings.
    Minent(MinentArgs),
    /// Regenerate the h_d fixture table and the largest-eigenvalue CDF tables.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    d: String,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 4.0)]
    h: f64,
    /// Ratio pair `r1,r2` for h_d; defaults to s/n twice.
    #[arg(long)]
    ratios: Option<String>,
    /// Tabulate violation_lower(d) over the --d range instead.
    #[arg(long)]
    violation: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Overlap,
    Spectrum,
    Pushforward,
    Tube,
    Typicality,
    Inequalities,
    Gradient,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    d: Option<String>,
    /// Comma-separated thresholds for the overlap suite.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Inputs per embedding for the typicality suite.
    #[arg(long)]
    trials_phi: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 4.0)]
    tolerance_sigmas: f64,
}

#[derive(Args)]
struct MinentArgs {
    #[arg(long)]
    s: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    channels: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 1000)]
    probes: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    grad_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4.0)]
    h: f64,
    /// Include the product-channel estimate and the additivity gap.
    #[arg(long)]
    product: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, required = true)]
    regen_fixtures: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Fixture table to compare against; defaults to the compiled-in table.
    #[arg(long)]
    against: Option<PathBuf>,
    #[arg(long, default_value_t = FIXTURE_D_MIN)]
    d_min: usize,
    #[arg(long, default_value_t = FIXTURE_D_MAX)]
    d_max: usize,
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

impl From<entlab::Error> for Failure {
    fn from(e: entlab::Error) -> Self {
        use entlab::Error::*;
        let code = match e {
            DimensionMismatch { .. } | InvalidDimensions(_) | OutOfRange { .. } | Unsupported(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

fn dims(flag: &str, v: &Option<String>, default: &str) -> Result<Vec<usize>, Failure> {
    parse_dims(v.as_deref().unwrap_or(default)).map_err(|e| Failure::usage(format!("--{flag}: {e}")))
}

fn single(flag: &str, v: &[usize]) -> Result<usize, Failure> {
    match v {
        [x] => Ok(*x),
        _ => Err(Failure::usage(format!("--{flag} takes a single value here"))),
    }
}

fn cmd_bounds(a: &BoundsArgs) -> Result<(RunManifest, bool), Failure> {
    let started = now();
    let ds = parse_dims(&a.d).map_err(|e| Failure::usage(format!("--d: {e}")))?;
    let mut results = Vec::new();
    if a.violation {
        let mut first = None;
        for &d in &ds {
            if d < 2 {
                return Err(Failure::usage("--d must be at least 2 for --violation"));
            }
            let row = violation_lower(d)?;
            let positive = row.value > 0.0;
            let is_first = positive && first.is_none();
            if is_first {
                first = Some(d);
            }
            results.push(ResultRecord::Violation(ViolationEntry {
                row,
                positive,
                first_positive: is_first,
            }));
        }
        results.push(ResultRecord::ViolationCrossing(first_violating_d(2)?));
    } else {
        let required = |flag: &str, v: &Option<String>| match v {
            Some(_) => dims(flag, v, ""),
            None => Err(Failure::usage(format!("--{flag} is required without --violation"))),
        };
        let ns = required("n", &a.n)?;
        let ss = required("s", &a.s)?;
        let ratios = match &a.ratios {
            None => None,
            Some(t) => match parse_reals(t).map_err(Failure::usage)?.as_slice() {
                [r1, r2] => Some((*r1, *r2)),
                _ => return Err(Failure::usage("--ratios takes r1,r2")),
            },
        };
        for &d in &ds {
            for &n in &ns {
                for &s in &ss {
                    let p = BoundParams::new(s, n, d, a.gamma, a.h, ratios)?;
                    results.push(ResultRecord::Bound(BoundReport::evaluate(&p)));
                }
            }
        }
    }
    let m = RunManifest {
        command: "bounds".into(),
        params: params([
            ("d", json!(a.d)),
            ("n", json!(a.n)),
            ("s", json!(a.s)),
            ("gamma", json!(a.gamma)),
            ("h", json!(a.h)),
            ("ratios", json!(a.ratios)),
            ("violation", json!(a.violation)),
        ]),
        seed: None,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        started,
        finished: now(),
        results,
    };
    Ok((m, true))
}

fn run_suite(a: &VerifyArgs, suite: Suite) -> Result<Vec<CampaignResult>, Failure> {
    let sig = a.tolerance_sigmas;
    let seed = a.seed;
    Ok(match suite {
        Suite::Overlap => {
            let ss = dims("s", &a.s, "2:16:*2")?;
            let ts = parse_reals(a.t.as_deref().unwrap_or("0.1,0.3,0.5,0.7")).map_err(Failure::usage)?;
            let mut out = Vec::new();
            for s in ss {
                out.extend(overlap_law_campaign(s, &ts, a.trials.unwrap_or(100_000), seed, sig)?);
            }
            out
        }
        Suite::Spectrum => {
            let d = single("d", &dims("d", &a.d, "2")?)?;
            let ns = dims("n", &a.n, if d == 2 { "2,4" } else { "3" })?;
            let mut out = Vec::new();
            for n in ns {
                out.push(spectrum_law_campaign(d, n, a.trials.unwrap_or(20_000), seed, None)?);
            }
            out
        }
        Suite::Pushforward => {
            let triples = match (&a.s, &a.n, &a.d) {
                (None, None, None) => vec![(3, 4, 2), (2, 3, 3)],
                _ => vec![(
                    single("s", &dims("s", &a.s, "3")?)?,
                    single("n", &dims("n", &a.n, "4")?)?,
                    single("d", &dims("d", &a.d, "2")?)?,
                )],
            };
            let mut out = Vec::new();
            for (s, n, d) in triples {
                out.push(pushforward_campaign(s, n, d, a.trials.unwrap_or(20_000), seed)?);
            }
            out
        }
        Suite::Tube => vec![tube_fraction_campaign(
            single("s", &dims("s", &a.s, "16")?)?,
            single("n", &dims("n", &a.n, "16")?)?,
            single("d", &dims("d", &a.d, "2")?)?,
            a.gamma,
            a.trials.unwrap_or(20_000),
            seed,
            sig,
        )?],
        Suite::Typicality => vec![typicality_campaign(
            single("s", &dims("s", &a.s, "8")?)?,
            single("n", &dims("n", &a.n, "200")?)?,
            single("d", &dims("d", &a.d, "2")?)?,
            a.trials.unwrap_or(200),
            a.trials_phi.unwrap_or(2000),
            seed,
            sig,
        )?],
        Suite::Inequalities => inequality_suite(a.trials.unwrap_or(100_000), seed, sig)?,
        Suite::Gradient => {
            let dims3 = (
                single("s", &dims("s", &a.s, "4")?)?,
                single("n", &dims("n", &a.n, "6")?)?,
                single("d", &dims("d", &a.d, "2")?)?,
            );
            let mut cfg = TrialConfig::new(dims3, a.trials.unwrap_or(100), seed)?;
            cfg.tolerance_sigmas = sig;
            vec![gradient_check(&cfg, false)?]
        }
        Suite::All => {
            let mut out = Vec::new();
            for s in [
                Suite::Overlap,
                Suite::Spectrum,
                Suite::Pushforward,
                Suite::Tube,
                Suite::Typicality,
                Suite::Inequalities,
                Suite::Gradient,
            ] {
                out.extend(run_suite(a, s)?);
            }
            out
        }
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<(RunManifest, bool), Failure> {
    let started = now();
    if a.suite == Suite::All && (a.s.is_some() || a.n.is_some() || a.d.is_some() || a.t.is_some()) {
        return Err(Failure::usage("--suite all uses the default dimensions; drop --s/--n/--d/--t"));
    }
    if !(a.tolerance_sigmas > 0.0) {
        return Err(Failure::usage("--tolerance-sigmas must be positive"));
    }
    let results = run_suite(a, a.suite)?;
    let all_pass = results.iter().all(|r| r.pass);
    let suite = a.suite.to_possible_value().map(|v| v.get_name().to_string());
    let m = RunManifest {
        command: "verify".into(),
        params: params([
            ("suite", json!(suite)),
            ("s", json!(a.s)),
            ("n", json!(a.n)),
            ("d", json!(a.d)),
            ("t", json!(a.t)),
            ("trials", json!(a.trials)),
            ("trials_phi", json!(a.trials_phi)),
            ("gamma", json!(a.gamma)),
            ("tolerance_sigmas", json!(a.tolerance_sigmas)),
            ("all_pass", json!(all_pass)),
        ]),
        seed: Some(a.seed),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        started,
        finished: now(),
        results: results.into_iter().map(ResultRecord::Campaign).collect(),
    };
    Ok((m, all_pass))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn cmd_minent(a: &MinentArgs) -> Result<(RunManifest, bool), Failure> {
    let started = now();
    let (s, n, d) = (a.s, a.n, a.d);
    if s == 0 || n == 0 || d == 0 || s > n * d {
        return Err(Failure::usage(format!("need 1 <= s <= n*d, got s={s}, n={n}, d={d}")));
    }
    if a.channels == 0 {
        return Err(Failure::usage("--channels must be positive"));
    }
    let cfg = OptimizerConfig {
        restarts: a.restarts,
        probes: a.probes,
        max_iters: a.max_iters,
        grad_tol: a.grad_tol,
        ..OptimizerConfig::default()
    };
    cfg.validate()?;
    if a.product && s * s > cfg.product_cap {
        return Err(Failure::usage(format!(
            "s^2 = {} exceeds the product cap {}",
            s * s,
            cfg.product_cap
        )));
    }
    let prod_upper = prod_entropy_upper(s, d, n).ok();
    let mut rows = Vec::with_capacity(a.channels);
    for c in 0..a.channels {
        let mut rng = RngStream::for_unit(a.seed, TAG_MINENT, c as u64);
        let w = random_isometry(s, n, d, &mut rng)?;
        let unit_seed = rng.next_u64();
        let ch = ChannelPair::new(w.clone(), false);
        let est = estimate_min_output_entropy(&ch, Side::Conjugate, &cfg, unit_seed)?;
        let mut row = MinEntRow {
            channel: c,
            s,
            n,
            d,
            e_estimate: est.value,
            probe_min: est.probe_min,
            restarts_run: est.restarts_run,
            stalled_restarts: est.stalled_restarts,
            product_at_max_entangled: None,
            product_optimized: None,
            delta_s_estimate: None,
            prod_upper,
            prod_upper_ok: None,
        };
        if a.product {
            let p = estimate_product_entropy(&w, &cfg, unit_seed ^ 0x5bd1_e995)?;
            row.product_at_max_entangled = Some(p.value_at_max_entangled);
            row.product_optimized = Some(p.optimized_value);
            row.delta_s_estimate = Some(2.0 * est.value - p.optimized_value);
            row.prod_upper_ok = prod_upper.map(|u| p.value_at_max_entangled <= u + 1e-9);
        }
        rows.push(row);
    }
    let mut values: Vec<f64> = rows.iter().map(|r| r.e_estimate).collect();
    let summary = MinEntSummary {
        s,
        n,
        d,
        channels: a.channels,
        h: a.h,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        median: median(&mut values),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        thm1_rhs: thm1_rhs(s, d, n, a.h),
        thm2_rhs: thm2_rhs(s, d, n, a.h),
        hlw: hlw_bound(s, d, n).ok(),
        delta_s_lower: if a.product && s * d >= n {
            violation_lower_general(s, n, d, a.h).ok()
        } else {
            None
        },
    };
    let mut results: Vec<ResultRecord> = rows.into_iter().map(ResultRecord::MinEnt).collect();
    results.push(ResultRecord::MinEntSummary(summary));
    let m = RunManifest {
        command: "minent".into(),
        params: params([
            ("s", json!(s)),
            ("n", json!(n)),
            ("d", json!(d)),
            ("channels", json!(a.channels)),
            ("restarts", json!(a.restarts)),
            ("probes", json!(a.probes)),
            ("max_iters", json!(a.max_iters)),
            ("grad_tol", json!(a.grad_tol)),
            ("h", json!(a.h)),
            ("product", json!(a.product)),
        ]),
        seed: Some(a.seed),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        started,
        finished: now(),
        results,
    };
    Ok((m, true))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: EXIT_FAIL,
        msg: format!("{}: {e}", path.display()),
    })
}

fn cmd_oracle(a: &OracleArgs) -> Result<(RunManifest, bool), Failure> {
    let started = now();
    if a.d_min < 2 || a.d_min > a.d_max {
        return Err(Failure::usage("need 2 <= --d-min <= --d-max"));
    }
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Failure {
        code: EXIT_FAIL,
        msg: format!("{}: {e}", a.out_dir.display()),
    })?;
    let rows = generate_fixtures(a.d_min, a.d_max)?;
    let text = format_fixtures(&rows);
    let fixture_path = a.out_dir.join("h_d_fixtures.tsv");
    write_file(&fixture_path, &text)?;

    let mut mu_tables = Vec::new();
    for (d, n) in MU_TABLES {
        let cdf = mu_cdf_numeric(d, n, MIN_GRID)?;
        let mut t = String::from("w\tcdf\n");
        for (w, v) in cdf.nodes().iter().zip(cdf.values()) {
            t.push_str(&format!("{}\t{}\n", fmt_sig(*w, 12), fmt_sig(*v, 12)));
        }
        let p = a.out_dir.join(format!("mu_cdf_d{d}_n{n}.tsv"));
        write_file(&p, &t)?;
        mu_tables.push(p.display().to_string());
    }

    let (reference, ref_text) = match &a.against {
        Some(p) => (
            p.display().to_string(),
            std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        ),
        None => ("builtin".to_string(), builtin_fixture_text().to_string()),
    };
    // compare the rounded tables so that drift means a change in what is written
    let regenerated = parse_fixtures(&text)?;
    let drift = parse_fixtures(&ref_text)
        .ok()
        .and_then(|r| fixture_drift(&regenerated, &r).ok());
    let ok = drift.is_some_and(|x| x <= DRIFT_TOLERANCE);
    if !ok {
        eprintln!(
            "fixture drift against {reference}: {}",
            drift.map_or("tables differ in coverage or format".to_string(), |x| fmt_sig(x, 12))
        );
    }
    let mut results: Vec<ResultRecord> = regenerated.into_iter().map(ResultRecord::Fixture).collect();
    results.push(ResultRecord::Oracle(OracleSummary {
        fixture_path: fixture_path.display().to_string(),
        rows: rows.len(),
        drift,
        drift_tolerance: DRIFT_TOLERANCE,
        reference,
        mu_tables,
    }));
    let m = RunManifest {
        command: "oracle".into(),
        params: params([
            ("regen_fixtures", json!(a.regen_fixtures)),
            ("out_dir", json!(a.out_dir.display().to_string())),
            ("against", json!(a.against.as_ref().map(|p| p.display().to_string()))),
            ("d_min", json!(a.d_min)),
            ("d_max", json!(a.d_max)),
        ]),
        seed: None,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        started,
        finished: now(),
        results,
    };
    Ok((m, ok))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("LAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    configure_threads()?;
    let (manifest, ok) = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a)?,
        Command::Verify(a) => cmd_verify(a)?,
        Command::Minent(a) => cmd_minent(a)?,
        Command::Oracle(a) => cmd_oracle(a)?,
    };
    let text = match cli.format {
        Format::Json => manifest.to_json().map_err(|e| Failure {
            code: EXIT_FAIL,
            msg: e.to_string(),
        })?,
        Format::Csv => manifest.to_csv().map_err(|e| Failure {
            code: EXIT_FAIL,
            msg: e.to_string(),
        })?,
    };
    match &cli.output {
        Some(p) => write_file(p, &text)?,
        None if text.ends_with('\n') => print!("{text}"),
        None => println!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
