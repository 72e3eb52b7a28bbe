//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::time::{Duration, Instant};

use entlab::bounds::{
    builtin_fixture_text, builtin_fixtures, composed_hastings_lhs, f_func, first_violating_d, fixture_for,
    format_fixtures, generate_fixtures, h0, h_d, m_d, m_d_domain_max, m_d_inv, md_series_k, prod_entropy_upper,
    tube_fraction_lower, violation_lower, violation_lower_with, FIXTURE_D_MAX, FIXTURE_D_MIN,
};
use entlab::channels::{ChannelPair, Isometry, Side};
use entlab::experiments::{
    cross_term_check, estimate_min_output_entropy, fannes_check, gradient_check, ks_critical, ks_one_sample,
    lemma12_check, overlap_law_campaign, product_bound_check, pushforward_campaign, residual_check,
    spectrum_law_campaign, tube_fraction_campaign, typicality_campaign, OptimizerConfig, TrialConfig,
};
use entlab::matcore::{eigvalsh, partial_trace, PureState, TraceOut};
use entlab::randq::{random_bipartite_state, random_isometry, RngStream};

const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    note: String,
}

fn outcome(pass: bool, note: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        note: note.into(),
    }
}

fn run(id: usize, title: &str, limit: Duration, f: impl FnOnce() -> Result<Outcome, String>) -> bool {
    let t = Instant::now();
    let res = f();
    let elapsed = t.elapsed();
    let (pass, note) = match res {
        Ok(o) => (o.pass && elapsed < limit, o.note),
        Err(e) => (false, format!("error: {e}")),
    };
    let within = if elapsed < limit { "" } else { " (over time limit)" };
    println!(
        "{} criterion {id:>2} {title}: {note} [{:.2}s / {:.0}s{within}]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn c1() -> Result<Outcome, String> {
    let m = h0();
    Ok(outcome(
        (m.value - 3.351).abs() <= 0.002,
        format!("h0 = {:.6} at gamma = {:.6}", m.value, m.arg),
    ))
}

fn c2() -> Result<Outcome, String> {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for s in [2, 4, 8, 16] {
        let rs = overlap_law_campaign(s, &[0.1, 0.3, 0.5, 0.7], 100_000, SEED, 4.0).map_err(|e| e.to_string())?;
        for r in rs {
            worst = worst.max(r.details["z"].abs());
            if !r.pass {
                fails.push(r.name);
            }
        }
    }
    Ok(outcome(fails.is_empty(), format!("16 cases, max |z| = {worst:.3}, failing {fails:?}")))
}

fn c3() -> Result<Outcome, String> {
    let trials = 20_000;
    let a = spectrum_law_campaign(2, 2, trials, SEED, None).map_err(|e| e.to_string())?;
    let b = spectrum_law_campaign(2, 4, trials, SEED, None).map_err(|e| e.to_string())?;
    // n = 2 against the exact CDF (2w − 1)^3
    let mut samples: Vec<f64> = (0..trials)
        .map(|k| {
            let mut rng = RngStream::for_unit(SEED, 0x0acc, k as u64);
            let z = random_bipartite_state(2, 2, &mut rng).unwrap();
            eigvalsh(partial_trace(&z, 2, 2, TraceOut::SecondN).unwrap().matrix()).unwrap()[0]
        })
        .collect();
    let exact = ks_one_sample(&mut samples, |w| (2.0 * w - 1.0).clamp(0.0, 1.0).powi(3));
    let crit = ks_critical(trials as f64);
    Ok(outcome(
        a.pass && b.pass && exact < crit,
        format!(
            "KS n=2 {:.5}, n=2 exact {:.5}, n=4 {:.5}, critical {:.5}",
            a.estimate, exact, b.estimate, crit
        ),
    ))
}

fn c4() -> Result<Outcome, String> {
    let a = pushforward_campaign(3, 4, 2, 20_000, SEED).map_err(|e| e.to_string())?;
    let b = pushforward_campaign(2, 3, 3, 20_000, SEED).map_err(|e| e.to_string())?;
    Ok(outcome(
        a.pass && b.pass,
        format!(
            "KS (3,4,2) {:.5}, (2,3,3) {:.5}, critical {:.5}",
            a.estimate, b.estimate, a.bound_or_law
        ),
    ))
}

/// Least-squares intercept of `q(y) = (1 − m_d(y)/y)/√y` against `√y`.
fn fitted_k(d: usize) -> Result<f64, String> {
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|i| {
            let y = 1e-8 * 10f64.powf(i as f64 * 3.0 / 19.0);
            let r = m_d(y, d).map_err(|e| e.to_string())? / y;
            Ok((y.sqrt(), (1.0 - r) / y.sqrt()))
        })
        .collect::<Result<_, String>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(my - sxy / sxx * mx)
}

fn c5() -> Result<Outcome, String> {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [2usize, 3, 5, 10] {
        let e = |e: entlab::Error| e.to_string();
        let ymax = m_d_domain_max(d).map_err(e)?;
        let ys: Vec<f64> = (1..=1000).map(|i| ymax * i as f64 / 1001.0).collect();
        let ms: Vec<f64> = ys.iter().map(|&y| m_d(y, d)).collect::<Result<_, _>>().map_err(e)?;
        let mut mono = true;
        let mut min_slope = f64::INFINITY;
        let mut trip = 0.0f64;
        for i in 1..ys.len() {
            mono &= ms[i] > ms[i - 1];
            min_slope = min_slope.min((ms[i] - ms[i - 1]) / (ys[i] - ys[i - 1]));
        }
        for (&y, &m) in ys.iter().zip(&ms) {
            trip = trip.max((m_d_inv(m, d).map_err(e)? - y).abs());
        }
        let k_fit = fitted_k(d)?;
        let k = md_series_k(d).map_err(e)?;
        let series_ok = if k == 0.0 {
            k_fit.abs() <= 1e-3
        } else {
            ((k_fit - k) / k).abs() <= 0.05
        };
        let slope_ok = min_slope >= 1.0 / d as f64 - 1e-8;
        ok &= mono && slope_ok && trip <= 1e-10 && series_ok;
        notes.push(format!(
            "d={d}: mono {mono}, slope {min_slope:.4}, trip {trip:.1e}, k fit {k_fit:.5} vs {k:.5}"
        ));
    }
    Ok(outcome(ok, notes.join("; ")))
}

fn c6() -> Result<Outcome, String> {
    let mut worst_stat = 0.0f64;
    let mut worst_fix = 0.0f64;
    for d in 2..=10 {
        let m = h_d(1.0, 1.0, d).map_err(|e| e.to_string())?;
        let lhs = m_d(f_func(1.0 - m.arg).map_err(|e| e.to_string())? * m.value, d).map_err(|e| e.to_string())?;
        worst_stat = worst_stat.max((lhs + (-m.arg).ln_1p()).abs());
        let fx = fixture_for(d).ok_or(format!("no fixture for d={d}"))?;
        worst_fix = worst_fix.max((fx.h_d11 - m.value).abs());
    }
    Ok(outcome(
        worst_stat <= 1e-8 && worst_fix <= 1e-6,
        format!("stationarity residual {worst_stat:.2e}, fixture gap {worst_fix:.2e}"),
    ))
}

fn c7() -> Result<Outcome, String> {
    let r = product_bound_check(200, SEED).map_err(|e| e.to_string())?;
    Ok(outcome(
        r.pass,
        format!(
            "200 channels, eigenvalue violations {}, entropy violations {}, prod_upper(4,2,4) = {:.5}",
            r.details["eigenvalue_violations"],
            r.details["entropy_violations"],
            prod_entropy_upper(4, 2, 4).unwrap()
        ),
    ))
}

fn c8() -> Result<Outcome, String> {
    let n = 100_000;
    let e = |e: entlab::Error| e.to_string();
    let rs = [
        lemma12_check(n, SEED).map_err(e)?,
        fannes_check(n, SEED).map_err(e)?,
        cross_term_check(n, SEED).map_err(e)?,
        residual_check(n, SEED, 4.0).map_err(e)?,
    ];
    let notes: Vec<String> = rs
        .iter()
        .map(|r| format!("{} {} violations", r.name, r.details["violations"]))
        .collect();
    Ok(outcome(rs.iter().all(|r| r.pass), notes.join(", ")))
}

fn c9() -> Result<Outcome, String> {
    let r = tube_fraction_campaign(16, 16, 2, 0.1, 20_000, SEED, 4.0).map_err(|e| e.to_string())?;
    let lower = tube_fraction_lower(16, 0.1).map_err(|e| e.to_string())?;
    Ok(outcome(
        r.pass && (lower - 0.05147).abs() < 1e-5,
        format!("hit fraction {:.5} vs lower bound {:.5}", r.estimate, lower),
    ))
}

fn c10() -> Result<Outcome, String> {
    let r = typicality_campaign(8, 200, 2, 200, 2000, SEED, 4.0).map_err(|e| e.to_string())?;
    Ok(outcome(
        r.pass,
        format!("atypical rate {:.5} vs bound {:.5}", r.estimate, r.bound_or_law),
    ))
}

fn c11() -> Result<Outcome, String> {
    let e = |e: entlab::Error| e.to_string();
    let cfg = TrialConfig::new((4, 6, 2), 100, SEED).map_err(e)?;
    let g = gradient_check(&cfg, false).map_err(e)?;
    let opt = OptimizerConfig::default();
    let mut worst = 0.0f64;
    let mut rng = RngStream::new(SEED, 11);
    for (s, n, d) in [(6, 3, 2), (4, 2, 2), (9, 3, 3)] {
        let ch = ChannelPair::new(random_isometry(s, n, d, &mut rng).map_err(e)?, false);
        worst = worst.max(estimate_min_output_entropy(&ch, Side::Conjugate, &opt, SEED).map_err(e)?.value);
    }
    // s = 1 with a product image state
    let a = PureState::normalized(vec![
        entlab::matcore::C64::new(0.6, 0.0),
        entlab::matcore::C64::new(0.0, 0.8),
    ])
    .map_err(e)?;
    let b = PureState::basis(3, 1).map_err(e)?;
    let col = PureState::product(&b, &a);
    let ch = ChannelPair::new(Isometry::from_column(&col, 3, 2).map_err(e)?, false);
    let single = estimate_min_output_entropy(&ch, Side::Conjugate, &opt, SEED).map_err(e)?.value;
    Ok(outcome(
        g.pass && worst <= 1e-6 && single.abs() <= 1e-6,
        format!(
            "gradient {:.2}% within 1e-5 (max {:.1e}), full-space S_min {worst:.1e}, pure-image s=1 {single:.1e}",
            100.0 * g.estimate,
            g.details["max_relative_error"]
        ),
    ))
}

fn c12() -> Result<Outcome, String> {
    let fx = fixture_for(2).ok_or("no fixture for d=2")?;
    let h = fx.h_d11 + 0.01;
    let gamma = fx.gamma_m;
    let mut vals = Vec::new();
    for s in [100usize, 1000, 10_000] {
        let v = composed_hastings_lhs(s, s, 2, gamma, h).map_err(|e| format!("s=n={s}: {e}"))?;
        vals.push(v);
    }
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    Ok(outcome(
        decreasing && vals[2] < 0.0,
        format!("LHS {vals:?}"),
    ))
}

fn c13() -> Result<Outcome, String> {
    let e = |e: entlab::Error| e.to_string();
    let mut all_negative = true;
    let mut bitwise = true;
    for row in builtin_fixtures() {
        let v = violation_lower(row.d).map_err(e)?;
        let again = violation_lower_with(row.d, row.h_d11);
        bitwise &= v.value.to_bits() == again.value.to_bits();
        all_negative &= v.value < 0.0;
    }
    let covered = builtin_fixtures().len() == FIXTURE_D_MAX - FIXTURE_D_MIN + 1;
    let regen = format_fixtures(&generate_fixtures(FIXTURE_D_MIN, FIXTURE_D_MAX).map_err(e)?);
    let regen_same = regen == builtin_fixture_text();
    let first = first_violating_d(FIXTURE_D_MAX + 1).map_err(e)?;
    let before = violation_lower(first.d - 1).map_err(e)?;
    let consistent = (first.d as f64) > first.threshold && ((first.d - 1) as f64) <= before.threshold + 1.0;
    Ok(outcome(
        covered && violation_lower(2).map_err(e)?.value < 0.0 && bitwise && regen_same && consistent,
        format!(
            "d<=200 all negative: {all_negative}; first positive d = {} (threshold exp(2h+1) = {:.2}); \
             table bitwise {bitwise}; fixtures regenerate bitwise {regen_same}",
            first.d, first.threshold
        ),
    ))
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome, String>);

fn main() {
    let criteria: [Criterion; 13] = [
        ("h0 constant", secs(1), c1),
        ("overlap law", secs(30), c2),
        ("induced-measure law", secs(30), c3),
        ("pushforward identity", secs(60), c4),
        ("m_d suite", secs(5), c5),
        ("h_d stationarity and fixtures", secs(60), c6),
        ("product-channel bound", secs(120), c7),
        ("inequality suite", secs(120), c8),
        ("tube-fraction lower bound", secs(120), c9),
        ("typicality tail", secs(180), c10),
        ("optimizer validity", secs(60), c11),
        ("divergence trend", secs(1), c12),
        ("violation table", secs(5), c13),
    ];
    let mut failed = Vec::new();
    for (i, (title, limit, f)) in criteria.into_iter().enumerate() {
        if !run(i + 1, title, limit, f) {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} of 13 criteria pass", 13 - failed.len());
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
