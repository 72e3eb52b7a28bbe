//! Monte Carlo verification campaigns.
//!
//! Every trial draws from its own [`RngStream`] keyed by `(seed, tag, index)`,
//! results are collected in index order and reduced sequentially, so a
//! campaign is reproducible bit for bit regardless of the worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optimizer::{entropy_gradient, raw_output_entropy, OptimizerConfig};
use super::stats::{binomial_sigma, ks_critical, ks_one_sample, ks_two_sample, two_sample_n_eff, z_score};
use crate::bounds::{
    f_func, fannes_eta, prob_tc_upper, prod_entropy_upper, prop1a_tail, prop2_tail, tube_feasibility,
    tube_fraction_lower,
};
use crate::channels::{in_tube, typicality_estimate, ChannelPair, Side, TubeSpec};
use crate::error::{Error, Result};
use crate::matcore::{
    eigvalsh, maximally_entangled, norm2, partial_trace, spectral_norm, DensityMatrix, PureState, TraceOut, C64,
};
use crate::randq::{
    mu_cdf_numeric, overlap_decompose, overlap_tail, random_bipartite_state, random_isometry, random_pure_state,
    RngStream,
};

/// Default pass threshold for binomial comparisons.
pub const DEFAULT_SIGMAS: f64 = 4.0;
/// Slack allowed in deterministic inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Attempts at drawing a typical embedding.
pub const TYPICAL_ATTEMPTS: usize = 100;
/// Inputs used to test an embedding for typicality in the tube campaign.
pub const TYPICALITY_INPUTS: usize = 1000;
/// Quadrature sizes for the largest-eigenvalue CDF.
pub const SPECTRUM_GRID_D2: usize = 20_000;
pub const SPECTRUM_GRID_D3: usize = 2_000;
/// Finite-difference step of the gradient check.
pub const FD_STEP: f64 = 1e-5;
/// Gradient-check points with a smaller output eigenvalue are skipped.
pub const FD_MIN_EIGENVALUE: f64 = 1e-6;
/// Dimension triples cycled through by the product-channel check.
pub const PRODUCT_DIMS: [(usize, usize, usize); 3] = [(4, 4, 2), (6, 4, 2), (4, 8, 2)];

const TAG_OVERLAP: u32 = 0x101;
const TAG_SPECTRUM: u32 = 0x102;
const TAG_PUSH_W: u32 = 0x103;
const TAG_PUSH_Z: u32 = 0x104;
const TAG_TUBE_SETUP: u32 = 0x105;
const TAG_TUBE: u32 = 0x106;
const TAG_TYPICAL: u32 = 0x107;
const TAG_LEMMA12: u32 = 0x108;
const TAG_FANNES: u32 = 0x109;
const TAG_CROSS: u32 = 0x10a;
const TAG_RESIDUAL: u32 = 0x10b;
const TAG_PRODUCT: u32 = 0x10c;
const TAG_GRADIENT: u32 = 0x10d;

/// Campaign settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub dims: (usize, usize, usize),
    pub trials: usize,
    pub seed: u64,
    pub tolerance_sigmas: f64,
    pub optimizer: OptimizerConfig,
}

impl TrialConfig {
    pub fn new(dims: (usize, usize, usize), trials: usize, seed: u64) -> Result<Self> {
        let cfg = TrialConfig {
            dims,
            trials,
            seed,
            tolerance_sigmas: DEFAULT_SIGMAS,
            optimizer: OptimizerConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidDimensions("trials must be positive".into()));
        }
        if !(self.tolerance_sigmas > 0.0) {
            return Err(Error::InvalidDimensions("tolerance_sigmas must be positive".into()));
        }
        self.optimizer.validate()
    }
}

/// Outcome of one campaign.
///
/// `margin_sigmas` is the distance to the acceptance boundary, positive when
/// passing: in binomial standard deviations for proportion tests, in units of
/// `1/√n_eff` for KS tests, and `0` for deterministic inequality counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub name: String,
    pub estimate: f64,
    pub bound_or_law: f64,
    pub margin_sigmas: f64,
    pub pass: bool,
    pub samples_used: u64,
    pub wall_time: f64,
    pub details: BTreeMap<String, f64>,
}

impl CampaignResult {
    fn new(name: impl Into<String>, started: Instant) -> Self {
        CampaignResult {
            name: name.into(),
            estimate: 0.0,
            bound_or_law: 0.0,
            margin_sigmas: 0.0,
            pass: false,
            samples_used: 0,
            wall_time: started.elapsed().as_secs_f64(),
            details: BTreeMap::new(),
        }
    }

    fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    /// Stamps the wall time and maps infinities to `±f64::MAX`, so that the
    /// record survives a JSON round trip.
    fn finish(mut self, started: Instant) -> Self {
        self.wall_time = started.elapsed().as_secs_f64();
        self.estimate = finite(self.estimate);
        self.bound_or_law = finite(self.bound_or_law);
        self.margin_sigmas = finite(self.margin_sigmas);
        for v in self.details.values_mut() {
            *v = finite(*v);
        }
        self
    }
}

fn finite(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(f64::MIN, f64::MAX)
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidDimensions("trials must be positive".into()));
    }
    Ok(())
}

/// Runs `f` once per trial on its own stream and returns the results in order.
fn per_trial<T: Send>(
    trials: usize,
    seed: u64,
    tag: u32,
    f: impl Fn(usize, &mut RngStream) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::for_unit(seed, tag, k as u64);
            f(k, &mut rng)
        })
        .collect()
}

fn sample_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Empirical `P(|<ψ|θ>| > t)` against `(1 − t²)^{s−1}` for each `t`, two-sided.
///
/// Each result also reports the sample correlation between `|x|²` and
/// `|<e|φ>|²` for a fixed unit vector `e ⟂ ψ`, which vanishes when `x` and the
/// residual `φ` are independent.
pub fn overlap_law_campaign(
    s: usize,
    t_list: &[f64],
    trials: usize,
    seed: u64,
    tolerance_sigmas: f64,
) -> Result<Vec<CampaignResult>> {
    check_trials(trials)?;
    if s == 0 {
        return Err(Error::InvalidDimensions("s must be positive".into()));
    }
    for &t in t_list {
        overlap_tail(s, t)?;
    }
    let started = Instant::now();
    let psi = PureState::basis(s, 0)?;
    let probe = if s > 1 { Some(PureState::basis(s, 1)?) } else { None };
    let draws: Vec<(f64, f64)> = per_trial(trials, seed, TAG_OVERLAP, |_, rng| {
        let theta = random_pure_state(s, rng)?;
        let x = psi.inner(&theta).norm();
        let residual = match (&probe, overlap_decompose(&psi, &theta)) {
            (Some(e), Ok((_, phi))) => e.inner(&phi).norm_sqr(),
            _ => 0.0,
        };
        Ok((x, residual))
    })?;
    let overlaps: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let x2: Vec<f64> = overlaps.iter().map(|x| x * x).collect();
    let res: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let corr = sample_pearson(&x2, &res);

    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let law = overlap_tail(s, t)?;
        let hits = overlaps.iter().filter(|&&x| x > t).count();
        let est = hits as f64 / trials as f64;
        let sigma = binomial_sigma(law, trials);
        let z = z_score(est, law, sigma);
        let mut r = CampaignResult::new(format!("overlap_law s={s} t={t}"), started)
            .detail("s", s as f64)
            .detail("t", t)
            .detail("sigma", sigma)
            .detail("z", z)
            .detail("independence_correlation", corr)
            .detail("independence_correlation_sigma", 1.0 / (trials as f64).sqrt());
        r.estimate = est;
        r.bound_or_law = law;
        r.margin_sigmas = tolerance_sigmas - z.abs();
        r.pass = z.abs() <= tolerance_sigmas;
        r.samples_used = trials as u64;
        out.push(r.finish(started));
    }
    Ok(out)
}

/// Largest eigenvalue of the `d × d` reduced state of a uniform pure state on
/// `C^{dn}`, compared with the quadrature CDF of `μ_{d, law_n}` by a
/// two-sided KS test. `law_n` defaults to `n`; a different value gives a
/// negative control.
pub fn spectrum_law_campaign(
    d: usize,
    n: usize,
    trials: usize,
    seed: u64,
    law_n: Option<usize>,
) -> Result<CampaignResult> {
    check_trials(trials)?;
    let grid = match d {
        2 => SPECTRUM_GRID_D2,
        3 => SPECTRUM_GRID_D3,
        _ => {
            return Err(Error::Unsupported(format!(
                "spectrum law is tabulated for d in {{2, 3}}, got d={d}"
            )))
        }
    };
    if n < d {
        return Err(Error::InvalidDimensions(format!("need n >= d, got n={n}, d={d}")));
    }
    let started = Instant::now();
    let law_n = law_n.unwrap_or(n);
    let cdf = mu_cdf_numeric(d, law_n, grid)?;
    let mut samples = per_trial(trials, seed, TAG_SPECTRUM, |_, rng| {
        let z = random_bipartite_state(d, n, rng)?;
        let rho = partial_trace(&z, d, n, TraceOut::SecondN)?;
        Ok(eigvalsh(rho.matrix())?[0])
    })?;
    let stat = ks_one_sample(&mut samples, |w| cdf.eval(w));
    let crit = ks_critical(trials as f64);
    let mut r = CampaignResult::new(format!("spectrum_law d={d} n={n}"), started)
        .detail("d", d as f64)
        .detail("n", n as f64)
        .detail("law_n", law_n as f64)
        .detail("grid", grid as f64);
    r.estimate = stat;
    r.bound_or_law = crit;
    r.margin_sigmas = (crit - stat) * (trials as f64).sqrt();
    r.pass = stat < crit;
    r.samples_used = trials as u64;
    Ok(r.finish(started))
}

/// Two-sample KS between the largest eigenvalue of `Φ_W^C(φφ^†)` for random
/// `(W, φ)` and that of the reduced state of a uniform vector in `C^{dn}`.
pub fn pushforward_campaign(s: usize, n: usize, d: usize, trials: usize, seed: u64) -> Result<CampaignResult> {
    check_trials(trials)?;
    if s == 0 || s > n * d {
        return Err(Error::InvalidDimensions(format!("need 1 <= s <= nd, got s={s}")));
    }
    let started = Instant::now();
    let mut a = per_trial(trials, seed, TAG_PUSH_W, |_, rng| {
        let ch = ChannelPair::new(random_isometry(s, n, d, rng)?, false);
        let phi = random_pure_state(s, rng)?;
        Ok(eigvalsh(ch.apply_conjugate(&phi)?.matrix())?[0])
    })?;
    let mut b = per_trial(trials, seed, TAG_PUSH_Z, |_, rng| {
        let z = random_bipartite_state(d, n, rng)?;
        Ok(eigvalsh(partial_trace(&z, d, n, TraceOut::SecondN)?.matrix())?[0])
    })?;
    let stat = ks_two_sample(&mut a, &mut b);
    let n_eff = two_sample_n_eff(trials, trials);
    let crit = ks_critical(n_eff);
    let mut r = CampaignResult::new(format!("pushforward s={s} n={n} d={d}"), started)
        .detail("n_eff", n_eff);
    r.estimate = stat;
    r.bound_or_law = crit;
    r.margin_sigmas = (crit - stat) * n_eff.sqrt();
    r.pass = stat < crit;
    r.samples_used = 2 * trials as u64;
    Ok(r.finish(started))
}

/// `‖Φ^C(φφ^†) − I/d‖_∞` threshold of the event `A_2`.
pub fn a2_threshold(s: usize, n: usize, d: usize) -> f64 {
    let (s, n, d) = (s as f64, n as f64, d as f64);
    (48.0 * d * d * d.ln() / s).sqrt() + 2.0 * (n.ln() / n).sqrt()
}

/// `‖Φ^C(|ψ><φ|)‖_∞` threshold of the event `A_3`.
pub fn a3_threshold(s: usize, d: usize) -> f64 {
    let (s, d) = (s as f64, d as f64);
    (6.0 * d * d * d.ln() / s).sqrt() + (12.0 * d * d * d.ln() / s).sqrt()
}

/// Draws a typical embedding, fixes `ρ = Φ_W^C(ψψ^†)` for one random `ψ`, and
/// estimates the fraction of inputs landing in `Tube(ρ)`. Passes when the
/// fraction is at least `(1/4)(1 − γ)^{s−1}` minus `tolerance_sigmas`
/// binomial deviations.
pub fn tube_fraction_campaign(
    s: usize,
    n: usize,
    d: usize,
    gamma: f64,
    trials: usize,
    seed: u64,
    tolerance_sigmas: f64,
) -> Result<CampaignResult> {
    check_trials(trials)?;
    let (feas_value, feasible) = tube_feasibility(d, s)?;
    if !feasible {
        return Err(Error::Unsupported(format!(
            "tube feasibility fails for d={d}, s={s}: {feas_value} > 1/4"
        )));
    }
    let lower = tube_fraction_lower(s, gamma)?;
    let started = Instant::now();
    let mut setup = RngStream::for_unit(seed, TAG_TUBE_SETUP, 0);
    let mut chosen = None;
    let mut attempts = 0;
    let mut typical_fraction = 0.0;
    while attempts < TYPICAL_ATTEMPTS {
        attempts += 1;
        let ch = ChannelPair::new(random_isometry(s, n, d, &mut setup)?, false);
        let (frac, ok) = typicality_estimate(&ch, TYPICALITY_INPUTS, &mut setup)?;
        if ok {
            typical_fraction = frac;
            chosen = Some(ch);
            break;
        }
    }
    let ch = chosen.ok_or_else(|| {
        Error::Degenerate(format!("no typical embedding in {TYPICAL_ATTEMPTS} attempts"))
    })?;
    let psi = random_pure_state(s, &mut setup)?;
    let rho = ch.apply_conjugate(&psi)?;
    let spec = TubeSpec::new(rho, gamma, s, n)?;
    let t2 = a2_threshold(s, n, d);
    let t3 = a3_threshold(s, d);
    let t_prop2 = (6.0 * (d * d) as f64 * (d as f64).ln() / s as f64).sqrt();
    let mixed = DensityMatrix::maximally_mixed(d);

    // (in tube, A1, not A2, not A3, prop2 event)
    let draws = per_trial(trials, seed, TAG_TUBE, |_, rng| {
        let theta = random_pure_state(s, rng)?;
        let hit = in_tube(&ch.apply_conjugate(&theta)?, &spec)?;
        let (x, phi) = match overlap_decompose(&psi, &theta) {
            Ok(v) => v,
            Err(Error::Degenerate(_)) => return Ok((hit, true, false, false, false)),
            Err(e) => return Err(e),
        };
        let a1 = x.norm_sqr() >= gamma;
        let out_phi = ch.apply_conjugate(&phi)?;
        let a2c = spectral_norm(&(out_phi.matrix() - mixed.matrix()))? > t2;
        let a3c = spectral_norm(&ch.cross_term(&psi, &phi)?)? > t3;
        let p2 = ch.cross_term(&theta, &psi)?.fro_norm() > t_prop2;
        Ok((hit, a1, a2c, a3c, p2))
    })?;
    let count = |f: fn(&(bool, bool, bool, bool, bool)) -> bool| draws.iter().filter(|d| f(d)).count();
    let hits = count(|d| d.0);
    let a1 = count(|d| d.1);
    let a2c = count(|d| d.2);
    let a3c = count(|d| d.3);
    let p2 = count(|d| d.4);
    let tf = trials as f64;
    let est = hits as f64 / tf;
    let sigma = binomial_sigma(lower, trials);
    let mut r = CampaignResult::new(format!("tube_fraction s={s} n={n} d={d} gamma={gamma}"), started)
        .detail("tube_radius", spec.radius)
        .detail("typicality_fraction", typical_fraction)
        .detail("typical_attempts", attempts as f64)
        .detail("feasibility_value", feas_value)
        .detail("sigma", sigma)
        .detail("a1_rate", a1 as f64 / tf)
        .detail("a1_law", (1.0 - gamma).powi(s as i32 - 1))
        .detail("a2_complement_rate", a2c as f64 / tf)
        .detail("a2_threshold", t2)
        .detail("a3_complement_rate", a3c as f64 / tf)
        .detail("a3_threshold", t3)
        .detail("prop2_rate", p2 as f64 / tf)
        .detail("prop2_t", t_prop2)
        .detail("prop2_tail_bound", prop2_tail(s, d, t_prop2));
    r.estimate = est;
    r.bound_or_law = lower;
    r.margin_sigmas = if sigma > 0.0 {
        (est - lower) / sigma + tolerance_sigmas
    } else {
        f64::INFINITY
    };
    r.pass = est >= lower - tolerance_sigmas * sigma;
    r.samples_used = trials as u64;
    Ok(r.finish(started))
}

/// Fraction of sampled embeddings failing typicality against
/// `prob_tc_upper(s, n, d)`, one-sided.
pub fn typicality_campaign(
    s: usize,
    n: usize,
    d: usize,
    trials_w: usize,
    trials_phi: usize,
    seed: u64,
    tolerance_sigmas: f64,
) -> Result<CampaignResult> {
    check_trials(trials_w)?;
    check_trials(trials_phi)?;
    let bound = prob_tc_upper(s, n, d)?;
    let started = Instant::now();
    let fracs = per_trial(trials_w, seed, TAG_TYPICAL, |_, rng| {
        let ch = ChannelPair::new(random_isometry(s, n, d, rng)?, false);
        typicality_estimate(&ch, trials_phi, rng)
    })?;
    let atypical = fracs.iter().filter(|f| !f.1).count();
    let min_fraction = fracs.iter().map(|f| f.0).fold(1.0, f64::min);
    let est = atypical as f64 / trials_w as f64;
    let sigma = binomial_sigma(bound, trials_w);
    let mut r = CampaignResult::new(format!("typicality s={s} n={n} d={d}"), started)
        .detail("atypical", atypical as f64)
        .detail("min_in_ball_fraction", min_fraction)
        .detail("sigma", sigma)
        .detail("inputs_per_embedding", trials_phi as f64);
    r.estimate = est;
    r.bound_or_law = bound;
    r.margin_sigmas = if sigma > 0.0 {
        (bound - est) / sigma + tolerance_sigmas
    } else if est <= bound {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    r.pass = est <= bound + tolerance_sigmas * sigma;
    r.samples_used = (trials_w * trials_phi) as u64;
    Ok(r.finish(started))
}

fn violation_result(
    name: &str,
    started: Instant,
    trials: usize,
    excesses: &[f64],
    skipped: usize,
) -> CampaignResult {
    let violations = excesses.iter().filter(|&&e| e > 0.0).count();
    let worst = excesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut r = CampaignResult::new(name, started)
        .detail("violations", violations as f64)
        .detail("skipped", skipped as f64)
        .detail("slack", INEQUALITY_SLACK);
    r.estimate = worst;
    r.bound_or_law = 0.0;
    r.pass = violations == 0;
    r.samples_used = trials as u64;
    r.finish(started)
}

fn random_simplex(d: usize, rng: &mut RngStream) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -rng.uniform_open0().ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

fn sum_f_scaled(w: &[f64]) -> Result<f64> {
    let d = w.len() as f64;
    w.iter().map(|&x| f_func(x * d)).sum()
}

/// `f(x) ≤ f(rx + 1 − r)/f(1 − γ)` for `x ∈ (0, 50]`, `r ∈ [γ, 1]`.
pub fn lemma12_check(trials: usize, seed: u64) -> Result<CampaignResult> {
    check_trials(trials)?;
    let started = Instant::now();
    let excess = per_trial(trials, seed, TAG_LEMMA12, |k, rng| {
        let gamma = rng.uniform_in(1e-6, 1.0 - 1e-6);
        let r = if k % 10 == 0 { 1.0 } else { rng.uniform_in(gamma, 1.0) };
        let x = if k % 2 == 0 {
            rng.uniform_in(-12.0, 50f64.ln()).exp()
        } else {
            rng.uniform_open0() * 50.0
        };
        let lhs = f_func(x)?;
        let rhs = f_func(r * x + 1.0 - r)? / f_func(1.0 - gamma)?;
        Ok(lhs - rhs - INEQUALITY_SLACK * (1.0 + rhs.abs()))
    })?;
    Ok(violation_result("lemma12", started, trials, &excess, 0))
}

/// `|Σ f(θ_i d) − Σ f(z_i d)| ≤ d ε_m (log d + log 1/ε_m)` for spectra `z` and
/// zero-sum perturbations `θ = z + ε` inside the simplex with `ε_m < 1`.
pub fn fannes_check(trials: usize, seed: u64) -> Result<CampaignResult> {
    check_trials(trials)?;
    let started = Instant::now();
    let rows = per_trial(trials, seed, TAG_FANNES, |k, rng| {
        let d = 2 + (k % 5);
        let z = random_simplex(d, rng);
        let target = random_simplex(d, rng);
        let t = if k % 50 == 0 { 0.0 } else { rng.uniform() };
        let theta: Vec<f64> = z.iter().zip(&target).map(|(a, b)| a + t * (b - a)).collect();
        let eps_m: f64 = theta.iter().zip(&z).map(|(a, b)| (a - b).abs()).sum();
        if eps_m >= 1.0 {
            return Ok(None);
        }
        let lhs = (sum_f_scaled(&theta)? - sum_f_scaled(&z)?).abs();
        let eta = fannes_eta(eps_m, d)?;
        Ok(Some(lhs - eta - INEQUALITY_SLACK))
    })?;
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let excess: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(violation_result("fannes", started, trials, &excess, skipped))
}

/// `‖Φ^C(|u><v|)‖_2 ≤ d ‖u‖ ‖v‖` over random channels and unnormalised vectors.
pub fn cross_term_check(trials: usize, seed: u64) -> Result<CampaignResult> {
    check_trials(trials)?;
    const DIMS: [(usize, usize, usize); 4] = [(3, 4, 2), (4, 3, 3), (5, 6, 2), (2, 2, 4)];
    let started = Instant::now();
    let excess = per_trial(trials, seed, TAG_CROSS, |k, rng| {
        let (s, n, d) = DIMS[k % DIMS.len()];
        let ch = ChannelPair::new(random_isometry(s, n, d, rng)?, false);
        let su = rng.uniform_in(0.1, 3.0);
        let sv = rng.uniform_in(0.1, 3.0);
        let u: Vec<C64> = (0..s).map(|_| rng.complex_normal() * su).collect();
        let v: Vec<C64> = (0..s).map(|_| rng.complex_normal() * sv).collect();
        let zu = ch.effective().embed(&u)?;
        let zv = ch.effective().embed(&v)?;
        let mut acc = crate::matcore::CMat::zeros(d, d);
        for i in 0..n {
            for kk in 0..d {
                for l in 0..d {
                    acc[(kk, l)] += zu[i * d + kk] * zv[i * d + l].conj();
                }
            }
        }
        let rhs = d as f64 * norm2(&u) * norm2(&v);
        Ok(acc.fro_norm() - rhs - INEQUALITY_SLACK * (1.0 + rhs))
    })?;
    Ok(violation_result("cross_term", started, trials, &excess, 0))
}

/// Pointwise `‖θ − φ‖_2 ≤ √2 |<ψ|θ>|`, and the tail
/// `P(‖θ − φ‖_2 > t) ≤ (1 − t²/2)^{s−1}` checked one-sided on a grid of `t`.
pub fn residual_check(trials: usize, seed: u64, tolerance_sigmas: f64) -> Result<CampaignResult> {
    check_trials(trials)?;
    const S_VALUES: [usize; 4] = [2, 4, 8, 16];
    const T_GRID: [f64; 4] = [0.1, 0.3, 0.5, 0.7];
    let started = Instant::now();
    let rows = per_trial(trials, seed, TAG_RESIDUAL, |k, rng| {
        let s = S_VALUES[k % S_VALUES.len()];
        let psi = random_pure_state(s, rng)?;
        let theta = random_pure_state(s, rng)?;
        match overlap_decompose(&psi, &theta) {
            Ok((x, phi)) => {
                let dist: f64 = theta
                    .amplitudes()
                    .iter()
                    .zip(phi.amplitudes())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                let rhs = 2f64.sqrt() * x.norm();
                Ok(Some((s, dist, dist - rhs - INEQUALITY_SLACK)))
            }
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let rows: Vec<(usize, f64, f64)> = rows.into_iter().flatten().collect();
    let excess: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let mut r = violation_result("overlap_residual", started, trials, &excess, skipped);
    let mut tail_ok = true;
    let mut worst_margin = f64::INFINITY;
    for &s in &S_VALUES {
        let dists: Vec<f64> = rows.iter().filter(|r| r.0 == s).map(|r| r.1).collect();
        if dists.is_empty() {
            continue;
        }
        for &t in &T_GRID {
            let bound = prop1a_tail(s, t);
            let est = dists.iter().filter(|&&x| x > t).count() as f64 / dists.len() as f64;
            let sigma = binomial_sigma(bound, dists.len());
            let ok = est <= bound + tolerance_sigmas * sigma;
            tail_ok &= ok;
            if sigma > 0.0 {
                worst_margin = worst_margin.min((bound - est) / sigma + tolerance_sigmas);
            }
            r.details.insert(format!("tail_s{s}_t{t}_rate"), est);
            r.details.insert(format!("tail_s{s}_t{t}_bound"), bound);
        }
    }
    r.details.insert("tail_pass".into(), if tail_ok { 1.0 } else { 0.0 });
    r.margin_sigmas = worst_margin;
    r.pass &= tail_ok;
    Ok(r.finish(started))
}

/// Largest eigenvalue of `(Φ^C ⊗ Φ̄^C)(ψ̂ψ̂^†)` at least `s/(dn)` and its
/// entropy at most `prod_entropy_upper(s, d, n)`, over random channels
/// cycling through [`PRODUCT_DIMS`].
pub fn product_bound_check(channels: usize, seed: u64) -> Result<CampaignResult> {
    check_trials(channels)?;
    let started = Instant::now();
    let rows = per_trial(channels, seed, TAG_PRODUCT, |k, rng| {
        let (s, n, d) = PRODUCT_DIMS[k % PRODUCT_DIMS.len()];
        let w = random_isometry(s, n, d, rng)?;
        let big = ChannelPair::new(w.product_with_conj(), false);
        let out = big.apply_conjugate(&maximally_entangled(s)?)?;
        let spec = out.spectrum()?;
        let eig_excess = s as f64 / (d * n) as f64 - spec.largest() - INEQUALITY_SLACK;
        let ent_excess =
            crate::matcore::von_neumann_entropy(&spec) - prod_entropy_upper(s, d, n)? - INEQUALITY_SLACK;
        Ok((eig_excess, ent_excess))
    })?;
    let eig: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ent: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let all: Vec<f64> = eig.iter().chain(&ent).copied().collect();
    let eig_v = eig.iter().filter(|&&e| e > 0.0).count();
    let ent_v = ent.iter().filter(|&&e| e > 0.0).count();
    Ok(violation_result("product_bound", started, channels, &all, 0)
        .detail("eigenvalue_violations", eig_v as f64)
        .detail("entropy_violations", ent_v as f64)
        .detail("worst_eigenvalue_excess", eig.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .detail("worst_entropy_excess", ent.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
}

/// The `f`-ratio, Fannes, cross-term, overlap-residual and product-channel checks.
/// `trials` draws per check; the product check uses 100 channels.
pub fn inequality_suite(trials: usize, seed: u64, tolerance_sigmas: f64) -> Result<Vec<CampaignResult>> {
    Ok(vec![
        lemma12_check(trials, seed)?,
        fannes_check(trials, seed)?,
        cross_term_check(trials, seed)?,
        residual_check(trials, seed, tolerance_sigmas)?,
        product_bound_check(100, seed)?,
    ])
}

/// Analytic entropy gradient against central finite differences (step
/// [`FD_STEP`]) of the conjugate-channel objective at random `(W, φ)`.
/// Passes when at least 99% of admissible points have relative error below
/// `1e-5` and none exceed `1e-4`. `corrupt` flips the analytic gradient's
/// sign, as a negative control.
pub fn gradient_check(cfg: &TrialConfig, corrupt: bool) -> Result<CampaignResult> {
    cfg.validate()?;
    let (s, n, d) = cfg.dims;
    let started = Instant::now();
    let rows = per_trial(cfg.trials, cfg.seed, TAG_GRADIENT, |_, rng| {
        let ch = ChannelPair::new(random_isometry(s, n, d, rng)?, false);
        let phi = random_pure_state(s, rng)?.into_amplitudes();
        let out = ch.output_of_image(&ch.effective().embed(&phi)?, Side::Conjugate)?;
        let w = eigvalsh(&out)?;
        if w[w.len() - 1] < FD_MIN_EIGENVALUE {
            return Ok(None);
        }
        let mut g = entropy_gradient(&ch, Side::Conjugate, &phi)?;
        if corrupt {
            for x in g.iter_mut() {
                *x = -*x;
            }
        }
        let mut diff2 = 0.0;
        let mut ref2 = 0.0;
        for k in 0..s {
            for (dir, analytic) in [(C64::new(1.0, 0.0), g[k].re), (C64::new(0.0, 1.0), g[k].im)] {
                let mut p = phi.clone();
                let mut m = phi.clone();
                p[k] += dir * FD_STEP;
                m[k] -= dir * FD_STEP;
                let fd = (raw_output_entropy(&ch, Side::Conjugate, &p)?
                    - raw_output_entropy(&ch, Side::Conjugate, &m)?)
                    / (2.0 * FD_STEP);
                diff2 += (fd - analytic).powi(2);
                ref2 += fd * fd;
            }
        }
        Ok(Some(diff2.sqrt() / ref2.sqrt().max(1e-300)))
    })?;
    let errs: Vec<f64> = rows.into_iter().flatten().collect();
    let admissible = errs.len();
    let good = errs.iter().filter(|&&e| e < 1e-5).count();
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let frac = if admissible > 0 { good as f64 / admissible as f64 } else { 0.0 };
    let mut r = CampaignResult::new(format!("gradient_check s={s} n={n} d={d}"), started)
        .detail("admissible", admissible as f64)
        .detail("max_relative_error", worst)
        .detail("corrupted", if corrupt { 1.0 } else { 0.0 });
    r.estimate = frac;
    r.bound_or_law = 0.99;
    r.pass = admissible > 0 && frac >= 0.99 && worst < 1e-4;
    r.samples_used = cfg.trials as u64;
    Ok(r.finish(started))
}
