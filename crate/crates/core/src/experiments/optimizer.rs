//! Multistart projected-gradient minimisation of output entropy over the unit
//! sphere of `C^s`.
//!
//! For `z = Wφ` and an output `ρ` obtained by a partial trace of `zz^†`, the
//! differential `dS = −Tr((log ρ + I) dρ)` pulls back to the Euclidean
//! gradient `g = 2 W^† L z`, where `L` places `G = −(log ρ + I)` on the kept
//! factor: `I_n ⊗ G` for the conjugate channel and `G ⊗ I_d` for the direct
//! one. With `<a|b> = Σ conj(a_k) b_k`, `S(φ + tδ) = S(φ) + t Re<δ|g> + O(t²)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelPair, Isometry, Side};
use crate::error::{Error, Result};
use crate::matcore::state::shannon_entropy;
use crate::matcore::{eigh, eigvalsh, maximally_entangled, PureState, C64, ZERO};
use crate::randq::{random_pure_state, RngStream};

/// Eigenvalue floor inside `log ρ` for gradient evaluation.
pub const LOG_FLOOR: f64 = 1e-12;
/// Default cap on `s²` for the product-channel optimisation.
pub const PRODUCT_CAP: usize = 256;

const TAG_PROBE: u32 = 0x0b1;
const TAG_PRODUCT_PROBE: u32 = 0x0b2;

/// Armijo backtracking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Armijo {
    pub initial_step: f64,
    pub shrink: f64,
    pub slope: f64,
}

impl Default for Armijo {
    fn default() -> Self {
        Armijo {
            initial_step: 1.0,
            shrink: 0.5,
            slope: 1e-4,
        }
    }
}

/// Optimiser settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub probes: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_rule: Armijo,
    pub product_cap: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            probes: 1000,
            max_iters: 500,
            grad_tol: 1e-8,
            step_rule: Armijo::default(),
            product_cap: PRODUCT_CAP,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.probes == 0 {
            return Err(Error::InvalidDimensions("restarts and probes must be positive".into()));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidDimensions("grad_tol must be positive".into()));
        }
        let a = self.step_rule;
        if !(a.initial_step > 0.0 && a.shrink > 0.0 && a.shrink < 1.0 && a.slope > 0.0 && a.slope < 1.0) {
            return Err(Error::InvalidDimensions("invalid Armijo parameters".into()));
        }
        Ok(())
    }
}

fn entropy_of_values(w: Vec<f64>) -> f64 {
    let total: f64 = w.iter().filter(|&&x| x > 0.0).sum();
    let p: Vec<f64> = w.iter().map(|&x| x.max(0.0) / total).collect();
    shannon_entropy(&p)
}

/// Output entropy `S(ρ(φ))` for a unit vector `φ`.
pub fn output_entropy(ch: &ChannelPair, side: Side, phi: &[C64]) -> Result<f64> {
    let z = ch.effective().embed(phi)?;
    let rho = ch.output_of_image(&z, side)?;
    Ok(entropy_of_values(eigvalsh(&rho)?))
}

/// `−Tr(ρ log ρ)` for the unnormalised output of an arbitrary vector `φ`; its
/// Euclidean gradient is [`entropy_gradient`].
pub fn raw_output_entropy(ch: &ChannelPair, side: Side, phi: &[C64]) -> Result<f64> {
    let z = ch.effective().embed(phi)?;
    let rho = ch.output_of_image(&z, side)?;
    Ok(shannon_entropy(&eigvalsh(&rho)?))
}

/// `g = 2 W^† L z` with `G = −(log ρ + I)`, eigenvalues floored at [`LOG_FLOOR`].
pub fn entropy_gradient(ch: &ChannelPair, side: Side, phi: &[C64]) -> Result<Vec<C64>> {
    let (_, n, d) = ch.dims();
    let w = ch.effective().matrix();
    let z = w.matvec(phi)?;
    let rho = ch.output_of_image(&z, side)?;
    let e = eigh(&rho)?;
    let g = e.map(|x| -(x.max(LOG_FLOOR).ln() + 1.0));
    let mut y = vec![ZERO; z.len()];
    match side {
        Side::Conjugate => {
            for i in 0..n {
                for k in 0..d {
                    let mut acc = ZERO;
                    for l in 0..d {
                        acc += g[(k, l)] * z[i * d + l];
                    }
                    y[i * d + k] = acc;
                }
            }
        }
        Side::Direct => {
            for i in 0..n {
                for j in 0..d {
                    let mut acc = ZERO;
                    for k in 0..n {
                        acc += g[(i, k)] * z[k * d + j];
                    }
                    y[i * d + j] = acc;
                }
            }
        }
    }
    let mut grad = w.adjoint_matvec(&y)?;
    for v in grad.iter_mut() {
        *v *= 2.0;
    }
    Ok(grad)
}

/// Tangent projection `g − Re<φ|g> φ`.
pub fn project_tangent(phi: &[C64], g: &[C64]) -> Vec<C64> {
    let re = crate::matcore::inner(phi, g).re;
    g.iter().zip(phi).map(|(gi, pi)| gi - pi * re).collect()
}

fn norm(v: &[C64]) -> f64 {
    crate::matcore::norm2(v)
}

/// Outcome of one descent run.
#[derive(Debug, Clone)]
pub struct Descent {
    pub value: f64,
    pub point: Vec<C64>,
    pub iterations: usize,
    pub converged: bool,
    /// Line search failed to decrease before the gradient test passed.
    pub stalled: bool,
}

/// Projected gradient descent with renormalisation retraction and Armijo
/// backtracking from a unit-norm start.
pub fn descend(ch: &ChannelPair, side: Side, start: &[C64], cfg: &OptimizerConfig) -> Result<Descent> {
    let mut phi = start.to_vec();
    let mut value = output_entropy(ch, side, &phi)?;
    let a = cfg.step_rule;
    for it in 0..cfg.max_iters {
        let g = project_tangent(&phi, &entropy_gradient(ch, side, &phi)?);
        let gn = norm(&g);
        if gn < cfg.grad_tol {
            return Ok(Descent { value, point: phi, iterations: it, converged: true, stalled: false });
        }
        let mut t = a.initial_step;
        let mut accepted = None;
        while t * gn > 1e-16 {
            let cand: Vec<C64> = phi.iter().zip(&g).map(|(p, gi)| p - gi * t).collect();
            let cn = norm(&cand);
            let cand: Vec<C64> = cand.into_iter().map(|c| c / cn).collect();
            let v = output_entropy(ch, side, &cand)?;
            if v <= value - a.slope * t * gn * gn {
                accepted = Some((cand, v));
                break;
            }
            t *= a.shrink;
        }
        match accepted {
            Some((p, v)) => {
                phi = p;
                value = v;
            }
            None => {
                return Ok(Descent { value, point: phi, iterations: it, converged: false, stalled: true })
            }
        }
    }
    Ok(Descent { value, point: phi, iterations: cfg.max_iters, converged: false, stalled: false })
}

/// Result of a multistart minimisation.
#[derive(Debug, Clone)]
pub struct MinEntropy {
    pub value: f64,
    pub argmin: PureState,
    pub probe_min: f64,
    pub restarts_run: usize,
    pub stalled_restarts: usize,
}

fn multistart(
    ch: &ChannelPair,
    side: Side,
    cfg: &OptimizerConfig,
    seed: u64,
    tag: u32,
    extra_starts: Vec<Vec<C64>>,
) -> Result<MinEntropy> {
    cfg.validate()?;
    let s = ch.dims().0;
    let probes: Vec<(f64, Vec<C64>)> = (0..cfg.probes)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::for_unit(seed, tag, k as u64);
            let phi = random_pure_state(s, &mut rng)?.into_amplitudes();
            Ok((output_entropy(ch, side, &phi)?, phi))
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..probes.len()).collect();
    order.sort_by(|&i, &j| probes[i].0.total_cmp(&probes[j].0).then(i.cmp(&j)));
    let probe_min = probes[order[0]].0;
    let mut starts: Vec<Vec<C64>> = extra_starts;
    starts.extend(order.iter().take(cfg.restarts).map(|&i| probes[i].1.clone()));
    let runs: Vec<Descent> = starts
        .par_iter()
        .map(|st| descend(ch, side, st, cfg))
        .collect::<Result<_>>()?;
    let stalled = runs.iter().filter(|r| r.stalled).count();
    let mut best_value = probe_min;
    let mut best_point = probes[order[0]].1.clone();
    for r in &runs {
        if r.value < best_value {
            best_value = r.value;
            best_point = r.point.clone();
        }
    }
    Ok(MinEntropy {
        value: best_value,
        argmin: PureState::normalized(best_point)?,
        probe_min,
        restarts_run: runs.len(),
        stalled_restarts: stalled,
    })
}

/// Multistart estimate of `S_min` of the chosen channel, an upper bound on
/// the true minimum.
pub fn estimate_min_output_entropy(
    ch: &ChannelPair,
    which: Side,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<MinEntropy> {
    let s = ch.dims().0;
    if s == 1 {
        let phi = vec![C64::new(1.0, 0.0)];
        let v = output_entropy(ch, which, &phi)?;
        return Ok(MinEntropy {
            value: v,
            argmin: PureState::new(phi)?,
            probe_min: v,
            restarts_run: 0,
            stalled_restarts: 0,
        });
    }
    multistart(ch, which, cfg, seed, TAG_PROBE, Vec::new())
}

/// Product-channel entropies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductEntropy {
    /// `S((Φ^C ⊗ Φ̄^C)(ψ̂ψ̂^†))`.
    pub value_at_max_entangled: f64,
    /// Multistart minimum over the `s²`-sphere, seeded with `ψ̂`.
    pub optimized_value: f64,
}

/// Entropy of `Φ^C ⊗ Φ̄^C` at the maximally entangled input and its multistart
/// minimum.
pub fn estimate_product_entropy(w: &Isometry, cfg: &OptimizerConfig, seed: u64) -> Result<ProductEntropy> {
    let s = w.s();
    if s * s > cfg.product_cap {
        return Err(Error::Unsupported(format!(
            "s^2 = {} exceeds the product cap {}",
            s * s,
            cfg.product_cap
        )));
    }
    let big = ChannelPair::new(w.product_with_conj(), false);
    let psi_hat = maximally_entangled(s)?;
    let at_hat = output_entropy(&big, Side::Conjugate, psi_hat.amplitudes())?;
    if w.d() == 1 || s == 1 {
        return Ok(ProductEntropy {
            value_at_max_entangled: at_hat,
            optimized_value: at_hat,
        });
    }
    let m = multistart(
        &big,
        Side::Conjugate,
        cfg,
        seed,
        TAG_PRODUCT_PROBE,
        vec![psi_hat.into_amplitudes()],
    )?;
    Ok(ProductEntropy {
        value_at_max_entangled: at_hat,
        optimized_value: m.value.min(at_hat),
    })
}
