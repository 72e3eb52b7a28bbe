//! Output-space geometry: the segment `L_γ(ρ)`, the tube around it, the ball
//! `B_d(n)` around `I/d`, and the typicality test.

use super::pair::ChannelPair;
use crate::error::{Error, Result};
use crate::matcore::{eigvalsh, CMat, DensityMatrix};
use crate::randq::{random_pure_state, RngStream};

/// Ternary-search iteration cap.
pub const TUBE_MAX_ITERS: usize = 200;
/// Ternary-search tolerance in `r`.
pub const TUBE_TOL: f64 = 1e-10;
/// Constant `13` of the tube radius, used verbatim.
pub const TUBE_CONSTANT: f64 = 13.0;
/// Ball constant `b = 2`.
pub const BALL_CONSTANT: f64 = 2.0;

/// `2 √(log n / n)`.
pub fn ball_radius(n: usize) -> f64 {
    let n = n as f64;
    BALL_CONSTANT * (n.ln() / n).sqrt()
}

/// `2 √(log n / n) + 13 d √(log d / s)`.
pub fn tube_radius(s: usize, n: usize, d: usize) -> f64 {
    let (s, d) = (s as f64, d as f64);
    ball_radius(n) + TUBE_CONSTANT * d * (d.ln() / s).sqrt()
}

/// Tube around the segment from `center` towards `I/d`.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub center: DensityMatrix,
    pub gamma: f64,
    pub radius: f64,
    pub dims: (usize, usize, usize),
}

impl TubeSpec {
    pub fn new(center: DensityMatrix, gamma: f64, s: usize, n: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(crate::error::out_of_range("gamma", gamma, "(0, 1)"));
        }
        if s == 0 || n == 0 {
            return Err(Error::InvalidDimensions("s and n must be positive".into()));
        }
        let d = center.dim();
        Ok(TubeSpec {
            center,
            gamma,
            radius: tube_radius(s, n, d),
            dims: (s, n, d),
        })
    }

    /// `r ρ + (1 − r) I/d`.
    pub fn segment_point(&self, r: f64) -> CMat {
        self.center.mix_with_identity(r)
    }
}

fn distance_at(theta: &CMat, spec: &TubeSpec, r: f64) -> Result<f64> {
    let diff = theta - &spec.segment_point(r);
    let w = eigvalsh(&diff)?;
    Ok(w[0].abs().max(w[w.len() - 1].abs()))
}

/// `min_{γ ≤ r ≤ 1} ‖θ − (rρ + (1 − r) I/d)‖_∞` by ternary search.
pub fn tube_distance(theta: &DensityMatrix, spec: &TubeSpec) -> Result<f64> {
    if theta.dim() != spec.center.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.center.dim(),
            got: theta.dim(),
        });
    }
    let t = theta.matrix();
    let (mut lo, mut hi) = (spec.gamma, 1.0);
    let mut iters = 0;
    while hi - lo > TUBE_TOL && iters < TUBE_MAX_ITERS {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if distance_at(t, spec, m1)? <= distance_at(t, spec, m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
        iters += 1;
    }
    let mid = distance_at(t, spec, 0.5 * (lo + hi))?;
    let ends = distance_at(t, spec, spec.gamma)?.min(distance_at(t, spec, 1.0)?);
    Ok(mid.min(ends))
}

pub fn in_tube(theta: &DensityMatrix, spec: &TubeSpec) -> Result<bool> {
    Ok(tube_distance(theta, spec)? <= spec.radius)
}

/// `‖ρ − I/d‖_∞`.
pub fn distance_to_mixed(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    let w = eigvalsh(rho.matrix())?;
    let c = 1.0 / d as f64;
    Ok((w[0] - c).abs().max((w[d - 1] - c).abs()))
}

/// `‖ρ − I/d‖_∞ ≤ 2 √(log n / n)`.
pub fn in_ball(rho: &DensityMatrix, n: usize) -> Result<bool> {
    Ok(distance_to_mixed(rho)? <= ball_radius(n))
}

/// Monte Carlo fraction of uniform inputs whose conjugate-channel output lies
/// in `B_d(n)`, and whether it reaches `1/2`.
pub fn typicality_estimate(
    ch: &ChannelPair,
    trials: usize,
    rng: &mut RngStream,
) -> Result<(f64, bool)> {
    if trials == 0 {
        return Err(Error::InvalidDimensions("trials must be positive".into()));
    }
    let (s, n, _) = ch.dims();
    let mut hits = 0usize;
    for _ in 0..trials {
        let phi = random_pure_state(s, rng)?;
        if in_ball(&ch.apply_conjugate(&phi)?, n)? {
            hits += 1;
        }
    }
    let fraction = hits as f64 / trials as f64;
    Ok((fraction, fraction >= 0.5))
}
