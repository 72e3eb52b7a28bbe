//! The induced eigenvalue measure `μ_{d,n}` of reduced states of uniform pure
//! states on `C^d ⊗ C^n`.
//!
//! The normalisation `Z(n, d)` is never needed in closed form: densities are
//! used through ratios, and the largest-eigenvalue CDF is normalised by
//! quadrature.

use crate::error::{Error, Result};
use crate::matcore::Spectrum;

/// Smallest accepted quadrature grid.
pub const MIN_GRID: usize = 1000;

/// `Σ_{i<j} 2 log|w_i − w_j| + (n − d) Σ_i log w_i`, the log of the
/// unnormalised density. Boundary points give `-∞`.
pub fn mu_log_density(w: &Spectrum, n: usize, d: usize) -> Result<f64> {
    if w.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: w.dim(),
        });
    }
    if n < d {
        return Err(Error::InvalidDimensions(format!("need n >= d, got n={n}, d={d}")));
    }
    let v = w.values();
    let mut acc = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            acc += 2.0 * (v[i] - v[j]).abs().ln();
        }
    }
    if n > d {
        let k = (n - d) as f64;
        acc += k * v.iter().map(|x| x.ln()).sum::<f64>();
    }
    if acc.is_nan() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(acc)
}

/// Tabulated CDF of the largest eigenvalue, piecewise linear between nodes.
#[derive(Debug, Clone)]
pub struct MuCdf {
    pub d: usize,
    pub n: usize,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl MuCdf {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `P(λ_max ≤ w)`.
    pub fn eval(&self, w: f64) -> f64 {
        let lo = self.nodes[0];
        let hi = *self.nodes.last().unwrap();
        if w <= lo {
            return 0.0;
        }
        if w >= hi {
            return 1.0;
        }
        let k = self.nodes.partition_point(|&x| x <= w).max(1);
        let (x0, x1) = (self.nodes[k - 1], self.nodes[k]);
        let (f0, f1) = (self.values[k - 1], self.values[k]);
        f0 + (f1 - f0) * (w - x0) / (x1 - x0)
    }

    /// Smallest tabulated-interpolated `w` with `CDF(w) ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let k = self.values.partition_point(|&f| f < p);
        if k == 0 {
            return self.nodes[0];
        }
        if k >= self.values.len() {
            return *self.nodes.last().unwrap();
        }
        let (x0, x1) = (self.nodes[k - 1], self.nodes[k]);
        let (f0, f1) = (self.values[k - 1], self.values[k]);
        if f1 == f0 {
            return x0;
        }
        x0 + (x1 - x0) * (p - f0) / (f1 - f0)
    }
}

/// Largest-eigenvalue CDF of `μ_{d,n}` for `d ∈ {2, 3}`.
///
/// For `d = 2` the marginal density on `[1/2, 1]` is proportional to
/// `(2w − 1)^2 (w(1 − w))^{n−2}` and is integrated by the trapezoidal rule.
/// For `d = 3` the ordered simplex `w_1 ≥ w_2 ≥ w_3` is integrated along `w_2`
/// by the midpoint rule for each node `w_1`, then accumulated in `w_1`.
pub fn mu_cdf_numeric(d: usize, n: usize, grid_size: usize) -> Result<MuCdf> {
    if n < d {
        return Err(Error::InvalidDimensions(format!("need n >= d, got n={n}, d={d}")));
    }
    if grid_size < MIN_GRID {
        return Err(Error::InvalidDimensions(format!(
            "grid_size must be at least {MIN_GRID}, got {grid_size}"
        )));
    }
    let lo = 1.0 / d as f64;
    let nodes: Vec<f64> = (0..=grid_size)
        .map(|k| lo + (1.0 - lo) * k as f64 / grid_size as f64)
        .collect();
    let density: Vec<f64> = match d {
        2 => nodes.iter().map(|&w| marginal_d2(w, n)).collect(),
        3 => nodes.iter().map(|&w| marginal_d3(w, n, grid_size)).collect(),
        _ => {
            return Err(Error::Unsupported(format!(
                "largest-eigenvalue CDF is tabulated for d in {{2, 3}}, got d={d}"
            )))
        }
    };
    let mut values = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    values.push(0.0);
    for k in 1..nodes.len() {
        acc += 0.5 * (density[k - 1] + density[k]) * (nodes[k] - nodes[k - 1]);
        values.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::Degenerate("zero total mass in quadrature".into()));
    }
    for v in values.iter_mut() {
        *v /= acc;
    }
    *values.last_mut().unwrap() = 1.0;
    Ok(MuCdf { d, n, nodes, values })
}

fn powi_nonneg(x: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.max(0.0).powi(k as i32)
    }
}

fn marginal_d2(w: f64, n: usize) -> f64 {
    let a = 2.0 * w - 1.0;
    a * a * powi_nonneg(w * (1.0 - w), n - 2)
}

fn marginal_d3(w1: f64, n: usize, m: usize) -> f64 {
    let rest = 1.0 - w1;
    // w_2 between (1 - w1)/2 (so w_2 ≥ w_3) and min(w1, 1 - w1) (so w_3 ≥ 0)
    let a = 0.5 * rest;
    let b = w1.min(rest);
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / m as f64;
    let mut acc = 0.0;
    for k in 0..m {
        let w2 = a + (k as f64 + 0.5) * h;
        let w3 = rest - w2;
        let vdm = (w1 - w2) * (w1 - w3) * (w2 - w3);
        acc += vdm * vdm * powi_nonneg(w1 * w2 * w3, n - 3);
    }
    acc * h
}
