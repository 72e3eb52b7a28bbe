//! Closed-form bounds: HLW, the linear lower bounds, the product-channel
//! bound, the additivity-violation estimates, the Fannes term, the Hastings
//! condition and the probability bounds.

use super::fixtures::{fixture_for, FixtureRow};
use super::scalar::{f_func, h_d, m_d};
use crate::error::{out_of_range, Error, Result};

/// `c_1` of the HLW bound (quoted as approximate; used as exact).
pub const HLW_C1: f64 = 1.44;
/// `c_2` of the HLW bound (quoted as approximate; used as exact).
pub const HLW_C2: f64 = 19.84;

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `log d − c_1 d/n − c_2 ((s + 1)/(dn))^{2/5} log d`, for `3 ≤ d ≤ n`.
pub fn hlw_bound(s: usize, d: usize, n: usize) -> Result<f64> {
    if !(3 <= d && d <= n) {
        return Err(Error::InvalidDimensions(format!(
            "HLW bound needs 3 <= d <= n, got d={d}, n={n}"
        )));
    }
    let (s, d, n) = (s as f64, d as f64, n as f64);
    Ok(d.ln() - HLW_C1 * d / n - HLW_C2 * ((s + 1.0) / (d * n)).powf(0.4) * d.ln())
}

/// `log d − h s/(nd)`.
pub fn thm1_rhs(s: usize, d: usize, n: usize, h: f64) -> f64 {
    let (s, d, n) = (s as f64, d as f64, n as f64);
    d.ln() - h * s / (n * d)
}

/// Same expression as [`thm1_rhs`], used with `h > h_0`.
pub fn thm2_rhs(s: usize, d: usize, n: usize, h: f64) -> f64 {
    thm1_rhs(s, d, n, h)
}

/// Ratio `p = s/(dn)` at which the linear bound `log d − h p` stops
/// exceeding the HLW bound, for fixed `(d, n)`. The result may exceed 1, in
/// which case the linear bound is the larger one on the whole physical range.
pub fn hlw_crossover_ratio(d: usize, n: usize, h: f64) -> Result<f64> {
    hlw_bound(0, d, n)?;
    if !(h > 0.0) {
        return Err(out_of_range("h", h, "(0, inf)"));
    }
    let (df, nf) = (d as f64, n as f64);
    let diff = |p: f64| {
        -h * p + HLW_C1 * df / nf + HLW_C2 * (p + 1.0 / (df * nf)).powf(0.4) * df.ln()
    };
    let mut hi = 1.0;
    while diff(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Degenerate("no crossover".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if diff(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `log d − h/(s^{1/2 − ε} d)` and the `n = ⌈s^{3/2 − ε}⌉` it uses.
pub fn corollary_bound(s: usize, d: usize, h: f64, eps: f64) -> Result<(f64, u64)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(out_of_range("eps", eps, "(0, 1/2)"));
    }
    let (sf, df) = (s as f64, d as f64);
    let value = df.ln() - h / (sf.powf(0.5 - eps) * df);
    let n = sf.powf(1.5 - eps).ceil() as u64;
    Ok((value, n))
}

/// `g(p) = −p log p − (1 − p) log((1 − p)/(d² − 1))` with `p = s/(dn)`,
/// for `sd ≥ n`.
pub fn prod_entropy_upper(s: usize, d: usize, n: usize) -> Result<f64> {
    if s * d < n {
        return Err(Error::InvalidDimensions(format!(
            "product bound needs s*d >= n, got s={s}, d={d}, n={n}"
        )));
    }
    if s > n * d {
        return Err(Error::InvalidDimensions(format!("s = {s} exceeds n*d")));
    }
    let p = s as f64 / (d as f64 * n as f64);
    Ok(prod_entropy_g(p, d))
}

/// `g(p)` for a given ratio.
pub fn prod_entropy_g(p: f64, d: usize) -> f64 {
    if p >= 1.0 {
        return 0.0;
    }
    let d2m1 = (d * d - 1) as f64;
    -p * p.ln() - (1.0 - p) * ((1.0 - p) / d2m1).ln()
}

/// Violation estimate at `s = n` for one `d`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ViolationRow {
    pub d: usize,
    pub h_d11: f64,
    /// `(1/d)(log d − 2 h_d(1,1) − 1)`.
    pub value: f64,
    /// `exp(2 h_d(1,1) + 1)`.
    pub threshold: f64,
}

/// `(1/d)(log d − 2 h − 1)` for a supplied `h = h_d(1, 1)`.
pub fn violation_lower_with(d: usize, h_d11: f64) -> ViolationRow {
    let df = d as f64;
    ViolationRow {
        d,
        h_d11,
        value: (df.ln() - 2.0 * h_d11 - 1.0) / df,
        threshold: (2.0 * h_d11 + 1.0).exp(),
    }
}

/// Violation estimate using the fixture value of `h_d(1, 1)` when present and
/// the live minimisation otherwise.
pub fn violation_lower(d: usize) -> Result<ViolationRow> {
    let h = match fixture_for(d) {
        Some(FixtureRow { h_d11, .. }) => h_d11,
        None => h_d(1.0, 1.0, d)?.value,
    };
    Ok(violation_lower_with(d, h))
}

/// `p log(p d²) + (1 − p) log(1 − p) − 2 h p` with `p = s/(dn) ∈ (0, 1)`.
pub fn violation_lower_general(s: usize, n: usize, d: usize, h: f64) -> Result<f64> {
    let p = s as f64 / (d as f64 * n as f64);
    if !(p > 0.0 && p < 1.0) {
        return Err(out_of_range("p", p, "(0, 1)"));
    }
    let d2 = (d * d) as f64;
    Ok(p * (p * d2).ln() + (1.0 - p) * (-p).ln_1p() - 2.0 * h * p)
}

/// Smallest `d ≥ start` with positive violation estimate, searched by
/// doubling and integer bisection with live `h_d(1, 1)`.
///
/// The search assumes a single sign change above `start`, which holds
/// because `h_d(1, 1)` grows far more slowly than `log d`.
pub fn first_violating_d(start: usize) -> Result<ViolationRow> {
    let positive = |d: usize| -> Result<bool> { Ok(violation_lower(d)?.value > 0.0) };
    let mut lo = start.max(2);
    if positive(lo)? {
        return violation_lower(lo);
    }
    let mut hi = lo * 2;
    while !positive(hi)? {
        lo = hi;
        hi *= 2;
        if hi > 1 << 40 {
            return Err(Error::Degenerate("no violating d found".into()));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if positive(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    violation_lower(hi)
}

/// `η = d ε_m (log d + log(1/ε_m))`, for `0 ≤ ε_m < 1`.
pub fn fannes_eta(eps_m: f64, d: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&eps_m) {
        return Err(out_of_range("eps_m", eps_m, "[0, 1)"));
    }
    if eps_m == 0.0 {
        return Ok(0.0);
    }
    let df = d as f64;
    Ok(df * eps_m * (df.ln() - eps_m.ln()))
}

/// `2 d √(log n / n) + 13 d² √(log d / s)`.
pub fn eps_m_bound(s: usize, n: usize, d: usize) -> Result<f64> {
    if s < 2 || n < 2 {
        return Err(Error::InvalidDimensions(format!("need s, n >= 2, got s={s}, n={n}")));
    }
    let (s, n, d) = (s as f64, n as f64, d as f64);
    Ok(2.0 * d * (n.ln() / n).sqrt() + 13.0 * d * d * (d.ln() / s).sqrt())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(out_of_range("gamma", gamma, "(0, 1)"));
    }
    Ok(())
}

/// `d² log n + n d log d + (n − d) M − s log(1 − γ)` for a supplied bound `M`.
pub fn hastings_lhs(s: usize, n: usize, d: usize, gamma: f64, m_bound: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let (s, n, d) = (s as f64, n as f64, d as f64);
    Ok(d * d * n.ln() + n * d * d.ln() + (n - d) * m_bound - s * (-gamma).ln_1p())
}

/// Upper bound `−m_d(h f(1 − γ)(s/n) − η)` on `d log d + M(γ)`.
pub fn m_bound_chain(s: usize, n: usize, d: usize, gamma: f64, h: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let eta = fannes_eta(eps_m_bound(s, n, d)?, d)?;
    let arg = h * f_func(1.0 - gamma)? * (s as f64 / n as f64) - eta;
    Ok(-m_d(arg, d)?)
}

/// [`hastings_lhs`] with `M` bounded through [`m_bound_chain`].
pub fn composed_hastings_lhs(s: usize, n: usize, d: usize, gamma: f64, h: f64) -> Result<f64> {
    let df = d as f64;
    let m = m_bound_chain(s, n, d, gamma, h)? - df * df.ln();
    hastings_lhs(s, n, d, gamma, m)
}

/// `(1/(d−1)!) exp[d² log n + (n − d) d log d + (n − d) sup Σ log w_i]`,
/// clamped to `[0, 1]`.
pub fn mu_tail_upper(s: usize, n: usize, d: usize, sup_log_sum: f64) -> Result<f64> {
    let _ = s;
    if n <= d {
        return Err(Error::InvalidDimensions(format!("need n > d, got n={n}, d={d}")));
    }
    let (nf, df) = (n as f64, d as f64);
    if sup_log_sum > -df * df.ln() + 1e-12 {
        return Err(out_of_range(
            "sup_log_sum",
            sup_log_sum,
            format!("(-inf, {}]", -df * df.ln()),
        ));
    }
    let k = nf - df;
    let log_v = df * df * nf.ln() + k * df * df.ln() + k * sup_log_sum - ln_factorial(d - 1);
    Ok(log_v.min(0.0).exp())
}

/// `(2d/(d−1)!) exp[−α d² log n]` with `α = 4(n − d)/(3n) − 1`, clamped to `[0, 1]`.
pub fn prob_tc_upper(s: usize, n: usize, d: usize) -> Result<f64> {
    let _ = s;
    if n <= d {
        return Err(Error::InvalidDimensions(format!("need n > d, got n={n}, d={d}")));
    }
    let (nf, df) = (n as f64, d as f64);
    let alpha = 4.0 * (nf - df) / (3.0 * nf) - 1.0;
    let log_v = (2.0 * df).ln() - ln_factorial(d - 1) - alpha * df * df * nf.ln();
    Ok(log_v.min(0.0).exp())
}

/// `(1/4)(1 − γ)^{s−1}`.
pub fn tube_fraction_lower(s: usize, gamma: f64) -> Result<f64> {
    if s < 2 {
        return Err(Error::InvalidDimensions(format!("need s >= 2, got {s}")));
    }
    check_gamma(gamma)?;
    Ok(0.25 * (1.0 - gamma).powi(s as i32 - 1))
}

/// `(d² + 2)(1 − 6 log d / s)^{s−1}` and whether it is at most `1/4`.
/// A negative base means the underlying event is empty and is read as 0.
pub fn tube_feasibility(d: usize, s: usize) -> Result<(f64, bool)> {
    if s < 2 {
        return Err(Error::InvalidDimensions(format!("need s >= 2, got {s}")));
    }
    let (df, sf) = (d as f64, s as f64);
    let base = (1.0 - 6.0 * df.ln() / sf).max(0.0);
    let v = (df * df + 2.0) * base.powi(s as i32 - 1);
    Ok((v, v <= 0.25))
}

/// `(1 − t²/2)^{s−1}`, tail bound on `‖θ − φ‖_2 > t`.
pub fn prop1a_tail(s: usize, t: f64) -> f64 {
    (1.0 - 0.5 * t * t).max(0.0).powi(s as i32 - 1)
}

/// `d² (1 − (t/d)²)^{s−1}`, tail bound on `‖Φ^C(|θ><ψ|)‖_2 > t`.
pub fn prop2_tail(s: usize, d: usize, t: f64) -> f64 {
    let df = d as f64;
    df * df * (1.0 - (t / df).powi(2)).max(0.0).powi(s as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hlw_direct_evaluation() {
        let v = hlw_bound(30, 3, 300).unwrap();
        let expected = 3f64.ln() - 1.44 * 0.01 - 19.84 * (31.0f64 / 900.0).powf(0.4) * 3f64.ln();
        assert!((v - expected).abs() < 1e-14);
        assert!(hlw_bound(31, 3, 300).unwrap() < v);
        assert!(hlw_bound(4, 2, 10).is_err());
        assert!(hlw_bound(4, 5, 4).is_err());
    }

    #[test]
    fn linear_bounds() {
        assert!((thm1_rhs(16, 2, 16, 4.0) - (2f64.ln() - 2.0)).abs() < 1e-15);
        assert!((thm1_rhs(16, 2, 16, 4.0) + 1.30685).abs() < 1e-5);
        assert!((thm2_rhs(1, 3, 1_000_000_000, 4.0) - 3f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn crossover_exceeds_physical_range_for_d3() {
        let p = hlw_crossover_ratio(3, 1000, 4.0).unwrap();
        assert!(p > 1.0);
        let approx = (HLW_C2 * 3f64.ln() / 4.0).powf(5.0 / 3.0);
        assert!(p >= approx * 0.99);
    }

    #[test]
    fn corollary_examples() {
        let (v, n) = corollary_bound(10_000, 3, 3.4, 0.1).unwrap();
        assert!((v - (3f64.ln() - 3.4 / (10_000f64.powf(0.4) * 3.0))).abs() < 1e-14);
        assert_eq!(n, 10_000f64.powf(1.4).ceil() as u64);
        let near = corollary_bound(10_000, 3, 3.4, 0.5 - 1e-12).unwrap().0;
        assert!((near - (3f64.ln() - 3.4 / 3.0)).abs() < 1e-9);
        assert!(corollary_bound(100, 3, 3.4, 0.1).unwrap().0 < v);
    }

    #[test]
    fn product_bound_examples() {
        assert_eq!(prod_entropy_upper(8, 2, 4).unwrap(), 0.0);
        let v = prod_entropy_upper(16, 2, 16).unwrap();
        assert!((v - (0.5 * 3f64.ln() + 2f64.ln())).abs() < 1e-14);
        assert!((v - 1.24245).abs() < 1e-5);
        assert!(prod_entropy_upper(1, 2, 4).is_err());
    }

    #[test]
    fn violation_general_exceeds_ineq3() {
        for d in [2usize, 5, 20] {
            let h = 3.0;
            let row = violation_lower_with(d, h);
            let general = violation_lower_general(7, 7, d, h).unwrap();
            assert!(general >= row.value);
        }
    }

    #[test]
    fn fannes_examples() {
        assert_eq!(fannes_eta(0.0, 3).unwrap(), 0.0);
        assert!(fannes_eta(1e-12, 3).unwrap() < 1e-9);
        let v = fannes_eta(0.01, 2).unwrap();
        assert!((v - 0.02 * (2f64.ln() + 100f64.ln())).abs() < 1e-15);
        assert!((v - 0.10597).abs() < 1e-5);
        assert!(fannes_eta(1.0, 2).is_err());
        let e = eps_m_bound(10_000, 10_000, 2).unwrap();
        let expected = 4.0 * (10_000f64.ln() / 1e4).sqrt() + 52.0 * (2f64.ln() / 1e4).sqrt();
        assert!((e - expected).abs() < 1e-14);
    }

    #[test]
    fn hastings_substitution() {
        let (s, n, d, g) = (50, 40, 2, 0.3);
        let df = d as f64;
        let v = hastings_lhs(s, n, d, g, -df * df.ln()).unwrap();
        let expected = df * df * (n as f64).ln() + df * df * df.ln() - s as f64 * (0.7f64).ln();
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn probability_bounds() {
        assert_eq!(mu_tail_upper(4, 10, 2, -2.0 * 2f64.ln()).unwrap(), 1.0);
        let alpha: f64 = 4.0 * 98.0 / 300.0 - 1.0;
        assert!((alpha - 0.30667).abs() < 1e-5);
        let v = prob_tc_upper(8, 100, 2).unwrap();
        assert!((v - 4.0 * (-alpha * 4.0 * 100f64.ln()).exp()).abs() < 1e-15);
        assert!(prob_tc_upper(8, 200, 2).unwrap() < v);
    }

    #[test]
    fn tube_bounds() {
        assert!((tube_fraction_lower(16, 1e-12).unwrap() - 0.25).abs() < 1e-10);
        let v = tube_fraction_lower(16, 0.1).unwrap();
        assert!((v - 0.9f64.powi(15) / 4.0).abs() < 1e-15);
        assert!((v - 0.05147).abs() < 1e-5);
        let (f, ok) = tube_feasibility(2, 16).unwrap();
        assert!((f - 0.065651).abs() < 1e-6);
        assert!(ok);
    }
}
