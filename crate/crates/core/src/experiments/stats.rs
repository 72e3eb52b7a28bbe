//! Kolmogorov–Smirnov and binomial helpers for the campaigns.

/// 0.999 quantile of the Kolmogorov distribution.
pub const KS_Q999: f64 = 1.949_474_603_5;

/// Kolmogorov CDF `P(K ≤ x) = 1 − 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²x²}`.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Critical KS distance for effective sample size `n` at the 0.999 level,
/// with Stephens' finite-sample correction.
pub fn ks_critical(n_eff: f64) -> f64 {
    let r = n_eff.sqrt();
    KS_Q999 / (r + 0.12 + 0.11 / r)
}

/// One-sample KS distance between `samples` and `cdf`. Sorts in place.
pub fn ks_one_sample(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance. Sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Effective size `n1 n2 / (n1 + n2)` for the two-sample test.
pub fn two_sample_n_eff(n1: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    a * b / (a + b)
}

/// Binomial standard deviation of a proportion.
pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / trials as f64).sqrt()
}

/// `(estimate − law)/σ`, with `0` for exact agreement and `±∞` for a
/// disagreement at `σ = 0`.
pub fn z_score(estimate: f64, law: f64, sigma: f64) -> f64 {
    let diff = estimate - law;
    if sigma > 0.0 {
        diff / sigma
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_constant_matches_cdf() {
        assert!((kolmogorov_cdf(KS_Q999) - 0.999).abs() < 1e-7);
        assert!(kolmogorov_cdf(0.0) == 0.0);
        assert!((kolmogorov_cdf(1.3581) - 0.95).abs() < 1e-4);
    }

    #[test]
    fn one_sample_on_exact_quantiles() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_one_sample(&mut xs, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let mut a = vec![0.1, 0.2, 0.3];
        let mut b = a.clone();
        assert_eq!(ks_two_sample(&mut a, &mut b), 0.0);
        let mut c = vec![1.0, 2.0];
        let mut e = vec![3.0, 4.0];
        assert_eq!(ks_two_sample(&mut c, &mut e), 1.0);
    }

    #[test]
    fn z_scores() {
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert_eq!(z_score(0.9, 1.0, 0.0), f64::NEG_INFINITY);
        assert!((z_score(0.5, 0.4, 0.05) - 2.0).abs() < 1e-12);
    }
}
