//! The scalar functions `f`, `F`, the constrained pair `h`, `g`, the value
//! function `m_d` and its inverse, `h_d` and `h_0`.
//!
//! `m_d` and `m_d^{-1}` are evaluated by bisection in `u = (z − 1)/(d − 1)`,
//! which keeps `log((d − z)/(d − 1)) = log1p(−u)` accurate at both ends of
//! `(1, d)`.

use crate::error::{out_of_range, Error, Result};

/// Interior cap on `γ`: minimisations run over `[GAMMA_CAP, 1 − GAMMA_CAP]`.
pub const GAMMA_CAP: f64 = 1e-6;
/// Coarse-grid size of every 1-D minimisation.
pub const GRID_POINTS: usize = 1000;
/// Golden-section tolerance in the argument.
pub const GOLDEN_TOL: f64 = 1e-10;
/// Distance of the bisection bracket from the endpoints of `(1, d)`.
pub const BRACKET_EPS: f64 = 1e-14;

/// `f(x) = x log x − x + 1`, with `f(0) = 1`.
pub fn f_func(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(out_of_range("x", x, "[0, inf)"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(x * x.ln() - x + 1.0)
}

/// `F(x) = −log x + x − 1`.
#[allow(non_snake_case)]
pub fn F_func(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(out_of_range("x", x, "(0, inf)"));
    }
    Ok(-x.ln() + x - 1.0)
}

fn check_d(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimensions(format!("need d >= 2, got {d}")));
    }
    Ok(d as f64)
}

/// `h` at `z = 1 + (d − 1) u`.
fn h_of_u(u: f64, dm1: f64) -> f64 {
    let t = dm1 * u;
    let left = (1.0 + t) * t.ln_1p();
    let right = if u >= 1.0 { 0.0 } else { dm1 * (1.0 - u) * (-u).ln_1p() };
    left + right
}

/// `g` at `z = 1 + (d − 1) u`.
fn g_of_u(u: f64, dm1: f64) -> f64 {
    let t = dm1 * u;
    -t.ln_1p() - dm1 * (-u).ln_1p()
}

fn u_of_z(z: f64, d: f64) -> f64 {
    (z - 1.0) / (d - 1.0)
}

fn check_z(z: f64, d: f64) -> Result<()> {
    if !(z >= 1.0 && z < d) {
        return Err(out_of_range("z", z, format!("[1, {d})")));
    }
    Ok(())
}

/// `z log z + (d − z) log((d − z)/(d − 1))`.
pub fn h_constraint(z: f64, d: usize) -> Result<f64> {
    let df = check_d(d)?;
    check_z(z, df)?;
    Ok(h_of_u(u_of_z(z, df), df - 1.0))
}

/// `−log z − (d − 1) log((d − z)/(d − 1))`.
pub fn g_objective(z: f64, d: usize) -> Result<f64> {
    let df = check_d(d)?;
    check_z(z, df)?;
    Ok(g_of_u(u_of_z(z, df), df - 1.0))
}

/// Bisection bracket in `u`, corresponding to `z ∈ [1 + 1e-14, d − 1e-14]`.
/// For large `d` the upper end is pulled in to the last representable `u < 1`.
fn u_bracket(dm1: f64) -> (f64, f64) {
    let lo = BRACKET_EPS / dm1;
    let hi = 1.0 - (BRACKET_EPS / dm1).max(f64::EPSILON);
    (lo, hi)
}

/// Solves `phi(u) = target` for increasing `phi` on the bracket; bisects until
/// the midpoint no longer moves.
fn bisect(phi: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest `y` accepted by [`m_d`] on the bisection bracket.
pub fn m_d_domain_max(d: usize) -> Result<f64> {
    let df = check_d(d)?;
    Ok(h_of_u(u_bracket(df - 1.0).1, df - 1.0))
}

/// Largest `w` accepted by [`m_d_inv`].
pub fn m_d_inv_domain_max(d: usize) -> Result<f64> {
    let df = check_d(d)?;
    Ok(g_of_u(u_bracket(df - 1.0).1, df - 1.0))
}

/// `m_d(y) = g(z)` where `h(z) = y`.
pub fn m_d(y: f64, d: usize) -> Result<f64> {
    let df = check_d(d)?;
    let dm1 = df - 1.0;
    let max = d as f64 * df.ln();
    if !(y >= 0.0 && y < max) {
        return Err(out_of_range("y", y, format!("[0, {max})")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = u_bracket(dm1);
    if y >= h_of_u(hi, dm1) {
        return Ok(g_of_u(hi, dm1));
    }
    let u = bisect(|u| h_of_u(u, dm1), y, lo, hi);
    Ok(g_of_u(u, dm1))
}

/// `m_d^{-1}(w) = h(z)` where `g(z) = w`.
pub fn m_d_inv(w: f64, d: usize) -> Result<f64> {
    let df = check_d(d)?;
    let dm1 = df - 1.0;
    let (lo, hi) = u_bracket(dm1);
    let max = g_of_u(hi, dm1);
    if !(w >= 0.0 && w <= max) {
        return Err(out_of_range("w", w, format!("[0, {max}]")));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let u = bisect(|u| g_of_u(u, dm1), w, lo, hi);
    Ok(h_of_u(u, dm1))
}

/// Coefficient `k` in `m_d(y)/y ∼ 1 − k √y`, in the closed form
/// `((d² − 2d)/(3(d − 1)²)) (2(d − 1)/d)^{3/2}`.
pub fn md_series_k(d: usize) -> Result<f64> {
    let df = check_d(d)?;
    let dm1 = df - 1.0;
    Ok((df * df - 2.0 * df) / (3.0 * dm1 * dm1) * (2.0 * dm1 / df).powf(1.5))
}

/// Result of a 1-D minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub value: f64,
    pub arg: f64,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Coarse logit-spaced grid over `[lo, hi] ⊂ (0, 1)` followed by golden-section
/// refinement between the neighbours of the best node. Non-finite objective
/// values count as `+∞`.
pub fn minimize_unit_interval(obj: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Minimum> {
    let eval = |x: f64| {
        let v = obj(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (a, b) = (logit(lo), logit(hi));
    let nodes: Vec<f64> = (0..GRID_POINTS)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == GRID_POINTS - 1 {
                hi
            } else {
                logistic(a + (b - a) * k as f64 / (GRID_POINTS - 1) as f64)
            }
        })
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&x| eval(x)).collect();
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty grid");
    if !best_value.is_finite() {
        return Err(Error::Degenerate("objective is infinite on the whole grid".into()));
    }
    let mut left = nodes[best.saturating_sub(1)];
    let mut right = nodes[(best + 1).min(GRID_POINTS - 1)];
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = right - ratio * (right - left);
    let mut x2 = left + ratio * (right - left);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while right - left > GOLDEN_TOL {
        if f1 <= f2 {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - ratio * (right - left);
            f1 = eval(x1);
        } else {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + ratio * (right - left);
            f2 = eval(x2);
        }
    }
    let mut out = Minimum {
        value: best_value,
        arg: nodes[best],
    };
    for x in [x1, x2, 0.5 * (left + right)] {
        let v = eval(x);
        if v < out.value {
            out = Minimum { value: v, arg: x };
        }
    }
    Ok(out)
}

/// `γ ↦ m_d^{-1}(−log(1 − γ) y) / (x f(1 − γ))`, `+∞` where the argument of
/// `m_d^{-1}` leaves its domain.
pub fn h_d_objective(gamma: f64, x: f64, y: f64, d: usize) -> f64 {
    let w = -(-gamma).ln_1p() * y;
    match (m_d_inv(w, d), f_func(1.0 - gamma)) {
        (Ok(num), Ok(den)) => num / (x * den),
        _ => f64::INFINITY,
    }
}

/// `h_d(x, y)` and its minimising `γ_m`.
pub fn h_d(x: f64, y: f64, d: usize) -> Result<Minimum> {
    check_d(d)?;
    if !(x > 0.0) {
        return Err(out_of_range("x", x, "(0, inf)"));
    }
    if !(y > 0.0) {
        return Err(out_of_range("y", y, "(0, inf)"));
    }
    minimize_unit_interval(|g| h_d_objective(g, x, y, d), GAMMA_CAP, 1.0 - GAMMA_CAP)
}

/// `−log(1 − γ) / (γ + (1 − γ) log(1 − γ))`.
pub fn h0_objective(gamma: f64) -> f64 {
    let l = (-gamma).ln_1p();
    -l / (gamma + (1.0 - gamma) * l)
}

/// `h_0` and its minimising `γ`.
pub fn h0() -> Minimum {
    minimize_unit_interval(h0_objective, GAMMA_CAP, 1.0 - GAMMA_CAP)
        .expect("h0 objective is finite on the interior")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_and_big_f() {
        assert_eq!(f_func(1.0).unwrap(), 0.0);
        assert_eq!(F_func(1.0).unwrap(), 0.0);
        assert_eq!(f_func(0.0).unwrap(), 1.0);
        assert!((f_func(2.0).unwrap() - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((f_func(2.0).unwrap() - 0.386294).abs() < 1e-6);
        assert!(F_func(0.0).is_err());
        assert!(f_func(-1.0).is_err());
    }

    #[test]
    fn constraint_pair_examples() {
        assert_eq!(h_constraint(1.0, 3).unwrap(), 0.0);
        assert_eq!(g_objective(1.0, 3).unwrap(), 0.0);
        let h = 1.5 * 1.5f64.ln() + 0.5 * 0.5f64.ln();
        let g = -(1.5f64.ln()) - 0.5f64.ln();
        assert!((h_constraint(1.5, 2).unwrap() - h).abs() < 1e-15);
        assert!((g_objective(1.5, 2).unwrap() - g).abs() < 1e-15);
        assert!((h - 0.261624).abs() < 1e-6);
        assert!((g - 0.287682).abs() < 1e-6);
        assert!(h_constraint(2.0, 2).is_err());
        assert!(h_constraint(0.5, 2).is_err());
    }

    #[test]
    fn h_approaches_d_log_d() {
        for d in [2usize, 3, 7] {
            let df = d as f64;
            let v = h_constraint(df - 1e-9, d).unwrap();
            assert!((v - df * df.ln()).abs() < 1e-6);
        }
    }

    #[test]
    fn m_d_round_trips() {
        let y = h_constraint(1.5, 2).unwrap();
        assert!((m_d(y, 2).unwrap() - g_objective(1.5, 2).unwrap()).abs() < 1e-12);
        assert_eq!(m_d(0.0, 5).unwrap(), 0.0);
        assert_eq!(m_d_inv(0.0, 5).unwrap(), 0.0);
        let w = m_d(0.25, 3).unwrap();
        assert!((m_d_inv(w, 3).unwrap() - 0.25).abs() < 1e-10);
        assert!(m_d(3f64.ln() * 3.0, 3).is_err());
        assert!(m_d(-0.1, 3).is_err());
    }

    #[test]
    fn series_coefficient_examples() {
        assert_eq!(md_series_k(2).unwrap(), 0.0);
        let k3 = md_series_k(3).unwrap();
        assert!((k3 - 0.25 * (4f64 / 3.0).powf(1.5)).abs() < 1e-15);
        assert!((k3 - 0.38490).abs() < 1e-5);
    }

    #[test]
    fn h0_value() {
        let m = h0();
        assert!((m.value - 3.351).abs() < 0.002);
        assert!(m.value <= h0_objective(m.arg - 1e-4));
        assert!(m.value <= h0_objective(m.arg + 1e-4));
        let half = h0_objective(0.5);
        assert!((half - 2f64.ln() / (0.5 - 0.5 * 2f64.ln())).abs() < 1e-12);
        assert!((half - 4.5177).abs() < 1e-4);
    }

    #[test]
    fn h_d_scales_in_x() {
        let a = h_d(1.0, 1.0, 4).unwrap();
        let b = h_d(2.0, 1.0, 4).unwrap();
        assert!((b.value - a.value / 2.0).abs() < 1e-12);
    }

    #[test]
    fn h_d_stationarity() {
        for d in [2usize, 3, 5] {
            let m = h_d(1.0, 1.0, d).unwrap();
            let lhs = m_d(f_func(1.0 - m.arg).unwrap() * m.value, d).unwrap();
            let rhs = -(-m.arg).ln_1p();
            assert!((lhs - rhs).abs() < 1e-8, "d={d}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn large_d_bracket_stays_inside() {
        let d = 100_000;
        let w = m_d_inv_domain_max(d).unwrap();
        assert!(w.is_finite());
        let v = m_d_inv(1.0, d).unwrap();
        assert!((m_d(v, d).unwrap() - 1.0).abs() < 1e-9);
    }
}
