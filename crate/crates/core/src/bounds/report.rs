//! Parameter bundle and the per-tuple report of every scalar bound.

use serde::{Deserialize, Serialize};

use super::scalar::{h0, h_d};
use super::theorems::{
    composed_hastings_lhs, eps_m_bound, fannes_eta, hlw_bound, hlw_crossover_ratio,
    prod_entropy_upper, thm1_rhs, thm2_rhs, violation_lower_general,
};
use crate::channels::tube_radius;
use crate::error::{out_of_range, Error, Result};

/// Inputs shared by the bound functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub s: usize,
    pub n: usize,
    pub d: usize,
    pub gamma: f64,
    pub h: f64,
    pub r1: f64,
    pub r2: f64,
}

impl BoundParams {
    /// Validated parameters. `r1 = r2 = s/n` when not supplied.
    pub fn new(
        s: usize,
        n: usize,
        d: usize,
        gamma: f64,
        h: f64,
        ratios: Option<(f64, f64)>,
    ) -> Result<Self> {
        if s == 0 || n == 0 || d == 0 {
            return Err(Error::InvalidDimensions("s, n, d must be positive".into()));
        }
        if s > n * d {
            return Err(Error::InvalidDimensions(format!(
                "s = {s} exceeds n*d = {}",
                n * d
            )));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(out_of_range("gamma", gamma, "(0, 1)"));
        }
        if !(h > 0.0) {
            return Err(out_of_range("h", h, "(0, inf)"));
        }
        let (r1, r2) = ratios.unwrap_or((s as f64 / n as f64, s as f64 / n as f64));
        if !(r1 > 0.0 && r1 <= r2) {
            return Err(Error::InvalidDimensions(format!(
                "need 0 < r1 <= r2, got r1={r1}, r2={r2}"
            )));
        }
        Ok(BoundParams {
            s,
            n,
            d,
            gamma,
            h,
            r1,
            r2,
        })
    }

    /// `p = s/(dn)`.
    pub fn p_ratio(&self) -> f64 {
        self.s as f64 / (self.d as f64 * self.n as f64)
    }
}

/// Every scalar bound for one parameter tuple. Entries whose preconditions
/// fail are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub s: usize,
    pub n: usize,
    pub d: usize,
    pub gamma: f64,
    pub h: f64,
    pub hlw: Option<f64>,
    pub thm1_rhs: Option<f64>,
    pub thm2_rhs: Option<f64>,
    pub prod_upper: Option<f64>,
    pub p_ratio: Option<f64>,
    pub delta_s_lower: Option<f64>,
    pub h_d_value: Option<f64>,
    pub h0_value: Option<f64>,
    pub eta: Option<f64>,
    pub eps_m: Option<f64>,
    pub tube_radius: Option<f64>,
    pub hastings_lhs: Option<f64>,
    pub hlw_crossover_ratio: Option<f64>,
    /// `thm1_rhs ≤ 0`.
    pub thm1_vacuous: bool,
    /// `h ≤ h_d(r1, r2)`: the supplied `h` is below the threshold where `thm1_rhs` holds.
    pub h_below_h_d: bool,
    /// `h ≤ h_0`.
    pub h_below_h0: bool,
    /// `c_1`, `c_2` are quoted as approximations.
    pub hlw_constants_approximate: bool,
}

impl BoundReport {
    pub fn evaluate(p: &BoundParams) -> BoundReport {
        let (s, n, d, h) = (p.s, p.n, p.d, p.h);
        let h_d_value = if d >= 2 {
            h_d(p.r1, p.r2, d).ok().map(|m| m.value)
        } else {
            None
        };
        let h0_value = h0().value;
        let t1 = thm1_rhs(s, d, n, h);
        let eps_m = eps_m_bound(s, n, d).ok();
        let eta = eps_m.and_then(|e| fannes_eta(e, d).ok());
        BoundReport {
            s,
            n,
            d,
            gamma: p.gamma,
            h,
            hlw: hlw_bound(s, d, n).ok(),
            thm1_rhs: Some(t1),
            thm2_rhs: Some(thm2_rhs(s, d, n, h)),
            prod_upper: prod_entropy_upper(s, d, n).ok(),
            p_ratio: Some(p.p_ratio()),
            delta_s_lower: if s * d >= n {
                violation_lower_general(s, n, d, h).ok()
            } else {
                None
            },
            h_d_value,
            h0_value: Some(h0_value),
            eta,
            eps_m,
            tube_radius: if d >= 1 { Some(tube_radius(s, n, d)) } else { None },
            hastings_lhs: if d >= 2 {
                composed_hastings_lhs(s, n, d, p.gamma, h).ok()
            } else {
                None
            },
            hlw_crossover_ratio: hlw_crossover_ratio(d, n, h).ok(),
            thm1_vacuous: t1 <= 0.0,
            h_below_h_d: h_d_value.is_some_and(|v| h <= v),
            h_below_h0: h <= h0_value,
            hlw_constants_approximate: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_for_square_qubit_case() {
        let p = BoundParams::new(16, 16, 2, 0.5, 4.0, None).unwrap();
        let r = BoundReport::evaluate(&p);
        assert_eq!(r.p_ratio, Some(0.5));
        assert!((r.prod_upper.unwrap() - 1.24245).abs() < 1e-5);
        assert!(r.hlw.is_none());
        assert!(r.thm1_vacuous);
        assert!(r.eta.is_none());
        assert!(r.hlw_constants_approximate);
    }

    #[test]
    fn params_validation() {
        assert!(BoundParams::new(100, 8, 3, 0.5, 4.0, None).is_err());
        assert!(BoundParams::new(4, 8, 3, 1.0, 4.0, None).is_err());
        assert!(BoundParams::new(4, 8, 3, 0.5, 4.0, Some((1.0, 0.5))).is_err());
    }

    #[test]
    fn report_serialises() {
        let p = BoundParams::new(8, 8, 3, 0.5, 4.0, None).unwrap();
        let r = BoundReport::evaluate(&p);
        let back: BoundReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back.s, 8);
    }
}
