//! Regression table of `h_d(1, 1)` and the grid oracle that produces it.
//!
//! The oracle does not share code with [`super::h_d`]. It parametrises the
//! problem by `z` instead of `γ`: the constraint fixes
//! `γ(z) = 1 − exp(−g(z)/y)` in closed form, and the objective becomes
//! `h(z) / (x f(1 − γ(z)))`. A uniform grid of `10^5` points in `z` is followed
//! by a `10^3`-point grid on the two cells around the best node. The `z`
//! range is the image of `γ ∈ [1e-6, 1 − 1e-6]` intersected with
//! `[1 + 1e-14, d − 1e-14]`, so both routes search the same set.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Coarse oracle grid.
pub const ORACLE_COARSE: usize = 100_000;
/// Refinement grid.
pub const ORACLE_FINE: usize = 1_000;
/// Range of `d` in the checked-in table.
pub const FIXTURE_D_MIN: usize = 2;
pub const FIXTURE_D_MAX: usize = 200;
/// Header line of the fixture file.
pub const FIXTURE_HEADER: &str = "d\th_d11\tgamma_m";

static BUILTIN_TEXT: &str = include_str!("../../fixtures/h_d_fixtures.tsv");
static BUILTIN: OnceLock<Vec<FixtureRow>> = OnceLock::new();

/// One row of the table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FixtureRow {
    pub d: usize,
    pub h_d11: f64,
    pub gamma_m: f64,
}

/// The table compiled into the crate.
pub fn builtin_fixtures() -> &'static [FixtureRow] {
    BUILTIN.get_or_init(|| parse_fixtures(BUILTIN_TEXT).expect("checked-in fixture table parses"))
}

/// Raw text of the compiled-in table.
pub fn builtin_fixture_text() -> &'static str {
    BUILTIN_TEXT
}

/// Largest `h_d(1, 1)` in the compiled-in table, the computed stand-in for a
/// uniform-in-`d` upper bound.
pub fn fixture_h_max() -> Option<FixtureRow> {
    builtin_fixtures()
        .iter()
        .copied()
        .max_by(|a, b| a.h_d11.total_cmp(&b.h_d11))
}

/// Looks up `d` in the compiled-in table.
pub fn fixture_for(d: usize) -> Option<FixtureRow> {
    builtin_fixtures().iter().copied().find(|r| r.d == d)
}

pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == FIXTURE_HEADER => {}
        _ => {
            return Err(Error::Fixture {
                line: 1,
                msg: format!("expected header {FIXTURE_HEADER:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Fixture { line: i + 1, msg };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(bad(format!("expected 3 columns, got {}", cols.len())));
        }
        let d = cols[0].trim().parse().map_err(|e| bad(format!("d: {e}")))?;
        let h_d11 = cols[1].trim().parse().map_err(|e| bad(format!("h_d11: {e}")))?;
        let gamma_m = cols[2].trim().parse().map_err(|e| bad(format!("gamma_m: {e}")))?;
        rows.push(FixtureRow { d, h_d11, gamma_m });
    }
    Ok(rows)
}

pub fn format_fixtures(rows: &[FixtureRow]) -> String {
    let mut out = String::from(FIXTURE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            r.d,
            fmt_sig(r.h_d11, 12),
            fmt_sig(r.gamma_m, 12)
        ));
    }
    out
}

/// Formats `x` with `digits` significant digits, `%g` style.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let mut digits_str: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    while digits_str.len() > 1 && digits_str.ends_with('0') {
        digits_str.pop();
    }
    let sign = if negative { "-" } else { "" };
    if exp < -5 || exp >= digits as i32 {
        let (head, tail) = digits_str.split_at(1);
        if tail.is_empty() {
            return format!("{sign}{head}e{exp}");
        }
        return format!("{sign}{head}.{tail}e{exp}");
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits_str}");
    }
    let int_len = exp as usize + 1;
    if digits_str.len() <= int_len {
        let pad = "0".repeat(int_len - digits_str.len());
        format!("{sign}{digits_str}{pad}")
    } else {
        let (a, b) = digits_str.split_at(int_len);
        format!("{sign}{a}.{b}")
    }
}

/// Rounds `x` to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    fmt_sig(x, digits).parse().unwrap_or(x)
}

fn h_closed(z: f64, d: f64) -> f64 {
    let r = (d - z) / (d - 1.0);
    z * z.ln() + (d - z) * r.ln()
}

fn g_closed(z: f64, d: f64) -> f64 {
    -z.ln() - (d - 1.0) * ((d - z) / (d - 1.0)).ln()
}

/// `z` with `g(z) = target`, by plain bisection on `[a, b]`.
fn solve_g(target: f64, d: f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g_closed(m, d) < target {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Grid-oracle value of `h_d(x, y)` and its `γ_m`.
pub fn oracle_h_d(x: f64, y: f64, d: usize) -> Result<FixtureRow> {
    if d < 2 {
        return Err(Error::InvalidDimensions(format!("need d >= 2, got {d}")));
    }
    let df = d as f64;
    let cap = super::scalar::GAMMA_CAP;
    let z_min = 1.0 + 1e-14;
    let z_max = df - 1e-14f64.max((df - 1.0) * f64::EPSILON);
    let lo = solve_g(-y * (-cap).ln_1p(), df, z_min, z_max);
    let g_hi = -y * cap.ln();
    let hi = if g_closed(z_max, df) <= g_hi {
        z_max
    } else {
        solve_g(g_hi, df, z_min, z_max)
    };
    let objective = |z: f64| {
        let gamma = -(-g_closed(z, df) / y).exp_m1();
        let one_minus = 1.0 - gamma;
        let f = one_minus * one_minus.ln() - one_minus + 1.0;
        (h_closed(z, df) / (x * f), gamma)
    };
    let scan = |a: f64, b: f64, m: usize| -> (usize, f64, f64, f64) {
        let mut best = (0usize, f64::INFINITY, a, 0.0);
        for k in 0..=m {
            let z = if k == m { b } else { a + (b - a) * k as f64 / m as f64 };
            let (v, g) = objective(z);
            if v < best.1 {
                best = (k, v, z, g);
            }
        }
        best
    };
    let (k, _, _, _) = scan(lo, hi, ORACLE_COARSE);
    let step = (hi - lo) / ORACLE_COARSE as f64;
    let a = (lo + step * (k as f64 - 1.0)).max(lo);
    let b = (lo + step * (k as f64 + 1.0)).min(hi);
    let (_, value, _, gamma) = scan(a, b, ORACLE_FINE);
    Ok(FixtureRow {
        d,
        h_d11: value,
        gamma_m: gamma,
    })
}

/// Oracle rows for `d` in `lo..=hi`, in order.
pub fn generate_fixtures(lo: usize, hi: usize) -> Result<Vec<FixtureRow>> {
    (lo..=hi)
        .into_par_iter()
        .map(|d| oracle_h_d(1.0, 1.0, d))
        .collect()
}

/// Largest absolute difference between two tables, or an error if they do
/// not cover the same `d`.
pub fn fixture_drift(a: &[FixtureRow], b: &[FixtureRow]) -> Result<f64> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.d != y.d) {
        return Err(Error::Fixture {
            line: 0,
            msg: "tables cover different d".into(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x.h_d11 - y.h_d11).abs().max((x.gamma_m - y.gamma_m).abs()))
        .fold(0.0, f64::max))
}
