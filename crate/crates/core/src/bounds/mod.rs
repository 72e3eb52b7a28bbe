//! Scalar functions and closed-form bounds.

mod fixtures;
mod report;
mod scalar;
mod theorems;

pub use fixtures::{
    builtin_fixture_text, builtin_fixtures, fixture_drift, fixture_for, fixture_h_max, fmt_sig, format_fixtures,
    generate_fixtures, oracle_h_d, parse_fixtures, round_sig, FixtureRow, FIXTURE_D_MAX,
    FIXTURE_D_MIN, FIXTURE_HEADER, ORACLE_COARSE, ORACLE_FINE,
};
pub use report::{BoundParams, BoundReport};
pub use scalar::{
    f_func, g_objective, h0, h0_objective, h_constraint, h_d, h_d_objective, m_d, m_d_domain_max,
    m_d_inv, m_d_inv_domain_max, md_series_k, minimize_unit_interval, F_func, Minimum,
    BRACKET_EPS, GAMMA_CAP, GOLDEN_TOL, GRID_POINTS,
};
pub use theorems::{
    composed_hastings_lhs, corollary_bound, eps_m_bound, fannes_eta, first_violating_d,
    hastings_lhs, hlw_bound, hlw_crossover_ratio, m_bound_chain, mu_tail_upper, prob_tc_upper,
    prod_entropy_g, prod_entropy_upper, prop1a_tail, prop2_tail, thm1_rhs, thm2_rhs,
    tube_feasibility, tube_fraction_lower, violation_lower, violation_lower_general,
    violation_lower_with, ViolationRow, HLW_C1, HLW_C2,
};
