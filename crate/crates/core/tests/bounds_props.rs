use entlab::bounds::{
    builtin_fixtures, corollary_bound, f_func, fixture_h_max, h0, hlw_bound, m_d, m_d_domain_max, m_d_inv,
    m_d_inv_domain_max, mu_tail_upper, prob_tc_upper, prod_entropy_upper, thm1_rhs, tube_fraction_lower,
    violation_lower_general, violation_lower_with,
};
use entlab::experiments::lemma12_check;
use proptest::prelude::*;

fn d_choice() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 3, 5, 10])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn m_d_increasing_with_slope(d in d_choice(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let ymax = m_d_domain_max(d).unwrap();
        let (y1, y2) = (a.min(b) * ymax, a.max(b) * ymax);
        prop_assume!(y2 - y1 > 1e-9);
        let (m1, m2) = (m_d(y1, d).unwrap(), m_d(y2, d).unwrap());
        prop_assert!(m2 > m1);
        prop_assert!((m2 - m1) / (y2 - y1) >= 1.0 / d as f64 - 1e-8);
    }

    #[test]
    fn m_d_inverse_round_trip(d in d_choice(), a in 0.0f64..1.0) {
        let ymax = m_d_domain_max(d).unwrap();
        let y = a * ymax;
        prop_assert!((m_d_inv(m_d(y, d).unwrap(), d).unwrap() - y).abs() < 1e-10);
        // near the top of the w range y saturates at ymax to double precision,
        // so the other composition is only checked where it is conditioned
        let w = a * m_d(0.999 * ymax, d).unwrap();
        prop_assert!((m_d(m_d_inv(w, d).unwrap(), d).unwrap() - w).abs() < 1e-10);
        prop_assert!(m_d_inv_domain_max(d).unwrap() >= w);
    }

    #[test]
    fn product_bound_within_log_d_squared(n in 1usize..40, d in 2usize..8, k in 0.0f64..1.0) {
        let lo = n.div_ceil(d);
        let s = lo + ((n * d - lo) as f64 * k) as usize;
        let v = prod_entropy_upper(s, d, n).unwrap();
        prop_assert!(v >= -1e-12);
        prop_assert!(v <= 2.0 * (d as f64).ln() + 1e-12);
    }

    #[test]
    fn probability_bounds_clamped(d in 2usize..8, extra in 1usize..500, sup_gap in 0.0f64..20.0) {
        let n = d + extra;
        let df = d as f64;
        let tail = mu_tail_upper(1, n, d, -df * df.ln() - sup_gap).unwrap();
        prop_assert!((0.0..=1.0).contains(&tail));
        let tc = prob_tc_upper(1, n, d).unwrap();
        prop_assert!((0.0..=1.0).contains(&tc));
    }

    #[test]
    fn tc_bound_decreasing_in_n(d in 2usize..8, n in 2usize..2000) {
        let n = n.max(d + 1);
        let alpha = 4.0 * (n - d) as f64 / (3.0 * n as f64) - 1.0;
        prop_assume!(alpha > 0.0);
        prop_assert!(prob_tc_upper(1, n + 1, d).unwrap() <= prob_tc_upper(1, n, d).unwrap());
    }

    #[test]
    fn hlw_decreasing_in_s(d in 3usize..10, extra in 0usize..200, s in 1usize..1000) {
        let n = d + extra;
        prop_assert!(hlw_bound(s + 1, d, n).unwrap() < hlw_bound(s, d, n).unwrap());
    }

    #[test]
    fn thm1_decreasing_and_corollary_increasing_in_s(d in 2usize..10, n in 1usize..100, s in 1usize..1000, eps in 0.01f64..0.49) {
        prop_assert!(thm1_rhs(s + 1, d, n, 4.0) < thm1_rhs(s, d, n, 4.0));
        let (a, _) = corollary_bound(s, d, 3.4, eps).unwrap();
        let (b, _) = corollary_bound(s + 1, d, 3.4, eps).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn general_violation_exceeds_specialised(row in prop::sample::select(builtin_fixtures().to_vec())) {
        let d = row.d;
        let general = violation_lower_general(d, d, d, row.h_d11).unwrap();
        prop_assert!(general >= violation_lower_with(d, row.h_d11).value - 1e-12);
    }

    #[test]
    fn tube_fraction_shrinks_with_gamma(s in 2usize..64, g in 0.01f64..0.98) {
        prop_assert!(tube_fraction_lower(s, g + 0.01).unwrap() <= tube_fraction_lower(s, g).unwrap());
    }
}

#[test]
fn product_bound_vanishes_at_full_rank() {
    for (n, d) in [(1, 2), (3, 2), (4, 5), (7, 3)] {
        assert!(prod_entropy_upper(n * d, d, n).unwrap().abs() < 1e-12);
    }
}

#[test]
fn lemma12_has_no_violations() {
    let r = lemma12_check(100_000, 31).unwrap();
    assert!(r.pass, "{:?}", r.details);
    assert_eq!(r.details["violations"], 0.0);
}

#[test]
fn h0_in_expected_window() {
    let m = h0();
    assert!((3.349..=3.353).contains(&m.value), "{}", m.value);
    assert!(f_func(1.0 - m.arg).unwrap() > 0.0);
}

#[test]
fn fixture_maximum_is_a_table_row() {
    let top = fixture_h_max().unwrap();
    assert!(builtin_fixtures().iter().all(|r| r.h_d11 <= top.h_d11));
    assert!(builtin_fixtures().contains(&top));
}
