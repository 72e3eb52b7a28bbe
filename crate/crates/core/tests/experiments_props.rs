use entlab::channels::{ChannelPair, Isometry, Side};
use entlab::experiments::{
    estimate_min_output_entropy, inequality_suite, output_entropy, overlap_law_campaign, tube_fraction_campaign,
    typicality_campaign, CampaignResult, OptimizerConfig,
};
use entlab::randq::{haar_unitary, random_isometry, random_pure_state, RngStream};
use proptest::prelude::*;

fn same(a: &CampaignResult, b: &CampaignResult) -> bool {
    a.name == b.name
        && a.estimate.to_bits() == b.estimate.to_bits()
        && a.bound_or_law.to_bits() == b.bound_or_law.to_bits()
        && a.margin_sigmas.to_bits() == b.margin_sigmas.to_bits()
        && a.pass == b.pass
        && a.samples_used == b.samples_used
        && a.details.len() == b.details.len()
        && a.details.iter().zip(&b.details).all(|(x, y)| x.0 == y.0 && x.1.to_bits() == y.1.to_bits())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn campaigns_reproduce_across_thread_counts() {
    let run = || {
        let mut v = overlap_law_campaign(4, &[0.3, 0.5], 5_000, 41, 4.0).unwrap();
        v.push(tube_fraction_campaign(8, 4, 2, 0.1, 200, 41, 4.0).unwrap());
        v.push(typicality_campaign(8, 6, 2, 4, 50, 41, 4.0).unwrap());
        v.extend(inequality_suite(2_000, 41, 4.0).unwrap());
        v
    };
    let a = in_pool(1, run);
    let b = in_pool(4, run);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!(same(x, y), "{} differs", x.name);
    }
}

fn small_cfg() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 4,
        probes: 60,
        max_iters: 100,
        ..OptimizerConfig::default()
    }
}

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..4, 2usize..4).prop_flat_map(|(n, d)| (2..=n * d, Just(n), Just(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn optimizer_never_exceeds_probe_minimum((s, n, d) in dims(), seed in any::<u64>(), conj in any::<bool>()) {
        let mut rng = RngStream::new(seed, 0);
        let ch = ChannelPair::new(random_isometry(s, n, d, &mut rng).unwrap(), conj);
        for side in [Side::Conjugate, Side::Direct] {
            let m = estimate_min_output_entropy(&ch, side, &small_cfg(), seed).unwrap();
            prop_assert!(m.value <= m.probe_min);
            let at_argmin = output_entropy(&ch, side, m.argmin.amplitudes()).unwrap();
            prop_assert!((at_argmin - m.value).abs() < 1e-9);
        }
    }

    #[test]
    fn probe_objective_invariant_under_local_unitaries((s, n, d) in dims(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 1);
        let w = random_isometry(s, n, d, &mut rng).unwrap();
        let local = haar_unitary(n, &mut rng).unwrap().kron(&haar_unitary(d, &mut rng).unwrap());
        let rotated = Isometry::new(local.matmul(w.matrix()).unwrap(), s, n, d).unwrap();
        let a = ChannelPair::new(w, false);
        let b = ChannelPair::new(rotated, false);
        for side in [Side::Conjugate, Side::Direct] {
            for k in 0..50u64 {
                let mut pr = RngStream::new(seed, 100 + k);
                let phi = random_pure_state(s, &mut pr).unwrap();
                let x = output_entropy(&a, side, phi.amplitudes()).unwrap();
                let y = output_entropy(&b, side, phi.amplitudes()).unwrap();
                prop_assert!((x - y).abs() < 1e-9);
            }
            let cfg = OptimizerConfig { restarts: 1, ..small_cfg() };
            let pa = estimate_min_output_entropy(&a, side, &cfg, seed).unwrap().probe_min;
            let pb = estimate_min_output_entropy(&b, side, &cfg, seed).unwrap().probe_min;
            prop_assert!((pa - pb).abs() < 1e-9);
        }
    }
}
