use entlab::experiments::{binomial_sigma, ks_critical, ks_one_sample, pushforward_campaign};
use entlab::matcore::C64;
use entlab::randq::{
    haar_unitary, overlap_decompose, overlap_tail, random_isometry, random_pure_state, RngStream,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn streams_reproduce_bitwise(seed in any::<u64>(), stream in any::<u64>(), m in 1usize..6) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream);
        let ua = haar_unitary(m, &mut a).unwrap();
        let ub = haar_unitary(m, &mut b).unwrap();
        prop_assert!(ua.as_slice().iter().zip(ub.as_slice()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        let wa = random_isometry(2, 2, m, &mut a).unwrap();
        let wb = random_isometry(2, 2, m, &mut b).unwrap();
        prop_assert_eq!(wa.matrix(), wb.matrix());
        prop_assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn distinct_streams_differ(seed in any::<u64>(), stream in 0u64..1 << 40) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream + 1);
        prop_assert_ne!(a.next_u64(), b.next_u64());
    }
}

#[test]
fn haar_entry_moduli_follow_beta() {
    let trials = 100_000;
    for m in [2usize, 4] {
        let mut samples: Vec<f64> = (0..trials)
            .map(|k| {
                let mut rng = RngStream::new(17, k as u64);
                haar_unitary(m, &mut rng).unwrap()[(0, m - 1)].norm_sqr()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / trials as f64;
        let mf = m as f64;
        let sd = ((mf - 1.0) / (mf * mf * (mf + 1.0)) / trials as f64).sqrt();
        assert!((mean - 1.0 / mf).abs() < 4.0 * sd, "m={m}: mean {mean}");
        let ks = ks_one_sample(&mut samples, |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powf(mf - 1.0));
        assert!(ks < ks_critical(trials as f64), "m={m}: KS {ks}");
    }
}

#[test]
fn overlap_tail_and_independence() {
    let trials = 100_000;
    for s in [2usize, 4, 8, 16] {
        let draws: Vec<(f64, f64)> = (0..trials)
            .map(|k| {
                let mut rng = RngStream::new(19, k as u64);
                let psi = random_pure_state(s, &mut rng).unwrap();
                let theta = random_pure_state(s, &mut rng).unwrap();
                let (x, phi) = overlap_decompose(&psi, &theta).unwrap();
                (x.norm(), phi.amplitudes()[0].norm_sqr())
            })
            .collect();
        for t in [0.1, 0.3, 0.5, 0.7] {
            let law = overlap_tail(s, t).unwrap();
            let hits = draws.iter().filter(|p| p.0 > t).count() as f64 / trials as f64;
            let sigma = binomial_sigma(law, trials);
            assert!((hits - law).abs() <= 4.0 * sigma, "s={s}, t={t}: {hits} vs {law}");
        }
        let n = trials as f64;
        let (mx, my) = draws.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0 / n, a.1 + p.1 / n));
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for &(x, y) in &draws {
            let (a, b) = (x * x - mx, y - my);
            sxy += a * b;
            sxx += a * a;
            syy += b * b;
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!(corr.abs() < 4.0 / n.sqrt(), "s={s}: correlation {corr}");
    }
}

#[test]
fn overlap_recomposition() {
    let mut worst = 0.0f64;
    for k in 0..10_000u64 {
        let mut rng = RngStream::new(23, k);
        let psi = random_pure_state(8, &mut rng).unwrap();
        let theta = random_pure_state(8, &mut rng).unwrap();
        let (x, phi) = overlap_decompose(&psi, &theta).unwrap();
        let c = (1.0 - x.norm_sqr()).sqrt();
        let orth: C64 = psi.inner(&phi);
        worst = worst.max(orth.norm());
        for ((t, p), f) in theta.amplitudes().iter().zip(psi.amplitudes()).zip(phi.amplitudes()) {
            worst = worst.max((t - x * p - f * c).norm());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn embedded_images_match_uniform_states() {
    let r = pushforward_campaign(2, 3, 2, 10_000, 29).unwrap();
    assert!(r.pass, "KS {} vs {}", r.estimate, r.bound_or_law);
}
