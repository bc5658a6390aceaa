use lattice_core::ParticleConfig;
use particle_sim::*;
use proptest::prelude::*;

#[test]
fn identical_seeds_give_identical_logs() {
    let eta = ParticleConfig::step_with_particles(-1, &[2, 4]);
    let a = simulate_particle(&eta, 0.5, 40.0, 11).unwrap();
    let b = simulate_particle(&eta, 0.5, 40.0, 11).unwrap();
    assert_eq!(a.events, b.events);
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
    let c = simulate_particle(&eta, 0.5, 40.0, 12).unwrap();
    assert_ne!(a.events, c.events);
}

#[test]
fn boundary_counts_look_poisson() {
    // A_t and B_t are Poisson(J t): mean and variance both J t = 10.
    let samples = median_walk_ensemble(&ParticleConfig::heaviside(1), 0.5, 20.0, 2000, 77).unwrap();
    let n = samples.len() as f64;
    for pick in [|s: &MedianWalkSample| s.births as f64, |s: &MedianWalkSample| s.deaths as f64] {
        let xs: Vec<f64> = samples.iter().map(pick).collect();
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // se of the mean is sqrt(10/2000) = 0.07
        assert!((mean - 10.0).abs() < 0.3, "mean {mean}");
        // se of the variance is about 10 * sqrt(2/2000) = 0.32
        assert!((var - 10.0).abs() < 1.5, "var {var}");
    }
}

#[test]
fn width_is_zero_only_for_steps() {
    let t = simulate_particle(&ParticleConfig::heaviside(0), 1.0, 30.0, 5).unwrap();
    for (_, c) in t.snapshots(&[1.0, 5.0, 10.0, 20.0, 30.0]) {
        assert!(c.span() >= 0);
        assert_eq!(c.span() == 0, c.is_heaviside());
    }
}

#[test]
fn large_rate_keeps_centered_width_small() {
    let e = estimate_invariant_width(8.0, 50.0, 500.0, 2).unwrap();
    assert!(e.value < 0.2, "width {}", e.value);
}

#[test]
fn drift_estimate_at_step_is_half() {
    let e = drift_check_psi(&ParticleConfig::heaviside(1), 1.0, 0.01, 4000, 21).unwrap();
    assert!(e.z_score(0.5).abs() < 4.0, "{e:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn median_identity_on_random_starts(bits in proptest::collection::vec(any::<bool>(), 0..10), seed in 0u64..1000) {
        let eta = ParticleConfig::from_window(0, &bits);
        let t = simulate_particle(&eta, 0.8, 30.0, seed).unwrap();
        prop_assert_eq!(t.median_violations, 0);
        prop_assert_eq!(t.final_config.median() - eta.median(), t.births as f64 - t.deaths as f64);
    }
}
