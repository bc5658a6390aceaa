use macro_evolution::*;
use proptest::prelude::*;

const H: f64 = 2e-3;

/// `max(|r|, tents)`: 1-Lipschitz with cone tails, so its density has median 0.
fn tents(spec: &[(f64, f64, f64)]) -> MacroInterface {
    let f = |r: f64| spec.iter().fold(r.abs(), |m, &(c, b, s)| m.max(c - s * (r - b).abs()));
    MacroInterface::from_fn(H, -300, 300, 0.0, f).unwrap()
}

fn tent_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    proptest::collection::vec((0.05f64..0.25, -0.1f64..0.1, 0.0f64..1.0), 1..3)
}

fn mass_right_brute(rho: &MacroDensity, r: f64) -> f64 {
    // midpoint rule on a fine sub-grid
    let (_, b) = rho.window();
    let n = 1_000_000;
    let step = (b.max(r) - r) / n as f64;
    (0..n).map(|i| rho.value(r + (i as f64 + 0.5) * step) * step).sum()
}

#[test]
fn mass_functionals_against_brute_force() {
    let rho = interface_to_density(&tents(&[(0.2, 0.03, 0.6), (0.15, -0.05, 0.2)])).unwrap();
    for &r in &[-0.31, -0.1, 0.0, 0.0123, 0.2] {
        let d = (rho.mass_right(r) - mass_right_brute(&rho, r)).abs();
        assert!(d < 1e-6, "r={r} {d}");
    }
    // additivity: F(r) + ∫_0^r ρ = F(0)
    let r = 0.057;
    let int: f64 = (0..5700).map(|i| rho.value((i as f64 + 0.5) * 1e-5) * 1e-5).sum();
    assert!((rho.mass_right(r) + int - rho.mass_right(0.0)).abs() < 1e-6);
}

#[test]
fn stationary_gamma_support() {
    let rho = MacroDensity::stationary(1.0, 1e-3).unwrap();
    let g = rho.gamma(1.0 / 64.0).unwrap();
    let (a, b) = g.window();
    assert!((a + 0.125).abs() < 1e-12 && (b - 0.125).abs() < 1e-12);
}

#[test]
fn one_period_from_stationary_returns_close() {
    let rho = MacroDensity::stationary(1.0, 1e-3).unwrap();
    let tr = delta_evolve(&rho, 1.0, 0.01, 0.01, Barrier::Lower, &EvolveOptions::default()).unwrap();
    // mass moved is at most jδ
    assert!(tr.last().sup_interval_distance(&rho) <= 0.01 + 1e-9);
}

#[test]
fn stationary_barrier_estimate() {
    let phi = MacroInterface::stationary(1.0, 1e-3).unwrap();
    let l = barrier_limit(&phi, 1.0, 0.5, 0.1, 3, 1e-10, 1e-6).unwrap();
    let exact = phi.lifted(2.0 * 0.5);
    // the midpoint is within half the final gap of anything squeezed between the barriers
    let err = l.estimate.sup_distance(&exact);
    assert!(err <= 0.5 * l.certificate() + 1e-9, "{err}");
    assert!(cone_margin(&l.estimate, 1.0, 0.5) >= -1e-9);
    for w in l.levels.windows(2) {
        let ratio = w[1].max_mass_gap / w[0].max_mass_gap;
        assert!(ratio < 0.85, "mass gap should shrink with δ: {ratio}");
    }
}

#[test]
fn teo2_style_bound() {
    let phi = MacroInterface::stationary(1.0, 1e-3).unwrap();
    let l = barrier_limit(&phi, 1.0, 0.4, 0.1, 3, 1e-10, 1e-6).unwrap();
    for pair in &l.pairs {
        let lower = pair.lower.at(0.4).unwrap();
        assert!(interval_distance(lower, &l.estimate) <= 2.0 * pair.delta + 1e-9);
    }
}

#[test]
fn time_regularity_is_grid_stable() {
    let constants: Vec<f64> = [2e-3, 1e-3]
        .iter()
        .map(|&h| {
            let phi = MacroInterface::stationary(1.0, h).unwrap();
            let tr = delta_interface_evolve(&phi, 1.0, 0.02, 0.2, Barrier::Lower, &EvolveOptions::default()).unwrap();
            let frames: Vec<(f64, &MacroInterface)> = tr.frames.iter().map(|f| (f.t, &f.profile)).collect();
            holder_constant(&frames)
        })
        .collect();
    assert!(constants[0].is_finite() && constants[0] < 5.0);
    assert!((constants[0] - constants[1]).abs() < 0.05 * constants[1]);
}

#[test]
fn rate_comparison_toward_large_rates() {
    let phi = MacroInterface::stationary(1.0, H).unwrap();
    let c = j_monotonicity_check(&phi, 0.5, 1.0, 0.05, 0.5, 1e-10, 1e-9).unwrap();
    assert!(c.normalized_holds);
    // a huge rate keeps only the rising cone
    let big = delta_interface_evolve(&phi, 50.0, 0.05, 0.1, Barrier::Lower, &EvolveOptions::default()).unwrap();
    assert!(big.last().nodes().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heat_keeps_median_and_range(spec in tent_strategy(), t in 1e-4f64..0.05) {
        let rho = interface_to_density(&tents(&spec)).unwrap();
        prop_assert!(rho.median_defect().abs() < 1e-12);
        let out = rho.heat(t, 1e-12);
        prop_assert!(out.median_defect().abs() < 1e-9);
        prop_assert!(out.cells().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn quantile_sign_rule(spec in tent_strategy(), delta in 1e-3f64..0.1) {
        let rho = interface_to_density(&tents(&spec)).unwrap();
        let f0 = rho.mass_right(0.0);
        let (l, r) = rho.quantiles(delta).unwrap();
        prop_assert!((rho.mass_right(r) - delta).abs() < 1e-9);
        prop_assert!((rho.antimass_left(l) - delta).abs() < 1e-9);
        if f0 > delta + 1e-9 { prop_assert!(r > 0.0 && l < 0.0); }
        if f0 < delta - 1e-9 { prop_assert!(r < 0.0); }
    }

    #[test]
    fn gamma_removes_exactly(spec in tent_strategy(), delta in 1e-3f64..0.02) {
        let rho = interface_to_density(&tents(&spec)).unwrap();
        let g = rho.gamma(delta).unwrap();
        if rho.quantiles(delta).unwrap().1 > 0.0 {
            prop_assert!((rho.mass_right(0.0) - g.mass_right(0.0) - delta).abs() < 1e-10);
            prop_assert!(g.median_defect().abs() < 1e-10);
        } else {
            prop_assert!(g.is_step());
        }
    }

    #[test]
    fn interface_pipeline_matches_density(spec in tent_strategy(), j in 0.0f64..2.0) {
        let phi = tents(&spec);
        let rho = interface_to_density(&phi).unwrap();
        let d = delta_evolve(&rho, j, 0.01, 0.03, Barrier::Upper, &EvolveOptions::default()).unwrap();
        let i = delta_interface_evolve(&phi, j, 0.01, 0.03, Barrier::Upper, &EvolveOptions::default()).unwrap();
        let a = density_to_interface(d.last(), i.last().offset());
        prop_assert!(a.sup_distance(i.last()) < 1e-8);
    }

    #[test]
    fn heat_is_monotone_and_contractive(a in tent_strategy(), b in tent_strategy(), t in 1e-4f64..0.03) {
        let (pa, pb) = (tents(&a), tents(&b));
        let top = MacroInterface::from_fn(H, -300, 300, 0.0, |r| pa.eval(r).max(pb.eval(r))).unwrap();
        let (ha, htop) = (pa.heat(t, 1e-12), top.heat(t, 1e-12));
        prop_assert!(htop.difference_range(&ha).0 >= -1e-12);
        let before = pa.sup_distance(&pb);
        prop_assert!(pa.heat(t, 1e-12).sup_distance(&pb.heat(t, 1e-12)) <= before + 1e-12);
    }

    #[test]
    fn barriers_stay_ordered(spec in tent_strategy(), j in 0.1f64..2.0) {
        let p = barrier_pair(&tents(&spec), j, 0.02, 0.1, 1e-10).unwrap();
        prop_assert!(p.order_defect() < 1e-12);
        for g in &p.gaps {
            prop_assert!(g.sup_gap <= 2.0 * j * 0.02 + 1e-9);
            prop_assert!(g.mass_gap <= j * 0.02 + 1e-9);
        }
    }
}
