use interface_sim::*;
use lattice_core::{Interface, ParticleConfig, Vertex, VertexPath};
use proptest::prelude::*;

fn v(a: i64, b: i64) -> Vertex {
    Vertex::new(a, b).unwrap()
}

fn bump() -> Interface {
    // vertex (0, 0), two local maxima
    Interface::from_heights(-2, vec![2, 3, 2, 3, 2]).unwrap()
}

fn random_centered(bits: &[bool]) -> Interface {
    // shift so the median sits at -1/2, then lift to vertex height 0
    let eta = ParticleConfig::from_window(0, bits);
    let eta = eta.shifted(-eta.median_floor() - 1);
    Interface::from_particles(&eta, 0).unwrap()
}

#[test]
fn corner_flip_rules() {
    // local minimum at 0
    let mut xi = Interface::from_heights(-1, vec![1, 0, 1]).unwrap();
    assert!(!flip(&mut xi, 0, false));
    assert!(flip(&mut xi, 0, true));
    assert_eq!(xi.get(0), 2);
    // slopes agree at 3, nothing happens
    assert!(!flip(&mut xi, 3, true));
}

#[test]
fn vertex_conserved_by_arrows() {
    let w = ArrowStream::new(42);
    let mut b = CoupledBundle::new(w, KillingClocks::new(0, 0.0), vec![Member::new("free", bump(), Driver::Free)]);
    let mut events = 0;
    b.advance(200.0, |_, _, m| {
        events += 1;
        assert_eq!(m[0].state.vertex(), Vertex::ORIGIN);
    });
    assert!(events > 10);
}

#[test]
fn harris_pieces_compose() {
    let w = ArrowStream::new(3);
    let whole = harris_evolve(&bump(), &w, 0.0, 7.5);
    let half = harris_evolve(&bump(), &w, 0.0, 2.25);
    assert_eq!(harris_evolve(&half, &w, 2.25, 7.5), whole);
}

#[test]
fn constant_path_is_plain_harris() {
    let w = ArrowStream::new(8);
    let a = evolve_with_vertex_path(&bump(), &VertexPath::constant(Vertex::ORIGIN), &w, 12.0);
    assert_eq!(a, harris_evolve(&bump(), &w, 0.0, 12.0));
    let paths = standard_paths(Vertex::ORIGIN, &KillingClocks::new(8, 0.0), 1.0, 12.0);
    assert_eq!(evolve_with_vertex_path(&bump(), &paths.exact, &w, 12.0), a);
}

#[test]
fn single_path_event_is_a_cone_join() {
    let w = ArrowStream::new(5);
    let mut path = VertexPath::constant(Vertex::ORIGIN);
    path.push(1.5, v(-1, 1)).unwrap();
    let got = evolve_with_vertex_path(&Interface::cone(Vertex::ORIGIN), &path, &w, 4.0);
    let before = harris_evolve(&Interface::cone(Vertex::ORIGIN), &w, 0.0, 1.5);
    let joined = before.cone_join(v(-1, 1));
    assert_eq!(got, harris_evolve(&joined, &w, 1.5, 4.0));
    assert_eq!(got.vertex(), v(-1, 1));
}

#[test]
fn zero_rate_sandwich_is_trivial() {
    let run = coupled_delta_sandwich(&bump(), 0.0, 1.0, 10.0, 2).unwrap();
    let s = run.bundle.states();
    assert_eq!(s[0], s[1]);
    assert_eq!(s[1], s[2]);
}

#[test]
fn huge_block_lower_ignores_killings() {
    let run = coupled_delta_sandwich(&Interface::cone(Vertex::ORIGIN), 1.0, 100.0, 10.0, 4).unwrap();
    let s = run.bundle.states();
    assert_eq!(s[0].vertex(), Vertex::ORIGIN);
    assert!(s[1].vertex().v2 > 0);
}

#[test]
fn injected_fault_is_reported() {
    let run = sandwich_run(&Interface::cone(Vertex::ORIGIN), 0.5, 1.0, 10.0, 1, FaultInjection { swap_barriers: true });
    assert!(!run.violations.is_empty());
    assert!(run.into_result().is_err());
}

#[test]
fn recenter_hand_cases() {
    let c = Interface::cone(Vertex::ORIGIN);
    assert_eq!(recenter(&c, ClockKind::Death), c);
    assert_eq!(recenter(&c, ClockKind::Birth), c);
    let small: Interface = "-1:1:+-".parse().unwrap();
    assert_eq!(recenter(&bump(), ClockKind::Death), small);
    assert_eq!(recenter(&bump(), ClockKind::Birth), small);
    // the particle picture: death at the rightmost particle, then shift back
    let mut eta = bump().to_particles();
    eta.death();
    let eta = eta.shifted(1);
    assert_eq!(recenter(&bump(), ClockKind::Death).to_particles(), eta);
}

#[test]
fn centered_run_keeps_vertex_at_origin() {
    let b = centered_evolve(&bump(), 0.7, 100.0, 6).unwrap();
    assert_eq!(b.members()[0].state.vertex(), Vertex::ORIGIN);
    assert_eq!(b.reconstruct(0, 100.0).unwrap(), b.members()[0].state);
    assert!(centered_evolve(&Interface::cone(v(1, 1)), 0.7, 1.0, 6).is_err());
}

#[test]
fn centered_without_clocks_keeps_vertex() {
    let b = centered_evolve(&Interface::cone(Vertex::ORIGIN), 0.0, 50.0, 6).unwrap();
    assert_eq!(b.members()[0].state.vertex(), Vertex::ORIGIN);
    let w = ArrowStream::new(6);
    assert_eq!(b.members()[0].state, harris_evolve(&Interface::cone(Vertex::ORIGIN), &w, 0.0, 50.0));
}

#[test]
fn rate_ordering_edge_cases() {
    let same = coupled_rate_ordering(&bump(), 0.8, 0.8, 30.0, 3).unwrap();
    let s = same.bundle.states();
    assert_eq!(s[0], s[1]);
    let free = coupled_rate_ordering(&bump(), 0.8, 0.0, 30.0, 3).unwrap();
    let w = ArrowStream::new(3);
    assert_eq!(free.bundle.states()[1], &harris_evolve(&bump(), &w, 0.0, 30.0));
    assert!(coupled_rate_ordering(&bump(), 0.5, 0.8, 1.0, 0).is_err());
}

#[test]
fn height_identity_first_death_by_hand() {
    let c = Interface::cone(Vertex::ORIGIN);
    let after = c.cone_join(v(-1, 1));
    assert_eq!(after.get(0), 2);
    assert_eq!(after.to_particles(), ParticleConfig::heaviside(-1));
    assert_eq!(after.to_particles().particles_from(0), 0);
    let born = c.cone_join(v(1, 1));
    assert_eq!(born.to_particles(), ParticleConfig::heaviside(1));
    assert_eq!(born.get(0), 2 * born.to_particles().particles_from(0) as i64);
}

#[test]
fn height_identity_long_run() {
    let r = height_identity_check(&bump(), 0.6, 300.0, 12).unwrap();
    assert!(r.holds, "{r:?}");
    assert!(r.deaths > 50);
}

#[test]
fn arrow_events_are_exclusion_swaps() {
    let clocks = KillingClocks::new(9, 0.5);
    let paths = standard_paths(Vertex::ORIGIN, &clocks, 1.0, 60.0);
    let mut b = CoupledBundle::new(ArrowStream::new(9), clocks, vec![Member::new("exact", bump(), Driver::Path(paths.exact))]).with_log();
    let mut prev = bump().to_particles();
    let mut births = 0;
    let mut deaths = 0;
    b.advance(60.0, |_, kind, m| {
        let now = m[0].state.to_particles();
        match kind {
            StepKind::Arrow { site, .. } => {
                let mut expect = prev.clone();
                expect.exchange(site - 1);
                assert_eq!(now, expect);
            }
            StepKind::PathJump { .. } => {
                let mut born = prev.clone();
                born.birth();
                let mut dead = prev.clone();
                dead.death();
                if now == born {
                    births += 1;
                } else {
                    assert_eq!(now, dead);
                    deaths += 1;
                }
            }
            StepKind::Clock(_) => unreachable!("no centered members"),
        }
        prev = now;
    });
    assert!(births > 5 && deaths > 5);
    assert_eq!(b.reconstruct(0, 60.0).unwrap(), b.members()[0].state);
    let mut csv = Vec::new();
    b.write_log_csv(&mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with("time,site,kind,member"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn attractive_under_shared_arrows(bits in proptest::collection::vec(any::<bool>(), 0..10), lift in 1i64..3, seed in 0u64..500) {
        let low = random_centered(&bits);
        let high = low.cone_join(Vertex { v1: 1, v2: 2 * lift - 1 });
        let members = vec![Member::new("low", low, Driver::Free), Member::new("high", high, Driver::Free)];
        let mut b = CoupledBundle::new(ArrowStream::new(seed), KillingClocks::new(seed, 0.0), members);
        let mut ok = true;
        b.advance(40.0, |_, _, m| ok &= m[0].state.le(&m[1].state));
        prop_assert!(ok);
    }

    #[test]
    fn sandwich_holds(bits in proptest::collection::vec(any::<bool>(), 0..8), seed in 0u64..1000) {
        let xi = random_centered(&bits);
        let run = sandwich_run(&xi, 0.7, 0.75, 8.0, seed, FaultInjection::default());
        prop_assert!(run.violations.is_empty(), "{:?}", run.violations.first());
    }

    #[test]
    fn faster_killing_stays_below(bits in proptest::collection::vec(any::<bool>(), 0..8), seed in 0u64..1000) {
        let xi = random_centered(&bits);
        prop_assert!(coupled_rate_ordering(&xi, 1.0, 0.4, 20.0, seed).is_ok());
    }

    #[test]
    fn height_identity_random_start(bits in proptest::collection::vec(any::<bool>(), 0..10), seed in 0u64..1000) {
        let r = height_identity_check(&random_centered(&bits), 0.5, 40.0, seed).unwrap();
        prop_assert!(r.holds);
    }
}
