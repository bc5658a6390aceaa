use lattice_core::{Interface, Vertex, VertexPath};

use crate::bundle::{CoupledBundle, Driver, Member};
use crate::paths::{standard_paths, StandardPaths};
use crate::streams::{ArrowStream, ClockKind, KillingClocks};
use crate::InterfaceError;

/// `T_{[s,t]}`: evolves `xi` with the arrows of `arrows` in `(s, t]`.
pub fn harris_evolve(xi: &Interface, arrows: &ArrowStream, s: f64, t: f64) -> Interface {
    assert!(s <= t, "need s <= t");
    // shift the clock so the bundle starts at s
    let mut b = CoupledBundle::new(*arrows, KillingClocks::new(0, 0.0), vec![Member::new("free", xi.clone(), Driver::Free)])
        .starting_at(s);
    b.advance(t, |_, _, _| {});
    b.members()[0].state.clone()
}

/// `T^z_{[0,T]}`: corner flips between the jumps of `path`, cone joins at them.
pub fn evolve_with_vertex_path(xi: &Interface, path: &VertexPath, arrows: &ArrowStream, horizon: f64) -> Interface {
    let mut b = CoupledBundle::new(*arrows, KillingClocks::new(0, 0.0), vec![Member::new("path", xi.clone(), Driver::Path(path.clone()))]);
    b.advance(horizon, |_, _, _| {});
    b.members()[0].state.clone()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderViolation {
    pub time: f64,
    pub site: i64,
    pub lower: String,
    pub upper: String,
}

/// Outcome of a coupled run whose members must stay ordered.
#[derive(Clone, Debug)]
pub struct OrderedRun {
    pub bundle: CoupledBundle,
    pub checks: u64,
    pub violations: Vec<OrderViolation>,
}

impl OrderedRun {
    pub fn into_result(self) -> Result<OrderedRun, InterfaceError> {
        match self.violations.first() {
            None => Ok(self),
            Some(v) => Err(InterfaceError::OrderViolation {
                time: v.time,
                site: v.site,
                lower: v.lower.clone(),
                upper: v.upper.clone(),
                count: self.violations.len(),
            }),
        }
    }
}

fn check_chain(time: f64, members: &[Member], chain: &[usize], out: &mut Vec<OrderViolation>) {
    for w in chain.windows(2) {
        let (a, b) = (&members[w[0]], &members[w[1]]);
        if let Some(site) = a.state.first_excess(&b.state) {
            out.push(OrderViolation { time, site, lower: a.label.clone(), upper: b.label.clone() });
        }
    }
}

fn run_ordered(mut bundle: CoupledBundle, horizon: f64, chain: &[usize]) -> OrderedRun {
    let mut violations = Vec::new();
    let mut checks = 1u64;
    check_chain(0.0, bundle.members(), chain, &mut violations);
    bundle.advance(horizon, |t, _, m| {
        checks += 1;
        check_chain(t, m, chain, &mut violations);
    });
    OrderedRun { bundle, checks, violations }
}

/// Test hook: swaps the barrier paths so the ordering check must fire.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FaultInjection {
    pub swap_barriers: bool,
}

/// Evolves the δ-lower, exact and δ-upper processes on shared randomness and
/// checks `lower <= exact <= upper` after every event.
pub fn coupled_delta_sandwich(xi: &Interface, rate: f64, delta: f64, horizon: f64, seed: u64) -> Result<OrderedRun, InterfaceError> {
    sandwich_run(xi, rate, delta, horizon, seed, FaultInjection::default()).into_result()
}

/// Same as [`coupled_delta_sandwich`] but returns the report even when the order breaks.
pub fn sandwich_run(xi: &Interface, rate: f64, delta: f64, horizon: f64, seed: u64, fault: FaultInjection) -> OrderedRun {
    let clocks = KillingClocks::new(seed, rate);
    let StandardPaths { exact, mut lower, mut upper, .. } = standard_paths(xi.vertex(), &clocks, delta, horizon);
    if fault.swap_barriers {
        std::mem::swap(&mut lower, &mut upper);
    }
    let members = vec![
        Member::new("lower", xi.clone(), Driver::Path(lower)),
        Member::new("exact", xi.clone(), Driver::Path(exact)),
        Member::new("upper", xi.clone(), Driver::Path(upper)),
    ];
    let bundle = CoupledBundle::new(ArrowStream::new(seed), clocks, members);
    run_ordered(bundle, horizon, &[0, 1, 2])
}

/// The process seen from its vertex, started at an interface with vertex at the origin.
pub fn centered_evolve(xi: &Interface, rate: f64, horizon: f64, seed: u64) -> Result<CoupledBundle, InterfaceError> {
    if xi.vertex() != Vertex::ORIGIN {
        return Err(InterfaceError::NotCentered(xi.vertex()));
    }
    let clocks = KillingClocks::new(seed, rate);
    let mut b = CoupledBundle::new(ArrowStream::new(seed), clocks, vec![Member::new("centered", xi.clone(), Driver::Centered { keep: 1.0 })])
        .with_log();
    b.advance(horizon, |_, _, _| {});
    Ok(b)
}

/// Centered processes at rates `rate >= slower`, with the slower clocks
/// obtained by thinning; checks that the faster one stays below.
pub fn coupled_rate_ordering(xi: &Interface, rate: f64, slower: f64, horizon: f64, seed: u64) -> Result<OrderedRun, InterfaceError> {
    if xi.vertex() != Vertex::ORIGIN {
        return Err(InterfaceError::NotCentered(xi.vertex()));
    }
    if !(slower <= rate) || slower < 0.0 {
        return Err(InterfaceError::BadParameter(format!("need 0 <= J' <= J, got J={rate}, J'={slower}")));
    }
    let keep = if rate > 0.0 { slower / rate } else { 1.0 };
    let members = vec![
        Member::new("fast", xi.clone(), Driver::Centered { keep: 1.0 }),
        Member::new("slow", xi.clone(), Driver::Centered { keep }),
    ];
    let bundle = CoupledBundle::new(ArrowStream::new(seed), KillingClocks::new(seed, rate), members);
    run_ordered(bundle, horizon, &[0, 1]).into_result()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeightIdentityReport {
    pub holds: bool,
    pub checks: u64,
    pub first_failure: Option<f64>,
    pub deaths: u64,
}

/// `ξ(0) = 2 B + 2 Σ_{x>=0} η(x)` with `η = D ξ`, checked at every event of
/// the exact process started from an interface with vertex at the origin.
pub fn height_identity_check(xi: &Interface, rate: f64, horizon: f64, seed: u64) -> Result<HeightIdentityReport, InterfaceError> {
    if xi.vertex() != Vertex::ORIGIN {
        return Err(InterfaceError::NotCentered(xi.vertex()));
    }
    let clocks = KillingClocks::new(seed, rate);
    let paths = standard_paths(xi.vertex(), &clocks, 1.0, horizon);
    let mut b = CoupledBundle::new(ArrowStream::new(seed), clocks, vec![Member::new("exact", xi.clone(), Driver::Path(paths.exact))]);
    let holds_at = |s: &Interface, deaths: u64| s.get(0) == 2 * deaths as i64 + 2 * s.to_particles().particles_from(0) as i64;
    let death_times: Vec<f64> = clocks
        .between(0.0, horizon)
        .into_iter()
        .filter(|e| e.kind == ClockKind::Death)
        .map(|e| e.time)
        .collect();
    let mut deaths = 0u64;
    let mut checks = 1u64;
    let mut first_failure = (!holds_at(xi, 0)).then_some(0.0);
    b.advance(horizon, |t, _, m| {
        while (deaths as usize) < death_times.len() && death_times[deaths as usize] <= t {
            deaths += 1;
        }
        checks += 1;
        if first_failure.is_none() && !holds_at(&m[0].state, deaths) {
            first_failure = Some(t);
        }
    });
    let deaths = death_times.len() as u64;
    Ok(HeightIdentityReport { holds: first_failure.is_none(), checks, first_failure, deaths })
}
