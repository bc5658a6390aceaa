use lattice_core::{Vertex, VertexPath};

use crate::streams::{ClockEvent, ClockKind, KillingClocks};

/// The four vertex paths built from one realization of the killing clocks.
#[derive(Clone, Debug)]
pub struct StandardPaths {
    /// Constant at the starting vertex.
    pub origin: VertexPath,
    /// Jumps by `(1, 1)` at births and `(-1, 1)` at deaths.
    pub exact: VertexPath,
    /// `exact` frozen at the left end of each δ-block; jumps at `nδ`, `n >= 1`.
    pub lower: VertexPath,
    /// `exact` read at the right end of each δ-block; first jump at time 0.
    pub upper: VertexPath,
}

pub(crate) fn step(v: Vertex, kind: ClockKind) -> Vertex {
    match kind {
        ClockKind::Birth => v.offset(1, 1),
        ClockKind::Death => v.offset(-1, 1),
    }
}

/// Builds the standard paths on `[0, horizon]` from vertex `v0`.
pub fn standard_paths(v0: Vertex, clocks: &KillingClocks, delta: f64, horizon: f64) -> StandardPaths {
    assert!(delta > 0.0, "block length must be positive");
    let blocks = (horizon / delta).ceil().max(0.0) as u64;
    // the upper path needs the clocks up to the end of the last block
    let reach = (blocks as f64 + 1.0) * delta;
    paths_from_events(v0, &clocks.between(0.0, reach), delta, horizon)
}

/// Same construction from an explicit, time-sorted list of clock events.
pub fn paths_from_events(v0: Vertex, events: &[ClockEvent], delta: f64, horizon: f64) -> StandardPaths {
    assert!(delta > 0.0, "block length must be positive");
    let blocks = (horizon / delta).ceil().max(0.0) as u64;
    let mut exact = VertexPath::constant(v0);
    let mut v = v0;
    for e in events {
        v = step(v, e.kind);
        if e.time <= horizon {
            exact.push(e.time, v).expect("clock times increase");
        }
    }

    let value_at = |t: f64| -> Vertex {
        let mut v = v0;
        for e in events.iter().take_while(|e| e.time <= t) {
            v = step(v, e.kind);
        }
        v
    };

    let mut lower = VertexPath::constant(v0);
    let mut upper = VertexPath::constant(v0);
    for n in 0..=blocks {
        let t = n as f64 * delta;
        if t > horizon {
            break;
        }
        if n >= 1 {
            let v = value_at(t);
            if v != lower.last() {
                lower.push(t, v).expect("blocks increase");
            }
        }
        let v = value_at(t + delta);
        if v != upper.last() {
            upper.push(t, v).expect("blocks increase");
        }
    }

    StandardPaths { origin: VertexPath::constant(v0), exact, lower, upper }
}
