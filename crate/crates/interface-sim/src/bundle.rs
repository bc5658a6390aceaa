use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use lattice_core::{Interface, Vertex, VertexPath};

use crate::streams::{ArrowStream, ClockEvent, ClockKind, KillingClocks};

/// How a member reacts to the non-arrow randomness.
#[derive(Clone, Debug)]
pub enum Driver {
    /// Arrows only.
    Free,
    /// Joins with the path's cone at every path event.
    Path(VertexPath),
    /// Process seen from its vertex: at a clock event whose mark is below
    /// `keep`, shift and join with the origin cone.
    Centered { keep: f64 },
}

#[derive(Clone, Debug)]
pub struct Member {
    pub label: String,
    pub state: Interface,
    pub driver: Driver,
    next_path_event: usize,
}

impl Member {
    pub fn new(label: impl Into<String>, state: Interface, driver: Driver) -> Self {
        Self { label: label.into(), state, driver, next_path_event: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogKind {
    Up,
    Down,
    /// Cone join at a path event; carries the new vertex.
    Join(Vertex),
    /// Centered update after a birth or a death.
    Recenter(ClockKind),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogEntry {
    pub time: f64,
    pub site: i64,
    pub kind: LogKind,
    pub member: usize,
}

/// What just happened, passed to observers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepKind {
    Arrow { site: i64, up: bool },
    PathJump { member: usize },
    Clock(ClockEvent),
}

#[derive(Clone, Copy, Debug)]
enum Pending {
    Arrow { site: i64, up: bool },
    Path { member: usize },
    Clock(ClockEvent),
}

#[derive(Clone, Copy, Debug)]
struct Queued {
    time: f64,
    rank: u8,
    site: i64,
    what: Pending,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // reversed: BinaryHeap pops the earliest event first. Ties (measure zero
    // for arrows) are broken by kind, then site, then direction.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.rank.cmp(&self.rank))
            .then(other.site.cmp(&self.site))
    }
}

/// Several interfaces evolved in lockstep on one arrow stream and one set of clocks.
#[derive(Clone, Debug)]
pub struct CoupledBundle {
    arrows: ArrowStream,
    clocks: KillingClocks,
    members: Vec<Member>,
    initial: Vec<Interface>,
    time: f64,
    log: Option<Vec<LogEntry>>,
}

/// Applies the corner-flip rule at `x`; returns whether the height changed.
pub fn flip(state: &mut Interface, x: i64, up: bool) -> bool {
    let left = state.get(x - 1);
    if left != state.get(x + 1) {
        return false;
    }
    let target = if up { left + 1 } else { left - 1 };
    if state.get(x) == target {
        return false;
    }
    state.set(x, target);
    true
}

/// The centered update after a clock event: shift so that the new vertex
/// returns to the origin, then join with the origin cone.
pub fn recenter(state: &Interface, kind: ClockKind) -> Interface {
    let shifted = match kind {
        ClockKind::Death => state.translate(1, 1),
        ClockKind::Birth => state.translate(-1, 1),
    }
    .expect("shift vectors have even parity");
    shifted.cone_join(Vertex::ORIGIN)
}

impl CoupledBundle {
    /// Members whose paths have events at time 0 are joined immediately.
    pub fn new(arrows: ArrowStream, clocks: KillingClocks, members: Vec<Member>) -> Self {
        let initial = members.iter().map(|m| m.state.clone()).collect();
        let mut b = Self { arrows, clocks, members, initial, time: 0.0, log: None };
        for i in 0..b.members.len() {
            b.flush_path_events_at_or_before(i, 0.0);
        }
        b
    }

    /// Moves the start time; only meaningful before the first `advance`.
    pub fn starting_at(mut self, s: f64) -> Self {
        self.time = s;
        self
    }

    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn states(&self) -> Vec<&Interface> {
        self.members.iter().map(|m| &m.state).collect()
    }

    pub fn initial_states(&self) -> &[Interface] {
        &self.initial
    }

    pub fn arrows(&self) -> ArrowStream {
        self.arrows
    }

    pub fn clocks(&self) -> KillingClocks {
        self.clocks
    }

    pub fn log(&self) -> Option<&[LogEntry]> {
        self.log.as_deref()
    }

    fn record(&mut self, entry: LogEntry) {
        if let Some(log) = self.log.as_mut() {
            log.push(entry);
        }
    }

    fn flush_path_events_at_or_before(&mut self, i: usize, t: f64) {
        loop {
            let m = &mut self.members[i];
            let Driver::Path(path) = &m.driver else { return };
            let Some(&(time, v)) = path.events().get(m.next_path_event) else { return };
            if time > t {
                return;
            }
            m.next_path_event += 1;
            if m.state.cone_join_in_place(v) {
                self.record(LogEntry { time, site: v.v1, kind: LogKind::Join(v), member: i });
            }
        }
    }

    fn union_bounds(&self) -> (i64, i64) {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for m in &self.members {
            let (l, r) = m.state.bounds();
            lo = lo.min(l);
            hi = hi.max(r);
        }
        (lo, hi)
    }

    fn push_arrows(&self, heap: &mut BinaryHeap<Queued>, sites: std::ops::RangeInclusive<i64>, cell: i64, after: f64, until: f64) {
        for x in sites {
            for up in [false, true] {
                for time in self.arrows.cell(x, cell, up) {
                    if time > after && time <= until {
                        heap.push(Queued { time, rank: 2, site: x * 2 + up as i64, what: Pending::Arrow { site: x, up } });
                    }
                }
            }
        }
    }

    /// Advances every member to time `t`, calling `observe` after each event
    /// that changed at least one member.
    pub fn advance<F>(&mut self, t: f64, mut observe: F)
    where
        F: FnMut(f64, StepKind, &[Member]),
    {
        if t <= self.time {
            return;
        }
        let needs_clocks = self.members.iter().any(|m| matches!(m.driver, Driver::Centered { .. }));
        let clock_events = if needs_clocks { self.clocks.between(self.time, t) } else { Vec::new() };
        let mut next_clock = 0usize;

        let first_cell = self.time.floor() as i64;
        let last_cell = t.floor() as i64;
        for cell in first_cell..=last_cell {
            let start = self.time;
            let end = t.min((cell + 1) as f64);
            if end <= start {
                continue;
            }
            let mut heap = BinaryHeap::new();
            let (mut mlo, mut mhi) = self.union_bounds();
            self.push_arrows(&mut heap, mlo..=mhi, cell, start, end);
            for (i, m) in self.members.iter().enumerate() {
                if let Driver::Path(path) = &m.driver {
                    for &(time, _) in path.events().iter().skip(m.next_path_event) {
                        if time > end {
                            break;
                        }
                        heap.push(Queued { time, rank: 0, site: i as i64, what: Pending::Path { member: i } });
                    }
                }
            }
            while next_clock < clock_events.len() && clock_events[next_clock].time <= end {
                let e = clock_events[next_clock];
                heap.push(Queued { time: e.time, rank: 1, site: 0, what: Pending::Clock(e) });
                next_clock += 1;
            }

            while let Some(q) = heap.pop() {
                self.time = q.time;
                let changed = match q.what {
                    Pending::Arrow { site, up } => {
                        let mut any = false;
                        for i in 0..self.members.len() {
                            if flip(&mut self.members[i].state, site, up) {
                                any = true;
                                let kind = if up { LogKind::Up } else { LogKind::Down };
                                self.record(LogEntry { time: q.time, site, kind, member: i });
                            }
                        }
                        any.then_some(StepKind::Arrow { site, up })
                    }
                    Pending::Path { member } => {
                        let old = self.members[member].state.clone();
                        self.flush_path_events_at_or_before(member, q.time);
                        (old != self.members[member].state).then_some(StepKind::PathJump { member })
                    }
                    Pending::Clock(e) => {
                        let mut any = false;
                        for i in 0..self.members.len() {
                            if let Driver::Centered { keep } = self.members[i].driver {
                                if e.mark < keep {
                                    let next = recenter(&self.members[i].state, e.kind);
                                    if next != self.members[i].state {
                                        any = true;
                                        self.members[i].state = next;
                                        self.record(LogEntry { time: e.time, site: 0, kind: LogKind::Recenter(e.kind), member: i });
                                    }
                                }
                            }
                        }
                        any.then_some(StepKind::Clock(e))
                    }
                };
                if let Some(kind) = changed {
                    observe(q.time, kind, &self.members);
                    let (lo, hi) = self.union_bounds();
                    if lo < mlo {
                        self.push_arrows(&mut heap, lo..=(mlo - 1), cell, q.time, end);
                        mlo = lo;
                    }
                    if hi > mhi {
                        self.push_arrows(&mut heap, (mhi + 1)..=hi, cell, q.time, end);
                        mhi = hi;
                    }
                }
            }
            self.time = end;
        }
        self.time = t;
    }

    /// Replays the log of `member` up to time `t` from its initial state.
    pub fn reconstruct(&self, member: usize, t: f64) -> Option<Interface> {
        let log = self.log.as_ref()?;
        let mut s = self.initial[member].clone();
        for e in log.iter().filter(|e| e.member == member && e.time <= t) {
            match e.kind {
                LogKind::Up => s.set(e.site, s.get(e.site - 1) + 1),
                LogKind::Down => s.set(e.site, s.get(e.site - 1) - 1),
                LogKind::Join(v) => s = s.cone_join(v),
                LogKind::Recenter(k) => s = recenter(&s, k),
            }
        }
        Some(s)
    }

    /// Event log as CSV with columns `time,site,kind,member`.
    pub fn write_log_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "site", "kind", "member"])?;
        for e in self.log.as_deref().unwrap_or(&[]) {
            let kind = match e.kind {
                LogKind::Up => "up".to_string(),
                LogKind::Down => "down".to_string(),
                LogKind::Join(v) => format!("join({};{})", v.v1, v.v2),
                LogKind::Recenter(ClockKind::Birth) => "birth".to_string(),
                LogKind::Recenter(ClockKind::Death) => "death".to_string(),
            };
            w.write_record([e.time.to_string(), e.site.to_string(), kind, self.members[e.member].label.clone()])?;
        }
        w.flush()?;
        Ok(())
    }
}
