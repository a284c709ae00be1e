//! Event-driven continuous-time simulation.
//!
//! A site `x` is *active* when `η(x-1) = η(x) = 1` and `η(x+1) = 0`; each
//! active site fires at rate one, moving its particle to `x + 1`. All rates are
//! equal, so the exact (Gillespie) step draws an `Exp(|A|)` holding time and
//! picks a uniformly random member of the active set `A`.
//!
//! On a segment the site left of the window is treated as empty, so index 0
//! is never active. With [`SimState::with_right_exit`] the last site fires
//! whenever it and its left neighbour are occupied, and the particle leaves
//! the window.

mod freezing;

pub use freezing::{
    freezing_protocol, freezing_time_origin, height_growth_probe, record_sites,
    window_from_streams, FreezeError, FreezeParams, FreezeVerdict, FreezingOutcome, Inconclusive,
    SiteClocks,
};

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{Configuration, PairCounts, TopologyKind};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("site {0} is not an active bond")]
    NotActive(usize),
    #[error("absorbing state: no active bond")]
    Absorbed,
}

/// Active sites of `config`, ascending. Segments only report interior sites.
pub fn active_bonds(config: &Configuration) -> Vec<usize> {
    config
        .interior_triples()
        .filter(|&x| config.is_active_at(x))
        .collect()
}

/// Set of site indices with O(1) insert, remove and uniform sampling.
#[derive(Debug, Clone)]
pub struct ActiveSet {
    members: Vec<usize>,
    slot: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl ActiveSet {
    pub fn with_capacity(sites: usize) -> Self {
        assert!(sites < ABSENT as usize);
        ActiveSet {
            members: Vec::new(),
            slot: vec![ABSENT; sites],
        }
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.slot[x] != ABSENT
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        if self.slot[x] == ABSENT {
            self.slot[x] = self.members.len() as u32;
            self.members.push(x);
        }
    }

    #[inline]
    pub fn remove(&mut self, x: usize) {
        let s = self.slot[x];
        if s != ABSENT {
            let last = self.members.pop().expect("nonempty");
            if last != x {
                self.members[s as usize] = last;
                self.slot[last] = s;
            }
            self.slot[x] = ABSENT;
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member at insertion slot `i` (the order used for uniform sampling).
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.members[i]
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }
}

/// A single firing of an active site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub site: usize,
    pub time: f64,
}

/// Simulation state: configuration, active set, clock and counters.
#[derive(Debug, Clone)]
pub struct SimState {
    config: Configuration,
    active: ActiveSet,
    pairs: PairCounts,
    time: f64,
    event_count: u64,
    right_exit: bool,
    exited: u64,
    tagged_bond: Option<usize>,
    crossings: u64,
}

impl SimState {
    pub fn new(config: Configuration) -> Self {
        let mut state = SimState {
            active: ActiveSet::with_capacity(config.len()),
            pairs: config.pair_counts(),
            config,
            time: 0.0,
            event_count: 0,
            right_exit: false,
            exited: 0,
            tagged_bond: None,
            crossings: 0,
        };
        state.rebuild_active();
        state
    }

    /// Lets particles leave through the right end of a segment.
    pub fn with_right_exit(mut self) -> Self {
        if self.config.topology().kind() == TopologyKind::Segment {
            self.right_exit = true;
            self.rebuild_active();
        }
        self
    }

    /// Counts jumps across the bond `(i, i + 1)`.
    pub fn with_tagged_bond(mut self, i: usize) -> Self {
        self.tagged_bond = Some(i);
        self
    }

    fn rebuild_active(&mut self) {
        self.active = ActiveSet::with_capacity(self.config.len());
        for x in 0..self.config.len() {
            if self.site_is_active(x) {
                self.active.insert(x);
            }
        }
    }

    #[inline]
    fn site_is_active(&self, x: usize) -> bool {
        let c = &self.config;
        let last = c.len() - 1;
        if self.right_exit && x == last {
            return x >= 1 && c.get(x) == 1 && c.get(x - 1) == 1;
        }
        c.is_active_at(x)
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn into_config(self) -> Configuration {
        self.config
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn event_count(&self) -> u64 {
        self.event_count
    }

    pub fn pair_counts(&self) -> PairCounts {
        self.pairs
    }

    pub fn n_active(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self) -> &ActiveSet {
        &self.active
    }

    pub fn is_absorbed(&self) -> bool {
        self.active.is_empty()
    }

    /// Particles that left through the right end.
    pub fn exited(&self) -> u64 {
        self.exited
    }

    /// Jumps across the tagged bond so far.
    pub fn crossings(&self) -> u64 {
        self.crossings
    }

    /// Incremental active set and pair counts agree with a recomputation.
    pub fn check_coherence(&self) -> bool {
        let scratch: Vec<usize> = (0..self.config.len())
            .filter(|&x| self.site_is_active(x))
            .collect();
        scratch == self.active.sorted() && self.pairs == self.config.pair_counts()
    }

    fn pair_starts(&self, x: usize) -> [Option<usize>; 3] {
        let c = &self.config;
        let starts = [x as isize - 1, x as isize, x as isize + 1];
        starts.map(|s| {
            let i = c.wrap(s)?;
            // a pair needs its right member inside the window
            c.wrap(s + 1).map(|_| i)
        })
    }

    fn tally_pairs(&mut self, starts: &[Option<usize>; 3], sign: i64) {
        let c = &self.config;
        for &i in starts.iter().flatten() {
            let j = c.wrap(i as isize + 1).expect("checked");
            let slot = match (c.get(i), c.get(j)) {
                (1, 1) => &mut self.pairs.n11,
                (1, 0) => &mut self.pairs.n10,
                (0, 1) => &mut self.pairs.n01,
                _ => &mut self.pairs.n00,
            };
            *slot = (*slot as i64 + sign) as usize;
        }
    }

    /// Fires the active site `x`: `η(x)` becomes 0 and `η(x+1)` becomes 1.
    /// Only sites `x-2..=x+2` are re-examined.
    pub fn apply_jump(&mut self, x: usize) -> Result<(), DynamicsError> {
        if x >= self.config.len() || !self.active.contains(x) {
            return Err(DynamicsError::NotActive(x));
        }
        let starts = self.pair_starts(x);
        self.tally_pairs(&starts, -1);
        self.config.set(x, 0);
        match self.config.wrap(x as isize + 1) {
            Some(y) => self.config.set(y, 1),
            None => self.exited += 1,
        }
        self.tally_pairs(&starts, 1);

        for d in -2isize..=2 {
            if let Some(y) = self.config.wrap(x as isize + d) {
                if self.site_is_active(y) {
                    self.active.insert(y);
                } else {
                    self.active.remove(y);
                }
            }
        }
        if self.tagged_bond == Some(x) {
            self.crossings += 1;
        }
        self.event_count += 1;
        Ok(())
    }

    /// One exact Gillespie step: holding time first, then the firing site.
    pub fn step(&mut self, rng: &mut RngStream) -> Result<Event, DynamicsError> {
        let n = self.active.len();
        if n == 0 {
            return Err(DynamicsError::Absorbed);
        }
        let dt = rng.exponential(n as f64);
        let site = self.active.at(rng.index(n));
        self.time += dt;
        self.apply_jump(site)?;
        Ok(Event {
            site,
            time: self.time,
        })
    }

    /// Like [`SimState::step`] but does not fire if the event would land after
    /// `t_max`; the clock is then advanced to `t_max`.
    pub fn step_until(&mut self, rng: &mut RngStream, t_max: f64) -> Option<Event> {
        let n = self.active.len();
        if n == 0 {
            return None;
        }
        let dt = rng.exponential(n as f64);
        if self.time + dt > t_max {
            self.time = t_max;
            return None;
        }
        let site = self.active.at(rng.index(n));
        self.time += dt;
        self.apply_jump(site).expect("sampled from the active set");
        Some(Event {
            site,
            time: self.time,
        })
    }

    pub fn summary(&self) -> Sample {
        Sample {
            time: self.time,
            pairs: self.pairs,
            n_active: self.active.len(),
            crossings: self.crossings,
        }
    }
}

/// When [`run_until`] stops. Absorption always stops a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StopCondition {
    pub t_max: Option<f64>,
    pub max_events: Option<u64>,
}

impl StopCondition {
    pub fn absorption() -> Self {
        StopCondition::default()
    }

    pub fn time(t_max: f64) -> Self {
        StopCondition {
            t_max: Some(t_max),
            max_events: None,
        }
    }

    pub fn events(max_events: u64) -> Self {
        StopCondition {
            t_max: None,
            max_events: Some(max_events),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub enum SamplingPlan {
    #[default]
    Endpoints,
    /// Every `n`-th event.
    EveryEvents(u64),
    /// Fixed increasing times; the state in force at each time is recorded.
    Times(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub time: f64,
    pub pairs: PairCounts,
    pub n_active: usize,
    pub crossings: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
    pub snapshots: Vec<(f64, String)>,
    pub absorbed_at: Option<f64>,
    pub final_config: Configuration,
    pub events: u64,
}

impl TrajectoryRecord {
    pub const CSV_HEADER: &'static str = "time,n11,n10,n01,n00,n_active,N_t";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.time, s.pairs.n11, s.pairs.n10, s.pairs.n01, s.pairs.n00, s.n_active, s.crossings
            )
            .expect("write to string");
        }
        out
    }

    pub fn snapshots_text(&self) -> String {
        let mut out = String::new();
        for (t, c) in &self.snapshots {
            writeln!(out, "{t} {c}").expect("write to string");
        }
        out
    }
}

/// Runs `state` until the stop condition or absorption, sampling per `plan`.
pub fn run_until(
    state: &mut SimState,
    stop: StopCondition,
    rng: &mut RngStream,
    plan: &SamplingPlan,
    snapshots: bool,
) -> TrajectoryRecord {
    run_observed(state, stop, rng, plan, snapshots, |_, _| {})
}

/// [`run_until`] with a callback after every event.
pub fn run_observed<F>(
    state: &mut SimState,
    stop: StopCondition,
    rng: &mut RngStream,
    plan: &SamplingPlan,
    snapshots: bool,
    mut observe: F,
) -> TrajectoryRecord
where
    F: FnMut(&SimState, Event),
{
    let mut record = TrajectoryRecord {
        samples: Vec::new(),
        snapshots: Vec::new(),
        absorbed_at: None,
        final_config: state.config.clone(),
        events: 0,
    };
    let take = |state: &SimState, record: &mut TrajectoryRecord, time: f64| {
        let mut s = state.summary();
        s.time = time;
        record.samples.push(s);
        if snapshots {
            record.snapshots.push((time, state.config.to_string()));
        }
    };

    let start_events = state.event_count;
    let t_max = stop.t_max.unwrap_or(f64::INFINITY);
    let (times, stride): (&[f64], u64) = match plan {
        SamplingPlan::Times(ts) => (ts, 0),
        SamplingPlan::EveryEvents(n) => (&[], (*n).max(1)),
        SamplingPlan::Endpoints => (&[], 0),
    };
    let mut next = times.partition_point(|&t| t < state.time);
    if times.is_empty() {
        take(state, &mut record, state.time);
    }

    loop {
        if stop
            .max_events
            .is_some_and(|m| state.event_count - start_events >= m)
        {
            break;
        }
        let n = state.active.len();
        if n == 0 {
            break;
        }
        let t_next = state.time + rng.exponential(n as f64);
        // grid times passed while the current state is in force
        while next < times.len() && times[next] < t_next && times[next] <= t_max {
            take(state, &mut record, times[next]);
            next += 1;
        }
        if t_next > t_max {
            state.time = t_max;
            break;
        }
        let site = state.active.at(rng.index(n));
        state.time = t_next;
        state.apply_jump(site).expect("sampled from the active set");
        observe(state, Event { site, time: t_next });
        if stride > 0 && (state.event_count - start_events).is_multiple_of(stride) {
            take(state, &mut record, state.time);
        }
    }

    if state.is_absorbed() {
        record.absorbed_at = Some(state.time);
        while next < times.len() && times[next] <= t_max {
            take(state, &mut record, times[next]);
            next += 1;
        }
    }
    if times.is_empty() && record.samples.last().map(|s| s.time) != Some(state.time) {
        take(state, &mut record, state.time);
    }
    record.final_config = state.config.clone();
    record.events = state.event_count - start_events;
    record
}
