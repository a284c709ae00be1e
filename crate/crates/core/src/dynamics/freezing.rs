//! Freezing of the origin on a window of the line, and height growth.
//!
//! A record of the height profile stays empty and no particle ever passes it,
//! so everything right of a record evolves on its own. The freezing protocol
//! places a wall at the rightmost record left of the origin and simulates the
//! window to its right.
//!
//! To compare windows of different sizes the protocol couples them: each
//! site's initial occupancy and each site's firing clock come from keyed
//! per-site streams. An active site stays active until it fires (its left
//! neighbour cannot leave and its right neighbour cannot fill), so every
//! activation is followed by exactly one `Exp(1)` firing delay drawn from the
//! site's own stream. Two windows that see the same local history at a site
//! therefore produce bit-identical event times there.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use super::{run_until, SamplingPlan, SimState, StopCondition};
use crate::lattice::{Configuration, Topology};
use crate::mappings::{height_from_config, HeightProfile};
use crate::rng::{zigzag, RngStream, LANE_CLOCK, LANE_INITIAL};

/// Sites `x` with `h(x) >= h(y)` for every `y < x` in the window.
pub fn record_sites(profile: &HeightProfile) -> Vec<i64> {
    let mut best = i64::MIN;
    let mut out = Vec::new();
    for (j, &h) in profile.heights().iter().enumerate() {
        if h >= best {
            out.push(profile.start() + j as i64);
            best = h;
        }
    }
    out
}

/// Per-site firing clocks of one trial.
#[derive(Debug, Clone, Copy)]
pub struct SiteClocks {
    pub root_seed: u64,
    pub stream_id: u64,
}

impl SiteClocks {
    pub fn stream(&self, x: i64) -> RngStream {
        RngStream::substream(self.root_seed, self.stream_id, LANE_CLOCK, zigzag(x))
    }
}

/// The window `[-half_width, half_width]` sampled from the product measure
/// with density `rho`, one keyed stream per site, so nested windows agree.
pub fn window_from_streams(
    rho: f64,
    root_seed: u64,
    stream_id: u64,
    half_width: usize,
) -> Configuration {
    let m = half_width as i64;
    let topology = Topology::segment(2 * half_width + 1).expect("nonempty");
    let mut config = Configuration::empty(topology).with_origin(-m);
    for (i, x) in (-m..=m).enumerate() {
        let mut s = RngStream::substream(root_seed, stream_id, LANE_INITIAL, zigzag(x));
        if s.bernoulli(rho) {
            config.set(i, 1);
        }
    }
    config
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreezeParams {
    pub initial_half_width: usize,
    pub max_half_width: usize,
    pub horizon: f64,
    /// Records are looked for in `[-zone * half_width, 0]`; the rest of the
    /// left half is history that certifies them.
    pub record_zone: f64,
}

impl Default for FreezeParams {
    fn default() -> Self {
        FreezeParams {
            initial_half_width: 256,
            max_half_width: 8192,
            horizon: 2000.0,
            record_zone: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FreezeVerdict {
    /// Last time the origin changed; the origin never changes again.
    Frozen {
        at: f64,
    },
    ActiveAtHorizon,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreezeError {
    #[error("no record left of the origin in the window; enlarge the window")]
    NoRecord,
    #[error("freezing needs a segment window containing the origin")]
    BadWindow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    time: f64,
    site: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.site.cmp(&other.site))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Event-queue engine with per-site clocks on a walled segment whose right
/// end lets particles out.
struct ClockEngine<'a> {
    config: Configuration,
    clocks: &'a SiteClocks,
    streams: Vec<Option<RngStream>>,
    queue: BinaryHeap<Reverse<Pending>>,
    origin: usize,
    last_origin_change: f64,
}

impl<'a> ClockEngine<'a> {
    fn new(config: Configuration, clocks: &'a SiteClocks, origin: usize) -> Self {
        let len = config.len();
        let mut engine = ClockEngine {
            config,
            clocks,
            streams: vec![None; len],
            queue: BinaryHeap::new(),
            origin,
            last_origin_change: 0.0,
        };
        for i in 0..len {
            if engine.is_active(i) {
                engine.schedule(i, 0.0);
            }
        }
        engine
    }

    fn is_active(&self, i: usize) -> bool {
        let c = &self.config;
        i >= 1 && c.get(i - 1) == 1 && c.get(i) == 1 && (i + 1 == c.len() || c.get(i + 1) == 0)
    }

    fn schedule(&mut self, i: usize, now: f64) {
        let coordinate = self.config.coordinate(i);
        let clocks = self.clocks;
        let stream = self.streams[i].get_or_insert_with(|| clocks.stream(coordinate));
        let time = now + stream.exponential(1.0);
        self.queue.push(Reverse(Pending { time, site: i }));
    }

    fn run(&mut self, horizon: f64) {
        while let Some(&Reverse(next)) = self.queue.peek() {
            if next.time > horizon {
                break;
            }
            self.queue.pop();
            let i = next.site;
            debug_assert!(self.is_active(i));
            self.config.set(i, 0);
            if i + 1 < self.config.len() {
                self.config.set(i + 1, 1);
            }
            if i == self.origin || i + 1 == self.origin {
                self.last_origin_change = next.time;
            }
            for j in [i.wrapping_sub(1), i + 2] {
                if j < self.config.len() && self.is_active(j) {
                    self.schedule(j, next.time);
                }
            }
        }
    }

    /// The origin can never change again once there is a hole at some
    /// `b >= origin` and no active site between the wall and `b`: nothing can
    /// enter `b`, so the stretch left of it is closed.
    fn origin_certified(&self) -> bool {
        let c = &self.config;
        let Some(b) = (self.origin..c.len()).find(|&b| c.get(b) == 0) else {
            return false;
        };
        !(1..b).any(|i| self.is_active(i))
    }
}

/// Freezing verdict for the origin on one window.
///
/// Finds the rightmost record in the record zone, puts a wall there and runs
/// the per-site clock dynamics up to the horizon.
pub fn freezing_time_origin(
    initial: &Configuration,
    clocks: &SiteClocks,
    params: &FreezeParams,
) -> Result<FreezeVerdict, FreezeError> {
    if initial.is_ring() {
        return Err(FreezeError::BadWindow);
    }
    let origin = initial.index_of(0).ok_or(FreezeError::BadWindow)?;
    let profile = height_from_config(initial, 0).map_err(|_| FreezeError::BadWindow)?;
    let zone = (params.record_zone * origin as f64).floor() as i64;
    let wall = record_sites(&profile)
        .into_iter()
        .filter(|&x| x >= -zone && x <= 0 && x >= initial.origin_offset())
        .max()
        .ok_or(FreezeError::NoRecord)?;
    let wall_index = initial.index_of(wall).expect("record inside window");
    debug_assert_eq!(initial.get(wall_index), 0);

    let bits = initial.occupancy()[wall_index..].to_vec();
    let sub = Configuration::from_bits(Topology::segment(bits.len()).expect("nonempty"), &bits)
        .expect("valid bits")
        .with_origin(wall);
    let mut engine = ClockEngine::new(sub, clocks, origin - wall_index);
    engine.run(params.horizon);
    Ok(if engine.origin_certified() {
        FreezeVerdict::Frozen {
            at: engine.last_origin_change,
        }
    } else {
        FreezeVerdict::ActiveAtHorizon
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inconclusive {
    NoRecord,
    Disagreement,
}

/// Outcome of the window-doubling protocol for one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreezingOutcome {
    /// Agreed verdict of two successive windows, if any.
    pub verdict: Option<FreezeVerdict>,
    pub inconclusive: Option<Inconclusive>,
    /// Half width of the larger of the two agreeing windows (or the last tried).
    pub half_width: usize,
}

impl FreezingOutcome {
    pub fn is_frozen(&self) -> bool {
        matches!(self.verdict, Some(FreezeVerdict::Frozen { .. }))
    }

    pub fn is_conclusive(&self) -> bool {
        self.verdict.is_some()
    }
}

/// Runs [`freezing_time_origin`] on windows of doubling half width until two
/// successive windows give the same verdict and freezing time.
pub fn freezing_protocol(
    rho: f64,
    root_seed: u64,
    stream_id: u64,
    params: &FreezeParams,
) -> FreezingOutcome {
    let clocks = SiteClocks {
        root_seed,
        stream_id,
    };
    let mut half_width = params.initial_half_width.max(1);
    let mut previous: Option<FreezeVerdict> = None;
    let mut reason;
    loop {
        let window = window_from_streams(rho, root_seed, stream_id, half_width);
        match freezing_time_origin(&window, &clocks, params) {
            Ok(verdict) => {
                if previous == Some(verdict) {
                    return FreezingOutcome {
                        verdict: Some(verdict),
                        inconclusive: None,
                        half_width,
                    };
                }
                previous = Some(verdict);
                reason = Inconclusive::Disagreement;
            }
            Err(_) => {
                previous = None;
                reason = Inconclusive::NoRecord;
            }
        }
        if half_width * 2 > params.max_half_width {
            return FreezingOutcome {
                verdict: None,
                inconclusive: Some(reason),
                half_width,
            };
        }
        half_width *= 2;
    }
}

/// `h(t, 0) = 2 N_t` at each checkpoint, simulated with the exact Gillespie
/// engine on the window (left side walled, right end open).
pub fn height_growth_probe(
    initial: &Configuration,
    rng: &mut RngStream,
    checkpoints: &[f64],
) -> Vec<i64> {
    let origin = initial.index_of(0).expect("window contains the origin");
    let mut state = SimState::new(initial.clone())
        .with_right_exit()
        .with_tagged_bond(origin);
    let t_max = checkpoints.last().copied().unwrap_or(0.0);
    let record = run_until(
        &mut state,
        StopCondition::time(t_max),
        rng,
        &SamplingPlan::Times(checkpoints.to_vec()),
        false,
    );
    record
        .samples
        .iter()
        .map(|s| 2 * s.crossings as i64)
        .collect()
}
