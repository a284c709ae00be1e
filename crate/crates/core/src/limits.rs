//! Limiting measures below and at the critical density.
//!
//! Below density one half the dynamics freezes and the frozen law is computed
//! by an induction on the first two letters of a word: a leading `00` has a
//! closed form through the probability that the walk with steps `2η - 1`
//! never climbs to level two, a leading `10` reduces by subtraction, and a
//! leading `01` drops its first letter. At density one half, finite rings end
//! in one of the two alternating configurations; the Monte Carlo helpers here
//! produce the statistics compared against both statements.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{run_observed, SamplingPlan, SimState, StopCondition};
use crate::lattice::{Configuration, Parity, Pattern};
use crate::mappings::{zero_range_from_config, zero_range_move_correspondence};
use crate::measures::{sector_sample, MeasureError};
use crate::rng::RngStream;

pub const MAX_TABLE_LEN: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("density {0} outside (0, 1/2)")]
    RhoOutOfRange(f64),
    #[error("empty pattern")]
    EmptyPattern,
    #[error("table length {0} outside 1..={MAX_TABLE_LEN}")]
    TableTooLong(usize),
    #[error("critical rings need an even length, got {0}")]
    OddLength(usize),
    #[error("density {rho} gives no particle on a ring of {len} sites")]
    EmptySector { rho: f64, len: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn check_rho(rho: f64) -> Result<(), LimitError> {
    if rho > 0.0 && rho < 0.5 {
        Ok(())
    } else {
        Err(LimitError::RhoOutOfRange(rho))
    }
}

/// Probability that the walk with up-steps of probability `rho` stays at or
/// below level one forever, `(1 - 2 rho) / (1 - rho)^2`.
pub fn ballot_prob(rho: f64) -> Result<f64, LimitError> {
    check_rho(rho)?;
    Ok((1.0 - 2.0 * rho) / ((1.0 - rho) * (1.0 - rho)))
}

fn site_prob(rho: f64, b: u8) -> f64 {
    if b == 1 {
        rho
    } else {
        1.0 - rho
    }
}

fn has_double_one(word: &[u8]) -> bool {
    word.windows(2).any(|w| w == [1, 1])
}

/// Value of the induction on a word without `11`, reading earlier values
/// through `lookup`.
fn recurse(rho: f64, word: &[u8], lookup: &mut dyn FnMut(&[u8]) -> f64) -> f64 {
    match word {
        [b] => site_prob(rho, *b),
        [0, 0, rest @ ..] => {
            (1.0 - 2.0 * rho) * rest.iter().map(|&b| site_prob(rho, b)).product::<f64>()
        }
        [1, 0, rest @ ..] => {
            let mut zz = vec![0, 0];
            zz.extend_from_slice(rest);
            lookup(&word[1..]) - lookup(&zz)
        }
        [0, 1, ..] => lookup(&word[1..]),
        _ => unreachable!("words with 11 are handled by the caller"),
    }
}

/// Frozen-law probability of `pattern` at density `rho`.
pub fn limit_prob(rho: f64, pattern: &Pattern) -> Result<f64, LimitError> {
    check_rho(rho)?;
    let mut memo = HashMap::new();
    Ok(memo_prob(rho, pattern.as_slice(), &mut memo))
}

fn memo_prob(rho: f64, word: &[u8], memo: &mut HashMap<Vec<u8>, f64>) -> f64 {
    if has_double_one(word) {
        return 0.0;
    }
    if let Some(&p) = memo.get(word) {
        return p;
    }
    let p = recurse(rho, word, &mut |w| memo_prob(rho, w, memo));
    memo.insert(word.to_vec(), p);
    p
}

/// Frozen-law probabilities of every word up to a length.
///
/// Only words without `11` are stored; every other word has probability zero.
#[derive(Debug, Clone)]
pub struct LimitMeasureTable {
    rho: f64,
    n_max: usize,
    memo: HashMap<Vec<u8>, f64>,
}

impl LimitMeasureTable {
    pub fn new(rho: f64, n_max: usize) -> Result<Self, LimitError> {
        check_rho(rho)?;
        if n_max == 0 || n_max > MAX_TABLE_LEN {
            return Err(LimitError::TableTooLong(n_max));
        }
        let mut memo = HashMap::new();
        for len in 1..=n_max {
            for p in Pattern::all(len) {
                memo_prob(rho, p.as_slice(), &mut memo);
            }
        }
        Ok(LimitMeasureTable { rho, n_max, memo })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, word: &[u8]) -> f64 {
        if has_double_one(word) {
            return 0.0;
        }
        self.memo.get(word).copied().unwrap_or(0.0)
    }

    pub fn prob(&self, pattern: &Pattern) -> f64 {
        self.get(pattern.as_slice())
    }

    /// Overwrites one entry; used to check that faults are detected.
    pub fn insert(&mut self, pattern: &Pattern, value: f64) {
        self.memo.insert(pattern.as_slice().to_vec(), value);
    }

    /// `pattern,probability` rows for every word up to `n_max`, by length
    /// then index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,probability\n");
        for len in 1..=self.n_max {
            for p in Pattern::all(len) {
                let _ = writeln!(out, "{p},{:.17e}", self.prob(&p));
            }
        }
        out
    }
}

/// Largest violations of one-letter additivity in a table.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub rho: f64,
    pub n_max: usize,
    /// `max |P(w) - P(w0) - P(w1)|` over `|w| < n_max`.
    pub max_right_violation: f64,
    pub worst_right: String,
    /// `max |P(w) - P(0w) - P(1w)|` over `|w| < n_max`.
    pub max_left_violation: f64,
    pub worst_left: String,
    pub min_entry: f64,
    pub max_entry: f64,
    /// `|1 - P(0) - P(1)|`.
    pub normalization_error: f64,
    /// Stored words containing `11` with a nonzero value.
    pub nonzero_double_ones: usize,
}

impl ConsistencyReport {
    pub fn max_violation(&self) -> f64 {
        self.max_right_violation
            .max(self.max_left_violation)
            .max(self.normalization_error)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
            && self.min_entry >= 0.0
            && self.max_entry <= 1.0
            && self.nonzero_double_ones == 0
    }
}

/// Checks right and left Kolmogorov consistency of every word shorter than
/// the table length, and the range of every entry.
pub fn consistency_check(table: &LimitMeasureTable) -> ConsistencyReport {
    let mut report = ConsistencyReport {
        rho: table.rho,
        n_max: table.n_max,
        max_right_violation: 0.0,
        worst_right: String::new(),
        max_left_violation: 0.0,
        worst_left: String::new(),
        min_entry: f64::INFINITY,
        max_entry: f64::NEG_INFINITY,
        normalization_error: (1.0 - table.get(&[0]) - table.get(&[1])).abs(),
        nonzero_double_ones: table
            .memo
            .iter()
            .filter(|(w, &p)| has_double_one(w) && p != 0.0)
            .count(),
    };
    for len in 1..=table.n_max {
        for p in Pattern::all(len) {
            let w = p.as_slice();
            let v = table.get(w);
            report.min_entry = report.min_entry.min(v);
            report.max_entry = report.max_entry.max(v);
            if len == table.n_max {
                continue;
            }
            let right = (v - table.get(&[w, &[0]].concat()) - table.get(&[w, &[1]].concat())).abs();
            if right > report.max_right_violation {
                report.max_right_violation = right;
                report.worst_right = p.to_string();
            }
            let left = (v - table.get(&[&[0], w].concat()) - table.get(&[&[1], w].concat())).abs();
            if left > report.max_left_violation {
                report.max_left_violation = left;
                report.worst_left = p.to_string();
            }
        }
    }
    report
}

/// One half-filled ring run to absorption.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalTrial {
    /// Parity of the alternating state reached, `None` if the final state
    /// is not alternating.
    pub parity: Option<Parity>,
    pub absorbed: bool,
    pub absorption_time: f64,
    pub events: u64,
    /// Events at which `n00` increased.
    pub n00_increases: u64,
    /// Events after which `n11 != n00`.
    pub balance_breaks: u64,
    /// `(f11, f10, f01, f00)` on the sampling grid.
    pub pair_fractions: Vec<[f64; 4]>,
}

/// Runs a half-filled ring of `len` sites from the uniform sector law to
/// absorption, checking the pair-count identities at every event.
pub fn critical_trial(
    len: usize,
    rng: &mut RngStream,
    grid: &[f64],
) -> Result<CriticalTrial, LimitError> {
    if !len.is_multiple_of(2) || len < 4 {
        return Err(LimitError::OddLength(len));
    }
    let initial = sector_sample(len, len / 2, rng)?;
    let mut state = SimState::new(initial);
    let mut last_n00 = state.pair_counts().n00;
    let mut n00_increases = 0;
    let mut balance_breaks = 0;
    let plan = SamplingPlan::Times(grid.to_vec());
    let record = run_observed(
        &mut state,
        StopCondition::absorption(),
        rng,
        &plan,
        false,
        |s, _| {
            let pc = s.pair_counts();
            if pc.n00 > last_n00 {
                n00_increases += 1;
            }
            if pc.n11 != pc.n00 {
                balance_breaks += 1;
            }
            last_n00 = pc.n00;
        },
    );
    let l = len as f64;
    Ok(CriticalTrial {
        parity: record.final_config.alternating_parity(),
        absorbed: record.absorbed_at.is_some(),
        absorption_time: record.absorbed_at.unwrap_or(f64::NAN),
        events: record.events,
        n00_increases,
        balance_breaks,
        pair_fractions: record
            .samples
            .iter()
            .map(|s| {
                let p = s.pairs;
                [
                    p.n11 as f64 / l,
                    p.n10 as f64 / l,
                    p.n01 as f64 / l,
                    p.n00 as f64 / l,
                ]
            })
            .collect(),
    })
}

/// Aggregate of [`critical_trial`] results.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalStats {
    #[serde(rename = "L")]
    pub len: usize,
    pub trials: usize,
    pub even: usize,
    pub odd: usize,
    pub not_alternating: usize,
    pub unabsorbed: usize,
    pub mean_absorption_time: f64,
    pub max_absorption_time: f64,
    pub mean_events: f64,
    pub n00_increases: u64,
    pub balance_breaks: u64,
    /// Trials whose `f11` series increased somewhere on the grid.
    pub f11_increasing_trials: usize,
    pub grid: Vec<f64>,
    /// Mean `(f11, f10, f01, f00)` over trials on the grid.
    #[serde(skip)]
    pub pair_decay: Vec<[f64; 4]>,
}

impl CriticalStats {
    pub fn from_trials(len: usize, grid: &[f64], trials: &[CriticalTrial]) -> Self {
        let n = trials.len();
        let count = |p: Option<Parity>| {
            trials
                .iter()
                .filter(|t| t.absorbed && t.parity == p)
                .count()
        };
        let times: Vec<f64> = trials
            .iter()
            .filter(|t| t.absorbed)
            .map(|t| t.absorption_time)
            .collect();
        let mut decay = vec![[0.0; 4]; grid.len()];
        for t in trials {
            for (acc, f) in decay.iter_mut().zip(&t.pair_fractions) {
                for j in 0..4 {
                    acc[j] += f[j] / n as f64;
                }
            }
        }
        CriticalStats {
            len,
            trials: n,
            even: count(Some(Parity::Even)),
            odd: count(Some(Parity::Odd)),
            not_alternating: count(None),
            unabsorbed: trials.iter().filter(|t| !t.absorbed).count(),
            mean_absorption_time: times.iter().sum::<f64>() / times.len().max(1) as f64,
            max_absorption_time: times.iter().copied().fold(0.0, f64::max),
            mean_events: trials.iter().map(|t| t.events as f64).sum::<f64>() / n.max(1) as f64,
            n00_increases: trials.iter().map(|t| t.n00_increases).sum(),
            balance_breaks: trials.iter().map(|t| t.balance_breaks).sum(),
            f11_increasing_trials: trials
                .iter()
                .filter(|t| t.pair_fractions.windows(2).any(|w| w[1][0] > w[0][0]))
                .count(),
            grid: grid.to_vec(),
            pair_decay: decay,
        }
    }

    /// `t,f11,f10,f01,f00` rows of the mean pair-fraction series.
    pub fn pair_decay_csv(&self) -> String {
        let mut out = String::from("t,f11,f10,f01,f00\n");
        for (t, f) in self.grid.iter().zip(&self.pair_decay) {
            let _ = writeln!(
                out,
                "{t},{:.17e},{:.17e},{:.17e},{:.17e}",
                f[0], f[1], f[2], f[3]
            );
        }
        out
    }
}

/// Sequential [`critical_trial`] over streams `0..trials` of `root_seed`.
pub fn critical_absorption_stats(
    len: usize,
    trials: usize,
    root_seed: u64,
    grid: &[f64],
) -> Result<CriticalStats, LimitError> {
    let runs = (0..trials as u64)
        .map(|i| critical_trial(len, &mut RngStream::new(root_seed, i), grid))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CriticalStats::from_trials(len, grid, &runs))
}

/// Zero-range view of one half-filled ring run to absorption.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroRangeTrial {
    pub labels: usize,
    pub events: u64,
    /// Events after which the tracked state differs from a fresh mapping.
    pub mapping_mismatches: u64,
    /// Events at which some label with at least one particle lost it.
    pub label_emptied: u64,
    /// Events at which the number of labels holding exactly one particle fell.
    pub ones_decreases: u64,
    /// Events at which `1 - 2 #(ξ = 0) / labels` fell.
    pub lower_bound_decreases: u64,
    pub initial_fraction_one: f64,
    pub final_fraction_one: f64,
    /// Total particles over labels, at every event.
    pub mean_occupation_min: f64,
    pub mean_occupation_max: f64,
}

/// Tracks the zero-range process of a half-filled ring event by event,
/// labelled from a hole of the initial state.
pub fn zero_range_trial(len: usize, rng: &mut RngStream) -> Result<ZeroRangeTrial, LimitError> {
    if !len.is_multiple_of(2) || len < 4 {
        return Err(LimitError::OddLength(len));
    }
    let initial = sector_sample(len, len / 2, rng)?;
    let tag = (0..len)
        .find(|&i| initial.get(i) == 0)
        .expect("half filled");
    let mut zr = zero_range_from_config(&initial, tag).expect("tag is a hole");
    let labels = zr.labels();
    let initial_fraction_one = zr.count_with(1) as f64 / labels as f64;
    let mut trial = ZeroRangeTrial {
        labels,
        events: 0,
        mapping_mismatches: 0,
        label_emptied: 0,
        ones_decreases: 0,
        lower_bound_decreases: 0,
        initial_fraction_one,
        final_fraction_one: initial_fraction_one,
        mean_occupation_min: f64::INFINITY,
        mean_occupation_max: f64::NEG_INFINITY,
    };
    let mut state = SimState::new(initial);
    while !state.is_absorbed() {
        let before: Vec<usize> = zr.gaps().to_vec();
        let ones = zr.count_with(1);
        let zeros = zr.count_with(0);
        // pick the event first so the move is read off the pre-jump state
        let pre = state.config().clone();
        let event = state.step(rng).expect("not absorbed");
        let mv = zero_range_move_correspondence(&pre, zr.tagged_hole(), event.site)
            .expect("active site");
        zr.apply_move(mv.from_label)
            .expect("at least two particles");
        trial.events += 1;
        if zero_range_from_config(state.config(), zr.tagged_hole()).as_ref() != Ok(&zr) {
            trial.mapping_mismatches += 1;
        }
        if before
            .iter()
            .zip(zr.gaps())
            .any(|(&b, &a)| b >= 1 && a == 0)
        {
            trial.label_emptied += 1;
        }
        if zr.count_with(1) < ones {
            trial.ones_decreases += 1;
        }
        if zr.count_with(0) > zeros {
            trial.lower_bound_decreases += 1;
        }
        let mean = zr.total_particles() as f64 / labels as f64;
        trial.mean_occupation_min = trial.mean_occupation_min.min(mean);
        trial.mean_occupation_max = trial.mean_occupation_max.max(mean);
    }
    trial.final_fraction_one = zr.count_with(1) as f64 / labels as f64;
    Ok(trial)
}

/// Spread below which a per-ring frequency is treated as constant.
const DETERMINISTIC_TOL: f64 = 1e-12;

/// Pattern frequencies of absorbed subcritical rings against the frozen law.
#[derive(Debug, Clone, Serialize)]
pub struct PatternComparison {
    pub pattern: String,
    pub expected: f64,
    /// Mean over trials of the per-ring frequency.
    pub observed: f64,
    /// Standard error of the mean from the between-trial spread.
    pub std_error: f64,
    /// Wilson 95% interval of the pooled count over all ring positions.
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub z: f64,
}

impl PatternComparison {
    /// Within `k` standard errors. A frequency fixed by the particle number
    /// has no spread and must match to rounding.
    pub fn within(&self, k: f64) -> bool {
        if self.std_error == 0.0 {
            (self.observed - self.expected).abs() <= DETERMINISTIC_TOL
        } else {
            self.z.abs() <= k
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubcriticalReport {
    pub rho: f64,
    #[serde(rename = "L")]
    pub len: usize,
    pub k: usize,
    pub trials: usize,
    pub unabsorbed: usize,
    pub finite_size_caveat: &'static str,
    pub patterns: Vec<PatternComparison>,
}

impl SubcriticalReport {
    pub fn max_abs_z(&self) -> f64 {
        self.patterns
            .iter()
            .filter(|p| p.std_error > 0.0)
            .map(|p| p.z.abs())
            .fold(0.0, f64::max)
    }

    pub fn all_within(&self, k: f64) -> bool {
        self.unabsorbed == 0 && self.patterns.iter().all(|p| p.within(k))
    }
}

/// Per-ring pattern counts at absorption, for every word up to
/// `n_pattern_max` in length then index order.
#[derive(Debug, Clone, Serialize)]
pub struct SubcriticalTrial {
    pub absorbed: bool,
    pub counts: Vec<usize>,
}

/// Runs one ring with `round(rho * len)` particles from the uniform sector
/// law to absorption and counts every short word in the final state.
pub fn subcritical_trial(
    rho: f64,
    len: usize,
    n_pattern_max: usize,
    rng: &mut RngStream,
) -> Result<SubcriticalTrial, LimitError> {
    check_rho(rho)?;
    let k = (rho * len as f64).round() as usize;
    if k == 0 {
        return Err(LimitError::EmptySector { rho, len });
    }
    let mut state = SimState::new(sector_sample(len, k, rng)?);
    while state.step(rng).is_ok() {}
    let config: &Configuration = state.config();
    let counts = (1..=n_pattern_max)
        .flat_map(Pattern::all)
        .map(|p| config.count_pattern(&p).expect("ring"))
        .collect();
    Ok(SubcriticalTrial {
        absorbed: state.is_absorbed(),
        counts,
    })
}

/// Compares the pooled per-ring frequencies with [`limit_prob`].
pub fn subcritical_report(
    rho: f64,
    len: usize,
    n_pattern_max: usize,
    trials: &[SubcriticalTrial],
) -> Result<SubcriticalReport, LimitError> {
    let table = LimitMeasureTable::new(rho, n_pattern_max)?;
    let n = trials.len() as f64;
    let l = len as f64;
    let patterns = (1..=n_pattern_max)
        .flat_map(Pattern::all)
        .enumerate()
        .map(|(j, p)| {
            let freqs: Vec<f64> = trials.iter().map(|t| t.counts[j] as f64 / l).collect();
            let mean = freqs.iter().sum::<f64>() / n;
            let var = freqs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            let se = match (var / n).sqrt() {
                se if se < DETERMINISTIC_TOL => 0.0,
                se => se,
            };
            let expected = table.prob(&p);
            let pooled: usize = trials.iter().map(|t| t.counts[j]).sum();
            let (lo, hi) = wilson(pooled as f64, n * l);
            PatternComparison {
                pattern: p.to_string(),
                expected,
                observed: mean,
                std_error: se,
                wilson_low: lo,
                wilson_high: hi,
                z: if se > 0.0 {
                    (mean - expected) / se
                } else {
                    0.0
                },
            }
        })
        .collect();
    Ok(SubcriticalReport {
        rho,
        len,
        k: (rho * l).round() as usize,
        trials: trials.len(),
        unabsorbed: trials.iter().filter(|t| !t.absorbed).count(),
        finite_size_caveat: "absorbed rings stand in for the infinite-line limit",
        patterns,
    })
}

/// Sequential comparison over streams `0..trials` of `root_seed`.
pub fn subcritical_empirical_compare(
    rho: f64,
    len: usize,
    trials: usize,
    root_seed: u64,
    n_pattern_max: usize,
) -> Result<SubcriticalReport, LimitError> {
    let runs = (0..trials as u64)
        .map(|i| subcritical_trial(rho, len, n_pattern_max, &mut RngStream::new(root_seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    subcritical_report(rho, len, n_pattern_max, &runs)
}

/// Wilson 95% interval for `s` successes out of `n`.
pub(crate) fn wilson(s: f64, n: f64) -> (f64, f64) {
    const Z: f64 = 1.96;
    let p = s / n;
    let denom = 1.0 + Z * Z / n;
    let centre = (p + Z * Z / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    /// `P(max of the walk <= 1)`: exact dynamic programming over the first
    /// `depth` steps, then the gambler's-ruin value `r^(2 - s)` of climbing
    /// from a surviving level `s` to level two later.
    fn ballot_oracle(rho: f64, depth: usize) -> f64 {
        let r = rho / (1.0 - rho);
        // levels 1, 0, -1, ..., -depth stored at index 1 - level
        let mut dist = vec![0.0; depth + 2];
        dist[1] = 1.0;
        for _ in 0..depth {
            let mut next = vec![0.0; depth + 2];
            for (i, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                if i > 0 {
                    next[i - 1] += p * rho;
                }
                if i + 1 < next.len() {
                    next[i + 1] += p * (1.0 - rho);
                }
            }
            dist = next;
        }
        dist.iter()
            .enumerate()
            .map(|(i, &p)| p * (1.0 - r.powi(i as i32 + 1)))
            .sum()
    }

    #[test]
    fn ballot_values() {
        assert!((ballot_prob(1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!(ballot_prob(0.5 - 1e-12).unwrap() < 1e-11);
        assert!((ballot_prob(0.3).unwrap() - 0.4 / 0.49).abs() < 1e-15);
        for rho in [0.1, 0.2, 0.3, 0.4] {
            let b = ballot_prob(rho).unwrap();
            assert!((b - ballot_oracle(rho, 60)).abs() < 1e-9, "rho {rho}");
            assert!((b - (1.0 - (rho / (1.0 - rho)).powi(2))).abs() < 1e-15);
        }
        assert!(ballot_prob(0.5).is_err());
        assert!(ballot_prob(0.0).is_err());
    }

    #[test]
    fn recursion_examples() {
        let rho = 0.3;
        assert!((limit_prob(rho, &pat("00")).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(limit_prob(rho, &pat("11")).unwrap(), 0.0);
        assert!((limit_prob(rho, &pat("10")).unwrap() - 0.3).abs() < 1e-15);
        assert!((limit_prob(rho, &pat("101")).unwrap() - 0.18).abs() < 1e-15);
        assert_eq!(limit_prob(rho, &pat("1")).unwrap(), rho);
        assert!(limit_prob(0.6, &pat("1")).is_err());
    }

    #[test]
    fn short_marginals_sum_to_one() {
        let t = LimitMeasureTable::new(0.3, 3).unwrap();
        let two: Vec<f64> = ["00", "01", "10", "11"]
            .iter()
            .map(|s| t.prob(&pat(s)))
            .collect();
        let expected = [0.4, 0.3, 0.3, 0.0];
        for (a, b) in two.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let three: f64 = Pattern::all(3).map(|p| t.prob(&p)).sum();
        assert!((three - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case_a_is_the_ballot_chain() {
        for rho in [0.1, 0.25, 0.4] {
            let b = ballot_prob(rho).unwrap();
            for rest_len in 0..=6 {
                let rests: Vec<Vec<u8>> = if rest_len == 0 {
                    vec![Vec::new()]
                } else {
                    Pattern::all(rest_len)
                        .map(|p| p.as_slice().to_vec())
                        .collect()
                };
                for rest in rests {
                    if has_double_one(&rest) {
                        continue;
                    }
                    let mut w = vec![0, 0];
                    w.extend_from_slice(&rest);
                    let product: f64 = rest.iter().map(|&x| site_prob(rho, x)).product();
                    let via_ballot = (1.0 - rho) * (1.0 - rho) * b * product;
                    let direct = limit_prob(rho, &Pattern::new(w).unwrap()).unwrap();
                    assert!((via_ballot - direct).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn table_entries_in_range() {
        for i in 1..=9 {
            let rho = 0.05 * i as f64;
            let t = LimitMeasureTable::new(rho, 12).unwrap();
            let r = consistency_check(&t);
            assert!(r.min_entry >= 0.0 && r.max_entry <= 1.0, "rho {rho}");
            assert_eq!(r.nonzero_double_ones, 0);
        }
    }

    #[test]
    fn short_words_are_consistent() {
        for rho in [0.1, 0.2, 0.3, 0.4] {
            let t = LimitMeasureTable::new(rho, 3).unwrap();
            let r = consistency_check(&t);
            assert!(r.max_violation() < 1e-12, "{r:?}");
            // left consistency of "0": P(00) + P(10) = P(0)
            assert!((t.prob(&pat("00")) + t.prob(&pat("10")) - t.prob(&pat("0"))).abs() < 1e-15);
        }
    }

    /// Length-four words break right additivity: `P(001)` is `(1-2ρ)ρ` but
    /// `P(0010) + P(0011) = (1-2ρ)ρ(1-ρ)`.
    #[test]
    fn length_four_right_defect_is_reported() {
        let rho = 0.3;
        let t = LimitMeasureTable::new(rho, 4).unwrap();
        let r = consistency_check(&t);
        let defect = (1.0 - 2.0 * rho) * rho * rho;
        assert!((r.max_right_violation - defect).abs() < 1e-15, "{r:?}");
        assert_eq!(r.worst_right, "001");
    }

    #[test]
    fn perturbation_is_detected() {
        let mut t = LimitMeasureTable::new(0.2, 3).unwrap();
        let w = pat("010");
        t.insert(&w, t.prob(&w) + 1e-6);
        let r = consistency_check(&t);
        assert!((r.max_violation() - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn csv_lists_every_word() {
        let t = LimitMeasureTable::new(0.3, 3).unwrap();
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 1 + 2 + 4 + 8);
        assert!(
            csv.contains("\n00,4.0000000000000002e-1\n")
                || csv.contains("\n00,4.00000000000000022e-1\n")
        );
    }

    #[test]
    fn four_site_ring_absorbs_in_one_event() {
        // 1100 has one active site and lands on 1010
        let mut state = SimState::new(Configuration::ring("1100").unwrap());
        let mut rng = RngStream::new(0, 0);
        state.step(&mut rng).unwrap();
        assert!(state.is_absorbed());
        assert_eq!(state.config().alternating_parity(), Some(Parity::Even));
        assert_eq!(state.event_count(), 1);
    }

    #[test]
    fn critical_small_ring() {
        let grid: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let s = critical_absorption_stats(20, 50, 3, &grid).unwrap();
        assert_eq!(s.even + s.odd, 50);
        assert_eq!(s.n00_increases, 0);
        assert_eq!(s.balance_breaks, 0);
        assert_eq!(s.f11_increasing_trials, 0);
        assert!(critical_trial(7, &mut RngStream::new(0, 0), &grid).is_err());
    }

    #[test]
    fn zero_range_tracking_agrees_with_mapping() {
        for i in 0..5 {
            let t = zero_range_trial(40, &mut RngStream::new(8, i)).unwrap();
            assert_eq!(t.mapping_mismatches, 0);
            assert_eq!(t.label_emptied, 0);
            assert_eq!(t.lower_bound_decreases, 0);
            assert_eq!(t.final_fraction_one, 1.0);
            assert_eq!((t.mean_occupation_min, t.mean_occupation_max), (1.0, 1.0));
        }
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson(0.0, 100.0);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.037).abs() < 5e-4);
        let (lo, hi) = wilson(50.0, 100.0);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-15);
    }
}
