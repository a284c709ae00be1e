use std::fmt::Write as _;

use serde::Serialize;

use super::{
    estimate_proportion, map_trials, ExperimentError, ExperimentKind, ExperimentOutput,
    LoadedConfig,
};
use crate::dynamics::{
    freezing_protocol, height_growth_probe, window_from_streams, FreezeParams, FreezeVerdict,
    Inconclusive, SamplingPlan, SimState, StopCondition,
};
use crate::lattice::{Configuration, Parity, Pattern, Topology, TopologyKind};
use crate::limits::{
    ballot_prob, consistency_check, critical_trial, subcritical_report, subcritical_trial,
    CriticalStats, LimitMeasureTable,
};
use crate::measures::{
    bernoulli_sample, forbidden_pattern_probs, generator_expectation, ring_generator_build,
    sector_sample, stationary_and_classes, CylinderFunction, MarkovMeasureSpec, ProductMeasure,
    RingSummary, MAX_RING_LEN,
};
use crate::rng::RngStream;

const INVARIANCE_TOL: f64 = 1e-12;
const CONSISTENCY_TOL: f64 = 1e-12;
const UNIFORM_TV_TOL: f64 = 1e-9;

fn default_rhos(kind: ExperimentKind) -> Vec<f64> {
    match kind {
        ExperimentKind::InvarianceCheck => vec![0.6, 0.75, 0.9],
        _ => vec![0.1, 0.2, 0.3, 0.4],
    }
}

fn rhos(loaded: &LoadedConfig) -> Vec<f64> {
    let c = &loaded.config;
    c.params
        .rhos
        .clone()
        .or_else(|| c.lattice.rho.map(|r| vec![r]))
        .unwrap_or_else(|| default_rhos(c.experiment))
}

fn critical_grid(loaded: &LoadedConfig) -> Vec<f64> {
    let c = &loaded.config;
    let t_max = c.dynamics.t_max.unwrap_or(50.0);
    let step = c.params.grid_step.unwrap_or(1.0);
    let n = (t_max / step).floor() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

fn freeze_params(loaded: &LoadedConfig) -> FreezeParams {
    let c = &loaded.config;
    let d = FreezeParams::default();
    FreezeParams {
        initial_half_width: c.params.half_width.unwrap_or(d.initial_half_width),
        max_half_width: c
            .params
            .max_half_width
            .unwrap_or((c.lattice.len.saturating_sub(1)) / 2),
        horizon: c.dynamics.t_max.unwrap_or(d.horizon),
        record_zone: c.params.record_zone.unwrap_or(d.record_zone),
    }
}

pub(super) fn stream_ids(config: &super::ExperimentConfig) -> Vec<u64> {
    match config.experiment {
        ExperimentKind::RingExact
        | ExperimentKind::InvarianceCheck
        | ExperimentKind::LimitTable => Vec::new(),
        _ => (0..config.trials).collect(),
    }
}

pub(super) fn validate(loaded: &LoadedConfig) -> Result<(), ExperimentError> {
    let c = &loaded.config;
    let l = &c.lattice;
    let err = |key: &str, msg: String| Err(loaded.error(key, msg));
    let exact_only = matches!(
        c.experiment,
        ExperimentKind::InvarianceCheck | ExperimentKind::LimitTable
    );
    let min_len = if l.topology == TopologyKind::Ring {
        3
    } else {
        1
    };
    if !exact_only && l.len < min_len {
        return err(
            "L",
            format!("{:?} needs at least {min_len} sites", l.topology),
        );
    }
    if c.trials == 0 {
        return err("trials", "must be positive".into());
    }
    if let Some(k) = l.k {
        if k > l.len {
            return err("k", format!("{k} particles do not fit on {} sites", l.len));
        }
    }
    let want_ring = |name: &str| -> Result<(), ExperimentError> {
        if l.topology != TopologyKind::Ring {
            return err("topology", format!("{name} runs on a ring"));
        }
        Ok(())
    };
    match c.experiment {
        ExperimentKind::Simulate => {
            let given = [l.initial.is_some(), l.k.is_some(), l.rho.is_some()];
            if given.iter().filter(|&&g| g).count() != 1 {
                return err(
                    "lattice",
                    "give exactly one of `initial`, `k`, `rho`".into(),
                );
            }
            if let Some(s) = &l.initial {
                match Configuration::parse(l.topology, s) {
                    Ok(cfg) if cfg.len() == l.len => {}
                    Ok(cfg) => {
                        return err(
                            "initial",
                            format!("has {} sites, `L` is {}", cfg.len(), l.len),
                        )
                    }
                    Err(e) => return err("initial", e.to_string()),
                }
            }
            if let Some(r) = l.rho {
                if !(0.0..=1.0).contains(&r) {
                    return err("rho", format!("{r} outside [0, 1]"));
                }
            }
            let bounded = c.dynamics.t_max.is_some() || c.dynamics.max_events.is_some();
            let surely_absorbs = l.topology == TopologyKind::Segment
                || l.k.is_some_and(|k| 2 * k <= l.len)
                || l.initial
                    .as_ref()
                    .is_some_and(|s| 2 * s.bytes().filter(|&b| b == b'1').count() <= l.len);
            if !bounded && !surely_absorbs {
                return err(
                    "dynamics",
                    "set `t_max` or `max_events`; this ring may never absorb".into(),
                );
            }
            if c.dynamics.snapshot_stride == Some(0) {
                return err("snapshot_stride", "must be positive".into());
            }
        }
        ExperimentKind::RingExact => {
            want_ring("ring-exact")?;
            if l.len > MAX_RING_LEN {
                return err(
                    "L",
                    format!("exact analysis is limited to {MAX_RING_LEN} sites"),
                );
            }
            if l.k.is_none() {
                return err("lattice", "ring-exact needs `k`".into());
            }
        }
        ExperimentKind::InvarianceCheck => {
            for r in rhos(loaded) {
                if !(r > 0.5 && r < 1.0) {
                    return err("rhos", format!("{r} outside (1/2, 1)"));
                }
            }
            if !(1..=8).contains(&c.params.support_max.unwrap_or(5)) {
                return err("support_max", "must be in 1..=8".into());
            }
        }
        ExperimentKind::LimitTable => {
            for r in rhos(loaded) {
                if !(r > 0.0 && r < 0.5) {
                    return err("rhos", format!("{r} outside (0, 1/2)"));
                }
            }
            if !(1..=crate::limits::MAX_TABLE_LEN).contains(&c.params.n_max.unwrap_or(10)) {
                return err(
                    "n_max",
                    format!("must be in 1..={}", crate::limits::MAX_TABLE_LEN),
                );
            }
        }
        ExperimentKind::CriticalAbsorption => {
            want_ring("critical-absorption")?;
            if !l.len.is_multiple_of(2) || l.len < 4 {
                return err("L", "critical-absorption needs an even L >= 4".into());
            }
            if l.k.is_some_and(|k| 2 * k != l.len) {
                return err("k", "critical-absorption needs k = L/2".into());
            }
            if c.params.grid_step.is_some_and(|s| s.is_nan() || s <= 0.0) {
                return err("grid_step", "must be positive".into());
            }
            if c.dynamics.t_max.is_some_and(|t| t.is_nan() || t < 0.0) {
                return err("t_max", "must be nonnegative".into());
            }
        }
        ExperimentKind::FreezingScan => {
            if l.topology != TopologyKind::Segment {
                return err("topology", "freezing-scan uses segment windows".into());
            }
            match l.rho {
                Some(r) if r > 0.0 && r < 1.0 => {}
                _ => return err("rho", "freezing-scan needs `rho` in (0, 1)".into()),
            }
            let p = freeze_params(loaded);
            if p.initial_half_width == 0 || p.max_half_width < p.initial_half_width {
                return err("L", "need 1 <= half_width <= (L - 1) / 2".into());
            }
            if !(p.record_zone > 0.0 && p.record_zone <= 1.0) {
                return err("record_zone", "must be in (0, 1]".into());
            }
            if let Some(cp) = &c.params.checkpoints {
                if cp.is_empty() || cp.windows(2).any(|w| w[1] <= w[0]) || cp[0] < 0.0 {
                    return err(
                        "checkpoints",
                        "must be nonempty, nonnegative and increasing".into(),
                    );
                }
            }
        }
        ExperimentKind::SubcriticalCompare => {
            want_ring("subcritical-compare")?;
            let r = match l.rho {
                Some(r) if r > 0.0 && r < 0.5 => r,
                _ => return err("rho", "subcritical-compare needs `rho` in (0, 1/2)".into()),
            };
            let k = (r * l.len as f64).round() as usize;
            if k == 0 {
                return err("L", "round(rho L) is zero".into());
            }
            if l.k.is_some_and(|given| given != k) {
                return err("k", format!("must equal round(rho L) = {k}"));
            }
            if !(1..=12).contains(&c.params.pattern_max.unwrap_or(3)) {
                return err("pattern_max", "must be in 1..=12".into());
            }
        }
    }
    Ok(())
}

pub(super) fn execute(
    loaded: &LoadedConfig,
    workers: usize,
) -> Result<ExperimentOutput, ExperimentError> {
    let mut out = ExperimentOutput::default();
    match loaded.config.experiment {
        ExperimentKind::Simulate => simulate(loaded, workers, &mut out)?,
        ExperimentKind::RingExact => ring_exact(loaded, &mut out)?,
        ExperimentKind::InvarianceCheck => invariance(loaded, &mut out),
        ExperimentKind::LimitTable => limit_table(loaded, &mut out)?,
        ExperimentKind::CriticalAbsorption => critical(loaded, workers, &mut out)?,
        ExperimentKind::FreezingScan => freezing(loaded, workers, &mut out),
        ExperimentKind::SubcriticalCompare => subcritical(loaded, workers, &mut out)?,
    }
    Ok(out)
}

fn run_err(e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Run(e.to_string())
}

fn simulate(
    loaded: &LoadedConfig,
    workers: usize,
    out: &mut ExperimentOutput,
) -> Result<(), ExperimentError> {
    let c = &loaded.config;
    let l = &c.lattice;
    let topology = Topology::new(l.topology, l.len).map_err(run_err)?;
    let stop = StopCondition {
        t_max: c.dynamics.t_max,
        max_events: c.dynamics.max_events,
    };
    let plan = match c.dynamics.snapshot_stride {
        Some(n) => SamplingPlan::EveryEvents(n),
        None => SamplingPlan::Endpoints,
    };
    let runs = map_trials(c.trials, workers, |i| {
        let mut rng = RngStream::new(c.seed, i);
        let initial = if let Some(s) = &l.initial {
            Configuration::parse(l.topology, s).map_err(run_err)?
        } else if let Some(k) = l.k {
            match l.topology {
                TopologyKind::Ring => sector_sample(l.len, k, &mut rng).map_err(run_err)?,
                TopologyKind::Segment => {
                    let ring = sector_sample(l.len, k, &mut rng).map_err(run_err)?;
                    Configuration::from_bits(topology, &ring.occupancy()).map_err(run_err)?
                }
            }
        } else {
            bernoulli_sample(l.rho.expect("validated"), topology, &mut rng).map_err(run_err)?
        };
        let mut state = SimState::new(initial);
        Ok(crate::dynamics::run_until(
            &mut state,
            stop,
            &mut rng,
            &plan,
            c.output.snapshots,
        ))
    });
    let mut summary = String::from("trial,events,absorbed_at,final_config\n");
    for (i, run) in runs.into_iter().enumerate() {
        let record = run?;
        let absorbed = record.absorbed_at.map_or(String::new(), |t| t.to_string());
        let _ = writeln!(
            summary,
            "{i},{},{absorbed},{}",
            record.events, record.final_config
        );
        out.file(&format!("trajectory_{i:04}.csv"), record.to_csv());
        if c.output.snapshots {
            out.file(&format!("snapshots_{i:04}.txt"), record.snapshots_text());
        }
    }
    out.file("final_states.csv", summary);
    Ok(())
}

fn ring_exact(loaded: &LoadedConfig, out: &mut ExperimentOutput) -> Result<(), ExperimentError> {
    let l = &loaded.config.lattice;
    let k = l.k.expect("validated");
    let gen = ring_generator_build(l.len, k).map_err(run_err)?;
    let init = vec![1.0 / gen.n_states() as f64; gen.n_states()];
    let analysis = stationary_and_classes(&gen, Some(&init)).map_err(run_err)?;
    let summary = RingSummary::new(&gen, &analysis);

    out.file("stationary.csv", gen.stationary_csv(&analysis));
    let mut abs = String::from("class_state,absorption_probability\n");
    for (c, p) in analysis
        .classes
        .iter()
        .zip(analysis.absorption.as_deref().unwrap_or(&[]))
    {
        let _ = writeln!(abs, "{},{p:.17e}", gen.state(c.states[0]));
    }
    out.file("absorption.csv", abs);
    out.json("summary.json", &summary);

    out.check(
        "row_sums_zero",
        (0..gen.n_states()).all(|i| gen.row_sum(i) == 0),
        "integer row sums",
    );
    out.check(
        "residual",
        summary.residual_norm <= 1e-10,
        format!("max |pi Q| = {:e}", summary.residual_norm),
    );
    if 2 * k > l.len {
        out.check(
            "unique_uniform_on_maximal_islands",
            summary.class_count == 1 && summary.tv_from_uniform_maximal_island <= UNIFORM_TV_TOL,
            format!(
                "{} classes, TV {:e} over {} states",
                summary.class_count,
                summary.tv_from_uniform_maximal_island,
                summary.maximal_island_count
            ),
        );
    } else {
        let bad = analysis
            .classes
            .iter()
            .filter(|c| {
                c.states.len() != 1
                    || gen.state(c.states[0]).count_pattern(&"11".parse().unwrap()) != Ok(0)
            })
            .count();
        out.check(
            "frozen_singleton_classes",
            bad == 0,
            format!(
                "{bad} of {} classes are not single frozen states without 11",
                analysis.classes.len()
            ),
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct InvarianceSummary {
    rhos: Vec<f64>,
    support_max: usize,
    functions: usize,
    max_abs_value: f64,
    tolerance: f64,
}

fn invariance(loaded: &LoadedConfig, out: &mut ExperimentOutput) {
    let support_max = loaded.config.params.support_max.unwrap_or(5);
    let k_max = loaded.config.params.k_max.unwrap_or(4);
    let rhos = rhos(loaded);
    let mut csv = String::from("rho,f_id,integral\n");
    let mut witness = String::from("rho,measure,integral_of_generator_of_00,expected\n");
    let mut forbidden = String::from("rho,measure,k,probability\n");
    let mut max_abs: f64 = 0.0;
    let mut functions = 0;
    for &rho in &rhos {
        let mu = MarkovMeasureSpec::new(rho).expect("validated");
        for len in 1..=support_max {
            for p in Pattern::all(len) {
                let v = generator_expectation(&mu, &CylinderFunction::indicator(0, &p));
                max_abs = max_abs.max(v.abs());
                functions += 1;
                let _ = writeln!(csv, "{rho},{p},{v:.17e}");
            }
        }
        let nu = ProductMeasure { rho };
        let f00 = CylinderFunction::indicator(0, &"00".parse().unwrap());
        let w = generator_expectation(&nu, &f00);
        let expected = -(rho * rho * (1.0 - rho) * (1.0 - rho));
        let _ = writeln!(witness, "{rho},product,{w:.17e},{expected:.17e}");
        let wm = generator_expectation(&mu, &f00);
        let _ = writeln!(witness, "{rho},renewal,{wm:.17e},0");
        for (k, p) in forbidden_pattern_probs(&mu, k_max).iter().enumerate() {
            let _ = writeln!(forbidden, "{rho},renewal,{k},{p:.17e}");
        }
        for (k, p) in forbidden_pattern_probs(&nu, k_max).iter().enumerate() {
            let _ = writeln!(forbidden, "{rho},product,{k},{p:.17e}");
        }
    }
    out.file("invariance.csv", csv);
    out.file("witness.csv", witness);
    out.file("forbidden_patterns.csv", forbidden);
    out.json(
        "summary.json",
        &InvarianceSummary {
            rhos,
            support_max,
            functions,
            max_abs_value: max_abs,
            tolerance: INVARIANCE_TOL,
        },
    );
    out.check(
        "invariance",
        max_abs <= INVARIANCE_TOL,
        format!("max |integral| = {max_abs:e} over {functions} indicators"),
    );
}

fn limit_table(loaded: &LoadedConfig, out: &mut ExperimentOutput) -> Result<(), ExperimentError> {
    let n_max = loaded.config.params.n_max.unwrap_or(10);
    let mut csv = String::from("rho,pattern,probability\n");
    let mut ballot = String::from("rho,ballot_prob\n");
    let mut reports = Vec::new();
    for rho in rhos(loaded) {
        let table = LimitMeasureTable::new(rho, n_max).map_err(run_err)?;
        for line in table.to_csv().lines().skip(1) {
            let _ = writeln!(csv, "{rho},{line}");
        }
        let _ = writeln!(ballot, "{rho},{:.17e}", ballot_prob(rho).map_err(run_err)?);
        let report = consistency_check(&table);
        out.check(
            &format!("range_rho_{rho}"),
            report.min_entry >= 0.0 && report.max_entry <= 1.0 && report.nonzero_double_ones == 0,
            format!(
                "entries in [{:e}, {:e}]",
                report.min_entry, report.max_entry
            ),
        );
        out.check(
            &format!("right_consistency_rho_{rho}"),
            report.max_right_violation <= CONSISTENCY_TOL,
            format!(
                "max {:e} at {}",
                report.max_right_violation, report.worst_right
            ),
        );
        out.check(
            &format!("left_consistency_rho_{rho}"),
            report.max_left_violation <= CONSISTENCY_TOL,
            format!(
                "max {:e} at {}",
                report.max_left_violation, report.worst_left
            ),
        );
        reports.push(report);
    }
    out.file("limit_table.csv", csv);
    out.file("ballot.csv", ballot);
    out.json("consistency.json", &reports);
    Ok(())
}

#[derive(Serialize)]
struct CriticalSummary<'a> {
    stats: &'a CriticalStats,
    even_fraction: super::EstimatorResult,
}

fn critical(
    loaded: &LoadedConfig,
    workers: usize,
    out: &mut ExperimentOutput,
) -> Result<(), ExperimentError> {
    let c = &loaded.config;
    let len = c.lattice.len;
    let grid = critical_grid(loaded);
    let runs = map_trials(c.trials, workers, |i| {
        critical_trial(len, &mut RngStream::new(c.seed, i), &grid)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(run_err)?;
    let stats = CriticalStats::from_trials(len, &grid, &runs);
    let mut trials = String::from("trial,parity,absorption_time,events\n");
    for (i, t) in runs.iter().enumerate() {
        let parity = match t.parity {
            Some(Parity::Even) => "even",
            Some(Parity::Odd) => "odd",
            None => "none",
        };
        let _ = writeln!(trials, "{i},{parity},{},{}", t.absorption_time, t.events);
    }
    let even = estimate_proportion(stats.even as u64, c.trials)
        .expect("trials > 0")
        .with_target(0.5);
    out.file("pair_decay.csv", stats.pair_decay_csv());
    out.file("trials.csv", trials);
    out.json(
        "summary.json",
        &CriticalSummary {
            stats: &stats,
            even_fraction: even,
        },
    );
    out.check(
        "absorbed_in_alternating_states",
        stats.not_alternating == 0 && stats.unabsorbed == 0,
        format!(
            "{} other final states, {} unabsorbed",
            stats.not_alternating, stats.unabsorbed
        ),
    );
    out.check(
        "n00_non_increasing",
        stats.n00_increases == 0,
        format!("{} increases", stats.n00_increases),
    );
    out.check(
        "n11_equals_n00",
        stats.balance_breaks == 0,
        format!("{} events broke the balance", stats.balance_breaks),
    );
    Ok(())
}

#[derive(Serialize)]
struct FreezingSummary {
    rho: f64,
    params: FreezeParams,
    frozen: super::EstimatorResult,
    conclusive: super::EstimatorResult,
    inconclusive_no_record: usize,
    inconclusive_disagreement: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    height_strictly_increasing: Option<super::EstimatorResult>,
}

fn freezing(loaded: &LoadedConfig, workers: usize, out: &mut ExperimentOutput) {
    let c = &loaded.config;
    let rho = c.lattice.rho.expect("validated");
    let params = freeze_params(loaded);
    let outcomes = map_trials(c.trials, workers, |i| {
        freezing_protocol(rho, c.seed, i, &params)
    });
    let mut csv = String::from("trial,verdict,frozen_at,half_width\n");
    let (mut frozen, mut conclusive, mut no_record, mut disagreement) = (0u64, 0u64, 0, 0);
    for (i, o) in outcomes.iter().enumerate() {
        let (verdict, at) = match (o.verdict, o.inconclusive) {
            (Some(FreezeVerdict::Frozen { at }), _) => ("frozen", at.to_string()),
            (Some(FreezeVerdict::ActiveAtHorizon), _) => ("active_at_horizon", String::new()),
            (None, Some(Inconclusive::NoRecord)) => ("inconclusive_no_record", String::new()),
            (None, _) => ("inconclusive_disagreement", String::new()),
        };
        frozen += u64::from(o.is_frozen());
        conclusive += u64::from(o.is_conclusive());
        no_record += usize::from(o.inconclusive == Some(Inconclusive::NoRecord));
        disagreement += usize::from(o.inconclusive == Some(Inconclusive::Disagreement));
        let _ = writeln!(csv, "{i},{verdict},{at},{}", o.half_width);
    }
    out.file("freezing.csv", csv);

    let mut increasing = None;
    if let Some(checkpoints) = &c.params.checkpoints {
        let horizon = *checkpoints.last().expect("validated");
        let left = c
            .params
            .window_left
            .unwrap_or((4.0 * horizon).ceil() as usize);
        let right = c.params.window_right.unwrap_or(1000);
        let heights = map_trials(c.trials, workers, |i| {
            let half = left.max(right);
            let window = window_from_streams(rho, c.seed, i, half);
            let from = half - left;
            let bits = window.occupancy()[from..=half + right].to_vec();
            let segment =
                Configuration::from_bits(Topology::segment(bits.len()).expect("nonempty"), &bits)
                    .expect("bits")
                    .with_origin(-(left as i64));
            height_growth_probe(&segment, &mut RngStream::new(c.seed, i), checkpoints)
        });
        let mut csv = String::from("trial,t,h\n");
        let mut up = 0;
        for (i, hs) in heights.iter().enumerate() {
            for (t, h) in checkpoints.iter().zip(hs) {
                let _ = writeln!(csv, "{i},{t},{h}");
            }
            up += u64::from(hs.windows(2).all(|w| w[1] > w[0]));
        }
        out.file("height.csv", csv);
        increasing = Some(estimate_proportion(up, c.trials).expect("trials > 0"));
    }
    out.json(
        "summary.json",
        &FreezingSummary {
            rho,
            params,
            frozen: estimate_proportion(frozen, c.trials).expect("trials > 0"),
            conclusive: estimate_proportion(conclusive, c.trials).expect("trials > 0"),
            inconclusive_no_record: no_record,
            inconclusive_disagreement: disagreement,
            height_strictly_increasing: increasing,
        },
    );
}

fn subcritical(
    loaded: &LoadedConfig,
    workers: usize,
    out: &mut ExperimentOutput,
) -> Result<(), ExperimentError> {
    let c = &loaded.config;
    let rho = c.lattice.rho.expect("validated");
    let len = c.lattice.len;
    let pattern_max = c.params.pattern_max.unwrap_or(3);
    let runs = map_trials(c.trials, workers, |i| {
        subcritical_trial(rho, len, pattern_max, &mut RngStream::new(c.seed, i))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(run_err)?;
    let report = subcritical_report(rho, len, pattern_max, &runs).map_err(run_err)?;
    let mut csv = String::from("pattern,expected,observed,std_error,wilson_low,wilson_high,z\n");
    for p in &report.patterns {
        let _ = writeln!(
            csv,
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.6}",
            p.pattern, p.expected, p.observed, p.std_error, p.wilson_low, p.wilson_high, p.z
        );
    }
    out.file("patterns.csv", csv);
    out.json("comparison.json", &report);
    let eleven = report.patterns.iter().find(|p| p.pattern == "11");
    out.check(
        "no_11_at_absorption",
        report.unabsorbed == 0 && eleven.is_none_or(|p| p.observed == 0.0),
        format!("{} unabsorbed rings", report.unabsorbed),
    );
    Ok(())
}
