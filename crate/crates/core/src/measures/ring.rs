use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::{CylinderMeasure, MeasureError};
use crate::lattice::{Configuration, Topology};

pub const MAX_RING_LEN: usize = 14;

const RESIDUAL_TOL: f64 = 1e-10;

/// Generator of the dynamics restricted to the ring sector with `k`
/// particles on `len` sites. States are bit masks, bit `i` = site `i`.
#[derive(Debug, Clone)]
pub struct RingGeneratorMatrix {
    len: usize,
    k: usize,
    states: Vec<u32>,
    index: HashMap<u32, usize>,
    /// Off-diagonal rates `(target, rate)` per state.
    transitions: Vec<Vec<(usize, u32)>>,
}

fn rotate_left(mask: u32, len: usize) -> u32 {
    let full = (1u32 << len) - 1;
    ((mask << 1) | (mask >> (len - 1))) & full
}

fn rotate_right(mask: u32, len: usize) -> u32 {
    let full = (1u32 << len) - 1;
    ((mask >> 1) | (mask << (len - 1))) & full
}

/// Active sites of a ring mask, as a mask.
fn active_mask(mask: u32, len: usize) -> u32 {
    // bit x of `left` is η(x-1), of `right` is η(x+1)
    let left = rotate_left(mask, len);
    let right = rotate_right(mask, len);
    let full = (1u32 << len) - 1;
    mask & left & !right & full
}

/// Builds the sector generator.
pub fn ring_generator_build(len: usize, k: usize) -> Result<RingGeneratorMatrix, MeasureError> {
    if len > MAX_RING_LEN {
        return Err(MeasureError::SectorTooLarge(len));
    }
    Topology::ring(len)?;
    if k > len {
        return Err(MeasureError::BadSector { len, k });
    }
    let states: Vec<u32> = (0u32..1 << len)
        .filter(|m| m.count_ones() as usize == k)
        .collect();
    let index: HashMap<u32, usize> = states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let transitions = states
        .iter()
        .map(|&m| {
            let mut out: Vec<(usize, u32)> = Vec::new();
            let mut active = active_mask(m, len);
            while active != 0 {
                let x = active.trailing_zeros() as usize;
                active &= active - 1;
                let target = (m & !(1 << x)) | (1 << ((x + 1) % len));
                let t = index[&target];
                match out.iter_mut().find(|(s, _)| *s == t) {
                    Some(entry) => entry.1 += 1,
                    None => out.push((t, 1)),
                }
            }
            out
        })
        .collect();
    Ok(RingGeneratorMatrix {
        len,
        k,
        states,
        index,
        transitions,
    })
}

impl RingGeneratorMatrix {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn particles(&self) -> usize {
        self.k
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_mask(&self, i: usize) -> u32 {
        self.states[i]
    }

    pub fn state_index(&self, mask: u32) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn state(&self, i: usize) -> Configuration {
        Configuration::from_mask(
            Topology::ring(self.len).expect("valid ring"),
            self.states[i] as u64,
        )
    }

    pub fn transitions(&self, i: usize) -> &[(usize, u32)] {
        &self.transitions[i]
    }

    /// Total exit rate of state `i`; the diagonal entry is its negative.
    pub fn exit_rate(&self, i: usize) -> u32 {
        self.transitions[i].iter().map(|&(_, r)| r).sum()
    }

    /// Row sum of the generator in integer arithmetic.
    pub fn row_sum(&self, i: usize) -> i64 {
        self.transitions[i]
            .iter()
            .map(|&(_, r)| r as i64)
            .sum::<i64>()
            - self.exit_rate(i) as i64
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n_states();
        let mut q = DMatrix::zeros(n, n);
        for i in 0..n {
            for &(j, r) in &self.transitions[i] {
                q[(i, j)] += r as f64;
            }
            q[(i, i)] -= self.exit_rate(i) as f64;
        }
        q
    }

    fn digraph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.n_states(), 0);
        let nodes: Vec<_> = (0..self.n_states()).map(|_| g.add_node(())).collect();
        for (i, row) in self.transitions.iter().enumerate() {
            for &(j, _) in row {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
        g
    }
}

/// A closed communicating class with its stationary distribution.
#[derive(Debug, Clone, Serialize)]
pub struct RecurrentClass {
    /// State indices, sorted.
    pub states: Vec<usize>,
    /// Stationary probabilities, aligned with `states`.
    pub stationary: Vec<f64>,
    /// `max |π Q|` on the class.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RingAnalysis {
    pub classes: Vec<RecurrentClass>,
    pub transient: Vec<usize>,
    /// Probability of ending in each class from the given initial law.
    pub absorption: Option<Vec<f64>>,
}

impl RingAnalysis {
    /// Stationary law of `class` spread over the whole sector.
    pub fn stationary_full(&self, gen: &RingGeneratorMatrix, class: usize) -> Vec<f64> {
        let mut out = vec![0.0; gen.n_states()];
        let c = &self.classes[class];
        for (&s, &p) in c.states.iter().zip(&c.stationary) {
            out[s] = p;
        }
        out
    }
}

/// Communicating classes, stationary laws of the recurrent ones and, if
/// `initial` is given, the probability of absorption in each recurrent class.
pub fn stationary_and_classes(
    gen: &RingGeneratorMatrix,
    initial: Option<&[f64]>,
) -> Result<RingAnalysis, MeasureError> {
    let n = gen.n_states();
    let sccs = tarjan_scc(&gen.digraph());
    let mut class_of = vec![usize::MAX; n];
    for (c, comp) in sccs.iter().enumerate() {
        for node in comp {
            class_of[node.index()] = c;
        }
    }
    let mut classes = Vec::new();
    let mut transient = Vec::new();
    for (c, comp) in sccs.iter().enumerate() {
        let mut states: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        states.sort_unstable();
        let closed = states
            .iter()
            .all(|&s| gen.transitions(s).iter().all(|&(t, _)| class_of[t] == c));
        if closed {
            classes.push(solve_class(gen, states)?);
        } else {
            transient.extend(states);
        }
    }
    classes.sort_by_key(|c| c.states[0]);
    let mut class_index = vec![None; n];
    for (ci, c) in classes.iter().enumerate() {
        for &s in &c.states {
            class_index[s] = Some(ci);
        }
    }
    transient.sort_unstable();

    let absorption = match initial {
        None => None,
        Some(init) => {
            if init.len() != n {
                return Err(MeasureError::BadInitial {
                    expected: n,
                    got: init.len(),
                });
            }
            Some(absorption_probabilities(
                gen,
                &classes,
                &class_index,
                &transient,
                init,
            )?)
        }
    };
    Ok(RingAnalysis {
        classes,
        transient,
        absorption,
    })
}

fn solve_class(
    gen: &RingGeneratorMatrix,
    states: Vec<usize>,
) -> Result<RecurrentClass, MeasureError> {
    let m = states.len();
    if m == 1 {
        return Ok(RecurrentClass {
            states,
            stationary: vec![1.0],
            residual: 0.0,
        });
    }
    let local: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    // Solve Q_C^T π = 0 with the last equation replaced by Σ π = 1.
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (i, &s) in states.iter().enumerate() {
        for &(t, r) in gen.transitions(s) {
            a[(local[&t], i)] += r as f64;
        }
        a[(i, i)] -= gen.exit_rate(s) as f64;
    }
    let q_t = a.clone();
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(m);
    b[m - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or(MeasureError::SingularSolve(f64::INFINITY))?;
    let residual = (&q_t * &pi).amax();
    if !residual.is_finite() || residual > RESIDUAL_TOL {
        return Err(MeasureError::SingularSolve(residual));
    }
    Ok(RecurrentClass {
        states,
        stationary: pi.iter().copied().collect(),
        residual,
    })
}

fn absorption_probabilities(
    gen: &RingGeneratorMatrix,
    classes: &[RecurrentClass],
    class_index: &[Option<usize>],
    transient: &[usize],
    init: &[f64],
) -> Result<Vec<f64>, MeasureError> {
    let mut out = vec![0.0; classes.len()];
    for (s, &p) in init.iter().enumerate() {
        if let Some(c) = class_index[s] {
            out[c] += p;
        }
    }
    if transient.is_empty() {
        return Ok(out);
    }
    let t = transient.len();
    let local: HashMap<usize, usize> = transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    // (-Q_TT) H = Q_TC 1_c, one column per class
    let mut a = DMatrix::<f64>::zeros(t, t);
    let mut rhs = DMatrix::<f64>::zeros(t, classes.len());
    for (i, &s) in transient.iter().enumerate() {
        a[(i, i)] = gen.exit_rate(s) as f64;
        for &(target, r) in gen.transitions(s) {
            match (local.get(&target), class_index[target]) {
                (Some(&j), _) => a[(i, j)] -= r as f64,
                (None, Some(c)) => rhs[(i, c)] += r as f64,
                (None, None) => unreachable!("every state is transient or recurrent"),
            }
        }
    }
    let h = a
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(MeasureError::SingularSolve(f64::INFINITY))?;
    let residual = (&a * &h - &rhs).amax();
    if !residual.is_finite() || residual > RESIDUAL_TOL {
        return Err(MeasureError::SingularSolve(residual));
    }
    for (i, &s) in transient.iter().enumerate() {
        for (c, o) in out.iter_mut().enumerate() {
            *o += init[s] * h[(i, c)];
        }
    }
    Ok(out)
}

/// Stationary law of one recurrent class as a cylinder measure: the
/// probability of a word is its expected frequency over ring positions.
#[derive(Debug, Clone)]
pub struct RingStationaryMeasure {
    len: usize,
    weighted: Vec<(Configuration, f64)>,
}

impl RingStationaryMeasure {
    pub fn new(gen: &RingGeneratorMatrix, class: &RecurrentClass) -> Self {
        RingStationaryMeasure {
            len: gen.len(),
            weighted: class
                .states
                .iter()
                .zip(&class.stationary)
                .map(|(&s, &p)| (gen.state(s), p))
                .collect(),
        }
    }
}

impl CylinderMeasure for RingStationaryMeasure {
    fn prob(&self, word: &[u8]) -> f64 {
        let pattern = crate::lattice::Pattern::new(word.to_vec()).expect("nonempty binary word");
        self.weighted
            .iter()
            .map(|(c, p)| p * c.count_pattern(&pattern).expect("ring") as f64)
            .sum::<f64>()
            / self.len as f64
    }
}

/// JSON summary of a sector analysis.
#[derive(Debug, Clone, Serialize)]
pub struct RingSummary {
    #[serde(rename = "L")]
    pub len: usize,
    pub k: usize,
    pub n_states: usize,
    pub class_count: usize,
    pub transient_count: usize,
    pub maximal_island_count: usize,
    /// Total variation distance of the first class from uniform on its states.
    pub tv_from_uniform: f64,
    /// Same, from uniform over the no-double-zero states of the sector.
    pub tv_from_uniform_maximal_island: f64,
    pub residual_norm: f64,
    pub absorption: Option<Vec<f64>>,
}

impl RingSummary {
    pub fn new(gen: &RingGeneratorMatrix, analysis: &RingAnalysis) -> Self {
        let islands: Vec<usize> = (0..gen.n_states())
            .filter(|&s| gen.state(s).is_no_adjacent_zeros())
            .collect();
        let first = &analysis.classes[0];
        let u = 1.0 / first.states.len() as f64;
        let tv = 0.5 * first.stationary.iter().map(|p| (p - u).abs()).sum::<f64>();
        let full = analysis.stationary_full(gen, 0);
        let ui = if islands.is_empty() {
            0.0
        } else {
            1.0 / islands.len() as f64
        };
        let tv_islands = 0.5
            * (0..gen.n_states())
                .map(|s| {
                    let target = if islands.binary_search(&s).is_ok() {
                        ui
                    } else {
                        0.0
                    };
                    (full[s] - target).abs()
                })
                .sum::<f64>();
        RingSummary {
            len: gen.len(),
            k: gen.particles(),
            n_states: gen.n_states(),
            class_count: analysis.classes.len(),
            transient_count: analysis.transient.len(),
            maximal_island_count: islands.len(),
            tv_from_uniform: tv,
            tv_from_uniform_maximal_island: tv_islands,
            residual_norm: analysis
                .classes
                .iter()
                .map(|c| c.residual)
                .fold(0.0, f64::max),
            absorption: analysis.absorption.clone(),
        }
    }
}

impl RingGeneratorMatrix {
    /// `state,probability` rows of every recurrent class, sector order.
    pub fn stationary_csv(&self, analysis: &RingAnalysis) -> String {
        let gen = self;
        let mut rows: Vec<(usize, f64)> = analysis
            .classes
            .iter()
            .flat_map(|c| c.states.iter().copied().zip(c.stationary.iter().copied()))
            .collect();
        rows.sort_by_key(|r| r.0);
        let mut out = String::from("state,probability\n");
        for (s, p) in rows {
            let _ = writeln!(out, "{},{p:.17e}", gen.state(s));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_mask(s: &str) -> u32 {
        Configuration::ring(s).unwrap().mask() as u32
    }

    #[test]
    fn mask_activity_matches_configuration() {
        for len in 3..=9 {
            for m in 0u32..1 << len {
                let c = Configuration::from_mask(Topology::ring(len).unwrap(), m as u64);
                let expected: u32 = (0..len)
                    .filter(|&x| c.is_active_at(x))
                    .map(|x| 1 << x)
                    .sum();
                assert_eq!(active_mask(m, len), expected);
            }
        }
    }

    #[test]
    fn four_two_sector() {
        let g = ring_generator_build(4, 2).unwrap();
        assert_eq!(g.n_states(), 6);
        let movers: Vec<String> = (0..6)
            .filter(|&i| g.exit_rate(i) > 0)
            .map(|i| g.state(i).to_string())
            .collect();
        assert_eq!(movers.len(), 4);
        for i in 0..6 {
            assert!(g.exit_rate(i) <= 1);
            assert_eq!(g.row_sum(i), 0);
        }
        let s = g.state_index(ring_mask("1100")).unwrap();
        assert_eq!(
            g.transitions(s),
            &[(g.state_index(ring_mask("1010")).unwrap(), 1)]
        );
    }

    #[test]
    fn four_three_sector() {
        let g = ring_generator_build(4, 3).unwrap();
        assert_eq!(g.n_states(), 4);
        assert!((0..4).all(|i| g.exit_rate(i) >= 1));
        let a = stationary_and_classes(&g, None).unwrap();
        assert_eq!(a.classes.len(), 1);
        assert!(a.classes[0]
            .stationary
            .iter()
            .all(|&p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn six_four_sector_is_uniform_on_islands() {
        let g = ring_generator_build(6, 4).unwrap();
        let a = stationary_and_classes(&g, None).unwrap();
        assert_eq!(a.classes.len(), 1);
        let c = &a.classes[0];
        assert_eq!(c.states.len(), 9);
        assert!(c.states.iter().all(|&s| g.state(s).is_no_adjacent_zeros()));
        assert!(c.stationary.iter().all(|&p| (p - 1.0 / 9.0).abs() < 1e-12));
        let summary = RingSummary::new(&g, &a);
        assert_eq!(summary.maximal_island_count, 9);
        assert!(summary.tv_from_uniform_maximal_island < 1e-12);
    }

    #[test]
    fn four_two_absorption_from_uniform() {
        let g = ring_generator_build(4, 2).unwrap();
        let init = vec![1.0 / 6.0; 6];
        let a = stationary_and_classes(&g, Some(&init)).unwrap();
        let frozen: Vec<String> = a
            .classes
            .iter()
            .map(|c| g.state(c.states[0]).to_string())
            .collect();
        assert_eq!(a.classes.len(), 2);
        assert!(frozen.contains(&"1010".to_string()) && frozen.contains(&"0101".to_string()));
        // 1100, 1001 go to one alternating state, 0110, 0011 to the other
        let abs = a.absorption.unwrap();
        assert!((abs[0] - 0.5).abs() < 1e-12 && (abs[1] - 0.5).abs() < 1e-12);
        let single = g.state_index(ring_mask("1100")).unwrap();
        let mut init = vec![0.0; 6];
        init[single] = 1.0;
        let a = stationary_and_classes(&g, Some(&init)).unwrap();
        let to_1010 = a
            .classes
            .iter()
            .position(|c| g.state(c.states[0]).to_string() == "1010")
            .unwrap();
        assert!((a.absorption.unwrap()[to_1010] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_measure_as_cylinder_measure() {
        let g = ring_generator_build(7, 5).unwrap();
        let a = stationary_and_classes(&g, None).unwrap();
        let m = RingStationaryMeasure::new(&g, &a.classes[0]);
        assert!((m.prob(&[1]) - 5.0 / 7.0).abs() < 1e-12);
        assert_eq!(m.prob(&[0, 0]), 0.0);
    }

    #[test]
    fn sector_limits() {
        assert!(matches!(
            ring_generator_build(15, 7),
            Err(MeasureError::SectorTooLarge(15))
        ));
        assert!(ring_generator_build(2, 1).is_err());
        assert!(ring_generator_build(5, 6).is_err());
    }
}
