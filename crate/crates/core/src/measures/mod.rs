//! Product measures, the renewal invariant measures and exact small-ring
//! stationary analysis.
//!
//! Translation-invariant measures are described by their cylinder
//! probabilities through [`CylinderMeasure`]; everything exact in this module
//! (generator expectations, covariances, forbidden-pattern masses) is a finite
//! sum over words weighted by those probabilities.

mod generator;
mod ring;

pub use generator::{
    correlation_decay, forbidden_pattern, forbidden_pattern_probs, generator_expectation,
};
pub use ring::{
    ring_generator_build, stationary_and_classes, RecurrentClass, RingAnalysis,
    RingGeneratorMatrix, RingStationaryMeasure, RingSummary, MAX_RING_LEN,
};

use thiserror::Error;

use crate::lattice::{Configuration, Pattern, Topology};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("density {0} outside the allowed range {1}")]
    RhoOutOfRange(f64, &'static str),
    #[error("ring of {0} sites exceeds the exact-analysis limit of {MAX_RING_LEN}")]
    SectorTooLarge(usize),
    #[error("sector needs 0 <= k <= L, got k = {k}, L = {len}")]
    BadSector { len: usize, k: usize },
    #[error("supports overlap at separation {0}")]
    OverlappingSupports(i64),
    #[error("weights table has {got} entries, support of {len} sites needs {expected}")]
    BadWeights {
        len: usize,
        expected: usize,
        got: usize,
    },
    #[error("linear solve residual {0:e} above tolerance")]
    SingularSolve(f64),
    #[error("initial distribution has {got} entries, sector has {expected}")]
    BadInitial { expected: usize, got: usize },
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Cylinder probabilities of a translation-invariant measure on `{0,1}^Z`.
pub trait CylinderMeasure {
    /// Probability that consecutive sites read `word`.
    fn prob(&self, word: &[u8]) -> f64;
}

/// Product Bernoulli measure with density `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductMeasure {
    pub rho: f64,
}

impl CylinderMeasure for ProductMeasure {
    fn prob(&self, word: &[u8]) -> f64 {
        word.iter()
            .map(|&b| if b == 1 { self.rho } else { 1.0 - self.rho })
            .product()
    }
}

/// `(2 rho - 1) / rho`, the parameter of the geometric run lengths of ones.
pub fn phi(rho: f64) -> Result<f64, MeasureError> {
    if !(rho > 0.5 && rho < 1.0) {
        return Err(MeasureError::RhoOutOfRange(rho, "(1/2, 1)"));
    }
    Ok((2.0 * rho - 1.0) / rho)
}

/// Two-state chain whose stationary path law is the renewal measure with
/// density `rho`: a hole is always followed by a particle, a particle by a
/// particle with probability `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovMeasureSpec {
    pub rho: f64,
    pub phi: f64,
    /// `transition[a][b]` is `p(a, b)`.
    pub transition: [[f64; 2]; 2],
    pub stationary: [f64; 2],
}

impl MarkovMeasureSpec {
    pub fn new(rho: f64) -> Result<Self, MeasureError> {
        let phi = phi(rho)?;
        Ok(MarkovMeasureSpec {
            rho,
            phi,
            transition: [[0.0, 1.0], [(1.0 - rho) / rho, phi]],
            stationary: [1.0 - rho, rho],
        })
    }

    /// `P^n` as a 2x2 matrix.
    pub fn transition_power(&self, n: usize) -> [[f64; 2]; 2] {
        let mut out = [[1.0, 0.0], [0.0, 1.0]];
        let mut base = self.transition;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = mat_mul(&out, &base);
            }
            base = mat_mul(&base, &base);
            n >>= 1;
        }
        out
    }

    /// Second eigenvalue of the transition matrix, `-(1 - rho) / rho`.
    pub fn second_eigenvalue(&self) -> f64 {
        self.phi - 1.0
    }
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

impl CylinderMeasure for MarkovMeasureSpec {
    fn prob(&self, word: &[u8]) -> f64 {
        let Some((&first, rest)) = word.split_first() else {
            return 1.0;
        };
        let mut p = self.stationary[first as usize];
        let mut prev = first;
        for &b in rest {
            p *= self.transition[prev as usize][b as usize];
            prev = b;
        }
        p
    }
}

/// Cylinder probability of `pattern` under the renewal measure.
pub fn mu_cylinder_prob(rho: f64, pattern: &Pattern) -> Result<f64, MeasureError> {
    Ok(MarkovMeasureSpec::new(rho)?.prob(pattern.as_slice()))
}

/// I.i.d. Bernoulli(`rho`) occupancies on the given topology.
pub fn bernoulli_sample(
    rho: f64,
    topology: Topology,
    rng: &mut RngStream,
) -> Result<Configuration, MeasureError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(MeasureError::RhoOutOfRange(rho, "[0, 1]"));
    }
    let mut config = Configuration::empty(topology);
    for i in 0..topology.len() {
        if rng.bernoulli(rho) {
            config.set(i, 1);
        }
    }
    Ok(config)
}

/// Uniformly random ring configuration with exactly `k` particles on `len`
/// sites (partial Fisher-Yates over the sites).
pub fn sector_sample(
    len: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<Configuration, MeasureError> {
    if k > len {
        return Err(MeasureError::BadSector { len, k });
    }
    let mut sites: Vec<usize> = (0..len).collect();
    let mut config = Configuration::empty(Topology::ring(len)?);
    for i in 0..k {
        let j = i + rng.index(len - i);
        sites.swap(i, j);
        config.set(sites[i], 1);
    }
    Ok(config)
}

/// Segment of `len` sites from the renewal measure, started in stationarity.
///
/// Runs of ones are drawn whole by inverting the geometric law on `{1, 2, ...}`
/// with parameter `1 - phi`; each run is followed by a single hole.
pub fn mu_sample(rho: f64, len: usize, rng: &mut RngStream) -> Result<Configuration, MeasureError> {
    let spec = MarkovMeasureSpec::new(rho)?;
    let topology = Topology::segment(len)?;
    let mut config = Configuration::empty(topology);
    let mut i = 0;
    if !rng.bernoulli(rho) {
        i = 1;
    }
    while i < len {
        let run = geometric_run(spec.phi, rng);
        let end = (i + run).min(len);
        for j in i..end {
            config.set(j, 1);
        }
        i = end + 1;
    }
    Ok(config)
}

/// Geometric variate on `{1, 2, ...}` with `P(n) = phi^(n-1) (1 - phi)`.
fn geometric_run(phi: f64, rng: &mut RngStream) -> usize {
    if phi <= 0.0 {
        return 1;
    }
    let u = 1.0 - rng.uniform();
    1 + (u.ln() / phi.ln()).floor() as usize
}

/// A real function of the sites `start .. start + len`, tabulated by word.
///
/// `weights[i]` is the value on the word [`Pattern::from_index`]`(i, len)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFunction {
    start: i64,
    len: usize,
    weights: Vec<f64>,
}

impl CylinderFunction {
    pub fn new(start: i64, len: usize, weights: Vec<f64>) -> Result<Self, MeasureError> {
        let expected = 1usize << len;
        if weights.len() != expected {
            return Err(MeasureError::BadWeights {
                len,
                expected,
                got: weights.len(),
            });
        }
        Ok(CylinderFunction {
            start,
            len,
            weights,
        })
    }

    pub fn from_fn(start: i64, len: usize, f: impl Fn(&[u8]) -> f64) -> Self {
        let weights = Pattern::all(len).map(|p| f(p.as_slice())).collect();
        CylinderFunction {
            start,
            len,
            weights,
        }
    }

    /// Indicator that the sites from `start` on read `pattern`.
    pub fn indicator(start: i64, pattern: &Pattern) -> Self {
        let mut weights = vec![0.0; 1 << pattern.len()];
        weights[pattern.index()] = 1.0;
        CylinderFunction {
            start,
            len: pattern.len(),
            weights,
        }
    }

    pub fn constant(value: f64) -> Self {
        CylinderFunction {
            start: 0,
            len: 1,
            weights: vec![value, value],
        }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> i64 {
        self.start + self.len as i64
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Value on a word covering exactly the support.
    pub fn eval(&self, word: &[u8]) -> f64 {
        debug_assert_eq!(word.len(), self.len);
        self.weights[word.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)]
    }

    /// Value on a configuration read on sites `offset ..` with `view[i]` the
    /// occupancy of site `offset + i`.
    pub fn eval_at(&self, view: &[u8], offset: i64) -> f64 {
        let from = (self.start - offset) as usize;
        self.eval(&view[from..from + self.len])
    }

    /// `∫ f dμ`.
    pub fn expectation(&self, measure: &dyn CylinderMeasure) -> f64 {
        Pattern::all(self.len)
            .zip(&self.weights)
            .filter(|(_, &w)| w != 0.0)
            .map(|(p, &w)| w * measure.prob(p.as_slice()))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn phi_values() {
        assert!((phi(0.75).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((phi(0.9).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert!(phi(0.5 + 1e-12).unwrap() < 1e-11);
        assert!(phi(0.5).is_err());
        assert!(phi(1.0).is_err());
    }

    #[test]
    fn chain_spec_invariants() {
        for rho in [0.55, 0.6, 0.75, 0.9, 0.99] {
            let s = MarkovMeasureSpec::new(rho).unwrap();
            for row in s.transition {
                assert!((row[0] + row[1] - 1.0).abs() < 1e-15);
            }
            for b in 0..2 {
                let pi_p =
                    s.stationary[0] * s.transition[0][b] + s.stationary[1] * s.transition[1][b];
                assert!((pi_p - s.stationary[b]).abs() < 1e-15);
            }
            assert!((0.0..1.0).contains(&s.phi));
            assert!((1.0 / (1.0 - s.phi) + 1.0 - 1.0 / (1.0 - rho)).abs() < 1e-9);
        }
    }

    #[test]
    fn cylinder_examples() {
        assert_eq!(mu_cylinder_prob(0.75, &pat("1")).unwrap(), 0.75);
        assert_eq!(mu_cylinder_prob(0.75, &pat("00")).unwrap(), 0.0);
        assert!((mu_cylinder_prob(0.75, &pat("010")).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!(mu_cylinder_prob(0.4, &pat("1")).is_err());
    }

    #[test]
    fn cylinder_kolmogorov_consistency() {
        let s = MarkovMeasureSpec::new(0.7).unwrap();
        for len in 1..=8 {
            for p in Pattern::all(len) {
                let w = p.as_slice();
                let right: f64 = (0..2u8).map(|b| s.prob(&[w, &[b]].concat())).sum();
                let left: f64 = (0..2u8).map(|b| s.prob(&[&[b], w].concat())).sum();
                assert!((right - s.prob(w)).abs() < 1e-15);
                assert!((left - s.prob(w)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bernoulli_extremes_and_density() {
        let mut rng = RngStream::new(1, 0);
        let seg = |n| Topology::segment(n).unwrap();
        assert_eq!(
            bernoulli_sample(0.0, seg(50), &mut rng)
                .unwrap()
                .particle_count(),
            0
        );
        assert_eq!(
            bernoulli_sample(1.0, seg(50), &mut rng)
                .unwrap()
                .particle_count(),
            50
        );
        let n = 100_000;
        let d = bernoulli_sample(0.5, seg(n), &mut rng).unwrap().density();
        assert!((d - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn mu_samples_have_no_double_zero() {
        let mut rng = RngStream::new(2, 0);
        for rho in [0.51, 0.6, 0.75, 0.95] {
            for len in [1, 2, 3, 10, 500] {
                let c = mu_sample(rho, len, &mut rng).unwrap();
                assert_eq!(c.len(), len);
                assert!(c.is_no_adjacent_zeros());
            }
        }
    }

    #[test]
    fn mu_density_and_gap_law() {
        let rho = 0.75;
        let n = 100_000;
        let c = mu_sample(rho, n, &mut RngStream::new(3, 0)).unwrap();
        // asymptotic variance of the density: rho (1 - rho) (1 + l) / (1 - l)
        let l = MarkovMeasureSpec::new(rho).unwrap().second_eigenvalue();
        let sd = (rho * (1.0 - rho) * (1.0 + l) / (1.0 - l) / n as f64).sqrt();
        assert!(
            (c.density() - rho).abs() < 3.0 * sd,
            "density {}",
            c.density()
        );

        // complete runs of ones between holes: Geometric on {1, 2, ...}, mean 3
        let bits = c.occupancy();
        let holes: Vec<usize> = (0..n).filter(|&i| bits[i] == 0).collect();
        let runs: Vec<usize> = holes.windows(2).map(|w| w[1] - w[0] - 1).collect();
        let mean = runs.iter().sum::<usize>() as f64 / runs.len() as f64;
        let phi: f64 = 2.0 / 3.0;
        let sd_mean = (phi / (1.0 - phi).powi(2) / runs.len() as f64).sqrt();
        assert!((mean - 3.0).abs() < 4.0 * sd_mean, "mean run {mean}");

        // chi-square over run lengths 1..=8 plus tail
        let mut observed = [0f64; 9];
        for &r in &runs {
            observed[(r - 1).min(8)] += 1.0;
        }
        let total = runs.len() as f64;
        let chi2: f64 = (0..9)
            .map(|j| {
                let p = if j < 8 {
                    phi.powi(j as i32) * (1.0 - phi)
                } else {
                    phi.powi(8)
                };
                (observed[j] - total * p).powi(2) / (total * p)
            })
            .sum();
        // 8 degrees of freedom; 0.999 quantile is 26.1
        assert!(chi2 < 26.1, "chi2 {chi2}");
    }

    #[test]
    fn sector_sample_is_uniform() {
        let mut rng = RngStream::new(4, 0);
        let mut hits = std::collections::HashMap::new();
        let n = 60_000;
        for _ in 0..n {
            let c = sector_sample(6, 3, &mut rng).unwrap();
            assert_eq!(c.particle_count(), 3);
            *hits.entry(c.mask()).or_insert(0usize) += 1;
        }
        assert_eq!(hits.len(), 20);
        // each count is Binomial(n, 1/20): sd about 53
        assert!(hits
            .values()
            .all(|&h| (h as f64 - 3000.0).abs() < 5.0 * 53.4));
    }

    #[test]
    fn cylinder_function_expectation() {
        let f = CylinderFunction::indicator(3, &pat("10"));
        assert_eq!(f.expectation(&ProductMeasure { rho: 0.3 }), 0.3 * 0.7);
        assert_eq!(
            CylinderFunction::constant(2.5).expectation(&ProductMeasure { rho: 0.3 }),
            2.5
        );
        assert!(CylinderFunction::new(0, 2, vec![0.0; 3]).is_err());
        assert_eq!(f.eval_at(&[0, 1, 0, 1], 2), 1.0);
    }
}
