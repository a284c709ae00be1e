//! Lattice configurations, patterns and the combinatorial queries on them.
//!
//! A [`Configuration`] is a finite 0/1 occupancy word living either on a ring
//! (periodic boundary) or on a segment, which is a window of the integer line
//! whose first site sits at lattice coordinate `origin_offset`. Occupancy is
//! bit-packed in 64-site blocks.
//!
//! Segment windows approximate the infinite line. Sites outside the window are
//! unknown, so predicates that read a site together with both of its
//! neighbours are only evaluated on interior positions; see
//! [`Configuration::interior_triples`].

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice length must be positive")]
    EmptyLattice,
    #[error("a ring needs at least 3 sites, got {0}")]
    RingTooShort(usize),
    #[error("invalid occupancy symbol {0:?} (expected '0' or '1')")]
    InvalidSymbol(char),
    #[error("occupancy word has {got} sites but the topology has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("pattern must be nonempty")]
    EmptyPattern,
    #[error("pattern of length {pattern} does not fit a segment of length {len}")]
    PatternTooLong { pattern: usize, len: usize },
    #[error("alternating configurations need an even ring length, got {0}")]
    OddLength(usize),
    #[error("operation requires a {0} topology")]
    WrongTopology(TopologyKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Ring,
    Segment,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyKind::Ring => f.write_str("ring"),
            TopologyKind::Segment => f.write_str("segment"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Topology {
    kind: TopologyKind,
    len: usize,
}

impl Topology {
    pub fn ring(len: usize) -> Result<Self, LatticeError> {
        if len < 3 {
            return Err(LatticeError::RingTooShort(len));
        }
        Ok(Topology {
            kind: TopologyKind::Ring,
            len,
        })
    }

    pub fn segment(len: usize) -> Result<Self, LatticeError> {
        if len == 0 {
            return Err(LatticeError::EmptyLattice);
        }
        Ok(Topology {
            kind: TopologyKind::Segment,
            len,
        })
    }

    pub fn new(kind: TopologyKind, len: usize) -> Result<Self, LatticeError> {
        match kind {
            TopologyKind::Ring => Self::ring(len),
            TopologyKind::Segment => Self::segment(len),
        }
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_ring(&self) -> bool {
        self.kind == TopologyKind::Ring
    }
}

/// Which sublattice carries the particles of an alternating configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(x: i64) -> Parity {
        if x.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Finite nonempty 0/1 word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Vec<u8>);

impl Pattern {
    pub fn new(word: Vec<u8>) -> Result<Self, LatticeError> {
        if word.is_empty() {
            return Err(LatticeError::EmptyPattern);
        }
        if let Some(&b) = word.iter().find(|&&b| b > 1) {
            return Err(LatticeError::InvalidSymbol(char::from(b'0' + b.min(9))));
        }
        Ok(Pattern(word))
    }

    /// Pattern of length `len` whose letters are the bits of `index`, most
    /// significant letter first.
    pub fn from_index(index: usize, len: usize) -> Self {
        assert!(len > 0 && len < usize::BITS as usize);
        Pattern(
            (0..len)
                .map(|i| ((index >> (len - 1 - i)) & 1) as u8)
                .collect(),
        )
    }

    /// Inverse of [`Pattern::from_index`].
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    /// Every pattern of the given length, in index order.
    pub fn all(len: usize) -> impl Iterator<Item = Pattern> {
        (0..1usize << len).map(move |i| Pattern::from_index(i, len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn contains_word(&self, needle: &[u8]) -> bool {
        self.0.windows(needle.len()).any(|w| w == needle)
    }
}

impl FromStr for Pattern {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pattern::new(parse_word(s)?)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn parse_word(s: &str) -> Result<Vec<u8>, LatticeError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(LatticeError::InvalidSymbol(other)),
        })
        .collect()
}

/// The four adjacent-pair counts of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairCounts {
    pub n11: usize,
    pub n10: usize,
    pub n01: usize,
    pub n00: usize,
}

impl PairCounts {
    pub fn total(&self) -> usize {
        self.n11 + self.n10 + self.n01 + self.n00
    }
}

/// Occupancy word with topology.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    topology: Topology,
    blocks: Vec<u64>,
    origin_offset: i64,
}

impl Configuration {
    pub fn empty(topology: Topology) -> Self {
        Configuration {
            topology,
            blocks: vec![0; topology.len.div_ceil(64)],
            origin_offset: 0,
        }
    }

    pub fn from_bits(topology: Topology, bits: &[u8]) -> Result<Self, LatticeError> {
        if bits.len() != topology.len {
            return Err(LatticeError::LengthMismatch {
                expected: topology.len,
                got: bits.len(),
            });
        }
        let mut config = Configuration::empty(topology);
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => config.set(i, 1),
                other => return Err(LatticeError::InvalidSymbol(char::from(b'0' + other.min(9)))),
            }
        }
        Ok(config)
    }

    /// Parses the text form: one '0'/'1' per site, leftmost first.
    pub fn parse(kind: TopologyKind, s: &str) -> Result<Self, LatticeError> {
        let bits = parse_word(s)?;
        Configuration::from_bits(Topology::new(kind, bits.len())?, &bits)
    }

    pub fn ring(s: &str) -> Result<Self, LatticeError> {
        Configuration::parse(TopologyKind::Ring, s)
    }

    pub fn segment(s: &str) -> Result<Self, LatticeError> {
        Configuration::parse(TopologyKind::Segment, s)
    }

    /// Ring configuration from the low `len` bits of `mask` (bit i = site i).
    pub fn from_mask(topology: Topology, mask: u64) -> Self {
        assert!(topology.len <= 64);
        let mut config = Configuration::empty(topology);
        config.blocks[0] = if topology.len == 64 {
            mask
        } else {
            mask & ((1u64 << topology.len) - 1)
        };
        config
    }

    /// Bit mask of the occupancy; only for lattices of at most 64 sites.
    pub fn mask(&self) -> u64 {
        assert!(self.len() <= 64);
        self.blocks[0]
    }

    pub fn with_origin(mut self, origin_offset: i64) -> Self {
        self.origin_offset = origin_offset;
        self
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn origin_offset(&self) -> i64 {
        self.origin_offset
    }

    pub fn len(&self) -> usize {
        self.topology.len
    }

    pub fn is_empty(&self) -> bool {
        self.topology.len == 0
    }

    pub fn is_ring(&self) -> bool {
        self.topology.is_ring()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.blocks[i >> 6] >> (i & 63)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u8) {
        debug_assert!(i < self.len());
        let bit = 1u64 << (i & 63);
        if value == 0 {
            self.blocks[i >> 6] &= !bit;
        } else {
            self.blocks[i >> 6] |= bit;
        }
    }

    /// Value at index `i + delta`, wrapping on a ring; `None` off a segment.
    #[inline]
    pub fn neighbor(&self, i: usize, delta: isize) -> Option<u8> {
        self.wrap(i as isize + delta).map(|j| self.get(j))
    }

    #[inline]
    pub fn wrap(&self, i: isize) -> Option<usize> {
        let len = self.len() as isize;
        if self.is_ring() {
            Some(i.rem_euclid(len) as usize)
        } else if (0..len).contains(&i) {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Index of the site at lattice coordinate `x`, if it lies in the window.
    /// On a ring coordinates are taken modulo the length.
    pub fn index_of(&self, x: i64) -> Option<usize> {
        self.wrap((x - self.origin_offset) as isize)
    }

    pub fn coordinate(&self, i: usize) -> i64 {
        self.origin_offset + i as i64
    }

    pub fn particle_count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn density(&self) -> f64 {
        self.particle_count() as f64 / self.len() as f64
    }

    pub fn occupancy(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    /// Spatial shift: `(shift(x))(y) = self(x + y)`.
    ///
    /// Rotates a ring; on a segment the occupancy is kept and the window is
    /// relabelled so that the same sites are seen from the new origin.
    pub fn shift(&self, x: i64) -> Configuration {
        match self.topology.kind {
            TopologyKind::Ring => {
                let len = self.len() as i64;
                let mut out = Configuration::empty(self.topology);
                out.origin_offset = self.origin_offset;
                for y in 0..self.len() {
                    let src = (x + y as i64).rem_euclid(len) as usize;
                    out.set(y, self.get(src));
                }
                out
            }
            TopologyKind::Segment => {
                let mut out = self.clone();
                out.origin_offset = self.origin_offset - x;
                out
            }
        }
    }

    /// Starting positions scanned by window-based queries of width `width`.
    fn scan_positions(&self, width: usize) -> Range<usize> {
        match self.topology.kind {
            TopologyKind::Ring => 0..self.len(),
            TopologyKind::Segment => 0..(self.len() + 1).saturating_sub(width),
        }
    }

    fn matches_at(&self, start: usize, word: &[u8]) -> bool {
        let len = self.len();
        word.iter()
            .enumerate()
            .all(|(j, &b)| self.get((start + j) % len) == b)
    }

    fn count_word(&self, word: &[u8]) -> usize {
        self.scan_positions(word.len())
            .filter(|&s| self.matches_at(s, word))
            .count()
    }

    /// Number of occurrences of `pattern`; rings are scanned cyclically.
    pub fn count_pattern(&self, pattern: &Pattern) -> Result<usize, LatticeError> {
        if !self.is_ring() && pattern.len() > self.len() {
            return Err(LatticeError::PatternTooLong {
                pattern: pattern.len(),
                len: self.len(),
            });
        }
        Ok(self.count_word(pattern.as_slice()))
    }

    /// Adjacent-pair counts; `L` pairs on a ring, `L - 1` on a segment.
    pub fn pair_counts(&self) -> PairCounts {
        let mut counts = PairCounts::default();
        for s in self.scan_positions(2) {
            let a = self.get(s);
            let b = self.get((s + 1) % self.len());
            match (a, b) {
                (1, 1) => counts.n11 += 1,
                (1, 0) => counts.n10 += 1,
                (0, 1) => counts.n01 += 1,
                _ => counts.n00 += 1,
            }
        }
        counts
    }

    /// Ring of even length with particles on the sites of the given parity.
    pub fn alternating(len: usize, parity: Parity) -> Result<Configuration, LatticeError> {
        if !len.is_multiple_of(2) {
            return Err(LatticeError::OddLength(len));
        }
        let mut config = Configuration::empty(Topology::ring(len)?);
        for i in 0..len {
            if Parity::of(i as i64) == parity {
                config.set(i, 1);
            }
        }
        Ok(config)
    }

    /// If this is one of the two alternating ring configurations, its parity.
    pub fn alternating_parity(&self) -> Option<Parity> {
        if !self.is_ring() || !self.len().is_multiple_of(2) {
            return None;
        }
        [Parity::Even, Parity::Odd]
            .into_iter()
            .find(|&p| (0..self.len()).all(|i| self.get(i) == u8::from(Parity::of(i as i64) == p)))
    }

    /// Middle sites at which a site/left/right triple can be read: every site
    /// on a ring, `1..L-1` on a segment.
    pub fn interior_triples(&self) -> Range<usize> {
        match self.topology.kind {
            TopologyKind::Ring => 0..self.len(),
            TopologyKind::Segment => 1..self.len().saturating_sub(1).max(1),
        }
    }

    /// True when no site carries the jump-rate factor, i.e. no "110" occurs.
    /// On a segment only interior triples are examined.
    pub fn is_frozen(&self) -> bool {
        !self.interior_triples().any(|x| self.is_active_at(x))
    }

    /// `η(x-1) η(x) (1 - η(x+1)) == 1` for the middle index `x`.
    #[inline]
    pub fn is_active_at(&self, x: usize) -> bool {
        self.get(x) == 1 && self.neighbor(x, -1) == Some(1) && self.neighbor(x, 1) == Some(0)
    }

    pub fn is_no_adjacent_zeros(&self) -> bool {
        self.count_word(&[0, 0]) == 0
    }

    /// Least `m > 0` with `η(m-1) = η(m) = 0`, in lattice coordinates, within
    /// the window.
    pub fn first_double_zero(&self) -> Option<i64> {
        (1..self.len())
            .filter(|&i| self.coordinate(i) > 0)
            .find(|&i| self.get(i - 1) == 0 && self.get(i) == 0)
            .map(|i| self.coordinate(i))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}; {}@{})",
            self.topology.kind,
            self.len(),
            self,
            self.origin_offset
        )
    }
}
