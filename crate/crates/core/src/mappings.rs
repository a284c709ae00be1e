//! Height-function and zero-range representations of a configuration.
//!
//! The height profile of a segment is the lattice path with increments
//! `h(x) - h(x-1) = 1 - 2η(x)`, pinned by `h(0) = 2N` where `N` counts the
//! particles that crossed the bond `(0, 1)`. A jump of the exclusion process
//! at the active site `x` is the growth `h(x) += 2` of the path.
//!
//! The zero-range picture labels the holes of a ring, starting from a tagged
//! hole `H_0`, and records the number of particles `ξ(i)` strictly between
//! hole `i - 1` and hole `i`. A jump at `x` moves the hole at `x + 1` one step
//! left, which transfers one zero-range particle from label `i` to `i + 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Configuration, LatticeError, Topology, TopologyKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("height profile has a non-unit increment at site {0}")]
    NonUnitIncrement(i64),
    #[error("height profile needs at least two sites")]
    ProfileTooShort,
    #[error("the origin is not inside the window")]
    OriginOutsideWindow,
    #[error("h(0) = {0} is not twice a nonnegative crossing count")]
    BadAnchor(i64),
    #[error("site {0} is not a growth site of the profile")]
    NotGrowthSite(i64),
    #[error("operation requires a {0} topology")]
    WrongTopology(TopologyKind),
    #[error("tagged site {0} is occupied")]
    TaggedSiteOccupied(usize),
    #[error("configuration has no holes")]
    NoHoles,
    #[error("zero-range totals do not fill a ring of {len} sites ({labels} labels, {particles} particles)")]
    InconsistentTotals {
        len: usize,
        labels: usize,
        particles: usize,
    },
    #[error("site {0} is not an active bond")]
    NotActive(usize),
    #[error("zero-range site {0} holds fewer than two particles")]
    TooFewParticles(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Integer path with unit increments over a window of sites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightProfile {
    start: i64,
    heights: Vec<i64>,
    anchor: u64,
}

impl HeightProfile {
    /// Validates unit increments and reads the crossing anchor off `h(0)`.
    pub fn new(start: i64, heights: Vec<i64>) -> Result<Self, MappingError> {
        if heights.len() < 2 {
            return Err(MappingError::ProfileTooShort);
        }
        if let Some(i) = heights.windows(2).position(|w| (w[1] - w[0]).abs() != 1) {
            return Err(MappingError::NonUnitIncrement(start + i as i64 + 1));
        }
        let end = start + heights.len() as i64 - 1;
        if start > 0 || end < 0 {
            return Err(MappingError::OriginOutsideWindow);
        }
        let h0 = heights[(-start) as usize];
        if h0 < 0 || h0 % 2 != 0 {
            return Err(MappingError::BadAnchor(h0));
        }
        Ok(HeightProfile {
            start,
            heights,
            anchor: (h0 / 2) as u64,
        })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.heights.len() as i64 - 1
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    /// The crossing count `N` with `h(0) = 2N`.
    pub fn anchor(&self) -> u64 {
        self.anchor
    }

    /// Height at lattice site `x`, if inside the window.
    pub fn at(&self, x: i64) -> Option<i64> {
        if x < self.start || x > self.end() {
            return None;
        }
        Some(self.heights[(x - self.start) as usize])
    }

    /// The growth move `h(x) += 2`; only legal at a growth site.
    pub fn grow(&mut self, x: i64) -> Result<(), MappingError> {
        if !self.is_growth_site(x) {
            return Err(MappingError::NotGrowthSite(x));
        }
        self.heights[(x - self.start) as usize] += 2;
        if x == 0 {
            self.anchor += 1;
        }
        Ok(())
    }

    fn is_growth_site(&self, x: i64) -> bool {
        match (self.at(x - 2), self.at(x), self.at(x + 1)) {
            (Some(left), Some(h), Some(right)) => left == h + 2 && right == h + 1,
            _ => false,
        }
    }
}

/// Height profile of a segment. The window runs from one site left of the
/// configuration to its last site, so it must contain the origin.
pub fn height_from_config(
    config: &Configuration,
    anchor: u64,
) -> Result<HeightProfile, MappingError> {
    if config.is_ring() {
        return Err(MappingError::WrongTopology(TopologyKind::Segment));
    }
    let start = config.origin_offset() - 1;
    let end = config.origin_offset() + config.len() as i64 - 1;
    if start > 0 || end < 0 {
        return Err(MappingError::OriginOutsideWindow);
    }
    let mut heights = vec![0i64; config.len() + 1];
    let zero = (-start) as usize;
    heights[zero] = 2 * anchor as i64;
    // heights[j] sits at site start + j; its increment reads config index j - 1
    for j in zero + 1..heights.len() {
        heights[j] = heights[j - 1] + 1 - 2 * i64::from(config.get(j - 1));
    }
    for j in (0..zero).rev() {
        heights[j] = heights[j + 1] - 1 + 2 * i64::from(config.get(j));
    }
    Ok(HeightProfile {
        start,
        heights,
        anchor,
    })
}

/// Inverse of [`height_from_config`].
pub fn config_from_height(profile: &HeightProfile) -> Result<(Configuration, u64), MappingError> {
    let bits: Vec<u8> = profile
        .heights
        .windows(2)
        .map(|w| u8::from(w[1] < w[0]))
        .collect();
    let config = Configuration::from_bits(Topology::segment(bits.len())?, &bits)?
        .with_origin(profile.start + 1);
    Ok((config, profile.anchor))
}

/// Sites where the profile can grow by two: `h(x-2) = h(x) + 2` and
/// `h(x+1) = h(x) + 1`. These are exactly the active sites of the
/// corresponding configuration, in lattice coordinates.
pub fn height_jump_sites(profile: &HeightProfile) -> Vec<i64> {
    (profile.start + 2..profile.end())
        .filter(|&x| profile.is_growth_site(x))
        .collect()
}

/// Zero-range occupation numbers of a ring, labelled from a tagged hole.
///
/// `gaps[j]` counts the particles between hole `j` and hole `j + 1`
/// (cyclically), which is the zero-range occupation `ξ(j + 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroRangeState {
    len: usize,
    tagged_hole: usize,
    gaps: Vec<usize>,
}

impl ZeroRangeState {
    pub fn new(len: usize, tagged_hole: usize, gaps: Vec<usize>) -> Self {
        ZeroRangeState {
            len,
            tagged_hole,
            gaps,
        }
    }

    /// Number of zero-range sites (holes of the ring).
    pub fn labels(&self) -> usize {
        self.gaps.len()
    }

    pub fn total_particles(&self) -> usize {
        self.gaps.iter().sum()
    }

    pub fn tagged_hole(&self) -> usize {
        self.tagged_hole
    }

    pub fn gaps(&self) -> &[usize] {
        &self.gaps
    }

    /// `ξ(i) = H_i - H_{i-1} - 1`, labels taken modulo the number of holes.
    pub fn xi(&self, label: i64) -> usize {
        let m = self.gaps.len() as i64;
        self.gaps[(label - 1).rem_euclid(m) as usize]
    }

    /// Ring positions `H_0, H_1, ...` of the holes.
    pub fn hole_positions(&self) -> Vec<usize> {
        let mut pos = Vec::with_capacity(self.gaps.len());
        let mut h = self.tagged_hole;
        for &g in &self.gaps {
            pos.push(h);
            h = (h + g + 1) % self.len;
        }
        pos
    }

    /// Labels with exactly `n` zero-range particles.
    pub fn count_with(&self, n: usize) -> usize {
        self.gaps.iter().filter(|&&g| g == n).count()
    }

    /// Moves one particle from zero-range site `label` to `label + 1`; the hole
    /// `H_label` steps left. The tag follows `H_0`.
    pub fn apply_move(&mut self, label: usize) -> Result<(), MappingError> {
        let m = self.gaps.len();
        let from = (label + m - 1) % m;
        if self.gaps[from] < 2 {
            return Err(MappingError::TooFewParticles(label % m));
        }
        self.gaps[from] -= 1;
        self.gaps[(from + 1) % m] += 1;
        if label.is_multiple_of(m) {
            self.tagged_hole = (self.tagged_hole + self.len - 1) % self.len;
        }
        Ok(())
    }
}

/// Zero-range state of a ring configuration, labels anchored at `tagged_hole`.
pub fn zero_range_from_config(
    config: &Configuration,
    tagged_hole: usize,
) -> Result<ZeroRangeState, MappingError> {
    if !config.is_ring() {
        return Err(MappingError::WrongTopology(TopologyKind::Ring));
    }
    if config.particle_count() == config.len() {
        return Err(MappingError::NoHoles);
    }
    if config.get(tagged_hole) != 0 {
        return Err(MappingError::TaggedSiteOccupied(tagged_hole));
    }
    let len = config.len();
    let mut gaps = Vec::with_capacity(len - config.particle_count());
    let mut run = 0;
    for step in 1..=len {
        if config.get((tagged_hole + step) % len) == 1 {
            run += 1;
        } else {
            gaps.push(run);
            run = 0;
        }
    }
    Ok(ZeroRangeState {
        len,
        tagged_hole,
        gaps,
    })
}

/// Inverse of [`zero_range_from_config`].
pub fn config_from_zero_range(
    zr: &ZeroRangeState,
    topology: Topology,
) -> Result<Configuration, MappingError> {
    if !topology.is_ring() {
        return Err(MappingError::WrongTopology(TopologyKind::Ring));
    }
    let labels = zr.labels();
    let particles = zr.total_particles();
    if labels == 0
        || labels + particles != topology.len()
        || zr.len != topology.len()
        || zr.tagged_hole >= zr.len
    {
        return Err(MappingError::InconsistentTotals {
            len: topology.len(),
            labels,
            particles,
        });
    }
    let mut config = Configuration::empty(topology);
    let mut site = zr.tagged_hole;
    for &g in &zr.gaps {
        for _ in 0..g {
            site = (site + 1) % zr.len;
            config.set(site, 1);
        }
        site = (site + 1) % zr.len;
    }
    Ok(config)
}

/// Zero-range move induced by the exclusion jump at active site `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroRangeMove {
    pub from_label: usize,
    pub to_label: usize,
}

/// The jump at `x` moves a particle from the label of the hole at `x + 1` to
/// the next label.
pub fn zero_range_move_correspondence(
    config: &Configuration,
    tagged_hole: usize,
    x: usize,
) -> Result<ZeroRangeMove, MappingError> {
    if !config.is_ring() {
        return Err(MappingError::WrongTopology(TopologyKind::Ring));
    }
    if x >= config.len() || !config.is_active_at(x) {
        return Err(MappingError::NotActive(x));
    }
    if config.get(tagged_hole) != 0 {
        return Err(MappingError::TaggedSiteOccupied(tagged_hole));
    }
    let len = config.len();
    let hole = (x + 1) % len;
    // label of a hole = number of holes in (tagged, hole]
    let mut label = 0;
    let mut site = tagged_hole;
    while site != hole {
        site = (site + 1) % len;
        if config.get(site) == 0 {
            label += 1;
        }
    }
    let m = len - config.particle_count();
    let label = label % m;
    Ok(ZeroRangeMove {
        from_label: label,
        to_label: (label + 1) % m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{active_bonds, SimState};

    fn seg(s: &str) -> Configuration {
        Configuration::segment(s).unwrap()
    }

    #[test]
    fn height_examples() {
        let zeros = height_from_config(&seg("0000").with_origin(1), 0).unwrap();
        assert_eq!(zeros.heights(), &[0, 1, 2, 3, 4]);
        let ones = height_from_config(&seg("111").with_origin(1), 0).unwrap();
        assert_eq!(ones.heights(), &[0, -1, -2, -3]);
        let alt = height_from_config(&seg("1010").with_origin(1), 0).unwrap();
        assert_eq!(alt.start(), 0);
        assert_eq!(alt.heights(), &[0, -1, 0, -1, 0]);
    }

    #[test]
    fn height_left_of_origin() {
        // sites -2..=1 = 1 0 0 1, anchor 3
        let p = height_from_config(&seg("1001").with_origin(-2), 3).unwrap();
        assert_eq!(p.start(), -3);
        assert_eq!(p.at(0), Some(6));
        assert_eq!(p.at(-1), Some(5));
        assert_eq!(p.at(-2), Some(4));
        assert_eq!(p.at(-3), Some(5));
        assert_eq!(p.at(1), Some(5));
        assert_eq!(p.anchor(), 3);
    }

    #[test]
    fn config_from_height_examples() {
        let (c, n) = config_from_height(&HeightProfile::new(0, vec![0, 1, 2]).unwrap()).unwrap();
        assert_eq!((c.to_string(), n), ("00".to_string(), 0));
        let (c, n) = config_from_height(&HeightProfile::new(0, vec![4, 3, 4]).unwrap()).unwrap();
        assert_eq!((c.to_string(), n), ("10".to_string(), 2));
        assert_eq!(c.origin_offset(), 1);
    }

    #[test]
    fn invalid_profiles() {
        assert_eq!(
            HeightProfile::new(0, vec![0, 2]),
            Err(MappingError::NonUnitIncrement(1))
        );
        assert_eq!(
            HeightProfile::new(0, vec![1, 2]),
            Err(MappingError::BadAnchor(1))
        );
        assert_eq!(
            HeightProfile::new(1, vec![0, 1]),
            Err(MappingError::OriginOutsideWindow)
        );
        assert_eq!(
            HeightProfile::new(0, vec![0]),
            Err(MappingError::ProfileTooShort)
        );
        assert!(height_from_config(&Configuration::ring("0101").unwrap(), 0).is_err());
        assert_eq!(
            height_from_config(&seg("01").with_origin(5), 0),
            Err(MappingError::OriginOutsideWindow)
        );
    }

    #[test]
    fn growth_sites_match_active_bonds() {
        let frozen = height_from_config(&seg("0101010").with_origin(0), 0).unwrap();
        assert!(height_jump_sites(&frozen).is_empty());
        // sites 0..=4 = 0 1 1 0 0: the only active site is 2
        let c = seg("01100").with_origin(0);
        let p = height_from_config(&c, 0).unwrap();
        assert_eq!(height_jump_sites(&p), vec![2]);
        assert_eq!(active_bonds(&c), vec![2]);
    }

    #[test]
    fn growth_commutes_with_jump() {
        for origin in [-3, -2] {
            let c = seg("0111011").with_origin(origin);
            let mut state = SimState::new(c.clone()).with_tagged_bond((-origin) as usize);
            let mut p = height_from_config(&c, 4).unwrap();
            for x in active_bonds(&c) {
                let coord = c.coordinate(x);
                state.apply_jump(x).unwrap();
                p.grow(coord).unwrap();
            }
            assert_eq!(
                p,
                height_from_config(state.config(), 4 + state.crossings()).unwrap()
            );
            assert_eq!(p.grow(origin), Err(MappingError::NotGrowthSite(origin)));
        }
    }

    #[test]
    fn zero_range_examples() {
        let ring = |s: &str| Configuration::ring(s).unwrap();
        assert_eq!(
            zero_range_from_config(&ring("0101"), 0).unwrap().gaps(),
            &[1, 1]
        );
        let zr = zero_range_from_config(&ring("0110"), 0).unwrap();
        assert_eq!(zr.gaps(), &[2, 0]);
        assert_eq!(zr.hole_positions(), vec![0, 3]);
        assert_eq!(zr.xi(1), 2);
        assert_eq!(zr.xi(0), 0);
        assert_eq!(
            zero_range_from_config(&ring("0000"), 2).unwrap().gaps(),
            &[0, 0, 0, 0]
        );
        assert_eq!(
            zero_range_from_config(&ring("0110"), 1),
            Err(MappingError::TaggedSiteOccupied(1))
        );
        assert_eq!(
            zero_range_from_config(&ring("111"), 0),
            Err(MappingError::NoHoles)
        );
    }

    #[test]
    fn config_from_zero_range_examples() {
        let topo = Topology::ring(4).unwrap();
        let c = config_from_zero_range(&ZeroRangeState::new(4, 0, vec![1, 1]), topo).unwrap();
        assert_eq!(c.to_string(), "0101");
        let c = config_from_zero_range(&ZeroRangeState::new(4, 0, vec![2, 0]), topo).unwrap();
        assert_eq!(c.to_string(), "0110");
        assert!(matches!(
            config_from_zero_range(&ZeroRangeState::new(4, 0, vec![2, 1]), topo),
            Err(MappingError::InconsistentTotals { .. })
        ));
    }

    #[test]
    fn single_gap_move() {
        // 0 1 1 0 0: the jump at 2 turns the gap of two into one and feeds the next
        let c = Configuration::ring("01100").unwrap();
        let mv = zero_range_move_correspondence(&c, 0, 2).unwrap();
        assert_eq!(
            mv,
            ZeroRangeMove {
                from_label: 1,
                to_label: 2
            }
        );
        let mut zr = zero_range_from_config(&c, 0).unwrap();
        assert_eq!(zr.gaps(), &[2, 0, 0]);
        zr.apply_move(mv.from_label).unwrap();
        assert_eq!(zr.gaps(), &[1, 1, 0]);
        assert_eq!(
            zero_range_move_correspondence(&c, 0, 1),
            Err(MappingError::NotActive(1))
        );
    }

    #[test]
    fn tagged_hole_moves_left() {
        // hole at 0 is tagged; the active site 4 (with 3) pushes into it
        let c = Configuration::ring("01011").unwrap();
        let mv = zero_range_move_correspondence(&c, 0, 4).unwrap();
        assert_eq!(mv.from_label, 0);
        let mut zr = zero_range_from_config(&c, 0).unwrap();
        zr.apply_move(0).unwrap();
        let mut state = SimState::new(c);
        state.apply_jump(4).unwrap();
        assert_eq!(zr, zero_range_from_config(state.config(), 4).unwrap());
    }
}
