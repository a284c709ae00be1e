//! Browser bindings: a ring space-time diagram, frozen-law curves in the
//! density, and the height at the origin over time.

use ftasep::dynamics::{height_growth_probe, window_from_streams, SimState};
use ftasep::lattice::{Configuration, Pattern, Topology};
use ftasep::limits::limit_prob;
use ftasep::measures::sector_sample;
use ftasep::rng::RngStream;
use wasm_bindgen::prelude::*;

/// Occupancies of a ring sampled at evenly spaced times, row-major.
#[wasm_bindgen]
pub struct SpaceTime {
    len: usize,
    rows: usize,
    cells: Vec<u8>,
    absorbed_at: f64,
    events: u64,
}

#[wasm_bindgen]
impl SpaceTime {
    #[wasm_bindgen(getter)]
    pub fn sites(&self) -> usize {
        self.len
    }

    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[wasm_bindgen(getter)]
    pub fn cells(&self) -> Vec<u8> {
        self.cells.clone()
    }

    /// Absorption time, `NaN` if the ring was still active at the last row.
    #[wasm_bindgen(getter)]
    pub fn absorbed_at(&self) -> f64 {
        self.absorbed_at
    }

    #[wasm_bindgen(getter)]
    pub fn events(&self) -> u64 {
        self.events
    }
}

fn space_time(len: usize, k: usize, seed: u64, rows: usize, dt: f64) -> Result<SpaceTime, String> {
    if !(3..=4096).contains(&len) || k > len || rows == 0 || dt.is_nan() || dt <= 0.0 {
        return Err("need 3 <= L <= 4096, k <= L, rows > 0, dt > 0".into());
    }
    let mut rng = RngStream::new(seed, 0);
    let initial = sector_sample(len, k, &mut rng).map_err(|e| e.to_string())?;
    let mut state = SimState::new(initial);
    let mut cells = Vec::with_capacity(len * rows);
    let mut absorbed_at = f64::NAN;
    for row in 0..rows {
        let t = row as f64 * dt;
        while state.step_until(&mut rng, t).is_some() {}
        if state.is_absorbed() && absorbed_at.is_nan() {
            absorbed_at = state.time();
        }
        cells.extend(state.config().iter());
    }
    Ok(SpaceTime {
        len,
        rows,
        cells,
        absorbed_at,
        events: state.event_count(),
    })
}

/// Runs a ring of `len` sites with `k` particles from the uniform sector law.
#[wasm_bindgen]
pub fn ring_space_time(
    len: usize,
    k: usize,
    seed: u64,
    rows: usize,
    dt: f64,
) -> Result<SpaceTime, JsError> {
    space_time(len, k, seed, rows, dt).map_err(|e| JsError::new(&e))
}

fn frozen_law_curve(word: &str, steps: usize) -> Result<Vec<f64>, String> {
    let w: Pattern = word
        .trim()
        .parse()
        .map_err(|e: ftasep::lattice::LatticeError| e.to_string())?;
    if w.len() > 20 || steps < 2 {
        return Err("words up to 20 letters, at least 2 grid points".into());
    }
    let extend = |b: u8| {
        let mut v = w.as_slice().to_vec();
        v.push(b);
        Pattern::new(v).expect("nonempty")
    };
    let mut out = Vec::with_capacity(3 * steps);
    for i in 1..=steps {
        let rho = 0.5 * i as f64 / (steps + 1) as f64;
        let p = limit_prob(rho, &w).map_err(|e| e.to_string())?;
        let right = limit_prob(rho, &extend(0)).map_err(|e| e.to_string())?
            + limit_prob(rho, &extend(1)).map_err(|e| e.to_string())?;
        out.extend([rho, p, p - right]);
    }
    Ok(out)
}

/// Frozen-law probability of `word` on a grid of densities in (0, 1/2).
/// Returns `[rho, P(word), P(word) - P(word 0) - P(word 1)]` per grid point.
#[wasm_bindgen]
pub fn limit_curve(word: &str, steps: usize) -> Result<Vec<f64>, JsError> {
    frozen_law_curve(word, steps).map_err(|e| JsError::new(&e))
}

fn origin_heights(rho: f64, seed: u64, horizon: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(rho > 0.0 && rho < 1.0) || !(horizon > 0.0 && horizon <= 5000.0) || points < 2 {
        return Err("need 0 < rho < 1, 0 < horizon <= 5000, at least 2 points".into());
    }
    let checkpoints: Vec<f64> = (0..points)
        .map(|i| horizon * i as f64 / (points - 1) as f64)
        .collect();
    // information travels at most one site per unit time on average; four
    // times the horizon on the left keeps the origin clear of the edge
    let left = (4.0 * horizon).ceil() as usize + 64;
    let right = (horizon.ceil() as usize).max(64);
    let window = window_from_streams(rho, seed, 0, left);
    let bits = &window.occupancy()[..=left + right];
    let segment = Configuration::from_bits(
        Topology::segment(bits.len()).map_err(|e| e.to_string())?,
        bits,
    )
    .map_err(|e| e.to_string())?
    .with_origin(-(left as i64));
    let heights = height_growth_probe(&segment, &mut RngStream::new(seed, 1), &checkpoints);
    Ok(checkpoints
        .iter()
        .zip(heights)
        .flat_map(|(&t, h)| [t, h as f64])
        .collect())
}

/// `h(t, 0)` from a product initial law of density `rho`, as `[t, h]` pairs.
#[wasm_bindgen]
pub fn height_at_origin(
    rho: f64,
    seed: u64,
    horizon: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    origin_heights(rho, seed, horizon, points).map_err(|e| JsError::new(&e))
}
