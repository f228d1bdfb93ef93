//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use ilw_core::resonance::sweep::{rng, uniform_in_band};
use ilw_core::{DepthParameter, FrequencyTriple, RealGrid, SpectralField};

pub fn gaussian(modes: usize) -> SpectralField {
    let grid = RealGrid::new(40.0 * PI, modes).expect("valid grid");
    SpectralField::from_fn(grid, |x| (-x * x).exp())
}

/// Seeded in-band triples at depth `delta`.
pub fn triples(delta: f64, count: usize, seed: u64) -> Vec<FrequencyTriple> {
    let cutoff = DepthParameter::new(delta).expect("valid depth").cutoff();
    let mut r = rng(seed);
    (0..count).map(|_| uniform_in_band(&mut r, cutoff)).collect()
}
