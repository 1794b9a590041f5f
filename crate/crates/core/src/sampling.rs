//! Seeded random instances shared by the diagnostics, the experiment
//! harness and the test suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{CellGrid, CellMask, StepElement};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `k` derived from a master seed.
pub fn substream(seed: u64, k: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k + 1);
    r
}

/// Values uniform in `[-scale, scale]`, each cell zero with probability `zero_prob`.
pub fn random_element(
    grid: &Arc<CellGrid>,
    rng: &mut impl Rng,
    scale: f64,
    zero_prob: f64,
) -> StepElement {
    let values = (0..grid.n_cells())
        .map(|_| {
            if rng.gen_bool(zero_prob) {
                0.0
            } else {
                rng.gen_range(-scale..=scale)
            }
        })
        .collect();
    StepElement::new(grid.clone(), values).expect("finite values")
}

pub fn random_nonnegative_element(grid: &Arc<CellGrid>, rng: &mut impl Rng, scale: f64) -> StepElement {
    let values = (0..grid.n_cells()).map(|_| rng.gen_range(0.0..=scale)).collect();
    StepElement::new(grid.clone(), values).expect("finite values")
}

/// Uniform random subset of the `n` cells.
pub fn random_mask(n: usize, rng: &mut impl Rng) -> CellMask {
    CellMask::from_cells(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

/// Uniform random subset of `support`.
pub fn random_submask(support: &CellMask, rng: &mut impl Rng) -> CellMask {
    CellMask::from_cells(support.len(), support.ones().filter(|_| rng.gen_bool(0.5)))
}

/// Random grid with `n` cells of unequal positive widths on `[0, 1]`.
pub fn random_grid(n: usize, rng: &mut impl Rng) -> CellGrid {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|r| r / total).collect();
    // Put the rounding slack on the last cell so the weights sum to 1.
    let head: f64 = w[..n - 1].iter().sum();
    w[n - 1] = 1.0 - head;
    CellGrid::new(w, 0.0, 1.0).expect("positive weights summing to one")
}

/// Random partition of the cells of `support` into nonempty blocks.
pub fn random_partition(support: &CellMask, rng: &mut impl Rng) -> Vec<CellMask> {
    let cells: Vec<usize> = support.ones().collect();
    if cells.is_empty() {
        return Vec::new();
    }
    let blocks = rng.gen_range(1..=cells.len());
    let mut parts = vec![CellMask::empty(support.len()); blocks];
    for &c in &cells {
        parts[rng.gen_range(0..blocks)].insert(c);
    }
    parts.retain(|p| !p.is_empty());
    parts
}
