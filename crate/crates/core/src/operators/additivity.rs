use serde::Serialize;

use super::operator::OaMap;
use crate::error::Result;
use crate::sampling;

pub const ADDITIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditivityReport {
    pub trials: usize,
    /// Largest `‖T(x) − T(x·1_D) − T(x·1_Dᶜ)‖ / (1 + ‖T(x)‖)` seen.
    pub max_violation: f64,
    pub worst_trial: Option<usize>,
    pub passed: bool,
}

/// Randomized check of `T(x) = T(x·1_D) + T(x·1_Dᶜ)` on `trials` pairs.
pub fn check_orthogonal_additivity(
    op: &dyn OaMap,
    trials: usize,
    seed: u64,
) -> Result<AdditivityReport> {
    let grid = op.input_grid().clone();
    let range = *op.range();
    let mut rng = sampling::rng(seed);
    let mut max_violation = 0.0f64;
    let mut worst_trial = None;
    for trial in 0..trials {
        let x = sampling::random_element(&grid, &mut rng, 2.0, 0.2);
        let d = sampling::random_mask(grid.n_cells(), &mut rng);
        let whole = op.evaluate(&x)?;
        let inside = op.evaluate(&x.restrict(&d))?;
        let outside = op.evaluate(&x.restrict(&x.support().difference(&d)))?;
        let gap = &(&whole - &inside) - &outside;
        let violation = range.norm(&gap) / (1.0 + range.norm(&whole));
        if worst_trial.is_none() || violation > max_violation {
            max_violation = violation;
            worst_trial = Some(trial);
        }
    }
    Ok(AdditivityReport {
        trials,
        max_violation,
        worst_trial,
        passed: max_violation <= ADDITIVITY_TOL,
    })
}
