use serde::{Deserialize, Serialize};

use super::partition::{cell_norms, epsilon_partition};
use super::rounding::{round_weights, RoundingProblem, RoundingStrategy, BRUTE_CAP};
use crate::error::{Error, Result};
use crate::lattice::{CellMask, StepElement};
use crate::operators::OaMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SplitOptions {
    /// `None` picks brute force up to `BRUTE_CAP` parts, greedy beyond.
    pub strategy: Option<RoundingStrategy>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NarrowSplit {
    pub x1: CellMask,
    pub x2: CellMask,
    /// `‖T x₁ − T x₂‖`
    pub defect: f64,
    pub parts: usize,
    pub threshold: f64,
    pub strategy: RoundingStrategy,
}

/// Complementary fragments `x = x₁ ⊔ x₂` with `‖T x₁ − T x₂‖ < ε`:
/// partition `x` into pieces with images of norm at most `ε / dim`, round
/// the weights `λ_i = 1/2` over those images, and collect the pieces with
/// `θ_i = 1` into `x₁`.
pub fn narrow_split(
    op: &dyn OaMap,
    x: &StepElement,
    epsilon: f64,
    opts: SplitOptions,
) -> Result<NarrowSplit> {
    op.check_input(x)?;
    if !(epsilon > 0.0) {
        return Err(Error::Contract(format!("epsilon must be positive, got {epsilon}")));
    }
    let range = op.range();
    let threshold = epsilon / range.dim as f64;
    let parts = epsilon_partition(op, x, threshold)?;
    let vectors = parts
        .iter()
        .map(|p| op.evaluate(&x.restrict(p)))
        .collect::<Result<Vec<_>>>()?;
    let strategy = opts.strategy.unwrap_or(if parts.len() <= BRUTE_CAP {
        RoundingStrategy::Brute
    } else {
        RoundingStrategy::GreedyNullspace
    });
    let problem = RoundingProblem::new(vectors, vec![0.5; parts.len()], range.norm)?;
    let rounded = round_weights(&problem, strategy, opts.seed)?;
    let n = x.n_cells();
    let mut x1 = CellMask::empty(n);
    let mut x2 = CellMask::empty(n);
    for (p, &t) in parts.iter().zip(&rounded.theta) {
        if t {
            x1 = x1.union(p);
        } else {
            x2 = x2.union(p);
        }
    }
    let defect = range.distance(&op.evaluate(&x.restrict(&x1))?, &op.evaluate(&x.restrict(&x2))?);
    if !(defect < epsilon) {
        let (cell, min_norm) = cell_norms(op, x)?
            .into_iter()
            .fold((usize::MAX, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        return Err(Error::GridTooCoarse {
            cell,
            min_norm,
            threshold,
        });
    }
    Ok(NarrowSplit {
        x1,
        x2,
        defect,
        parts: parts.len(),
        threshold,
        strategy,
    })
}

/// Smallest `ε` at which every single-cell image is below `ε / dim`,
/// inflated by the relative margin `slack`. At this resolution the
/// pipeline keeps one cell per part wherever the images are near their
/// maximum.
pub fn resolution_epsilon(op: &dyn OaMap, x: &StepElement, slack: f64) -> Result<f64> {
    let max = cell_norms(op, x)?.into_iter().map(|(_, v)| v).fold(0.0, f64::max);
    Ok(max * op.range().dim as f64 * (1.0 + slack))
}
