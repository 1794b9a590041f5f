use rand::Rng;
use serde::{Deserialize, Serialize};

use super::net::{c_compact_net, cover_points, NetMode};
use crate::calculus::is_operator_fragment;
use crate::error::{Error, Result};
use crate::lattice::{CellMask, StepElement};
use crate::operators::{check_signature, OaMap, RangeVector};
use crate::sampling;

/// Image norms above this count as divergence.
pub const UNBOUNDED_THRESHOLD: f64 = 1e6;

const APPROACH_STEPS: i32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmProbeReport {
    pub samples: usize,
    pub max_norm: f64,
    pub diameter: f64,
    pub net_size: usize,
    /// `‖T(lower + 2^{-j}(upper − lower))‖` for `j = 0, 1, ...`.
    pub approach_norms: Vec<f64>,
    pub unbounded: bool,
}

/// Samples the order interval `[lower, upper]`: `k` uniform points plus
/// the dyadic approach sequence towards `lower`.
pub fn am_compact_probe(
    op: &dyn OaMap,
    lower: &StepElement,
    upper: &StepElement,
    epsilon: f64,
    k: usize,
    seed: u64,
) -> Result<AmProbeReport> {
    op.check_input(lower)?;
    op.check_input(upper)?;
    if !lower.le(upper)? {
        return Err(Error::Contract("order interval needs lower ≤ upper".into()));
    }
    let grid = lower.grid().clone();
    let gap = upper.sub(lower)?;
    let mut rng = sampling::rng(seed);
    let mut images: Vec<RangeVector> = Vec::with_capacity(k + APPROACH_STEPS as usize + 1);
    for _ in 0..k {
        let vals = lower
            .values()
            .iter()
            .zip(gap.values())
            .map(|(&l, &d)| l + rng.gen::<f64>() * d)
            .collect();
        images.push(op.evaluate(&StepElement::new(grid.clone(), vals)?)?);
    }
    let mut approach_norms = Vec::new();
    for j in 0..=APPROACH_STEPS {
        let y = lower.add(&gap.scale(2f64.powi(-j))?)?;
        match op.evaluate(&y) {
            Ok(v) => {
                approach_norms.push(op.range().norm(&v));
                images.push(v);
            }
            Err(Error::Numeric(_)) => {
                approach_norms.push(f64::INFINITY);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let range = op.range();
    let max_norm = approach_norms
        .iter()
        .copied()
        .chain(images.iter().map(|v| range.norm(v)))
        .fold(0.0, f64::max);
    let mut diameter = 0.0f64;
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            diameter = diameter.max(range.distance(a, b));
        }
    }
    let net_size = cover_points(range, &images, epsilon).len();
    Ok(AmProbeReport {
        samples: images.len(),
        max_norm,
        diameter,
        net_size,
        approach_norms,
        unbounded: max_norm > UNBOUNDED_THRESHOLD,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chain", rename_all = "lowercase")]
pub enum ChainBuilder {
    /// `y_n` keeps the first `⌈|support(x)| / 2ⁿ⌉` support cells.
    Halving,
    /// Explicit masks, which must be nested and inside `support(x)`.
    Custom { masks: Vec<CellMask> },
}

impl ChainBuilder {
    fn build(&self, x: &StepElement, steps: usize) -> Result<Vec<CellMask>> {
        let support = x.support();
        let masks = match self {
            ChainBuilder::Halving => {
                let cells = x.support_cells();
                (0..steps)
                    .map(|n| {
                        let keep = if n >= usize::BITS as usize {
                            cells.len().min(1)
                        } else {
                            cells.len().div_ceil(1 << n)
                        };
                        CellMask::from_cells(x.n_cells(), cells[..keep].iter().copied())
                    })
                    .collect()
            }
            ChainBuilder::Custom { masks } => masks.iter().take(steps).cloned().collect::<Vec<_>>(),
        };
        for (i, m) in masks.iter().enumerate() {
            if m.len() != x.n_cells() || !m.is_subset(&support) {
                return Err(Error::Contract(format!("chain step {i} leaves support(x)")));
            }
            if i > 0 && !m.is_subset(&masks[i - 1]) {
                return Err(Error::Contract(format!("chain is not nested at step {i}")));
            }
        }
        Ok(masks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LateralReport {
    pub measures: Vec<f64>,
    pub norms: Vec<f64>,
    pub delta: f64,
    /// First step from which every later norm is below `delta`.
    pub first_below: Option<usize>,
}

impl LateralReport {
    pub fn vanished(&self) -> bool {
        self.first_below.is_some()
    }
}

/// Decay of `‖T(x·1_{y_n})‖` along a nested chain of fragments of `x`.
pub fn lateral_vanishing_check(
    op: &dyn OaMap,
    x: &StepElement,
    chain: &ChainBuilder,
    steps: usize,
    delta: f64,
) -> Result<LateralReport> {
    op.check_input(x)?;
    let masks = chain.build(x, steps)?;
    let mut measures = Vec::with_capacity(masks.len());
    let mut norms = Vec::with_capacity(masks.len());
    for m in &masks {
        let y = x.restrict(m);
        measures.push(y.support_measure());
        norms.push(op.norm_of(&y)?);
    }
    let tail = norms.iter().rev().take_while(|&&v| v < delta).count();
    let first_below = (tail > 0).then(|| norms.len() - tail);
    Ok(LateralReport {
        measures,
        norms,
        delta,
        first_below,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandProbeReport {
    pub epsilon: f64,
    pub t_net_size: usize,
    pub s_net_size: usize,
    pub t_covered_fraction: f64,
    pub s_covered_fraction: f64,
}

impl BandProbeReport {
    pub fn finite(&self) -> bool {
        self.t_net_size > 0 && self.s_net_size > 0
    }
}

/// ε-nets of `T(𝓕ₓ)` and `S(𝓕ₓ)` for an operator fragment `S` of `T`.
pub fn fragment_band_probe(
    t: &dyn OaMap,
    s: &dyn OaMap,
    x: &StepElement,
    epsilon: f64,
) -> Result<BandProbeReport> {
    check_signature(t, s)?;
    // Every fragment of x is a union of its cells, so the cell-level check
    // at x covers the whole fragment family.
    if !is_operator_fragment(s, t, std::slice::from_ref(x))? {
        return Err(Error::Contract("S is not an operator fragment of T at x".into()));
    }
    let tn = c_compact_net(t, x, epsilon, NetMode::Exhaustive)?;
    let sn = c_compact_net(s, x, epsilon, NetMode::Exhaustive)?;
    Ok(BandProbeReport {
        epsilon,
        t_net_size: tn.size(),
        s_net_size: sn.size(),
        t_covered_fraction: tn.covered_fraction,
        s_covered_fraction: sn.covered_fraction,
    })
}
