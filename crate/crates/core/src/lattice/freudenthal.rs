//! Monotone `v`-step approximation of elements of the principal ideal `I_v`.

use super::element::StepElement;
use super::mask::CellMask;
use crate::error::{Error, Result};

/// `s = Σ λ_i · v · 1_{D_i}` with the pieces `D_i` pairwise disjoint and
/// covering the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StepApprox {
    pub s: StepElement,
    pub levels: Vec<(f64, CellMask)>,
}

/// Largest `k/m` (over `1 ≤ m ≤ n`, `k = ⌊m·r⌋`) with `(k/m)·v ≤ u` in
/// floating point. Taking the maximum over all `m ≤ n` keeps the level
/// nondecreasing in `n`; the `m = n` term alone gives `u − s ≤ v/n`.
fn level(u: f64, v: f64, n: u32) -> f64 {
    let r = u / v;
    let mut best = f64::NEG_INFINITY;
    for m in 1..=n {
        let mf = m as f64;
        let mut k = (mf * r).floor();
        while (k / mf) * v > u {
            k -= 1.0;
        }
        best = best.max(k / mf);
    }
    best
}

pub fn freudenthal_approx(v: &StepElement, u: &StepElement, n: u32) -> Result<StepApprox> {
    u.check_same_grid(v)?;
    if n == 0 {
        return Err(Error::Contract("approximation index n must be at least 1".into()));
    }
    if !v.is_nonnegative() {
        return Err(Error::Contract("v must be nonnegative".into()));
    }
    let cells = v.n_cells();
    let mut lambdas = Vec::with_capacity(cells);
    for j in 0..cells {
        let (uj, vj) = (u.value(j), v.value(j));
        if vj == 0.0 {
            if uj != 0.0 {
                return Err(Error::Contract(format!(
                    "u is outside the ideal of v: u = {uj} at cell {j} where v = 0"
                )));
            }
            lambdas.push(0.0);
        } else {
            lambdas.push(level(uj, vj, n));
        }
    }

    let mut levels: Vec<(f64, CellMask)> = Vec::new();
    for (j, &lam) in lambdas.iter().enumerate() {
        match levels.iter_mut().find(|(l, _)| *l == lam) {
            Some((_, m)) => m.insert(j),
            None => levels.push((lam, CellMask::from_cells(cells, [j]))),
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));

    let values = (0..cells).map(|j| lambdas[j] * v.value(j)).collect();
    Ok(StepApprox {
        s: StepElement::new(v.grid().clone(), values)?,
        levels,
    })
}
