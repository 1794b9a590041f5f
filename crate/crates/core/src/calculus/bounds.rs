use serde::Serialize;

use super::rk::{rk_partition, RkMode};
use crate::error::Result;
use crate::lattice::StepElement;
use crate::operators::{check_signature, Difference, OaMap};

pub const FRAGMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsBoundReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest componentwise `|Tx|_i − |T|(x)_i` seen (≤ 0 when the bound holds).
    pub max_excess: f64,
}

impl AbsBoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `|Tx| ≤ |T|(x)` componentwise, up to `1e-9`, on every sample.
pub fn operator_abs_bound_check(t: &dyn OaMap, samples: &[StepElement]) -> Result<AbsBoundReport> {
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for x in samples {
        let lhs = t.evaluate(x)?.abs();
        let rhs = rk_partition(t, t, x, RkMode::Abs)?;
        let excess = lhs.max_excess_over(&rhs);
        if excess > 1e-9 {
            violations += 1;
        }
        max_excess = max_excess.max(excess);
    }
    Ok(AbsBoundReport {
        samples: samples.len(),
        violations,
        max_excess: if samples.is_empty() { 0.0 } else { max_excess },
    })
}

/// Whether `|S| ∧ |T − S|` vanishes (up to [`FRAGMENT_TOL`]) on every sample,
/// evaluated at the finest partition: `Σ_c |S x_c| ∧ |(T − S) x_c|`.
pub fn is_operator_fragment(s: &dyn OaMap, t: &dyn OaMap, samples: &[StepElement]) -> Result<bool> {
    check_signature(s, t)?;
    let rest = Difference::new(t, s)?;
    for x in samples {
        s.check_input(x)?;
        let mut acc = s.range().zero();
        for c in x.support_cells() {
            let y = x.cell_part(c);
            let a = s.evaluate(&y)?.abs();
            let b = rest.evaluate(&y)?.abs();
            acc.add_assign(&a.inf(&b));
        }
        if acc.0.iter().any(|&v| v > FRAGMENT_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}
