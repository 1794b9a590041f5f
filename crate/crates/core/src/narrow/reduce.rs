use std::sync::Arc;

use crate::compact::{c_compact_net, NetMode};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_fragments_capped, CellGrid, StepElement};
use crate::operators::{NormKind, OaMap, RangeSpace, RangeVector};
use crate::sampling;

/// `G = P ∘ T` with `P` the orthogonal projection onto the span of ε-net
/// centers of `T(𝓕ₓ)`, or `G = T` when those centers span the whole range.
pub struct FiniteRankMap<'a> {
    op: &'a dyn OaMap,
    /// Orthonormal in the Euclidean inner product; empty means `G = T`.
    basis: Vec<Vec<f64>>,
    identity: bool,
    /// `max ‖T y − G y‖` over the fragments it was checked on.
    pub max_error: f64,
    pub checked: usize,
}

impl FiniteRankMap<'_> {
    pub fn rank(&self) -> usize {
        if self.identity {
            self.op.range().dim
        } else {
            self.basis.len()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    fn project(&self, v: &RangeVector) -> RangeVector {
        if self.identity {
            return v.clone();
        }
        let mut out = vec![0.0; v.dim()];
        for b in &self.basis {
            let c: f64 = b.iter().zip(&v.0).map(|(x, y)| x * y).sum();
            out.iter_mut().zip(b).for_each(|(o, x)| *o += c * x);
        }
        RangeVector(out)
    }
}

impl OaMap for FiniteRankMap<'_> {
    fn range(&self) -> &RangeSpace {
        self.op.range()
    }

    fn input_grid(&self) -> &Arc<CellGrid> {
        self.op.input_grid()
    }

    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        Ok(self.project(&self.op.evaluate(x)?))
    }
}

struct Projectable<'a> {
    op: &'a dyn OaMap,
    euclid: RangeSpace,
}

impl OaMap for Projectable<'_> {
    fn range(&self) -> &RangeSpace {
        &self.euclid
    }
    fn input_grid(&self) -> &Arc<CellGrid> {
        self.op.input_grid()
    }
    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        self.op.evaluate(x)
    }
}

fn orthonormalize(vs: impl IntoIterator<Item = RangeVector>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let scale = v.0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut w = v.0;
        // two passes of Gram–Schmidt for numerical orthogonality
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = b.iter().zip(&w).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(o, x)| *o -= c * x);
            }
        }
        let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-10 * scale.max(f64::MIN_POSITIVE) && len > 0.0 {
            basis.push(w.into_iter().map(|x| x / len).collect());
        }
    }
    basis
}

/// Finite-rank approximation `G` of `T` on `𝓕ₓ` with `‖T y − G y‖ ≤ δ`,
/// verified on every fragment (exhaustive) or on `k` fresh samples.
pub fn finite_rank_reduce<'a>(
    op: &'a dyn OaMap,
    x: &StepElement,
    delta: f64,
    mode: NetMode,
) -> Result<FiniteRankMap<'a>> {
    if !(delta > 0.0) {
        return Err(Error::Contract(format!("delta must be positive, got {delta}")));
    }
    let range = *op.range();
    // an l2 net at radius r controls sup and l2 errors by r and l1 by √d·r
    let radius = match range.norm {
        NormKind::L1 => delta / (range.dim as f64).sqrt(),
        NormKind::Sup | NormKind::L2 => delta,
    };
    let euclid = Projectable {
        op,
        euclid: RangeSpace::new(range.dim, NormKind::L2)?,
    };
    let net = c_compact_net(&euclid, x, radius, mode)?;
    let mut g = FiniteRankMap {
        op,
        basis: Vec::new(),
        identity: net.size() >= range.dim,
        max_error: 0.0,
        checked: 0,
    };
    if !g.identity {
        g.basis = orthonormalize(net.centers.into_iter().map(|(_, v)| v));
        g.identity = g.basis.len() >= range.dim;
    }
    let masks: Vec<_> = match mode {
        NetMode::Exhaustive => enumerate_fragments_capped(x, 20)?.map(|f| f.into_mask()).collect(),
        NetMode::Sampled { k, seed } => {
            let support = x.support();
            let mut rng = sampling::substream(seed, 2);
            (0..k).map(|_| sampling::random_submask(&support, &mut rng)).collect()
        }
    };
    for m in &masks {
        let y = x.restrict(m);
        let t = op.evaluate(&y)?;
        g.max_error = g.max_error.max(range.distance(&t, &g.project(&t)));
    }
    g.checked = masks.len();
    if g.max_error > delta * (1.0 + 1e-9) {
        return Err(Error::BoundViolated {
            residual: g.max_error,
            bound: delta,
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::CellGrid;
    use crate::operators::{OperatorSpec, Poly2, UrysohnKernel};

    #[test]
    fn scalar_range_is_unchanged() {
        let g = Arc::new(CellGrid::unit(6));
        let t = OperatorSpec::norm_functional().instantiate(g.clone()).unwrap();
        let x = StepElement::constant(g, 1.0).unwrap();
        let r = finite_rank_reduce(&t, &x, 0.5, NetMode::Exhaustive).unwrap();
        assert!(r.is_identity());
        assert_eq!(r.max_error, 0.0);
    }

    #[test]
    fn wide_urysohn_output() {
        let g = Arc::new(CellGrid::unit(16));
        let k = UrysohnKernel::linear(Poly2::one_plus_st());
        let t = OperatorSpec::urysohn(k, 64, NormKind::Sup)
            .instantiate(g.clone())
            .unwrap();
        let x = StepElement::constant(g, 1.0).unwrap();
        let r = finite_rank_reduce(&t, &x, 0.1, NetMode::Sampled { k: 512, seed: 0 }).unwrap();
        assert!(!r.is_identity());
        assert!(r.rank() < 64);
        assert!(r.max_error <= 0.1);
        assert_eq!(r.checked, 512);
    }
}
