use crate::error::{Error, Result};
use crate::lattice::{CellMask, StepElement};
use crate::operators::OaMap;

/// Norms of the single-cell images `‖T(x·1_c)‖` over the support of `x`.
pub(crate) fn cell_norms(op: &dyn OaMap, x: &StepElement) -> Result<Vec<(usize, f64)>> {
    x.support_cells()
        .into_iter()
        .map(|c| Ok((c, op.norm_of(&x.cell_part(c))?)))
        .collect()
}

/// `x = y ⊔ z` with `z` the support cell of smallest image norm, which
/// must be below `epsilon`.
pub fn extract_small_fragment(
    op: &dyn OaMap,
    x: &StepElement,
    epsilon: f64,
) -> Result<(CellMask, CellMask)> {
    op.check_input(x)?;
    if x.is_zero() {
        return Err(Error::Contract("x must be nonzero".into()));
    }
    let norms = cell_norms(op, x)?;
    let (cell, min_norm) = norms
        .iter()
        .copied()
        .fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if !(min_norm < epsilon) {
        return Err(Error::GridTooCoarse {
            cell,
            min_norm,
            threshold: epsilon,
        });
    }
    let z = CellMask::from_cells(x.n_cells(), [cell]);
    let y = x.support().difference(&z);
    Ok((y, z))
}

/// Disjoint decomposition of `x` into parts with `‖T x_i‖ ≤ ε`, packing
/// support cells in order and closing a part as soon as the next cell
/// would push it over `ε`.
pub fn epsilon_partition(op: &dyn OaMap, x: &StepElement, epsilon: f64) -> Result<Vec<CellMask>> {
    op.check_input(x)?;
    if let Some(&(cell, norm)) = cell_norms(op, x)?.iter().find(|(_, v)| !(*v < epsilon)) {
        return Err(Error::GridTooCoarse {
            cell,
            min_norm: norm,
            threshold: epsilon,
        });
    }
    let n = x.n_cells();
    let mut parts = Vec::new();
    let mut current = CellMask::empty(n);
    for c in x.support_cells() {
        let mut grown = current.clone();
        grown.insert(c);
        if current.is_empty() || op.norm_of(&x.restrict(&grown))? <= epsilon {
            current = grown;
        } else {
            parts.push(std::mem::replace(&mut current, CellMask::from_cells(n, [c])));
        }
    }
    if !current.is_empty() {
        parts.push(current);
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lattice::{check_decomposition, CellGrid};
    use crate::operators::{NemytskiiFunction, NormKind, OperatorSpec};

    fn norm_functional(n: usize) -> (crate::operators::OaOperator, StepElement) {
        let g = Arc::new(CellGrid::unit(n));
        let t = OperatorSpec::norm_functional().instantiate(g.clone()).unwrap();
        (t, StepElement::constant(g, 1.0).unwrap())
    }

    #[test]
    fn small_fragment_of_constant() {
        let (t, x) = norm_functional(8);
        let (y, z) = extract_small_fragment(&t, &x, 0.2).unwrap();
        assert_eq!(z.count(), 1);
        assert_eq!(y.count(), 7);
        assert_eq!(t.evaluate(&x.restrict(&z)).unwrap().0, vec![0.125]);
        let (y, _) = extract_small_fragment(&t, &x, 10.0).unwrap();
        assert!(!y.is_empty());
    }

    #[test]
    fn atom_is_too_coarse() {
        let (t, x) = norm_functional(1);
        assert!(matches!(
            extract_small_fragment(&t, &x, 0.5),
            Err(Error::GridTooCoarse { cell: 0, .. })
        ));
    }

    #[test]
    fn packing_trace() {
        let (t, x) = norm_functional(8);
        let parts = epsilon_partition(&t, &x, 0.25).unwrap();
        assert_eq!(parts.len(), 4);
        for p in &parts {
            assert_eq!(p.count(), 2);
            assert_eq!(t.evaluate(&x.restrict(p)).unwrap().0, vec![0.25]);
        }
        assert_eq!(epsilon_partition(&t, &x, 1.5).unwrap(), vec![x.support()]);
    }

    #[test]
    fn square_superposition_parts() {
        let g = Arc::new(CellGrid::unit(10));
        let t = OperatorSpec::nemytskii(NemytskiiFunction::square(), NormKind::L1)
            .instantiate(g.clone())
            .unwrap();
        let x = StepElement::constant(g, 1.0).unwrap();
        let parts = epsilon_partition(&t, &x, 3.5).unwrap();
        check_decomposition(&x, &parts).unwrap();
        assert_eq!(parts.len(), 4);
        for p in &parts {
            assert!(t.norm_of(&x.restrict(p)).unwrap() <= 3.5);
        }
        assert!(epsilon_partition(&t, &x, 1.0).is_err());
    }
}
