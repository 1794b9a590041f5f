use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::CellGrid;
use super::mask::CellMask;
use crate::error::{Error, Result};

/// A step function on a [`CellGrid`]: one real value per cell.
#[derive(Debug, Clone)]
pub struct StepElement {
    grid: Arc<CellGrid>,
    values: Vec<f64>,
}

impl PartialEq for StepElement {
    fn eq(&self, other: &Self) -> bool {
        same_grid(&self.grid, &other.grid) && self.values == other.values
    }
}

pub(crate) fn same_grid(a: &Arc<CellGrid>, b: &Arc<CellGrid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// JSON literal `{"weights": [...], "values": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementLiteral {
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
}

impl StepElement {
    pub fn new(grid: Arc<CellGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidElement(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidElement(format!(
                "value at cell {j} is not finite"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zero(grid: Arc<CellGrid>) -> Self {
        let n = grid.n_cells();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn constant(grid: Arc<CellGrid>, c: f64) -> Result<Self> {
        let n = grid.n_cells();
        Self::new(grid, vec![c; n])
    }

    pub fn from_fn(grid: Arc<CellGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.centers().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn from_literal(lit: &ElementLiteral) -> Result<Self> {
        let grid = match lit.interval {
            Some((a, b)) => CellGrid::new(lit.weights.clone(), a, b)?,
            None => {
                let total: f64 = lit.weights.iter().sum();
                CellGrid::new(lit.weights.clone(), 0.0, total)?
            }
        };
        Self::new(Arc::new(grid), lit.values.clone())
    }

    pub fn to_literal(&self) -> ElementLiteral {
        ElementLiteral {
            weights: self.grid.weights().to_vec(),
            values: self.values.clone(),
            interval: Some(self.grid.base_interval()),
        }
    }

    pub fn grid(&self) -> &Arc<CellGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn n_cells(&self) -> usize {
        self.values.len()
    }

    pub fn support(&self) -> CellMask {
        CellMask::from_cells(
            self.n_cells(),
            self.values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, _)| j),
        )
    }

    pub fn support_cells(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if same_grid(&self.grid, &other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `x · 1_D`
    pub fn restrict(&self, mask: &CellMask) -> Self {
        assert_eq!(mask.len(), self.n_cells(), "mask length mismatch");
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| if mask.contains(j) { v } else { 0.0 })
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// `x · 1_{cell}`
    pub fn cell_part(&self, j: usize) -> Self {
        let mut values = vec![0.0; self.n_cells()];
        values[j] = self.values[j];
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| op(v)).collect(),
        }
    }

    pub fn sup(&self, other: &Self) -> Result<Self> {
        self.zip(other, f64::max)
    }

    pub fn inf(&self, other: &Self) -> Result<Self> {
        self.zip(other, f64::min)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|v| c * v).collect())
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn positive_part(&self) -> Self {
        self.map(|v| v.max(0.0))
    }

    pub fn negative_part(&self) -> Self {
        self.map(|v| (-v).max(0.0))
    }

    /// `|x| ∧ |y| = 0`
    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a.abs().min(b.abs()) == 0.0))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// `x ≤ y` componentwise.
    pub fn le(&self, other: &Self) -> Result<bool> {
        self.check_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }

    /// Measure of the support.
    pub fn support_measure(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, _)| self.grid.weight(j))
            .sum()
    }

    /// Splits every cell in two, keeping the value on both halves.
    pub fn refine(&self) -> Self {
        Self {
            grid: Arc::new(self.grid.refine()),
            values: self.values.iter().flat_map(|&v| [v, v]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOps {
    pub sup: StepElement,
    pub inf: StepElement,
    pub abs_x: StepElement,
    pub abs_y: StepElement,
    pub sum: StepElement,
    pub is_disjoint: bool,
}

pub fn lattice_ops(x: &StepElement, y: &StepElement) -> Result<LatticeOps> {
    Ok(LatticeOps {
        sup: x.sup(y)?,
        inf: x.inf(y)?,
        abs_x: x.abs(),
        abs_y: y.abs(),
        sum: x.add(y)?,
        is_disjoint: x.is_disjoint(y)?,
    })
}

/// `y ⊑ x`: on every cell `y_j ∈ {0, x_j}`.
pub fn is_fragment(y: &StepElement, x: &StepElement) -> Result<bool> {
    y.check_same_grid(x)?;
    Ok(y
        .values
        .iter()
        .zip(&x.values)
        .all(|(&yj, &xj)| yj == 0.0 || yj == xj))
}

/// The same relation tested through the definition `y ⊥ (x − y)`.
pub fn is_fragment_by_disjointness(y: &StepElement, x: &StepElement) -> Result<bool> {
    let rest = x.sub(y)?;
    y.is_disjoint(&rest)
}
