use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MEASURE_TOL: f64 = 1e-12;

/// Weighted partition of a base interval into cells; the discrete measure
/// space underneath every lattice element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct CellGrid {
    weights: Vec<f64>,
    base: (f64, f64),
    centers: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interval: Option<(f64, f64)>,
}

impl TryFrom<GridRepr> for CellGrid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        match r.interval {
            Some((a, b)) => CellGrid::new(r.weights, a, b),
            None => {
                let total: f64 = r.weights.iter().sum();
                CellGrid::new(r.weights, 0.0, total)
            }
        }
    }
}

impl From<CellGrid> for GridRepr {
    fn from(g: CellGrid) -> Self {
        GridRepr {
            weights: g.weights,
            interval: Some(g.base),
        }
    }
}

impl CellGrid {
    pub fn new(weights: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least one cell".into()));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidGrid(format!("bad base interval ({a}, {b})")));
        }
        if let Some((j, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidGrid(format!("cell {j} has weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - (b - a)).abs() > MEASURE_TOL {
            return Err(Error::InvalidGrid(format!(
                "weights sum to {total}, interval length is {}",
                b - a
            )));
        }
        let mut centers = Vec::with_capacity(weights.len());
        let mut left = a;
        for w in &weights {
            centers.push(left + 0.5 * w);
            left += w;
        }
        Ok(Self {
            weights,
            base: (a, b),
            centers,
        })
    }

    /// `n` equal cells on `[a, b]`.
    pub fn uniform(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("a grid needs at least one cell".into()));
        }
        let w = (b - a) / n as f64;
        let mut g = Self::new(vec![w; n], a, b)?;
        // Exact midpoints, free of the running-sum drift in `new`.
        for (j, c) in g.centers.iter_mut().enumerate() {
            *c = a + (j as f64 + 0.5) * w;
        }
        Ok(g)
    }

    pub fn unit(n: usize) -> Self {
        Self::uniform(n, 0.0, 1.0).expect("n >= 1")
    }

    /// Halves every cell.
    pub fn refine(&self) -> Self {
        let weights = self
            .weights
            .iter()
            .flat_map(|w| [0.5 * w, 0.5 * w])
            .collect();
        Self::new(weights, self.base.0, self.base.1).expect("halving preserves validity")
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    #[inline]
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        self.centers[j]
    }

    pub fn base_interval(&self) -> (f64, f64) {
        self.base
    }
}
