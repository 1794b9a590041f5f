use std::ops::{Add, Index, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Sup,
    L1,
    L2,
}

impl NormKind {
    pub fn all() -> [NormKind; 3] {
        [NormKind::Sup, NormKind::L1, NormKind::L2]
    }

    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormKind::Sup => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
            NormKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Sup => "sup",
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
        }
    }
}

/// Finite-dimensional range `ℝ^dim` with a chosen norm. The lattice order
/// is always componentwise, independent of the norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeSpace {
    pub dim: usize,
    pub norm: NormKind,
}

impl RangeSpace {
    pub fn new(dim: usize, norm: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Contract("range dimension must be at least 1".into()));
        }
        Ok(Self { dim, norm })
    }

    pub fn norm(&self, v: &RangeVector) -> f64 {
        self.norm.norm(&v.0)
    }

    pub fn zero(&self) -> RangeVector {
        RangeVector::zeros(self.dim)
    }

    pub fn distance(&self, a: &RangeVector, b: &RangeVector) -> f64 {
        match self.norm {
            NormKind::Sup => a.0.iter().zip(&b.0).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
            NormKind::L1 => a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()).sum(),
            NormKind::L2 => a
                .0
                .iter()
                .zip(&b.0)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RangeVector(pub Vec<f64>);

impl RangeVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn zip(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim(), other.dim(), "range dimension mismatch");
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| op(a, b)).collect())
    }

    fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&a| op(a)).collect())
    }

    pub fn sup(&self, other: &Self) -> Self {
        self.zip(other, f64::max)
    }

    pub fn inf(&self, other: &Self) -> Self {
        self.zip(other, f64::min)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn positive_part(&self) -> Self {
        self.map(|a| a.max(0.0))
    }

    pub fn negative_part(&self) -> Self {
        self.map(|a| (-a).max(0.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|a| c * a)
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "range dimension mismatch");
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// Largest componentwise excess `self_i − other_i` (≤ 0 iff `self ≤ other`).
    pub fn max_excess_over(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(f64::NEG_INFINITY, |m, (a, b)| m.max(a - b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for RangeVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &RangeVector {
    type Output = RangeVector;
    fn add(self, rhs: Self) -> RangeVector {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &RangeVector {
    type Output = RangeVector;
    fn sub(self, rhs: Self) -> RangeVector {
        self.zip(rhs, |a, b| a - b)
    }
}
