use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{NormKind, RangeVector};
use crate::sampling;

pub const BRUTE_CAP: usize = 22;

const SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingStrategy {
    Brute,
    GreedyNullspace,
}

impl RoundingStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            RoundingStrategy::Brute => "brute",
            RoundingStrategy::GreedyNullspace => "greedy_nullspace",
        }
    }
}

/// Round `λ ∈ [0, 1]^n` to `θ ∈ {0, 1}^n` keeping `Σ (λ_i − θ_i) v_i` small.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingProblem {
    pub vectors: Vec<RangeVector>,
    pub weights: Vec<f64>,
    pub norm: NormKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingResult {
    pub theta: Vec<bool>,
    pub residual: f64,
}

impl RoundingProblem {
    pub fn new(vectors: Vec<RangeVector>, weights: Vec<f64>, norm: NormKind) -> Result<Self> {
        if vectors.len() != weights.len() {
            return Err(Error::Contract(format!(
                "{} vectors but {} weights",
                vectors.len(),
                weights.len()
            )));
        }
        if let Some(v) = vectors.first() {
            if v.dim() == 0 || vectors.iter().any(|w| w.dim() != v.dim()) {
                return Err(Error::Contract("vectors must share a positive dimension".into()));
            }
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract("vectors must be finite".into()));
        }
        if weights.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::Contract("weights must lie in [0, 1]".into()));
        }
        Ok(Self {
            vectors,
            weights,
            norm,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(1, RangeVector::dim)
    }

    /// `(dim / 2) · max_i ‖v_i‖`
    pub fn bound(&self) -> f64 {
        let max = self
            .vectors
            .iter()
            .map(|v| self.norm.norm(&v.0))
            .fold(0.0, f64::max);
        self.dim() as f64 / 2.0 * max
    }

    /// `‖Σ (λ_i − θ_i) v_i‖`, summed directly.
    pub fn residual(&self, theta: &[bool]) -> f64 {
        let mut acc = vec![0.0; self.dim()];
        for ((v, &l), &t) in self.vectors.iter().zip(&self.weights).zip(theta) {
            let c = l - if t { 1.0 } else { 0.0 };
            if c != 0.0 {
                for (a, x) in acc.iter_mut().zip(&v.0) {
                    *a += c * x;
                }
            }
        }
        self.norm.norm(&acc)
    }
}

pub fn round_weights(p: &RoundingProblem, strategy: RoundingStrategy, seed: u64) -> Result<RoundingResult> {
    let theta = if p.weights.iter().all(|&l| l == 0.0 || l == 1.0) {
        p.weights.iter().map(|&l| l == 1.0).collect()
    } else {
        match strategy {
            RoundingStrategy::Brute => {
                if p.len() > BRUTE_CAP {
                    return Err(Error::SupportTooLarge {
                        support: p.len(),
                        cap: BRUTE_CAP,
                    });
                }
                let all: Vec<usize> = (0..p.len()).collect();
                let fixed = vec![false; p.len()];
                brute_over(p, &all, &fixed)
            }
            RoundingStrategy::GreedyNullspace => greedy(p, seed),
        }
    };
    let residual = p.residual(&theta);
    let bound = p.bound();
    if residual > bound * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::BoundViolated { residual, bound });
    }
    Ok(RoundingResult { theta, residual })
}

/// Minimizes over the `2^|free|` choices for the `free` positions, the
/// others taken from `fixed`. Ties go to the smallest bit pattern.
fn brute_over(p: &RoundingProblem, free: &[usize], fixed: &[bool]) -> Vec<bool> {
    let dim = p.dim();
    let k = free.len();
    // residual with every free θ set to 0
    let mut base = vec![0.0; dim];
    for (i, v) in p.vectors.iter().enumerate() {
        let t = if free.contains(&i) { 0.0 } else if fixed[i] { 1.0 } else { 0.0 };
        let c = p.weights[i] - t;
        for (a, x) in base.iter_mut().zip(&v.0) {
            *a += c * x;
        }
    }
    let top = k.min(6);
    let low = k - top;
    let best = (0u64..1 << top)
        .into_par_iter()
        .map(|hi| {
            let mut r = base.clone();
            for b in 0..top {
                if hi >> b & 1 == 1 {
                    sub(&mut r, &p.vectors[free[low + b]].0);
                }
            }
            let prefix = hi << low;
            let mut best = (p.norm.norm(&r), prefix);
            let mut gray = 0u64;
            for step in 1u64..1 << low {
                let bit = step.trailing_zeros() as usize;
                let v = &p.vectors[free[bit]].0;
                if gray >> bit & 1 == 1 {
                    add(&mut r, v);
                } else {
                    sub(&mut r, v);
                }
                gray ^= 1 << bit;
                let cand = (p.norm.norm(&r), prefix | gray);
                if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                    best = cand;
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let mut theta = fixed.to_vec();
    for (b, &i) in free.iter().enumerate() {
        theta[i] = best.1 >> b & 1 == 1;
    }
    theta
}

fn add(r: &mut [f64], v: &[f64]) {
    r.iter_mut().zip(v).for_each(|(a, x)| *a += x);
}

fn sub(r: &mut [f64], v: &[f64]) {
    r.iter_mut().zip(v).for_each(|(a, x)| *a -= x);
}

/// Moves `λ` along null-space directions of the fractional columns, which
/// keeps `Σ λ_i v_i` fixed while pinning one coordinate to 0 or 1 per
/// step, until at most `dim` fractional coordinates remain; those are then
/// rounded by exhaustive search.
fn greedy(p: &RoundingProblem, seed: u64) -> Vec<bool> {
    let dim = p.dim();
    let mut lam = p.weights.clone();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.shuffle(&mut sampling::rng(seed));
    let fractional = |lam: &[f64]| -> Vec<usize> {
        order
            .iter()
            .copied()
            .filter(|&i| lam[i] > 0.0 && lam[i] < 1.0)
            .collect()
    };
    let mut frac = fractional(&lam);
    while frac.len() > dim {
        let cols = &frac[..dim + 1];
        let u = null_vector(p, cols);
        let mut step = f64::INFINITY;
        let mut pin = 0;
        for (k, &i) in cols.iter().enumerate() {
            let room = if u[k] > 0.0 {
                (1.0 - lam[i]) / u[k]
            } else if u[k] < 0.0 {
                lam[i] / -u[k]
            } else {
                continue;
            };
            if room < step {
                step = room;
                pin = k;
            }
        }
        for (k, &i) in cols.iter().enumerate() {
            lam[i] += step * u[k];
            if lam[i] < SNAP {
                lam[i] = 0.0;
            } else if lam[i] > 1.0 - SNAP {
                lam[i] = 1.0;
            }
        }
        let i = cols[pin];
        lam[i] = if u[pin] > 0.0 { 1.0 } else { 0.0 };
        frac = fractional(&lam);
    }
    let fixed: Vec<bool> = lam.iter().map(|&l| l >= 0.5).collect();
    brute_over(p, &frac, &fixed)
}

/// Nonzero `u` with `Σ_k u_k v_{cols[k]} ≈ 0`; `cols.len() = dim + 1`
/// always leaves a free column.
fn null_vector(p: &RoundingProblem, cols: &[usize]) -> Vec<f64> {
    let rows = p.dim();
    let m = cols.len();
    let mut a: Vec<Vec<f64>> = (0..rows)
        .map(|r| cols.iter().map(|&i| p.vectors[i].0[r]).collect())
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |s, x| s.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = scale * 1e-12;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..m {
        if row == rows {
            break;
        }
        let (best, val) = (row..rows)
            .map(|r| (r, a[r][col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        a.swap(row, best);
        let pv = a[row][col];
        for c in col..m {
            a[row][c] /= pv;
        }
        for r in 0..rows {
            if r != row {
                let f = a[r][col];
                if f != 0.0 {
                    for c in col..m {
                        a[r][c] -= f * a[row][c];
                    }
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let free = (0..m)
        .find(|c| !pivots.iter().any(|&(_, pc)| pc == *c))
        .expect("more columns than rows");
    let mut u = vec![0.0; m];
    u[free] = 1.0;
    for &(r, c) in &pivots {
        u[c] = -a[r][free];
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn rv(v: &[f64]) -> RangeVector {
        RangeVector(v.to_vec())
    }

    #[test]
    fn two_equal_vectors() {
        let p = RoundingProblem::new(vec![rv(&[1.0, 0.0]), rv(&[1.0, 0.0])], vec![0.5, 0.5], NormKind::Sup)
            .unwrap();
        let r = round_weights(&p, RoundingStrategy::Brute, 0).unwrap();
        assert_eq!(r.theta, vec![true, false]);
        assert_eq!(r.residual, 0.0);
        assert_eq!(p.bound(), 1.0);
    }

    #[test]
    fn integral_weights_are_kept() {
        let p = RoundingProblem::new(
            vec![rv(&[1.0]), rv(&[0.0]), rv(&[2.0])],
            vec![1.0, 1.0, 0.0],
            NormKind::L1,
        )
        .unwrap();
        for s in [RoundingStrategy::Brute, RoundingStrategy::GreedyNullspace] {
            let r = round_weights(&p, s, 0).unwrap();
            assert_eq!(r.theta, vec![true, true, false]);
            assert_eq!(r.residual, 0.0);
        }
    }

    #[test]
    fn brute_is_the_minimum() {
        let mut rng = sampling::rng(11);
        for _ in 0..30 {
            let n = rng.gen_range(1..=9);
            let d = rng.gen_range(1..=3);
            let vs = (0..n)
                .map(|_| RangeVector((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                .collect();
            let ls = (0..n).map(|_| rng.gen::<f64>()).collect();
            let p = RoundingProblem::new(vs, ls, NormKind::L2).unwrap();
            let r = round_weights(&p, RoundingStrategy::Brute, 0).unwrap();
            let min = (0u32..1 << n)
                .map(|m| p.residual(&(0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
                .fold(f64::INFINITY, f64::min);
            assert!((r.residual - min).abs() < 1e-12);
        }
    }

    #[test]
    fn greedy_within_bound_and_above_brute() {
        let mut rng = sampling::rng(12);
        for trial in 0..20 {
            let vs: Vec<RangeVector> = (0..12)
                .map(|_| RangeVector((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                .collect();
            let ls = (0..12).map(|_| rng.gen::<f64>()).collect();
            let p = RoundingProblem::new(vs, ls, NormKind::Sup).unwrap();
            let g = round_weights(&p, RoundingStrategy::GreedyNullspace, trial).unwrap();
            let b = round_weights(&p, RoundingStrategy::Brute, 0).unwrap();
            let max = p.vectors.iter().map(|v| NormKind::Sup.norm(&v.0)).fold(0.0, f64::max);
            assert!(g.residual <= 1.5 * max);
            assert!(g.residual >= b.residual - 1e-12);
        }
    }

    #[test]
    fn null_vector_is_null() {
        let p = RoundingProblem::new(
            vec![rv(&[1.0, 2.0]), rv(&[2.0, 4.0]), rv(&[0.0, 1.0])],
            vec![0.5; 3],
            NormKind::Sup,
        )
        .unwrap();
        let u = null_vector(&p, &[0, 1, 2]);
        for r in 0..2 {
            let s: f64 = (0..3).map(|k| u[k] * p.vectors[k].0[r]).sum();
            assert!(s.abs() < 1e-12);
        }
        assert!(u.iter().any(|&x| x != 0.0));
    }

    #[test]
    fn invalid_problems() {
        assert!(RoundingProblem::new(vec![rv(&[1.0])], vec![1.5], NormKind::Sup).is_err());
        assert!(RoundingProblem::new(vec![rv(&[1.0]), rv(&[1.0, 2.0])], vec![0.5; 2], NormKind::Sup).is_err());
        let p = RoundingProblem::new(vec![rv(&[1.0]); 23], vec![0.5; 23], NormKind::Sup).unwrap();
        assert!(round_weights(&p, RoundingStrategy::Brute, 0).is_err());
        assert!(round_weights(&p, RoundingStrategy::GreedyNullspace, 0).is_ok());
    }
}
