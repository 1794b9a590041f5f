use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{enumerate_fragments_capped, CellMask, StepElement};
use crate::operators::{OaMap, RangeSpace, RangeVector};
use crate::sampling;

/// Up to this many distinct images the net is a minimum-size cover;
/// beyond it, farthest-point insertion.
pub const EXACT_COVER_LIMIT: usize = 24;

const EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum NetMode {
    Exhaustive,
    Sampled { k: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsNet {
    pub epsilon: f64,
    pub centers: Vec<(CellMask, RangeVector)>,
    /// Fraction of checked fragment images within `epsilon` of a center.
    /// Exhaustive nets check every fragment; sampled nets check a fresh
    /// independent sample.
    pub covered_fraction: f64,
    /// Number of fragment images the net was built from.
    pub images: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetRecord {
    pub instance: String,
    pub epsilon: f64,
    pub net_size: usize,
    pub covered_fraction: f64,
}

impl EpsNet {
    pub fn size(&self) -> usize {
        self.centers.len()
    }

    pub fn record(&self, instance: impl Into<String>) -> NetRecord {
        NetRecord {
            instance: instance.into(),
            epsilon: self.epsilon,
            net_size: self.size(),
            covered_fraction: self.covered_fraction,
        }
    }

    /// Whether `v` lies within `epsilon` of some center.
    pub fn covers(&self, range: &RangeSpace, v: &RangeVector) -> bool {
        self.centers
            .iter()
            .any(|(_, c)| range.distance(c, v) <= self.epsilon)
    }
}

fn image_set(op: &dyn OaMap, x: &StepElement, masks: Vec<CellMask>) -> Result<Vec<(CellMask, RangeVector)>> {
    masks
        .into_par_iter()
        .map(|m| {
            let v = op.evaluate(&x.restrict(&m))?;
            Ok((m, v))
        })
        .collect()
}

fn sample_masks(x: &StepElement, k: usize, seed: u64, stream: u64) -> Vec<CellMask> {
    let support = x.support();
    let mut rng = sampling::substream(seed, stream);
    (0..k).map(|_| sampling::random_submask(&support, &mut rng)).collect()
}

/// Indices of a set of centers, drawn from `points`, covering every point
/// at radius `eps`. Exact minimum when at most [`EXACT_COVER_LIMIT`]
/// distinct points, otherwise the shortest covering prefix of the
/// farthest-point order started at `points[0]`.
pub fn cover_points(range: &RangeSpace, points: &[RangeVector], eps: f64) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut distinct: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !distinct.iter().any(|&j| bitwise_eq(&points[j], p)) {
            distinct.push(i);
            if distinct.len() > EXACT_COVER_LIMIT {
                break;
            }
        }
    }
    if distinct.len() <= EXACT_COVER_LIMIT {
        let local: Vec<&RangeVector> = distinct.iter().map(|&i| &points[i]).collect();
        exact_cover(range, &local, eps)
            .into_iter()
            .map(|i| distinct[i])
            .collect()
    } else {
        farthest_point_cover(range, points, eps)
    }
}

fn bitwise_eq(a: &RangeVector, b: &RangeVector) -> bool {
    a.0.len() == b.0.len() && a.0.iter().zip(&b.0).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn exact_cover(range: &RangeSpace, pts: &[&RangeVector], eps: f64) -> Vec<usize> {
    let m = pts.len();
    let cover: Vec<u32> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| range.distance(pts[i], pts[j]) <= eps)
                .fold(0u32, |acc, j| acc | 1 << j)
        })
        .collect();
    let all = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let mut best: Vec<usize> = (0..m).collect();
    let mut chosen = Vec::new();
    search(&cover, all, 0, &mut chosen, &mut best);
    best.sort_unstable();
    best
}

fn search(cover: &[u32], all: u32, covered: u32, chosen: &mut Vec<usize>, best: &mut Vec<usize>) {
    if covered == all {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    if chosen.len() + 1 >= best.len() {
        return;
    }
    let first = (!covered & all).trailing_zeros() as usize;
    for c in 0..cover.len() {
        if cover[c] >> first & 1 == 1 {
            chosen.push(c);
            search(cover, all, covered | cover[c], chosen, best);
            chosen.pop();
        }
    }
}

fn farthest_point_cover(range: &RangeSpace, points: &[RangeVector], eps: f64) -> Vec<usize> {
    let mut centers = vec![0usize];
    let mut dist: Vec<f64> = points.iter().map(|p| range.distance(&points[0], p)).collect();
    loop {
        let (far, &d) = dist
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, d)| if *d > *acc.1 { (i, d) } else { acc });
        if d <= eps {
            return centers;
        }
        centers.push(far);
        for (di, p) in dist.iter_mut().zip(points) {
            *di = di.min(range.distance(&points[far], p));
        }
    }
}

/// Finite ε-net of the fragment images `{T y : y ⊑ x}`.
pub fn c_compact_net(op: &dyn OaMap, x: &StepElement, epsilon: f64, mode: NetMode) -> Result<EpsNet> {
    if !(epsilon > 0.0) {
        return Err(Error::Contract(format!("epsilon must be positive, got {epsilon}")));
    }
    op.check_input(x)?;
    let range = *op.range();
    let masks: Vec<CellMask> = match mode {
        NetMode::Exhaustive => enumerate_fragments_capped(x, EXHAUSTIVE_CAP)?
            .map(|f| f.into_mask())
            .collect(),
        NetMode::Sampled { k, seed } => {
            if k == 0 {
                return Err(Error::Contract("sampled net needs k ≥ 1".into()));
            }
            sample_masks(x, k, seed, 0)
        }
    };
    let images = image_set(op, x, masks)?;
    let points: Vec<RangeVector> = images.iter().map(|(_, v)| v.clone()).collect();
    let centers: Vec<(CellMask, RangeVector)> = cover_points(&range, &points, epsilon)
        .into_iter()
        .map(|i| images[i].clone())
        .collect();
    let mut net = EpsNet {
        epsilon,
        centers,
        covered_fraction: 0.0,
        images: images.len(),
    };
    let check: Vec<RangeVector> = match mode {
        NetMode::Exhaustive => points,
        NetMode::Sampled { k, seed } => image_set(op, x, sample_masks(x, k, seed, 1))?
            .into_iter()
            .map(|(_, v)| v)
            .collect(),
    };
    let hit = check.par_iter().filter(|v| net.covers(&range, v)).count();
    net.covered_fraction = hit as f64 / check.len() as f64;
    Ok(net)
}
