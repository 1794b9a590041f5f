use super::element::StepElement;
use super::mask::CellMask;
use crate::error::{Error, Result};

/// Default ceiling on `|support(x)|` for explicit enumeration (2^24 fragments).
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// A fragment `y ⊑ x`, held as the base element plus a mask of kept cells.
/// Masks are canonical: they never contain cells where the base is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentMask<'a> {
    base: &'a StepElement,
    mask: CellMask,
}

impl<'a> FragmentMask<'a> {
    pub fn new(base: &'a StepElement, mask: CellMask) -> Result<Self> {
        if mask.len() != base.n_cells() {
            return Err(Error::Contract(format!(
                "mask over {} cells for an element on {}",
                mask.len(),
                base.n_cells()
            )));
        }
        if !mask.is_subset(&base.support()) {
            return Err(Error::Contract(
                "fragment mask selects cells outside the support of its base".into(),
            ));
        }
        Ok(Self { base, mask })
    }

    /// Drops zero cells of the base from `mask` instead of rejecting them.
    pub fn canonical(base: &'a StepElement, mask: &CellMask) -> Self {
        Self {
            base,
            mask: mask.intersection(&base.support()),
        }
    }

    pub fn base(&self) -> &'a StepElement {
        self.base
    }

    pub fn mask(&self) -> &CellMask {
        &self.mask
    }

    pub fn into_mask(self) -> CellMask {
        self.mask
    }

    pub fn realize(&self) -> StepElement {
        self.base.restrict(&self.mask)
    }

    /// The mutually complemented fragment `x − y`.
    pub fn complement(&self) -> Self {
        Self {
            base: self.base,
            mask: self.base.support().difference(&self.mask),
        }
    }
}

/// Mask built from bit `i` of `index` selecting `support[i]`.
pub fn mask_from_index(n_cells: usize, support: &[usize], index: u64) -> CellMask {
    let mut m = CellMask::empty(n_cells);
    for (i, &c) in support.iter().enumerate() {
        if index >> i & 1 == 1 {
            m.insert(c);
        }
    }
    m
}

/// Streams all `2^|support(x)|` fragments of `x` in ascending bit-pattern
/// order, where bit `i` stands for the `i`-th support cell.
pub struct FragmentIter<'a> {
    base: &'a StepElement,
    support: Vec<usize>,
    next: u64,
    end: u64,
}

impl<'a> Iterator for FragmentIter<'a> {
    type Item = FragmentMask<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let mask = mask_from_index(self.base.n_cells(), &self.support, self.next);
        self.next += 1;
        Some(FragmentMask {
            base: self.base,
            mask,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for FragmentIter<'_> {}

pub fn enumerate_fragments(x: &StepElement) -> Result<FragmentIter<'_>> {
    enumerate_fragments_capped(x, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_fragments_capped(x: &StepElement, cap: usize) -> Result<FragmentIter<'_>> {
    let support = x.support_cells();
    if support.len() > cap || support.len() >= 64 {
        return Err(Error::SupportTooLarge {
            support: support.len(),
            cap,
        });
    }
    let end = 1u64 << support.len();
    Ok(FragmentIter {
        base: x,
        support,
        next: 0,
        end,
    })
}

/// Verifies that `parts` are pairwise disjoint with union `support(x)`.
pub fn check_decomposition(x: &StepElement, parts: &[CellMask]) -> Result<()> {
    let support = x.support();
    let mut seen = CellMask::empty(x.n_cells());
    for (i, p) in parts.iter().enumerate() {
        if p.len() != x.n_cells() {
            return Err(Error::Contract(format!("part {i} has the wrong length")));
        }
        if !p.is_subset(&support) {
            return Err(Error::Contract(format!(
                "part {i} leaves the support of x"
            )));
        }
        if !p.is_disjoint(&seen) {
            return Err(Error::Contract(format!("part {i} overlaps an earlier part")));
        }
        seen = seen.union(p);
    }
    if seen != support {
        return Err(Error::Contract(
            "parts do not cover the support of x".into(),
        ));
    }
    Ok(())
}

/// Common refinement of two disjoint decompositions of `x`:
/// `z[i][k] = A_i ∩ B_k`.
pub fn refine_decompositions(
    x: &StepElement,
    parts_a: &[CellMask],
    parts_b: &[CellMask],
) -> Result<Vec<Vec<CellMask>>> {
    check_decomposition(x, parts_a)?;
    check_decomposition(x, parts_b)?;
    Ok(parts_a
        .iter()
        .map(|a| parts_b.iter().map(|b| a.intersection(b)).collect())
        .collect())
}
