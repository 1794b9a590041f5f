use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_decomposition, mask_from_index, CellGrid, CellMask, StepElement};
use crate::operators::{check_signature, OaMap, RangeSpace, RangeVector};

pub const TWO_TERM_CAP: usize = 20;
pub const ORACLE_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RkMode {
    /// `T ∨ S`
    Sup,
    /// `T ∧ S`
    Inf,
    /// `|T|`; `S` is ignored.
    Abs,
    /// `T⁺`; `S` is ignored.
    Plus,
    /// `T⁻`; `S` is ignored.
    Minus,
}

impl RkMode {
    pub fn all() -> [RkMode; 5] {
        [RkMode::Sup, RkMode::Inf, RkMode::Abs, RkMode::Plus, RkMode::Minus]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RkMode::Sup => "sup",
            RkMode::Inf => "inf",
            RkMode::Abs => "abs",
            RkMode::Plus => "plus",
            RkMode::Minus => "minus",
        }
    }

    /// Whether the value is a supremum over decompositions (as opposed to
    /// an infimum).
    pub fn is_upper(self) -> bool {
        !matches!(self, RkMode::Inf)
    }

    fn uses_s(self) -> bool {
        matches!(self, RkMode::Sup | RkMode::Inf)
    }
}

/// Contribution of one block with images `a = T(x·1_B)`, `b = S(x·1_B)`.
pub fn block_objective(a: &RangeVector, b: &RangeVector, mode: RkMode) -> RangeVector {
    match mode {
        RkMode::Sup => a.sup(b),
        RkMode::Inf => a.inf(b),
        RkMode::Abs => a.abs(),
        RkMode::Plus => a.positive_part(),
        RkMode::Minus => a.negative_part(),
    }
}

fn check_pair(t: &dyn OaMap, s: &dyn OaMap, x: &StepElement, mode: RkMode) -> Result<()> {
    t.check_input(x)?;
    if mode.uses_s() {
        check_signature(t, s)?;
    }
    Ok(())
}

fn images(op: &dyn OaMap, y: &StepElement, mode: RkMode, use_op: bool) -> Result<RangeVector> {
    if use_op || mode.uses_s() {
        op.evaluate(y)
    } else {
        Ok(op.range().zero())
    }
}

/// `Σ_i f(T x_i, S x_i)` for the decomposition `x = ⊔ x_i` given by `parts`,
/// evaluating both operators on the actual blocks.
pub fn partition_objective(
    t: &dyn OaMap,
    s: &dyn OaMap,
    x: &StepElement,
    parts: &[CellMask],
    mode: RkMode,
) -> Result<RangeVector> {
    check_pair(t, s, x, mode)?;
    check_decomposition(x, parts)?;
    let mut acc = t.range().zero();
    for p in parts {
        let y = x.restrict(p);
        let a = t.evaluate(&y)?;
        let b = images(s, &y, mode, false)?;
        acc.add_assign(&block_objective(&a, &b, mode));
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionValue {
    pub element: StepElement,
    pub partition: Vec<CellMask>,
    pub objective: RangeVector,
}

/// The value at the finest partition, together with that partition.
pub fn rk_partition_value(
    t: &dyn OaMap,
    s: &dyn OaMap,
    x: &StepElement,
    mode: RkMode,
) -> Result<DecompositionValue> {
    let n = x.n_cells();
    let partition: Vec<CellMask> = x
        .support_cells()
        .into_iter()
        .map(|c| CellMask::from_cells(n, [c]))
        .collect();
    let objective = partition_objective(t, s, x, &partition, mode)?;
    Ok(DecompositionValue {
        element: x.clone(),
        partition,
        objective,
    })
}

/// Value of the selected lattice expression at `x`, taken at the finest
/// partition into single support cells. Refining a decomposition never
/// moves the objective the wrong way, so on a grid this is the extremum.
pub fn rk_partition(
    t: &dyn OaMap,
    s: &dyn OaMap,
    x: &StepElement,
    mode: RkMode,
) -> Result<RangeVector> {
    check_pair(t, s, x, mode)?;
    let mut acc = t.range().zero();
    for c in x.support_cells() {
        let y = x.cell_part(c);
        let a = t.evaluate(&y)?;
        let b = images(s, &y, mode, false)?;
        acc.add_assign(&block_objective(&a, &b, mode));
    }
    Ok(acc)
}

/// `sup`/`inf` of `T y + S(x − y)` over all `2^|support|` fragments `y ⊑ x`,
/// componentwise in the range.
pub fn rk_two_term(
    t: &dyn OaMap,
    s: &dyn OaMap,
    x: &StepElement,
    mode: RkMode,
) -> Result<RangeVector> {
    if !mode.uses_s() {
        return Err(Error::Contract(format!(
            "two-term formula is defined for sup and inf, not {}",
            mode.as_str()
        )));
    }
    check_pair(t, s, x, mode)?;
    let support = x.support_cells();
    if support.len() > TWO_TERM_CAP {
        return Err(Error::SupportTooLarge {
            support: support.len(),
            cap: TWO_TERM_CAP,
        });
    }
    let full = x.support();
    let n = x.n_cells();
    let upper = mode.is_upper();
    let combine = move |a: RangeVector, b: RangeVector| if upper { a.sup(&b) } else { a.inf(&b) };
    let value = |idx: u64| -> Result<RangeVector> {
        let m = mask_from_index(n, &support, idx);
        let y = x.restrict(&m);
        let z = x.restrict(&full.difference(&m));
        Ok(&t.evaluate(&y)? + &s.evaluate(&z)?)
    };
    (0..1u64 << support.len())
        .into_par_iter()
        .map(value)
        .try_reduce_with(|a, b| Ok(combine(a, b)))
        .expect("at least the empty fragment")
}

/// All set partitions of `k` labelled items as restricted growth strings.
fn for_each_set_partition(k: usize, mut f: impl FnMut(&[usize], usize)) {
    if k == 0 {
        f(&[], 0);
        return;
    }
    let mut a = vec![0usize; k];
    // max_prefix[i] = max(a[0..i]) + 1 (number of blocks so far)
    let mut blocks = vec![1usize; k];
    loop {
        f(&a, blocks[k - 1]);
        // increment the rightmost position that can still grow
        let mut i = k - 1;
        loop {
            if i == 0 {
                return;
            }
            if a[i] < blocks[i - 1] {
                a[i] += 1;
                blocks[i] = blocks[i - 1].max(a[i] + 1);
                for j in i + 1..k {
                    a[j] = 0;
                    blocks[j] = blocks[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Exhaustive optimum over every set partition of `support(x)`, with both
/// operators evaluated on the actual blocks. Independent of the
/// finest-partition shortcut; limited to `ORACLE_CAP` support cells.
pub fn rk_oracle(t: &dyn OaMap, s: &dyn OaMap, x: &StepElement, mode: RkMode) -> Result<RangeVector> {
    check_pair(t, s, x, mode)?;
    let support = x.support_cells();
    let k = support.len();
    if k > ORACLE_CAP {
        return Err(Error::SupportTooLarge {
            support: k,
            cap: ORACLE_CAP,
        });
    }
    let n = x.n_cells();
    // one block objective per nonempty subset of the support
    let mut table = Vec::with_capacity(1 << k);
    for idx in 0..1u64 << k {
        let y = x.restrict(&mask_from_index(n, &support, idx));
        let a = t.evaluate(&y)?;
        let b = images(s, &y, mode, false)?;
        table.push(block_objective(&a, &b, mode));
    }
    let upper = mode.is_upper();
    let mut best: Option<RangeVector> = None;
    let mut block_masks = vec![0usize; k.max(1)];
    for_each_set_partition(k, |labels, nb| {
        block_masks[..nb].iter_mut().for_each(|m| *m = 0);
        for (i, &l) in labels.iter().enumerate() {
            block_masks[l] |= 1 << i;
        }
        let mut acc = t.range().zero();
        for &m in &block_masks[..nb] {
            acc.add_assign(&table[m]);
        }
        best = Some(match best.take() {
            None => acc,
            Some(b) if upper => b.sup(&acc),
            Some(b) => b.inf(&acc),
        });
    });
    Ok(best.unwrap_or_else(|| t.range().zero()))
}

/// The pointwise map `x ↦ rk_partition(T, S, x, mode)` as an [`OaMap`].
pub struct RkMap<'a> {
    t: &'a dyn OaMap,
    s: &'a dyn OaMap,
    mode: RkMode,
}

impl<'a> RkMap<'a> {
    pub fn new(t: &'a dyn OaMap, s: &'a dyn OaMap, mode: RkMode) -> Result<Self> {
        if mode.uses_s() {
            check_signature(t, s)?;
        }
        Ok(Self { t, s, mode })
    }

    /// `|T|`, `T⁺` or `T⁻`.
    pub fn unary(t: &'a dyn OaMap, mode: RkMode) -> Result<Self> {
        if mode.uses_s() {
            return Err(Error::Contract(format!("{} needs two operators", mode.as_str())));
        }
        Ok(Self { t, s: t, mode })
    }
}

impl OaMap for RkMap<'_> {
    fn range(&self) -> &RangeSpace {
        self.t.range()
    }

    fn input_grid(&self) -> &Arc<CellGrid> {
        self.t.input_grid()
    }

    fn evaluate(&self, x: &StepElement) -> Result<RangeVector> {
        rk_partition(self.t, self.s, x, self.mode)
    }
}
