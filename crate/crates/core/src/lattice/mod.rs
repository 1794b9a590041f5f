//! Step functions on a weighted grid as a model of a vector lattice, with
//! fragments, disjoint decompositions, Freudenthal approximation and the
//! piecewise-linear model of `C[0, 1]`.

mod element;
mod fragment;
mod freudenthal;
mod grid;
mod interval;
mod mask;

pub use element::{
    is_fragment, is_fragment_by_disjointness, lattice_ops, ElementLiteral, LatticeOps, StepElement,
};
pub(crate) use element::same_grid;
pub use fragment::{
    check_decomposition, enumerate_fragments, enumerate_fragments_capped, mask_from_index,
    refine_decompositions, FragmentIter, FragmentMask, DEFAULT_ENUMERATION_CAP,
};
pub use freudenthal::{freudenthal_approx, StepApprox};
pub use grid::CellGrid;
pub use interval::{ComponentSelector, IntervalFunction, SupportComponent};
pub use mask::CellMask;
