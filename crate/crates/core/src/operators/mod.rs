//! Concrete orthogonally additive operators on step elements: Urysohn
//! integral operators, Nemytskii superposition operators, the L1 norm
//! functional and band-preserving multiplication.

mod additivity;
mod decompose;
mod kernel;
mod operator;
mod range;

pub use additivity::{check_orthogonal_additivity, AdditivityReport, ADDITIVITY_TOL};
pub use decompose::positive_part_decomposition;
pub use kernel::{NemytskiiFunction, Poly1, Poly2, Profile, Sign, UrysohnKernel};
pub use operator::{
    check_signature, Difference, OaMap, OaOperator, OperatorKind, OperatorSpec, RangeSpec, Scaled,
    Sum, ZeroMap,
};
pub use range::{NormKind, RangeSpace, RangeVector};
