//! Riesz–Kantorovich values of operator lattice expressions, computed
//! pointwise per element: `(T∨S)(x)`, `(T∧S)(x)`, `|T|(x)`, `T⁺(x)`, `T⁻(x)`.

mod bounds;
mod rk;

pub use bounds::{is_operator_fragment, operator_abs_bound_check, AbsBoundReport, FRAGMENT_TOL};
pub use rk::{
    block_objective, partition_objective, rk_oracle, rk_partition, rk_partition_value,
    rk_two_term, DecompositionValue, RkMap, RkMode, ORACLE_CAP, TWO_TERM_CAP,
};
