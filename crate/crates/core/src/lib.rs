//! Computational toolkit for orthogonally additive operators on vector
//! lattices of step functions.
//!
//! * [`lattice`]: elements, fragments, decompositions, Freudenthal steps
//!   and the piecewise-linear `C[0, 1]` fragment model.
//! * [`operators`]: Urysohn, Nemytskii, norm-functional and
//!   band-multiplication operators.
//! * [`calculus`]: Riesz–Kantorovich values `T∨S`, `T∧S`, `|T|`, `T⁺`, `T⁻`
//!   with an exhaustive set-partition oracle.
//! * [`compact`]: ε-nets of fragment images and compactness probes.
//! * [`narrow`]: vector rounding, ε-partitions and narrow splits.

pub mod calculus;
pub mod compact;
pub mod error;
pub mod lattice;
pub mod narrow;
pub mod operators;
pub mod sampling;

pub use error::{Error, Result};
