//! Constructive narrow splits: vector rounding, small-image fragments,
//! ε-partitions, and the assembly of two complementary fragments with
//! nearly equal images.

mod partition;
mod reduce;
mod rounding;
mod split;

pub use partition::{epsilon_partition, extract_small_fragment};
pub use reduce::{finite_rank_reduce, FiniteRankMap};
pub use rounding::{round_weights, RoundingProblem, RoundingResult, RoundingStrategy, BRUTE_CAP};
pub use split::{narrow_split, resolution_epsilon, NarrowSplit, SplitOptions};
