//! Experiment harness: loads experiment specs, runs the diagnostic and
//! narrow-split pipelines over grid refinements, and writes CSV/JSON.

pub mod output;
pub mod report;
pub mod run;
pub mod selftest;
pub mod spec;

pub use output::csv_digest;
