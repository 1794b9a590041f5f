//! Compactness diagnostics: finite ε-nets of fragment images, sampling of
//! order intervals, and vanishing of images along shrinking fragment chains.

mod net;
mod probes;

pub use net::{c_compact_net, cover_points, EpsNet, NetMode, NetRecord, EXACT_COVER_LIMIT};
pub use probes::{
    am_compact_probe, fragment_band_probe, lateral_vanishing_check, AmProbeReport,
    BandProbeReport, ChainBuilder, LateralReport, UNBOUNDED_THRESHOLD,
};
