//! Scheduling of entanglement distribution from LEO satellite constellations
//! to pairs of ground stations.
//!
//! The crate is organised bottom-up:
//!
//! - [`orbital`]: TLE parsing, two-body propagation, Earth geometry, solar elevation.
//! - [`topology`]: ground-station placement, the station-pair set and per-slot visibility.
//! - [`channel`]: SPDC photon statistics, link transmissivity, rate and fidelity.
//! - [`matching`]: min-cost flow and maximum-weight bipartite b-matching.
//! - [`scheduler`]: the per-slot scheduling instance, heuristics, exact solver and
//!   the 3D-matching reduction.
//! - [`harness`]: the time-slotted scenario runner, metrics and CSV export.

pub mod channel;
pub mod harness;
pub mod matching;
pub mod orbital;
pub mod rng;
pub mod scheduler;
pub mod topology;

/// Directory holding the bundled data files (land mask, population centres,
/// sample TLEs and scenario configs).
pub fn bundled_data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}
