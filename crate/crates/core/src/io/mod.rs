//! On-disk artifacts: CSV series with JSON sidecars, raw f32 matrices for
//! M-mode data, and the per-run artifact sets the CLI emits.
//!
//! Every writer is byte-deterministic for a given input: floats are
//! printed in Rust's shortest round-trip form and nothing timestamps or
//! environment-dependent ever enters a file.

pub mod artifacts;
pub mod scanlines;
pub mod signal_csv;

/// Read a file to a string, naming the path in the error — bare OS errors
/// ("No such file or directory") are useless to a CLI user.
pub(crate) fn read_named(path: &std::path::Path) -> crate::Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| crate::Error::Param(format!("cannot read {}: {e}", path.display())))
}

pub use artifacts::{
    read_energy_report, read_run_summary, write_replay_artifacts, write_run_artifacts,
    write_synth_artifacts, RunSummary,
};
pub use scanlines::{read_f32_matrix, write_f32_matrix, MatrixSidecar};
pub use signal_csv::{read_series_csv, write_series_csv, SeriesSidecar};
