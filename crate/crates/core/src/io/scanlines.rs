//! Raw little-endian f32 matrices with a JSON sidecar, used for M-mode
//! images (CSV would be ~30x larger for a minute of frames).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shape and axes of a stored f32 matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub frame_count: usize,
    pub samples_per_frame: usize,
    /// Ultrasound sampling rate the columns correspond to.
    pub fs_us_hz: f64,
    /// Depth covered by one column step, millimetres.
    pub depth_step_mm: f64,
    /// Capture time of each row.
    pub frame_times_s: Vec<f64>,
}

impl MatrixSidecar {
    pub fn validate(&self) -> Result<()> {
        if self.frame_times_s.len() != self.frame_count {
            return Err(Error::Format {
                path: "<sidecar>".into(),
                line: 0,
                msg: format!(
                    "sidecar lists {} frame times for {} frames",
                    self.frame_times_s.len(),
                    self.frame_count
                ),
            });
        }
        Ok(())
    }
}

/// Write a row-major f32 matrix and its sidecar (`<stem>.json`).
pub fn write_f32_matrix(bin_path: &Path, data: &[f32], sidecar: &MatrixSidecar) -> Result<()> {
    sidecar.validate()?;
    if data.len() != sidecar.frame_count * sidecar.samples_per_frame {
        return Err(Error::Invariant(format!(
            "matrix holds {} values but sidecar says {} x {}",
            data.len(),
            sidecar.frame_count,
            sidecar.samples_per_frame
        )));
    }
    let mut bytes = Vec::with_capacity(data.len() * 4);
    for v in data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(bin_path, bytes)?;
    fs::write(
        bin_path.with_extension("json"),
        serde_json::to_string_pretty(sidecar)?,
    )?;
    Ok(())
}

/// Read a matrix written by [`write_f32_matrix`], checking the payload
/// length against the sidecar.
pub fn read_f32_matrix(bin_path: &Path) -> Result<(Vec<f32>, MatrixSidecar)> {
    let sidecar: MatrixSidecar =
        serde_json::from_str(&super::read_named(&bin_path.with_extension("json"))?)?;
    sidecar.validate()?;
    let bytes = fs::read(bin_path)
        .map_err(|e| Error::Param(format!("cannot read {}: {e}", bin_path.display())))?;
    if bytes.len() % 4 != 0 {
        return Err(Error::Format {
            path: bin_path.display().to_string(),
            line: 0,
            msg: format!("length {} is not a multiple of 4 bytes", bytes.len()),
        });
    }
    let data: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    if data.len() != sidecar.frame_count * sidecar.samples_per_frame {
        return Err(Error::Format {
            path: bin_path.display().to_string(),
            line: 0,
            msg: format!(
                "payload holds {} values but sidecar says {} x {}",
                data.len(),
                sidecar.frame_count,
                sidecar.samples_per_frame
            ),
        });
    }
    Ok((data, sidecar))
}
