//! M-mode assembly: stack per-frame echo envelopes into a depth-over-time
//! image.

use crate::cosim::UsFrameSet;
use crate::par::map_slice;
use crate::synth::ultrasound::UsConfig;
use crate::{Error, Result};

/// Envelope rows (one per frame) over a common depth axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MModeImage {
    /// Row-major: `n_frames` rows of `n_depth` envelope samples.
    pub data: Vec<f32>,
    pub n_frames: usize,
    pub n_depth: usize,
    pub frame_times_s: Vec<f64>,
    /// Depth per envelope sample, millimetres.
    pub depth_step_mm: f64,
}

impl MModeImage {
    pub fn row(&self, frame: usize) -> &[f32] {
        &self.data[frame * self.n_depth..(frame + 1) * self.n_depth]
    }

    pub fn depth_of_bin_mm(&self, bin: usize) -> f64 {
        bin as f64 * self.depth_step_mm
    }

    /// Depth of the strongest echo in one frame, millimetres.
    pub fn peak_depth_mm(&self, frame: usize) -> f64 {
        let row = self.row(frame);
        let bin = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.depth_of_bin_mm(bin)
    }
}

/// Rectify each scanline and smooth it over roughly one carrier period to
/// strip the oscillation, leaving the echo envelope per depth bin.
pub fn build_mmode(frames: &UsFrameSet, config: &UsConfig) -> Result<MModeImage> {
    config.validate()?;
    if frames.is_empty() {
        return Err(Error::Param(
            "cannot build an M-mode image from zero frames".into(),
        ));
    }
    let n_depth = frames.frames[0].scanline.len();
    for (i, f) in frames.frames.iter().enumerate() {
        if f.scanline.len() != n_depth {
            return Err(Error::Param(format!(
                "frame {i} has {} samples, expected {n_depth}",
                f.scanline.len()
            )));
        }
    }
    // Smoothing window: one carrier period worth of samples, at least 1.
    let w = (config.fs_hz / config.f_center_hz).round().max(1.0) as usize;
    let rows = map_slice(&frames.frames, |f| envelope_row(&f.scanline, w));
    let mut data = Vec::with_capacity(frames.len() * n_depth);
    for row in rows {
        data.extend_from_slice(&row);
    }
    Ok(MModeImage {
        data,
        n_frames: frames.len(),
        n_depth,
        frame_times_s: frames.times(),
        depth_step_mm: config.depth_at_sample(1),
    })
}

/// Rectified moving average centred on each sample, clamped at the ends.
fn envelope_row(scanline: &[f32], w: usize) -> Vec<f32> {
    let n = scanline.len();
    let half = w / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let sum: f64 = scanline[lo..hi].iter().map(|&v| (v as f64).abs()).sum();
            (sum / (hi - lo) as f64) as f32
        })
        .collect()
}
