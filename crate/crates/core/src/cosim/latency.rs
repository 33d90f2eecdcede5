//! Trigger-latency measurement against ground truth.

use serde::{Deserialize, Serialize};

use crate::cosim::SimulationResult;

/// How one contraction was served by the trigger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionLatency {
    pub onset_s: f64,
    /// First rising edge attributed to this onset, if any.
    pub rising_s: Option<f64>,
    /// `rising - onset`.
    pub latency_s: Option<f64>,
    /// Electromechanical-delay margin: `em_delay - latency`. Positive
    /// means the wake beat the motion.
    pub margin_s: Option<f64>,
}

/// Latency statistics for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub em_delay_s: f64,
    pub contractions: Vec<ContractionLatency>,
    /// Onsets that produced a rising edge.
    pub matched: usize,
    /// Onsets with no rising edge attributed.
    pub missed: usize,
    /// Rising edges with no onset to explain them (or beyond the first
    /// per onset).
    pub spurious: usize,
    pub min_latency_s: Option<f64>,
    pub mean_latency_s: Option<f64>,
    pub max_latency_s: Option<f64>,
    /// Smallest margin across matched contractions.
    pub min_margin_s: Option<f64>,
}

/// Window after an onset within which a rising edge can be attributed to
/// it. Longer than any plausible trigger delay, shorter than the rest
/// periods of the scenarios this models.
const MATCH_WINDOW_S: f64 = 1.0;

/// Attribute rising edges to contraction onsets and compute latency
/// statistics.
///
/// Each rising edge is matched to the closest preceding onset within
/// [`MATCH_WINDOW_S`]; the first edge per onset defines its latency, any
/// further edges in the same window count as spurious, as do edges with no
/// preceding onset. Onsets that attract no edge count as missed — a
/// detection failure is data here, not an error.
pub fn measure_latency(result: &SimulationResult) -> LatencyReport {
    let onsets = &result.ground_truth.onsets_s;
    let mut first_edge: Vec<Option<f64>> = vec![None; onsets.len()];
    let mut spurious = 0usize;

    for rise in result.trigger.rising_times() {
        // Closest onset at or before the edge.
        let idx = match onsets.binary_search_by(|o| o.partial_cmp(&rise).unwrap()) {
            Ok(i) => Some(i),
            Err(0) => None,
            Err(i) => Some(i - 1),
        };
        match idx {
            Some(i) if rise - onsets[i] <= MATCH_WINDOW_S => {
                if first_edge[i].is_none() {
                    first_edge[i] = Some(rise);
                } else {
                    spurious += 1;
                }
            }
            _ => spurious += 1,
        }
    }

    let contractions: Vec<ContractionLatency> = onsets
        .iter()
        .zip(&first_edge)
        .map(|(&onset_s, &rising_s)| {
            let latency_s = rising_s.map(|r| r - onset_s);
            ContractionLatency {
                onset_s,
                rising_s,
                latency_s,
                margin_s: latency_s.map(|l| result.ground_truth.em_delay_s - l),
            }
        })
        .collect();

    let latencies: Vec<f64> = contractions.iter().filter_map(|c| c.latency_s).collect();
    let matched = latencies.len();
    let (min, max, mean) = if latencies.is_empty() {
        (None, None, None)
    } else {
        (
            latencies.iter().cloned().reduce(f64::min),
            latencies.iter().cloned().reduce(f64::max),
            Some(latencies.iter().sum::<f64>() / matched as f64),
        )
    };
    LatencyReport {
        em_delay_s: result.ground_truth.em_delay_s,
        matched,
        missed: onsets.len() - matched,
        spurious,
        min_latency_s: min,
        mean_latency_s: mean,
        max_latency_s: max,
        min_margin_s: contractions
            .iter()
            .filter_map(|c| c.margin_s)
            .reduce(f64::min),
        contractions,
    }
}

/// Whether the first ultrasound frame of each contraction landed before
/// the muscle started moving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeforeMotion {
    pub onset_s: f64,
    pub first_frame_s: Option<f64>,
    /// True when the first frame arrived within the electromechanical
    /// delay. A contraction with no frame at all is false.
    pub before_motion: bool,
}

/// For each contraction, check that at least one frame was captured before
/// `onset + em_delay` — the point of duty cycling is exactly this.
pub fn first_frame_before_motion(result: &SimulationResult) -> Vec<BeforeMotion> {
    let onsets = &result.ground_truth.onsets_s;
    let em = result.ground_truth.em_delay_s;
    onsets
        .iter()
        .enumerate()
        .map(|(i, &onset)| {
            let window_end = onsets.get(i + 1).copied().unwrap_or(f64::INFINITY);
            let first_frame_s = result
                .frames
                .frames
                .iter()
                .map(|f| f.t_s)
                .find(|&t| t >= onset && t < window_end);
            BeforeMotion {
                onset_s: onset,
                first_frame_s,
                before_motion: first_frame_s.map(|t| t <= onset + em).unwrap_or(false),
            }
        })
        .collect()
}
