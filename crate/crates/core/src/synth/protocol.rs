//! Rest/contraction scheduling for an experiment run.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Rest,
    Contract,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration_s: f64,
}

impl Segment {
    pub fn rest(duration_s: f64) -> Self {
        Segment {
            kind: SegmentKind::Rest,
            duration_s,
        }
    }

    pub fn contract(duration_s: f64) -> Self {
        Segment {
            kind: SegmentKind::Contract,
            duration_s,
        }
    }
}

/// A segment sequence repeated a fixed number of times, e.g. three cycles
/// of 10 s rest then 10 s contraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionProtocol {
    pub segments: Vec<Segment>,
    pub repetitions: u32,
}

impl ContractionProtocol {
    /// `repetitions` cycles of `rest_s` rest followed by `contract_s`
    /// contraction.
    pub fn rest_contract(rest_s: f64, contract_s: f64, repetitions: u32) -> Self {
        ContractionProtocol {
            segments: vec![Segment::rest(rest_s), Segment::contract(contract_s)],
            repetitions,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Param("protocol has no segments".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Param("protocol repetitions must be >= 1".into()));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if !(seg.duration_s.is_finite() && seg.duration_s > 0.0) {
                return Err(Error::Param(format!(
                    "protocol segment {i} has non-positive duration {}",
                    seg.duration_s
                )));
            }
        }
        Ok(())
    }

    pub fn cycle_duration_s(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    pub fn total_duration_s(&self) -> f64 {
        self.cycle_duration_s() * self.repetitions as f64
    }

    /// `[start, end)` of every contraction segment across all repetitions,
    /// in time order.
    pub fn contraction_intervals(&self) -> Vec<(f64, f64)> {
        let cycle = self.cycle_duration_s();
        let mut out = Vec::new();
        for rep in 0..self.repetitions {
            let mut t = rep as f64 * cycle;
            for seg in &self.segments {
                if seg.kind == SegmentKind::Contract {
                    out.push((t, t + seg.duration_s));
                }
                t += seg.duration_s;
            }
        }
        out
    }

    /// Contraction onset times.
    pub fn onsets(&self) -> Vec<f64> {
        self.contraction_intervals()
            .iter()
            .map(|&(s, _)| s)
            .collect()
    }

    /// Fraction of the total duration spent contracting.
    pub fn contraction_fraction(&self) -> f64 {
        let contracting: f64 = self
            .segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Contract)
            .map(|s| s.duration_s)
            .sum();
        contracting / self.cycle_duration_s()
    }

    /// Activation level in `[0, 1]` at time `t_s`, ramping linearly over
    /// `ramp_s` at each contraction boundary (a zero ramp gives a hard
    /// edge, on over `[start, end)`). Overlapping ramps resolve to the
    /// maximum.
    pub fn activation(&self, t_s: f64, ramp_s: f64) -> f64 {
        let mut level: f64 = 0.0;
        for (start, end) in self.contraction_intervals() {
            level = level.max(ramp_level(t_s, start, end, ramp_s));
        }
        level
    }
}

fn ramp_level(t: f64, start: f64, end: f64, ramp: f64) -> f64 {
    if ramp <= 0.0 {
        return if t >= start && t < end { 1.0 } else { 0.0 };
    }
    if t < start || t >= end + ramp {
        0.0
    } else if t < start + ramp {
        ((t - start) / ramp).min(1.0)
    } else if t < end {
        1.0
    } else {
        1.0 - (t - end) / ramp
    }
}
