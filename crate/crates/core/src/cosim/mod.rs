//! Co-simulation of the two subsystems on one clock.
//!
//! The EMG pipeline advances one ADC sample at a time; the ultrasound
//! subsystem is a three-state machine (sleeping, waking, acquiring) driven
//! by the wake line the pipeline produces. Frames are stamped at exact
//! multiples of the frame period from the instant acquisition starts, so
//! frame times are sub-sample accurate and independent of the EMG tick.

pub mod latency;
pub mod mmode;

use serde::{Deserialize, Serialize};

use crate::dsp::trigger::{EdgeKind, TriggerTrace};
use crate::scenario::Scenario;
use crate::series::TimedSeries;
use crate::synth::emg::synth_emg;
use crate::synth::mechanics::fascicle_depth_mm;
use crate::synth::ultrasound::{synth_scanlines, ScanJob};
use crate::{Error, Result};

pub use latency::{first_frame_before_motion, measure_latency, BeforeMotion, LatencyReport};
pub use mmode::{build_mmode, MModeImage};

/// Ultrasound subsystem state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsState {
    Sleeping,
    Waking,
    Acquiring,
}

/// The wake-latency/frame-period state machine, advanced by events and by
/// the passage of time.
#[derive(Debug, Clone)]
pub struct UsSubsystem {
    wake_latency_s: f64,
    frame_period_s: f64,
    state: UsState,
    /// When the current wake completes (valid in `Waking`).
    wake_done_s: f64,
    /// When acquisition started (valid in `Acquiring`).
    acq_start_s: f64,
    /// Frames emitted since `acq_start_s`.
    frames_this_burst: u64,
}

impl UsSubsystem {
    pub fn new(wake_latency_s: f64, frame_period_s: f64) -> Self {
        UsSubsystem {
            wake_latency_s,
            frame_period_s,
            state: UsState::Sleeping,
            wake_done_s: 0.0,
            acq_start_s: 0.0,
            frames_this_burst: 0,
        }
    }

    pub fn state(&self) -> UsState {
        self.state
    }

    /// Rising edge on the wake line.
    pub fn on_assert(&mut self, t_s: f64) {
        if self.state == UsState::Sleeping {
            self.state = UsState::Waking;
            self.wake_done_s = t_s + self.wake_latency_s;
        }
    }

    /// Falling edge: power straight back down, even mid-wake.
    pub fn on_deassert(&mut self) {
        self.state = UsState::Sleeping;
    }

    /// Advance the subsystem to time `now_s`, appending the times of any
    /// frames due strictly before `now_s`.
    pub fn advance_to(&mut self, now_s: f64, frame_times: &mut Vec<f64>) {
        if self.state == UsState::Waking && self.wake_done_s < now_s {
            self.state = UsState::Acquiring;
            self.acq_start_s = self.wake_done_s;
            self.frames_this_burst = 0;
        }
        if self.state == UsState::Acquiring {
            loop {
                let t = self.acq_start_s + self.frames_this_burst as f64 * self.frame_period_s;
                if t >= now_s {
                    break;
                }
                frame_times.push(t);
                self.frames_this_burst += 1;
            }
        }
    }
}

/// One acquired scanline.
#[derive(Debug, Clone, PartialEq)]
pub struct UsFrame {
    pub t_s: f64,
    /// Ground-truth reflector depth the frame was synthesised with.
    pub depth_mm: f64,
    pub scanline: Vec<f32>,
}

/// All frames of a run, in time order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UsFrameSet {
    pub frames: Vec<UsFrame>,
}

impl UsFrameSet {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.t_s).collect()
    }
}

/// Ground truth the synthesis side knows and the trigger side must infer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub onsets_s: Vec<f64>,
    pub contraction_intervals: Vec<(f64, f64)>,
    pub em_delay_s: f64,
}

/// Everything one simulated run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub scenario: Scenario,
    pub duration_s: f64,
    pub emg: TimedSeries,
    pub filtered: TimedSeries,
    pub envelope: TimedSeries,
    pub trigger: TriggerTrace,
    pub frames: UsFrameSet,
    pub ground_truth: GroundTruth,
}

/// Run the full co-simulation described by `scenario`.
///
/// Deterministic: the EMG stream comes from the scenario's synthesis seed
/// and each frame's receiver noise is keyed by the run seed and the frame
/// index, so the result is identical across runs, thread counts, and the
/// `parallel` feature setting.
pub fn simulate(scenario: &Scenario) -> Result<SimulationResult> {
    scenario.validate()?;
    let duration_s = scenario.duration_s();
    let (emg, _) = synth_emg(&scenario.protocol, &scenario.emg_synth, duration_s)?;
    let intervals: Vec<(f64, f64)> = scenario
        .protocol
        .contraction_intervals()
        .into_iter()
        .filter(|&(s, _)| s < duration_s)
        .collect();
    let onsets_s: Vec<f64> = intervals.iter().map(|&(s, _)| s).collect();

    let mut pipeline = scenario.pipeline.build()?;
    let mut us = UsSubsystem::new(scenario.us.wake_latency_s, scenario.us.frame_period_s);

    let mut filtered = Vec::with_capacity(emg.len());
    let mut envelope = Vec::with_capacity(emg.len());
    let mut trigger = TriggerTrace::default();
    let mut frame_times = Vec::new();

    for (i, &x) in emg.samples.iter().enumerate() {
        let now = emg.time_at(i);
        // Emit frames due before this tick, then apply this tick's edge:
        // an edge at time t can only gate frames after t.
        us.advance_to(now, &mut frame_times);
        let step = pipeline.push(x)?;
        filtered.push(step.filtered);
        envelope.push(step.envelope);
        if let Some(edge) = step.edge {
            trigger.push(edge);
            match edge.kind {
                EdgeKind::Rising => us.on_assert(edge.t_s),
                EdgeKind::Falling => us.on_deassert(),
            }
        }
    }
    // Let the subsystem run out the remainder of the span.
    us.advance_to(duration_s, &mut frame_times);
    trigger.validate()?;

    // Synthesise all scanlines in one batch: depth from ground-truth
    // mechanics at each frame instant, noise seed from the run seed and
    // the frame index.
    let jobs: Vec<ScanJob> = frame_times
        .iter()
        .enumerate()
        .map(|(idx, &t)| ScanJob {
            depth_mm: fascicle_depth_mm(t, &intervals, &scenario.mechanics),
            seed: frame_seed(scenario.run.seed, idx as u64),
        })
        .collect();
    let scanlines = synth_scanlines(&jobs, &scenario.us)?;
    let frames = UsFrameSet {
        frames: frame_times
            .iter()
            .zip(jobs.iter().zip(scanlines))
            .map(|(&t_s, (job, scanline))| UsFrame {
                t_s,
                depth_mm: job.depth_mm,
                scanline,
            })
            .collect(),
    };

    let result = SimulationResult {
        scenario: scenario.clone(),
        duration_s,
        emg,
        filtered: TimedSeries::new(0.0, scenario.pipeline.fs_hz, crate::SignalUnit::Volts, filtered)?,
        envelope: TimedSeries::new(0.0, scenario.pipeline.fs_hz, crate::SignalUnit::Volts, envelope)?,
        trigger,
        frames,
        ground_truth: GroundTruth {
            onsets_s,
            contraction_intervals: intervals,
            em_delay_s: scenario.mechanics.em_delay_s,
        },
    };
    check_frames_inside_assertions(&result)?;
    Ok(result)
}

/// Per-frame noise seed: splitmix64 over the run seed and frame index, so
/// any frame can be synthesised independently of all the others.
pub fn frame_seed(run_seed: u64, frame_idx: u64) -> u64 {
    let mut z = run_seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(frame_idx)
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hard invariant of the co-simulation: the ultrasound subsystem never
/// fires while the wake line is down. Every frame must sit inside some
/// `[rising + wake_latency, falling]` window (closed on both ends; the
/// trailing window is clipped at the run end).
fn check_frames_inside_assertions(result: &SimulationResult) -> Result<()> {
    let wake = result.scenario.us.wake_latency_s;
    let windows: Vec<(f64, f64)> = result
        .trigger
        .asserted_intervals(result.duration_s)
        .into_iter()
        .map(|(rise, fall)| (rise + wake, fall))
        .collect();
    for frame in &result.frames.frames {
        let ok = windows
            .iter()
            .any(|&(start, end)| frame.t_s >= start && frame.t_s <= end);
        if !ok {
            return Err(Error::Invariant(format!(
                "frame at {} s lies outside every asserted window",
                frame.t_s
            )));
        }
    }
    Ok(())
}
