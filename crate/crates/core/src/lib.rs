//! Desk-scale simulation of a wearable that duty-cycles an ultrasound
//! front-end off a surface-EMG trigger.
//!
//! The crate is organised around the lifecycle of one experiment:
//!
//! * [`synth`] generates the raw inputs — an EMG voltage trace following a
//!   rest/contraction protocol, the delayed muscle motion it implies, and
//!   pulse-echo scanlines of the moving fascicle.
//! * [`dsp`] is the on-probe trigger path: band-pass and notch biquads, a
//!   waveform-length envelope, and a threshold comparator driving a wake
//!   line.
//! * [`cosim`] runs both subsystems against a shared clock and reports
//!   trigger latency and frame placement against ground truth.
//! * [`energy`] converts duty cycle into average power, battery life, and
//!   savings versus always-on operation.
//! * [`scenario`] bundles every knob into one serialisable description, and
//!   [`io`] reads and writes the on-disk artifacts.
//!
//! Everything is deterministic: a scenario plus a seed reproduces every
//! output byte for byte, with or without the `parallel` feature.

pub mod cosim;
pub mod dsp;
pub mod energy;
pub mod error;
pub mod io;
pub mod scenario;
pub mod series;
pub mod sweep;
pub mod synth;

pub mod par;

pub use error::{Error, Result};
pub use scenario::Scenario;
pub use series::{SignalUnit, TimedSeries};
