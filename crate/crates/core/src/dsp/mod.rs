//! The on-probe trigger path.
//!
//! ```text
//! raw EMG --> band-pass biquad --> mains notch --> waveform-length
//!             (20..130 Hz)         (50 Hz)         envelope (60 samples)
//!                                                      |
//!                                  wake line <-- threshold comparator
//! ```
//!
//! Each stage is its own streaming type so the pipeline can run sample by
//! sample exactly as firmware would; [`pipeline`] wires them together.

pub mod adc;
pub mod biquad;
pub mod envelope;
pub mod pipeline;
pub mod trigger;

pub use adc::AdcConfig;
pub use biquad::{design_bandpass, design_notch, Biquad, BiquadCoefs};
pub use envelope::WaveformLength;
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput, StreamingPipeline};
pub use trigger::{EdgeKind, TriggerComparator, TriggerEdge, TriggerTrace};
