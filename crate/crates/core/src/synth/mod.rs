//! Ground-truth generators: the contraction protocol, the surface-EMG
//! voltage it produces, the delayed muscle motion, and the pulse-echo
//! scanlines of that motion.

pub mod emg;
pub mod mechanics;
pub mod protocol;
pub mod ultrasound;

pub use emg::{synth_emg, EmgSynthConfig};
pub use mechanics::{fascicle_depth_mm, force_level, MuscleMechanics};
pub use protocol::{ContractionProtocol, Segment, SegmentKind};
pub use ultrasound::{synth_scanline, synth_scanlines, ScanJob, Scatterer, UsConfig};
