//! A-mode scanline synthesis: Gaussian-windowed echoes on a noise floor.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::par::try_map_slice;
use crate::{Error, Result};

/// A fixed secondary reflector in the field of view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub depth_mm: f64,
    pub amplitude: f64,
}

/// Pulse-echo front-end model.
///
/// Defaults describe a 2.25 MHz transducer sampled at 8 MHz, keeping 400
/// samples per scanline (38.5 mm of depth at 1540 m/s), woken from sleep in
/// 1 ms and firing 50 frames per second while awake.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UsConfig {
    pub fs_hz: f64,
    pub f_center_hz: f64,
    pub samples_per_scanline: usize,
    pub speed_of_sound_m_s: f64,
    /// Fractional -6 dB bandwidth of the emitted pulse.
    pub pulse_bandwidth_fraction: f64,
    /// Echo amplitude of the moving fascicle interface.
    pub reflector_amplitude: f64,
    /// Additional static interfaces (skin, superficial aponeurosis, ...).
    pub scatterers: Vec<Scatterer>,
    /// Round-trip attenuation coefficient, dB per cm of depth per MHz.
    pub attenuation_db_cm_mhz: f64,
    /// RMS of the additive receiver noise.
    pub noise_rms: f64,
    /// Sleep-to-first-shot wake latency of the subsystem.
    pub wake_latency_s: f64,
    /// Frame interval while acquiring (0.02 s = 50 frames/s).
    pub frame_period_s: f64,
}

impl Default for UsConfig {
    fn default() -> Self {
        UsConfig {
            fs_hz: 8.0e6,
            f_center_hz: 2.25e6,
            samples_per_scanline: 400,
            speed_of_sound_m_s: 1540.0,
            pulse_bandwidth_fraction: 0.6,
            reflector_amplitude: 1.0,
            scatterers: vec![
                Scatterer {
                    depth_mm: 4.0,
                    amplitude: 0.35,
                },
                Scatterer {
                    depth_mm: 9.5,
                    amplitude: 0.25,
                },
            ],
            attenuation_db_cm_mhz: 0.5,
            noise_rms: 0.01,
            wake_latency_s: 0.001,
            frame_period_s: 0.02,
        }
    }
}

impl UsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fs_hz.is_finite() && self.fs_hz > 0.0) {
            return Err(Error::Param(format!(
                "ultrasound sample rate must be positive, got {}",
                self.fs_hz
            )));
        }
        if !self.f_center_hz.is_finite()
            || self.f_center_hz <= 0.0
            || self.f_center_hz >= self.fs_hz / 2.0
        {
            return Err(Error::Param(format!(
                "transducer centre frequency must satisfy 0 < f < fs/2, got {} at fs {}",
                self.f_center_hz, self.fs_hz
            )));
        }
        if self.samples_per_scanline < 2 {
            return Err(Error::Param(format!(
                "scanline must hold at least 2 samples, got {}",
                self.samples_per_scanline
            )));
        }
        if !(self.speed_of_sound_m_s.is_finite() && self.speed_of_sound_m_s > 0.0) {
            return Err(Error::Param(format!(
                "speed of sound must be positive, got {}",
                self.speed_of_sound_m_s
            )));
        }
        if !(self.pulse_bandwidth_fraction.is_finite() && self.pulse_bandwidth_fraction > 0.0) {
            return Err(Error::Param(format!(
                "pulse bandwidth fraction must be positive, got {}",
                self.pulse_bandwidth_fraction
            )));
        }
        for (name, v) in [
            ("reflector_amplitude", self.reflector_amplitude),
            ("attenuation_db_cm_mhz", self.attenuation_db_cm_mhz),
            ("noise_rms", self.noise_rms),
            ("wake_latency_s", self.wake_latency_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Param(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.frame_period_s.is_finite() && self.frame_period_s > 0.0) {
            return Err(Error::Param(format!(
                "frame period must be positive, got {}",
                self.frame_period_s
            )));
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            if !(s.depth_mm.is_finite() && s.depth_mm >= 0.0)
                || !(s.amplitude.is_finite() && s.amplitude >= 0.0)
            {
                return Err(Error::Param(format!(
                    "scatterer {i} has invalid depth {} or amplitude {}",
                    s.depth_mm, s.amplitude
                )));
            }
        }
        Ok(())
    }

    /// Depth spanned by one scanline, millimetres.
    pub fn max_depth_mm(&self) -> f64 {
        self.depth_at_sample(self.samples_per_scanline.saturating_sub(1))
    }

    /// Depth of sample index `i`, millimetres (round-trip at the speed of
    /// sound).
    pub fn depth_at_sample(&self, i: usize) -> f64 {
        1000.0 * (i as f64 / self.fs_hz) * self.speed_of_sound_m_s / 2.0
    }

    /// Sample index whose round-trip time matches an echo at `depth_mm`.
    pub fn sample_at_depth(&self, depth_mm: f64) -> f64 {
        2.0 * (depth_mm / 1000.0) / self.speed_of_sound_m_s * self.fs_hz
    }
}

/// One scanline request: reflector depth plus the RNG seed for its noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanJob {
    pub depth_mm: f64,
    pub seed: u64,
}

/// Synthesise one A-mode scanline with the moving reflector at `depth_mm`.
///
/// Each echo is a Gaussian-windowed cosine burst at the transducer centre
/// frequency, centred on the sample nearest its round-trip time and scaled
/// by frequency-dependent round-trip attenuation. Receiver noise comes
/// from a ChaCha stream keyed only by `seed`, so a scanline is a pure
/// function of `(depth, config, seed)` no matter which thread runs it.
pub fn synth_scanline(depth_mm: f64, config: &UsConfig, seed: u64) -> Result<Vec<f32>> {
    config.validate()?;
    if !(depth_mm.is_finite() && depth_mm >= 0.0) {
        return Err(Error::Param(format!(
            "reflector depth must be >= 0, got {depth_mm}"
        )));
    }
    self_check_center(depth_mm, config)?;

    let mut line = vec![0.0f64; config.samples_per_scanline];
    add_echo(&mut line, depth_mm, config.reflector_amplitude, config);
    for s in &config.scatterers {
        add_echo(&mut line, s.depth_mm, s.amplitude, config);
    }

    if config.noise_rms > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in line.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += config.noise_rms * z;
        }
    }
    Ok(line.into_iter().map(|v| v as f32).collect())
}

/// The reflector must land inside the acquisition window.
fn self_check_center(depth_mm: f64, config: &UsConfig) -> Result<()> {
    let center = config.sample_at_depth(depth_mm).round();
    if center >= config.samples_per_scanline as f64 {
        return Err(Error::Param(format!(
            "echo from {depth_mm} mm lands at sample {center}, beyond the \
             {}-sample scanline ({:.1} mm)",
            config.samples_per_scanline,
            config.max_depth_mm()
        )));
    }
    Ok(())
}

fn add_echo(line: &mut [f64], depth_mm: f64, amplitude: f64, config: &UsConfig) {
    if amplitude == 0.0 {
        return;
    }
    let center = config.sample_at_depth(depth_mm).round();
    // Round-trip attenuation: alpha dB/cm/MHz over twice the depth.
    let att_db = config.attenuation_db_cm_mhz
        * (2.0 * depth_mm / 10.0)
        * (config.f_center_hz / 1.0e6);
    let a = amplitude * 10f64.powf(-att_db / 20.0);
    // Gaussian envelope from the fractional -6 dB bandwidth.
    let sigma_f = config.pulse_bandwidth_fraction * config.f_center_hz / 2.3548;
    let sigma_t = 1.0 / (2.0 * std::f64::consts::PI * sigma_f);
    let w = 2.0 * std::f64::consts::PI * config.f_center_hz;
    for (i, v) in line.iter_mut().enumerate() {
        let dt = (i as f64 - center) / config.fs_hz;
        *v += a * (-0.5 * (dt / sigma_t).powi(2)).exp() * (w * dt).cos();
    }
}

/// Batch synthesis; runs in parallel under the `parallel` feature and
/// produces identical bytes either way.
pub fn synth_scanlines(jobs: &[ScanJob], config: &UsConfig) -> Result<Vec<Vec<f32>>> {
    config.validate()?;
    try_map_slice(jobs, |job| synth_scanline(job.depth_mm, config, job.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::map_slice_seq;

    fn quiet(cfg: &mut UsConfig) {
        cfg.noise_rms = 0.0;
        cfg.scatterers.clear();
    }

    #[test]
    fn echo_lands_on_the_expected_sample() {
        let mut cfg = UsConfig::default();
        quiet(&mut cfg);
        // Round trip for 22 mm at 1540 m/s, sampled at 8 MHz:
        // 2 * 0.022 / 1540 * 8e6 = 228.57 -> sample 229.
        assert_eq!(cfg.sample_at_depth(22.0).round(), 229.0);
        assert_eq!(cfg.sample_at_depth(30.0).round(), 312.0);
        let line = synth_scanline(22.0, &cfg, 0).unwrap();
        let peak = line
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak, 229, "echo peak at sample {peak}");
    }

    #[test]
    fn deeper_echoes_are_weaker() {
        let mut cfg = UsConfig::default();
        quiet(&mut cfg);
        let near: f32 = synth_scanline(10.0, &cfg, 0)
            .unwrap()
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()));
        let far: f32 = synth_scanline(30.0, &cfg, 0)
            .unwrap()
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()));
        assert!(far < near, "attenuation: near {near}, far {far}");
        // 0.5 dB/cm/MHz * 2.25 MHz * 4 cm extra round trip is about 4.5 dB.
        let db = 20.0 * (near / far).log10();
        assert!((db as f64 - 4.5).abs() < 0.5, "measured {db} dB");
    }

    #[test]
    fn silent_config_gives_all_zeros() {
        let mut cfg = UsConfig::default();
        quiet(&mut cfg);
        cfg.reflector_amplitude = 0.0;
        let line = synth_scanline(25.0, &cfg, 123).unwrap();
        assert!(line.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn out_of_window_echo_is_rejected() {
        let cfg = UsConfig::default();
        // 400 samples at 8 MHz cover 38.5 mm; 45 mm cannot land inside.
        let err = synth_scanline(45.0, &cfg, 0);
        assert!(err.is_err());
    }

    #[test]
    fn same_seed_same_line_different_seed_different_noise() {
        let cfg = UsConfig::default();
        let a = synth_scanline(25.0, &cfg, 42).unwrap();
        let b = synth_scanline(25.0, &cfg, 42).unwrap();
        let c = synth_scanline(25.0, &cfg, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn batch_matches_sequential_exactly() {
        let cfg = UsConfig::default();
        let jobs: Vec<ScanJob> = (0..64)
            .map(|i| ScanJob {
                depth_mm: 22.0 + (i % 9) as f64,
                seed: 1000 + i as u64,
            })
            .collect();
        let par = synth_scanlines(&jobs, &cfg).unwrap();
        let seq: Vec<Vec<f32>> = map_slice_seq(&jobs, |j| {
            synth_scanline(j.depth_mm, &cfg, j.seed).unwrap()
        });
        assert_eq!(par, seq);
    }

    #[test]
    fn noise_floor_has_the_configured_rms() {
        let mut cfg = UsConfig::default();
        cfg.scatterers.clear();
        cfg.reflector_amplitude = 0.0;
        cfg.noise_rms = 0.05;
        cfg.samples_per_scanline = 4000;
        let line = synth_scanline(0.0, &cfg, 7).unwrap();
        let rms =
            (line.iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / line.len() as f64).sqrt();
        assert!((rms - 0.05).abs() / 0.05 < 0.1, "rms {rms}");
    }

    #[test]
    fn validation_rejects_bad_geometry() {
        let bad = |cfg: UsConfig| cfg.validate().is_err();
        assert!(bad(UsConfig {
            f_center_hz: 5.0e6,
            ..UsConfig::default()
        }));
        assert!(bad(UsConfig {
            samples_per_scanline: 1,
            ..UsConfig::default()
        }));
        assert!(bad(UsConfig {
            scatterers: vec![Scatterer {
                depth_mm: -1.0,
                amplitude: 0.5,
            }],
            ..UsConfig::default()
        }));
        assert!(synth_scanline(f64::NAN, &UsConfig::default(), 0).is_err());
    }
}
