//! Surface-EMG synthesis.
//!
//! The model is amplitude-modulated band-limited noise: white Gaussian
//! noise shaped by a band-pass filter (normalised to unit output RMS),
//! scaled by the protocol's activation level during contractions and by a
//! small baseline level at rest, plus a mains sinusoid. That captures the
//! three things the trigger path has to cope with — a broadband burst to
//! detect, floor noise not to detect, and a strong narrowband interferer
//! to reject.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dsp::biquad::{design_bandpass, Biquad};
use crate::series::{SignalUnit, TimedSeries};
use crate::synth::protocol::ContractionProtocol;
use crate::{Error, Result};

/// Parameters of the synthetic EMG voltage at the amplifier input.
///
/// The default burst level is calibrated so that, after the default
/// trigger-path filters, the contraction-plateau waveform-length envelope
/// sits near 2.1 V — about eight times the 264 mV wake threshold — which
/// keeps the assert latency well inside the electromechanical delay while
/// the rest-floor envelope stays an order of magnitude below threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmgSynthConfig {
    pub fs_hz: f64,
    /// RMS of the burst component at full activation, in volts.
    pub burst_rms_v: f64,
    /// RMS of the always-present baseline noise, in volts.
    pub baseline_rms_v: f64,
    /// Peak amplitude of the mains interferer, in volts.
    pub mains_amp_v: f64,
    pub mains_freq_hz: f64,
    /// Shaping band of the noise component.
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    /// Linear activation ramp at contraction onset/release.
    pub onset_ramp_s: f64,
    pub rng_seed: u64,
}

impl Default for EmgSynthConfig {
    fn default() -> Self {
        EmgSynthConfig {
            fs_hz: 500.0,
            burst_rms_v: 0.05,
            baseline_rms_v: 0.0025,
            mains_amp_v: 0.005,
            mains_freq_hz: 50.0,
            band_low_hz: 20.0,
            band_high_hz: 150.0,
            onset_ramp_s: 0.0,
            rng_seed: 7,
        }
    }
}

impl EmgSynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fs_hz.is_finite() && self.fs_hz > 0.0) {
            return Err(Error::Param(format!(
                "EMG sample rate must be positive, got {}",
                self.fs_hz
            )));
        }
        for (name, v) in [
            ("burst_rms_v", self.burst_rms_v),
            ("baseline_rms_v", self.baseline_rms_v),
            ("mains_amp_v", self.mains_amp_v),
            ("onset_ramp_s", self.onset_ramp_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Param(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.burst_rms_v < self.baseline_rms_v {
            return Err(Error::Param(format!(
                "burst RMS ({}) must not be below baseline RMS ({})",
                self.burst_rms_v, self.baseline_rms_v
            )));
        }
        if !(self.mains_freq_hz.is_finite() && self.mains_freq_hz > 0.0) {
            return Err(Error::Param(format!(
                "mains frequency must be positive, got {}",
                self.mains_freq_hz
            )));
        }
        // The shaping band only has to be a valid design at this rate.
        design_bandpass(self.band_low_hz, self.band_high_hz, self.fs_hz)?;
        Ok(())
    }
}

/// Shaped-noise generator with unit output RMS for unit-variance input.
struct ShapedNoise {
    filter: Biquad,
    rng: ChaCha8Rng,
    gain: f64,
}

impl ShapedNoise {
    fn new(low: f64, high: f64, fs: f64, rng: ChaCha8Rng) -> Result<Self> {
        let coefs = design_bandpass(low, high, fs)?;
        // White noise through an LTI filter has output variance equal to
        // the impulse-response energy; normalise that to one.
        let energy: f64 = Biquad::impulse_response(coefs, (10.0 * fs) as usize)
            .iter()
            .map(|h| h * h)
            .sum();
        Ok(ShapedNoise {
            filter: Biquad::new(coefs),
            rng,
            gain: 1.0 / energy.sqrt(),
        })
    }

    fn next(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.filter.process(z) * self.gain
    }
}

/// Generate `duration_s` of synthetic EMG following `protocol`.
///
/// Returns the voltage series and the ground-truth contraction onsets that
/// fall inside the generated span. The same config and protocol always
/// produce the identical series, with one fixed RNG draw per sample per
/// noise source.
pub fn synth_emg(
    protocol: &ContractionProtocol,
    config: &EmgSynthConfig,
    duration_s: f64,
) -> Result<(TimedSeries, Vec<f64>)> {
    protocol.validate()?;
    config.validate()?;
    if !(duration_s.is_finite() && duration_s >= 0.0) {
        return Err(Error::Param(format!(
            "duration must be >= 0, got {duration_s}"
        )));
    }
    let n = (duration_s * config.fs_hz).round() as usize;

    let mut burst = ShapedNoise::new(
        config.band_low_hz,
        config.band_high_hz,
        config.fs_hz,
        ChaCha8Rng::seed_from_u64(config.rng_seed),
    )?;
    let mut baseline = ShapedNoise::new(
        config.band_low_hz,
        config.band_high_hz,
        config.fs_hz,
        ChaCha8Rng::seed_from_u64(config.rng_seed ^ 0x9e37_79b9_7f4a_7c15),
    )?;

    let two_pi_f = 2.0 * std::f64::consts::PI * config.mains_freq_hz;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / config.fs_hz;
        let activation = protocol.activation(t, config.onset_ramp_s);
        let v = activation * config.burst_rms_v * burst.next()
            + config.baseline_rms_v * baseline.next()
            + config.mains_amp_v * (two_pi_f * t).sin();
        samples.push(v);
    }

    let onsets = protocol
        .onsets()
        .into_iter()
        .filter(|&t| t < duration_s)
        .collect();
    let series = TimedSeries::new(0.0, config.fs_hz, SignalUnit::Volts, samples)?;
    Ok((series, onsets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn isometric_protocol() -> ContractionProtocol {
        ContractionProtocol::rest_contract(10.0, 10.0, 3)
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = isometric_protocol();
        let cfg = EmgSynthConfig::default();
        let (a, _) = synth_emg(&p, &cfg, 60.0).unwrap();
        let (b, _) = synth_emg(&p, &cfg, 60.0).unwrap();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.rng_seed = 8;
        let (c, _) = synth_emg(&p, &other, 60.0).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn sample_count_and_onsets() {
        let p = isometric_protocol();
        let cfg = EmgSynthConfig::default();
        let (s, onsets) = synth_emg(&p, &cfg, 60.0).unwrap();
        assert_eq!(s.len(), 30_000);
        assert_eq!(onsets, vec![10.0, 30.0, 50.0]);
        // Truncated run keeps only onsets inside the span.
        let (_, onsets) = synth_emg(&p, &cfg, 35.0).unwrap();
        assert_eq!(onsets, vec![10.0, 30.0]);
    }

    #[test]
    fn burst_rest_rms_contrast_is_strong() {
        let p = isometric_protocol();
        let (s, _) = synth_emg(&p, &EmgSynthConfig::default(), 60.0).unwrap();
        // Sample away from the boundaries of the first cycle.
        let rest = s.rms_between(2.0, 9.0).unwrap();
        let burst = s.rms_between(12.0, 19.0).unwrap();
        assert!(
            burst / rest >= 5.0,
            "burst {burst} vs rest {rest}: contrast too weak"
        );
        // Burst RMS is dominated by the configured burst level.
        assert!((burst - 0.05).abs() / 0.05 < 0.25, "burst RMS {burst}");
    }

    #[test]
    fn all_zero_config_gives_all_zero_signal() {
        let p = isometric_protocol();
        let cfg = EmgSynthConfig {
            burst_rms_v: 0.0,
            baseline_rms_v: 0.0,
            mains_amp_v: 0.0,
            ..EmgSynthConfig::default()
        };
        let (s, _) = synth_emg(&p, &cfg, 5.0).unwrap();
        assert!(s.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_duration_gives_empty_series() {
        let (s, onsets) = synth_emg(&isometric_protocol(), &EmgSynthConfig::default(), 0.0).unwrap();
        assert!(s.is_empty());
        assert!(onsets.is_empty());
    }

    #[test]
    fn validation_rejects_inverted_levels() {
        let bad = |cfg: EmgSynthConfig| cfg.validate().is_err();
        assert!(bad(EmgSynthConfig {
            burst_rms_v: 0.001,
            baseline_rms_v: 0.01,
            ..EmgSynthConfig::default()
        }));
        assert!(bad(EmgSynthConfig {
            band_high_hz: 400.0,
            ..EmgSynthConfig::default()
        }));
        assert!(bad(EmgSynthConfig {
            burst_rms_v: -1.0,
            ..EmgSynthConfig::default()
        }));
    }

    #[test]
    fn mains_component_sits_at_the_configured_frequency() {
        // With noise off, the signal is a pure sinusoid at mains frequency.
        let cfg = EmgSynthConfig {
            burst_rms_v: 0.0,
            baseline_rms_v: 0.0,
            ..EmgSynthConfig::default()
        };
        let (s, _) = synth_emg(&isometric_protocol(), &cfg, 2.0).unwrap();
        let fs = cfg.fs_hz;
        // Goertzel-style correlation at 50 Hz over an integer number of
        // cycles recovers the full amplitude.
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &v) in s.samples.iter().enumerate() {
            let w = 2.0 * std::f64::consts::PI * 50.0 * i as f64 / fs;
            re += v * w.cos();
            im += v * w.sin();
        }
        let amp = 2.0 * (re.hypot(im)) / s.len() as f64;
        assert!((amp - cfg.mains_amp_v).abs() < 1e-9, "recovered {amp}");
    }
}
