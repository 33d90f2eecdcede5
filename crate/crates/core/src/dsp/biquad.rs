//! Second-order IIR sections and the two designs the trigger path uses.
//!
//! Both designs place their critical frequencies exactly, not just to
//! within a numeric optimiser's tolerance:
//!
//! * the band-pass prewarps both corners through the bilinear transform, so
//!   the magnitude response is 1/sqrt(2) at `f_low` and `f_high` up to
//!   floating-point rounding, and its numerator `(b0, 0, -b0)` puts exact
//!   zeros at DC and Nyquist;
//! * the notch (RBJ cookbook form) has an exact null at `f0` and exactly
//!   unity gain at DC and Nyquist because its numerator and denominator
//!   coincide there by construction.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Normalised transfer function of one section
/// `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiquadCoefs {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl BiquadCoefs {
    /// Identity section: output equals input.
    pub fn pass_through() -> Self {
        BiquadCoefs {
            b0: 1.0,
            b1: 0.0,
            b2: 0.0,
            a1: 0.0,
            a2: 0.0,
        }
    }

    /// Both poles strictly inside the unit circle (Jury criterion for a
    /// quadratic: `|a2| < 1` and `|a1| < 1 + a2`).
    pub fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }

    /// Magnitude response at `freq_hz` for a section running at `fs_hz`.
    pub fn magnitude_at(&self, freq_hz: f64, fs_hz: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * freq_hz / fs_hz;
        let (c1, s1) = (w.cos(), w.sin());
        let (c2, s2) = ((2.0 * w).cos(), (2.0 * w).sin());
        let num_re = self.b0 + self.b1 * c1 + self.b2 * c2;
        let num_im = -(self.b1 * s1 + self.b2 * s2);
        let den_re = 1.0 + self.a1 * c1 + self.a2 * c2;
        let den_im = -(self.a1 * s1 + self.a2 * s2);
        (num_re.hypot(num_im)) / (den_re.hypot(den_im))
    }
}

/// One section plus its direct-form-II-transposed state.
#[derive(Debug, Clone)]
pub struct Biquad {
    pub coefs: BiquadCoefs,
    s1: f64,
    s2: f64,
}

impl Biquad {
    pub fn new(coefs: BiquadCoefs) -> Self {
        Biquad {
            coefs,
            s1: 0.0,
            s2: 0.0,
        }
    }

    pub fn reset(&mut self) {
        self.s1 = 0.0;
        self.s2 = 0.0;
    }

    /// Advance one sample.
    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        let c = &self.coefs;
        let y = c.b0 * x + self.s1;
        self.s1 = c.b1 * x - c.a1 * y + self.s2;
        self.s2 = c.b2 * x - c.a2 * y;
        y
    }

    /// Filter a whole buffer, continuing from the current state.
    pub fn process_buffer(&mut self, input: &[f64], output: &mut Vec<f64>) {
        output.reserve(input.len());
        for &x in input {
            output.push(self.process(x));
        }
    }

    /// First `n` samples of the impulse response from a reset state.
    pub fn impulse_response(coefs: BiquadCoefs, n: usize) -> Vec<f64> {
        let mut f = Biquad::new(coefs);
        (0..n)
            .map(|i| f.process(if i == 0 { 1.0 } else { 0.0 }))
            .collect()
    }
}

/// Second-order band-pass via the bilinear transform of an analog
/// first-order band-pass, with both band edges prewarped so the digital
/// -3 dB points land exactly on `f_low_hz` and `f_high_hz`.
pub fn design_bandpass(f_low_hz: f64, f_high_hz: f64, fs_hz: f64) -> Result<BiquadCoefs> {
    if !(fs_hz.is_finite() && fs_hz > 0.0) {
        return Err(Error::Param(format!(
            "band-pass sample rate must be positive, got {fs_hz}"
        )));
    }
    if !(f_low_hz.is_finite() && f_high_hz.is_finite())
        || f_low_hz <= 0.0
        || f_low_hz >= f_high_hz
        || f_high_hz >= fs_hz / 2.0
    {
        return Err(Error::Param(format!(
            "band-pass corners must satisfy 0 < f_low < f_high < fs/2, \
             got f_low={f_low_hz}, f_high={f_high_hz}, fs={fs_hz}"
        )));
    }
    let wl = (std::f64::consts::PI * f_low_hz / fs_hz).tan();
    let wu = (std::f64::consts::PI * f_high_hz / fs_hz).tan();
    let bw = wu - wl;
    let w0sq = wl * wu;
    let a0 = 1.0 + bw + w0sq;
    Ok(BiquadCoefs {
        b0: bw / a0,
        b1: 0.0,
        b2: -(bw / a0),
        a1: 2.0 * (w0sq - 1.0) / a0,
        a2: (1.0 - bw + w0sq) / a0,
    })
}

/// RBJ cookbook notch: exact null at `f0_hz`, unity gain at DC and Nyquist,
/// bandwidth set by `q` (half-power width `f0 / q`).
pub fn design_notch(f0_hz: f64, q: f64, fs_hz: f64) -> Result<BiquadCoefs> {
    if !(fs_hz.is_finite() && fs_hz > 0.0) {
        return Err(Error::Param(format!(
            "notch sample rate must be positive, got {fs_hz}"
        )));
    }
    if !f0_hz.is_finite() || f0_hz <= 0.0 || f0_hz >= fs_hz / 2.0 {
        return Err(Error::Param(format!(
            "notch frequency must satisfy 0 < f0 < fs/2, got f0={f0_hz}, fs={fs_hz}"
        )));
    }
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::Param(format!("notch Q must be positive, got {q}")));
    }
    let w0 = 2.0 * std::f64::consts::PI * f0_hz / fs_hz;
    let (c, s) = (w0.cos(), w0.sin());
    let alpha = s / (2.0 * q);
    let a0 = 1.0 + alpha;
    Ok(BiquadCoefs {
        b0: 1.0 / a0,
        b1: -2.0 * c / a0,
        b2: 1.0 / a0,
        a1: -2.0 * c / a0,
        a2: (1.0 - alpha) / a0,
    })
}
