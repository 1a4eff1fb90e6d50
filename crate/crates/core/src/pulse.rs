//! Gaussian pulse envelope and its initial amplitudes on a mode grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::model::{ModeGrid, PulseSpec, ENVELOPE_WIDTH, QUADRATURE_INTERVALS};
use crate::quad;

/// Smallest bandwidth, in units of σ_ω, accepted for spectral amplitudes.
pub const MIN_BANDWIDTH_SIGMAS: f64 = 4.0;

/// Single-photon mode amplitudes `c_k(0)`, normalized to Σ|c_k|² = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmplitudes {
    pub values: Vec<Complex64>,
}

impl SpectralAmplitudes {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Per-mode weights |c_k|².
    pub fn weights(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// `f(t) = α exp[-24 (t - T/2)² / T²]` for `t ∈ [0, T]`.
pub fn envelope(t: f64, pulse: &PulseSpec) -> Result<f64> {
    let duration = pulse.duration;
    if !(0.0..=duration).contains(&t) {
        return Err(Error::Domain {
            quantity: "t",
            value: t,
            range: "[0, T]",
        });
    }
    Ok(unit_envelope(t, duration) * pulse.normalization)
}

fn unit_envelope(t: f64, duration: f64) -> f64 {
    (-ENVELOPE_WIDTH * (t - duration / 2.0).powi(2) / (duration * duration)).exp()
}

/// Finite-window transform `∫₀ᵀ f(t) e^{iωt} dt`.
///
/// The integral is taken about the envelope centre, where it is real; the
/// factor `e^{iωT/2}` then places the pulse on `[0, T]` in the time domain.
pub fn finite_transform(pulse: &PulseSpec, omega: f64) -> Complex64 {
    let duration = pulse.duration;
    let centered = quad::simpson(
        |t| unit_envelope(t, duration) * (omega * (t - duration / 2.0)).cos(),
        0.0,
        duration,
        QUADRATURE_INTERVALS,
    );
    Complex64::from_polar(pulse.normalization * centered, omega * duration / 2.0)
}

/// Fraction of the pulse's spectral weight inside `[-ω_b, ω_b]`.
pub fn spectral_coverage(pulse: &PulseSpec, omega_b: f64) -> f64 {
    erf(omega_b / pulse.spectral_sigma())
}

/// Initial amplitudes `c_k(0)` of the pulse on `grid`, renormalized so the
/// discrete weights sum to one.
pub fn spectral_amplitudes(pulse: &PulseSpec, grid: &ModeGrid) -> Result<SpectralAmplitudes> {
    let required = MIN_BANDWIDTH_SIGMAS * pulse.spectral_sigma();
    if grid.omega_b() < required {
        return Err(Error::GridTooNarrow {
            coverage: spectral_coverage(pulse, grid.omega_b()),
            omega_b: grid.omega_b(),
            required,
        });
    }
    let mut values: Vec<Complex64> = grid
        .omegas()
        .iter()
        .map(|&w| finite_transform(pulse, w))
        .collect();
    let norm = values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    values.iter_mut().for_each(|c| *c /= norm);
    Ok(SpectralAmplitudes { values })
}
