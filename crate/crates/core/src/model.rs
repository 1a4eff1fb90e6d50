//! Shared physical types: constants, ion-cavity rates, the discretized mode
//! grid and the pulse specification.
//!
//! All rates are angular frequencies in rad/s. Rates quoted with SI prefixes
//! ("32 MHz", "1 GHz", "1 kHz") are read as 1e6, 1e9 and 1e3 rad/s.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// CODATA values of the constants entering the coupling-rate estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Vacuum permittivity (F/m).
    pub eps0: f64,
    /// Speed of light (m/s).
    pub c_light: f64,
}

impl PhysicalConstants {
    pub const CODATA: Self = Self {
        hbar: 1.054_571_817e-34,
        eps0: 8.854_187_812_8e-12,
        c_light: 299_792_458.0,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Rates of a single ion-cavity system, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Ion-cavity coupling.
    pub g: f64,
    /// Cavity energy decay rate into the guided continuum.
    pub kappa: f64,
    /// Spontaneous emission rate into non-cavity modes.
    pub gamma: f64,
    /// Detuning of the ion transition from the cavity/pulse carrier.
    #[serde(default)]
    pub delta: f64,
}

impl PhysicalParams {
    /// Coupling 1.0e9, cavity decay 3.2e7 and spontaneous decay 1.0e3 rad/s
    /// (Eu³⁺ in a silica microsphere).
    pub const EU_MICROSPHERE: Self = Self {
        g: 1.0e9,
        kappa: 3.2e7,
        gamma: 1.0e3,
        delta: 0.0,
    };

    /// Builds a resonant parameter set (`delta = 0`), rates in rad/s.
    pub fn new(g: f64, kappa: f64, gamma: f64) -> Result<Self> {
        Self {
            g,
            kappa,
            gamma,
            delta: 0.0,
        }
        .validated()
    }

    /// Same rates with the ion transition detuned by `delta` rad/s.
    pub fn with_detuning(self, delta: f64) -> Result<Self> {
        Self { delta, ..self }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |name, reason: &str| Error::InvalidParameter {
            name,
            reason: reason.to_string(),
        };
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(bad("g", "must be finite and >= 0"));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(bad("kappa", "must be finite and >= 0"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(bad("gamma", "must be finite and >= 0"));
        }
        if !self.delta.is_finite() {
            return Err(bad("delta", "must be finite"));
        }
        Ok(self)
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::EU_MICROSPHERE
    }
}

/// Gaussian single-photon pulse of duration `T` on the window `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Pulse duration T (s).
    pub duration: f64,
    /// Envelope amplitude α (s^-1/2), fixed by unit squared norm on `[0, T]`.
    pub normalization: f64,
}

/// Exponent coefficient of the Gaussian envelope, `exp[-24 (t - T/2)² / T²]`.
pub(crate) const ENVELOPE_WIDTH: f64 = 24.0;
pub(crate) const QUADRATURE_INTERVALS: usize = 4096;

impl PulseSpec {
    pub fn gaussian(duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: format!("pulse duration must be > 0 s, got {duration}"),
            });
        }
        let t = duration;
        let intensity = |s: f64| (-2.0 * ENVELOPE_WIDTH * (s - t / 2.0).powi(2) / (t * t)).exp();
        let norm_sq = quad::simpson(intensity, 0.0, t, QUADRATURE_INTERVALS);
        Ok(Self {
            duration,
            normalization: norm_sq.sqrt().recip(),
        })
    }

    /// Spectral standard deviation σ_ω = √48 / T of the amplitude spectrum.
    pub fn spectral_sigma(&self) -> f64 {
        (2.0 * ENVELOPE_WIDTH).sqrt() / self.duration
    }
}

/// Discretized continuum of free-space modes, `ω_k = [k - (N+1)/2] Δω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    omega_b: f64,
    delta_omega: f64,
    omegas: Vec<f64>,
}

/// Default bandwidth in units of the pulse spectral width.
pub const DEFAULT_BANDWIDTH_SIGMAS: f64 = 8.0;
/// Default recurrence time 2π/Δω in units of the pulse duration.
pub const DEFAULT_RECURRENCE_DURATIONS: f64 = 10.0;

impl ModeGrid {
    pub fn new(omega_b: f64, n_modes: usize) -> Result<Self> {
        if !(omega_b.is_finite() && omega_b > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega_b",
                reason: format!("bandwidth must be > 0 rad/s, got {omega_b}"),
            });
        }
        if n_modes < 2 {
            return Err(Error::InvalidParameter {
                name: "n_modes",
                reason: format!("need at least 2 modes, got {n_modes}"),
            });
        }
        Ok(Self::from_spacing(
            omega_b,
            2.0 * omega_b / n_modes as f64,
            n_modes,
        ))
    }

    fn from_spacing(omega_b: f64, delta_omega: f64, n_modes: usize) -> Self {
        let center = (n_modes as f64 + 1.0) / 2.0;
        let mut omegas = vec![0.0; n_modes];
        // exact mirror symmetry ω_k = -ω_{N+1-k}; the middle mode of odd N stays 0
        for k in 0..n_modes / 2 {
            let w = (k as f64 + 1.0 - center) * delta_omega;
            omegas[k] = w;
            omegas[n_modes - 1 - k] = -w;
        }
        Self {
            omega_b,
            delta_omega,
            omegas,
        }
    }

    /// Default grid for a pulse: bandwidth at least 8σ_ω, spacing exactly
    /// 2π/(10T), mode count rounded up to the next even integer. The bandwidth
    /// is then `N Δω / 2`, so it may exceed 8σ_ω by up to 2Δω.
    pub fn for_pulse(pulse: &PulseSpec) -> Result<Self> {
        let t = pulse.duration;
        let min_bandwidth = DEFAULT_BANDWIDTH_SIGMAS * pulse.spectral_sigma();
        let delta_omega = 2.0 * PI / (DEFAULT_RECURRENCE_DURATIONS * t);
        let mut n = (2.0 * min_bandwidth / delta_omega).ceil() as usize;
        n += n % 2;
        Ok(Self::from_spacing(
            n as f64 * delta_omega / 2.0,
            delta_omega,
            n,
        ))
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Continuum coupling per mode, √(κΔω/2π).
    pub fn mode_coupling(&self, kappa: f64) -> f64 {
        (kappa * self.delta_omega / (2.0 * PI)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_mode_grid() {
        let g = ModeGrid::new(1.0, 2).unwrap();
        assert_eq!(g.omegas(), &[-0.5, 0.5]);
        assert_eq!(g.delta_omega(), 1.0);
    }

    #[test]
    fn five_mode_grid() {
        let g = ModeGrid::new(5.0, 5).unwrap();
        assert_eq!(g.omegas(), &[-4.0, -2.0, 0.0, 2.0, 4.0]);
        assert_eq!(g.delta_omega(), 2.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(ModeGrid::new(0.0, 10).is_err());
        assert!(ModeGrid::new(-1.0, 10).is_err());
        assert!(ModeGrid::new(1.0, 1).is_err());
    }

    #[test]
    fn default_grid_for_three_microseconds() {
        let pulse = PulseSpec::gaussian(3.0e-6).unwrap();
        let sigma = pulse.spectral_sigma();
        assert!((sigma - 2.3094e6).abs() < 1e2);
        let g = ModeGrid::for_pulse(&pulse).unwrap();
        // 2·8σ/Δω = 176.4 → 177 → 178
        assert_eq!(g.n_modes(), 178);
        assert!((g.delta_omega() - 2.0944e5).abs() < 1e1);
        assert!(g.omega_b() >= 8.0 * sigma);
        assert!((g.omega_b() / 1.85e7 - 1.0).abs() < 0.01);
        assert_eq!(g.delta_omega() * pulse.duration, 2.0 * PI / 10.0);
    }

    #[test]
    fn doubling_duration_halves_rates() {
        let a = ModeGrid::for_pulse(&PulseSpec::gaussian(1.0e-6).unwrap()).unwrap();
        let b = ModeGrid::for_pulse(&PulseSpec::gaussian(2.0e-6).unwrap()).unwrap();
        assert_eq!(a.n_modes(), b.n_modes());
        assert!((a.omega_b() / b.omega_b() - 2.0).abs() < 1e-12);
        assert!((a.delta_omega() / b.delta_omega() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(1.0, -1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, 0.0).is_ok());
        assert!(PhysicalParams::new(1.0, f64::NAN, 0.0).is_err());
        assert!(PhysicalParams::new(-1.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, -1.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, 0.0).is_ok());
        let p = PhysicalParams::EU_MICROSPHERE
            .with_detuning(-3.0e6)
            .unwrap();
        assert_eq!(p.delta, -3.0e6);
        assert!(PulseSpec::gaussian(0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn grid_is_mirror_symmetric(omega_b in 1e-3f64..1e9, n in 2usize..400) {
            let g = ModeGrid::new(omega_b, n).unwrap();
            let w = g.omegas();
            for k in 0..n {
                proptest::prop_assert_eq!(w[k] + w[n - 1 - k], 0.0);
            }
            proptest::prop_assert!(w.iter().sum::<f64>().abs() <= 1e-12 * omega_b);
        }
    }
}
