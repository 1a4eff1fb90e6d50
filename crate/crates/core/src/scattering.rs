//! Per-mode reflection of the pulse, extracted from the time-domain dynamics
//! and, independently, from frequency-domain input-output theory.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::EvolutionReport;
use crate::error::{Error, Result};
use crate::model::{ModeGrid, PhysicalParams};
use crate::pulse::SpectralAmplitudes;

/// Modes with initial weight below this fraction of the peak carry no
/// meaningful phase and are masked.
pub const MASK_THRESHOLD: f64 = 1e-6;

/// Reflection phase relative to free propagation, per mode and branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub omegas: Vec<f64>,
    /// Ion in `|0⟩`, radians in (-π, π].
    pub dtheta0: Vec<f64>,
    /// Ion in `|1⟩`, radians in (-π, π].
    pub dtheta1: Vec<f64>,
    /// `|c_k(0)|²`.
    pub weights: Vec<f64>,
}

/// Complex reflection coefficient per mode for one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reflection {
    /// `r(ω_k)`; zero on masked modes.
    pub values: Vec<Complex64>,
    pub valid: Vec<bool>,
}

/// Frequency-diagonal summary of both branches on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringProfile {
    pub omegas: Vec<f64>,
    pub r0: Vec<Complex64>,
    pub r1: Vec<Complex64>,
    pub valid_mask: Vec<bool>,
}

/// Reduces an angle to (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn propagated(c0: &SpectralAmplitudes, grid: &ModeGrid, duration: f64) -> Vec<Complex64> {
    c0.values
        .iter()
        .zip(grid.omegas())
        .map(|(c, &w)| c * Complex64::from_polar(1.0, -w * duration))
        .collect()
}

fn check_report(
    report: &EvolutionReport,
    c0: &SpectralAmplitudes,
    grid: &ModeGrid,
    duration: f64,
) -> Result<()> {
    let n = grid.n_modes();
    if report.final_state.modes.len() != n || c0.len() != n {
        return Err(Error::GridMismatch(format!(
            "report has {} modes, amplitudes {}, grid {}",
            report.final_state.modes.len(),
            c0.len(),
            n
        )));
    }
    if report.duration != duration {
        return Err(Error::GridMismatch(format!(
            "report evolved for {:e} s, expected {:e} s",
            report.duration, duration
        )));
    }
    Ok(())
}

/// `Δθ(ω_k) = arg c_k(T) - arg[e^{-iω_k T} c_k(0)]` for both branches.
pub fn phase_profile(
    report0: &EvolutionReport,
    report1: &EvolutionReport,
    c0: &SpectralAmplitudes,
    grid: &ModeGrid,
    duration: f64,
) -> Result<PhaseProfile> {
    check_report(report0, c0, grid, duration)?;
    check_report(report1, c0, grid, duration)?;
    let reference = propagated(c0, grid, duration);
    // arg(a b*) is already in (-π, π]
    let relative = |report: &EvolutionReport| -> Vec<f64> {
        report
            .final_state
            .modes
            .iter()
            .zip(&reference)
            .map(|(c, r)| (c * r.conj()).arg())
            .collect()
    };
    Ok(PhaseProfile {
        omegas: grid.omegas().to_vec(),
        dtheta0: relative(report0),
        dtheta1: relative(report1),
        weights: c0.weights(),
    })
}

/// Per-mode mask: weight at least [`MASK_THRESHOLD`] times the peak weight.
pub fn valid_modes(c0: &SpectralAmplitudes) -> Vec<bool> {
    let weights = c0.weights();
    let peak = weights.iter().cloned().fold(0.0, f64::max);
    weights
        .iter()
        .map(|&w| w > 0.0 && w >= MASK_THRESHOLD * peak)
        .collect()
}

/// `r(ω_k) = c_k(T) e^{iω_k T} / c_k(0)` on valid modes.
pub fn extract_reflection(
    report: &EvolutionReport,
    c0: &SpectralAmplitudes,
    grid: &ModeGrid,
    duration: f64,
) -> Result<Reflection> {
    check_report(report, c0, grid, duration)?;
    let valid = valid_modes(c0);
    if !valid.iter().any(|&v| v) {
        return Err(Error::AllModesMasked);
    }
    let values = report
        .final_state
        .modes
        .iter()
        .zip(&c0.values)
        .zip(grid.omegas())
        .zip(&valid)
        .map(|(((ct, c), &w), &ok)| {
            if ok {
                ct * Complex64::from_polar(1.0, w * duration) / c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Reflection { values, valid })
}

/// Single-sided cavity reflection from input-output theory,
/// `r(ω) = 1 - κ / [κ/2 - iω + g²/(γ/2 - i(ω - δ))]`, with `g` replaced by 0
/// for the uncoupled branch.
pub fn analytic_reflection(omega: f64, params: &PhysicalParams, coupled: bool) -> Complex64 {
    let kappa = params.kappa;
    let mut denominator = Complex64::new(kappa / 2.0, -omega);
    if coupled && params.g > 0.0 {
        let atom = Complex64::new(params.gamma / 2.0, -(omega - params.delta));
        denominator += params.g * params.g / atom;
    }
    Complex64::new(1.0, 0.0) - kappa / denominator
}

impl ScatteringProfile {
    pub fn from_reports(
        report0: &EvolutionReport,
        report1: &EvolutionReport,
        c0: &SpectralAmplitudes,
        grid: &ModeGrid,
        duration: f64,
    ) -> Result<Self> {
        let a = extract_reflection(report0, c0, grid, duration)?;
        let b = extract_reflection(report1, c0, grid, duration)?;
        Ok(Self {
            omegas: grid.omegas().to_vec(),
            r0: a.values,
            r1: b.values,
            valid_mask: a.valid,
        })
    }

    /// Perfect conditional phase flip: `r₀ ≡ -1`, `r₁ ≡ +1` on every mode.
    pub fn ideal(grid: &ModeGrid) -> Self {
        let n = grid.n_modes();
        Self {
            omegas: grid.omegas().to_vec(),
            r0: vec![Complex64::new(-1.0, 0.0); n],
            r1: vec![Complex64::new(1.0, 0.0); n],
            valid_mask: vec![true; n],
        }
    }

    /// Input-output-theory reflections on the valid modes of `c0`.
    pub fn analytic(grid: &ModeGrid, params: &PhysicalParams, c0: &SpectralAmplitudes) -> Self {
        let valid = valid_modes(c0);
        let pick = |coupled: bool| -> Vec<Complex64> {
            grid.omegas()
                .iter()
                .zip(&valid)
                .map(|(&w, &ok)| {
                    if ok {
                        analytic_reflection(w, params, coupled)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        };
        Self {
            omegas: grid.omegas().to_vec(),
            r0: pick(false),
            r1: pick(true),
            valid_mask: valid,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_coupled, evolve_uncoupled, AmplitudeState, Branch, Method};
    use crate::model::PulseSpec;
    use crate::pulse::spectral_amplitudes;

    fn free_report(c0: &SpectralAmplitudes, grid: &ModeGrid, t: f64, sign: f64) -> EvolutionReport {
        let modes: Vec<Complex64> = propagated(c0, grid, t)
            .into_iter()
            .map(|c| c * sign)
            .collect();
        EvolutionReport {
            branch: Branch::Uncoupled,
            method: Method::Exact,
            duration: t,
            final_state: AmplitudeState {
                modes,
                cavity: Complex64::new(0.0, 0.0),
                excited: Complex64::new(0.0, 0.0),
            },
            norm_leak: 0.0,
            cavity_residual: 0.0,
            excited_residual: 0.0,
            steps: 1,
            decay_integral: None,
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn free_propagation_has_unit_reflection() {
        let pulse = PulseSpec::gaussian(3.0e-6).unwrap();
        let grid = ModeGrid::for_pulse(&pulse).unwrap();
        let c0 = spectral_amplitudes(&pulse, &grid).unwrap();
        let t = pulse.duration;
        let free = free_report(&c0, &grid, t, 1.0);
        let r = extract_reflection(&free, &c0, &grid, t).unwrap();
        for (v, ok) in r.values.iter().zip(&r.valid) {
            if *ok {
                assert!((v - 1.0).norm() < 1e-12);
            }
        }
        let prof = phase_profile(&free, &free, &c0, &grid, t).unwrap();
        assert!(prof.dtheta0.iter().all(|&d| d == 0.0));
        assert!((prof.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_limits() {
        let p = PhysicalParams::EU_MICROSPHERE;
        assert_eq!(
            analytic_reflection(0.0, &p, false),
            Complex64::new(-1.0, 0.0)
        );
        let r1 = analytic_reflection(0.0, &p, true);
        let expect = 1.0 - p.kappa / (p.kappa / 2.0 + 2.0 * p.g * p.g / p.gamma);
        assert!((r1.re - expect).abs() < 1e-15);
        assert!(r1.im.abs() < 1e-15);
        assert!((1.0 - r1.re - 1.6e-8).abs() < 1e-10);

        let lossless = PhysicalParams { gamma: 0.0, ..p };
        for w in [-3e7, -1e6, 0.5, 2e6, 4e8] {
            for coupled in [false, true] {
                let r = analytic_reflection(w, &lossless, coupled);
                assert!(
                    (r.norm() - 1.0).abs() < 1e-12,
                    "ω = {w}: |r| = {}",
                    r.norm()
                );
            }
        }
    }

    #[test]
    fn bare_cavity_flips_resonant_phase() {
        let p = PhysicalParams::EU_MICROSPHERE;
        let pulse = PulseSpec::gaussian(3.0e-6).unwrap();
        let grid = ModeGrid::for_pulse(&pulse).unwrap();
        let c0 = spectral_amplitudes(&pulse, &grid).unwrap();
        let t = pulse.duration;
        let r0 = evolve_uncoupled(&c0, &p, &grid, &pulse, Method::Exact).unwrap();
        let r1 = evolve_coupled(&c0, &p, &grid, &pulse, Method::Exact).unwrap();
        let a = extract_reflection(&r0, &c0, &grid, t).unwrap();
        let b = extract_reflection(&r1, &c0, &grid, t).unwrap();
        let mid = grid.n_modes() / 2;
        for k in [mid - 1, mid] {
            assert!((a.values[k].norm() - 1.0).abs() < 0.02);
            assert!((a.values[k].arg().abs() - PI).abs() < 0.02);
            assert!((b.values[k] - 1.0).norm() < 0.02);
        }
        // the map is not exactly frequency-diagonal at finite T, so single
        // modes may exceed |r| = 1 slightly; the reflected norm may not
        for refl in [&a, &b] {
            let reflected: f64 = refl
                .values
                .iter()
                .zip(&c0.values)
                .map(|(r, c)| (r * c).norm_sqr())
                .sum();
            assert!(reflected <= 1.0 + 1e-6, "{reflected}");
        }
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let pulse = PulseSpec::gaussian(3.0e-6).unwrap();
        let grid = ModeGrid::for_pulse(&pulse).unwrap();
        let c0 = spectral_amplitudes(&pulse, &grid).unwrap();
        let other = ModeGrid::new(grid.omega_b(), grid.n_modes() + 2).unwrap();
        let c_other = spectral_amplitudes(&pulse, &other).unwrap();
        let rep = free_report(&c_other, &other, pulse.duration, 1.0);
        assert!(matches!(
            extract_reflection(&rep, &c0, &grid, pulse.duration),
            Err(Error::GridMismatch(_))
        ));
        let rep = free_report(&c0, &grid, pulse.duration, 1.0);
        assert!(phase_profile(&rep, &rep, &c0, &grid, 1.0e-6).is_err());
    }

    #[test]
    fn empty_pulse_masks_everything() {
        let pulse = PulseSpec::gaussian(3.0e-6).unwrap();
        let grid = ModeGrid::for_pulse(&pulse).unwrap();
        let c0 = SpectralAmplitudes {
            values: vec![Complex64::new(0.0, 0.0); grid.n_modes()],
        };
        let rep = free_report(&c0, &grid, pulse.duration, 1.0);
        assert_eq!(
            extract_reflection(&rep, &c0, &grid, pulse.duration),
            Err(Error::AllModesMasked)
        );
    }

    #[test]
    fn decoupled_cavity_leaves_phases_untouched() {
        let pulse = PulseSpec::gaussian(3.0e-6).unwrap();
        let grid = ModeGrid::for_pulse(&pulse).unwrap();
        let c0 = spectral_amplitudes(&pulse, &grid).unwrap();
        let params = PhysicalParams::new(1.0e9, 0.0, 1.0e3).unwrap();
        let r0 = evolve_uncoupled(&c0, &params, &grid, &pulse, Method::Exact).unwrap();
        let r1 = evolve_coupled(&c0, &params, &grid, &pulse, Method::Exact).unwrap();
        let profile = phase_profile(&r0, &r1, &c0, &grid, pulse.duration).unwrap();
        for (d0, d1) in profile.dtheta0.iter().zip(&profile.dtheta1) {
            assert!(d0.abs() < 1e-12 && d1.abs() < 1e-12, "{d0} {d1}");
        }
    }
}
