//! Atom-photon phase-flip gate fidelity.
//!
//! For an ion prepared in `β₀|0⟩ + β₁|1⟩` and a photon in `(|H⟩ + |V⟩)/√2`,
//! the overlap with the ideally flipped and freely propagated state is
//!
//! ```text
//! F(x) = ¼ |ξ₁ x + ξ₂ (1 - x) + 1|²,   x = |β₀|²
//! ```
//!
//! where `ξ₁`, `ξ₂` are the branch overlaps between the reflected wavepacket
//! and the propagated input (with `ξ₁` sign-flipped so that a perfect π
//! reflection gives `ξ₁ = 1`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Branch, EvolutionReport};
use crate::error::{Error, Result};
use crate::model::{ModeGrid, PhysicalParams};
use crate::pulse::SpectralAmplitudes;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiPair {
    pub xi1: Complex64,
    pub xi2: Complex64,
}

/// Coefficients of `F(x) = ¼ (s₂x² + s₁x + s₀)` and its minimum on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub x_min: f64,
    pub f_min: f64,
}

impl FidelityCurve {
    pub fn new(xi: &XiPair) -> Self {
        let (s0, s1, s2) = xi.quadratic_coefficients();
        let (x_min, f_min) = minimize(s0, s1, s2);
        Self {
            s0,
            s1,
            s2,
            x_min,
            f_min,
        }
    }

    /// `F(x)`, no range check.
    pub fn at(&self, x: f64) -> f64 {
        0.25 * (self.s2 * x * x + self.s1 * x + self.s0)
    }
}

impl XiPair {
    pub fn new(xi1: Complex64, xi2: Complex64) -> Self {
        Self { xi1, xi2 }
    }

    /// `(s₀, s₁, s₂) = (|ξ₂+1|², 2 Re[(ξ₂* + 1)(ξ₁ - ξ₂)], |ξ₁-ξ₂|²)`.
    pub fn quadratic_coefficients(&self) -> (f64, f64, f64) {
        let one = Complex64::new(1.0, 0.0);
        let diff = self.xi1 - self.xi2;
        let s0 = (self.xi2 + one).norm_sqr();
        let s1 = 2.0 * ((self.xi2.conj() + one) * diff).re;
        let s2 = diff.norm_sqr();
        (s0, s1, s2)
    }
}

/// `ξ₁ = -Σ [e^{-iω_kT} c_k(0)]* c_k(T)` from the uncoupled branch and
/// `ξ₂ = Σ [e^{-iω_kT} c_k(0)]* c'_k(T)` from the coupled one.
pub fn xi_coefficients(
    report0: &EvolutionReport,
    report1: &EvolutionReport,
    c0: &SpectralAmplitudes,
    grid: &ModeGrid,
    duration: f64,
) -> Result<XiPair> {
    if report0.branch != Branch::Uncoupled || report1.branch != Branch::Coupled {
        return Err(Error::GridMismatch(
            "expected (uncoupled, coupled) reports".to_string(),
        ));
    }
    let overlap = |report: &EvolutionReport| -> Result<Complex64> {
        if report.final_state.modes.len() != grid.n_modes()
            || c0.len() != grid.n_modes()
            || report.duration != duration
        {
            return Err(Error::GridMismatch(format!(
                "report with {} modes over {:e} s for a {}-mode grid over {:e} s",
                report.final_state.modes.len(),
                report.duration,
                grid.n_modes(),
                duration
            )));
        }
        Ok(report
            .final_state
            .modes
            .iter()
            .zip(&c0.values)
            .zip(grid.omegas())
            .map(|((ct, c), &w)| (Complex64::from_polar(1.0, -w * duration) * c).conj() * ct)
            .sum())
    };
    Ok(XiPair {
        xi1: -overlap(report0)?,
        xi2: overlap(report1)?,
    })
}

/// `F(x) = ¼ (s₂x² + s₁x + s₀)` for `x = |β₀|² ∈ [0, 1]`.
pub fn fidelity_quadratic(xi: &XiPair, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            quantity: "x",
            value: x,
            range: "[0, 1]",
        });
    }
    let (s0, s1, s2) = xi.quadratic_coefficients();
    Ok(0.25 * (s2 * x * x + s1 * x + s0))
}

/// Worst-case fidelity over the atomic input weight, `(x_min, F_min)`.
pub fn fidelity_min(xi: &XiPair) -> (f64, f64) {
    let (s0, s1, s2) = xi.quadratic_coefficients();
    minimize(s0, s1, s2)
}

fn minimize(s0: f64, s1: f64, s2: f64) -> (f64, f64) {
    let at = |x: f64| 0.25 * (s2 * x * x + s1 * x + s0);
    if s2 == 0.0 {
        // linear in x: cheaper endpoint
        let (f0, f1) = (at(0.0), at(1.0));
        return if f1 < f0 { (1.0, f1) } else { (0.0, f0) };
    }
    let vertex = -s1 / (2.0 * s2);
    if vertex < 0.0 {
        (0.0, 0.25 * s0)
    } else if vertex > 1.0 {
        (1.0, 0.25 * (s0 + s1 + s2))
    } else {
        (vertex, 0.25 * (s0 - s1 * s1 / (4.0 * s2)))
    }
}

/// Brute-force fidelity: builds the full atom ⊗ (modes, cavity, excited, V)
/// final state and the ideal one, then returns `|⟨ideal|actual⟩|²`.
///
/// Cavity and excited-state amplitudes have no counterpart in the ideal
/// state, so tracing out the cavity reduces to this overlap.
pub fn overlap_fidelity(
    report0: &EvolutionReport,
    report1: &EvolutionReport,
    c0: &SpectralAmplitudes,
    grid: &ModeGrid,
    duration: f64,
    beta0: Complex64,
) -> Result<f64> {
    if beta0.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain {
            quantity: "|beta0|",
            value: beta0.norm(),
            range: "[0, 1]",
        });
    }
    let n = grid.n_modes();
    for report in [report0, report1] {
        if report.final_state.modes.len() != n || c0.len() != n || report.duration != duration {
            return Err(Error::GridMismatch(
                "reports, amplitudes and grid disagree".to_string(),
            ));
        }
    }
    let beta1 = Complex64::from((1.0 - beta0.norm_sqr()).max(0.0).sqrt());
    let h = std::f64::consts::FRAC_1_SQRT_2;

    // per atomic state: N H-modes, cavity, excited, V
    let block = n + 3;
    let mut actual = vec![Complex64::new(0.0, 0.0); 2 * block];
    let mut ideal = actual.clone();
    for (atom, beta, report, sign) in [(0, beta0, report0, -1.0), (1, beta1, report1, 1.0)] {
        let base = atom * block;
        let fs = &report.final_state;
        for k in 0..n {
            actual[base + k] = h * beta * fs.modes[k];
            let free = Complex64::from_polar(1.0, -grid.omegas()[k] * duration) * c0.values[k];
            ideal[base + k] = h * sign * beta * free;
        }
        actual[base + n] = h * beta * fs.cavity;
        actual[base + n + 1] = h * beta * fs.excited;
        actual[base + n + 2] = h * beta;
        ideal[base + n + 2] = h * beta;
    }
    let amplitude: Complex64 = ideal.iter().zip(&actual).map(|(a, b)| a.conj() * b).sum();
    Ok(amplitude.norm_sqr())
}

/// Per-gate spontaneous-emission loss `η ≈ 1 / [2 (1 + 2g²/κγ)]`.
pub fn spontaneous_loss(params: &PhysicalParams) -> Result<f64> {
    let kg = params.kappa * params.gamma;
    if kg == 0.0 {
        return Err(Error::DivisionByZero("kappa * gamma"));
    }
    Ok(1.0 / (2.0 * (1.0 + 2.0 * params.g * params.g / kg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn direct(xi: &XiPair, x: f64) -> f64 {
        0.25 * (xi.xi1 * x + xi.xi2 * (1.0 - x) + 1.0).norm_sqr()
    }

    fn grid_min(xi: &XiPair, points: usize) -> f64 {
        (0..points)
            .map(|i| direct(xi, i as f64 / (points - 1) as f64))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn ideal_gate_is_perfect() {
        let xi = XiPair::new(c(1.0, 0.0), c(1.0, 0.0));
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(fidelity_quadratic(&xi, x).unwrap(), 1.0);
        }
        assert_eq!(fidelity_min(&xi).1, 1.0);
    }

    #[test]
    fn orthogonal_outcome() {
        let xi = XiPair::new(c(-1.0, 0.0), c(1.0, 0.0));
        assert_eq!(fidelity_quadratic(&xi, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn small_flip_error_minimum_at_boundary() {
        let xi = XiPair::new(c(0.99, 0.0), c(1.0, 0.0));
        let (x, f) = fidelity_min(&xi);
        assert_eq!(x, 1.0);
        assert!((f - 0.990025).abs() < 1e-12);
        assert!((grid_min(&xi, 10_001) - 0.990025).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let xi = XiPair::new(c(1.0, 0.0), c(1.0, 0.0));
        assert!(fidelity_quadratic(&xi, -0.1).is_err());
        assert!(fidelity_quadratic(&xi, 1.1).is_err());
    }

    #[test]
    fn spontaneous_loss_values() {
        let p = PhysicalParams::EU_MICROSPHERE;
        let eta = spontaneous_loss(&p).unwrap();
        assert!((eta - 8.0e-9).abs() < 1e-12);
        let g0 = PhysicalParams { g: 0.0, ..p };
        assert_eq!(spontaneous_loss(&g0).unwrap(), 0.5);
        let lossless = PhysicalParams { gamma: 0.0, ..p };
        assert_eq!(
            spontaneous_loss(&lossless),
            Err(Error::DivisionByZero("kappa * gamma"))
        );
        let mut last = 0.5;
        for g in [1e6, 1e7, 1e8, 1e9, 1e10] {
            let eta = spontaneous_loss(&PhysicalParams { g, ..p }).unwrap();
            assert!(eta < last);
            last = eta;
        }
    }

    fn xi_strategy() -> impl Strategy<Value = XiPair> {
        (0.0f64..1.0, -3.2f64..3.2, 0.0f64..1.0, -3.2f64..3.2).prop_map(|(a, p, b, q)| {
            XiPair::new(Complex64::from_polar(a, p), Complex64::from_polar(b, q))
        })
    }

    proptest! {
        #[test]
        fn quadratic_form_identity(xi in xi_strategy(), x in 0.0f64..=1.0) {
            let f = fidelity_quadratic(&xi, x).unwrap();
            prop_assert!((f - direct(&xi, x)).abs() <= 1e-12);
            prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
        }

        #[test]
        fn minimum_matches_dense_grid(xi in xi_strategy()) {
            let (x, f) = fidelity_min(&xi);
            prop_assert!((0.0..=1.0).contains(&x));
            prop_assert!((f - direct(&xi, x)).abs() <= 1e-12);
            // the true minimum can only undercut the grid by the grid's
            // discretization, which is O(s2 h²)
            let g = grid_min(&xi, 10_000);
            prop_assert!(f <= g + 1e-12);
            let (_, _, s2) = xi.quadratic_coefficients();
            let h = 1.0 / 9_999.0;
            prop_assert!(g - f <= 0.25 * s2 * h * h + 1e-12);
        }

        #[test]
        fn curve_agrees_with_free_functions(xi in xi_strategy()) {
            let curve = FidelityCurve::new(&xi);
            prop_assert!(curve.s2 >= 0.0);
            prop_assert_eq!((curve.x_min, curve.f_min), fidelity_min(&xi));
            prop_assert!((curve.at(0.5) - direct(&xi, 0.5)).abs() <= 1e-12);
        }
    }
}
