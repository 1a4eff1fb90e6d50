//! Two-ion phase-flip gate built from three photon reflections and two
//! half-wave-plate rotations:
//!
//! ```text
//! U₁₂ |φ⟩₁₂ |φ⟩_p = U₁p R_p U₂p R_p U₁p |φ⟩₁₂ |φ⟩_p,   |φ⟩_p = (|H⟩ + |V⟩)/√2
//! ```
//!
//! Amplitudes are indexed `(atom1, atom2, polarization)` with `|0⟩ = 0`,
//! `|1⟩ = 1`, `H = 0`, `V = 1`; the multimode state appends a mode index.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::SpectralAmplitudes;
use crate::scattering::ScatteringProfile;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const H: usize = 0;
const V: usize = 1;

/// Which ion a reflection addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Atom {
    First,
    Second,
}

impl Atom {
    fn level(self, pair: usize) -> usize {
        match self {
            Atom::First => pair >> 1,
            Atom::Second => pair & 1,
        }
    }
}

/// Half-wave plate: `R|H⟩ = (-|H⟩ + |V⟩)/√2`, `R|V⟩ = (|H⟩ + |V⟩)/√2`.
///
/// The matrix is real, symmetric and orthogonal with determinant -1, so it
/// is a reflection and `R² = 1`.
pub const HWP_MATRIX: [[f64; 2]; 2] = [
    [
        -std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    ],
    [
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    ],
];

fn rotate_pair(h: Complex64, v: Complex64) -> (Complex64, Complex64) {
    let m = HWP_MATRIX;
    (m[0][0] * h + m[0][1] * v, m[1][0] * h + m[1][1] * v)
}

pub trait HalfWavePlate: Sized {
    fn hwp_rotation(&self) -> Self;
}

/// Two ions and a single polarization qubit: 8 amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealJointState {
    pub amplitudes: [Complex64; 8],
}

impl IdealJointState {
    fn index(pair: usize, pol: usize) -> usize {
        2 * pair + pol
    }

    /// `(β₁₀|0⟩ + β₁₁|1⟩) ⊗ (β₂₀|0⟩ + β₂₁|1⟩) ⊗ (p_H|H⟩ + p_V|V⟩)`.
    pub fn product(atom1: [Complex64; 2], atom2: [Complex64; 2], photon: [Complex64; 2]) -> Self {
        let mut amplitudes = [ZERO; 8];
        for (pair, slot) in amplitudes.chunks_exact_mut(2).enumerate() {
            let a = atom1[pair >> 1] * atom2[pair & 1];
            slot[H] = a * photon[H];
            slot[V] = a * photon[V];
        }
        Self { amplitudes }
    }

    /// Atoms in the given pair state, photon in `(|H⟩ + |V⟩)/√2`.
    pub fn with_diagonal_photon(atoms: [Complex64; 4]) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amplitudes = [ZERO; 8];
        for (pair, a) in atoms.iter().enumerate() {
            amplitudes[Self::index(pair, H)] = a * h;
            amplitudes[Self::index(pair, V)] = a * h;
        }
        Self { amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Atom-pair amplitudes, assuming the photon factor `(|H⟩ + |V⟩)/√2`.
    pub fn atom_amplitudes(&self) -> [Complex64; 4] {
        let s = std::f64::consts::SQRT_2;
        std::array::from_fn(|pair| {
            0.5 * s
                * (self.amplitudes[Self::index(pair, H)] + self.amplitudes[Self::index(pair, V)])
        })
    }

    /// Largest `|a_H - a_V|` over atom pairs; zero iff the photon factors out
    /// as `(|H⟩ + |V⟩)/√2`.
    pub fn diagonal_photon_deviation(&self) -> f64 {
        (0..4)
            .map(|pair| {
                (self.amplitudes[Self::index(pair, H)] - self.amplitudes[Self::index(pair, V)])
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

impl HalfWavePlate for IdealJointState {
    fn hwp_rotation(&self) -> Self {
        let mut out = *self;
        for slot in out.amplitudes.chunks_exact_mut(2) {
            let (h, v) = rotate_pair(slot[H], slot[V]);
            slot[H] = h;
            slot[V] = v;
        }
        out
    }
}

/// `U = exp(iπ |0⟩⟨0|_atom ⊗ |H⟩⟨H|)` on the selected ion.
pub fn ideal_cpf_atom_photon(state: &IdealJointState, atom: Atom) -> IdealJointState {
    let mut out = *state;
    for (pair, slot) in out.amplitudes.chunks_exact_mut(2).enumerate() {
        if atom.level(pair) == 0 {
            slot[H] = -slot[H];
        }
    }
    out
}

/// `U₁₂ = exp(iπ |0⟩⟨0|₁ ⊗ |0⟩⟨0|₂)`, identity on the photon.
pub fn ideal_cpf_atoms(state: &IdealJointState) -> IdealJointState {
    let mut out = *state;
    out.amplitudes[0] = -out.amplitudes[0];
    out.amplitudes[1] = -out.amplitudes[1];
    out
}

/// Largest deviation tolerated from `(|H⟩ + |V⟩)/√2` at composition input.
pub const DIAGONAL_PHOTON_TOLERANCE: f64 = 1e-12;

/// Reflection off ion 1, plate, ion 2, plate, ion 1.
pub fn compose_ideal_cpf(state: &IdealJointState) -> Result<IdealJointState> {
    let deviation = state.diagonal_photon_deviation();
    if deviation > DIAGONAL_PHOTON_TOLERANCE {
        return Err(Error::PhotonNotDiagonal { deviation });
    }
    let s = ideal_cpf_atom_photon(state, Atom::First);
    let s = s.hwp_rotation();
    let s = ideal_cpf_atom_photon(&s, Atom::Second);
    let s = s.hwp_rotation();
    Ok(ideal_cpf_atom_photon(&s, Atom::First))
}

/// Two ions, polarization and `N` spectral modes: `8 N` amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultimodeJointState {
    omegas: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

impl MultimodeJointState {
    /// Atom pair state ⊗ `c(0)` ⊗ `(|H⟩ + |V⟩)/√2`.
    pub fn prepare(atoms: [Complex64; 4], c0: &SpectralAmplitudes, omegas: &[f64]) -> Result<Self> {
        if c0.len() != omegas.len() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for {} modes",
                c0.len(),
                omegas.len()
            )));
        }
        let n = omegas.len();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amplitudes = vec![ZERO; 8 * n];
        for (pair, a) in atoms.iter().enumerate() {
            for pol in [H, V] {
                let base = (2 * pair + pol) * n;
                for (slot, c) in amplitudes[base..base + n].iter_mut().zip(&c0.values) {
                    *slot = a * h * c;
                }
            }
        }
        Ok(Self {
            omegas: omegas.to_vec(),
            amplitudes,
        })
    }

    /// Real product input `√x₁|0⟩ + √(1-x₁)|1⟩` ⊗ `√x₂|0⟩ + √(1-x₂)|1⟩`.
    pub fn prepare_real(x1: f64, x2: f64, c0: &SpectralAmplitudes, omegas: &[f64]) -> Result<Self> {
        for (name, x) in [("x1", x1), ("x2", x2)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Domain {
                    quantity: name,
                    value: x,
                    range: "[0, 1]",
                });
            }
        }
        let a = [x1.sqrt(), (1.0 - x1).sqrt()];
        let b = [x2.sqrt(), (1.0 - x2).sqrt()];
        let atoms = std::array::from_fn(|pair| Complex64::from(a[pair >> 1] * b[pair & 1]));
        Self::prepare(atoms, c0, omegas)
    }

    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Mode amplitudes of one `(atom pair, polarization)` block.
    pub fn block(&self, pair: usize, pol: usize) -> &[Complex64] {
        let n = self.n_modes();
        let base = (2 * pair + pol) * n;
        &self.amplitudes[base..base + n]
    }

    fn block_mut(&mut self, pair: usize, pol: usize) -> &mut [Complex64] {
        let n = self.n_modes();
        let base = (2 * pair + pol) * n;
        &mut self.amplitudes[base..base + n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest `|a_H(ω) - a_V(ω)|`; zero iff the polarization is
    /// `(|H⟩ + |V⟩)/√2` for every atom pair and mode.
    pub fn diagonal_photon_deviation(&self) -> f64 {
        (0..4)
            .flat_map(|pair| {
                self.block(pair, H)
                    .iter()
                    .zip(self.block(pair, V))
                    .map(|(h, v)| (h - v).norm())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    /// Ideal output: `U₁₂` on the atoms and `e^{-iω_k t}` on every mode.
    pub fn ideally_transformed(&self, elapsed: f64) -> Self {
        let mut out = self.clone();
        let phases: Vec<Complex64> = self
            .omegas
            .iter()
            .map(|&w| Complex64::from_polar(1.0, -w * elapsed))
            .collect();
        for pair in 0..4 {
            let sign = if pair == 0 { -1.0 } else { 1.0 };
            for pol in [H, V] {
                for (a, p) in out.block_mut(pair, pol).iter_mut().zip(&phases) {
                    *a *= sign * p;
                }
            }
        }
        out
    }
}

impl HalfWavePlate for MultimodeJointState {
    fn hwp_rotation(&self) -> Self {
        let mut out = self.clone();
        let n = self.n_modes();
        for pair in 0..4 {
            let base = 2 * pair * n;
            let (hs, vs) = out.amplitudes[base..base + 2 * n].split_at_mut(n);
            for (h, v) in hs.iter_mut().zip(vs.iter_mut()) {
                (*h, *v) = rotate_pair(*h, *v);
            }
        }
        out
    }
}

fn check_profile(state: &MultimodeJointState, profile: &ScatteringProfile) -> Result<()> {
    if profile.omegas != state.omegas {
        return Err(Error::GridMismatch(format!(
            "profile over {} modes, state over {} modes",
            profile.n_modes(),
            state.n_modes()
        )));
    }
    Ok(())
}

/// Reflection of the pulse off the cavity holding `atom`.
///
/// H amplitudes pick up `r₀(ω_k)` or `r₁(ω_k)` according to the ion's level;
/// every amplitude then propagates freely for `duration`. Masked modes carry
/// `r = 0` and are lost.
pub fn realistic_reflection(
    state: &MultimodeJointState,
    atom: Atom,
    profile: &ScatteringProfile,
    duration: f64,
) -> Result<MultimodeJointState> {
    check_profile(state, profile)?;
    let phases: Vec<Complex64> = state
        .omegas
        .iter()
        .map(|&w| Complex64::from_polar(1.0, -w * duration))
        .collect();
    let mut out = state.clone();
    for pair in 0..4 {
        let r = match atom.level(pair) {
            0 => &profile.r0,
            _ => &profile.r1,
        };
        for ((a, p), r) in out.block_mut(pair, H).iter_mut().zip(&phases).zip(r) {
            *a *= r * p;
        }
        for (a, p) in out.block_mut(pair, V).iter_mut().zip(&phases) {
            *a *= p;
        }
    }
    Ok(out)
}

/// Applies the five-step sequence and returns the output with its fidelity
/// `|⟨ideal|actual⟩|²` against `U₁₂` ⊗ three free propagations of the input.
pub fn compose_realistic_cpf(
    state: &MultimodeJointState,
    first: &ScatteringProfile,
    second: &ScatteringProfile,
    duration: f64,
) -> Result<(MultimodeJointState, f64)> {
    let deviation = state.diagonal_photon_deviation();
    if deviation > DIAGONAL_PHOTON_TOLERANCE {
        return Err(Error::PhotonNotDiagonal { deviation });
    }
    check_profile(state, first)?;
    check_profile(state, second)?;
    let s = realistic_reflection(state, Atom::First, first, duration)?;
    let s = s.hwp_rotation();
    let s = realistic_reflection(&s, Atom::Second, second, duration)?;
    let s = s.hwp_rotation();
    let s = realistic_reflection(&s, Atom::First, first, duration)?;
    let ideal = state.ideally_transformed(3.0 * duration);
    let fidelity = ideal.inner(&s).norm_sqr();
    Ok((s, fidelity))
}

/// One point of the two-ion fidelity map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateFidelityPoint {
    /// `|β₁₀|²`.
    pub beta1_sq: f64,
    /// `|β₂₀|²`.
    pub beta2_sq: f64,
    pub fidelity: f64,
}

/// Composite fidelity over a `points × points` grid of real product inputs
/// with `|β₁₀|², |β₂₀|² ∈ [0, 1]`, in row-major order of `(β₁₀², β₂₀²)`.
pub fn fidelity_map(
    c0: &SpectralAmplitudes,
    omegas: &[f64],
    first: &ScatteringProfile,
    second: &ScatteringProfile,
    duration: f64,
    points: usize,
) -> Result<Vec<GateFidelityPoint>> {
    let axis: Vec<f64> = match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect(),
    };
    let mut out = Vec::with_capacity(points * points);
    for &x1 in &axis {
        for &x2 in &axis {
            let state = MultimodeJointState::prepare_real(x1, x2, c0, omegas)?;
            let (_, fidelity) = compose_realistic_cpf(&state, first, second, duration)?;
            out.push(GateFidelityPoint {
                beta1_sq: x1,
                beta2_sq: x2,
                fidelity,
            });
        }
    }
    Ok(out)
}
