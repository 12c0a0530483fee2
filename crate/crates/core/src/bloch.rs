//! Semiclassical steady state of the driven ladder atom in one velocity class.
//!
//! Operators are 3×3 matrices in the level basis; `σᵢⱼ = |i⟩⟨j|`. With the
//! mean fields treated as undepleted c-numbers the operator equations of
//! motion are linear in σ, so the steady state is a single linear solve.
//!
//! Sign convention: the rotating-frame Hamiltonian (ħ = 1) is
//!
//! ```text
//! H = −d₁σ₂₂ − (d₁ + d₂)σ₃₃ + g₁(a₁σ₂₁ + a₁†σ₁₂) + g₂(a₂σ₃₂ + a₂†σ₂₃)
//! ```
//!
//! which gives the weak-probe coherence ⟨σ₂₁⟩ = iΩ₁/(γ₁₂ + i d₁) and makes
//! γ₁₂ Im⟨σ₂₁⟩/Ω₁ a positive absorption.

use serde::{Deserialize, Serialize};

use crate::doppler::{self, VelocityClass};
use crate::error::{Error, Result};
use crate::fluctuations::conjugate_slot;
use crate::model::SystemParams;
use crate::numerics::{c64, conjugation_symmetric_stability, ComplexMatrix, LuFactor, C64};

pub type Op3 = [[C64; 3]; 3];

const ZERO: C64 = c64(0.0, 0.0);
const I: C64 = c64(0.0, 1.0);

/// Operator basis for mean values (1-based level pairs). Index 0 is σ₁₁, the
/// rest is the fluctuation basis.
pub const BASIS9: [(usize, usize); 9] = [(1, 1), (2, 2), (3, 3), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3)];

pub fn basis_index(i: usize, j: usize) -> usize {
    BASIS9
        .iter()
        .position(|&b| b == (i, j))
        .expect("level indices are 1..=3")
}

/// |i⟩⟨j| with 1-based indices.
pub fn projector(i: usize, j: usize) -> Op3 {
    let mut m = [[ZERO; 3]; 3];
    m[i - 1][j - 1] = c64(1.0, 0.0);
    m
}

pub fn op_mul(a: &Op3, b: &Op3) -> Op3 {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            if a[i][k] == ZERO {
                continue;
            }
            for j in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Commutator [a, b].
pub fn commutator(a: &Op3, b: &Op3) -> Op3 {
    let ab = op_mul(a, b);
    let ba = op_mul(b, a);
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = ab[i][j] - ba[i][j];
        }
    }
    out
}

/// Detunings seen by an atom in its rest frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedDetunings {
    /// Probe detuning (MHz).
    pub d1: f64,
    /// Pump detuning (MHz).
    pub d2: f64,
}

impl ShiftedDetunings {
    pub fn at_rest(params: &SystemParams) -> Self {
        Self {
            d1: params.field.delta1,
            d2: params.field.delta2,
        }
    }
}

/// Mean field amplitudes entering the atomic Hamiltonian. Complex so that
/// Wirtinger derivatives can be taken numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFields {
    pub alpha1: C64,
    pub alpha2: C64,
}

impl MeanFields {
    pub fn of(params: &SystemParams) -> Self {
        Self {
            alpha1: c64(params.field.alpha1, 0.0),
            alpha2: c64(params.field.alpha2, 0.0),
        }
    }
}

/// Relaxation part of the operator dynamics: radiative cascade 3→2→1 plus
/// extra pure dephasing bringing each coherence to its total rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Extra dephasing of pairs (1,2), (1,3), (2,3) beyond the radiative part.
    pub extra: [f64; 3],
}

impl Relaxation {
    pub fn of(params: &SystemParams) -> Self {
        let (g1, g2) = (params.decay.gamma1, params.decay.gamma2);
        let c = &params.coherence;
        Self {
            gamma1: g1,
            gamma2: g2,
            extra: [c.gamma12 - g1, c.gamma13 - g2, c.gamma23 - g1 - g2],
        }
    }

    /// Adjoint (Heisenberg-picture) relaxation map applied to operator `x`.
    pub fn apply(&self, x: &Op3) -> Op3 {
        let (g1, g2) = (self.gamma1, self.gamma2);
        let mut y = [[ZERO; 3]; 3];
        // L = √(2γ₁)σ₁₂:  L†xL = 2γ₁x₁₁σ₂₂, L†L = 2γ₁σ₂₂
        y[1][1] += x[0][0] * (2.0 * g1);
        // L = √(2γ₂)σ₂₃
        y[2][2] += x[1][1] * (2.0 * g2);
        let width = [0.0, g1, g2];
        for i in 0..3 {
            for j in 0..3 {
                y[i][j] -= x[i][j] * (width[i] + width[j]);
            }
        }
        for (k, &(i, j)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
            y[i][j] -= x[i][j] * self.extra[k];
            y[j][i] -= x[j][i] * self.extra[k];
        }
        y
    }
}

/// Full single-atom operator drift: i[H, x] plus relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomDrift {
    pub hamiltonian: Op3,
    pub relaxation: Relaxation,
}

impl AtomDrift {
    pub fn new(params: &SystemParams, shifted: ShiftedDetunings, fields: MeanFields) -> Self {
        let (g1, g2) = (params.couplings.g1, params.couplings.g2);
        let mut h = [[ZERO; 3]; 3];
        h[1][1] = c64(-shifted.d1, 0.0);
        h[2][2] = c64(-(shifted.d1 + shifted.d2), 0.0);
        // g₁(a₁σ₂₁ + a₁†σ₁₂) + g₂(a₂σ₃₂ + a₂†σ₂₃)
        h[1][0] = fields.alpha1 * g1;
        h[0][1] = fields.alpha1.conj() * g1;
        h[2][1] = fields.alpha2 * g2;
        h[1][2] = fields.alpha2.conj() * g2;
        Self {
            hamiltonian: h,
            relaxation: Relaxation::of(params),
        }
    }

    pub fn apply(&self, x: &Op3) -> Op3 {
        let c = commutator(&self.hamiltonian, x);
        let mut y = self.relaxation.apply(x);
        for i in 0..3 {
            for j in 0..3 {
                y[i][j] += I * c[i][j];
            }
        }
        y
    }

    /// 9×9 matrix G with d⟨σ_r⟩/dt = Σ_c G[r][c]⟨σ_c⟩ in [`BASIS9`] order.
    pub fn generator_matrix(&self) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(9, 9);
        for (r, &(k, l)) in BASIS9.iter().enumerate() {
            let y = self.apply(&projector(k, l));
            for (c, &(i, j)) in BASIS9.iter().enumerate() {
                g[(r, c)] = y[i - 1][j - 1];
            }
        }
        g
    }
}

/// Linear generator of the mean values, in full (9×9) and trace-reduced
/// affine (8×8 plus source) form: d⟨σ⟩/dt = G_red⟨σ⟩ + s over σ₂₂…σ₂₃.
#[derive(Debug, Clone)]
pub struct BlochGenerator {
    pub full: ComplexMatrix,
    pub reduced: ComplexMatrix,
    pub source: Vec<C64>,
}

impl BlochGenerator {
    pub fn from_full(full: ComplexMatrix) -> Self {
        // σ₁₁ = 1 − σ₂₂ − σ₃₃
        let reduced = ComplexMatrix::from_fn(8, 8, |m, n| {
            let mut v = full[(m + 1, n + 1)];
            if n < 2 {
                v -= full[(m + 1, 0)];
            }
            v
        });
        let source = (0..8).map(|m| full[(m + 1, 0)]).collect();
        Self { full, reduced, source }
    }
}

pub fn bloch_generator(params: &SystemParams, shifted: ShiftedDetunings) -> BlochGenerator {
    bloch_generator_with_fields(params, shifted, MeanFields::of(params))
}

pub fn bloch_generator_with_fields(
    params: &SystemParams,
    shifted: ShiftedDetunings,
    fields: MeanFields,
) -> BlochGenerator {
    BlochGenerator::from_full(AtomDrift::new(params, shifted, fields).generator_matrix())
}

/// Steady-state mean values ⟨σᵢⱼ⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanState {
    /// `sigma[i-1][j-1] = ⟨σᵢⱼ⟩`
    pub sigma: Op3,
}

impl MeanState {
    pub fn ground() -> Self {
        Self { sigma: projector(1, 1) }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.sigma[i - 1][j - 1]
    }

    /// ⟨x⟩ for x = Σ xᵢⱼ σᵢⱼ.
    pub fn expect(&self, x: &Op3) -> C64 {
        x.iter()
            .zip(&self.sigma)
            .flat_map(|(xr, sr)| xr.iter().zip(sr).map(|(a, b)| a * b))
            .sum()
    }

    pub fn trace_error(&self) -> f64 {
        (self.sigma[0][0] + self.sigma[1][1] + self.sigma[2][2] - 1.0).norm()
    }

    /// Largest deviation from ⟨σᵢⱼ⟩ = conj⟨σⱼᵢ⟩ and from real populations.
    pub fn hermiticity_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..3 {
            e = e.max(self.sigma[i][i].im.abs());
            for j in 0..3 {
                e = e.max((self.sigma[i][j] - self.sigma[j][i].conj()).norm());
            }
        }
        e
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.sigma[0][0].re, self.sigma[1][1].re, self.sigma[2][2].re]
    }
}

/// Steady state from an already-built generator, without the stability
/// check (callers that linearize check the same spectrum anyway).
pub fn steady_state_of(generator: &BlochGenerator) -> Result<MeanState> {
    let mut a = generator.full.clone();
    for c in 0..9 {
        a[(0, c)] = if c < 3 { c64(1.0, 0.0) } else { ZERO };
    }
    let mut b = vec![ZERO; 9];
    b[0] = c64(1.0, 0.0);
    let x = LuFactor::new(&a)?.solve(&b);
    let mut sigma = [[ZERO; 3]; 3];
    for (idx, &(i, j)) in BASIS9.iter().enumerate() {
        sigma[i - 1][j - 1] = x[idx];
    }
    Ok(MeanState { sigma })
}

/// Largest Re λ of a reduced generator in the fluctuation basis.
pub fn drift_stability(reduced: &ComplexMatrix) -> Result<f64> {
    conjugation_symmetric_stability(reduced, conjugate_slot)
}

pub fn steady_state(params: &SystemParams, shifted: ShiftedDetunings) -> Result<MeanState> {
    steady_state_with_fields(params, shifted, MeanFields::of(params))
}

pub fn steady_state_with_fields(
    params: &SystemParams,
    shifted: ShiftedDetunings,
    fields: MeanFields,
) -> Result<MeanState> {
    let generator = bloch_generator_with_fields(params, shifted, fields);
    let max_re = drift_stability(&generator.reduced)?;
    if max_re >= 0.0 {
        return Err(Error::NoSteadyState { max_re });
    }
    steady_state_of(&generator)
}

/// The three terms of the fifth-order perturbative probe absorption for one
/// velocity class: linear absorption, the EIT (three-photon) correction and
/// the two-step two-photon (five-photon) term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeTerms {
    pub linear: f64,
    pub eit: f64,
    pub two_step: f64,
}

impl PerturbativeTerms {
    pub fn total(&self) -> f64 {
        self.linear + self.eit + self.two_step
    }
}

pub fn perturbative_terms(params: &SystemParams, shifted: ShiftedDetunings) -> PerturbativeTerms {
    let c = &params.coherence;
    let (g12, g13, g23) = (c.gamma12, c.gamma13, c.gamma23);
    let (om1, om2) = (params.probe_rabi(), params.pump_rabi());
    let (d1, d2) = (shifted.d1, shifted.d2);
    let lor12 = g12 * g12 / (g12 * g12 + d1 * d1);
    let lor23 = g23 * g23 / (g23 * g23 + d2 * d2);
    let denom = c64(g12, d1) * c64(g12, d1) * c64(g13, d1 + d2);
    let eit = -(c64(g12 * om2 * om2, 0.0) / denom).re;
    let prefactor = om1 * om1 * om2 * om2 / (4.0 * params.decay.gamma1 * params.decay.gamma2 * g12 * g23);
    let two_step = if prefactor.is_finite() {
        prefactor * lor23 * lor12 * lor12
    } else {
        0.0
    };
    PerturbativeTerms {
        linear: lor12,
        eit,
        two_step,
    }
}

/// Doppler-averaged perturbative absorption at probe detuning `delta1`,
/// normalized to 1 for a stationary atom at line center with the pump off.
pub fn absorption_perturbative(params: &SystemParams, delta1: f64) -> Result<f64> {
    absorption_perturbative_with(params, delta1, perturbative_terms)
}

/// [`absorption_perturbative`] with a caller-supplied term evaluator.
pub fn absorption_perturbative_with(
    params: &SystemParams,
    delta1: f64,
    terms: impl Fn(&SystemParams, ShiftedDetunings) -> PerturbativeTerms,
) -> Result<f64> {
    let classes = doppler::build_classes(params, delta1, params.field.delta2)?;
    let values: Vec<f64> = classes.iter().map(|c| terms(params, c.shifted).total()).collect();
    doppler::average(&values, &classes)
}

/// Normalized absorption γ₁₂ Im⟨σ₂₁⟩ / (g₁α₁) of a single class.
pub fn class_absorption(params: &SystemParams, mean: &MeanState) -> f64 {
    let rabi = params.probe_rabi();
    if rabi == 0.0 {
        0.0
    } else {
        params.coherence.gamma12 * mean.get(2, 1).im / rabi
    }
}

/// Doppler average of the exact steady-state absorption.
pub fn absorption_exact(params: &SystemParams, delta1: f64) -> Result<f64> {
    let classes = doppler::build_classes(params, delta1, params.field.delta2)?;
    absorption_exact_over(params, &classes)
}

pub fn absorption_exact_over(params: &SystemParams, classes: &[VelocityClass]) -> Result<f64> {
    let values = classes
        .iter()
        .map(|c| Ok(class_absorption(params, &steady_state(params, c.shifted)?)))
        .collect::<Result<Vec<f64>>>()?;
    doppler::average(&values, classes)
}
