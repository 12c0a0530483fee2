//! Linearized quantum fluctuations of the two fields.
//!
//! Atomic fluctuations δσ (8 components, δσ₁₁ eliminated through the trace)
//! obey `dδσ/dt = B δσ + C δA + F` where δA = (δa₁, δa₁†, δa₂, δa₂†) and the
//! Langevin forces satisfy ⟨F_μ(t) F_ν(t′)⟩ = 2D_μν δ(t − t′) per atom. At a
//! Fourier frequency ω the atoms are solved algebraically and substituted into
//! the propagation equations
//!
//! ```text
//! c ∂z δa₁ = −i g₁ N δσ₁₂,   c ∂z δa₂ = −i g₂ N δσ₂₃   (and conjugates)
//! ```
//!
//! giving `∂z δA = M δA + ξ` with ⟨ξ ξ†⟩ = S δ(z − z′). Field moments are kept
//! as Σ_jk = ⟨δA_j δA_k†⟩ in shot-noise units: the vacuum has Σ = diag(1,0,1,0).
//! With N atoms and the Langevin correlators weighted by L/N, both M and S are
//! proportional to g²N/c, which is what makes every decoupled limit return
//! the vacuum exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{
    self, class_absorption, commutator, drift_stability, op_mul, projector, steady_state_of, BlochGenerator,
    MeanFields, MeanState, Op3, Relaxation, ShiftedDetunings,
};
use crate::doppler::{self, VelocityClass};
use crate::error::{Error, Result};
use crate::model::{SystemParams, SPEED_OF_LIGHT};
use crate::numerics::{
    c64, eigenvalues, gauss_legendre, hermitian_eigenvalues, matrix_exponential, solve_sylvester, ComplexMatrix,
    LuFactor, C64,
};

const ZERO: C64 = c64(0.0, 0.0);
const I: C64 = c64(0.0, 1.0);

/// Fluctuation basis: δσ₂₂, δσ₃₃, δσ₂₁, δσ₁₂, δσ₃₁, δσ₁₃, δσ₃₂, δσ₂₃.
/// Hermitian-conjugate pairs sit in adjacent slots after the populations.
pub const FLUCTUATION_BASIS: [(usize, usize); 8] = [(2, 2), (3, 3), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3)];

/// Field fluctuation order.
pub const FIELD_LABELS: [&str; 4] = ["a1", "a1+", "a2", "a2+"];

/// Slot of the Hermitian conjugate of basis element `m`.
pub const fn conjugate_slot(m: usize) -> usize {
    match m {
        0 | 1 => m,
        _ => m ^ 1,
    }
}

/// Atomic component that sources each field component.
const POLARIZATION_SLOT: [usize; 4] = [3, 2, 7, 6];
/// Phase of the source term for each field component.
const EMISSION_PHASE: [C64; 4] = [c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(0.0, 1.0)];

fn field_operator(f: usize) -> Op3 {
    // H ∋ g₁(a₁σ₂₁ + a₁†σ₁₂) + g₂(a₂σ₃₂ + a₂†σ₂₃)
    match f {
        0 => projector(2, 1),
        1 => projector(1, 2),
        2 => projector(3, 2),
        _ => projector(2, 3),
    }
}

/// Drift and field-coupling Jacobians of one velocity class.
#[derive(Debug, Clone)]
pub struct AtomResponse {
    /// B (8×8)
    pub drift: ComplexMatrix,
    /// C (8×4)
    pub coupling: ComplexMatrix,
}

/// Everything needed to eliminate the atoms of one velocity class.
#[derive(Debug, Clone)]
pub struct FluctuationSystem {
    pub drift: ComplexMatrix,
    pub coupling: ComplexMatrix,
    /// D (8×8), ⟨F_μ F_ν⟩ = 2D_μν per atom.
    pub diffusion: ComplexMatrix,
    /// k_j g_j √n with k = (−i, +i, −i, +i) and n = 10⁶N/c; S is quadratic
    /// in it and M = emission · √n · (response).
    pub emission: [C64; 4],
    /// √n
    pub collective: f64,
    /// Largest Re λ(B).
    pub stability: f64,
}

/// Jacobians with respect to the atomic and the field fluctuations.
pub fn linearize(params: &SystemParams, shifted: ShiftedDetunings, mean: &MeanState) -> Result<AtomResponse> {
    linearize_with(params, &bloch::bloch_generator(params, shifted), mean).map(|(r, _)| r)
}

/// [`linearize`] reusing a generator already built for the steady state.
/// Also returns max Re λ(B).
pub fn linearize_with(
    params: &SystemParams,
    generator: &BlochGenerator,
    mean: &MeanState,
) -> Result<(AtomResponse, f64)> {
    let drift = generator.reduced.clone();
    let max_re = drift_stability(&drift)?;
    if max_re >= 0.0 {
        return Err(Error::NoSteadyState { max_re });
    }
    let coupling = coupling_matrix(params, mean);
    Ok((AtomResponse { drift, coupling }, max_re))
}

/// C[m][f] = i g_f ⟨[O_f, X_m]⟩
pub fn coupling_matrix(params: &SystemParams, mean: &MeanState) -> ComplexMatrix {
    let g = [
        params.couplings.g1,
        params.couplings.g1,
        params.couplings.g2,
        params.couplings.g2,
    ];
    let mut coupling = ComplexMatrix::zeros(8, 4);
    for (m, &(k, l)) in FLUCTUATION_BASIS.iter().enumerate() {
        let x = projector(k, l);
        for f in 0..4 {
            let comm = commutator(&field_operator(f), &x);
            coupling[(m, f)] = I * g[f] * mean.expect(&comm);
        }
    }
    coupling
}

/// D and C are linear in ⟨σ⟩. Their responses to each unit mean value depend
/// only on the medium, so they are built once and contracted per class.
#[derive(Debug, Clone)]
pub struct LinearResponses {
    /// (i, j, ∂D/∂⟨σᵢⱼ⟩, ∂C/∂⟨σᵢⱼ⟩) for the entries with a nonzero response.
    terms: Vec<(usize, usize, ComplexMatrix, ComplexMatrix)>,
}

impl LinearResponses {
    pub fn new(params: &SystemParams) -> Self {
        let relax = Relaxation::of(params);
        let mut terms = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let unit = MeanState {
                    sigma: projector(i + 1, j + 1),
                };
                let d = einstein_diffusion_with(&relax, &unit);
                let c = coupling_matrix(params, &unit);
                if d.max_abs() > 0.0 || c.max_abs() > 0.0 {
                    terms.push((i, j, d, c));
                }
            }
        }
        Self { terms }
    }

    pub fn diffusion(&self, mean: &MeanState) -> ComplexMatrix {
        self.contract(mean, |t| &t.2, 8)
    }

    pub fn coupling(&self, mean: &MeanState) -> ComplexMatrix {
        self.contract(mean, |t| &t.3, 4)
    }

    fn contract(
        &self,
        mean: &MeanState,
        pick: impl Fn(&(usize, usize, ComplexMatrix, ComplexMatrix)) -> &ComplexMatrix,
        cols: usize,
    ) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(8, cols);
        for t in &self.terms {
            let w = mean.sigma[t.0][t.1];
            if w != ZERO {
                out.add_scaled_complex(w, pick(t));
            }
        }
        out
    }
}

/// Generalized Einstein relation with the single-atom product rule
/// σᵢⱼσₖₗ = δⱼₖσᵢₗ:
/// 2D_μν = ⟨𝓡(σ_μσ_ν)⟩ − ⟨𝓡(σ_μ)σ_ν⟩ − ⟨σ_μ𝓡(σ_ν)⟩.
///
/// Only the relaxation part 𝓡 contributes; the Hamiltonian part is a
/// derivation and cancels identically.
pub fn einstein_diffusion(params: &SystemParams, mean: &MeanState) -> ComplexMatrix {
    einstein_diffusion_with(&Relaxation::of(params), mean)
}

pub fn einstein_diffusion_with(relax: &Relaxation, mean: &MeanState) -> ComplexMatrix {
    let ops: Vec<Op3> = FLUCTUATION_BASIS.iter().map(|&(i, j)| projector(i, j)).collect();
    let relaxed: Vec<Op3> = ops.iter().map(|x| relax.apply(x)).collect();
    ComplexMatrix::from_fn(8, 8, |m, n| {
        let prod = op_mul(&ops[m], &ops[n]);
        let a = mean.expect(&relax.apply(&prod));
        let b = mean.expect(&op_mul(&relaxed[m], &ops[n]));
        let c = mean.expect(&op_mul(&ops[m], &relaxed[n]));
        (a - b - c) * 0.5
    })
}

/// Hermitian noise kernel ⟨F_μ† F_ν⟩/2 = D_{μ̄ν}; positive semidefinite for a
/// physical (Lindblad) relaxation.
pub fn noise_kernel(diffusion: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(8, 8, |m, n| diffusion[(conjugate_slot(m), n)])
}

/// Smallest eigenvalue of the Hermitian noise kernel.
pub fn diffusion_min_eigenvalue(diffusion: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(&noise_kernel(diffusion))[0]
}

/// √(10⁶N/c): g in MHz converted to s⁻¹ over c.
pub fn collective_factor(params: &SystemParams) -> f64 {
    (1e6 * params.atom_number() / SPEED_OF_LIGHT).sqrt()
}

/// Emission coefficients k_j g_j √(10⁶N/c).
pub fn emission_coefficients(params: &SystemParams) -> [C64; 4] {
    let root = collective_factor(params);
    let g = [
        params.couplings.g1,
        params.couplings.g1,
        params.couplings.g2,
        params.couplings.g2,
    ];
    std::array::from_fn(|j| EMISSION_PHASE[j] * g[j] * root)
}

impl FluctuationSystem {
    pub fn new(params: &SystemParams, response: AtomResponse, diffusion: ComplexMatrix, stability: f64) -> Self {
        Self {
            drift: response.drift,
            coupling: response.coupling,
            diffusion,
            emission: emission_coefficients(params),
            collective: collective_factor(params),
            stability,
        }
    }
}

/// Per-class field generator M_v and noise spectral density S_v (both m⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldContribution {
    pub generator: ComplexMatrix,
    pub noise: ComplexMatrix,
}

/// Solves the atoms at Fourier frequency ω (MHz) and projects onto the
/// fields: M_v = K P (−iω − B)⁻¹ C and S_v = K P R (2D̃) R† P† K†.
pub fn eliminate_atoms(sys: &FluctuationSystem, omega: f64) -> Result<FieldContribution> {
    let mut a = sys.drift.scale_real(-1.0);
    for k in 0..8 {
        a[(k, k)] -= I * omega;
    }
    let lu = LuFactor::new(&a).map_err(|_| Error::Resonance { omega, class: 0 })?;
    let resolvent = lu.inverse();
    let rc = &resolvent * &sys.coupling;
    let k = &sys.emission;
    let generator = ComplexMatrix::from_fn(4, 4, |j, f| k[j] * sys.collective * rc[(POLARIZATION_SLOT[j], f)]);

    // ⟨F_μ F_ν†⟩ = ⟨F_μ F_ν̄⟩ = 2D_{μν̄}
    let forces = ComplexMatrix::from_fn(8, 8, |m, n| sys.diffusion[(m, conjugate_slot(n))] * 2.0);
    let q = ComplexMatrix::from_fn(4, 8, |j, m| k[j] * resolvent[(POLARIZATION_SLOT[j], m)]);
    let noise = &(&q * &forces) * &q.adjoint();
    Ok(FieldContribution { generator, noise })
}

/// Σ_jk = ⟨δA_j δA_k†⟩ in shot-noise units.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCovariance {
    pub matrix: ComplexMatrix,
}

/// Commutator signature [δA_j, δA_k†] = J_jk.
const COMMUTATOR: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

impl FieldCovariance {
    pub fn vacuum() -> Self {
        Self {
            matrix: ComplexMatrix::from_diagonal(&[c64(1.0, 0.0), ZERO, c64(1.0, 0.0), ZERO]),
        }
    }

    /// max |Σ − Σ†|
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - &self.matrix.adjoint()).max_abs()
    }

    /// Deviation from the pairing relation Σ_{j̄k̄} = Σ_kj − J_kj, which holds
    /// for any state whose field commutators are canonical (at ω = 0).
    pub fn conjugation_error(&self) -> f64 {
        let s = &self.matrix;
        let mut e: f64 = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                let jk = if j == k { COMMUTATOR[k] } else { 0.0 };
                e = e.max((s[(j ^ 1, k ^ 1)] - s[(k, j)] + jk).norm());
            }
        }
        e
    }

    /// Symmetrized real covariance of (x₁, p₁, x₂, p₂), x = a + a†,
    /// p = −i(a − a†); the vacuum gives the identity.
    pub fn quadrature_covariance(&self) -> [[f64; 4]; 4] {
        let rows = quadrature_rows();
        let mut out = [[0.0; 4]; 4];
        for (r, wr) in rows.iter().enumerate() {
            for (c, wc) in rows.iter().enumerate() {
                let xy = quadratic_form(&self.matrix, wr, wc);
                let yx = quadratic_form(&self.matrix, wc, wr);
                out[r][c] = 0.5 * (xy + yx).re;
            }
        }
        out
    }

    /// Smallest eigenvalue of V + iΩ (Ω the two-mode symplectic form); a state
    /// is physical iff this is ≥ 0.
    pub fn uncertainty_margin(&self) -> f64 {
        let v = self.quadrature_covariance();
        let omega = [
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
        ];
        let m = ComplexMatrix::from_fn(4, 4, |i, j| c64(v[i][j], omega[i][j]));
        hermitian_eigenvalues(&m)[0]
    }

    /// Per-mode Var(x)Var(p) − Cov(x,p)², which the uncertainty principle
    /// bounds below by 1.
    pub fn single_mode_uncertainty(&self) -> [f64; 2] {
        let v = self.quadrature_covariance();
        [0, 2].map(|o| v[o][o] * v[o + 1][o + 1] - v[o][o + 1].powi(2))
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.uncertainty_margin() >= -tol && self.single_mode_uncertainty().iter().all(|&u| u >= 1.0 - tol)
    }
}

fn quadrature_rows() -> [[C64; 4]; 4] {
    let o = ZERO;
    let one = c64(1.0, 0.0);
    [[one, one, o, o], [-I, I, o, o], [o, o, one, one], [o, o, -I, I]]
}

/// w Σ uᴴ
fn quadratic_form(s: &ComplexMatrix, w: &[C64; 4], u: &[C64; 4]) -> C64 {
    let mut acc = ZERO;
    for j in 0..4 {
        for k in 0..4 {
            acc += w[j] * s[(j, k)] * u[k].conj();
        }
    }
    acc
}

/// Below this separation of the Lyapunov spectrum (times L) the closed-form
/// solve loses accuracy and quadrature is used instead.
const LYAPUNOV_GAP: f64 = 1e-3;
const PROPAGATION_QUADRATURE_ORDER: usize = 48;

/// Propagates field moments through a uniform medium of length `length`:
/// Σ_out = T Σ_in T† + ∫₀ᴸ e^{Mu} S e^{M†u} du with T = e^{ML}.
pub fn propagate(
    generator: &ComplexMatrix,
    noise: &ComplexMatrix,
    length: f64,
    input: &FieldCovariance,
) -> Result<FieldCovariance> {
    if length == 0.0 {
        return Ok(input.clone());
    }
    let transfer = matrix_exponential(&generator.scale_real(length)).map_err(|_| Error::Divergence { length })?;
    if !transfer.is_finite() || transfer.max_abs() > 1e100 {
        return Err(Error::Divergence { length });
    }
    let added = accumulated_noise(generator, noise, length, &transfer)?;
    let out = &(&(&transfer * &input.matrix) * &transfer.adjoint()) + &added;
    if !out.is_finite() {
        return Err(Error::Divergence { length });
    }
    Ok(FieldCovariance { matrix: out })
}

fn accumulated_noise(
    m: &ComplexMatrix,
    s: &ComplexMatrix,
    length: f64,
    transfer: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if s.max_abs() == 0.0 {
        return Ok(ComplexMatrix::zeros(4, 4));
    }
    let ev = eigenvalues(m)?;
    let gap = ev
        .iter()
        .flat_map(|a| ev.iter().map(move |b| (a + b.conj()).norm()))
        .fold(f64::INFINITY, f64::min);
    if gap * length > LYAPUNOV_GAP {
        // M W + W M† = T S T† − S
        let rhs = &(&(transfer * s) * &transfer.adjoint()) - s;
        if let Ok(w) = solve_sylvester(m, &m.adjoint(), &rhs) {
            return Ok(w);
        }
    }
    noise_by_quadrature(m, s, length)
}

/// Gauss–Legendre evaluation of ∫₀ᴸ e^{Mu} S e^{M†u} du.
pub fn noise_by_quadrature(m: &ComplexMatrix, s: &ComplexMatrix, length: f64) -> Result<ComplexMatrix> {
    let rule = gauss_legendre(PROPAGATION_QUADRATURE_ORDER)?;
    let mut acc = ComplexMatrix::zeros(4, 4);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let u = 0.5 * length * (x + 1.0);
        let e = matrix_exponential(&m.scale_real(u))?;
        acc.add_scaled(0.5 * length * w, &(&(&e * s) * &e.adjoint()));
    }
    Ok(acc)
}

/// Duan two-mode variances with δu = δx₁ − δx₂, δv = δp₁ + δp₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuanResult {
    pub v12: f64,
    pub du2: f64,
    pub dv2: f64,
}

pub fn duan_v12(sigma: &FieldCovariance) -> DuanResult {
    let one = c64(1.0, 0.0);
    let u = [one, one, -one, -one];
    let v = [-I, I, -I, I];
    let du2 = quadratic_form(&sigma.matrix, &u, &u).re;
    let dv2 = quadratic_form(&sigma.matrix, &v, &v).re;
    DuanResult {
        v12: du2 + dv2,
        du2,
        dv2,
    }
}

/// Invariant diagnostics collected while evaluating one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct PointDiagnostics {
    pub classes: usize,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    /// Largest Re λ(B) over the velocity classes.
    pub max_stability: f64,
    pub covariance_conjugation_error: f64,
    pub covariance_hermiticity_error: f64,
    pub uncertainty_margin: f64,
}

/// Result of one detuning point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub duan: DuanResult,
    pub absorption: f64,
    pub covariance: FieldCovariance,
    /// Velocity-averaged M and S.
    pub field: FieldContribution,
    pub diagnostics: PointDiagnostics,
}

/// Per-class work: steady state, linearization, diffusion and elimination.
pub struct ClassEvaluation {
    pub mean: MeanState,
    pub contribution: FieldContribution,
    pub stability: f64,
}

pub fn evaluate_class(
    params: &SystemParams,
    class: &VelocityClass,
    index: usize,
    omega: f64,
) -> Result<ClassEvaluation> {
    evaluate_class_with(params, &LinearResponses::new(params), class, index, omega)
}

pub fn evaluate_class_with(
    params: &SystemParams,
    responses: &LinearResponses,
    class: &VelocityClass,
    index: usize,
    omega: f64,
) -> Result<ClassEvaluation> {
    let generator = bloch::bloch_generator(params, class.shifted);
    let mean = steady_state_of(&generator)?;
    let drift = generator.reduced;
    let stability = drift_stability(&drift)?;
    if stability >= 0.0 {
        return Err(Error::NoSteadyState { max_re: stability });
    }
    let response = AtomResponse {
        drift,
        coupling: responses.coupling(&mean),
    };
    let diffusion = responses.diffusion(&mean);
    let sys = FluctuationSystem::new(params, response, diffusion, stability);
    let contribution = eliminate_atoms(&sys, omega).map_err(|e| match e {
        Error::Resonance { omega, .. } => Error::Resonance { omega, class: index },
        other => other,
    })?;
    Ok(ClassEvaluation {
        mean,
        contribution,
        stability,
    })
}

/// Velocity-averaged M and S plus absorption and diagnostics, before
/// propagation.
pub fn averaged_field(
    params: &SystemParams,
    classes: &[VelocityClass],
    omega: f64,
) -> Result<(FieldContribution, f64, PointDiagnostics)> {
    let mut m = ComplexMatrix::zeros(4, 4);
    let mut s = ComplexMatrix::zeros(4, 4);
    let mut absorption = 0.0;
    let mut diag = PointDiagnostics {
        classes: classes.len(),
        max_stability: f64::NEG_INFINITY,
        ..Default::default()
    };
    let responses = LinearResponses::new(params);
    for (index, class) in classes.iter().enumerate() {
        let eval = evaluate_class_with(params, &responses, class, index, omega)?;
        m.add_scaled(class.weight, &eval.contribution.generator);
        s.add_scaled(class.weight, &eval.contribution.noise);
        absorption += class.weight * class_absorption(params, &eval.mean);
        diag.max_trace_error = diag.max_trace_error.max(eval.mean.trace_error());
        diag.max_hermiticity_error = diag.max_hermiticity_error.max(eval.mean.hermiticity_error());
        diag.max_stability = diag.max_stability.max(eval.stability);
    }
    Ok((FieldContribution { generator: m, noise: s }, absorption, diag))
}

/// Full pipeline at probe detuning `delta1` from vacuum input.
pub fn evaluate_point(params: &SystemParams, delta1: f64, omega: f64) -> Result<PointResult> {
    let classes = doppler::build_classes(params, delta1, params.field.delta2)?;
    let (field, absorption, mut diagnostics) = averaged_field(params, &classes, omega)?;
    let covariance = propagate(
        &field.generator,
        &field.noise,
        params.geometry.length,
        &FieldCovariance::vacuum(),
    )?;
    diagnostics.covariance_conjugation_error = covariance.conjugation_error();
    diagnostics.covariance_hermiticity_error = covariance.hermiticity_error();
    diagnostics.uncertainty_margin = covariance.uncertainty_margin();
    Ok(PointResult {
        duan: duan_v12(&covariance),
        absorption,
        covariance,
        field,
        diagnostics,
    })
}

/// Velocity-averaged mean polarization source of the probe,
/// K₁·⟨σ₁₂⟩ with ∂z α₁ = K₁⟨σ₁₂⟩, over a fixed set of classes.
pub fn probe_polarization(params: &SystemParams, classes: &[VelocityClass], fields: MeanFields) -> Result<C64> {
    let k = emission_coefficients(params)[0] * collective_factor(params);
    let mut acc = ZERO;
    for c in classes {
        let mean = bloch::steady_state_with_fields(params, c.shifted, fields)?;
        acc += mean.get(1, 2) * c.weight;
    }
    Ok(acc * k)
}

/// One row of a spectrum sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub axis: f64,
    pub v12: f64,
    pub du2: f64,
    pub dv2: f64,
    pub absorption: f64,
    #[serde(skip)]
    pub diagnostics: PointDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    pub fn axis(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.axis).collect()
    }
    pub fn v12(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.v12).collect()
    }
    pub fn absorption(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.absorption).collect()
    }
}

/// V₁₂ and absorption over a probe-detuning grid. Points are evaluated in
/// parallel; each point reduces its velocity classes in ascending order, so
/// the table is bitwise independent of the thread count.
pub fn v12_spectrum(params: &SystemParams, delta1_grid: &[f64], omega: f64) -> Result<SpectrumTable> {
    let rows = delta1_grid
        .par_iter()
        .map(|&d1| {
            let p = evaluate_point(params, d1, omega).map_err(Error::at("delta1", d1))?;
            Ok(SpectrumRow {
                axis: d1,
                v12: p.duan.v12,
                du2: p.duan.du2,
                dv2: p.duan.dv2,
                absorption: p.absorption,
                diagnostics: p.diagnostics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable { rows })
}
