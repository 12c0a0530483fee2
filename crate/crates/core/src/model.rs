//! Physical parameters of the driven ladder medium and everything derived
//! from them.
//!
//! Units: lengths in m, number density in m⁻³, all rates, detunings and
//! couplings in MHz. MHz values are used as angular-frequency units throughout
//! (no factors of 2π are applied anywhere in the engine).
//!
//! Level 1 is the ground state, 2 the intermediate and 3 the upper state. The
//! probe (amplitude α₁) drives 1–2 and the pump (α₂) drives 2–3.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// ⁸⁵Rb 5S₁/₂ → 5P₃/₂ wavelength.
pub const LAMBDA_PROBE: f64 = 780.24e-9;
/// ⁸⁵Rb 5P₃/₂ → 5D₅/₂ wavelength.
pub const LAMBDA_PUMP: f64 = 775.98e-9;
/// Default 1–2 dipole moment (C·m).
pub const DIPOLE_12: f64 = 2.54e-29;
/// Default 2–3 dipole moment (C·m).
pub const DIPOLE_23: f64 = 6.0e-30;
/// Reference atomic density n₀ (m⁻³).
pub const REFERENCE_DENSITY: f64 = 8.5e15;

/// Population decay and collisional dephasing.
///
/// `gamma1` and `gamma2` are half the population decay rates 2→1 and 3→2.
/// The collisional coherence decay rates default to `γ₁₂p = γ₂₃p = p` and
/// `γ₁₃p = 2p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub p: f64,
    pub gamma12p: f64,
    pub gamma23p: f64,
    pub gamma13p: f64,
}

impl DecayConfig {
    /// Rates with the default collision model attached to `p`.
    pub fn with_collisions(gamma1: f64, gamma2: f64, p: f64) -> Self {
        Self {
            gamma1,
            gamma2,
            p,
            gamma12p: p,
            gamma23p: p,
            gamma13p: 2.0 * p,
        }
    }

    /// Every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            gamma1: self.gamma1 * factor,
            gamma2: self.gamma2 * factor,
            p: self.p * factor,
            gamma12p: self.gamma12p * factor,
            gamma23p: self.gamma23p * factor,
            gamma13p: self.gamma13p * factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("decay.gamma1", self.gamma1),
            ("decay.gamma2", self.gamma2),
            ("decay.p", self.p),
            ("decay.gamma12p", self.gamma12p),
            ("decay.gamma23p", self.gamma23p),
            ("decay.gamma13p", self.gamma13p),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be a finite rate ≥ 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Total coherence decay rates of the three off-diagonal pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceRates {
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma23: f64,
}

impl CoherenceRates {
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            gamma12: self.gamma12 * factor,
            gamma13: self.gamma13 * factor,
            gamma23: self.gamma23 * factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("coherence.gamma12", self.gamma12),
            ("coherence.gamma13", self.gamma13),
            ("coherence.gamma23", self.gamma23),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be a finite rate ≥ 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Radiative (half-sum of level widths) plus collisional parts, with level
/// widths Γ₁ = 0, Γ₂ = 2γ₁, Γ₃ = 2γ₂.
pub fn derive_coherence_rates(decay: &DecayConfig) -> Result<CoherenceRates> {
    decay.validate()?;
    Ok(CoherenceRates {
        gamma12: decay.gamma1 + decay.gamma12p,
        gamma13: decay.gamma2 + decay.gamma13p,
        gamma23: decay.gamma1 + decay.gamma2 + decay.gamma23p,
    })
}

/// Field amplitudes, detunings and couplings.
///
/// Couplings come either from `g1`/`g2` directly (taking precedence) or from
/// the dipole moments `mu12`/`mu23` through the single-photon field of the
/// interaction volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub delta1: f64,
    pub delta2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu12: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu23: Option<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl FieldConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("field.alpha1", self.alpha1), ("field.alpha2", self.alpha2)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        for (name, v) in [("field.delta1", self.delta1), ("field.delta2", self.delta2)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (name, v) in [("field.lambda1", self.lambda1), ("field.lambda2", self.lambda2)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("field.g1", self.g1),
            ("field.g2", self.g2),
            ("field.mu12", self.mu12),
            ("field.mu23", self.mu23),
        ] {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(name, format!("must be ≥ 0, got {v}")));
                }
            }
        }
        Ok(())
    }

    /// Ratio of wavevectors k₂/k₁.
    pub fn wavevector_ratio(&self) -> f64 {
        self.lambda1 / self.lambda2
    }
}

/// Interaction volume and atom density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Beam radius (m).
    pub r: f64,
    /// Medium length (m).
    pub length: f64,
    /// Number density (m⁻³).
    pub density: f64,
}

impl GeometryConfig {
    pub fn volume(&self) -> f64 {
        std::f64::consts::PI * self.r * self.r * self.length
    }

    /// N = n·π·r²·L
    pub fn atom_number(&self) -> f64 {
        self.density * self.volume()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r <= 0.0 {
            return Err(Error::invalid("geometry.r", format!("must be > 0, got {}", self.r)));
        }
        // L = 0 and n = 0 are accepted as decoupled limits.
        if !self.length.is_finite() || self.length < 0.0 {
            return Err(Error::invalid(
                "geometry.length",
                format!("must be ≥ 0, got {}", self.length),
            ));
        }
        if !self.density.is_finite() || self.density < 0.0 {
            return Err(Error::invalid(
                "geometry.density",
                format!("must be ≥ 0, got {}", self.density),
            ));
        }
        Ok(())
    }
}

/// How velocity classes are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    /// Composite Gauss–Legendre panels refined geometrically around the
    /// one-photon resonances; `nodes` is the order per panel.
    #[default]
    Adaptive,
    /// Plain Gauss–Hermite rule with `nodes` abscissae. Only accurate when the
    /// homogeneous linewidths are comparable to the Doppler width.
    GaussHermite,
}

/// Maxwellian velocity distribution, represented directly as the probe
/// Doppler shift s = k₁v in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DopplerConfig {
    /// 1/e half-width of the probe Doppler-shift distribution (MHz).
    pub width: f64,
    pub nodes: usize,
    /// Apply the residual two-photon shift (1 − k₂/k₁)·s.
    pub residual_mismatch: bool,
    #[serde(default)]
    pub quadrature: QuadratureKind,
}

impl DopplerConfig {
    pub fn stationary() -> Self {
        Self {
            width: 0.0,
            nodes: 1,
            residual_mismatch: false,
            quadrature: QuadratureKind::Adaptive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.width.is_finite() || self.width < 0.0 {
            return Err(Error::invalid(
                "doppler.width",
                format!("must be ≥ 0, got {}", self.width),
            ));
        }
        if self.nodes == 0 {
            return Err(Error::invalid("doppler.nodes", "must be ≥ 1"));
        }
        if self.nodes > crate::numerics::MAX_HERMITE_ORDER {
            return Err(Error::invalid("doppler.nodes", "must be ≤ 512"));
        }
        Ok(())
    }
}

/// Atom–field couplings in MHz per unit photon amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    pub g1: f64,
    pub g2: f64,
}

/// g = μ·√(ħω/2ε₀V)/ħ, converted to MHz.
pub fn derive_couplings(field: &FieldConfig, geometry: &GeometryConfig) -> Result<Couplings> {
    let single = |mu: f64, lambda: f64| {
        let omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda;
        let e_photon = (HBAR * omega / (2.0 * EPSILON_0 * geometry.volume())).sqrt();
        mu * e_photon / HBAR * 1e-6
    };
    let needs_volume = (field.g1.is_none() && field.mu12.is_some()) || (field.g2.is_none() && field.mu23.is_some());
    if needs_volume && geometry.volume() <= 0.0 {
        return Err(Error::invalid(
            "geometry.length",
            "zero interaction volume; give field.g1 and field.g2 directly",
        ));
    }
    let g1 = match (field.g1, field.mu12) {
        (Some(g), _) => g,
        (None, Some(mu)) => single(mu, field.lambda1),
        (None, None) => return Err(Error::Config("field.g1: neither g1 nor mu12 supplied".into())),
    };
    let g2 = match (field.g2, field.mu23) {
        (Some(g), _) => g,
        (None, Some(mu)) => single(mu, field.lambda2),
        (None, None) => return Err(Error::Config("field.g2: neither g2 nor mu23 supplied".into())),
    };
    Ok(Couplings { g1, g2 })
}

/// Advisory conditions under which the undepleted-field treatment may not hold.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegimeWarning {
    /// g₂α₂ ≤ √(γ₁₂γ₁₃).
    Depletion { pump_rabi: f64, threshold: f64 },
    /// α₁ > α₂.
    ProbeStrongerThanPump { alpha1: f64, alpha2: f64 },
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeWarning::Depletion { pump_rabi, threshold } => write!(
                f,
                "pump Rabi frequency {pump_rabi:.4} MHz does not exceed √(γ₁₂γ₁₃) = {threshold:.4} MHz; field depletion may matter"
            ),
            RegimeWarning::ProbeStrongerThanPump { alpha1, alpha2 } => {
                write!(f, "probe amplitude {alpha1} exceeds pump amplitude {alpha2}")
            }
        }
    }
}

/// Full validated parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub decay: DecayConfig,
    pub coherence: CoherenceRates,
    pub field: FieldConfig,
    pub geometry: GeometryConfig,
    pub doppler: DopplerConfig,
    pub couplings: Couplings,
}

impl SystemParams {
    /// Validates every block and derives coherence rates and couplings.
    pub fn new(
        decay: DecayConfig,
        field: FieldConfig,
        geometry: GeometryConfig,
        doppler: DopplerConfig,
    ) -> Result<Self> {
        let coherence = derive_coherence_rates(&decay)?;
        Self::with_coherence(decay, coherence, field, geometry, doppler)
    }

    /// Like [`SystemParams::new`] but with explicit total coherence rates.
    pub fn with_coherence(
        decay: DecayConfig,
        coherence: CoherenceRates,
        field: FieldConfig,
        geometry: GeometryConfig,
        doppler: DopplerConfig,
    ) -> Result<Self> {
        decay.validate()?;
        coherence.validate()?;
        field.validate()?;
        geometry.validate()?;
        doppler.validate()?;
        let couplings = derive_couplings(&field, &geometry)?;
        let params = Self {
            decay,
            coherence,
            field,
            geometry,
            doppler,
            couplings,
        };
        params.check_dynamics()?;
        Ok(params)
    }

    /// Re-validates after in-place edits (e.g. sweep transforms).
    pub fn revalidate(&self) -> Result<()> {
        self.decay.validate()?;
        self.coherence.validate()?;
        self.field.validate()?;
        self.geometry.validate()?;
        self.doppler.validate()?;
        self.check_dynamics()
    }

    fn check_dynamics(&self) -> Result<()> {
        let Couplings { g1, g2 } = self.couplings;
        if !(g1.is_finite() && g1 >= 0.0) {
            return Err(Error::invalid("field.g1", "coupling must be ≥ 0"));
        }
        if !(g2.is_finite() && g2 >= 0.0) {
            return Err(Error::invalid("field.g2", "coupling must be ≥ 0"));
        }
        // Without any relaxation the atoms have no unique steady state.
        if self.decay.gamma1 == 0.0 && self.decay.gamma2 == 0.0 {
            return Err(Error::invalid(
                "decay.gamma1",
                "at least one population decay rate must be > 0",
            ));
        }
        Ok(())
    }

    /// Probe Rabi frequency g₁α₁ (MHz).
    pub fn probe_rabi(&self) -> f64 {
        self.couplings.g1 * self.field.alpha1
    }

    /// Pump Rabi frequency g₂α₂ (MHz).
    pub fn pump_rabi(&self) -> f64 {
        self.couplings.g2 * self.field.alpha2
    }

    pub fn atom_number(&self) -> f64 {
        self.geometry.atom_number()
    }

    /// Replaces the collision rate `p`, re-deriving the coherence rates with
    /// the default collision model.
    pub fn set_collision_rate(&mut self, p: f64) -> Result<()> {
        self.decay = DecayConfig::with_collisions(self.decay.gamma1, self.decay.gamma2, p);
        self.coherence = derive_coherence_rates(&self.decay)?;
        Ok(())
    }

    /// Re-derives the couplings after a field or geometry edit.
    pub fn refresh_couplings(&mut self) -> Result<()> {
        self.couplings = derive_couplings(&self.field, &self.geometry)?;
        Ok(())
    }
}

/// Soft checks on the operating regime. Never fails.
pub fn validate_regime(params: &SystemParams) -> Vec<RegimeWarning> {
    let mut out = Vec::new();
    let threshold = (params.coherence.gamma12 * params.coherence.gamma13).sqrt();
    let pump_rabi = params.pump_rabi();
    if pump_rabi <= threshold {
        out.push(RegimeWarning::Depletion { pump_rabi, threshold });
    }
    if params.field.alpha1 > params.field.alpha2 {
        out.push(RegimeWarning::ProbeStrongerThanPump {
            alpha1: params.field.alpha1,
            alpha2: params.field.alpha2,
        });
    }
    out
}
