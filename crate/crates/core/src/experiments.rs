//! Canned scenarios for the published parameter regimes and narrow-feature
//! classification of computed spectra.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluctuations::{evaluate_point, v12_spectrum, PointDiagnostics, SpectrumTable};
use crate::model::{
    DecayConfig, DopplerConfig, FieldConfig, GeometryConfig, QuadratureKind, SystemParams, DIPOLE_12, DIPOLE_23,
    LAMBDA_PROBE, LAMBDA_PUMP, REFERENCE_DENSITY,
};

/// Collision rates of the four baseline spectra.
pub const COLLISION_RATES: [f64; 4] = [0.0, 0.5, 6.0, 20.0];

/// Probe coupling used by the figure scenarios (MHz per unit amplitude).
pub const SCENARIO_G1: f64 = 0.3;
/// Pump coupling used by the figure scenarios (MHz per unit amplitude).
pub const SCENARIO_G2: f64 = 0.45;

/// Probe amplitude at which the pump-sweep scaling is the identity.
pub const PUMP_SWEEP_REFERENCE_ALPHA1: f64 = 10.0;

/// Evenly spaced grid `min, …, max` with `points` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let g = Self { min, max, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::invalid("sweep.grid", "bounds must be finite"));
        }
        match self.points {
            0 => Err(Error::invalid("sweep.grid.points", "must be ≥ 1")),
            1 if self.min != self.max => Err(Error::invalid("sweep.grid.points", "a single point needs min = max")),
            1 => Ok(()),
            _ if self.max <= self.min => Err(Error::invalid("sweep.grid.max", "must exceed sweep.grid.min")),
            _ => Ok(()),
        }
    }

    pub fn step(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.max
                } else {
                    self.min + k as f64 * step
                }
            })
            .collect()
    }
}

/// Default probe-detuning grid: ±800 MHz in 2 MHz steps.
pub fn default_delta1_grid() -> Grid {
    Grid {
        min: -800.0,
        max: 800.0,
        points: 801,
    }
}

/// Default pump-amplitude grid for the pump sweep.
pub fn default_alpha2_grid() -> Grid {
    Grid {
        min: 1.0,
        max: 150.0,
        points: 150,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Sweep {
    /// Probe detuning spectrum at fixed parameters.
    Delta1 { grid: Grid },
    /// Pump amplitude at two-photon resonance with α₁ = α₂/5, n ∝ α₁ and
    /// total coherence rates ∝ α₁, once per collision rate.
    Alpha2 { grid: Grid, collision_rates: Vec<f64> },
}

impl Sweep {
    pub fn grid(&self) -> &Grid {
        match self {
            Sweep::Delta1 { grid } | Sweep::Alpha2 { grid, .. } => grid,
        }
    }
}

/// Quantity a scenario is about; both are always computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    V12,
    Absorption,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: SystemParams,
    pub sweep: Sweep,
    pub observable: Observable,
    /// Where the narrow two-photon feature is expected (MHz).
    pub expected_location: f64,
    /// Fourier frequency (MHz).
    pub omega: f64,
}

/// Baseline medium of the detuning spectra at collision rate `p`.
pub fn baseline_params(p: f64) -> SystemParams {
    baseline_with(p, Some(SCENARIO_G1), Some(SCENARIO_G2), None, None)
}

/// Baseline medium with couplings derived from the rubidium dipole moments
/// through the single-photon field of the interaction volume.
pub fn dipole_baseline_params(p: f64) -> SystemParams {
    baseline_with(p, None, None, Some(DIPOLE_12), Some(DIPOLE_23))
}

fn baseline_with(p: f64, g1: Option<f64>, g2: Option<f64>, mu12: Option<f64>, mu23: Option<f64>) -> SystemParams {
    SystemParams::new(
        DecayConfig::with_collisions(3.0, 0.5, p),
        FieldConfig {
            alpha1: 10.0,
            alpha2: 50.0,
            delta1: 0.0,
            delta2: 0.0,
            g1,
            g2,
            mu12,
            mu23,
            lambda1: LAMBDA_PROBE,
            lambda2: LAMBDA_PUMP,
        },
        GeometryConfig {
            r: 4.5e-4,
            length: 0.06,
            density: REFERENCE_DENSITY,
        },
        DopplerConfig {
            width: 530.0,
            nodes: 8,
            residual_mismatch: false,
            quadrature: QuadratureKind::Adaptive,
        },
    )
    .expect("baseline parameters are valid")
}

/// Probe detuning Δ₁ = −Δ₂ of lab-frame two-photon resonance.
pub fn two_photon_resonance(params: &SystemParams) -> f64 {
    // 0 − x keeps the sign of zero positive
    0.0 - params.field.delta2
}

fn spectrum(name: &str, params: SystemParams, observable: Observable) -> Scenario {
    let expected_location = two_photon_resonance(&params);
    Scenario {
        name: name.to_string(),
        params,
        sweep: Sweep::Delta1 {
            grid: default_delta1_grid(),
        },
        observable,
        expected_location,
        omega: 0.0,
    }
}

/// Eight baseline spectra: `fig2-a`…`fig2-d` are V₁₂ for p = 0, 0.5, 6, 20 and
/// `fig2-e`…`fig2-h` the absorption for the same rates.
pub fn fig2_scenarios() -> Vec<Scenario> {
    let mut out = Vec::with_capacity(8);
    for (observable, letters) in [
        (Observable::V12, ['a', 'b', 'c', 'd']),
        (Observable::Absorption, ['e', 'f', 'g', 'h']),
    ] {
        for (letter, p) in letters.into_iter().zip(COLLISION_RATES) {
            out.push(spectrum(&format!("fig2-{letter}"), baseline_params(p), observable));
        }
    }
    out
}

/// Pump-amplitude sweep at two-photon resonance for p = 0 and p = 20.
pub fn fig3_scenario() -> Scenario {
    Scenario {
        name: "fig3".into(),
        params: baseline_params(0.0),
        sweep: Sweep::Alpha2 {
            grid: default_alpha2_grid(),
            collision_rates: vec![0.0, 20.0],
        },
        observable: Observable::V12,
        expected_location: 0.0,
        omega: 0.0,
    }
}

/// p = 6 with a strong pump α₂ = 30α₁ (`fig4-a`, `fig4-b`) and with the
/// pump detuned to Δ₂ = −200 MHz (`fig4-c`, `fig4-d`).
pub fn fig4_scenarios() -> Vec<Scenario> {
    let mut strong = baseline_params(6.0);
    strong.field.alpha2 = 30.0 * strong.field.alpha1;
    let mut detuned = baseline_params(6.0);
    detuned.field.delta2 = -200.0;
    vec![
        spectrum("fig4-a", strong.clone(), Observable::V12),
        spectrum("fig4-b", strong, Observable::Absorption),
        spectrum("fig4-c", detuned.clone(), Observable::V12),
        spectrum("fig4-d", detuned, Observable::Absorption),
    ]
}

pub fn all_scenarios() -> Vec<Scenario> {
    let mut all = fig2_scenarios();
    all.push(fig3_scenario());
    all.extend(fig4_scenarios());
    all
}

pub fn find_scenario(name: &str) -> Option<Scenario> {
    all_scenarios().into_iter().find(|s| s.name == name)
}

/// Parameters of one pump-sweep point: α₁ = α₂/5, n = n₀α₁/10 and total
/// coherence rates scaled by α₁/10 relative to `base` at collision rate `p`.
/// Population decay and collision rates scale along with them, so the pure
/// dephasing left over after the radiative part never turns negative.
pub fn pump_sweep_point(base: &SystemParams, p: f64, alpha2: f64) -> Result<SystemParams> {
    let mut params = base.clone();
    params.set_collision_rate(p)?;
    let alpha1 = alpha2 / 5.0;
    let scale = alpha1 / PUMP_SWEEP_REFERENCE_ALPHA1;
    params.field.alpha1 = alpha1;
    params.field.alpha2 = alpha2;
    params.field.delta1 = 0.0;
    params.field.delta2 = 0.0;
    params.geometry.density = base.geometry.density * scale;
    params.decay = params.decay.scaled(scale);
    params.coherence = params.coherence.scaled(scale);
    params.revalidate()?;
    Ok(params)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpSweepRow {
    pub alpha2: f64,
    /// One entry per collision rate.
    pub v12: Vec<f64>,
    pub absorption: Vec<f64>,
    #[serde(skip)]
    pub diagnostics: Vec<PointDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpSweepTable {
    pub collision_rates: Vec<f64>,
    pub rows: Vec<PumpSweepRow>,
}

impl PumpSweepTable {
    pub fn v12(&self, variant: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.v12[variant]).collect()
    }
    pub fn absorption(&self, variant: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.absorption[variant]).collect()
    }
}

pub fn run_pump_sweep(base: &SystemParams, grid: &[f64], rates: &[f64], omega: f64) -> Result<PumpSweepTable> {
    let jobs: Vec<(f64, f64)> = grid.iter().flat_map(|&a| rates.iter().map(move |&p| (a, p))).collect();
    let points = jobs
        .par_iter()
        .map(|&(alpha2, p)| {
            let params = pump_sweep_point(base, p, alpha2)?;
            evaluate_point(&params, 0.0, omega).map_err(Error::at("alpha2", alpha2))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = grid
        .iter()
        .zip(points.chunks(rates.len()))
        .map(|(&alpha2, chunk)| PumpSweepRow {
            alpha2,
            v12: chunk.iter().map(|r| r.duan.v12).collect(),
            absorption: chunk.iter().map(|r| r.absorption).collect(),
            diagnostics: chunk.iter().map(|r| r.diagnostics).collect(),
        })
        .collect();
    Ok(PumpSweepTable {
        collision_rates: rates.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioResult {
    Spectrum(SpectrumTable),
    PumpSweep(PumpSweepTable),
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.revalidate()?;
        self.sweep.grid().validate()?;
        if let Sweep::Alpha2 { grid, collision_rates } = &self.sweep {
            if grid.min <= 0.0 {
                return Err(Error::invalid("sweep.grid.min", "pump amplitudes must be > 0"));
            }
            if collision_rates.is_empty() {
                return Err(Error::invalid("sweep.collision_rates", "must not be empty"));
            }
        }
        if !self.omega.is_finite() {
            return Err(Error::invalid("omega", "must be finite"));
        }
        Ok(())
    }

    pub fn run(&self) -> Result<ScenarioResult> {
        self.validate()?;
        let grid = self.sweep.grid().values();
        match &self.sweep {
            Sweep::Delta1 { .. } => v12_spectrum(&self.params, &grid, self.omega).map(ScenarioResult::Spectrum),
            Sweep::Alpha2 { collision_rates, .. } => {
                run_pump_sweep(&self.params, &grid, collision_rates, self.omega).map(ScenarioResult::PumpSweep)
            }
        }
    }

    /// Exclusion half-width around the expected feature: five linewidths,
    /// taking the larger of γ₁₂ and g₂α₂/10.
    pub fn feature_half_width(&self) -> f64 {
        feature_half_width(&self.params)
    }
}

pub fn feature_half_width(params: &SystemParams) -> f64 {
    5.0 * params.coherence.gamma12.max(params.pump_rabi() / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    Dip,
    Peak,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeatureReport {
    pub kind: FeatureKind,
    /// Axis value of the classified extremum.
    pub location: f64,
    pub extremum: f64,
    /// Background model evaluated at `location`.
    pub background: f64,
    pub min_value: f64,
    pub argmin: f64,
    pub max_value: f64,
    pub argmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureOptions {
    /// Half-width of the feature window around the expected location.
    pub half_width: f64,
    /// Width of each background band beyond the feature window, as a
    /// multiple of `half_width`.
    pub background_span: f64,
    /// Smallest |extremum − background| / |background| reported as a feature.
    pub noise_floor: f64,
}

impl FeatureOptions {
    pub fn with_half_width(half_width: f64) -> Self {
        Self {
            half_width,
            background_span: 1.0,
            noise_floor: 1e-4,
        }
    }
}

/// Classifies the narrow feature near `expected`.
///
/// The background is a least-squares quadratic through the bands
/// `half_width < |x − expected| ≤ half_width·(1 + background_span)`. Inside
/// the window the local extremum nearest to `expected` is compared against
/// the background there.
pub fn extract_feature(axis: &[f64], values: &[f64], expected: f64, opts: &FeatureOptions) -> Result<FeatureReport> {
    if axis.is_empty() || axis.len() != values.len() {
        return Err(Error::Contract(format!(
            "{} axis values for {} samples",
            axis.len(),
            values.len()
        )));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Contract("feature axis must be strictly increasing".into()));
    }
    let positive = |x: f64| x > 0.0;
    if !positive(opts.half_width)
        || !positive(opts.background_span)
        || opts.noise_floor.is_nan()
        || opts.noise_floor < 0.0
    {
        return Err(Error::Contract("feature options must be positive".into()));
    }
    let (lo, hi) = (axis[0], axis[axis.len() - 1]);
    if expected < lo || expected > hi {
        return Err(Error::Contract(format!(
            "expected location {expected} outside grid [{lo}, {hi}]"
        )));
    }
    let outer = opts.half_width * (1.0 + opts.background_span);
    let band: Vec<(f64, f64)> = axis
        .iter()
        .zip(values)
        .filter(|(x, _)| {
            let d = (*x - expected).abs();
            d > opts.half_width && d <= outer
        })
        .map(|(&x, &y)| (x - expected, y))
        .collect();
    let window: Vec<usize> = (0..axis.len())
        .filter(|&i| (axis[i] - expected).abs() <= opts.half_width)
        .collect();
    if band.len() < 3 || window.is_empty() {
        return Err(Error::Contract(format!(
            "feature window ±{} around {expected} leaves too few background samples",
            opts.half_width
        )));
    }
    let background = quadratic_fit(&band)?;

    let (argmin, min_value) = extremal(axis, values, |a, b| a < b);
    let (argmax, max_value) = extremal(axis, values, |a, b| a > b);

    let is_local_extremum = |i: usize| {
        if i == 0 || i + 1 == values.len() {
            return false;
        }
        let (l, c, r) = (values[i - 1], values[i], values[i + 1]);
        (c >= l && c >= r) || (c <= l && c <= r)
    };
    let index = window
        .iter()
        .copied()
        .filter(|&i| is_local_extremum(i))
        .min_by(|&a, &b| (axis[a] - expected).abs().total_cmp(&(axis[b] - expected).abs()))
        .unwrap_or_else(|| {
            window
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    let da = (values[a] - background.at(axis[a] - expected)).abs();
                    let db = (values[b] - background.at(axis[b] - expected)).abs();
                    da.total_cmp(&db)
                })
                .expect("window is nonempty")
        });
    let location = axis[index];
    let extremum = values[index];
    let bg = background.at(location - expected);
    let deviation = extremum - bg;
    let kind = if deviation.abs() <= opts.noise_floor * bg.abs().max(f64::MIN_POSITIVE) {
        FeatureKind::None
    } else if deviation < 0.0 {
        FeatureKind::Dip
    } else {
        FeatureKind::Peak
    };
    Ok(FeatureReport {
        kind,
        location,
        extremum,
        background: bg,
        min_value,
        argmin,
        max_value,
        argmax,
    })
}

fn extremal(axis: &[f64], values: &[f64], better: impl Fn(f64, f64) -> bool) -> (f64, f64) {
    let mut best = 0;
    for i in 1..values.len() {
        if better(values[i], values[best]) {
            best = i;
        }
    }
    (axis[best], values[best])
}

struct Quadratic([f64; 3]);

impl Quadratic {
    fn at(&self, x: f64) -> f64 {
        self.0[0] + x * (self.0[1] + x * self.0[2])
    }
}

fn quadratic_fit(points: &[(f64, f64)]) -> Result<Quadratic> {
    let scale = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    let design = nalgebra::DMatrix::from_fn(points.len(), 3, |r, c| (points[r].0 / scale).powi(c as i32));
    let rhs = nalgebra::DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Numerical(format!("background fit: {e}")))?;
    Ok(Quadratic([coef[0], coef[1] / scale, coef[2] / (scale * scale)]))
}

/// Feature of a spectrum's own observable around its expected location.
pub fn scenario_feature(scenario: &Scenario, table: &SpectrumTable) -> Result<FeatureReport> {
    let values = match scenario.observable {
        Observable::V12 => table.v12(),
        Observable::Absorption => table.absorption(),
    };
    extract_feature(
        &table.axis(),
        &values,
        scenario.expected_location,
        &FeatureOptions::with_half_width(scenario.feature_half_width()),
    )
}
