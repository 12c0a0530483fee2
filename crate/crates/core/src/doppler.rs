//! Maxwellian velocity classes for the counterpropagating geometry.
//!
//! A velocity v is carried as the probe Doppler shift s = k₁v (MHz). In the
//! atom frame the probe sees d₁ = Δ₁ − s and the counterpropagating pump sees
//! d₂ = Δ₂ + s (or Δ₂ + (k₂/k₁)s with the residual mismatch enabled), so the
//! two-photon detuning d₁ + d₂ does not depend on v unless the mismatch is on.

use serde::Serialize;

use crate::bloch::ShiftedDetunings;
use crate::error::{Error, Result};
use crate::model::{QuadratureKind, SystemParams};
use crate::numerics::{gauss_hermite_rule, gauss_legendre, ComplexMatrix, QuadratureRule, C64};

/// Half-span of the truncated distribution, in units of the 1/e half-width.
const SPAN: f64 = 6.0;
/// Uniform background panels across ±SPAN·width.
const COARSE_PANELS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocityClass {
    /// Probe Doppler shift k₁v (MHz).
    pub shift: f64,
    pub weight: f64,
    pub shifted: ShiftedDetunings,
}

/// Pump-frame shift factor: k₂/k₁ with the residual mismatch, else 1.
pub fn pump_shift_factor(params: &SystemParams) -> f64 {
    if params.doppler.residual_mismatch {
        params.field.wavevector_ratio()
    } else {
        1.0
    }
}

/// Velocity classes for lab-frame detunings (Δ₁, Δ₂), ascending in shift.
pub fn build_classes(params: &SystemParams, delta1: f64, delta2: f64) -> Result<Vec<VelocityClass>> {
    let cfg = &params.doppler;
    cfg.validate()?;
    let factor = pump_shift_factor(params);
    let rule = if cfg.width == 0.0 {
        QuadratureRule {
            nodes: vec![0.0],
            weights: vec![1.0],
        }
    } else {
        match cfg.quadrature {
            QuadratureKind::GaussHermite => gauss_hermite_rule(cfg.nodes, cfg.width)?,
            QuadratureKind::Adaptive => adaptive_rule(params, delta1, delta2 / factor)?,
        }
    };
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| VelocityClass {
            shift: s,
            weight: w,
            shifted: ShiftedDetunings {
                d1: delta1 - s,
                d2: delta2 + factor * s,
            },
        })
        .collect())
}

/// Composite Gauss–Legendre rule against the Maxwellian, with breakpoints
/// refined geometrically around the shifts where the probe (s = Δ₁) or the
/// pump (s = −Δ₂) is resonant and around the Autler–Townes satellites.
fn adaptive_rule(params: &SystemParams, delta1: f64, pump_center: f64) -> Result<QuadratureRule> {
    let cfg = &params.doppler;
    let width = cfg.width;
    let span = SPAN * width;
    let c = &params.coherence;
    let finest = 0.5 * c.gamma12.min(c.gamma23).max(1e-6 * width);
    let coarse_step = 2.0 * span / COARSE_PANELS as f64;

    let mut breaks: Vec<f64> = (0..=COARSE_PANELS)
        .map(|k| span * (2.0 * k as f64 - COARSE_PANELS as f64) / COARSE_PANELS as f64)
        .collect();
    let (om1, om2) = (params.probe_rabi(), params.pump_rabi());
    let centers = [
        delta1,
        -pump_center,
        delta1 - om2,
        delta1 + om2,
        delta1 - om1,
        delta1 + om1,
    ];
    for &center in &centers {
        if center.abs() >= span {
            continue;
        }
        breaks.push(center);
        let mut h = finest;
        while h < coarse_step {
            for x in [center - h, center + h] {
                if x.abs() < span {
                    breaks.push(x);
                }
            }
            h *= 2.0;
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let base = gauss_legendre(cfg.nodes)?;
    let norm = 1.0 / (std::f64::consts::PI.sqrt() * width);
    let mut nodes = Vec::with_capacity(breaks.len() * cfg.nodes);
    let mut weights = Vec::with_capacity(breaks.len() * cfg.nodes);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            let s = mid + half * x;
            nodes.push(s);
            weights.push(half * w * norm * (-(s / width).powi(2)).exp());
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(QuadratureRule { nodes, weights })
}

/// Values that can be weight-averaged over velocity classes.
pub trait Averageable: Sized {
    fn zero_like(&self) -> Self;
    fn accumulate(&mut self, weight: f64, value: &Self);
}

impl Averageable for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn accumulate(&mut self, weight: f64, value: &Self) {
        *self += weight * value;
    }
}

impl Averageable for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn accumulate(&mut self, weight: f64, value: &Self) {
        *self += value * weight;
    }
}

impl Averageable for ComplexMatrix {
    fn zero_like(&self) -> Self {
        ComplexMatrix::zeros(self.rows(), self.cols())
    }
    fn accumulate(&mut self, weight: f64, value: &Self) {
        self.add_scaled(weight, value);
    }
}

/// Weighted sum in ascending class order.
pub fn average<T: Averageable>(values: &[T], classes: &[VelocityClass]) -> Result<T> {
    if values.len() != classes.len() {
        return Err(Error::Contract(format!(
            "{} values for {} velocity classes",
            values.len(),
            classes.len()
        )));
    }
    let first = values
        .first()
        .ok_or_else(|| Error::Contract("no velocity classes".into()))?;
    let mut acc = first.zero_like();
    for (v, c) in values.iter().zip(classes) {
        acc.accumulate(c.weight, v);
    }
    Ok(acc)
}
