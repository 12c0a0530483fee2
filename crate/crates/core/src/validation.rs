//! Invariant suite run by `validate`: decoupled limits, steady-state sanity,
//! quadrature convergence, the perturbative absorption oracle, covariance
//! physicality and the signs of the closed-form absorption terms.

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{
    absorption_exact, absorption_perturbative_with, perturbative_terms, steady_state, PerturbativeTerms,
    ShiftedDetunings,
};
use crate::doppler::build_classes;
use crate::error::Result;
use crate::experiments::{two_photon_resonance, Grid};
use crate::fluctuations::{evaluate_point, PointResult};
use crate::model::{DopplerConfig, SystemParams};

/// Evaluator of the three closed-form absorption terms.
pub type TermFn = fn(&SystemParams, ShiftedDetunings) -> PerturbativeTerms;

pub const DECOUPLED_TOLERANCE: f64 = 1e-9;
pub const STATE_TOLERANCE: f64 = 1e-10;
pub const COVARIANCE_TOLERANCE: f64 = 1e-10;
pub const ORACLE_TOLERANCE: f64 = 1e-6;
/// Relative change allowed when the per-panel order is doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;
/// Probe and pump coupling scales of the weak-field oracle.
const ORACLE_PROBE_SCALE: f64 = 1e-3;
const ORACLE_PUMP_SCALE: f64 = 2e-2;
const CHECK_RATES: [f64; 2] = [0.0, 6.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Passes when `value <= tolerance`.
fn bounded(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: value <= tolerance,
        value,
        tolerance,
        detail: detail.into(),
    }
}

fn failed(name: &str, tolerance: f64, err: impl std::fmt::Display) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: false,
        value: f64::NAN,
        tolerance,
        detail: err.to_string(),
    }
}

fn check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| failed(name, tolerance, e))
}

fn worst(values: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    values.fold(
        (0.0, f64::NAN),
        |acc, (v, at)| if v > acc.0 || v.is_nan() { (v, at) } else { acc },
    )
}

#[derive(Debug, Clone)]
pub struct Validator {
    pub params: SystemParams,
    pub omega: f64,
    /// Number of probe detunings sampled across the spectrum window.
    pub points: usize,
    pub delta1_range: (f64, f64),
    pub terms: TermFn,
}

impl Validator {
    pub fn new(params: SystemParams) -> Self {
        Self {
            params,
            omega: 0.0,
            points: 17,
            delta1_range: (-800.0, 800.0),
            terms: perturbative_terms,
        }
    }

    /// Replaces the closed-form term evaluator.
    pub fn with_terms(mut self, terms: TermFn) -> Self {
        self.terms = terms;
        self
    }

    fn detunings(&self) -> Result<Vec<f64>> {
        Ok(Grid::new(self.delta1_range.0, self.delta1_range.1, self.points.max(2))?.values())
    }

    fn at_rate(&self, p: f64) -> Result<SystemParams> {
        let mut params = self.params.clone();
        params.set_collision_rate(p)?;
        Ok(params)
    }

    pub fn run(&self) -> ValidationReport {
        let mut checks = self.decoupled_limits();
        checks.extend(self.steady_states());
        checks.push(self.quadrature_convergence());
        checks.push(self.perturbative_oracle());
        checks.extend(self.covariance_physicality());
        checks.extend(self.term_signs());
        ValidationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    fn spectrum_points(&self, params: &SystemParams) -> Result<Vec<(f64, PointResult)>> {
        self.detunings()?
            .into_par_iter()
            .map(|d| evaluate_point(params, d, self.omega).map(|r| (d, r)))
            .collect()
    }

    pub fn decoupled_limits(&self) -> Vec<CheckResult> {
        let mut no_coupling = self.params.clone();
        no_coupling.couplings.g1 = 0.0;
        let mut empty = self.params.clone();
        empty.geometry.density = 0.0;
        let mut zero_length = self.params.clone();
        zero_length.geometry.length = 0.0;
        [
            ("decoupled-probe-coupling", no_coupling),
            ("decoupled-density", empty),
            ("decoupled-length", zero_length),
        ]
        .into_iter()
        .map(|(name, params)| {
            check(name, DECOUPLED_TOLERANCE, || {
                let pts = self.spectrum_points(&params)?;
                let (dev, at) = worst(pts.iter().map(|(d, r)| ((r.duan.v12 - 4.0).abs(), *d)));
                Ok(bounded(
                    name,
                    dev,
                    DECOUPLED_TOLERANCE,
                    format!("max |V12 - 4| at delta1 = {at}"),
                ))
            })
        })
        .collect()
    }

    pub fn steady_states(&self) -> Vec<CheckResult> {
        let run = || -> Result<(f64, f64)> {
            let mut trace: f64 = 0.0;
            let mut herm: f64 = 0.0;
            for p in CHECK_RATES {
                let params = self.at_rate(p)?;
                for d in self.detunings()? {
                    for class in build_classes(&params, d, params.field.delta2)? {
                        let m = steady_state(&params, class.shifted)?;
                        trace = trace.max(m.trace_error());
                        herm = herm.max(m.hermiticity_error());
                    }
                }
            }
            Ok((trace, herm))
        };
        match run() {
            Ok((trace, herm)) => vec![
                bounded(
                    "steady-state-trace",
                    trace,
                    STATE_TOLERANCE,
                    "max |Tr rho - 1| over all classes",
                ),
                bounded(
                    "steady-state-hermiticity",
                    herm,
                    STATE_TOLERANCE,
                    "max |rho - rho^dagger|",
                ),
            ],
            Err(e) => vec![
                failed("steady-state-trace", STATE_TOLERANCE, &e),
                failed("steady-state-hermiticity", STATE_TOLERANCE, &e),
            ],
        }
    }

    /// Doubling the per-panel order changes absorption and V₁₂ by less than
    /// the tolerance, relative to the value.
    pub fn quadrature_convergence(&self) -> CheckResult {
        let name = "quadrature-convergence";
        check(name, CONVERGENCE_TOLERANCE, || {
            let coarse = self.params.clone();
            let mut fine = self.params.clone();
            fine.doppler = DopplerConfig {
                nodes: 2 * coarse.doppler.nodes,
                ..coarse.doppler
            };
            let (lo, hi) = self.delta1_range;
            let probes = [lo, 0.5 * lo, 0.0, 0.5 * hi, hi]
                .into_iter()
                .chain([two_photon_resonance(&self.params)]);
            let mut rel: Vec<(f64, f64)> = Vec::new();
            for d in probes {
                let (a, b) = (
                    evaluate_point(&coarse, d, self.omega)?,
                    evaluate_point(&fine, d, self.omega)?,
                );
                let scale = b.absorption.abs().max(1e-12);
                rel.push(((a.absorption - b.absorption).abs() / scale, d));
                rel.push(((a.duan.v12 - b.duan.v12).abs() / b.duan.v12.abs(), d));
            }
            let (dev, at) = worst(rel.into_iter());
            Ok(bounded(
                name,
                dev,
                CONVERGENCE_TOLERANCE,
                format!(
                    "nodes {} vs {}, worst at delta1 = {at}",
                    coarse.doppler.nodes, fine.doppler.nodes
                ),
            ))
        })
    }

    /// With both fields weak the exact steady-state absorption reduces to the
    /// closed-form terms.
    pub fn perturbative_oracle(&self) -> CheckResult {
        let name = "perturbative-oracle";
        check(name, ORACLE_TOLERANCE, || {
            let mut dev: Vec<(f64, f64)> = Vec::new();
            for p in CHECK_RATES {
                for pump in [true, false] {
                    let mut params = self.at_rate(p)?;
                    params.couplings.g1 *= ORACLE_PROBE_SCALE;
                    params.couplings.g2 *= if pump { ORACLE_PUMP_SCALE } else { 0.0 };
                    for d in self.detunings()? {
                        let exact = absorption_exact(&params, d)?;
                        let approx = absorption_perturbative_with(&params, d, self.terms)?;
                        dev.push(((exact - approx).abs(), d));
                    }
                }
            }
            let (dev, at) = worst(dev.into_iter());
            Ok(bounded(name, dev, ORACLE_TOLERANCE, format!("worst at delta1 = {at}")))
        })
    }

    pub fn covariance_physicality(&self) -> Vec<CheckResult> {
        let names = [
            "covariance-conjugation",
            "covariance-hermiticity",
            "covariance-uncertainty",
            "duan-decomposition",
            "stability",
        ];
        let run = || -> Result<Vec<CheckResult>> {
            let mut pts = Vec::new();
            for p in CHECK_RATES {
                pts.extend(self.spectrum_points(&self.at_rate(p)?)?);
            }
            let diag = |f: fn(&PointResult) -> f64| worst(pts.iter().map(|(d, r)| (f(r), *d)));
            let (conj, conj_at) = diag(|r| r.diagnostics.covariance_conjugation_error);
            let (herm, herm_at) = diag(|r| r.diagnostics.covariance_hermiticity_error);
            let (margin, margin_at) = diag(|r| -r.diagnostics.uncertainty_margin);
            let (split, split_at) = diag(|r| {
                let d = &r.duan;
                let negative = (-d.du2).max(-d.dv2).max(0.0);
                (d.v12 - d.du2 - d.dv2).abs().max(negative)
            });
            let (stab, stab_at) = pts
                .iter()
                .map(|(d, r)| (r.diagnostics.max_stability, *d))
                .fold((f64::NEG_INFINITY, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
            Ok(vec![
                bounded(
                    names[0],
                    conj,
                    COVARIANCE_TOLERANCE,
                    format!("worst at delta1 = {conj_at}"),
                ),
                bounded(
                    names[1],
                    herm,
                    COVARIANCE_TOLERANCE,
                    format!("worst at delta1 = {herm_at}"),
                ),
                bounded(
                    names[2],
                    margin,
                    DECOUPLED_TOLERANCE,
                    format!("negated min eigenvalue of V + i Omega, worst at delta1 = {margin_at}"),
                ),
                bounded(
                    names[3],
                    split,
                    DECOUPLED_TOLERANCE,
                    format!("worst at delta1 = {split_at}"),
                ),
                CheckResult {
                    name: names[4].into(),
                    passed: stab < 0.0,
                    value: stab,
                    tolerance: 0.0,
                    detail: format!("max Re eigenvalue of the atomic drift, at delta1 = {stab_at}"),
                },
            ])
        };
        run().unwrap_or_else(|e| names.iter().map(|n| failed(n, 0.0, &e)).collect())
    }

    /// Background and two-step terms are never negative; the interference
    /// term is never positive on two-photon resonance; and at resonance the
    /// interference term loses weight to the two-step term as p grows.
    pub fn term_signs(&self) -> Vec<CheckResult> {
        let run = || -> Result<Vec<CheckResult>> {
            let params = &self.params;
            let ds = self.detunings()?;
            let mut negative: f64 = 0.0;
            for &d1 in &ds {
                for &d2 in &ds {
                    let t = (self.terms)(params, ShiftedDetunings { d1, d2 });
                    negative = negative.max(-t.linear).max(-t.two_step);
                }
            }
            let mut positive: f64 = 0.0;
            let mut ratios = Vec::new();
            for k in 0..=20 {
                let p = self.at_rate(k as f64)?;
                let t = (self.terms)(&p, ShiftedDetunings { d1: 0.0, d2: 0.0 });
                positive = positive.max(t.eit);
                ratios.push(t.eit.abs() / t.two_step);
            }
            let rise = ratios.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(vec![
                bounded(
                    "term-sign-background",
                    negative,
                    0.0,
                    "most negative background or two-step term",
                ),
                bounded(
                    "term-sign-interference",
                    positive,
                    0.0,
                    "largest interference term at d1 = d2 = 0, p in 0..=20",
                ),
                CheckResult {
                    name: "term-ratio-decay".into(),
                    passed: rise < 0.0,
                    value: rise,
                    tolerance: 0.0,
                    detail: "largest step of |interference| / two-step over p in 0..=20".into(),
                },
            ])
        };
        run().unwrap_or_else(|e| {
            ["term-sign-background", "term-sign-interference", "term-ratio-decay"]
                .iter()
                .map(|n| failed(n, 0.0, &e))
                .collect()
        })
    }
}

/// Mutation fixture: the closed-form terms with the interference sign flipped.
pub fn flipped_interference_terms(params: &SystemParams, shifted: ShiftedDetunings) -> PerturbativeTerms {
    let t = perturbative_terms(params, shifted);
    PerturbativeTerms { eit: -t.eit, ..t }
}
