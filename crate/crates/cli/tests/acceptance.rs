//! End-to-end acceptance run over the published parameter regimes.
//!
//! Prints one `PASS`/`FAIL` line per criterion and exits nonzero if any
//! criterion fails. Spectra shared between criteria are computed once.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use laddertangle_core::bloch::{absorption_exact, absorption_perturbative, MeanFields};
use laddertangle_core::doppler::build_classes;
use laddertangle_core::experiments::{
    default_delta1_grid, dipole_baseline_params, extract_feature, feature_half_width, fig3_scenario, find_scenario,
    FeatureKind, FeatureOptions, FeatureReport, PumpSweepTable, ScenarioResult, COLLISION_RATES,
};
use laddertangle_core::fluctuations::{
    averaged_field, probe_polarization, v12_spectrum, PointDiagnostics, SpectrumTable,
};
use laddertangle_core::model::{QuadratureKind, SystemParams};
use laddertangle_core::numerics::C64 as Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DECOUPLED_TOLERANCE: f64 = 1e-9;
const DECOUPLED_BUDGET: Duration = Duration::from_secs(10);
const DECOUPLED_NODES: usize = 128;

const ORACLE_TOLERANCE: f64 = 1e-6;
const ORACLE_PROBE_SCALE: f64 = 1e-3;
const ORACLE_RATES: [f64; 2] = [0.0, 6.0];
const ORACLE_BUDGET: Duration = Duration::from_secs(60);

const SPECTRA_BUDGET: Duration = Duration::from_secs(300);

const DUAN_BOUND: f64 = 4.0;
const ORDERING_MARGIN: f64 = 1e-4;

const WEAK_PUMP_LIMIT: (f64, f64) = (3.95, 4.0);
const PUMP_SWEEP_TARGET: f64 = 2.9;
const PUMP_SWEEP_TARGET_TOLERANCE: f64 = 0.6;
const PUMP_SWEEP_BUDGET: Duration = Duration::from_secs(600);

const RELOCATED_RESONANCE: f64 = 200.0;
const LOCATION_TOLERANCE: f64 = 6.0;

const STATE_TOLERANCE: f64 = 1e-10;
const CONJUGATION_TOLERANCE: f64 = 1e-10;

const GENERATOR_DRAWS: usize = 10;
const GENERATOR_TOLERANCE: f64 = 1e-5;
const GENERATOR_SEED: u64 = 0x1add_e7a1;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

struct Suite {
    /// Criteria named on the command line; empty runs all.
    only: Vec<u32>,
    results: Vec<(u32, &'static str, Outcome)>,
}

impl Suite {
    fn wants(&self, ids: &[u32]) -> bool {
        self.only.is_empty() || ids.iter().any(|id| self.only.contains(id))
    }

    fn record(&mut self, id: u32, name: &'static str, outcome: impl FnOnce() -> Outcome) {
        if !self.wants(&[id]) {
            return;
        }
        let outcome = outcome();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} [{name}]: {tag}  {}", outcome.detail);
        self.results.push((id, name, outcome));
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn feature(table: &SpectrumTable, values: &[f64], params: &SystemParams, expected: f64) -> FeatureReport {
    extract_feature(
        &table.axis(),
        values,
        expected,
        &FeatureOptions::with_half_width(feature_half_width(params)),
    )
    .expect("feature window fits the grid")
}

fn scenario_params(name: &str) -> SystemParams {
    find_scenario(name).unwrap_or_else(|| panic!("scenario {name}")).params
}

fn spectrum(params: &SystemParams) -> SpectrumTable {
    v12_spectrum(params, &default_delta1_grid().values(), 0.0).expect("spectrum evaluates")
}

fn decoupled_limits() -> Outcome {
    let start = Instant::now();
    let mut base = scenario_params("fig2-a");
    base.doppler.quadrature = QuadratureKind::GaussHermite;
    base.doppler.nodes = DECOUPLED_NODES;
    let mut no_coupling = base.clone();
    no_coupling.couplings.g1 = 0.0;
    let mut empty = base.clone();
    empty.geometry.density = 0.0;
    let mut zero_length = base;
    zero_length.geometry.length = 0.0;
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for (label, params) in [("g1=0", no_coupling), ("n=0", empty), ("L=0", zero_length)] {
        let dev = max_of(spectrum(&params).v12().into_iter().map(|v| (v - 4.0).abs()));
        worst = worst.max(dev);
        parts.push(format!("{label}: {dev:.1e}"));
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= DECOUPLED_TOLERANCE && elapsed < DECOUPLED_BUDGET,
        format!(
            "max |V12 - 4| {} (tol {DECOUPLED_TOLERANCE:e}); {:.1} s of {} s",
            parts.join(", "),
            elapsed.as_secs_f64(),
            DECOUPLED_BUDGET.as_secs()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let grid = default_delta1_grid().values();
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for p in ORACLE_RATES {
        for pump in [true, false] {
            let mut params = dipole_baseline_params(p);
            params.couplings.g1 *= ORACLE_PROBE_SCALE;
            if !pump {
                params.couplings.g2 = 0.0;
            }
            let (dev, at) = grid
                .iter()
                .map(|&d| {
                    let exact = absorption_exact(&params, d).expect("steady state");
                    let approx = absorption_perturbative(&params, d).expect("closed form");
                    ((exact - approx).abs(), d)
                })
                .fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
            worst = worst.max(dev);
            let label = if pump { "on" } else { "off" };
            parts.push(format!("p={p} pump {label}: {dev:.2e} at {at}"));
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= ORACLE_TOLERANCE && elapsed < ORACLE_BUDGET,
        format!(
            "{} (tol {ORACLE_TOLERANCE:e}); {:.1} s",
            parts.join("; "),
            elapsed.as_secs_f64()
        ),
    )
}

/// Baseline spectra at the four collision rates. Each table carries both
/// V₁₂ and absorption, so the V₁₂ and absorption panels of a rate share it.
struct Baseline {
    params: Vec<SystemParams>,
    tables: Vec<SpectrumTable>,
    elapsed: Duration,
}

impl Baseline {
    fn compute() -> Self {
        let start = Instant::now();
        let params: Vec<SystemParams> = ["fig2-a", "fig2-b", "fig2-c", "fig2-d"].map(scenario_params).into();
        for (p, rate) in params.iter().zip(COLLISION_RATES) {
            assert_eq!(p.decay.p, rate);
        }
        let tables = params.iter().map(spectrum).collect();
        Self {
            params,
            tables,
            elapsed: start.elapsed(),
        }
    }

    fn rate_index(p: f64) -> usize {
        COLLISION_RATES.iter().position(|&r| r == p).expect("baseline rate")
    }

    fn absorption_feature(&self, k: usize) -> FeatureReport {
        let t = &self.tables[k];
        feature(t, &t.absorption(), &self.params[k], 0.0)
    }

    fn v12_feature(&self, k: usize) -> FeatureReport {
        let t = &self.tables[k];
        feature(t, &t.v12(), &self.params[k], 0.0)
    }
}

fn kind_name(kind: FeatureKind) -> &'static str {
    match kind {
        FeatureKind::Dip => "dip",
        FeatureKind::Peak => "peak",
        FeatureKind::None => "none",
    }
}

fn eit_to_eia(base: &Baseline) -> Outcome {
    let expected = [FeatureKind::Dip, FeatureKind::Dip, FeatureKind::Peak, FeatureKind::Peak];
    let mut ok = base.elapsed < SPECTRA_BUDGET;
    let mut parts = Vec::new();
    for (k, want) in expected.into_iter().enumerate() {
        let f = base.absorption_feature(k);
        ok &= f.kind == want;
        parts.push(format!(
            "p={}: {} (want {})",
            COLLISION_RATES[k],
            kind_name(f.kind),
            kind_name(want)
        ));
    }
    Outcome::new(
        ok,
        format!(
            "{}; {:.1} s of {} s",
            parts.join(", "),
            base.elapsed.as_secs_f64(),
            SPECTRA_BUDGET.as_secs()
        ),
    )
}

fn entangled_everywhere(base: &Baseline) -> Outcome {
    let v = base.tables[Baseline::rate_index(0.0)].v12();
    let (lo, hi) = (min_of(&v), max_of(v.iter().copied()));
    let above = v.iter().filter(|&&x| x >= DUAN_BOUND).count();
    Outcome::new(
        hi < DUAN_BOUND && lo > 0.0,
        format!(
            "p=0: V12 in [{lo:.4}, {hi:.4}], {above} of {} points at or above 4",
            v.len()
        ),
    )
}

fn collision_ordering(base: &Baseline) -> Outcome {
    let m = |p: f64| min_of(&base.tables[Baseline::rate_index(p)].v12());
    let (m0, m05, m6) = (m(0.0), m(0.5), m(6.0));
    Outcome::new(
        m6 < m05 - ORDERING_MARGIN && m05 < m0 - ORDERING_MARGIN,
        format!("min V12: p=6 {m6:.5}, p=0.5 {m05:.5}, p=0 {m0:.5} (margin {ORDERING_MARGIN:e})"),
    )
}

fn inverse_shapes(base: &Baseline) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [0.0, 6.0] {
        let k = Baseline::rate_index(p);
        let (v, a) = (base.v12_feature(k).kind, base.absorption_feature(k).kind);
        ok &= matches!(
            (v, a),
            (FeatureKind::Dip, FeatureKind::Peak) | (FeatureKind::Peak, FeatureKind::Dip)
        );
        parts.push(format!("p={p}: V12 {} / absorption {}", kind_name(v), kind_name(a)));
    }
    Outcome::new(ok, parts.join(", "))
}

fn pump_sweep() -> (PumpSweepTable, Duration) {
    let start = Instant::now();
    let table = match fig3_scenario().run().expect("pump sweep evaluates") {
        ScenarioResult::PumpSweep(t) => t,
        ScenarioResult::Spectrum(_) => unreachable!("pump sweep scenario"),
    };
    (table, start.elapsed())
}

fn pump_sweep_shape(table: &PumpSweepTable, elapsed: Duration) -> Outcome {
    let variant = |p: f64| table.collision_rates.iter().position(|&r| r == p).expect("sweep rate");
    let (v0, v20) = (table.v12(variant(0.0)), table.v12(variant(20.0)));
    let in_limit = |v: &[f64]| (WEAK_PUMP_LIMIT.0..=WEAK_PUMP_LIMIT.1).contains(&v[0]);
    let (m0, m20) = (min_of(&v0), min_of(&v20));
    let argmin = v20.iter().position(|&v| v == m20).expect("nonempty sweep");
    let interior = argmin > 0 && argmin + 1 < v20.len();
    let on_target = (m20 - PUMP_SWEEP_TARGET).abs() <= PUMP_SWEEP_TARGET_TOLERANCE;
    let passed = in_limit(&v0) && in_limit(&v20) && interior && m20 < m0 && elapsed < PUMP_SWEEP_BUDGET;
    Outcome::new(
        passed,
        format!(
            "weak-pump V12 p=0 {:.4}, p=20 {:.4} (want [{}, {}]); p=20 min {m20:.4} at alpha2 = {} ({}); \
             p=0 min {m0:.4}; soft target {PUMP_SWEEP_TARGET}±{PUMP_SWEEP_TARGET_TOLERANCE} {}; {:.1} s",
            v0[0],
            v20[0],
            WEAK_PUMP_LIMIT.0,
            WEAK_PUMP_LIMIT.1,
            table.rows[argmin].alpha2,
            if interior { "interior" } else { "at the grid edge" },
            if on_target { "met" } else { "missed" },
            elapsed.as_secs_f64()
        ),
    )
}

struct Relocation {
    strong: (SystemParams, SpectrumTable),
    detuned: (SystemParams, SpectrumTable),
}

impl Relocation {
    fn compute() -> Self {
        let strong = scenario_params("fig4-a");
        let detuned = scenario_params("fig4-c");
        assert_eq!(scenario_params("fig4-b"), strong);
        assert_eq!(scenario_params("fig4-d"), detuned);
        Self {
            strong: (strong.clone(), spectrum(&strong)),
            detuned: (detuned.clone(), spectrum(&detuned)),
        }
    }
}

fn relocation(r: &Relocation) -> Outcome {
    let (sp, st) = &r.strong;
    let (dp, dt) = &r.detuned;
    let at = -dp.field.delta2;
    assert_eq!(at, RELOCATED_RESONANCE);
    let dv = feature(dt, &dt.v12(), dp, at);
    let da = feature(dt, &dt.absorption(), dp, at);
    let sv = feature(st, &st.v12(), sp, 0.0);
    let sa = feature(st, &st.absorption(), sp, 0.0);
    let near = |f: &FeatureReport| (f.location - RELOCATED_RESONANCE).abs() <= LOCATION_TOLERANCE;
    let passed = dv.kind != FeatureKind::None
        && near(&dv)
        && da.kind == FeatureKind::Peak
        && near(&da)
        && sv.kind == FeatureKind::Dip
        && sa.kind == FeatureKind::Dip;
    Outcome::new(
        passed,
        format!(
            "detuned pump: V12 {} at {}, absorption {} at {} (want within ±{LOCATION_TOLERANCE} of {RELOCATED_RESONANCE}); \
             strong pump: V12 {}, absorption {} (want dip, dip)",
            kind_name(dv.kind),
            dv.location,
            kind_name(da.kind),
            da.location,
            kind_name(sv.kind),
            kind_name(sa.kind)
        ),
    )
}

fn physicality<'a>(diagnostics: impl Iterator<Item = &'a PointDiagnostics>) -> Outcome {
    let (mut trace, mut herm, mut conj, mut stab, mut points): (f64, f64, f64, f64, usize) =
        (0.0, 0.0, 0.0, f64::NEG_INFINITY, 0);
    for d in diagnostics {
        trace = trace.max(d.max_trace_error);
        herm = herm.max(d.max_hermiticity_error);
        conj = conj.max(d.covariance_conjugation_error);
        stab = stab.max(d.max_stability);
        points += 1;
    }
    Outcome::new(
        trace < STATE_TOLERANCE && herm < STATE_TOLERANCE && conj < CONJUGATION_TOLERANCE && stab < 0.0,
        format!(
            "{points} points: trace {trace:.1e}, hermiticity {herm:.1e}, conjugation {conj:.1e}, max Re lambda {stab:.3e}"
        ),
    )
}

/// Finite-difference check of the (δa₁ ← δa₁) field generator entry, the
/// Wirtinger derivative of the mean probe polarization with respect to α₁.
fn linearization_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(GENERATOR_SEED);
    let mut worst: f64 = 0.0;
    let mut worst_draw = String::new();
    for _ in 0..GENERATOR_DRAWS {
        let p = rng.gen_range(0.0..20.0);
        let mut params = scenario_params("fig2-a");
        params.set_collision_rate(p).expect("valid rate");
        params.field.alpha1 *= rng.gen_range(0.8..1.2);
        params.field.alpha2 *= rng.gen_range(0.8..1.2);
        params.field.delta2 = rng.gen_range(-20.0..20.0);
        params.revalidate().expect("valid draw");
        let delta1 = rng.gen_range(-60.0..60.0);

        let classes = build_classes(&params, delta1, params.field.delta2).expect("classes");
        let (field, _, _) = averaged_field(&params, &classes, 0.0).expect("field generator");
        let analytic = field.generator[(0, 0)];

        let base = MeanFields::of(&params);
        let h = 1e-4 * params.field.alpha1;
        let at = |d: Complex64| {
            let fields = MeanFields {
                alpha1: base.alpha1 + d,
                alpha2: base.alpha2,
            };
            probe_polarization(&params, &classes, fields).expect("polarization")
        };
        let dx = (at(Complex64::new(h, 0.0)) - at(Complex64::new(-h, 0.0))) / (2.0 * h);
        let dy = (at(Complex64::new(0.0, h)) - at(Complex64::new(0.0, -h))) / (2.0 * h);
        let numeric = (dx - Complex64::i() * dy) * 0.5;
        let rel = (numeric - analytic).norm() / analytic.norm();
        if rel > worst {
            worst = rel;
            worst_draw = format!("p={p:.2}, delta1={delta1:.1}, delta2={:.1}", params.field.delta2);
        }
    }
    Outcome::new(
        worst < GENERATOR_TOLERANCE,
        format!(
            "{GENERATOR_DRAWS} draws, worst relative error {worst:.2e} ({worst_draw}); tol {GENERATOR_TOLERANCE:e}"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let run = |jobs: &str| {
        let out_dir = dir.path().join(format!("jobs{jobs}"));
        let out = Command::new(env!("CARGO_BIN_EXE_laddertangle"))
            .env_remove("LADDERTANGLE_JOBS")
            .args(["--jobs", jobs, "run", "--scenario", "fig2-c", "--out"])
            .arg(&out_dir)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(out_dir.join("fig2-c.csv")).expect("csv written")
    };
    let (a, b) = (run("1"), run("8"));
    Outcome::new(
        a == b,
        format!("{} vs {} bytes, identical: {}", a.len(), b.len(), a == b),
    )
}

fn main() -> ExitCode {
    let only = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut suite = Suite {
        only,
        results: Vec::new(),
    };
    suite.record(1, "decoupled limits", decoupled_limits);
    suite.record(2, "weak-probe oracle", oracle_equivalence);

    let base = suite.wants(&[3, 4, 5, 6, 9]).then(Baseline::compute);
    if let Some(base) = &base {
        suite.record(3, "transparency to absorption", || eit_to_eia(base));
        suite.record(4, "entanglement at p=0", || entangled_everywhere(base));
        suite.record(5, "collision ordering", || collision_ordering(base));
        suite.record(6, "inverse shapes", || inverse_shapes(base));
    }

    let sweep = suite.wants(&[7, 9]).then(pump_sweep);
    if let Some((table, elapsed)) = &sweep {
        suite.record(7, "pump sweep shape", || pump_sweep_shape(table, *elapsed));
    }

    let relocated = suite.wants(&[8, 9]).then(Relocation::compute);
    if let Some(r) = &relocated {
        suite.record(8, "relocated resonance", || relocation(r));
    }

    if let (Some(base), Some((table, _)), Some(r)) = (&base, &sweep, &relocated) {
        let diagnostics = base
            .tables
            .iter()
            .chain([&r.strong.1, &r.detuned.1])
            .flat_map(|t| t.rows.iter().map(|row| &row.diagnostics))
            .chain(table.rows.iter().flat_map(|row| row.diagnostics.iter()));
        suite.record(9, "physicality", || physicality(diagnostics));
    }
    suite.record(10, "linearization oracle", linearization_oracle);
    suite.record(11, "thread-count determinism", determinism);

    let failed: Vec<String> = suite
        .results
        .iter()
        .filter(|(_, _, o)| !o.passed)
        .map(|(id, name, _)| format!("{id} ({name})"))
        .collect();
    println!(
        "{} of {} criteria passed",
        suite.results.len() - failed.len(),
        suite.results.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
