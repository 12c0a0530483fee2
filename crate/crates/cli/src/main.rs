mod error;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use laddertangle_core::config::{load_config, ConfigDocument, SCHEMA_VERSION};
use laddertangle_core::experiments::{
    all_scenarios, baseline_params, extract_feature, feature_half_width, find_scenario, FeatureOptions, FeatureReport,
    Observable, Scenario, ScenarioResult, Sweep,
};
use laddertangle_core::model::validate_regime;
use laddertangle_core::validation::{flipped_interference_terms, Validator};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{
    manifest_path, pump_sweep_csv, spectrum_csv, write_file, OutputFile, RunManifest, SPECTRUM_HEADER,
};

#[derive(Parser)]
#[command(
    name = "laddertangle",
    version,
    about = "Pump-probe entanglement in Doppler-broadened ladder atoms"
)]
struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, env = "LADDERTANGLE_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a scenario and write its CSV and manifest.
    Run(RunArgs),
    /// Run the invariant suite and print a JSON report.
    Validate(ValidateArgs),
    /// Classify the narrow feature of a spectrum CSV.
    FeatureReport(FeatureArgs),
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Args)]
struct Source {
    /// JSON configuration document.
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario name (see `list-scenarios`).
    #[arg(long)]
    scenario: Option<String>,
}

impl Source {
    fn resolve(&self) -> CliResult<Option<Scenario>> {
        match (&self.config, &self.scenario) {
            (Some(path), _) => Ok(Some(load_config(path)?.to_scenario()?)),
            (None, Some(name)) => find_scenario(name)
                .map(Some)
                .ok_or_else(|| CliError::Input(format!("unknown scenario `{name}`; try `list-scenarios`"))),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Override the probe-detuning grid of a spectrum scenario (MHz).
    #[arg(long = "delta1-min", allow_hyphen_values = true)]
    delta1_min: Option<f64>,
    #[arg(long = "delta1-max", allow_hyphen_values = true)]
    delta1_max: Option<f64>,
    #[arg(long = "delta1-points")]
    delta1_points: Option<usize>,
    /// Fourier frequency (MHz).
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    /// Flip the sign of the interference term of the closed-form absorption.
    InterferenceSign,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: Source,
    /// Fourier frequency (MHz); defaults to the scenario's.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Probe detunings sampled per sweep.
    #[arg(long, default_value_t = 17)]
    points: usize,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Inject a known defect to exercise the suite.
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

#[derive(Args)]
struct FeatureArgs {
    /// Spectrum CSV written by `run`.
    csv: PathBuf,
    /// Expected feature location on the axis; defaults to the manifest's.
    #[arg(long, allow_hyphen_values = true)]
    location: Option<f64>,
    /// Column to classify; defaults to the manifest's observable, else `absorption`.
    #[arg(long)]
    column: Option<String>,
    /// Exclusion half-width; defaults to the manifest's medium, else the p = 0 baseline.
    #[arg(long)]
    half_width: Option<f64>,
    /// Background band width, in units of the half-width.
    #[arg(long, default_value_t = 1.0)]
    background_span: f64,
    /// Relative noise floor.
    #[arg(long, default_value_t = 1e-4)]
    noise_floor: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.jobs);
            return ExitCode::from(2);
        }
    };
    let jobs = pool.current_num_threads();
    let outcome = pool.install(|| match cli.command {
        Command::Run(args) => cmd_run(args, jobs),
        Command::Validate(args) => cmd_validate(args),
        Command::FeatureReport(args) => cmd_feature_report(args),
        Command::ListScenarios => cmd_list(),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn apply_overrides(scenario: &mut Scenario, args: &RunArgs) -> CliResult<()> {
    let wants_grid = args.delta1_min.is_some() || args.delta1_max.is_some() || args.delta1_points.is_some();
    match &mut scenario.sweep {
        Sweep::Delta1 { grid } => {
            grid.min = args.delta1_min.unwrap_or(grid.min);
            grid.max = args.delta1_max.unwrap_or(grid.max);
            grid.points = args.delta1_points.unwrap_or(grid.points);
        }
        Sweep::Alpha2 { .. } if wants_grid => {
            return Err(CliError::Input(format!(
                "scenario `{}` sweeps the pump amplitude; --delta1-* flags do not apply",
                scenario.name
            )))
        }
        Sweep::Alpha2 { .. } => {}
    }
    if let Some(omega) = args.omega {
        scenario.omega = omega;
    }
    scenario.validate()?;
    Ok(())
}

fn cmd_run(args: RunArgs, jobs: usize) -> CliResult<()> {
    let mut scenario = args
        .source
        .resolve()?
        .ok_or_else(|| CliError::Input("give --scenario or --config".into()))?;
    apply_overrides(&mut scenario, &args)?;
    for w in validate_regime(&scenario.params) {
        eprintln!("warning: {w}");
    }
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;

    let started = Instant::now();
    let result = scenario.run()?;
    let wall_time_s = started.elapsed().as_secs_f64();

    let (bytes, rows, classes) = match &result {
        ScenarioResult::Spectrum(t) => {
            let classes = t.rows.iter().map(|r| r.diagnostics.classes).max().unwrap_or(0);
            (spectrum_csv(t), t.rows.len(), classes)
        }
        ScenarioResult::PumpSweep(t) => {
            let classes = t
                .rows
                .iter()
                .flat_map(|r| r.diagnostics.iter().map(|d| d.classes))
                .max()
                .unwrap_or(0);
            (pump_sweep_csv(t), t.rows.len(), classes)
        }
    };
    let file = format!("{}.csv", scenario.name);
    let csv_path = args.out.join(&file);
    write_file(&csv_path, &bytes)?;

    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        config: ConfigDocument::from_scenario(&scenario),
        resolved_params: scenario.params.clone(),
        sweep: scenario.sweep.clone(),
        nodes: scenario.params.doppler.nodes,
        max_velocity_classes: classes,
        jobs,
        wall_time_s,
        warnings: RunManifest::warnings_of(&validate_regime(&scenario.params)),
        outputs: vec![OutputFile {
            file,
            sha256: output::sha256_hex(&bytes),
            rows,
        }],
    };
    let manifest_file = manifest_path(&args.out, &scenario.name);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&manifest_file, text.as_bytes())?;
    println!("{}", csv_path.display());
    println!("{}", manifest_file.display());
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> CliResult<()> {
    let scenario = args.source.resolve()?;
    let params = scenario
        .as_ref()
        .map_or_else(|| baseline_params(0.0), |s| s.params.clone());
    let mut validator = Validator::new(params);
    validator.points = args.points;
    validator.omega = args.omega.or(scenario.as_ref().map(|s| s.omega)).unwrap_or(0.0);
    if let Some(Fault::InterferenceSign) = args.inject_fault {
        validator = validator.with_terms(flipped_interference_terms);
    }
    let report = validator.run();
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    print!("{text}");
    if let Some(path) = &args.out {
        write_file(path, text.as_bytes())?;
    }
    if report.passed {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Validation(format!("failed checks: {}", names.join(", "))))
    }
}

struct Column {
    axis_name: String,
    axis: Vec<f64>,
    name: String,
    values: Vec<f64>,
}

fn read_column(path: &Path, column: &str) -> CliResult<Column> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    let axis_name = headers
        .get(0)
        .ok_or_else(|| CliError::io(path, "empty header"))?
        .to_string();
    let index = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| CliError::io(path, format!("no column `{column}`")))?;
    let (mut axis, mut values) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        let parse = |k: usize| -> CliResult<f64> {
            let cell = record.get(k).unwrap_or("");
            cell.trim()
                .parse()
                .map_err(|_| CliError::io(path, format!("row {}: `{cell}` is not a number", line + 2)))
        };
        axis.push(parse(0)?);
        values.push(parse(index)?);
    }
    Ok(Column {
        axis_name,
        axis,
        name: column.to_string(),
        values,
    })
}

/// Manifest written next to a CSV by `run`, if any.
fn sibling_manifest(csv: &Path) -> Option<RunManifest> {
    let stem = csv.file_stem()?.to_str()?;
    let path = manifest_path(csv.parent()?, stem);
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

#[derive(Serialize)]
struct FeatureOutput {
    axis: String,
    column: String,
    expected_location: f64,
    half_width: f64,
    #[serde(flatten)]
    report: FeatureReport,
}

fn cmd_feature_report(args: FeatureArgs) -> CliResult<()> {
    let manifest = sibling_manifest(&args.csv);
    let scenario = manifest.as_ref().and_then(|m| m.config.to_scenario().ok());
    let column = args
        .column
        .clone()
        .unwrap_or_else(|| match scenario.as_ref().map(|s| s.observable) {
            Some(Observable::V12) => SPECTRUM_HEADER[1].to_string(),
            _ => SPECTRUM_HEADER[4].to_string(),
        });
    let location = args
        .location
        .or(scenario.as_ref().map(|s| s.expected_location))
        .unwrap_or(0.0);
    let half_width = args.half_width.unwrap_or_else(|| match &scenario {
        Some(s) => s.feature_half_width(),
        None => feature_half_width(&baseline_params(0.0)),
    });
    let data = read_column(&args.csv, &column)?;
    let opts = FeatureOptions {
        half_width,
        background_span: args.background_span,
        noise_floor: args.noise_floor,
    };
    let report = extract_feature(&data.axis, &data.values, location, &opts)?;
    let out = FeatureOutput {
        axis: data.axis_name,
        column: data.name,
        expected_location: location,
        half_width,
        report,
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("report serializes"));
    Ok(())
}

fn cmd_list() -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    for s in all_scenarios() {
        let sweep = match &s.sweep {
            Sweep::Delta1 { grid } => format!("delta1 {}..{} ({} points)", grid.min, grid.max, grid.points),
            Sweep::Alpha2 { grid, collision_rates } => format!(
                "alpha2 {}..{} ({} points), p = {:?}",
                grid.min, grid.max, grid.points, collision_rates
            ),
        };
        let observable = match s.observable {
            Observable::V12 => "v12",
            Observable::Absorption => "absorption",
        };
        let f = &s.params.field;
        let line = writeln!(
            out,
            "{}\t{observable}\tp={} alpha1={} alpha2={} delta2={}\t{sweep}",
            s.name, s.params.decay.p, f.alpha1, f.alpha2, f.delta2
        );
        if line.is_err() {
            // reader went away (e.g. `| head`)
            break;
        }
    }
    Ok(())
}
