//! Scenario files, presets, CSV output, and the command-line surface.
//!
//! Scenario documents are UTF-8 JSON. Unknown keys are rejected, missing
//! keys fall back to documented defaults, and every validation error names
//! the offending key. Trace and summary CSVs are byte-deterministic:
//! values are printed with nine significant digits, a dot decimal
//! separator, and `\n` line endings.

use crate::metrics::MetricsReport;
use crate::sim::{
    run_closed_loop, ControllerConfig, DisturbanceConfig, PlantConfig, Scenario, StepReference,
    Trace,
};
use crate::plant::ZpkModel;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// CLI failures, one variant per process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input or an invariant violation; exit code 1.
    #[error("{0}")]
    Invalid(String),
    /// A simulation aborted at runtime; exit code 2.
    #[error("{0}")]
    Runtime(String),
    /// Filesystem failure; exit code 3.
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

/// The three built-in controller presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Smc1,
    Smc2,
    PidSmc1,
}

impl Preset {
    pub fn from_name(name: &str) -> Result<Self, CliError> {
        match name {
            "smc1" => Ok(Preset::Smc1),
            "smc2" => Ok(Preset::Smc2),
            "pid-smc1" => Ok(Preset::PidSmc1),
            other => Err(CliError::Invalid(format!(
                "unknown preset \"{other}\" (expected smc1, smc2, or pid-smc1)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Smc1 => "smc1",
            Preset::Smc2 => "smc2",
            Preset::PidSmc1 => "pid-smc1",
        }
    }

    pub fn scenario(&self) -> Scenario {
        match self {
            Preset::Smc1 => Scenario::smc1(),
            Preset::Smc2 => Scenario::smc2(),
            Preset::PidSmc1 => Scenario::pid_smc1(),
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario documents
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(default)]
    plant: Option<PlantDoc>,
    controller: ControllerDoc,
    #[serde(default)]
    reference: Option<ReferenceDoc>,
    #[serde(default)]
    duration: Option<f64>,
    #[serde(default)]
    dt: Option<f64>,
    #[serde(default)]
    disturbance: Option<DisturbanceDoc>,
    #[serde(default)]
    eta: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PlantDoc {
    Torpedo,
    Custom(ZpkPairDoc),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZpkPairDoc {
    immersion: ZpkDoc,
    inclination: ZpkDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZpkDoc {
    zeros: Vec<f64>,
    poles: Vec<f64>,
    gain: f64,
}

impl From<&ZpkModel> for ZpkDoc {
    fn from(model: &ZpkModel) -> Self {
        Self {
            zeros: model.zeros.clone(),
            poles: model.poles.clone(),
            gain: model.gain,
        }
    }
}

impl From<&ZpkDoc> for ZpkModel {
    fn from(doc: &ZpkDoc) -> Self {
        ZpkModel::new(doc.zeros.clone(), doc.poles.clone(), doc.gain)
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControllerDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReferenceDoc {
    #[serde(default)]
    amplitude: Option<f64>,
    #[serde(default)]
    step_time: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DisturbanceDoc {
    #[serde(default)]
    enabled: Option<bool>,
    #[serde(rename = "M", default)]
    m: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
}

fn reject_foreign_gains(
    kind: &str,
    fields: &[(&'static str, Option<f64>)],
) -> Result<(), CliError> {
    for (name, value) in fields {
        if value.is_some() {
            return Err(CliError::Invalid(format!(
                "scenario key \"controller.{name}\" is not valid for kind \"{kind}\""
            )));
        }
    }
    Ok(())
}

fn controller_from_doc(doc: &ControllerDoc) -> Result<ControllerConfig, CliError> {
    match doc.kind.as_str() {
        "smc1" => {
            reject_foreign_gains(
                "smc1",
                &[
                    ("beta1", doc.beta1),
                    ("beta2", doc.beta2),
                    ("beta3", doc.beta3),
                    ("alpha1", doc.alpha1),
                    ("alpha2", doc.alpha2),
                    ("alpha3", doc.alpha3),
                    ("lambda", doc.lambda),
                    ("phi", doc.phi),
                ],
            )?;
            Ok(ControllerConfig::Smc1 {
                k1: doc.k1.unwrap_or(1.0),
                k2: doc.k2.unwrap_or(2.5),
                k: doc.k.unwrap_or(3.0),
            })
        }
        "smc2" => {
            reject_foreign_gains(
                "smc2",
                &[
                    ("k1", doc.k1),
                    ("k2", doc.k2),
                    ("alpha1", doc.alpha1),
                    ("alpha2", doc.alpha2),
                    ("alpha3", doc.alpha3),
                    ("lambda", doc.lambda),
                    ("phi", doc.phi),
                ],
            )?;
            Ok(ControllerConfig::Smc2 {
                beta1: doc.beta1.unwrap_or(2.0),
                beta2: doc.beta2.unwrap_or(5.0),
                beta3: doc.beta3.unwrap_or(2.0),
                k: doc.k.unwrap_or(1.8),
            })
        }
        "pid-smc1" => {
            reject_foreign_gains(
                "pid-smc1",
                &[
                    ("k1", doc.k1),
                    ("k2", doc.k2),
                    ("k", doc.k),
                    ("beta1", doc.beta1),
                    ("beta2", doc.beta2),
                    ("beta3", doc.beta3),
                ],
            )?;
            Ok(ControllerConfig::PidSmc1 {
                alpha1: doc.alpha1.unwrap_or(1.0),
                alpha2: doc.alpha2.unwrap_or(4.0),
                alpha3: doc.alpha3.unwrap_or(0.04),
                lambda: doc.lambda.unwrap_or(1.0),
                phi: doc.phi.unwrap_or(2.0),
            })
        }
        other => Err(CliError::Invalid(format!(
            "scenario key \"controller.kind\": unknown controller kind \"{other}\" \
             (expected smc1, smc2, or pid-smc1)"
        ))),
    }
}

fn controller_to_doc(config: &ControllerConfig) -> ControllerDoc {
    let mut doc = ControllerDoc {
        kind: config.kind().to_string(),
        ..ControllerDoc::default()
    };
    match *config {
        ControllerConfig::Smc1 { k1, k2, k } => {
            doc.k1 = Some(k1);
            doc.k2 = Some(k2);
            doc.k = Some(k);
        }
        ControllerConfig::Smc2 {
            beta1,
            beta2,
            beta3,
            k,
        } => {
            doc.beta1 = Some(beta1);
            doc.beta2 = Some(beta2);
            doc.beta3 = Some(beta3);
            doc.k = Some(k);
        }
        ControllerConfig::PidSmc1 {
            alpha1,
            alpha2,
            alpha3,
            lambda,
            phi,
        } => {
            doc.alpha1 = Some(alpha1);
            doc.alpha2 = Some(alpha2);
            doc.alpha3 = Some(alpha3);
            doc.lambda = Some(lambda);
            doc.phi = Some(phi);
        }
    }
    doc
}

fn doc_to_scenario(doc: &ScenarioDoc) -> Result<Scenario, CliError> {
    let plant = match &doc.plant {
        None | Some(PlantDoc::Torpedo) => PlantConfig::Torpedo,
        Some(PlantDoc::Custom(pair)) => PlantConfig::Custom {
            immersion: ZpkModel::from(&pair.immersion),
            inclination: ZpkModel::from(&pair.inclination),
        },
    };
    let reference = match &doc.reference {
        Some(r) => StepReference {
            amplitude: r.amplitude.unwrap_or(crate::sim::DEFAULT_STEP_AMPLITUDE),
            step_time: r.step_time.unwrap_or(crate::sim::DEFAULT_STEP_TIME),
        },
        None => StepReference::default(),
    };
    let disturbance = match &doc.disturbance {
        Some(d) => DisturbanceConfig {
            enabled: d.enabled.unwrap_or(false),
            bound: d.m.unwrap_or(0.0),
            seed: d.seed.unwrap_or(0),
        },
        None => DisturbanceConfig::default(),
    };
    let scenario = Scenario {
        plant,
        controller: controller_from_doc(&doc.controller)?,
        reference,
        duration: doc.duration.unwrap_or(crate::sim::DEFAULT_DURATION),
        dt: doc.dt.unwrap_or(crate::sim::DEFAULT_DT),
        disturbance,
        eta: doc.eta.unwrap_or(0.0),
    };
    scenario
        .validate()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(scenario)
}

fn scenario_to_doc(scenario: &Scenario) -> ScenarioDoc {
    ScenarioDoc {
        plant: Some(match &scenario.plant {
            PlantConfig::Torpedo => PlantDoc::Torpedo,
            PlantConfig::Custom {
                immersion,
                inclination,
            } => PlantDoc::Custom(ZpkPairDoc {
                immersion: ZpkDoc::from(immersion),
                inclination: ZpkDoc::from(inclination),
            }),
        }),
        controller: controller_to_doc(&scenario.controller),
        reference: Some(ReferenceDoc {
            amplitude: Some(scenario.reference.amplitude),
            step_time: Some(scenario.reference.step_time),
        }),
        duration: Some(scenario.duration),
        dt: Some(scenario.dt),
        disturbance: Some(DisturbanceDoc {
            enabled: Some(scenario.disturbance.enabled),
            m: Some(scenario.disturbance.bound),
            seed: Some(scenario.disturbance.seed),
        }),
        eta: Some(scenario.eta),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let doc: ScenarioDoc = serde_json::from_str(text)
        .map_err(|e| CliError::Invalid(format!("scenario parse error: {e}")))?;
    doc_to_scenario(&doc)
}

/// Loads a scenario file from disk.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

/// Serializes a scenario as a normalized document with every key explicit.
pub fn scenario_to_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(&scenario_to_doc(scenario))
        .expect("scenario documents always serialize")
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

/// Nine significant digits, dot decimal, locale independent.
pub fn format_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v }; // fold -0.0
    format!("{v:.8e}")
}

/// Renders the trace CSV with header `t,z,theta,e,s,u`. An aborted run
/// keeps its partial rows and is flagged with a trailing comment line.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(trace.records.len() * 84 + 16);
    out.push_str("t,z,theta,e,s,u\n");
    for r in &trace.records {
        out.push_str(&format_value(r.t));
        out.push(',');
        out.push_str(&format_value(r.z));
        out.push(',');
        out.push_str(&format_value(r.theta));
        out.push(',');
        out.push_str(&format_value(r.e));
        out.push(',');
        out.push_str(&format_value(r.s));
        out.push(',');
        out.push_str(&format_value(r.u));
        out.push('\n');
    }
    if let Some(reason) = &trace.abort {
        out.push_str(&format!("# aborted: {reason}\n"));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Header of the comparison summary CSV.
pub const COMPARE_HEADER: &str =
    "name,switch_count,total_variation,settling_time,steady_control_mean,steady_control_tv,peak_control";

fn compare_row(label: &str, outcome: &Result<MetricsReport, String>) -> String {
    match outcome {
        Ok(report) => format!(
            "{},{},{},{},{},{},{}",
            label,
            report.switch_count,
            format_value(report.total_variation),
            report
                .settling_time
                .map(format_value)
                .unwrap_or_default(),
            format_value(report.steady_control_mean),
            format_value(report.steady_control_tv),
            format_value(report.peak_control),
        ),
        Err(_) => format!("{label},error,error,error,error,error,error"),
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Runs one scenario, writes its trace CSV, and prints the metrics report.
pub fn cmd_run(scenario: &Scenario, out: &Path) -> Result<MetricsReport, CliError> {
    let trace = run_closed_loop(scenario).map_err(|e| CliError::Invalid(e.to_string()))?;
    write_file(out, &trace_csv(&trace))?;
    let report = MetricsReport::from_trace(&trace);
    println!("{report}");
    match &trace.abort {
        Some(reason) => Err(CliError::Runtime(format!(
            "simulation aborted, partial trace written to {}: {reason}",
            out.display()
        ))),
        None => Ok(report),
    }
}

/// Runs every scenario (in parallel) and writes one metrics row per
/// scenario, in input order. Failed runs keep an `error` sentinel row.
pub fn cmd_compare(items: &[(String, Scenario)], out: &Path) -> Result<(), CliError> {
    if items.len() < 2 {
        return Err(CliError::Invalid(format!(
            "compare needs at least two scenarios (got {})",
            items.len()
        )));
    }
    let outcomes: Vec<Result<MetricsReport, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .iter()
            .map(|(_, scenario)| {
                scope.spawn(move || match run_closed_loop(scenario) {
                    Err(err) => Err(err.to_string()),
                    Ok(trace) => match &trace.abort {
                        Some(reason) => Err(reason.clone()),
                        None => Ok(MetricsReport::from_trace(&trace)),
                    },
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect()
    });

    let mut csv = String::from(COMPARE_HEADER);
    csv.push('\n');
    for ((label, _), outcome) in items.iter().zip(&outcomes) {
        csv.push_str(&compare_row(label, outcome));
        csv.push('\n');
    }
    write_file(out, &csv)?;

    for ((label, _), outcome) in items.iter().zip(&outcomes) {
        if let Err(reason) = outcome {
            return Err(CliError::Runtime(format!(
                "scenario \"{label}\" failed: {reason}"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "torpedo-smc",
    version,
    about = "Closed-loop sliding-mode depth control experiments on the torpedo plant"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its trace CSV
    Run {
        /// Scenario JSON file
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Controller preset: smc1, smc2, or pid-smc1 (replaces the file's controller)
        #[arg(long)]
        preset: Option<String>,
        /// Trace CSV output path
        #[arg(long)]
        out: PathBuf,
        /// Integration step override, seconds
        #[arg(long)]
        dt: Option<f64>,
        /// Run length override, seconds
        #[arg(long)]
        duration: Option<f64>,
        /// Depth step amplitude override, meters
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// Run several scenarios and write one metrics summary row per scenario
    Compare {
        /// Controller presets, one flag per scenario
        #[arg(long = "preset")]
        presets: Vec<String>,
        /// Scenario JSON files, one flag per scenario
        #[arg(long = "scenario")]
        scenarios: Vec<PathBuf>,
        /// Summary CSV output path
        #[arg(long)]
        out: PathBuf,
        /// Integration step override, seconds
        #[arg(long)]
        dt: Option<f64>,
        /// Run length override, seconds
        #[arg(long)]
        duration: Option<f64>,
        /// Depth step amplitude override, meters
        #[arg(long)]
        amplitude: Option<f64>,
    },
}

fn apply_overrides(
    scenario: &mut Scenario,
    dt: Option<f64>,
    duration: Option<f64>,
    amplitude: Option<f64>,
) {
    if let Some(dt) = dt {
        scenario.dt = dt;
    }
    if let Some(duration) = duration {
        scenario.duration = duration;
    }
    if let Some(amplitude) = amplitude {
        scenario.reference.amplitude = amplitude;
    }
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|stem| stem.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            scenario,
            preset,
            out,
            dt,
            duration,
            amplitude,
        } => {
            let preset = preset.map(|name| Preset::from_name(&name)).transpose()?;
            let mut resolved = match (&scenario, preset) {
                (Some(path), preset) => {
                    let mut s = load_scenario(path)?;
                    if let Some(p) = preset {
                        s.controller = p.scenario().controller;
                    }
                    s
                }
                (None, Some(p)) => p.scenario(),
                (None, None) => {
                    return Err(CliError::Invalid(
                        "run needs --scenario <file> or --preset <name>".to_string(),
                    ))
                }
            };
            apply_overrides(&mut resolved, dt, duration, amplitude);
            resolved
                .validate()
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            cmd_run(&resolved, &out).map(|_| ())
        }
        Command::Compare {
            presets,
            scenarios,
            out,
            dt,
            duration,
            amplitude,
        } => {
            let mut items: Vec<(String, Scenario)> = Vec::new();
            for name in &presets {
                let preset = Preset::from_name(name)?;
                items.push((preset.name().to_string(), preset.scenario()));
            }
            for path in &scenarios {
                items.push((file_label(path), load_scenario(path)?));
            }
            for (_, scenario) in items.iter_mut() {
                apply_overrides(scenario, dt, duration, amplitude);
                scenario
                    .validate()
                    .map_err(|e| CliError::Invalid(e.to_string()))?;
            }
            cmd_compare(&items, &out)
        }
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return 0;
            }
            eprint!("{err}");
            return 1;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
