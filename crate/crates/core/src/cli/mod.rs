//! Command-line front end: one subcommand per experiment, each writing
//! `summary.json` and `data/*.csv` into the output directory.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub use commands::{execute, Outcome, Table};
pub use config::{parse_flux, parse_growth, parse_source, preset, ExperimentConfig};

use crate::error::{Error, Result};
use crate::operators::GrowthCondition;

#[derive(Parser, Debug)]
#[command(
    name = "symlab",
    version,
    about = "Experiments on degenerate quasilinear elliptic problems in a ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Strong-maximum-principle class test for a growth function (or the power-law table).
    AgCheck(Flags),
    /// Growth conditions A, B, C at the zeros of a source.
    CondAbc(Flags),
    /// The two-bump plateau solution: classification, matching, weak residuals.
    Example1(Flags),
    /// Radial Dirichlet problem by shooting.
    Shoot(Flags),
    /// Negative direction of the second variation along a radial profile.
    SecondVariation(Flags),
    /// Energy of dilated radial profiles.
    Rescale(Flags),
    /// Pohozaev-type identity on a grid field.
    Pohozaev(Flags),
    /// Smoothed gradient flow with energy and asymmetry trace.
    Minimize(Flags),
    /// Local-symmetry detector.
    Detect(Flags),
}

impl Command {
    fn split(self) -> (&'static str, Flags) {
        match self {
            Command::AgCheck(f) => ("ag-check", f),
            Command::CondAbc(f) => ("cond-abc", f),
            Command::Example1(f) => ("example1", f),
            Command::Shoot(f) => ("shoot", f),
            Command::SecondVariation(f) => ("second-variation", f),
            Command::Rescale(f) => ("rescale", f),
            Command::Pohozaev(f) => ("pohozaev", f),
            Command::Minimize(f) => ("minimize", f),
            Command::Detect(f) => ("detect", f),
        }
    }
}

fn pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

fn condition(s: &str) -> std::result::Result<GrowthCondition, String> {
    match s {
        "A" | "a" => Ok(GrowthCondition::A),
        "B" | "b" => Ok(GrowthCondition::B),
        "C" | "c" => Ok(GrowthCondition::C),
        _ => Err(format!("condition must be A, B or C, got {s:?}")),
    }
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON config file; its keys are overridden by flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// torsion, example1-caseI, example1-caseII, example1-caseIII, bump-punctured-ball
    #[arg(long)]
    preset: Option<String>,
    /// Flux law, e.g. power:3, minimal-surface, stretched-exp:1,2, or JSON.
    #[arg(long)]
    g: Option<String>,
    /// Source, e.g. const:1, example1:2,3,2, bump:3,4,2,1, or JSON.
    #[arg(long)]
    f: Option<String>,
    /// Growth function, e.g. power:1,1 or zero-on:0.1, or JSON.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// Space dimension.
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    /// Grid step.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "eps-min")]
    eps_min: Option<f64>,
    #[arg(long = "eps-max")]
    eps_max: Option<f64>,
    /// Explicit ε list, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = condition)]
    condition: Option<GrowthCondition>,
    /// Step limit of the gradient flow.
    #[arg(long)]
    steps: Option<usize>,
    /// Number of random test functions.
    #[arg(long)]
    probes: Option<usize>,
    /// Cutoff of the class test, or smoothing of the flow.
    #[arg(long)]
    delta: Option<f64>,
    /// State interval lo,hi searched for zeros.
    #[arg(long = "state-range", value_parser = pair)]
    state_range: Option<[f64; 2]>,
    /// Center-value bracket lo,hi for shooting.
    #[arg(long, value_parser = pair)]
    bracket: Option<[f64; 2]>,
    /// Field CSV to use instead of a generated one.
    #[arg(long)]
    field: Option<PathBuf>,
}

impl Flags {
    fn to_config(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            command: None,
            preset: self.preset.clone(),
            g: self.g.as_deref().map(parse_flux).transpose()?,
            f: self.f.as_deref().map(parse_source).transpose()?,
            phi: self.phi.as_deref().map(parse_growth).transpose()?,
            p: self.p,
            s: self.s,
            n: self.n,
            radius: self.radius,
            h: self.h,
            tol: self.tol,
            eps_min: self.eps_min,
            eps_max: self.eps_max,
            eps: self.eps.clone(),
            seed: self.seed,
            workers: self.workers,
            out: self.out.clone(),
            condition: self.condition,
            steps: self.steps,
            probes: self.probes,
            delta: self.delta,
            state_range: self.state_range,
            bracket: self.bracket,
            field: self.field.clone(),
        })
    }
}

/// Preset, then config file, then flags.
fn resolve(command: &str, flags: &Flags) -> Result<ExperimentConfig> {
    let from_flags = flags.to_config()?;
    let from_file = match &flags.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let layered = from_file.overlay(from_flags);
    let base = match &layered.preset {
        Some(name) => preset(name)?,
        None => ExperimentConfig::default(),
    };
    let mut cfg = base.overlay(layered);
    cfg.command = Some(command.to_string());
    Ok(cfg)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Domain(_) => "domain",
        Error::BracketExpansion { .. } => "bracket_expansion",
        Error::FluxOutOfRange { .. } => "flux_out_of_range",
        Error::NegativeState { .. } => "negative_state",
        Error::NoSignChange { .. } => "no_sign_change",
        Error::Quadrature(_) => "quadrature",
        Error::Precondition(_) => "precondition",
        Error::Exhausted { .. } => "exhausted",
        Error::Unsupported(_) => "unsupported",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
    }
}

fn write_outputs(dir: &Path, summary: &Value, outcome: Option<&Outcome>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(dir.join("summary.json"), text)?;
    let Some(outcome) = outcome else { return Ok(()) };
    let data = dir.join("data");
    std::fs::create_dir_all(&data)?;
    for table in &outcome.tables {
        let mut w = csv::Writer::from_path(data.join(format!("{}.csv", table.name)))?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    for (name, field) in &outcome.fields {
        field.write_csv(&data.join(format!("{name}.csv")))?;
    }
    Ok(())
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(Error::InvalidParameter("workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs one command line and returns the exit status: 0 on success, 1 for
/// an invalid configuration, 2 for a numerical failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let (command, flags) = cli.command.split();
    let mut cfg = match resolve(command, &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("symlab {command}: {e}");
            return 1;
        }
    };
    let out_dir = cfg.out.get_or_insert_with(|| PathBuf::from("out")).clone();
    let workers = cfg.workers;
    let result = with_workers(workers, || {
        let mut local = cfg.clone();
        execute(command, &mut local).map(|o| (o, local))
    })
    .and_then(|r| r);
    match result {
        Ok((outcome, resolved)) => {
            let summary = json!({
                "version": crate::VERSION,
                "command": command,
                "config": resolved,
                "result": outcome.summary,
            });
            if let Err(e) = write_outputs(&out_dir, &summary, Some(&outcome)) {
                eprintln!("symlab {command}: cannot write outputs: {e}");
                return 2;
            }
            0
        }
        Err(e) => {
            let code = if e.is_config_error() { 1 } else { 2 };
            eprintln!("symlab {command}: {e}");
            let summary = json!({
                "version": crate::VERSION,
                "command": command,
                "config": cfg,
                "error": {"kind": error_kind(&e), "message": e.to_string()},
            });
            let _ = write_outputs(&out_dir, &summary, None);
            code
        }
    }
}
