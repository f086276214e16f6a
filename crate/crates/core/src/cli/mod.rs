//! Command-line front end: config merging, experiment dispatch, CSV/SVG/manifest output.
//!
//! Each subcommand computes every output in memory ([`execute`]), then the files are
//! written one after another and `manifest.json` last.

mod config;
mod experiments;
pub mod svg;

pub use config::{AxisChoice, Mode, RunConfig, SchemeChoice, EXPERIMENTS, STATES};
pub use experiments::{execute, Outcome};

use crate::error::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

pub const VERSION: &str = env!("SURFACE7_VERSION");
pub const MANIFEST_SCHEMA: &str = "surface7-run-manifest/1";

#[derive(Parser, Debug)]
#[command(name = "surface7", version = VERSION, about = "Surface-7 error-detection lab: noisy simulation, tomography and calibration fits")]
#[command(disable_help_subcommand = true)]
pub struct Cli {
    /// Worker threads for the experiment pool (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON run configuration; flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, short, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Device table: builtin:table-s1, builtin:example or a JSON file
    #[arg(long, value_name = "SPEC")]
    pub device: Option<String>,
    /// Noise model level, 0 (noiseless) to 5 (with leakage)
    #[arg(long, value_name = "LEVEL")]
    pub noise: Option<u8>,
    /// Leakage probability per CZ, used at level 5
    #[arg(long, value_name = "P")]
    pub l1: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SampleArgs {
    /// Exact probabilities or finite-shot sampling
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Shots per setting in sampled mode
    #[arg(long, value_name = "N")]
    pub shots: Option<u64>,
    /// RNG seed (required in sampled mode)
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cardinal-state initialization: four-qubit and logical fidelities
    InitSuite {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Stabilizer scheme
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
    },
    /// Logical measurement sweeps over the preparation angles (fig2c, fig2e)
    MeasureSweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Stabilizer scheme
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Swept angle: phi (equatorial), theta (polar) or both
        #[arg(long, value_enum)]
        axis: Option<AxisChoice>,
        /// Grid points per sweep
        #[arg(long, value_name = "N")]
        points: Option<usize>,
    },
    /// Logical process tomography of one or more gates
    GateTomo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Stabilizer scheme
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Gates: ZL, XL, TL, XL90, Z:<rad> or X:<rad>, comma separated
        #[arg(long, value_name = "GATE", value_delimiter = ',')]
        gate: Vec<String>,
    },
    /// Repeated stabilization: P(n) and the logical observable (fig4c, fig4d)
    Stabilize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Stabilizer scheme
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Number of stabilizer cycles
        #[arg(long, value_name = "N")]
        cycles: Option<usize>,
        /// Input state: 0, 1, +, -, +i or -i
        #[arg(long, value_name = "STATE", allow_hyphen_values = true)]
        state: Option<String>,
        /// Logical readout basis: X, Y or Z
        #[arg(long, value_name = "B")]
        basis: Option<String>,
    },
    /// Detection rate of the pipelined and parallel schemes (figS3)
    CompareSchemes {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Number of stabilizer cycles (at least 5)
        #[arg(long, value_name = "N")]
        cycles: Option<usize>,
    },
    /// Detection rate across noise models 0-4 and leakage levels (figS5a, figS5b)
    Ablation {
        #[command(flatten)]
        common: Common,
        /// Device table: builtin:table-s1, builtin:example or a JSON file
        #[arg(long, value_name = "SPEC")]
        device: Option<String>,
        /// Stabilizer scheme
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Leakage grid for Model 5, comma separated
        #[arg(long, value_name = "P", value_delimiter = ',')]
        l1: Vec<f64>,
        /// Number of stabilizer cycles
        #[arg(long, value_name = "N")]
        cycles: Option<usize>,
    },
    /// Fit P(n) = A(1-gamma)^n to a cycle,post_selected_fraction,shots file
    Fit {
        #[command(flatten)]
        common: Common,
        /// Input CSV
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// Conditional-phase calibration from Ramsey phases
    CalibrateZz {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Check: Z13, X1234, Z24 or all
        #[arg(long, value_name = "CHECK")]
        check: Option<String>,
        /// Measured row_index,phase_rad file (instead of simulating)
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// Leaked population per cycle from readout voltages, with an L1 estimate
    LeakageEstimate {
        #[command(flatten)]
        common: Common,
        /// Device table: builtin:table-s1, builtin:example or a JSON file
        #[arg(long, value_name = "SPEC")]
        device: Option<String>,
        /// Stabilizer scheme (sets the cycle time)
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Transmon whose leakage is modelled
        #[arg(long, value_name = "NAME")]
        transmon: Option<String>,
        /// cycle,voltage file, one row per shot (synthetic data when absent)
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// state,voltage file with calibration shots for states 0, 1 and 2
        #[arg(long, value_name = "FILE")]
        calibration: Option<PathBuf>,
        /// Leakage per CZ for synthetic data
        #[arg(long, value_name = "P")]
        l1: Option<f64>,
        /// Cycles of synthetic data
        #[arg(long, value_name = "N")]
        cycles: Option<usize>,
        /// Shots per synthetic cycle
        #[arg(long, value_name = "N")]
        shots: Option<u64>,
        /// RNG seed for synthetic data
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
    },
    /// Initialization, measurement and gate figures of merit in one table (summary.csv)
    Summary {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Stabilizer scheme
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Grid points per sweep
        #[arg(long, value_name = "N")]
        points: Option<usize>,
    },
}

fn set<T>(dst: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *dst = v;
    }
}

fn apply_model(c: &mut RunConfig, m: ModelArgs) {
    set(&mut c.device, m.device);
    set(&mut c.noise, m.noise);
    set(&mut c.l1, m.l1);
}

fn apply_sample(c: &mut RunConfig, s: SampleArgs) {
    set(&mut c.mode, s.mode);
    set(&mut c.shots, s.shots);
    if s.seed.is_some() {
        c.seed = s.seed;
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::InitSuite { .. } => "init-suite",
            Command::MeasureSweep { .. } => "measure-sweep",
            Command::GateTomo { .. } => "gate-tomo",
            Command::Stabilize { .. } => "stabilize",
            Command::CompareSchemes { .. } => "compare-schemes",
            Command::Ablation { .. } => "ablation",
            Command::Fit { .. } => "fit",
            Command::CalibrateZz { .. } => "calibrate-zz",
            Command::LeakageEstimate { .. } => "leakage-estimate",
            Command::Summary { .. } => "summary",
        }
    }

    /// Config file (if any) overlaid with the flags, validated.
    pub fn resolve(self) -> Result<RunConfig> {
        let name = self.name();
        let common = match &self {
            Command::InitSuite { common, .. }
            | Command::MeasureSweep { common, .. }
            | Command::GateTomo { common, .. }
            | Command::Stabilize { common, .. }
            | Command::CompareSchemes { common, .. }
            | Command::Ablation { common, .. }
            | Command::Fit { common, .. }
            | Command::CalibrateZz { common, .. }
            | Command::LeakageEstimate { common, .. }
            | Command::Summary { common, .. } => common.clone(),
        };
        let mut c = match &common.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if !c.experiment.is_empty() && c.experiment != name {
            return Err(Error::Param(format!("config is for {:?}, not {name}", c.experiment)));
        }
        c.experiment = name.into();
        set(&mut c.out, common.out);
        match self {
            Command::InitSuite { model, sample, scheme, .. } => {
                apply_model(&mut c, model);
                apply_sample(&mut c, sample);
                set(&mut c.scheme, scheme);
            }
            Command::MeasureSweep { model, scheme, axis, points, .. } => {
                apply_model(&mut c, model);
                set(&mut c.scheme, scheme);
                set(&mut c.axis, axis);
                set(&mut c.points, points);
            }
            Command::GateTomo { model, sample, scheme, gate, .. } => {
                apply_model(&mut c, model);
                apply_sample(&mut c, sample);
                set(&mut c.scheme, scheme);
                if !gate.is_empty() {
                    c.gates = gate;
                }
            }
            Command::Stabilize { model, sample, scheme, cycles, state, basis, .. } => {
                apply_model(&mut c, model);
                apply_sample(&mut c, sample);
                set(&mut c.scheme, scheme);
                set(&mut c.cycles, cycles);
                set(&mut c.state, state);
                set(&mut c.basis, basis);
            }
            Command::CompareSchemes { model, cycles, .. } => {
                apply_model(&mut c, model);
                set(&mut c.cycles, cycles);
            }
            Command::Ablation { device, scheme, l1, cycles, .. } => {
                set(&mut c.device, device);
                set(&mut c.scheme, scheme);
                set(&mut c.cycles, cycles);
                if !l1.is_empty() {
                    c.l1_grid = l1;
                }
            }
            Command::Fit { input, .. } => {
                if input.is_some() {
                    c.input = input;
                }
            }
            Command::CalibrateZz { model, check, input, .. } => {
                apply_model(&mut c, model);
                set(&mut c.check, check);
                if input.is_some() {
                    c.input = input;
                }
            }
            Command::LeakageEstimate { device, scheme, transmon, input, calibration, l1, cycles, shots, seed, .. } => {
                set(&mut c.device, device);
                set(&mut c.scheme, scheme);
                set(&mut c.transmon, transmon);
                set(&mut c.l1, l1);
                set(&mut c.cycles, cycles);
                set(&mut c.shots, shots);
                if input.is_some() {
                    c.input = input;
                }
                if calibration.is_some() {
                    c.calibration = calibration;
                }
                if seed.is_some() {
                    c.seed = seed;
                }
            }
            Command::Summary { model, sample, scheme, points, .. } => {
                apply_model(&mut c, model);
                apply_sample(&mut c, sample);
                set(&mut c.scheme, scheme);
                set(&mut c.points, points);
            }
        }
        c.validate()?;
        Ok(c)
    }
}

/// Contents of `manifest.json`.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub schema: &'static str,
    pub command: &'a str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub results: &'a serde_json::Value,
}

/// Runs a resolved configuration and writes its outputs. Returns the stdout report.
pub fn run_config(cfg: &RunConfig) -> Result<Vec<String>> {
    let t0 = Instant::now();
    let outcome = execute(cfg)?;
    std::fs::create_dir_all(&cfg.out)?;
    let mut names = Vec::with_capacity(outcome.files.len());
    for (name, bytes) in &outcome.files {
        std::fs::write(cfg.out.join(name), bytes)?;
        names.push(name.clone());
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA,
        command: &cfg.experiment,
        version: VERSION,
        config: cfg,
        config_hash: cfg.hash(),
        seed: cfg.seed,
        wall_time_s: t0.elapsed().as_secs_f64(),
        outputs: names,
        results: &outcome.results,
    };
    std::fs::write(cfg.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(outcome.report)
}

/// Parses `args` (program name first), runs, and maps the result to an exit code:
/// 0 success, 1 configuration error, 2 numerical failure.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("config error: cannot start {n} worker threads");
            return 1;
        }
    }
    let result = cli.command.resolve().and_then(|cfg| run_config(&cfg));
    match result {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) if e.is_config() => {
            eprintln!("config error: {e}");
            1
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            2
        }
    }
}
