//! JSON run configuration. Every field has a default; flags override file values.

use crate::circuits::{Check, LogicalGate, Scheme};
use crate::code::LogicalPauli;
use crate::error::{Error, Result};
use crate::noise::SITE_NAMES;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const EXPERIMENTS: [&str; 10] = [
    "init-suite",
    "measure-sweep",
    "gate-tomo",
    "stabilize",
    "compare-schemes",
    "ablation",
    "fit",
    "calibrate-zz",
    "leakage-estimate",
    "summary",
];

pub const STATES: [&str; 6] = ["0", "1", "+", "-", "+i", "-i"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    Pipelined,
    Parallel,
    /// Both schemes; only `stabilize` accepts it.
    Both,
}

impl SchemeChoice {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeChoice::Pipelined => vec![Scheme::Pipelined],
            SchemeChoice::Parallel => vec![Scheme::Parallel],
            SchemeChoice::Both => Scheme::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AxisChoice {
    Theta,
    Phi,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    /// `builtin:table-s1`, `builtin:example` or a device JSON path.
    pub device: String,
    pub noise: u8,
    pub l1: f64,
    /// L1 values for the Model 5 part of `ablation`.
    pub l1_grid: Vec<f64>,
    pub scheme: SchemeChoice,
    pub cycles: usize,
    /// Points per sweep.
    pub points: usize,
    pub axis: AxisChoice,
    pub gates: Vec<String>,
    /// Input state for `stabilize`.
    pub state: String,
    /// Readout basis for `stabilize`.
    pub basis: String,
    /// Check for `calibrate-zz`, or `all`.
    pub check: String,
    /// Transmon whose leakage `leakage-estimate` models.
    pub transmon: String,
    /// Data file for `fit`, `calibrate-zz` and `leakage-estimate`.
    pub input: Option<PathBuf>,
    /// Per-state calibration voltages (`state,voltage`) for `leakage-estimate`.
    pub calibration: Option<PathBuf>,
    pub mode: Mode,
    pub shots: u64,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: String::new(),
            device: "builtin:table-s1".into(),
            noise: 4,
            l1: 0.05,
            l1_grid: vec![0.01, 0.02, 0.05, 0.08],
            scheme: SchemeChoice::Pipelined,
            cycles: 10,
            points: 16,
            axis: AxisChoice::Both,
            gates: ["ZL", "XL", "XL90", "TL"].map(String::from).to_vec(),
            state: "0".into(),
            basis: "Z".into(),
            check: "all".into(),
            transmon: "D1".into(),
            input: None,
            calibration: None,
            mode: Mode::Exact,
            shots: 10_000,
            seed: None,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Param(format!("cannot read config {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// The single scheme, unless the experiment accepts both.
    pub fn single_scheme(&self) -> Result<Scheme> {
        match self.scheme {
            SchemeChoice::Pipelined => Ok(Scheme::Pipelined),
            SchemeChoice::Parallel => Ok(Scheme::Parallel),
            SchemeChoice::Both => Err(Error::Param(format!("{} needs a single scheme", self.experiment))),
        }
    }

    pub fn parsed_gates(&self) -> Result<Vec<LogicalGate>> {
        self.gates.iter().map(|g| LogicalGate::parse(g)).collect()
    }

    pub fn parsed_basis(&self) -> Result<LogicalPauli> {
        match self.basis.to_ascii_uppercase().as_str() {
            "X" => Ok(LogicalPauli::X),
            "Y" => Ok(LogicalPauli::Y),
            "Z" => Ok(LogicalPauli::Z),
            b => Err(Error::Param(format!("unknown basis {b:?} (X, Y, Z)"))),
        }
    }

    pub fn parsed_checks(&self) -> Result<Vec<Check>> {
        if self.check == "all" {
            Ok(Check::ALL.to_vec())
        } else {
            Ok(vec![Check::parse(&self.check)?])
        }
    }

    /// Hash of everything that affects results (the output directory does not).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        crate::experiments::config_hash(&c)
    }

    /// Enumerations, ranges and file references.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Param(m));
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return bad(format!("unknown experiment {:?}", self.experiment));
        }
        if self.noise > 5 {
            return bad(format!("noise level {} (0 to 5)", self.noise));
        }
        if !(0.0..0.25).contains(&self.l1) || self.l1_grid.iter().any(|x| !(0.0..0.25).contains(x)) {
            return bad("L1 must lie in [0, 0.25)".into());
        }
        if self.cycles == 0 {
            return bad("cycles must be at least 1".into());
        }
        if self.points < 2 {
            return bad("a sweep needs at least 2 points".into());
        }
        if self.shots == 0 {
            return bad("shots must be positive".into());
        }
        if self.mode == Mode::Sampled && self.seed.is_none() {
            return bad("sampled mode needs --seed".into());
        }
        if self.scheme == SchemeChoice::Both && self.experiment != "stabilize" {
            return bad(format!("scheme `both` is only accepted by stabilize, not {}", self.experiment));
        }
        if !STATES.contains(&self.state.as_str()) {
            return bad(format!("unknown state {:?} (0, 1, +, -, +i, -i)", self.state));
        }
        if !SITE_NAMES.contains(&self.transmon.as_str()) {
            return bad(format!("unknown transmon {:?}", self.transmon));
        }
        self.parsed_basis()?;
        self.parsed_gates()?;
        self.parsed_checks()?;
        if !self.device.starts_with("builtin:") && !Path::new(&self.device).is_file() {
            return bad(format!("device file {} not found", self.device));
        }
        for p in [&self.input, &self.calibration].into_iter().flatten() {
            if !p.is_file() {
                return bad(format!("input file {} not found", p.display()));
            }
        }
        if self.experiment == "fit" && self.input.is_none() {
            return bad("fit needs --input".into());
        }
        if self.experiment == "calibrate-zz" && self.input.is_some() && self.check == "all" {
            return bad("measured Ramsey phases need a single --check".into());
        }
        if self.experiment == "leakage-estimate" && self.input.is_none() && self.seed.is_none() {
            return bad("synthetic leakage data needs --seed".into());
        }
        Ok(())
    }
}
