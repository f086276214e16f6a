//! Timed circuits on the seven-transmon layout and their ASAP composition.

pub mod build;
pub mod exec;
pub mod faults;
pub mod run;

use crate::error::{Error, Result};
use crate::noise::SITE_NAMES;
use std::fmt::Write as _;
use std::str::FromStr;

pub use build::*;
pub use exec::Executor;
pub use run::*;

pub const D1: usize = 0;
pub const D2: usize = 1;
pub const D3: usize = 2;
pub const D4: usize = 3;
pub const A1: usize = 4;
pub const A2: usize = 5;
pub const A3: usize = 6;
pub const DATA: [usize; 4] = [D1, D2, D3, D4];
pub const ANCILLAS: [usize; 3] = [A1, A2, A3];

pub const T_1Q: i64 = 20;
pub const T_CZ: i64 = 60;
pub const T_RO: i64 = 540;

pub fn site_name(s: usize) -> &'static str {
    SITE_NAMES[s]
}

pub fn site_index(name: &str) -> Option<usize> {
    SITE_NAMES.iter().position(|n| *n == name)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    /// R_φ^θ = exp(−iθ/2 (cos φ X + sin φ Y)); identity on |2⟩.
    Rot { theta: f64, phi: f64 },
    /// Ideal or dressed CZ; `exposure_ns` is how long the pair stays coherent around the
    /// gate inside its block (drives the ZZ phase error).
    Cz { exposure_ns: f64 },
    /// Detuned spectator during a neighbouring CZ.
    Park,
    /// Readout; with `postselect` the run continues only on outcome 0 (m = +1).
    Measure { postselect: bool },
    Idle,
    /// Injected ideal fault (zero duration), for fault enumeration.
    Fault(FaultOp),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FaultOp {
    Pauli(crate::engine::Pauli),
    /// Full |11⟩ → leaked transfer on a CZ pair (sites in CZ order).
    Leak,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Rot { .. } => "rot",
            Kind::Cz { .. } => "cz",
            Kind::Park => "park",
            Kind::Measure { .. } => "measure",
            Kind::Idle => "idle",
            Kind::Fault(_) => "fault",
        }
    }

    fn nominal_duration(&self) -> Option<i64> {
        match self {
            Kind::Rot { .. } => Some(T_1Q),
            Kind::Cz { .. } | Kind::Park => Some(T_CZ),
            Kind::Measure { .. } => Some(T_RO),
            Kind::Idle => None,
            Kind::Fault(_) => Some(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimedInstruction {
    pub kind: Kind,
    pub sites: Vec<usize>,
    pub start_ns: i64,
    pub duration_ns: i64,
}

impl TimedInstruction {
    pub fn new(kind: Kind, sites: &[usize], start_ns: i64) -> Self {
        let duration_ns = kind.nominal_duration().unwrap_or(0);
        TimedInstruction { kind, sites: sites.to_vec(), start_ns, duration_ns }
    }

    pub fn end_ns(&self) -> i64 {
        self.start_ns + self.duration_ns
    }

    /// One line of the dump format: `t_start_ns duration_ns kind sites [params]`.
    pub fn dump_line(&self) -> String {
        let sites: Vec<&str> = self.sites.iter().map(|&s| site_name(s)).collect();
        let mut line = format!("{} {} {} {}", self.start_ns, self.duration_ns, self.kind.name(), sites.join(","));
        match &self.kind {
            Kind::Rot { theta, phi } => {
                let _ = write!(line, " theta={theta:.6} phi={phi:.6}");
            }
            Kind::Cz { exposure_ns } => {
                let _ = write!(line, " exposure={exposure_ns:.0}");
            }
            Kind::Measure { postselect } => {
                let _ = write!(line, " postselect={}", u8::from(*postselect));
            }
            Kind::Fault(FaultOp::Pauli(p)) => {
                let _ = write!(line, " pauli={}", p.label());
            }
            Kind::Fault(FaultOp::Leak) => line.push_str(" leak"),
            _ => {}
        }
        line
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Pipelined,
    Parallel,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Pipelined, Scheme::Parallel];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pipelined => "pipelined",
            Scheme::Parallel => "parallel",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pipelined" => Ok(Scheme::Pipelined),
            "parallel" => Ok(Scheme::Parallel),
            _ => Err(Error::Param(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimedCircuit {
    pub instrs: Vec<TimedInstruction>,
    /// Repetition period for cycle templates; 0 otherwise.
    pub period_ns: i64,
}

impl TimedCircuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: Kind, sites: &[usize], start_ns: i64) {
        self.instrs.push(TimedInstruction::new(kind, sites, start_ns));
    }

    /// End of the last instruction.
    pub fn end_ns(&self) -> i64 {
        self.instrs.iter().map(|i| i.end_ns()).max().unwrap_or(0)
    }

    /// Repetition period for cycles, otherwise the span.
    pub fn duration_ns(&self) -> i64 {
        if self.period_ns > 0 {
            self.period_ns
        } else {
            self.end_ns() - self.instrs.iter().map(|i| i.start_ns).min().unwrap_or(0)
        }
    }

    pub fn free_at(&self, site: usize) -> i64 {
        self.instrs.iter().filter(|i| i.sites.contains(&site)).map(|i| i.end_ns()).max().unwrap_or(0)
    }

    fn first_use(&self, site: usize) -> Option<i64> {
        self.instrs.iter().filter(|i| i.sites.contains(&site)).map(|i| i.start_ns).min()
    }

    pub fn sites_used(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.instrs.iter().flat_map(|i| i.sites.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Offset that places `block` as early as possible after everything already here.
    pub fn asap_offset(&self, block: &TimedCircuit) -> i64 {
        block
            .sites_used()
            .iter()
            .filter_map(|&s| block.first_use(s).map(|f| self.free_at(s) - f))
            .max()
            .unwrap_or(0)
            .max(0)
    }

    /// Appends `block` ASAP; returns the offset used.
    pub fn append_asap(&mut self, block: &TimedCircuit) -> i64 {
        let off = self.asap_offset(block);
        self.instrs.extend(block.shifted(off).instrs);
        off
    }

    pub fn shifted(&self, dt: i64) -> TimedCircuit {
        let mut c = self.clone();
        c.instrs.iter_mut().for_each(|i| i.start_ns += dt);
        c
    }

    /// Instructions sorted by start time (stable).
    pub fn sorted(&self) -> Vec<&TimedInstruction> {
        let mut v: Vec<&TimedInstruction> = self.instrs.iter().collect();
        v.sort_by_key(|i| i.start_ns);
        v
    }

    /// Durations match their kind and no site runs two instructions at once.
    pub fn validate(&self) -> Result<()> {
        for i in &self.instrs {
            if let Some(d) = i.kind.nominal_duration() {
                if d != i.duration_ns {
                    return Err(Error::Param(format!("{} lasts {} ns, expected {d}", i.kind.name(), i.duration_ns)));
                }
            }
            let want = match i.kind {
                Kind::Cz { .. } | Kind::Fault(FaultOp::Leak) => 2,
                _ => 1,
            };
            if i.sites.len() != want || i.sites.iter().any(|&s| s >= SITE_NAMES.len()) {
                return Err(Error::Param(format!("bad site list for {}", i.dump_line())));
            }
        }
        for s in 0..SITE_NAMES.len() {
            let mut iv: Vec<(i64, i64)> =
                self.instrs.iter().filter(|i| i.sites.contains(&s)).map(|i| (i.start_ns, i.end_ns())).collect();
            iv.sort_unstable();
            for w in iv.windows(2) {
                if w[1].0 < w[0].1 {
                    return Err(Error::Param(format!("overlapping instructions on {}", site_name(s))));
                }
            }
        }
        Ok(())
    }

    /// Line-oriented dump, sorted by start time then first site.
    pub fn dump(&self) -> String {
        let mut v: Vec<&TimedInstruction> = self.instrs.iter().collect();
        v.sort_by_key(|i| (i.start_ns, i.sites[0]));
        v.iter().map(|i| i.dump_line() + "\n").collect()
    }
}
