//! Experiment driver: places blocks ASAP on a running schedule and records post-selection
//! statistics and logical observables cycle by cycle.

use super::exec::LogicalReadout;
use super::*;
use crate::code::LogicalPauli;
use crate::engine::DensityMatrix;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// An executor plus the schedule built so far.
#[derive(Clone, Debug)]
pub struct Runner<'m> {
    pub ex: Executor<'m>,
    schedule: TimedCircuit,
    cycle: TimedCircuit,
    pub cycles_done: usize,
}

impl<'m> Runner<'m> {
    pub fn new(model: &'m NoiseModel, opts: CycleOptions) -> Result<Self> {
        Ok(Self::from_executor(Executor::new(model)?, opts))
    }

    pub fn from_executor(ex: Executor<'m>, opts: CycleOptions) -> Self {
        Runner { ex, schedule: TimedCircuit::new(), cycle: build_cycle(opts), cycles_done: 0 }
    }

    /// Everything placed so far, in absolute time.
    pub fn schedule(&self) -> &TimedCircuit {
        &self.schedule
    }

    /// Places `block` as early as the schedule allows, runs it, returns the offset used.
    pub fn place(&mut self, block: &TimedCircuit) -> Result<i64> {
        let off = self.schedule.asap_offset(block);
        let placed = block.shifted(off);
        self.ex.run(&placed)?;
        self.schedule.instrs.extend(placed.instrs);
        Ok(off)
    }

    pub fn prep(&mut self, p: &Prep) -> Result<()> {
        self.place(&p.circuit()).map(|_| ())
    }

    /// One stabilizer cycle; returns its no-error branch probability.
    pub fn cycle(&mut self) -> Result<f64> {
        let before = self.ex.prob;
        let cycle = self.cycle.clone();
        self.place(&cycle)?;
        self.cycles_done += 1;
        Ok(self.ex.prob / before)
    }

    /// A logical gate; returns its ancilla post-selection probability (1 if none).
    pub fn gate(&mut self, g: &LogicalGate) -> Result<f64> {
        let before = self.ex.prob;
        self.place(&g.circuit())?;
        Ok(self.ex.prob / before)
    }

    /// Final destructive readout in `basis` on a copy of the current state.
    pub fn readout(&self, basis: LogicalPauli) -> Result<LogicalReadout> {
        self.ex.readout(basis)
    }

    /// Conditioned data state, with pending data noise applied up to the data's last use.
    pub fn data_state(&self) -> Result<DensityMatrix> {
        self.ex.clone().data_state()
    }

    /// Time at which the data become free (ns).
    pub fn data_time(&self) -> f64 {
        self.ex.busy_until(&DATA)
    }
}

/// Final readout of one basis after cycle n.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BasisRecord {
    pub basis: char,
    /// P_n^f, the final trivial-syndrome probability.
    pub final_probability: f64,
    /// P(n): cumulative cycle survival times P_n^f.
    pub post_selected: f64,
    pub expectation: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CycleRecord {
    pub n: usize,
    /// End of the final data readout, ns from the start of the preparation.
    pub time_ns: f64,
    /// No-error branch probability of cycle n alone (1 for n = 0).
    pub branch_probability: f64,
    /// Product of all branch probabilities up to n.
    pub survival: f64,
    pub bases: Vec<BasisRecord>,
}

impl CycleRecord {
    pub fn basis(&self, b: LogicalPauli) -> Option<&BasisRecord> {
        self.bases.iter().find(|r| r.basis == basis_char(b))
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ExperimentRecord {
    pub config_hash: String,
    pub scheme: Scheme,
    pub cycle_ns: i64,
    pub cycles: Vec<CycleRecord>,
}

impl ExperimentRecord {
    /// P(n) for n = 1..=N in `basis`.
    pub fn post_selected(&self, basis: LogicalPauli) -> Vec<f64> {
        self.cycles
            .iter()
            .filter(|c| c.n > 0)
            .filter_map(|c| c.basis(basis).map(|r| r.post_selected))
            .collect()
    }

    pub fn expectations(&self, basis: LogicalPauli) -> Vec<f64> {
        self.cycles.iter().filter(|c| c.n > 0).filter_map(|c| c.basis(basis).map(|r| r.expectation)).collect()
    }
}

pub fn basis_char(b: LogicalPauli) -> char {
    match b {
        LogicalPauli::X => 'X',
        LogicalPauli::Y => 'Y',
        LogicalPauli::Z => 'Z',
    }
}

/// What to run: a preparation followed by `cycles` stabilizer cycles, with the listed
/// logical readouts evaluated after every cycle (and after the preparation if
/// `include_prep`).
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionSpec {
    pub prep: Prep,
    pub options: CycleOptions,
    pub cycles: usize,
    pub bases: Vec<LogicalPauli>,
    pub include_prep: bool,
}

impl DetectionSpec {
    pub fn new(prep: Prep, scheme: Scheme, cycles: usize) -> Self {
        DetectionSpec {
            prep,
            options: CycleOptions::new(scheme),
            cycles,
            bases: vec![LogicalPauli::Z],
            include_prep: false,
        }
    }
}

/// Branch-deterministic repeated error detection.
pub fn run_detection(spec: &DetectionSpec, model: &NoiseModel) -> Result<ExperimentRecord> {
    if spec.cycles == 0 {
        return Err(Error::Param("need at least one cycle".into()));
    }
    let mut r = Runner::new(model, spec.options)?;
    r.prep(&spec.prep)?;
    let mut cycles = Vec::with_capacity(spec.cycles + 1);
    if spec.include_prep {
        cycles.push(snapshot(&r, spec, 0, 1.0)?);
    }
    for n in 1..=spec.cycles {
        let b = r.cycle()?;
        cycles.push(snapshot(&r, spec, n, b)?);
    }
    Ok(ExperimentRecord {
        config_hash: String::new(),
        scheme: spec.options.scheme,
        cycle_ns: build_cycle(spec.options).period_ns,
        cycles,
    })
}

fn snapshot(r: &Runner, spec: &DetectionSpec, n: usize, branch: f64) -> Result<CycleRecord> {
    let mut bases = Vec::with_capacity(spec.bases.len());
    let mut time_ns = r.data_time();
    for &b in &spec.bases {
        let ro = r.readout(b)?;
        bases.push(BasisRecord {
            basis: basis_char(b),
            final_probability: ro.accept,
            post_selected: r.ex.prob * ro.accept,
            expectation: ro.expectation,
        });
        let block = LogicalMeasurement::new(b).block();
        time_ns = time_ns.max(r.data_time() + block.end_ns() as f64);
    }
    Ok(CycleRecord { n, time_ns, branch_probability: branch, survival: r.ex.prob, bases })
}

/// Synthetic shot record: survivors after each stage when `shots` runs pass stage k
/// with conditional probability `stages[k]`.
pub fn sample_survivors<R: Rng + ?Sized>(stages: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    let mut left = shots;
    let mut out = Vec::with_capacity(stages.len());
    for &p in stages {
        let d = Binomial::new(left, p.clamp(0.0, 1.0)).map_err(|e| Error::Param(e.to_string()))?;
        left = d.sample(rng);
        out.push(left);
    }
    Ok(out)
}

/// Sampled P(n) for one basis: cycle survivals thinned stage by stage, then the final
/// readout acceptance.
pub fn sample_post_selected<R: Rng + ?Sized>(
    rec: &ExperimentRecord,
    basis: LogicalPauli,
    shots: u64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let cyc: Vec<&CycleRecord> = rec.cycles.iter().filter(|c| c.n > 0).collect();
    let stages: Vec<f64> = cyc.iter().map(|c| c.branch_probability).collect();
    let surv = sample_survivors(&stages, shots, rng)?;
    cyc.iter()
        .zip(surv)
        .map(|(c, s)| {
            let f = c.basis(basis).ok_or_else(|| Error::Param("basis not recorded".into()))?.final_probability;
            let kept = Binomial::new(s, f.clamp(0.0, 1.0)).map_err(|e| Error::Param(e.to_string()))?.sample(rng);
            Ok(kept as f64 / shots as f64)
        })
        .collect()
}
