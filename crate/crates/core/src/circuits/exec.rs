//! Runs timed circuits on a density matrix under a noise model.
//!
//! Idle noise is accumulated lazily per site (amplitude damping is a semigroup and
//! commutes with dephasing) and applied only when an operation touches the site.
//! Gates act at the midpoint of their window; a readout POVM acts at the start of its
//! window. Operations on different sites commute, so executing one block after another
//! is equivalent to strict global time order.

use super::*;
use crate::code::LogicalPauli;
use crate::engine::mat::{gates, CMat, ONE};
use num_complex::Complex64 as C64;
use crate::engine::{DensityMatrix, QuditRegister};
use crate::error::{Error, Result};
use crate::noise::{damping_channel, leakage_exchange, NoiseModel, Window, SITE_NAMES};

const N: usize = 7;

#[derive(Clone, Debug)]
pub struct Executor<'m> {
    model: &'m NoiseModel,
    dims: Vec<usize>,
    pub state: DensityMatrix,
    clock: [f64; N],
    window_end: [f64; N],
    window_rate: [f64; N],
    pend_t1: [f64; N],
    pend_x: [f64; N],
    t1: [Option<f64>; N],
    idle_rate: [f64; N],
    /// Product of all post-selected outcome probabilities so far.
    pub prob: f64,
    /// (site, outcome-0 probability) of every post-selected readout, in order.
    pub records: Vec<(usize, f64)>,
}

/// Final data readout statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalReadout {
    /// Probability that every check is trivial (P_n^f).
    pub accept: f64,
    /// ⟨O_L⟩ over accepted outcomes.
    pub expectation: f64,
}

impl<'m> Executor<'m> {
    /// Ground state (with residual excitation under SPAM), dims from the model.
    pub fn new(model: &'m NoiseModel) -> Result<Self> {
        let dims = model.site_dims(&SITE_NAMES);
        Self::with_dims(model, dims)
    }

    pub fn with_dims(model: &'m NoiseModel, dims: Vec<usize>) -> Result<Self> {
        let reg = QuditRegister::new(dims.clone(), SITE_NAMES.iter().map(|s| s.to_string()).collect())?;
        let sites: Vec<CMat> =
            (0..N).map(|s| model.initial_site_state(SITE_NAMES[s], dims[s], 0)).collect();
        let state = DensityMatrix::product(reg, &sites)?;
        Ok(Self::from_state(model, state))
    }

    /// Ideal encoded a|0_L⟩ + b|1_L⟩ on the data, ancillas in |0⟩.
    pub fn encoded(model: &'m NoiseModel, dims: Vec<usize>, amps: (C64, C64)) -> Result<Self> {
        let reg = QuditRegister::new(dims.clone(), SITE_NAMES.iter().map(|s| s.to_string()).collect())?;
        let logical = crate::code::encode(amps.0, amps.1);
        let mut psi = vec![C64::new(0.0, 0.0); reg.total_dim()];
        for (q, &amp) in logical.iter().enumerate() {
            // data bit k of q is the level of D(k+1), D1 most significant
            let g: usize = (0..4).map(|k| ((q >> (3 - k)) & 1) * reg.stride(DATA[k])).sum();
            psi[g] = amp;
        }
        Ok(Self::from_state(model, DensityMatrix::from_pure(reg, &psi)?))
    }

    /// Start from an arbitrary 7-site state at t = 0.
    pub fn from_state(model: &'m NoiseModel, state: DensityMatrix) -> Self {
        let dims = state.register().dims().to_vec();
        let mut t1 = [None; N];
        let mut idle_rate = [0.0; N];
        for s in 0..N {
            t1[s] = model.t1(SITE_NAMES[s]);
            idle_rate[s] = model.dephasing_rate(SITE_NAMES[s], Window::Idle);
        }
        Executor {
            model,
            dims,
            state,
            clock: [0.0; N],
            window_end: [0.0; N],
            window_rate: [0.0; N],
            pend_t1: [0.0; N],
            pend_x: [0.0; N],
            t1,
            idle_rate,
            prob: 1.0,
            records: Vec::new(),
        }
    }

    pub fn model(&self) -> &NoiseModel {
        self.model
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Accrue noise on `s` up to time `t` (ns).
    fn accrue(&mut self, s: usize, t: f64) {
        while self.clock[s] < t {
            let (end, rate) = if self.clock[s] < self.window_end[s] {
                (self.window_end[s].min(t), self.window_rate[s])
            } else {
                (t, self.idle_rate[s])
            };
            let dt = (end - self.clock[s]) * 1e-9;
            if let Some(t1) = self.t1[s] {
                self.pend_t1[s] += dt / t1;
            }
            self.pend_x[s] += dt * rate;
            self.clock[s] = end;
        }
    }

    fn open_window(&mut self, s: usize, start: f64, end: f64, window: Window) {
        self.accrue(s, start);
        self.window_end[s] = end;
        self.window_rate[s] = self.model.dephasing_rate(SITE_NAMES[s], window);
    }

    fn flush(&mut self, s: usize) {
        if self.pend_t1[s] > 0.0 || self.pend_x[s] > 0.0 {
            let ch = damping_channel(self.dims[s], s, self.pend_t1[s], self.pend_x[s]);
            self.state.apply_channel(&ch);
            self.pend_t1[s] = 0.0;
            self.pend_x[s] = 0.0;
        }
    }

    /// Bring every listed site to time `t` and apply its pending noise.
    pub fn settle(&mut self, sites: &[usize], t: f64) {
        for &s in sites {
            self.accrue(s, t);
            self.flush(s);
        }
    }

    /// Latest time any of `sites` is busy until.
    pub fn busy_until(&self, sites: &[usize]) -> f64 {
        sites.iter().map(|&s| self.clock[s].max(self.window_end[s])).fold(0.0, f64::max)
    }

    fn rotation(&self, s: usize, theta: f64, phi: f64) -> CMat {
        gates::embed(&gates::rot(theta, phi), self.dims[s], ONE)
    }

    fn apply_unitary(&mut self, u: &CMat, sites: &[usize]) {
        self.state.apply_channel(&crate::engine::Channel::unitary(u, sites));
    }

    /// Execute one instruction.
    pub fn step(&mut self, ins: &TimedInstruction) -> Result<()> {
        let start = ins.start_ns as f64;
        let end = ins.end_ns() as f64;
        let mid = 0.5 * (start + end);
        match &ins.kind {
            Kind::Rot { theta, phi } => {
                let s = ins.sites[0];
                self.open_window(s, start, end, Window::Idle);
                self.settle(&[s], mid);
                let u = self.rotation(s, *theta, *phi);
                self.apply_unitary(&u, &[s]);
            }
            Kind::Cz { exposure_ns } => {
                let (a, b) = (ins.sites[0], ins.sites[1]);
                let fluxed = self.model.device.fluxed(SITE_NAMES[a], SITE_NAMES[b]);
                for s in [a, b] {
                    let w = Window::Cz { fluxed: SITE_NAMES[s] == fluxed };
                    self.open_window(s, start, end, w);
                }
                self.settle(&[a, b], mid);
                let u = self.model.cz_unitary(SITE_NAMES[a], SITE_NAMES[b], self.dims[a], self.dims[b], *exposure_ns);
                self.apply_unitary(&u, &[a, b]);
            }
            Kind::Park => {
                let s = ins.sites[0];
                self.open_window(s, start, end, Window::Park);
                self.accrue(s, end);
            }
            Kind::Measure { postselect } => {
                let s = ins.sites[0];
                self.settle(&[s], start);
                self.window_end[s] = end;
                self.window_rate[s] = self.idle_rate[s];
                if *postselect {
                    let povm = self.model.povm(SITE_NAMES[s]);
                    self.state.apply_povm_element(s, &povm, 0);
                    let p = self.state.normalize();
                    self.records.push((s, p));
                    self.prob *= p;
                    if !(p > 1e-300) {
                        return Err(Error::Underflow(self.records.len()));
                    }
                }
            }
            Kind::Idle => {
                for &s in &ins.sites {
                    self.accrue(s, end);
                }
            }
            Kind::Fault(op) => {
                self.settle(&ins.sites, start);
                match op {
                    FaultOp::Pauli(p) => {
                        let s = ins.sites[0];
                        let u = gates::embed(&p.matrix(), self.dims[s], ONE);
                        self.apply_unitary(&u, &[s]);
                    }
                    FaultOp::Leak => {
                        let (a, b) = (ins.sites[0], ins.sites[1]);
                        let (da, db) = (self.dims[a], self.dims[b]);
                        let leaker = self.model.device.leaker(SITE_NAMES[a], SITE_NAMES[b]);
                        let target = if SITE_NAMES[a] == leaker && da == 3 {
                            2 * db
                        } else if SITE_NAMES[b] == leaker && db == 3 {
                            2
                        } else {
                            return Err(Error::Param("leak fault needs a qutrit leaker".into()));
                        };
                        let u = leakage_exchange(&CMat::identity(da * db), db + 1, target, 0.25);
                        self.apply_unitary(&u, &[a, b]);
                    }
                }
            }
        }
        Ok(())
    }

    /// Execute a whole circuit in start-time order (faults and gates by action time).
    pub fn run(&mut self, c: &TimedCircuit) -> Result<()> {
        let mut v: Vec<&TimedInstruction> = c.instrs.iter().collect();
        v.sort_by(|x, y| action_time(x).total_cmp(&action_time(y)));
        for ins in v {
            self.step(ins)?;
        }
        Ok(())
    }

    /// Reduced data state (D1–D4) once all pending data noise up to the data's last
    /// instruction has been applied.
    pub fn data_state(&mut self) -> Result<DensityMatrix> {
        let t = self.busy_until(&DATA);
        self.settle(&DATA, t);
        self.state.partial_trace(&DATA)
    }

    /// Runs `block` (a placed logical-measurement block) on a copy and returns the
    /// post-selection probability and logical expectation of the final readout.
    pub fn logical_readout(&self, lm: &LogicalMeasurement, block: &TimedCircuit) -> Result<LogicalReadout> {
        let mut ex = self.clone();
        ex.run(block)?;
        let rho = ex.state.partial_trace(&DATA)?;
        let pops = rho.populations();
        let ddims: Vec<usize> = DATA.iter().map(|&d| self.dims[d]).collect();
        let povms: Vec<_> = DATA.iter().map(|&d| self.model.povm(SITE_NAMES[d])).collect();
        // outcome distribution over declared strings, one data qubit at a time
        let mut dist = vec![0.0f64; 81];
        for (g, &p) in pops.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let mut levels = [0usize; 4];
            let mut r = g;
            for k in (0..4).rev() {
                levels[k] = r % ddims[k];
                r /= ddims[k];
            }
            for (o, slot) in dist.iter_mut().enumerate() {
                let mut q = p;
                let mut r = o;
                for k in (0..4).rev() {
                    q *= povms[k].p[r % 3][levels[k]];
                    r /= 3;
                }
                *slot += q;
            }
        }
        let mut accept = 0.0;
        let mut signed = 0.0;
        for (o, &q) in dist.iter().enumerate() {
            let outs = [o / 27, (o / 9) % 3, (o / 3) % 3, o % 3];
            let (ok, v) = lm.evaluate(&outs);
            if ok {
                accept += q;
                signed += q * v as f64;
            }
        }
        let expectation = if accept > 0.0 { signed / accept } else { 0.0 };
        Ok(LogicalReadout { accept, expectation })
    }

    /// Appends the standard logical readout after the data's last instruction.
    pub fn readout(&self, basis: LogicalPauli) -> Result<LogicalReadout> {
        let lm = LogicalMeasurement::new(basis);
        let start = self.busy_until(&DATA).ceil() as i64;
        self.logical_readout(&lm, &lm.block().shifted(start))
    }
}

fn action_time(i: &TimedInstruction) -> f64 {
    match i.kind {
        Kind::Rot { .. } | Kind::Cz { .. } => 0.5 * (i.start_ns + i.end_ns()) as f64,
        _ => i.start_ns as f64,
    }
}
