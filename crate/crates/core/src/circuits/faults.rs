//! Exhaustive single-fault enumeration over one stabilizer cycle.
//!
//! Each fault is an ideal Pauli (after every gate, and right after every readout) or a
//! full |11⟩ → leaked transfer after every CZ. The faulted cycle is followed by a clean
//! one on a noiseless model. A Pauli fault passes when the all-trivial syndrome branch
//! either vanishes or carries exactly the ideal logical state. A leaked data transmon
//! freezes rather than flips its parity checks, so it is caught only with some
//! probability per check; a leak fault passes when the leaked population reaches a
//! non-trivial syndrome with nonzero probability and the unleaked undetected part is
//! still the ideal state.

use super::*;
use crate::code::{cardinal, logical_fidelity, project_to_codespace};
use crate::engine::Pauli;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

const P_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FaultResult {
    /// Dump line of the injected fault.
    pub fault: String,
    pub input: &'static str,
    /// Probability that both cycles report a trivial syndrome.
    pub p_undetected: f64,
    /// Logical fidelity of the undetected branch to the input (1 when it vanishes).
    pub fidelity: f64,
    pub codespace_weight: f64,
    /// Population outside {0,1} in the undetected branch.
    pub leaked: f64,
    /// Leaked population created by the fault (no post-selection).
    pub leak_injected: f64,
    /// P(non-trivial syndrome | leaked).
    pub leak_detection: f64,
    pub passed: bool,
}

/// Every fault location of `cycle` (a cycle template starting at 0).
pub fn fault_locations(cycle: &TimedCircuit) -> Vec<TimedInstruction> {
    let mut out = Vec::new();
    for ins in cycle.sorted() {
        let t = match ins.kind {
            Kind::Rot { .. } | Kind::Cz { .. } | Kind::Park => ins.end_ns() - 1,
            Kind::Measure { .. } => ins.start_ns + 1,
            Kind::Idle | Kind::Fault(_) => continue,
        };
        for &s in &ins.sites {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                out.push(TimedInstruction::new(Kind::Fault(FaultOp::Pauli(p)), &[s], t));
            }
        }
        if matches!(ins.kind, Kind::Cz { .. }) {
            out.push(TimedInstruction::new(Kind::Fault(FaultOp::Leak), &ins.sites, t));
        }
    }
    out
}

/// Runs every single fault in one `scheme` cycle on |0_L⟩ and |+_L⟩.
pub fn enumerate_faults(scheme: Scheme) -> Result<Vec<FaultResult>> {
    let model = NoiseModel::noiseless();
    let cycle = build_cycle(CycleOptions::new(scheme));
    let leak_dims = NoiseModel::new(5, model.device.clone(), 0.0)?.site_dims(&crate::noise::SITE_NAMES);
    let inputs = [("0", cardinal::zero()), ("+", cardinal::plus())];
    let jobs: Vec<(TimedInstruction, &'static str, (C64, C64))> = fault_locations(&cycle)
        .into_iter()
        .flat_map(|f| inputs.iter().map(move |(n, a)| (f.clone(), *n, *a)))
        .collect();
    jobs.par_iter()
        .map(|(f, name, amps)| {
            let dims = if f.kind == Kind::Fault(FaultOp::Leak) { leak_dims.clone() } else { vec![2; 7] };
            run_one(&model, &cycle, f, name, *amps, dims)
        })
        .collect()
}

fn run_one(
    model: &NoiseModel,
    cycle: &TimedCircuit,
    fault: &TimedInstruction,
    input: &'static str,
    amps: (C64, C64),
    dims: Vec<usize>,
) -> Result<FaultResult> {
    let mut faulted = cycle.clone();
    faulted.instrs.push(fault.clone());
    let mut ex = Executor::encoded(model, dims, amps)?;
    let outcome = ex.run(&faulted).and_then(|_| ex.run(&cycle.shifted(cycle.period_ns)));
    let mut res = FaultResult {
        fault: fault.dump_line(),
        input,
        p_undetected: 0.0,
        fidelity: 1.0,
        codespace_weight: 1.0,
        leaked: 0.0,
        leak_injected: 0.0,
        leak_detection: 1.0,
        passed: true,
    };
    if fault.kind == Kind::Fault(FaultOp::Leak) {
        let mut open = faulted.clone();
        for i in &mut open.instrs {
            if let Kind::Measure { postselect } = &mut i.kind {
                *postselect = false;
            }
        }
        let mut free = Executor::encoded(model, ex.dims().to_vec(), amps)?;
        free.run(&open)?;
        res.leak_injected = 1.0 - free.state.qubit_restriction()?.1;
    }
    match outcome {
        Err(Error::Underflow(_)) => return Ok(res),
        Err(e) => return Err(e),
        Ok(()) => {}
    }
    res.p_undetected = ex.prob;
    if ex.prob < P_TOL {
        return Ok(res);
    }
    let (q, w) = ex.data_state()?.qubit_restriction()?;
    res.leaked = 1.0 - w;
    match project_to_codespace(&q.to_cmat()) {
        Ok((l, cw)) => {
            res.fidelity = logical_fidelity(&l, amps);
            res.codespace_weight = cw;
        }
        Err(Error::NegligibleCodespace(cw)) => {
            res.fidelity = 0.0;
            res.codespace_weight = cw;
        }
        Err(e) => return Err(e),
    }
    let clean = res.fidelity > 1.0 - 1e-9 && res.codespace_weight > 1.0 - 1e-9;
    if res.leak_injected > P_TOL {
        res.leak_detection = 1.0 - res.p_undetected * res.leaked / res.leak_injected;
        res.passed = clean && res.leak_detection > 1e-9;
    } else {
        res.passed = clean && res.leaked < P_TOL;
    }
    Ok(res)
}
