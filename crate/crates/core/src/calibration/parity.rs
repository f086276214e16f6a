//! Parity-check assignment benchmark: every computational input of a check's data, one
//! check, one ancilla readout.

use crate::circuits::*;
use crate::error::Result;
use crate::noise::{NoiseModel, SITE_NAMES};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use std::f64::consts::PI;

/// Shots per input in sampled benchmarks.
pub const BENCH_SHOTS: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityRow {
    /// Data bits in the check's CZ order, e.g. "0110".
    pub input: String,
    pub parity: u8,
    /// Probability the ancilla reads the right parity.
    pub p_correct: f64,
    /// Sampled estimate, when shots were requested.
    pub sampled: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityBenchmark {
    pub check: String,
    pub rows: Vec<ParityRow>,
    pub average: f64,
}

/// The check's coherent block with every data qubit in the Z frame.
fn bench_circuit(check: Check, bits: usize) -> TimedCircuit {
    let data = check.data();
    let mut c = TimedCircuit::new();
    for (k, &d) in data.iter().enumerate() {
        if bits >> (data.len() - 1 - k) & 1 == 1 {
            c.push(Kind::Rot { theta: PI, phi: 0.0 }, &[d], 0);
        }
    }
    c.instrs.extend(check_block(check, false).shifted(T_1Q).instrs);
    c
}

/// Exact per-input assignment probabilities; with `shots` each row also gets a binomial draw.
pub fn parity_benchmark<R: Rng + ?Sized>(
    check: Check,
    model: &NoiseModel,
    shots: Option<u64>,
    rng: &mut R,
) -> Result<ParityBenchmark> {
    let n = check.data().len();
    let a = check.ancilla();
    let povm = model.povm(SITE_NAMES[a]);
    let mut rows = Vec::with_capacity(1 << n);
    for bits in 0..1usize << n {
        let parity = (bits.count_ones() % 2) as u8;
        let c = bench_circuit(check, bits);
        let mut ex = Executor::new(model)?;
        ex.run(&c)?;
        ex.settle(&[a], c.end_ns() as f64);
        let p = ex.state.outcome_probabilities(a, &povm)[parity as usize];
        let sampled = match shots {
            Some(s) => Some(
                Binomial::new(s, p.clamp(0.0, 1.0))
                    .map_err(|e| crate::Error::Param(e.to_string()))?
                    .sample(rng) as f64
                    / s as f64,
            ),
            None => None,
        };
        rows.push(ParityRow { input: format!("{bits:0n$b}"), parity, p_correct: p, sampled });
    }
    let average = rows.iter().map(|r| r.p_correct).sum::<f64>() / rows.len() as f64;
    Ok(ParityBenchmark { check: check.name().into(), rows, average })
}
