//! Per-transmon two-state leakage chain and an L1 estimate from a p^L(n) series.
//!
//! p(n+1) = p(n) + r_up (1 − p(n)) − r_down p(n), p(0) = 0, with
//! r_up = (CZs fluxing the transmon per cycle)·4 L1·f and r_down = 1 − exp(−t_cycle/(T1/2)).
//! This is a deliberately simple stand-in for a full leakage-mobility model: its output is
//! an estimate and never feeds simulation parameters automatically.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarkovLeak {
    pub cz_per_cycle: f64,
    /// Unleaked-neighbour population factor f.
    pub neighbour_factor: f64,
    pub cycle_ns: f64,
    pub t1_us: f64,
}

impl MarkovLeak {
    pub fn seep(&self) -> f64 {
        1.0 - (-self.cycle_ns * 1e-3 / (self.t1_us / 2.0)).exp()
    }

    /// p^L(1..=n) for a given L1.
    pub fn series(&self, l1: f64, n: usize) -> Vec<f64> {
        let up = (self.cz_per_cycle * 4.0 * l1 * self.neighbour_factor).min(1.0);
        let down = self.seep();
        let mut p = 0.0;
        (0..n)
            .map(|_| {
                p = p + up * (1.0 - p) - down * p;
                p
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct L1Estimate {
    pub l1: f64,
    pub residual: f64,
}

/// L1 ∈ [0, 0.25] minimising the squared residual to `observed` (cycles 1..=len).
pub fn estimate_l1_markov(observed: &[f64], chain: &MarkovLeak) -> Result<L1Estimate> {
    if observed.len() < 2 {
        return Err(Error::Fit("need at least two cycle points".into()));
    }
    if chain.cz_per_cycle <= 0.0 || chain.neighbour_factor <= 0.0 {
        return Err(Error::Fit("no CZ fluxes this transmon: L1 is not identifiable".into()));
    }
    if observed.iter().all(|&p| p == 0.0) {
        return Ok(L1Estimate { l1: 0.0, residual: 0.0 });
    }
    let first = observed[0];
    if observed.iter().all(|&p| (p - first).abs() < 1e-12) {
        return Err(Error::Fit("flat nonzero series: L1 is not identifiable".into()));
    }
    let cost = |l1: f64| {
        chain.series(l1, observed.len()).iter().zip(observed).map(|(m, o)| (m - o).powi(2)).sum::<f64>()
    };
    // coarse scan, then golden section inside the best bracket
    let hi = 0.25;
    let steps = 2500;
    let (mut bi, mut bc) = (0usize, f64::INFINITY);
    for i in 0..=steps {
        let c = cost(hi * i as f64 / steps as f64);
        if c < bc {
            (bi, bc) = (i, c);
        }
    }
    let mut a = hi * bi.saturating_sub(1) as f64 / steps as f64;
    let mut b = hi * (bi + 1).min(steps) as f64 / steps as f64;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if cost(x1) < cost(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let l1 = 0.5 * (a + b);
    Ok(L1Estimate { l1, residual: cost(l1).sqrt() })
}
