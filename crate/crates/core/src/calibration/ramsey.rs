//! Ramsey characterisation of the CZ phases inside one parity check.
//!
//! Unknowns, for a check with ancilla A and data d_1..d_m (CZ order): one conditional
//! phase φc_j = φ11 − φ01 − φ10 and one data phase φ01_j per CZ, plus the ancilla's total
//! single-qubit phase. With these the design matrix is 0/1 and has full column rank; the
//! per-CZ ancilla phases only ever appear summed, so they are not separately observable.
//! Row (Q, l) is the phase of Q's |1⟩ relative to |0⟩ with the others in |l⟩.

use crate::circuits::*;
use crate::error::{Error, Result};
use crate::noise::{CzPhases, NoiseModel, SITE_NAMES};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Analysis-pulse axes used for each cosine fit.
const RAMSEY_AXES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamseySystem {
    /// Design matrix, rows × unknowns, entries 0/1.
    pub a: Vec<Vec<u8>>,
    pub phi_ram: Vec<f64>,
    pub row_labels: Vec<String>,
    pub unknown_labels: Vec<String>,
}

impl RamseySystem {
    /// Design matrix of `check` (k = 1 + data count transmons, k·2^{k−1} rows).
    pub fn for_check(check: Check) -> Self {
        let data = check.data();
        let m = data.len();
        let k = m + 1;
        let mut unknown_labels = vec![format!("{}:phase", SITE_NAMES[check.ancilla()])];
        for &d in data {
            let key = format!("{}-{}", SITE_NAMES[check.ancilla()], SITE_NAMES[d]);
            unknown_labels.push(format!("{key}:phi01"));
            unknown_labels.push(format!("{key}:cond"));
        }
        let (mut a, mut row_labels) = (Vec::new(), Vec::new());
        for q in 0..k {
            for l in 0..1usize << (k - 1) {
                let bits = others_bits(k, q, l);
                let mut row = vec![0u8; 1 + 2 * m];
                if q == 0 {
                    row[0] = 1;
                    for j in 0..m {
                        row[2 + 2 * j] = bits[j + 1];
                    }
                } else {
                    row[1 + 2 * (q - 1)] = 1;
                    row[2 + 2 * (q - 1)] = bits[0];
                }
                let names: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                let qn = if q == 0 { check.ancilla() } else { data[q - 1] };
                row_labels.push(format!("{}|{names}", SITE_NAMES[qn]));
                a.push(row);
            }
        }
        RamseySystem { phi_ram: vec![0.0; a.len()], a, row_labels, unknown_labels }
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.a.iter().map(|r| r.iter().zip(x).map(|(&a, x)| a as f64 * x).sum::<f64>().rem_euclid(TAU)).collect()
    }

    fn matrix(&self) -> DMatrix<f64> {
        let n = self.a.first().map_or(0, |r| r.len());
        DMatrix::from_fn(self.a.len(), n, |i, j| self.a[i][j] as f64)
    }
}

/// Bits of all k transmons (ancilla first) when Q = `q` and the others read `l`.
fn others_bits(k: usize, q: usize, l: usize) -> Vec<u8> {
    let mut bits = vec![0u8; k];
    let mut pos = k - 1;
    for t in 0..k {
        if t == q {
            continue;
        }
        pos -= 1;
        bits[t] = ((l >> pos) & 1) as u8;
    }
    bits
}

/// Parameter vector for explicit per-CZ phases, in [`RamseySystem::for_check`] order.
pub fn phases_to_unknowns(phases: &[CzPhases]) -> Vec<f64> {
    let mut x = vec![phases.iter().map(|p| p.phi10).sum::<f64>().rem_euclid(TAU)];
    for p in phases {
        x.push(p.phi01.rem_euclid(TAU));
        x.push((p.phi11 - p.phi01 - p.phi10).rem_euclid(TAU));
    }
    x
}

/// Per-CZ phases realising `x`; the ancilla phase sits on the first CZ.
pub fn unknowns_to_phases(x: &[f64]) -> Vec<CzPhases> {
    let m = (x.len() - 1) / 2;
    (0..m)
        .map(|j| {
            let phi10 = if j == 0 { x[0] } else { 0.0 };
            let phi01 = x[1 + 2 * j];
            CzPhases { phi01, phi10, phi11: (phi01 + phi10 + x[2 + 2 * j]).rem_euclid(TAU) }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CzSolution {
    /// Unknowns in [0, 2π), system order.
    pub x: Vec<f64>,
    /// Root-sum-square of the wrapped row residuals.
    pub residual: f64,
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

/// Orthonormal null-space basis of the design matrix (columns).
pub fn null_space(sys: &RamseySystem) -> Vec<Vec<f64>> {
    let a = sys.matrix();
    let eig = SymmetricEigen::new(a.transpose() * &a);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] <= 1e-10 * top.max(1.0))
        .map(|i| eig.eigenvectors.column(i).iter().cloned().collect())
        .collect()
}

/// Box-constrained circular least squares: minimises Σ_i wrap(A x − φ^Ram)_i² over
/// x ∈ [0, 2π)^n. Each row's branch is chosen to minimise its own residual and the linear
/// problem is re-solved until the branches settle; a few deterministic restarts guard
/// against a poor first branch assignment.
pub fn solve_cz_phases(sys: &RamseySystem) -> Result<CzSolution> {
    let a = sys.matrix();
    if a.nrows() != sys.phi_ram.len() || a.nrows() == 0 {
        return Err(Error::Dimension(format!("{} rows, {} phases", a.nrows(), sys.phi_ram.len())));
    }
    let ns = null_space(sys);
    if !ns.is_empty() {
        let basis: Vec<String> = ns
            .iter()
            .map(|v| format!("[{}]", v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")))
            .collect();
        return Err(Error::RankDeficient(format!("null space {}", basis.join(" "))));
    }
    let ata = a.transpose() * &a;
    let chol = ata.clone().cholesky().ok_or_else(|| Error::RankDeficient("normal matrix not positive".into()))?;
    let n = a.ncols();
    let b = DVector::from_column_slice(&sys.phi_ram);
    let cost = |x: &DVector<f64>| (&a * x - &b).iter().map(|r| wrap(*r).powi(2)).sum::<f64>();
    let mut rng = crate::seeded_rng(0x5eed, n as u64);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for start in 0..16 {
        let mut x = if start == 0 {
            chol.solve(&(a.transpose() * &b))
        } else {
            DVector::from_fn(n, |_, _| rng.random::<f64>() * TAU)
        };
        for _ in 0..100 {
            let r = &a * &x - &b;
            let shifted = DVector::from_fn(b.len(), |i, _| b[i] + (r[i] - wrap(r[i])));
            let nx = chol.solve(&(a.transpose() * shifted));
            let done = (&nx - &x).amax() < 1e-14;
            x = nx;
            if done {
                break;
            }
        }
        let c = cost(&x);
        if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
            best = Some((c, x));
        }
    }
    let (c, x) = best.expect("at least one start");
    Ok(CzSolution { x: x.iter().map(|v| v.rem_euclid(TAU)).collect(), residual: c.sqrt() })
}

/// Phase of one Ramsey row, from a least-squares cosine fit of P(1) over the analysis axis.
fn ramsey_row(model: &NoiseModel, check: Check, q: usize, l: usize) -> Result<f64> {
    let data = check.data();
    let k = data.len() + 1;
    let sites: Vec<usize> = std::iter::once(check.ancilla()).chain(data.iter().copied()).collect();
    let bits = others_bits(k, q, l);
    let target = sites[q];
    let mut c = TimedCircuit::new();
    c.push(Kind::Rot { theta: -FRAC_PI_2, phi: 0.0 }, &[target], 0);
    for (t, &s) in sites.iter().enumerate() {
        if t != q && bits[t] == 1 {
            c.push(Kind::Rot { theta: PI, phi: 0.0 }, &[s], 0);
        }
    }
    let czs: Vec<TimedInstruction> = check_block(check, check == Check::X1234)
        .instrs
        .into_iter()
        .filter(|i| matches!(i.kind, Kind::Cz { .. }))
        .collect();
    let cz_start = czs.iter().map(|i| i.start_ns).min().unwrap_or(0);
    let mut end = T_1Q;
    for mut i in czs {
        i.start_ns += T_1Q - cz_start;
        end = end.max(i.end_ns());
        c.instrs.push(i);
    }
    let mut ex = Executor::new(model)?;
    ex.run(&c)?;
    let povm = model.povm(SITE_NAMES[target]);
    let (mut sc, mut ss) = (0.0, 0.0);
    for j in 0..RAMSEY_AXES {
        let phi = TAU * j as f64 / RAMSEY_AXES as f64;
        let mut e = ex.clone();
        e.step(&TimedInstruction::new(Kind::Rot { theta: -FRAC_PI_2, phi }, &[target], end))?;
        e.settle(&[target], (end + T_1Q) as f64);
        let p1 = e.state.outcome_probabilities(target, &povm)[1];
        sc += p1 * phi.cos();
        ss += p1 * phi.sin();
    }
    // P(1) = c0 + c cos(ψ − φ); equally spaced axes make the fit a single DFT bin
    Ok(ss.atan2(sc).rem_euclid(TAU))
}

/// Simulated Ramsey phases of every row of `check` under `model`.
pub fn generate_ramsey_phases(check: Check, model: &NoiseModel) -> Result<RamseySystem> {
    let mut sys = RamseySystem::for_check(check);
    let k = check.data().len() + 1;
    let mut phi = Vec::with_capacity(sys.rows());
    for q in 0..k {
        for l in 0..1usize << (k - 1) {
            phi.push(ramsey_row(model, check, q, l)?);
        }
    }
    sys.phi_ram = phi;
    Ok(sys)
}

/// Calibrates every check under `model` and returns the phase table keyed like
/// [`NoiseModel::cz_phase_table`].
pub fn calibrate_cz_phases(model: &NoiseModel) -> Result<Vec<((String, String), CzPhases, f64)>> {
    let mut out = Vec::new();
    for check in Check::ALL {
        let sys = generate_ramsey_phases(check, model)?;
        let sol = solve_cz_phases(&sys)?;
        for (&d, p) in check.data().iter().zip(unknowns_to_phases(&sol.x)) {
            out.push(((SITE_NAMES[check.ancilla()].to_string(), SITE_NAMES[d].to_string()), p, sol.residual));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct PhaseRow {
    pub row_index: usize,
    pub phase_rad: f64,
}

pub fn write_phase_csv<W: std::io::Write>(w: W, phases: &[f64]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for (i, &p) in phases.iter().enumerate() {
        wr.serialize(PhaseRow { row_index: i, phase_rad: p })?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_phase_csv<R: std::io::Read>(r: R) -> Result<Vec<f64>> {
    let mut rows: Vec<PhaseRow> = csv::Reader::from_reader(r).deserialize().collect::<std::result::Result<_, _>>()?;
    rows.sort_by_key(|r| r.row_index);
    if rows.iter().enumerate().any(|(i, r)| r.row_index != i) {
        return Err(Error::Param("row_index must run 0..n without gaps".into()));
    }
    Ok(rows.into_iter().map(|r| r.phase_rad).collect())
}
