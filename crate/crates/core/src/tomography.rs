//! State tomography with a certified least-squares MLE, codespace projection, and
//! logical process tomography (linear inversion, then TPCP projection in Choi space).
//!
//! PTM convention: `r[i][j] = ½ Tr(σ_i Λ(σ_j))`, so p' = R p with p indexed (I, X, Y, Z).
//! The Choi state is ordered auxiliary ⊗ output: ρ^R = ¼ Σ R_ij σ_jᵀ ⊗ σ_i.

use crate::circuits::{CycleOptions, LogicalGate, Prep, PrepAngles, Runner, Scheme};
use crate::code::{cardinal, project_to_codespace, LogicalState, PauliString};
use crate::engine::mat::{gates, CMat};
use crate::engine::DensityMatrix;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{BufRead, Write};

/// Pauli expectations of a k-qubit state, lexicographic in I < X < Y < Z with the first
/// site most significant.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PauliVector {
    pub k: usize,
    pub values: Vec<f64>,
    /// Shots per measurement setting (sampled mode).
    pub shots: Option<u64>,
    /// Binomial standard errors (sampled mode).
    pub stderr: Option<Vec<f64>>,
}

impl PauliVector {
    pub fn new(k: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 << (2 * k) {
            return Err(Error::Dimension(format!("{} values for {k} qubits", values.len())));
        }
        if (values[0] - 1.0).abs() > 1e-12 {
            return Err(Error::Param("p_0 must be 1".into()));
        }
        Ok(PauliVector { k, values, shots: None, stderr: None })
    }

    pub fn labels(&self) -> Vec<String> {
        PauliString::all(self.k).iter().map(|s| s.to_string()).collect()
    }

    /// Linear-inversion estimate Σ p_i σ_i / 2^k (Hermitian, trace 1, maybe not PSD).
    pub fn linear_state(&self) -> CMat {
        let d = 1 << self.k;
        let mut m = CMat::zeros(d);
        for (s, &p) in PauliString::all(self.k).iter().zip(&self.values) {
            if p != 0.0 {
                m = &m + &s.matrix().scale_re(p / d as f64);
            }
        }
        m
    }
}

/// Exact expectations Tr(ρσ_i) of an all-qubit state.
pub fn pauli_vector_exact(dm: &DensityMatrix) -> Result<PauliVector> {
    let dims = dm.register().dims();
    if dims.iter().any(|&d| d != 2) {
        return Err(Error::Dimension("Pauli vector needs an all-qubit register (restrict first)".into()));
    }
    let k = dims.len();
    let values = PauliString::all(k)
        .iter()
        .map(|s| dm.expectation(&s.support()))
        .collect::<Result<Vec<f64>>>()?;
    PauliVector::new(k, values)
}

/// Sampled expectations over the 3^k local settings with `shots` each. A string is
/// estimated from every setting that agrees with it on its support.
pub fn pauli_vector_sampled<R: Rng + ?Sized>(dm: &DensityMatrix, shots: u64, rng: &mut R) -> Result<PauliVector> {
    if shots == 0 {
        return Err(Error::Param("shots must be positive".into()));
    }
    let exact = pauli_vector_exact(dm)?;
    let k = exact.k;
    let n4 = 1usize << (2 * k);
    let mut sum = vec![0.0; n4];
    let mut count = vec![0u64; n4];
    for s in 0..3usize.pow(k as u32) {
        let setting: Vec<usize> = (0..k).map(|q| (s / 3usize.pow((k - 1 - q) as u32)) % 3 + 1).collect();
        // string index for a support mask under this setting
        let index = |mask: usize| -> usize {
            (0..k).fold(0, |acc, q| acc * 4 + if mask >> (k - 1 - q) & 1 == 1 { setting[q] } else { 0 })
        };
        let probs: Vec<f64> = (0..1usize << k)
            .map(|b| {
                let p: f64 = (0..1usize << k)
                    .map(|mask| {
                        let sign = if (b & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * exact.values[index(mask)]
                    })
                    .sum();
                (p / (1 << k) as f64).max(0.0)
            })
            .collect();
        let counts = multinomial(&probs, shots, rng)?;
        for mask in 0..1usize << k {
            let est: f64 = counts
                .iter()
                .enumerate()
                .map(|(b, &c)| if (b & mask).count_ones() % 2 == 0 { c as f64 } else { -(c as f64) })
                .sum::<f64>()
                / shots as f64;
            let i = index(mask);
            sum[i] += est;
            count[i] += 1;
        }
    }
    let values: Vec<f64> = sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect();
    let stderr = values
        .iter()
        .zip(&count)
        .map(|(p, &c)| ((1.0 - p * p).max(0.0) / (c as f64 * shots as f64)).sqrt())
        .collect();
    let mut pv = PauliVector::new(k, values)?;
    pv.shots = Some(shots);
    pv.stderr = Some(stderr);
    Ok(pv)
}

fn multinomial<R: Rng + ?Sized>(probs: &[f64], n: u64, rng: &mut R) -> Result<Vec<u64>> {
    let mut left = n;
    let mut mass: f64 = probs.iter().sum();
    let mut out = Vec::with_capacity(probs.len());
    for &p in probs {
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = Binomial::new(left, q).map_err(|e| Error::Param(e.to_string()))?.sample(rng);
        out.push(c);
        left -= c;
        mass -= p;
    }
    Ok(out)
}

/// Euclidean projection of `v` onto the probability simplex; returns (projection, shift τ).
pub fn simplex_projection(v: &[f64]) -> (Vec<f64>, f64) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (j + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    (v.iter().map(|x| (x - tau).max(0.0)).collect(), tau)
}

/// Nearest density matrix in Frobenius norm.
pub fn project_density(m: &CMat) -> CMat {
    let (vals, vecs) = m.eigh();
    let (p, _) = simplex_projection(&vals);
    CMat::from_eigen(&p, &vecs)
}

#[derive(Clone, Debug)]
pub struct MleResult {
    pub rho: CMat,
    /// Σ_i |p_i − Tr(ρσ_i)|².
    pub cost: f64,
    /// First-order optimality residual over {ρ ⪰ 0, Tr ρ = 1}.
    pub residual: f64,
}

/// Least-squares MLE: argmin Σ|p_i − Tr(ρσ_i)|² over density matrices. By Pauli
/// orthogonality the cost is 2^k ‖ρ − ρ_lin‖²_F, so the optimum is the Frobenius
/// projection of the linear estimate, solved exactly through its spectrum.
pub fn mle_state(p: &PauliVector) -> Result<MleResult> {
    let lin = p.linear_state();
    let rho = project_density(&lin);
    let d = (1usize << p.k) as f64;
    let cost = d * (&rho - &lin).frobenius().powi(2);
    let residual = stationarity_residual(&rho, &lin);
    if residual > 1e-8 {
        return Err(Error::NoConvergence { iters: 1, residual });
    }
    Ok(MleResult { rho, cost, residual })
}

/// KKT residual of ρ for min ‖ρ − target‖² on the density matrices: with G = ρ − target
/// and multiplier τ = −Tr(Gρ), optimality needs G + τI ⪰ 0 and Tr((G + τI)ρ) = 0.
pub fn stationarity_residual(rho: &CMat, target: &CMat) -> f64 {
    let g = rho - target;
    let tau = -(&g * rho).trace().re;
    let shifted = &g + &CMat::identity(rho.dim()).scale_re(tau);
    let dual = (-shifted.eigh().0[0]).max(0.0);
    let slack = (&shifted * rho).trace().norm();
    let primal = (-rho.eigh().0[0]).max(0.0) + (rho.trace().re - 1.0).abs();
    dual + slack + primal
}

/// 4×4 real Pauli transfer matrix, `r[out][in]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Ptm(pub [[f64; 4]; 4]);

fn paulis() -> [CMat; 4] {
    [CMat::identity(2), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()]
}

impl Ptm {
    pub fn identity() -> Self {
        let mut r = [[0.0; 4]; 4];
        (0..4).for_each(|i| r[i][i] = 1.0);
        Ptm(r)
    }

    /// PTM of ρ ↦ UρU†.
    pub fn from_unitary(u: &CMat) -> Self {
        let s = paulis();
        let mut r = [[0.0; 4]; 4];
        for (i, si) in s.iter().enumerate() {
            for (j, sj) in s.iter().enumerate() {
                let img = &(&(u * sj) * &u.adjoint()) * si;
                r[i][j] = 0.5 * img.trace().re;
            }
        }
        Ptm(r)
    }

    pub fn apply(&self, p: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * p[j]).sum();
        }
        out
    }

    /// ρ^R = ¼ Σ R_ij σ_jᵀ ⊗ σ_i.
    pub fn to_choi(&self) -> CMat {
        let s = paulis();
        let mut c = CMat::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                if self.0[i][j] != 0.0 {
                    c = &c + &s[j].transpose().kron(&s[i]).scale_re(self.0[i][j] / 4.0);
                }
            }
        }
        c
    }

    /// R_ij = Tr(ρ^R σ_jᵀ ⊗ σ_i).
    pub fn from_choi(c: &CMat) -> Self {
        let s = paulis();
        let mut r = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                r[i][j] = (c * &s[j].transpose().kron(&s[i])).trace().re;
            }
        }
        Ptm(r)
    }

    pub fn max_abs_diff(&self, o: &Ptm) -> f64 {
        (0..16).map(|k| (self.0[k / 4][k % 4] - o.0[k / 4][k % 4]).abs()).fold(0.0, f64::max)
    }

    pub fn frobenius_diff(&self, o: &Ptm) -> f64 {
        (0..16).map(|k| (self.0[k / 4][k % 4] - o.0[k / 4][k % 4]).powi(2)).sum::<f64>().sqrt()
    }
}

/// Tr over the output factor of an aux ⊗ out Choi state (a 2×2 matrix on aux).
pub fn trace_output(c: &CMat) -> CMat {
    let mut m = CMat::zeros(2);
    for a in 0..2 {
        for b in 0..2 {
            m[(a, b)] = c[(2 * a, 2 * b)] + c[(2 * a + 1, 2 * b + 1)];
        }
    }
    m
}

/// Tr over the auxiliary factor.
pub fn trace_aux(c: &CMat) -> CMat {
    let mut m = CMat::zeros(2);
    for a in 0..2 {
        for b in 0..2 {
            m[(a, b)] = c[(a, b)] + c[(2 + a, 2 + b)];
        }
    }
    m
}

/// Deviation from TPCP of a Choi state: (most negative eigenvalue, TP residual).
pub fn choi_violation(c: &CMat) -> (f64, f64) {
    let lo = c.eigh().0[0];
    let half = CMat::identity(2).scale_re(0.5);
    (lo, trace_output(c).max_abs_diff(&half))
}

#[derive(Clone, Debug)]
pub struct TpcpResult {
    pub ptm: Ptm,
    pub choi: CMat,
    pub iterations: usize,
}

/// Nearest TPCP map in Choi-space Frobenius norm, by Dykstra's alternating projections
/// between the density matrices and the affine set Tr_out ρ = I/2.
pub fn tpcp_project(r: &Ptm) -> Result<TpcpResult> {
    const CAP: usize = 200_000;
    let x0 = r.to_choi();
    let herm = (&x0 + &x0.adjoint()).scale_re(0.5);
    let mut x = herm.clone();
    let mut p = CMat::zeros(4);
    let mut q = CMat::zeros(4);
    let half = CMat::identity(2).scale_re(0.5);
    let affine = |m: &CMat| {
        let corr = &trace_output(m) - &half;
        m - &corr.kron(&half)
    };
    for it in 0..CAP {
        let y = project_density(&(&x + &p));
        p = &(&x + &p) - &y;
        let xn = affine(&(&y + &q));
        q = &(&y + &q) - &xn;
        let gap = (&xn - &y).frobenius();
        let step = (&xn - &x).frobenius();
        x = xn;
        if gap < 1e-13 && step < 1e-13 {
            // finish on the cone side and re-impose TP exactly (a tiny correction)
            let c = affine(&project_density(&x));
            return Ok(TpcpResult { ptm: Ptm::from_choi(&c), choi: c, iterations: it + 1 });
        }
    }
    let c = project_density(&x);
    let (lo, tp) = choi_violation(&c);
    Err(Error::NoConvergence { iters: CAP, residual: tp.max(-lo) })
}

/// F = (Tr(R_idealᵀ R) + 2)/6.
pub fn avg_gate_fidelity(r: &Ptm, ideal: &Ptm) -> f64 {
    let tr: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| ideal.0[i][j] * r.0[i][j]).sum();
    (tr + 2.0) / 6.0
}

/// Least-squares R with outputs ≈ R · inputs over an overcomplete set of Bloch vectors.
pub fn lptm_inversion(inputs: &[[f64; 3]], outputs: &[[f64; 3]]) -> Result<Ptm> {
    if inputs.len() != outputs.len() {
        return Err(Error::Dimension("input/output count mismatch".into()));
    }
    let aug = |b: &[f64; 3]| [1.0, b[0], b[1], b[2]];
    let pin = nalgebra::DMatrix::from_fn(4, inputs.len(), |i, k| aug(&inputs[k])[i]);
    let pout = nalgebra::DMatrix::from_fn(4, outputs.len(), |i, k| aug(&outputs[k])[i]);
    let gram = &pin * pin.transpose();
    let sv = gram.clone().svd(false, false).singular_values;
    let (mx, mn) = (sv.max(), sv.min());
    if mn <= 1e-10 * mx.max(1.0) {
        return Err(Error::RankDeficient(format!("input states span rank < 4 (σ_min = {mn:.3e})")));
    }
    let inv = gram.try_inverse().ok_or_else(|| Error::RankDeficient("singular input Gram matrix".into()))?;
    let r = pout * pin.transpose() * inv;
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = r[(i, j)];
        }
    }
    Ok(Ptm(out))
}

/// How data-qubit states are read out for tomography.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TomoMode {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

/// One characterized four-qubit state.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StateTomo {
    pub mle: Vec<f64>,
    /// Weight of the data state inside the qubit subspace.
    pub qubit_weight: f64,
    pub logical: LogicalState,
    pub codespace_weight: f64,
    /// Fidelity of the MLE four-qubit state to the encoded target.
    pub f4q: f64,
    /// Logical fidelity after codespace projection.
    pub fl: f64,
}

/// Four-qubit tomography (MLE) of a data state, then codespace projection. `target` is
/// the ideal logical state; `physical_target` the ideal four-qubit state if it differs
/// from the encoded one.
pub fn characterize(
    data: &DensityMatrix,
    target: (C64, C64),
    physical_target: Option<&[C64]>,
    mode: TomoMode,
    salt: u64,
) -> Result<StateTomo> {
    let (q, w) = data.qubit_restriction()?;
    let p = match mode {
        TomoMode::Exact => pauli_vector_exact(&q)?,
        TomoMode::Sampled { shots, seed } => {
            let mut rng = crate::seeded_rng(seed, salt);
            pauli_vector_sampled(&q, shots, &mut rng)?
        }
    };
    let mle = mle_state(&p)?;
    let (logical, cw) = project_to_codespace(&mle.rho)?;
    let enc;
    let psi = match physical_target {
        Some(v) => v,
        None => {
            enc = crate::code::encode(target.0, target.1);
            &enc
        }
    };
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let f4q = mle.rho.sandwich(psi, psi).re / n;
    Ok(StateTomo {
        mle: p.values,
        qubit_weight: w,
        logical,
        codespace_weight: cw,
        f4q,
        fl: crate::code::logical_fidelity(&logical, target),
    })
}

/// Preparation angles that target each cardinal state, in `cardinal::all()` order.
pub fn cardinal_preps() -> [(&'static str, Prep); 6] {
    let a = |t: f64, p: f64| Prep::Angles(PrepAngles { theta: t, phi: p });
    [
        ("0", a(0.0, 0.0)),
        ("1", a(PI, 0.0)),
        ("+", a(FRAC_PI_2, 0.0)),
        ("-", a(FRAC_PI_2, PI)),
        ("+i", a(FRAC_PI_2, FRAC_PI_2)),
        ("-i", a(FRAC_PI_2, 3.0 * FRAC_PI_2)),
    ]
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ProcessTomo {
    pub gate: String,
    pub raw: Ptm,
    pub projected: Ptm,
    pub ideal: Ptm,
    pub fidelity: f64,
    pub inputs: Vec<[f64; 3]>,
    pub outputs: Vec<[f64; 3]>,
    /// Post-selected fraction per input (both cycles and the gate ancilla).
    pub post_selected: Vec<f64>,
}

/// Prepare each cardinal state, stabilize once, characterize, apply the gate, stabilize
/// again, characterize, then invert and project.
pub fn logical_process_tomography(
    gate: &LogicalGate,
    model: &NoiseModel,
    scheme: Scheme,
    mode: TomoMode,
) -> Result<ProcessTomo> {
    use rayon::prelude::*;
    let preps = cardinal_preps();
    let targets = cardinal::all();
    let u = gate.ideal_unitary();
    let runs: Vec<([f64; 3], [f64; 3], f64)> = preps
        .par_iter()
        .zip(targets.par_iter())
        .enumerate()
        .map(|(k, ((_, prep), (_, t)))| {
            let mut r = Runner::new(model, CycleOptions::new(scheme))?;
            r.prep(prep)?;
            r.cycle()?;
            let before = characterize(&r.data_state()?, *t, None, mode, 2 * k as u64)?;
            r.gate(gate)?;
            r.cycle()?;
            let out_t = (u[(0, 0)] * t.0 + u[(0, 1)] * t.1, u[(1, 0)] * t.0 + u[(1, 1)] * t.1);
            let after = characterize(&r.data_state()?, out_t, None, mode, 2 * k as u64 + 1)?;
            Ok((before.logical.bloch, after.logical.bloch, r.ex.prob))
        })
        .collect::<Result<_>>()?;
    let inputs: Vec<[f64; 3]> = runs.iter().map(|r| r.0).collect();
    let outputs: Vec<[f64; 3]> = runs.iter().map(|r| r.1).collect();
    let raw = lptm_inversion(&inputs, &outputs)?;
    let projected = tpcp_project(&raw)?.ptm;
    let ideal = Ptm::from_unitary(&u);
    Ok(ProcessTomo {
        gate: gate.label(),
        raw,
        projected,
        ideal,
        fidelity: avg_gate_fidelity(&projected, &ideal),
        inputs,
        outputs,
        post_selected: runs.iter().map(|r| r.2).collect(),
    })
}

const PTM_LABELS: [&str; 4] = ["I", "X", "Y", "Z"];

/// PTM as CSV: header `out\in,I,X,Y,Z`, one row per output Pauli.
pub fn write_ptm_csv<W: Write>(w: W, r: &Ptm) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(std::iter::once("out\\in").chain(PTM_LABELS))?;
    for (i, row) in r.0.iter().enumerate() {
        let mut rec = vec![PTM_LABELS[i].to_string()];
        rec.extend(row.iter().map(|v| format!("{v:.12}")));
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_ptm_csv<R: BufRead>(r: R) -> Result<Ptm> {
    let mut rd = csv::Reader::from_reader(r);
    let head = rd.headers()?.clone();
    if head.iter().skip(1).ne(PTM_LABELS) {
        return Err(Error::Param("PTM header must name I, X, Y, Z".into()));
    }
    let mut out = [[0.0; 4]; 4];
    let mut n = 0;
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        if i >= 4 || rec.len() != 5 || rec.get(0) != Some(PTM_LABELS[i]) {
            return Err(Error::Param("malformed PTM row".into()));
        }
        for j in 0..4 {
            out[i][j] = rec[j + 1].trim().parse().map_err(|_| Error::Param("bad PTM entry".into()))?;
        }
        n += 1;
    }
    if n != 4 {
        return Err(Error::Param("PTM needs four rows".into()));
    }
    Ok(Ptm(out))
}

/// Density matrix as CSV: header `row` then `<label>_re,<label>_im` per basis column.
pub fn write_density_csv<W: Write>(w: W, rho: &CMat) -> Result<()> {
    let d = rho.dim();
    let k = d.trailing_zeros() as usize;
    let label = |i: usize| format!("{i:0k$b}");
    let mut wr = csv::Writer::from_writer(w);
    let mut head = vec!["row".to_string()];
    for j in 0..d {
        head.push(format!("{}_re", label(j)));
        head.push(format!("{}_im", label(j)));
    }
    wr.write_record(&head)?;
    for i in 0..d {
        let mut rec = vec![label(i)];
        for j in 0..d {
            rec.push(format!("{:.12}", rho[(i, j)].re));
            rec.push(format!("{:.12}", rho[(i, j)].im));
        }
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

/// Pauli vector as CSV: `pauli,value[,stderr]`.
pub fn write_pauli_csv<W: Write>(w: W, p: &PauliVector) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let se = p.stderr.as_ref();
    if se.is_some() {
        wr.write_record(["pauli", "value", "stderr"])?;
    } else {
        wr.write_record(["pauli", "value"])?;
    }
    for (i, (l, v)) in p.labels().iter().zip(&p.values).enumerate() {
        let mut rec = vec![l.clone(), format!("{v:.12}")];
        if let Some(s) = se {
            rec.push(format!("{:.12}", s[i]));
        }
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::mat::ONE;

    #[test]
    fn simplex_projection_cases() {
        let (p, _) = simplex_projection(&[0.5, 0.5]);
        assert_eq!(p, vec![0.5, 0.5]);
        let (p, _) = simplex_projection(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
        let (p, _) = simplex_projection(&[-1.0, 0.3, 0.4]);
        assert!((p[1] - 0.45).abs() < 1e-15 && (p[2] - 0.55).abs() < 1e-15 && p[0] == 0.0);
    }

    #[test]
    fn choi_of_identity_is_bell() {
        let c = Ptm::identity().to_choi();
        let h = 0.5;
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((c[(i, j)] - C64::new(h, 0.0)).norm() < 1e-15);
        }
        assert!((c.trace() - ONE).norm() < 1e-15);
    }
}
