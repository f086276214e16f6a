//! Exact density-matrix evolution of mixed qubit/qutrit registers.
//!
//! Site 0 is the leftmost tensor factor (most significant digit of the basis index).
//! Every operation on k sites is applied blockwise: the matrix is cut into
//! d_t × d_t blocks over the target levels and a sparse superoperator acts on each block,
//! so one application is a single pass over the D² elements.

pub mod mat;

use crate::error::{Error, Result};
use mat::{CMat, ONE, ZERO};
use num_complex::Complex64 as C64;

pub const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuditRegister {
    dims: Vec<usize>,
    labels: Vec<String>,
    strides: Vec<usize>,
    total: usize,
}

impl QuditRegister {
    pub fn new(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension("register needs at least one site".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d != 2 && d != 3) {
            return Err(Error::Dimension(format!("site dimension {d} (must be 2 or 3)")));
        }
        if labels.len() != dims.len() {
            return Err(Error::Dimension(format!("{} labels for {} sites", labels.len(), dims.len())));
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total = strides[0] * dims[0];
        Ok(QuditRegister { dims, labels, strides, total })
    }

    /// Unlabelled register, sites named q0, q1, ...
    pub fn anonymous(dims: Vec<usize>) -> Result<Self> {
        let labels = (0..dims.len()).map(|k| format!("q{k}")).collect();
        Self::new(dims, labels)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn len(&self) -> usize {
        self.dims.len()
    }
    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }
    pub fn total_dim(&self) -> usize {
        self.total
    }
    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }
    pub fn site(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.dims[site]
    }

    fn check_sites(&self, sites: &[usize]) -> Result<()> {
        for (k, &s) in sites.iter().enumerate() {
            if s >= self.dims.len() {
                return Err(Error::SiteOutOfRange(s));
            }
            if sites[..k].contains(&s) {
                return Err(Error::Dimension(format!("site {s} repeated")));
            }
        }
        Ok(())
    }

    /// Product of the dimensions of `sites`.
    pub fn block_dim(&self, sites: &[usize]) -> usize {
        sites.iter().map(|&s| self.dims[s]).product()
    }

    /// Global offsets of every local basis state of `sites` (first site most significant).
    fn target_offsets(&self, sites: &[usize]) -> Vec<usize> {
        let mut offs = vec![0usize];
        for &s in sites {
            let mut next = Vec::with_capacity(offs.len() * self.dims[s]);
            for &o in &offs {
                for l in 0..self.dims[s] {
                    next.push(o + l * self.strides[s]);
                }
            }
            offs = next;
        }
        offs
    }

    /// Offsets of every basis state of the complement of `sites`, ascending.
    fn rest_offsets(&self, sites: &[usize]) -> Vec<usize> {
        let rest: Vec<usize> = (0..self.len()).filter(|s| !sites.contains(s)).collect();
        self.target_offsets(&rest)
    }

    /// Local target index of every global basis index.
    fn local_index(&self, sites: &[usize]) -> Vec<usize> {
        (0..self.total)
            .map(|g| sites.iter().fold(0, |acc, &s| acc * self.dims[s] + self.digit(g, s)))
            .collect()
    }
}

/// Embedded single-site Pauli. On a qutrit it acts on levels {0,1} and annihilates |2⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMat {
        match self {
            Pauli::I => CMat::identity(2),
            Pauli::X => mat::gates::pauli_x(),
            Pauli::Y => mat::gates::pauli_y(),
            Pauli::Z => mat::gates::pauli_z(),
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// O|k⟩ = v|k'⟩ as (k', v); None when O annihilates |k⟩.
    fn action(self, k: usize) -> Option<(usize, C64)> {
        match (self, k) {
            (_, k) if k >= 2 => None,
            (Pauli::I, k) => Some((k, ONE)),
            (Pauli::X, k) => Some((1 - k, ONE)),
            (Pauli::Y, 0) => Some((1, mat::I)),
            (Pauli::Y, _) => Some((0, -mat::I)),
            (Pauli::Z, 0) => Some((0, ONE)),
            (Pauli::Z, _) => Some((1, -ONE)),
        }
    }
}

/// Block superoperator on a fixed set of sites.
#[derive(Clone, Debug)]
pub struct Channel {
    sites: Vec<usize>,
    dt: usize,
    op: SuperOp,
}

#[derive(Clone, Debug)]
enum SuperOp {
    /// Elementwise multiplier of the dt×dt block.
    Diagonal(Vec<C64>),
    /// Output entry i of the block = Σ v · input entry j, listed per i.
    Sparse(Vec<Vec<(u32, C64)>>),
}

impl Channel {
    /// ρ → Σ K ρ K†. No completeness check; see [`KrausChannel`] for the checked form.
    pub fn from_kraus(ops: &[CMat], sites: &[usize]) -> Self {
        let dt = ops[0].dim();
        let d2 = dt * dt;
        let mut dense = vec![ZERO; d2 * d2];
        for k in ops {
            assert_eq!(k.dim(), dt);
            for a in 0..dt {
                for c in 0..dt {
                    let x = k[(a, c)];
                    if x == ZERO {
                        continue;
                    }
                    for b in 0..dt {
                        for d in 0..dt {
                            let y = k[(b, d)];
                            if y == ZERO {
                                continue;
                            }
                            dense[(a * dt + b) * d2 + c * dt + d] += x * y.conj();
                        }
                    }
                }
            }
        }
        Self::from_dense_superop(dense, dt, sites)
    }

    fn from_dense_superop(dense: Vec<C64>, dt: usize, sites: &[usize]) -> Self {
        let d2 = dt * dt;
        let diagonal = (0..d2).all(|i| (0..d2).all(|j| i == j || dense[i * d2 + j] == ZERO));
        let op = if diagonal {
            SuperOp::Diagonal((0..d2).map(|i| dense[i * d2 + i]).collect())
        } else {
            SuperOp::Sparse(
                (0..d2)
                    .map(|i| {
                        (0..d2)
                            .filter(|&j| dense[i * d2 + j] != ZERO)
                            .map(|j| (j as u32, dense[i * d2 + j]))
                            .collect()
                    })
                    .collect(),
            )
        };
        Channel { sites: sites.to_vec(), dt, op }
    }

    pub fn unitary(u: &CMat, sites: &[usize]) -> Self {
        Self::from_kraus(std::slice::from_ref(u), sites)
    }

    /// Elementwise block multiplier, e.g. a dephasing channel. `factors` is dt×dt row-major.
    pub fn schur(factors: Vec<C64>, sites: &[usize]) -> Self {
        let dt = (factors.len() as f64).sqrt().round() as usize;
        assert_eq!(dt * dt, factors.len());
        Channel { sites: sites.to_vec(), dt, op: SuperOp::Diagonal(factors) }
    }

    /// This channel followed by an elementwise multiplier on the same sites.
    pub fn then_schur(mut self, factors: &[C64]) -> Self {
        assert_eq!(factors.len(), self.dt * self.dt);
        match &mut self.op {
            SuperOp::Diagonal(d) => d.iter_mut().zip(factors).for_each(|(a, b)| *a *= b),
            SuperOp::Sparse(rows) => {
                for (row, f) in rows.iter_mut().zip(factors) {
                    row.iter_mut().for_each(|e| e.1 *= f);
                }
            }
        }
        self
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn is_identity(&self) -> bool {
        match &self.op {
            SuperOp::Diagonal(d) => d.iter().all(|&x| x == ONE),
            SuperOp::Sparse(_) => false,
        }
    }
}

/// A checked Kraus channel on a subset of sites.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    pub operators: Vec<CMat>,
    pub sites: Vec<usize>,
}

impl KrausChannel {
    /// Fails unless Σ K†K = I within tolerance.
    pub fn new(operators: Vec<CMat>, sites: Vec<usize>) -> Result<Self> {
        let ch = KrausChannel { operators, sites };
        let dev = ch.completeness_deviation();
        if dev > TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(ch)
    }

    pub fn completeness_deviation(&self) -> f64 {
        let n = self.operators.first().map_or(0, |k| k.dim());
        let mut acc = CMat::zeros(n);
        for k in &self.operators {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&CMat::identity(n))
    }

    pub fn to_channel(&self) -> Channel {
        Channel::from_kraus(&self.operators, &self.sites)
    }
}

/// Assignment probabilities P(i|j) of a three-outcome readout; `p[i][j]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Povm {
    pub p: [[f64; 3]; 3],
}

impl Povm {
    pub fn ideal() -> Self {
        Povm { p: [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0]] }
    }

    /// Symmetric qubit errors; |2⟩ is declared as 1.
    pub fn symmetric(eps: f64) -> Self {
        Povm { p: [[1.0 - eps, eps, 0.0], [eps, 1.0 - eps, 1.0], [0.0, 0.0, 0.0]] }
    }

    pub fn validate(&self) -> Result<()> {
        for j in 0..3 {
            let col: f64 = (0..3).map(|i| self.p[i][j]).sum();
            if (col - 1.0).abs() > TOL || (0..3).any(|i| !(0.0..=1.0).contains(&self.p[i][j])) {
                return Err(Error::Param(format!("assignment column {j} is not a distribution")));
            }
        }
        Ok(())
    }

    /// Diagonal of M_i on a `d`-level site: √P(i|j).
    pub fn element(&self, outcome: usize, d: usize) -> Vec<f64> {
        (0..d).map(|j| self.p[outcome][j].sqrt()).collect()
    }
}

/// A conditioned measurement branch. `state` is None when the probability vanishes.
#[derive(Clone, Debug)]
pub struct Branch {
    pub probability: f64,
    pub state: Option<DensityMatrix>,
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    reg: QuditRegister,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Pure product state |occ⟩⟨occ|.
    pub fn new_register(reg: QuditRegister, occ: &[usize]) -> Result<Self> {
        if occ.len() != reg.len() {
            return Err(Error::Dimension(format!("{} occupations for {} sites", occ.len(), reg.len())));
        }
        let mut idx = 0;
        for (k, &o) in occ.iter().enumerate() {
            if o >= reg.dims[k] {
                return Err(Error::Dimension(format!("occupation {o} on a {}-level site", reg.dims[k])));
            }
            idx += o * reg.strides[k];
        }
        let n = reg.total;
        let mut data = vec![ZERO; n * n];
        data[idx * n + idx] = ONE;
        Ok(DensityMatrix { reg, data })
    }

    /// Tensor product of per-site density matrices.
    pub fn product(reg: QuditRegister, sites: &[CMat]) -> Result<Self> {
        if sites.len() != reg.len() || sites.iter().zip(&reg.dims).any(|(m, &d)| m.dim() != d) {
            return Err(Error::Dimension("per-site states do not match register".into()));
        }
        let mut acc = CMat::identity(1);
        for m in sites {
            acc = acc.kron(m);
        }
        Ok(DensityMatrix { reg, data: acc.as_slice().to_vec() })
    }

    pub fn from_pure(reg: QuditRegister, psi: &[C64]) -> Result<Self> {
        if psi.len() != reg.total {
            return Err(Error::Dimension("state vector length".into()));
        }
        Ok(DensityMatrix { data: CMat::outer(psi, psi).as_slice().to_vec(), reg })
    }

    pub fn from_matrix(reg: QuditRegister, m: &CMat) -> Result<Self> {
        if m.dim() != reg.total {
            return Err(Error::Dimension("matrix size".into()));
        }
        Ok(DensityMatrix { reg, data: m.as_slice().to_vec() })
    }

    pub fn register(&self) -> &QuditRegister {
        &self.reg
    }
    pub fn dim(&self) -> usize {
        self.reg.total
    }
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.reg.total + c]
    }
    pub fn to_cmat(&self) -> CMat {
        CMat::from_vec(self.data.clone())
    }

    pub fn trace(&self) -> f64 {
        let n = self.reg.total;
        (0..n).map(|i| self.data[i * n + i].re).sum()
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        let n = self.reg.total;
        (0..n).map(|i| self.data[i * n + i].re).collect()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.reg.total;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        dev
    }

    /// Smallest eigenvalue; dense diagonalization, meant for checks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.to_cmat().eigh().0[0]
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn normalize(&mut self) -> f64 {
        let t = self.trace();
        if t > 0.0 {
            self.scale(1.0 / t);
        }
        t
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn apply_unitary(&mut self, u: &CMat, sites: &[usize]) -> Result<()> {
        self.reg.check_sites(sites)?;
        if u.dim() != self.reg.block_dim(sites) {
            return Err(Error::Dimension("unitary size does not match target sites".into()));
        }
        let dev = u.unitarity_deviation();
        if dev > TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.apply_channel(&Channel::unitary(u, sites));
        Ok(())
    }

    pub fn apply_kraus(&mut self, ch: &KrausChannel) -> Result<()> {
        self.reg.check_sites(&ch.sites)?;
        if ch.operators.is_empty() || ch.operators[0].dim() != self.reg.block_dim(&ch.sites) {
            return Err(Error::Dimension("Kraus operator size does not match target sites".into()));
        }
        let dev = ch.completeness_deviation();
        if dev > TOL {
            return Err(Error::Incomplete(dev));
        }
        self.apply_channel(&ch.to_channel());
        Ok(())
    }

    /// Applies a prebuilt block superoperator. Sites must be valid for this register.
    pub fn apply_channel(&mut self, ch: &Channel) {
        debug_assert_eq!(ch.dt, self.reg.block_dim(&ch.sites));
        match &ch.op {
            SuperOp::Diagonal(f) => {
                if ch.is_identity() {
                    return;
                }
                let loc = self.reg.local_index(&ch.sites);
                let n = self.reg.total;
                let dt = ch.dt;
                for (r, row) in self.data.chunks_exact_mut(n).enumerate() {
                    let fr = &f[loc[r] * dt..(loc[r] + 1) * dt];
                    for (z, &lc) in row.iter_mut().zip(&loc) {
                        *z *= fr[lc];
                    }
                }
            }
            SuperOp::Sparse(rows) => {
                let toff = self.reg.target_offsets(&ch.sites);
                let rest = self.reg.rest_offsets(&ch.sites);
                apply_sparse(&mut self.data, self.reg.total, &rest, &toff, rows);
            }
        }
    }

    /// Unnormalized M_i ρ M_i on one site.
    pub fn apply_povm_element(&mut self, site: usize, povm: &Povm, outcome: usize) {
        let d = self.reg.dims[site];
        let m = povm.element(outcome, d);
        let f = (0..d * d).map(|k| C64::new(m[k / d] * m[k % d], 0.0)).collect();
        self.apply_channel(&Channel::schur(f, &[site]));
    }

    /// Probability of `outcome` and the normalized post-measurement state.
    pub fn measure_condition(&self, site: usize, outcome: usize, povm: &Povm) -> Result<Branch> {
        self.reg.check_sites(&[site])?;
        if outcome > 2 {
            return Err(Error::Param(format!("outcome {outcome}")));
        }
        let mut s = self.clone();
        s.apply_povm_element(site, povm, outcome);
        let p = s.trace();
        if p <= 0.0 {
            return Ok(Branch { probability: 0.0, state: None });
        }
        s.scale(1.0 / p);
        Ok(Branch { probability: p, state: Some(s) })
    }

    /// Outcome distribution of a single-site POVM without touching the state.
    pub fn outcome_probabilities(&self, site: usize, povm: &Povm) -> [f64; 3] {
        let d = self.reg.dims[site];
        let pops = self.populations();
        let mut level = [0.0; 3];
        for (g, p) in pops.iter().enumerate() {
            level[self.reg.digit(g, site)] += p;
        }
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..d).map(|j| povm.p[i][j] * level[j]).sum();
        }
        out
    }

    /// Tr(ρ O) for a product of embedded Paulis; unlisted sites carry the full identity.
    pub fn expectation(&self, ops: &[(usize, Pauli)]) -> Result<f64> {
        let sites: Vec<usize> = ops.iter().map(|o| o.0).collect();
        self.reg.check_sites(&sites)?;
        let n = self.reg.total;
        let mut acc = ZERO;
        'outer: for g in 0..n {
            let mut image = g;
            let mut v = ONE;
            for &(s, p) in ops {
                let k = self.reg.digit(g, s);
                match p.action(k) {
                    Some((k2, w)) => {
                        image = image + k2 * self.reg.strides[s] - k * self.reg.strides[s];
                        v *= w;
                    }
                    None => continue 'outer,
                }
            }
            acc += self.data[g * n + image] * v;
        }
        Ok(acc.re)
    }

    /// Tr(ρ O) for an operator on `sites` (block embedding, identity elsewhere).
    pub fn expectation_op(&self, op: &CMat, sites: &[usize]) -> Result<C64> {
        self.reg.check_sites(sites)?;
        if op.dim() != self.reg.block_dim(sites) {
            return Err(Error::Dimension("operator size".into()));
        }
        let red = self.partial_trace(sites)?;
        Ok((&red.to_cmat() * op).trace())
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::Dimension("partial trace needs a nonempty keep set".into()));
        }
        self.reg.check_sites(keep)?;
        let kd: Vec<usize> = keep.iter().map(|&s| self.reg.dims[s]).collect();
        let kl: Vec<String> = keep.iter().map(|&s| self.reg.labels[s].clone()).collect();
        let reg = QuditRegister::new(kd, kl)?;
        let ko = self.reg.target_offsets(keep);
        let to = self.reg.rest_offsets(keep);
        let n = self.reg.total;
        let m = ko.len();
        let mut data = vec![ZERO; m * m];
        for (x, &ox) in ko.iter().enumerate() {
            for (y, &oy) in ko.iter().enumerate() {
                data[x * m + y] = to.iter().map(|&t| self.data[(ox + t) * n + oy + t]).sum();
            }
        }
        Ok(DensityMatrix { reg, data })
    }

    /// Copy restricted to the {0,1} levels of every site, with the retained weight.
    pub fn qubit_restriction(&self) -> Result<(DensityMatrix, f64)> {
        let reg = QuditRegister::new(vec![2; self.reg.len()], self.reg.labels.clone())?;
        let idx: Vec<usize> = (0..reg.total)
            .map(|q| (0..reg.len()).map(|s| reg.digit(q, s) * self.reg.strides[s]).sum())
            .collect();
        let n = self.reg.total;
        let m = reg.total;
        let mut data = vec![ZERO; m * m];
        for (x, &gx) in idx.iter().enumerate() {
            for (y, &gy) in idx.iter().enumerate() {
                data[x * m + y] = self.data[gx * n + gy];
            }
        }
        let mut dm = DensityMatrix { reg, data };
        let w = dm.trace();
        if w > 0.0 {
            dm.scale(1.0 / w);
        }
        Ok((dm, w))
    }
}

/// Blockwise sparse superoperator. Only blocks on or above the block diagonal are
/// computed; the rest follow from Hermiticity of the output.
fn apply_sparse(data: &mut [C64], n: usize, rest: &[usize], toff: &[usize], rows: &[Vec<(u32, C64)>]) {
    let dt = toff.len();
    let d2 = dt * dt;
    let mut inb = vec![ZERO; d2];
    let mut outb = vec![ZERO; d2];
    for (i, &br) in rest.iter().enumerate() {
        for &bc in &rest[i..] {
            for a in 0..dt {
                let row = (br + toff[a]) * n + bc;
                for b in 0..dt {
                    inb[a * dt + b] = data[row + toff[b]];
                }
            }
            for (o, row) in outb.iter_mut().zip(rows) {
                let mut s = ZERO;
                for &(j, v) in row {
                    s += v * inb[j as usize];
                }
                *o = s;
            }
            for a in 0..dt {
                let row = (br + toff[a]) * n + bc;
                for b in 0..dt {
                    data[row + toff[b]] = outb[a * dt + b];
                }
            }
            if bc != br {
                for a in 0..dt {
                    let row = (bc + toff[a]) * n + br;
                    for b in 0..dt {
                        data[row + toff[b]] = outb[b * dt + a].conj();
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::mat::gates::*;
    use super::*;
    use std::f64::consts::*;

    fn qubits(n: usize) -> QuditRegister {
        QuditRegister::anonymous(vec![2; n]).unwrap()
    }

    #[test]
    fn basis_states() {
        let r = DensityMatrix::new_register(qubits(2), &[0, 0]).unwrap();
        assert_eq!(r.get(0, 0), ONE);
        assert_eq!(r.trace(), 1.0);
        let q = DensityMatrix::new_register(QuditRegister::anonymous(vec![3]).unwrap(), &[2]).unwrap();
        assert_eq!(q.get(2, 2), ONE);
        let g = DensityMatrix::new_register(qubits(7), &[0; 7]).unwrap();
        assert_eq!(g.dim(), 128);
        assert!((g.purity() - 1.0).abs() < 1e-15);
        assert!(DensityMatrix::new_register(qubits(2), &[0, 2]).is_err());
        assert!(QuditRegister::anonymous(vec![4]).is_err());
    }

    #[test]
    fn gate_examples() {
        let mut s = DensityMatrix::new_register(qubits(1), &[0]).unwrap();
        s.apply_unitary(&pauli_x(), &[0]).unwrap();
        assert!((s.expectation(&[(0, Pauli::Z)]).unwrap() + 1.0).abs() < 1e-15);

        let mut s = DensityMatrix::new_register(qubits(1), &[0]).unwrap();
        s.apply_unitary(&rot(FRAC_PI_2, FRAC_PI_2), &[0]).unwrap();
        assert!((s.expectation(&[(0, Pauli::X)]).unwrap() - 1.0).abs() < 1e-15);

        let mut s = DensityMatrix::new_register(qubits(2), &[1, 1]).unwrap();
        let zz = s.expectation(&[(0, Pauli::Z), (1, Pauli::Z)]).unwrap();
        s.apply_unitary(&cz(), &[0, 1]).unwrap();
        assert_eq!(s.expectation(&[(0, Pauli::Z), (1, Pauli::Z)]).unwrap(), zz);
        assert!(s.apply_unitary(&CMat::zeros(4), &[0, 1]).is_err());
    }

    #[test]
    fn measurement_examples() {
        let mut plus = DensityMatrix::new_register(qubits(1), &[0]).unwrap();
        plus.apply_unitary(&rot(FRAC_PI_2, FRAC_PI_2), &[0]).unwrap();
        let b = plus.measure_condition(0, 0, &Povm::ideal()).unwrap();
        assert!((b.probability - 0.5).abs() < 1e-15);
        assert!((b.state.unwrap().get(0, 0).re - 1.0).abs() < 1e-15);

        let one = DensityMatrix::new_register(qubits(1), &[1]).unwrap();
        let b = one.measure_condition(0, 0, &Povm::ideal()).unwrap();
        assert_eq!(b.probability, 0.0);
        assert!(b.state.is_none());

        let povm = Povm { p: [[0.99, 0.02, 0.0], [0.01, 0.98, 1.0], [0.0, 0.0, 0.0]] };
        povm.validate().unwrap();
        let b = one.measure_condition(0, 0, &povm).unwrap();
        assert!((b.probability - 0.02).abs() < 1e-15);
        assert!((b.state.unwrap().get(1, 1).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_pair() {
        let h = FRAC_1_SQRT_2;
        let psi = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let bell = DensityMatrix::from_pure(qubits(2), &psi).unwrap();
        for k in 0..2 {
            let r = bell.partial_trace(&[k]).unwrap();
            assert!(r.to_cmat().max_abs_diff(&CMat::identity(2).scale_re(0.5)) < 1e-15);
        }
        let same = bell.partial_trace(&[0, 1]).unwrap();
        assert!(same.max_abs_diff(&bell) < 1e-15);
        assert!((bell.expectation(&[(0, Pauli::X), (1, Pauli::X)]).unwrap() - 1.0).abs() < 1e-15);
        assert!(bell.partial_trace(&[]).is_err());
    }

    #[test]
    fn qutrit_paulis_annihilate_level_two() {
        let reg = QuditRegister::anonymous(vec![3]).unwrap();
        let s = DensityMatrix::new_register(reg, &[2]).unwrap();
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            assert_eq!(s.expectation(&[(0, p)]).unwrap(), 0.0);
        }
    }
}
