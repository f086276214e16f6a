//! Small dense complex matrices for operators on a handful of sites.

use num_complex::Complex64 as C64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Panics unless `data.len()` is a perfect square.
    pub fn from_vec(data: Vec<C64>) -> Self {
        let n = (data.len() as f64).sqrt().round() as usize;
        assert_eq!(n * n, data.len(), "CMat::from_vec needs n*n entries");
        CMat { n, data }
    }

    pub fn from_real(n: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n * n);
        CMat { n, data: data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// |a⟩⟨b| where `a` and `b` are column vectors.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        let n = a.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        CMat { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn kron(&self, other: &CMat) -> Self {
        let (a, b) = (self.n, other.n);
        let n = a * b;
        let mut m = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let x = self.data[i * a + j];
                if x == ZERO {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        m.data[(i * b + k) * n + j * b + l] = x * other.data[k * b + l];
                    }
                }
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |U†U − I|.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&CMat::identity(self.n))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.data[i * self.n + j] * v[j]).sum())
            .collect()
    }

    /// ⟨a|M|b⟩
    pub fn sandwich(&self, a: &[C64], b: &[C64]) -> C64 {
        let mb = self.apply(b);
        a.iter().zip(&mb).map(|(x, y)| x.conj() * y).sum()
    }

    /// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
    pub fn eigh(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        let n = self.n;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            // symmetrize against round-off so the solver sees an exact Hermitian input
            (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
        });
        let eig = m.symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.into_iter().unzip()
    }

    /// Σ_k λ_k |v_k⟩⟨v_k|
    pub fn from_eigen(vals: &[f64], vecs: &[Vec<C64>]) -> Self {
        let n = vecs.first().map_or(0, |v| v.len());
        let mut m = Self::zeros(n);
        for (l, v) in vals.iter().zip(vecs) {
            if *l == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[i] * *l;
                for j in 0..n {
                    m.data[i * n + j] += a * v[j].conj();
                }
            }
        }
        m
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        m
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        CMat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        CMat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Single-qubit Paulis and friends.
pub mod gates {
    use super::*;

    pub fn pauli_x() -> CMat {
        CMat::from_vec(vec![ZERO, ONE, ONE, ZERO])
    }
    pub fn pauli_y() -> CMat {
        CMat::from_vec(vec![ZERO, -I, I, ZERO])
    }
    pub fn pauli_z() -> CMat {
        CMat::from_vec(vec![ONE, ZERO, ZERO, -ONE])
    }

    /// R_φ^θ = exp(−iθ/2 (cos φ X + sin φ Y)). φ = 0 is R_x, φ = π/2 is R_y.
    pub fn rot(theta: f64, phi: f64) -> CMat {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = C64::from_polar(1.0, phi);
        CMat::from_vec(vec![
            C64::new(c, 0.0),
            -I * s * e.conj(),
            -I * s * e,
            C64::new(c, 0.0),
        ])
    }

    /// exp(−iθZ/2)
    pub fn rz(theta: f64) -> CMat {
        CMat::diag(&[C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)])
    }

    pub fn cz() -> CMat {
        CMat::diag(&[ONE, ONE, ONE, -ONE])
    }

    /// Embed a qubit operator into `d` levels, acting as `pad` on levels ≥ 2.
    pub fn embed(u: &CMat, d: usize, pad: C64) -> CMat {
        assert_eq!(u.dim(), 2);
        let mut m = CMat::zeros(d);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = u[(i, j)];
            }
        }
        for k in 2..d {
            m[(k, k)] = pad;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    #[test]
    fn rotations_match_pauli_exponentials() {
        let x = rot(std::f64::consts::PI, 0.0);
        assert!(x.max_abs_diff(&pauli_x().scale(-I)) < 1e-15);
        let y = rot(std::f64::consts::PI, std::f64::consts::FRAC_PI_2);
        assert!(y.max_abs_diff(&pauli_y().scale(-I)) < 1e-15);
    }

    #[test]
    fn eigh_reconstructs() {
        let m = CMat::from_vec(vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)]);
        let (v, w) = m.eigh();
        assert!(v[0] <= v[1]);
        assert!(CMat::from_eigen(&v, &w).max_abs_diff(&m) < 1e-12);
    }
}
