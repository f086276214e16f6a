//! The surface-7 code on data qubits D1–D4 (tensor order D1 D2 D3 D4, left to right).

use crate::engine::mat::{CMat, ONE, ZERO};
use crate::engine::Pauli;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::fmt;

/// Pauli string on any number of qubits; entry k acts on qubit k.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    /// From a label like "ZIZI".
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::Param(format!("bad Pauli label {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }

    /// Single-qubit Paulis at the given (0-based) positions, identity elsewhere.
    pub fn on(n: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut v = vec![Pauli::I; n];
        for &(k, p) in ops {
            v[k] = p;
        }
        PauliString(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn matrix(&self) -> CMat {
        self.0.iter().fold(CMat::identity(1), |acc, p| acc.kron(&p.matrix()))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Nonidentity entries as (position, Pauli).
    pub fn support(&self) -> Vec<(usize, Pauli)> {
        self.0.iter().enumerate().filter(|(_, p)| **p != Pauli::I).map(|(k, p)| (k, *p)).collect()
    }

    /// Product up to phase.
    pub fn mul_unsigned(&self, other: &PauliString) -> PauliString {
        use Pauli::*;
        PauliString(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| match (a, b) {
                    (I, p) | (p, I) => *p,
                    (p, q) if p == q => I,
                    (X, Y) | (Y, X) => Z,
                    (Y, Z) | (Z, Y) => X,
                    _ => Y,
                })
                .collect(),
        )
    }

    /// All 4^n strings in lexicographic I<X<Y<Z order, qubit 0 most significant.
    pub fn all(n: usize) -> Vec<PauliString> {
        (0..4usize.pow(n as u32))
            .map(|mut k| {
                let mut v = vec![Pauli::I; n];
                for slot in v.iter_mut().rev() {
                    *slot = Pauli::ALL[k % 4];
                    k /= 4;
                }
                PauliString(v)
            })
            .collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.label())?;
        }
        Ok(())
    }
}

fn ps(s: &str) -> PauliString {
    PauliString::parse(s).expect("static label")
}

/// Z_{D1}Z_{D3}, X_{D1}X_{D2}X_{D3}X_{D4}, Z_{D2}Z_{D4}; ancillas A1, A2, A3 in that order.
pub fn stabilizers() -> [PauliString; 3] {
    [ps("ZIZI"), ps("XXXX"), ps("IZIZ")]
}

pub fn z_logicals() -> [PauliString; 4] {
    [ps("ZZII"), ps("IIZZ"), ps("ZIIZ"), ps("IZZI")]
}

pub fn x_logicals() -> [PauliString; 2] {
    [ps("XIXI"), ps("IXIX")]
}

/// Y_L = +i X_L Z_L = Y1 Z2 X3.
pub fn y_logical() -> PauliString {
    ps("YZXI")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum LogicalPauli {
    X,
    Y,
    Z,
}

impl LogicalPauli {
    pub const ALL: [LogicalPauli; 3] = [LogicalPauli::X, LogicalPauli::Y, LogicalPauli::Z];

    pub fn representative(self) -> PauliString {
        match self {
            LogicalPauli::X => x_logicals()[0].clone(),
            LogicalPauli::Y => y_logical(),
            LogicalPauli::Z => z_logicals()[0].clone(),
        }
    }
}

fn basis_vec(bits: &[usize]) -> Vec<C64> {
    let mut v = vec![ZERO; 16];
    for &b in bits {
        v[b] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    }
    v
}

/// (|0_L⟩, |1_L⟩) = ((|0000⟩+|1111⟩)/√2, (|0101⟩+|1010⟩)/√2).
pub fn logical_basis() -> (Vec<C64>, Vec<C64>) {
    (basis_vec(&[0b0000, 0b1111]), basis_vec(&[0b0101, 0b1010]))
}

/// a|0_L⟩ + b|1_L⟩ as a 16-vector.
pub fn encode(a: C64, b: C64) -> Vec<C64> {
    let (z, o) = logical_basis();
    z.iter().zip(&o).map(|(x, y)| a * x + b * y).collect()
}

/// I_L = Π (I + S)/2.
pub fn codespace_projector() -> CMat {
    stabilizers().iter().fold(CMat::identity(16), |acc, s| {
        let half = (&CMat::identity(16) + &s.matrix()).scale_re(0.5);
        &acc * &half
    })
}

/// Logical single-qubit state as a Bloch vector (p_X, p_Y, p_Z).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogicalState {
    pub bloch: [f64; 3],
}

impl LogicalState {
    pub fn from_amplitudes(a: C64, b: C64) -> Self {
        let n = a.norm_sqr() + b.norm_sqr();
        let ab = a.conj() * b;
        LogicalState { bloch: [2.0 * ab.re / n, 2.0 * ab.im / n, (a.norm_sqr() - b.norm_sqr()) / n] }
    }

    pub fn rho(&self) -> CMat {
        let [x, y, z] = self.bloch;
        CMat::from_vec(vec![
            C64::new((1.0 + z) / 2.0, 0.0),
            C64::new(x / 2.0, -y / 2.0),
            C64::new(x / 2.0, y / 2.0),
            C64::new((1.0 - z) / 2.0, 0.0),
        ])
    }

    pub fn norm(&self) -> f64 {
        self.bloch.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Bloch vector of the codespace projection and the codespace weight Tr(ρ I_L).
pub fn project_to_codespace(rho: &CMat) -> Result<(LogicalState, f64)> {
    if rho.dim() != 16 {
        return Err(Error::Dimension("codespace projection needs a four-qubit state".into()));
    }
    let il = codespace_projector();
    let w = (rho * &il).trace().re;
    if w <= 1e-12 {
        return Err(Error::NegligibleCodespace(w));
    }
    let mut bloch = [0.0; 3];
    for (k, l) in LogicalPauli::ALL.iter().enumerate() {
        let sigma = &l.representative().matrix() * &il;
        bloch[k] = (rho * &sigma).trace().re / w;
    }
    Ok((LogicalState { bloch }, w))
}

/// ⟨ψ|ρ_L|ψ⟩ for a logical pure state given by amplitudes (a, b).
pub fn logical_fidelity(state: &LogicalState, target: (C64, C64)) -> f64 {
    let t = [target.0, target.1];
    let n: f64 = t.iter().map(|z| z.norm_sqr()).sum();
    state.rho().sandwich(&t, &t).re / n
}

/// Amplitudes of the six cardinal logical states.
pub mod cardinal {
    use super::*;
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    pub fn zero() -> (C64, C64) {
        (ONE, ZERO)
    }
    pub fn one() -> (C64, C64) {
        (ZERO, ONE)
    }
    pub fn plus() -> (C64, C64) {
        (C64::new(H, 0.0), C64::new(H, 0.0))
    }
    pub fn minus() -> (C64, C64) {
        (C64::new(H, 0.0), C64::new(-H, 0.0))
    }
    pub fn plus_i() -> (C64, C64) {
        (C64::new(H, 0.0), C64::new(0.0, H))
    }
    pub fn minus_i() -> (C64, C64) {
        (C64::new(H, 0.0), C64::new(0.0, -H))
    }
    pub fn all() -> [(&'static str, (C64, C64)); 6] {
        [
            ("0", zero()),
            ("1", one()),
            ("+", plus()),
            ("-", minus()),
            ("+i", plus_i()),
            ("-i", minus_i()),
        ]
    }
}

/// Nontrivial weight-2 Pauli errors that commute with every stabilizer.
pub fn undetectable_weight2() -> Vec<PauliString> {
    let group = stabilizer_group();
    let stabs = stabilizers();
    PauliString::all(4)
        .into_iter()
        .filter(|p| p.weight() == 2)
        .filter(|p| stabs.iter().all(|s| s.commutes_with(p)))
        .filter(|p| !group.contains(p))
        .collect()
}

/// All 8 elements of the stabilizer group, signs dropped.
pub fn stabilizer_group() -> Vec<PauliString> {
    let s = stabilizers();
    (0..8)
        .map(|m: usize| {
            (0..3).filter(|k| m >> k & 1 == 1).fold(PauliString::identity(4), |acc, k| acc.mul_unsigned(&s[k]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stabilizers_commute_and_square_to_identity() {
        let s = stabilizers();
        for a in &s {
            let m = a.matrix();
            assert!((&m * &m).max_abs_diff(&CMat::identity(16)) < 1e-15);
            for b in &s {
                assert!(a.commutes_with(b));
            }
        }
    }

    #[test]
    fn logicals_commute_with_stabilizers_and_anticommute_pairwise() {
        for l in z_logicals().iter().chain(x_logicals().iter()) {
            for s in stabilizers() {
                assert!(l.commutes_with(&s), "{l} vs {s}");
            }
        }
        for z in z_logicals() {
            for x in x_logicals() {
                assert!(!z.commutes_with(&x));
            }
        }
    }

    #[test]
    fn y_logical_is_i_x_z() {
        let xz = &x_logicals()[0].matrix() * &z_logicals()[0].matrix();
        let y = xz.scale(crate::engine::mat::I);
        assert!(y.max_abs_diff(&y_logical().matrix()) < 1e-15);
    }

    #[test]
    fn basis_and_projector() {
        let (z, o) = logical_basis();
        let ov: C64 = z.iter().zip(&o).map(|(a, b)| a.conj() * b).sum();
        assert_eq!(ov, ZERO);
        for s in stabilizers() {
            let m = s.matrix();
            assert!((m.sandwich(&z, &z).re - 1.0).abs() < 1e-14);
            assert!((m.sandwich(&o, &o).re - 1.0).abs() < 1e-14);
        }
        let zz = z_logicals()[0].matrix();
        assert!((zz.sandwich(&z, &z).re - 1.0).abs() < 1e-14);
        assert!((zz.sandwich(&o, &o).re + 1.0).abs() < 1e-14);

        let il = codespace_projector();
        assert!((&il * &il).max_abs_diff(&il) < 1e-12);
        assert!((il.trace().re - 2.0).abs() < 1e-14);
        let mut e0 = vec![ZERO; 16];
        e0[0] = ONE;
        let img = il.apply(&e0);
        for (a, b) in img.iter().zip(&z) {
            assert!((a - b * std::f64::consts::FRAC_1_SQRT_2).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_examples() {
        let (z, _) = logical_basis();
        let (s, w) = project_to_codespace(&CMat::outer(&z, &z)).unwrap();
        assert!((w - 1.0).abs() < 1e-14 && (s.bloch[2] - 1.0).abs() < 1e-14);

        let mut e0 = vec![ZERO; 16];
        e0[0] = ONE;
        let (s, w) = project_to_codespace(&CMat::outer(&e0, &e0)).unwrap();
        assert!((w - 0.5).abs() < 1e-14 && (s.bloch[2] - 1.0).abs() < 1e-14);

        let (s, w) = project_to_codespace(&CMat::identity(16).scale_re(1.0 / 16.0)).unwrap();
        assert!((w - 0.125).abs() < 1e-14 && s.norm() < 1e-14);

        let mut e5 = vec![ZERO; 16];
        e5[0b0001] = ONE;
        assert!(project_to_codespace(&CMat::outer(&e5, &e5)).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let plus = LogicalState::from_amplitudes(cardinal::plus().0, cardinal::plus().1);
        assert!((logical_fidelity(&plus, cardinal::plus()) - 1.0).abs() < 1e-14);
        let mixed = LogicalState { bloch: [0.0; 3] };
        for (_, t) in cardinal::all() {
            assert!((logical_fidelity(&mixed, t) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn weight_one_errors_are_detectable() {
        let stabs = stabilizers();
        for k in 0..4 {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let e = PauliString::on(4, &[(k, p)]);
                assert!(stabs.iter().any(|s| !s.commutes_with(&e)));
            }
        }
    }

    #[test]
    fn undetectable_weight_two_errors_are_logical_representatives() {
        let reps: Vec<PauliString> = z_logicals().into_iter().chain(x_logicals()).collect();
        let group = stabilizer_group();
        let found = undetectable_weight2();
        for r in &reps {
            assert!(found.contains(r), "missing {r}");
        }
        // anything else is a representative times a stabilizer (Y1Y3 = −X1X3·Z1Z3, ...)
        for f in &found {
            assert!(reps.iter().any(|r| group.iter().any(|g| &r.mul_unsigned(g) == f)), "{f}");
        }
    }
}
