//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::Rng;
use surface7::engine::mat::{gates, CMat};
use surface7::tomography::{PauliVector, Ptm};

/// Single-qubit least squares over the Bloch ball by nested grid search.
pub fn bloch_grid_oracle(v: [f64; 3]) -> [f64; 3] {
    let cost = |r: [f64; 3]| (0..3).map(|i| (r[i] - v[i]).powi(2)).sum::<f64>();
    let point = |rad: f64, th: f64, ph: f64| [rad * th.sin() * ph.cos(), rad * th.sin() * ph.sin(), rad * th.cos()];
    let (mut best, mut bc) = ([0.0; 3], f64::INFINITY);
    let (mut c_rad, mut c_th, mut c_ph) = (0.5, std::f64::consts::FRAC_PI_2, 0.0);
    let (mut w_rad, mut w_th, mut w_ph) = (0.5, std::f64::consts::FRAC_PI_2, std::f64::consts::PI);
    for _ in 0..40 {
        let (mut nr, mut nt, mut np) = (c_rad, c_th, c_ph);
        for a in 0..=20 {
            let rad = (c_rad - w_rad + 2.0 * w_rad * a as f64 / 20.0).clamp(0.0, 1.0);
            for b in 0..=20 {
                let th = (c_th - w_th + 2.0 * w_th * b as f64 / 20.0).clamp(0.0, std::f64::consts::PI);
                for c in 0..=20 {
                    let ph = c_ph - w_ph + 2.0 * w_ph * c as f64 / 20.0;
                    let r = point(rad, th, ph);
                    let f = cost(r);
                    if f < bc {
                        bc = f;
                        best = r;
                        (nr, nt, np) = (rad, th, ph);
                    }
                }
            }
        }
        (c_rad, c_th, c_ph) = (nr, nt, np);
        w_rad *= 0.6;
        w_th *= 0.6;
        w_ph *= 0.6;
    }
    best
}

/// Nearest density matrix by Dykstra alternating projections between the PSD cone
/// (negative eigenvalues clipped) and the unit-trace hyperplane.
pub fn dykstra_density_oracle(target: &CMat) -> CMat {
    let d = target.dim();
    let id = CMat::identity(d);
    let mut x = target.clone();
    let mut p = CMat::zeros(d);
    let mut q = CMat::zeros(d);
    for _ in 0..200_000 {
        let (vals, vecs) = (&x + &p).eigh();
        let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
        let y = CMat::from_eigen(&clipped, &vecs);
        p = &(&x + &p) - &y;
        let yq = &y + &q;
        let shift = (yq.trace().re - 1.0) / d as f64;
        let xn = &yq - &id.scale_re(shift);
        q = &yq - &xn;
        let step = (&xn - &x).frobenius();
        x = xn;
        if step < 1e-14 {
            break;
        }
    }
    x
}

pub fn random_state<R: Rng>(d: usize, rank: usize, rng: &mut R) -> CMat {
    let mut m = CMat::zeros(d);
    for _ in 0..rank {
        let v: Vec<C64> = (0..d).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        m = &m + &CMat::outer(&v, &v);
    }
    let t = m.trace().re;
    m.scale_re(1.0 / t)
}

/// Pauli vector of a random state plus noise, re-drawn until its linear state is not PSD.
pub fn unphysical_vector<R: Rng>(k: usize, rng: &mut R) -> PauliVector {
    loop {
        let rho = random_state(1 << k, 1, rng);
        let strings = surface7::code::PauliString::all(k);
        let mut vals: Vec<f64> = strings.iter().map(|s| (&rho * &s.matrix()).trace().re).collect();
        for v in vals.iter_mut().skip(1) {
            *v += 0.3 * (rng.random::<f64>() - 0.5);
        }
        let p = PauliVector::new(k, vals).unwrap();
        if p.linear_state().eigh().0[0] < -1e-3 {
            return p;
        }
    }
}

pub fn random_unitary<R: Rng>(rng: &mut R) -> CMat {
    let a = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let b = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let t = (1.0 - 2.0 * rng.random::<f64>()).acos();
    &(&gates::rz(a) * &gates::rot(t, std::f64::consts::FRAC_PI_2)) * &gates::rz(b)
}

/// Random physical PTM: unitary, then depolarizing and amplitude-damping mixtures.
pub fn random_physical_ptm<R: Rng>(rng: &mut R) -> Ptm {
    let u = Ptm::from_unitary(&random_unitary(rng));
    let p = rng.random::<f64>();
    let g = rng.random::<f64>() * 0.5;
    // amplitude damping with decay g: x,y scale √(1−g), z ↦ (1−g) z + g
    let mut ad = [[0.0; 4]; 4];
    ad[0][0] = 1.0;
    ad[1][1] = (1.0 - g).sqrt();
    ad[2][2] = (1.0 - g).sqrt();
    ad[3][3] = 1.0 - g;
    ad[3][0] = g;
    let mut r = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let uu: f64 = (0..4).map(|k| ad[i][k] * u.0[k][j]).sum();
            r[i][j] = (1.0 - p) * uu + if i == 0 && j == 0 { p } else { 0.0 };
        }
    }
    Ptm(r)
}

pub fn ptm_mul(a: &Ptm, b: &Ptm) -> Ptm {
    let mut r = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = (0..4).map(|k| a.0[i][k] * b.0[k][j]).sum();
        }
    }
    Ptm(r)
}
