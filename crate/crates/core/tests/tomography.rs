mod common;

use common::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use surface7::circuits::{LogicalGate, Scheme};
use surface7::code::{cardinal, encode, project_to_codespace, LogicalState, PauliString};
use surface7::engine::mat::{gates, CMat};
use surface7::engine::{DensityMatrix, QuditRegister};
use surface7::noise::NoiseModel;
use surface7::seeded_rng;
use surface7::tomography::*;

fn dm(m: &CMat, k: usize) -> DensityMatrix {
    DensityMatrix::from_matrix(QuditRegister::anonymous(vec![2; k]).unwrap(), m).unwrap()
}

#[test]
fn exact_pauli_vectors() {
    let zero = dm(&CMat::diag(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]), 1);
    assert_eq!(pauli_vector_exact(&zero).unwrap().values, vec![1.0, 0.0, 0.0, 1.0]);

    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let bell = dm(&CMat::outer(&[h, z, z, h], &[h, z, z, h]), 2);
    let p = pauli_vector_exact(&bell).unwrap();
    let get = |l: &str| p.values[p.labels().iter().position(|x| x == l).unwrap()];
    assert!((get("XX") - 1.0).abs() < 1e-12 && (get("ZZ") - 1.0).abs() < 1e-12 && (get("YY") + 1.0).abs() < 1e-12);

    let (a, b) = cardinal::zero();
    let v = encode(a, b);
    let p = pauli_vector_exact(&dm(&CMat::outer(&v, &v), 4)).unwrap();
    for s in surface7::code::stabilizers() {
        let i = p.labels().iter().position(|x| *x == s.to_string()).unwrap();
        assert!((p.values[i] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sampled_vector_is_unbiased() {
    let mut rng = seeded_rng(7, 0);
    let rho = random_state(4, 2, &mut rng);
    let exact = pauli_vector_exact(&dm(&rho, 2)).unwrap();
    let s = pauli_vector_sampled(&dm(&rho, 2), 20_000, &mut rng).unwrap();
    let se = s.stderr.as_ref().unwrap();
    for i in 1..16 {
        assert!((s.values[i] - exact.values[i]).abs() < 5.0 * se[i].max(1e-4), "{i}");
    }
}

#[test]
fn mle_examples() {
    // physical input is returned
    let mut rng = seeded_rng(1, 0);
    let rho = random_state(16, 3, &mut rng);
    let p = pauli_vector_exact(&dm(&rho, 4)).unwrap();
    let r = mle_state(&p).unwrap();
    assert!((&r.rho - &rho).frobenius() < 1e-6);
    assert!(r.cost < 1e-12);

    // p = (1,1,1,1) goes to the radial projection
    let r = mle_state(&PauliVector::new(1, vec![1.0; 4]).unwrap()).unwrap();
    let b = pauli_vector_exact(&dm(&r.rho, 1)).unwrap().values;
    let s = 1.0 / 3f64.sqrt();
    assert!(b[1..].iter().all(|x| (x - s).abs() < 1e-10));
    let g = bloch_grid_oracle([1.0, 1.0, 1.0]);
    assert!(g.iter().all(|x| (x - s).abs() < 1e-6));

    // |0_L⟩ with a flipped stabilizer
    let (a, bb) = cardinal::zero();
    let v = encode(a, bb);
    let mut p = pauli_vector_exact(&dm(&CMat::outer(&v, &v), 4)).unwrap();
    let i = p.labels().iter().position(|x| x == "XXXX").unwrap();
    p.values[i] = -1.0;
    let r = mle_state(&p).unwrap();
    assert!(r.rho.eigh().0[0] > -1e-12);
    let (_, w) = project_to_codespace(&r.rho).unwrap();
    assert!(w < 1.0 - 1e-6);
}

#[test]
fn mle_matches_oracles() {
    let mut rng = seeded_rng(2024, 1);
    for _ in 0..50 {
        let p = unphysical_vector(1, &mut rng);
        let r = mle_state(&p).unwrap();
        let g = bloch_grid_oracle([p.values[1], p.values[2], p.values[3]]);
        let o = LogicalState { bloch: g }.rho();
        assert!((&r.rho - &o).frobenius() < 1e-4);
    }
    for _ in 0..10 {
        let p = unphysical_vector(2, &mut rng);
        let r = mle_state(&p).unwrap();
        let o = dykstra_density_oracle(&p.linear_state());
        assert!((&r.rho - &o).frobenius() < 1e-4);
        // idempotence
        let again = mle_state(&pauli_vector_exact(&dm(&r.rho, 2)).unwrap()).unwrap();
        assert!((&again.rho - &r.rho).frobenius() < 1e-8);
    }
}

#[test]
fn ptm_examples() {
    let t = Ptm::from_unitary(&gates::rz(FRAC_PI_4));
    let f = avg_gate_fidelity(&Ptm::identity(), &t);
    assert!((f - (4.0 + 2f64.sqrt()) / 6.0).abs() < 1e-12);
    let mut dep = [[0.0; 4]; 4];
    dep[0][0] = 1.0;
    assert!((avg_gate_fidelity(&Ptm(dep), &Ptm::identity()) - 0.5).abs() < 1e-15);
    assert!((avg_gate_fidelity(&t, &t) - 1.0).abs() < 1e-12);

    // linear inversion of the ideal T mapping
    let u = gates::rz(FRAC_PI_4);
    let (ins, outs): (Vec<_>, Vec<_>) = cardinal::all()
        .iter()
        .map(|(_, (a, b))| {
            let o = (u[(0, 0)] * a, u[(1, 1)] * b);
            (LogicalState::from_amplitudes(*a, *b).bloch, LogicalState::from_amplitudes(o.0, o.1).bloch)
        })
        .unzip();
    let r = lptm_inversion(&ins, &outs).unwrap();
    let h = FRAC_1_SQRT_2;
    assert!((r.0[1][1] - h).abs() < 1e-12 && (r.0[2][1] - h).abs() < 1e-12 && (r.0[3][3] - 1.0).abs() < 1e-12);
    assert!(r.max_abs_diff(&t) < 1e-12);
    assert!(lptm_inversion(&ins, &ins).unwrap().max_abs_diff(&Ptm::identity()) < 1e-12);
    let zeros = vec![[0.0; 3]; 6];
    assert!(lptm_inversion(&ins, &zeros).unwrap().max_abs_diff(&Ptm(dep)) < 1e-12);
    assert!(lptm_inversion(&ins[..2], &outs[..2]).is_err());
}

#[test]
fn tpcp_projection_properties() {
    let mut rng = seeded_rng(5, 5);
    for _ in 0..100 {
        let r = random_physical_ptm(&mut rng);
        assert!(Ptm::from_choi(&r.to_choi()).max_abs_diff(&r) < 1e-12);
        let p = tpcp_project(&r).unwrap();
        assert!(p.ptm.max_abs_diff(&r) < 1e-8);
    }
    let u = Ptm::from_unitary(&random_unitary(&mut rng));
    assert!(tpcp_project(&u).unwrap().ptm.max_abs_diff(&u) < 1e-8);
    let mut dep = [[0.0; 4]; 4];
    dep[0][0] = 1.0;
    assert!(tpcp_project(&Ptm(dep)).unwrap().ptm.max_abs_diff(&Ptm(dep)) < 1e-12);

    for _ in 0..20 {
        let mut r = random_physical_ptm(&mut rng);
        for i in 1..4 {
            for j in 1..4 {
                r.0[i][j] *= 1.5;
            }
        }
        let p = tpcp_project(&r).unwrap();
        let (lo, tp) = choi_violation(&p.choi);
        assert!(lo >= -1e-9 && tp < 1e-8, "{lo} {tp}");
        // idempotent
        assert!(tpcp_project(&p.ptm).unwrap().ptm.max_abs_diff(&p.ptm) < 1e-8);
    }
}

#[test]
fn noiseless_process_tomography() {
    let m = NoiseModel::noiseless();
    for g in [LogicalGate::t(), LogicalGate::XTheta(FRAC_PI_2), LogicalGate::ZL, LogicalGate::XL] {
        let pt = logical_process_tomography(&g, &m, Scheme::Pipelined, TomoMode::Exact).unwrap();
        assert!((pt.fidelity - 1.0).abs() < 1e-6, "{}: {}", g.label(), pt.fidelity);
    }
}

#[test]
fn csv_round_trip() {
    let mut rng = seeded_rng(9, 0);
    let r = random_physical_ptm(&mut rng);
    let mut buf = Vec::new();
    write_ptm_csv(&mut buf, &r).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("out\\in,I,X,Y,Z"));
    let back = read_ptm_csv(buf.as_slice()).unwrap();
    assert!(back.max_abs_diff(&r) < 1e-11);
    let p = PauliVector::new(1, vec![1.0, 0.1, 0.2, 0.3]).unwrap();
    let mut buf = Vec::new();
    write_pauli_csv(&mut buf, &p).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(PauliString::parse("XYZI").is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mle_output_is_physical_and_idempotent(seed in any::<u64>(), k in 1usize..=2) {
        let mut rng = seeded_rng(seed, 3);
        let p = unphysical_vector(k, &mut rng);
        let r = mle_state(&p).unwrap();
        prop_assert!(r.rho.eigh().0[0] > -1e-10);
        prop_assert!((r.rho.trace().re - 1.0).abs() < 1e-10);
        let again = mle_state(&pauli_vector_exact(&dm(&r.rho, k)).unwrap()).unwrap();
        prop_assert!((&again.rho - &r.rho).frobenius() < 1e-8);
    }

    #[test]
    fn tpcp_is_non_expansive(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 4);
        let mut a = random_physical_ptm(&mut rng);
        let mut b = random_physical_ptm(&mut rng);
        for i in 1..4 {
            for j in 0..4 {
                a.0[i][j] *= 1.4;
                b.0[i][j] *= 0.7 + 0.8 * (j as f64) / 4.0;
            }
        }
        let pa = tpcp_project(&a).unwrap().choi;
        let pb = tpcp_project(&b).unwrap().choi;
        prop_assert!((&pa - &pb).frobenius() <= (&a.to_choi() - &b.to_choi()).frobenius() + 1e-9);
    }
}
