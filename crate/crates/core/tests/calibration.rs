use proptest::prelude::*;
use std::f64::consts::{PI, TAU};
use surface7::calibration::*;
use surface7::circuits::Check;
use surface7::engine::Povm;
use surface7::noise::{CzPhases, NoiseModel, SITE_NAMES};
use surface7::seeded_rng;

fn circ(a: f64, b: f64) -> f64 {
    ((a - b + PI).rem_euclid(TAU) - PI).abs()
}

#[test]
fn decay_fit_examples() {
    let p: Vec<f64> = (1..=12).map(|n| 0.95 * 0.6f64.powi(n)).collect();
    let f = fit_series(&p).unwrap();
    assert!((f.amplitude - 0.95).abs() / 0.95 < 1e-9 && (f.gamma - 0.4).abs() / 0.4 < 1e-9);
    let f = fit_series(&[0.5; 6]).unwrap();
    assert!(f.gamma.abs() < 1e-12 && (f.amplitude - 0.5).abs() < 1e-12);
    assert!(fit_series(&[0.5, 0.0, 0.2]).is_err());
    assert!(fit_series(&[0.5, -0.1, 0.2]).is_err());
    assert!(fit_series(&[0.5, 0.4]).is_err());
    assert!(f.predict(3.0) > 0.0);
}

#[test]
fn decay_csv_round_trip_and_weights() {
    let rows: Vec<DecayRow> = (1..=6)
        .map(|n| DecayRow { cycle: n, post_selected_fraction: 0.8 * 0.7f64.powi(n as i32), shots: Some(1000 * n as u64) })
        .collect();
    let mut buf = Vec::new();
    write_decay_csv(&mut buf, &rows).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("cycle,post_selected_fraction,shots"));
    let back = read_decay_csv(buf.as_slice()).unwrap();
    assert_eq!(back, rows);
    let f = fit_rows(&back).unwrap();
    assert!((f.gamma - 0.3).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_exponentials_are_recovered(a in 0.05f64..1.0, g in 0.0f64..0.9, n in 3usize..20) {
        let p: Vec<f64> = (1..=n).map(|k| a * (1.0 - g).powi(k as i32)).collect();
        let f = fit_series(&p).unwrap();
        prop_assert!((f.amplitude - a).abs() / a < 1e-9);
        prop_assert!((f.gamma - g).abs() <= 1e-9 * g.max(1e-3));
        // fitted curve is nonincreasing
        prop_assert!(f.predict(2.0) <= f.predict(1.0) + 1e-15);
    }

    #[test]
    fn wrapped_residual_is_zero_in_column_space(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 11);
        let mut sys = RamseySystem::for_check(Check::Z24);
        let x: Vec<f64> = (0..5).map(|_| rand::Rng::random::<f64>(&mut rng) * TAU).collect();
        sys.phi_ram = sys.forward(&x);
        let sol = solve_cz_phases(&sys).unwrap();
        prop_assert!(sol.residual <= 1e-10);
        prop_assert!(sol.x.iter().all(|v| (0.0..TAU).contains(v)));
    }
}

#[test]
fn parity_benchmark_matches_enumeration() {
    let mut rng = seeded_rng(1, 0);
    let m = NoiseModel::noiseless();
    for c in Check::ALL {
        let b = parity_benchmark(c, &m, None, &mut rng).unwrap();
        assert_eq!(b.rows.len(), 1 << c.data().len());
        assert!((b.average - 1.0).abs() < 1e-12, "{}", b.check);
    }
    // readout error only: the ancilla sits in |parity⟩, so P(correct) = P(parity|parity)
    for eps in [0.01, 0.07] {
        let m = NoiseModel::noiseless().with_assignment(Povm::symmetric(eps)).unwrap();
        for c in Check::ALL {
            let b = parity_benchmark(c, &m, Some(BENCH_SHOTS), &mut rng).unwrap();
            for r in &b.rows {
                let oracle = Povm::symmetric(eps).p[r.parity as usize][r.parity as usize];
                assert!((r.p_correct - oracle).abs() < 1e-12, "{} {}", b.check, r.input);
                let s = r.sampled.unwrap();
                assert!((s - oracle).abs() < 5.0 * (oracle * (1.0 - oracle) / BENCH_SHOTS as f64).sqrt() + 1e-9);
            }
            assert!((b.average - (1.0 - eps)).abs() < 1e-12);
        }
    }
}

#[test]
fn ramsey_design_shape() {
    for (c, k) in [(Check::Z13, 3), (Check::X1234, 5), (Check::Z24, 3)] {
        let s = RamseySystem::for_check(c);
        assert_eq!(s.rows(), k * (1 << (k - 1)));
        assert!(s.a.iter().flatten().all(|&x| x <= 1));
        assert!(null_space(&s).is_empty());
    }
}

#[test]
fn ramsey_ideal_and_shifted_rows() {
    let m = NoiseModel::noiseless();
    for c in Check::ALL {
        let sys = generate_ramsey_phases(c, &m).unwrap();
        let ideal = vec![CzPhases::IDEAL; c.data().len()];
        let want = sys.forward(&phases_to_unknowns(&ideal));
        for (i, (g, w)) in sys.phi_ram.iter().zip(&want).enumerate() {
            assert!(circ(*g, *w) < 1e-9, "{} row {}: {g} vs {w}", c.name(), sys.row_labels[i]);
        }
    }
    // φ01 = 0.05 on A1-D1: D1 rows with A1 in |0⟩ move by +0.05, A1 rows with D1 in |1⟩ by −0.05
    let base = generate_ramsey_phases(Check::Z13, &m).unwrap();
    let m2 = m.with_cz_phases(("A1", "D1"), CzPhases { phi01: 0.05, phi10: 0.0, phi11: PI }).unwrap();
    let shifted = generate_ramsey_phases(Check::Z13, &m2).unwrap();
    for (i, label) in base.row_labels.iter().enumerate() {
        let (q, bits) = label.split_once('|').unwrap();
        let d = ((shifted.phi_ram[i] - base.phi_ram[i] + PI).rem_euclid(TAU)) - PI;
        let bits: Vec<char> = bits.chars().collect();
        let want = match q {
            "D1" if bits[0] == '0' => 0.05,
            "A1" if bits[1] == '1' => -0.05,
            _ => 0.0,
        };
        assert!((d - want).abs() < 1e-9, "{label}: {d}");
    }
}

#[test]
fn solver_examples() {
    // identity design
    let sys = RamseySystem {
        a: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        phi_ram: vec![0.3, 6.2, 3.0],
        row_labels: vec![],
        unknown_labels: vec![],
    };
    let s = solve_cz_phases(&sys).unwrap();
    assert!(s.x.iter().zip(&sys.phi_ram).all(|(a, b)| (a - b).abs() < 1e-12));

    // forward-generated k = 3 system
    let mut rng = seeded_rng(3, 3);
    let mut sys = RamseySystem::for_check(Check::Z13);
    let x: Vec<f64> = (0..5).map(|_| rand::Rng::random::<f64>(&mut rng) * TAU).collect();
    sys.phi_ram = sys.forward(&x);
    let s = solve_cz_phases(&sys).unwrap();
    assert!(s.x.iter().zip(&x).all(|(a, b)| circ(*a, *b) < 1e-8));
    assert!(s.residual < 1e-10);

    // noisy rows: every component within 3σ over 100 trials
    let sigma = 0.01;
    let normal = rand_distr::Normal::new(0.0, sigma).unwrap();
    for t in 0..100 {
        let mut r = seeded_rng(100 + t, 7);
        let mut noisy = sys.clone();
        for p in &mut noisy.phi_ram {
            *p = (*p + rand_distr::Distribution::sample(&normal, &mut r)).rem_euclid(TAU);
        }
        let s = solve_cz_phases(&noisy).unwrap();
        assert!(s.x.iter().zip(&x).all(|(a, b)| circ(*a, *b) < 3.0 * sigma), "trial {t}");
    }

    // rank deficient
    let sys = RamseySystem {
        a: vec![vec![1, 1], vec![1, 1], vec![1, 1]],
        phi_ram: vec![0.1, 0.1, 0.1],
        row_labels: vec![],
        unknown_labels: vec![],
    };
    let e = solve_cz_phases(&sys).unwrap_err();
    assert!(matches!(e, surface7::Error::RankDeficient(ref s) if s.contains("null space")));
    assert_eq!(null_space(&sys).len(), 1);
}

#[test]
fn ramsey_closed_loop() {
    let mut rng = seeded_rng(42, 1);
    for c in Check::ALL {
        let mut m = NoiseModel::noiseless();
        let mut injected = Vec::new();
        for &d in c.data() {
            let mut r = || rand::Rng::random::<f64>(&mut rng) * TAU;
            let p = CzPhases { phi01: r(), phi10: r(), phi11: r() };
            m = m.with_cz_phases((SITE_NAMES[c.ancilla()], SITE_NAMES[d]), p).unwrap();
            injected.push(p);
        }
        let sys = generate_ramsey_phases(c, &m).unwrap();
        let sol = solve_cz_phases(&sys).unwrap();
        let want = phases_to_unknowns(&injected);
        for (a, b) in sol.x.iter().zip(&want) {
            assert!(circ(*a, *b) < 1e-6, "{}: {a} vs {b}", c.name());
        }
        // the solved per-CZ phases reproduce the same rows
        let again = phases_to_unknowns(&unknowns_to_phases(&sol.x));
        assert!(again.iter().zip(&sol.x).all(|(a, b)| circ(*a, *b) < 1e-9));
    }
}

#[test]
fn phase_csv_round_trip() {
    let v = vec![0.1, 3.2, 6.0];
    let mut buf = Vec::new();
    write_phase_csv(&mut buf, &v).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("row_index,phase_rad"));
    assert_eq!(read_phase_csv(buf.as_slice()).unwrap(), v);
}

fn well_separated(w2: f64) -> VoltageModel {
    VoltageModel::new([
        Gaussian { mean: 0.0, sigma: 0.1, weight: 0.5 * (1.0 - w2) },
        Gaussian { mean: 1.0, sigma: 0.1, weight: 0.5 * (1.0 - w2) },
        Gaussian { mean: 1.5, sigma: 0.1, weight: w2 },
    ])
    .unwrap()
}

fn calib_shots(m: &VoltageModel, n: usize, seed: u64) -> [Vec<f64>; 3] {
    let mut r = seeded_rng(seed, 99);
    std::array::from_fn(|k| {
        let mut g = m.components;
        for (j, c) in g.iter_mut().enumerate() {
            c.weight = if j == k { 1.0 } else { 0.0 };
        }
        VoltageModel::new(g).unwrap().sample(n, &mut r).unwrap()
    })
}

#[test]
fn leakage_estimates() {
    let mut rng = seeded_rng(8, 0);
    for (w2, tol) in [(0.0, 0.005), (0.10, 0.01)] {
        let m = well_separated(w2);
        let shots = vec![(1, m.sample(10_000, &mut rng).unwrap())];
        let est = estimate_leakage(&shots, Some(&calib_shots(&m, 2000, 1))).unwrap();
        assert!((est.p_leak[0] - w2).abs() < tol, "{w2}: {}", est.p_leak[0]);
        assert!(!est.low_confidence);
        // k-means can only label three populations when all three are present
        if w2 > 0.0 {
            let km = estimate_leakage(&shots, None).unwrap();
            assert!((km.p_leak[0] - w2).abs() < tol, "k-means {w2}: {}", km.p_leak[0]);
        }
    }
    // |1⟩ and |2⟩ one σ apart
    let m = VoltageModel::new([
        Gaussian { mean: 0.0, sigma: 0.2, weight: 0.45 },
        Gaussian { mean: 1.0, sigma: 0.2, weight: 0.45 },
        Gaussian { mean: 1.2, sigma: 0.2, weight: 0.10 },
    ])
    .unwrap();
    assert!(m.low_confidence());
    let shots = vec![(1, m.sample(10_000, &mut rng).unwrap())];
    let est = estimate_leakage(&shots, Some(&calib_shots(&m, 2000, 2))).unwrap();
    assert!(est.low_confidence);
    assert!(estimate_leakage(&[(1, vec![0.0; 10])], None).is_err());
}

#[test]
fn leakage_estimate_is_consistent() {
    let m = well_separated(0.1);
    let cal = calib_shots(&m, 5000, 3);
    let rms: Vec<f64> = [1_000usize, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let e2: f64 = (0..8)
                .map(|t| {
                    let mut r = seeded_rng(n as u64, t);
                    let shots = vec![(1, m.sample(n, &mut r).unwrap())];
                    (estimate_leakage(&shots, Some(&cal)).unwrap().p_leak[0] - 0.1).powi(2)
                })
                .sum::<f64>()
                / 8.0;
            e2.sqrt()
        })
        .collect();
    for w in rms.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 10f64.sqrt() / 3.0 && ratio < 10f64.sqrt() * 3.0, "{rms:?}");
    }
}

#[test]
fn voltage_csv_round_trip() {
    let shots = vec![(0, vec![0.1, 0.2]), (3, vec![1.5])];
    let mut buf = Vec::new();
    write_voltage_csv(&mut buf, &shots).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("cycle,voltage"));
    assert_eq!(read_voltage_csv(buf.as_slice()).unwrap(), shots);
}

#[test]
fn markov_l1_recovery() {
    let chain = MarkovLeak { cz_per_cycle: 2.0, neighbour_factor: 1.0, cycle_ns: 840.0, t1_us: 20.0 };
    let truth = chain.series(0.02, 15);
    let est = estimate_l1_markov(&truth, &chain).unwrap();
    assert!((est.l1 - 0.02).abs() < 0.002 && est.residual < 1e-9);
    // mild observation noise
    let mut rng = seeded_rng(5, 5);
    let noisy: Vec<f64> = truth.iter().map(|p| p + 0.002 * (rand::Rng::random::<f64>(&mut rng) - 0.5)).collect();
    assert!((estimate_l1_markov(&noisy, &chain).unwrap().l1 - 0.02).abs() < 0.002);
    assert_eq!(estimate_l1_markov(&[0.0; 10], &chain).unwrap().l1, 0.0);
    assert!(estimate_l1_markov(&[0.05; 10], &chain).is_err());
    let none = MarkovLeak { cz_per_cycle: 0.0, ..chain };
    assert!(estimate_l1_markov(&truth, &none).is_err());
}
