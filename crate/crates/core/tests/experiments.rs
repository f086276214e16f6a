use std::f64::consts::PI;
use surface7::circuits::*;
use surface7::code::LogicalPauli;
use surface7::experiments::*;
use surface7::noise::{DeviceParams, NoiseModel};
use surface7::seeded_rng;
use surface7::tomography::{logical_process_tomography, TomoMode};

fn model(level: u8) -> NoiseModel {
    NoiseModel::new(level, DeviceParams::table_s1(), 0.0).unwrap()
}

#[test]
fn init_suite_noiseless_and_model1() {
    for r in run_cardinal_init_suite(&NoiseModel::noiseless(), Scheme::Pipelined, TomoMode::Exact).unwrap() {
        assert!((r.f4q - 1.0).abs() < 1e-9 && (r.fl - 1.0).abs() < 1e-9, "{r:?}");
    }
    let rows = run_cardinal_init_suite(&model(1), Scheme::Pipelined, TomoMode::Exact).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!(r.fl > r.f4q, "{r:?}");
    }
}

#[test]
fn sweeps_noiseless() {
    let m = NoiseModel::noiseless();
    let eq = run_logical_measurement_sweeps(&SweepSpec::equatorial(8, Scheme::Pipelined), &m).unwrap();
    assert!((eq.mean_fl - 1.0).abs() < 1e-9);
    for r in &eq.readout {
        assert!((r.fidelity - 1.0).abs() < 1e-9, "{r:?}");
    }
    assert!(eq.points.iter().all(|p| (p.post_selected - 0.25).abs() < 1e-12));
    let pol = run_logical_measurement_sweeps(&SweepSpec::polar(9, Scheme::Parallel), &m).unwrap();
    for p in &pol.points {
        let (c, s) = ((p.angle / 2.0).cos(), (p.angle / 2.0).sin());
        assert!((p.post_selected - 0.5 * (c.powi(4) + s.powi(4))).abs() < 1e-9);
        assert!((p.expectation - p.ideal_expectation).abs() < 1e-9);
    }
    let bad = SweepSpec { grid: vec![1.0, 0.5], ..SweepSpec::polar(3, Scheme::Pipelined) };
    assert!(bad.validate().is_err());
    let out = SweepSpec { grid: vec![4.0], ..SweepSpec::polar(3, Scheme::Pipelined) };
    assert!(out.validate().is_err());
}

#[test]
fn scheme_comparison() {
    let c = compare_schemes(5, &NoiseModel::noiseless()).unwrap();
    assert!(c.rows.iter().all(|r| r.gamma_pip.abs() < 1e-12 && r.gamma_par.abs() < 1e-12 && r.ratio.is_none()));
    assert!(c.mean_ratio.is_none());
    let c = compare_schemes(6, &model(1)).unwrap();
    assert!(c.rows.iter().all(|r| r.gamma_pip < r.gamma_par));
    assert!(compare_schemes(4, &model(1)).is_err());
}

#[test]
fn ablation_orders() {
    let ab = run_model_ablation(&DeviceParams::table_s1(), &[0.01, 0.02, 0.05, 0.08], 8, Scheme::Pipelined).unwrap();
    let m0 = ab.model(0).unwrap();
    assert!(m0.post_selected.iter().all(|p| (p - 0.5).abs() < 1e-12) && m0.gamma.abs() < 1e-12);
    let g4 = ab.model(4).unwrap().gamma;
    let g5 = ab.leakage.iter().find(|c| c.l1 == 0.05).unwrap().gamma;
    assert!(g4 < g5);
    assert!(ab.leakage.windows(2).all(|w| w[1].gamma > w[0].gamma));
    assert!(closest_l1(&ab, 0.45).is_some());
}

#[test]
fn stabilization_rows_and_envelope() {
    let prep = Prep::Angles(PrepAngles::new(0.0, 0.0).unwrap());
    let (rec, rows) = run_stabilization(&model(1), Scheme::Parallel, &prep, LogicalPauli::Z, 5).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1].time_ns > w[0].time_ns && w[1].post_selected < w[0].post_selected));
    assert!(rows.iter().all(|r| r.excited_t1_min <= r.excited_t1_max && r.expectation.abs() <= 1.0 + 1e-9));
    // the time axis advances by one cycle period per round
    assert!((rows[1].time_ns - rows[0].time_ns - rec.cycle_ns as f64).abs() < 1e-9);
}

#[test]
fn sampled_post_selection_matches_exact() {
    let prep = Prep::Angles(PrepAngles::new(0.0, 0.0).unwrap());
    let (rec, _) = run_stabilization(&model(3), Scheme::Pipelined, &prep, LogicalPauli::Z, 6).unwrap();
    let exact = rec.post_selected(LogicalPauli::Z);
    let shots = 10_000u64;
    let mut rng = seeded_rng(17, 0);
    let draws: Vec<Vec<f64>> =
        (0..20).map(|_| sample_post_selected(&rec, LogicalPauli::Z, shots, &mut rng).unwrap()).collect();
    for (n, &p) in exact.iter().enumerate() {
        let mean = draws.iter().map(|d| d[n]).sum::<f64>() / draws.len() as f64;
        let se = (p * (1.0 - p) / (shots as f64 * draws.len() as f64)).sqrt();
        assert!((mean - p).abs() < 3.0 * se, "n={n}: {mean} vs {p}");
    }
}

#[test]
fn outputs_are_deterministic() {
    let run = || {
        let mut buf = Vec::new();
        let r = run_logical_measurement_sweeps(&SweepSpec::equatorial(4, Scheme::Pipelined), &model(3)).unwrap();
        write_sweep_csv(&mut buf, &r).unwrap();
        let prep = Prep::Angles(PrepAngles::new(PI / 2.0, 0.0).unwrap());
        let (_, rows) = run_stabilization(&model(3), Scheme::Pipelined, &prep, LogicalPauli::X, 3).unwrap();
        write_stabilize_csv(&mut buf, &rows).unwrap();
        buf
    };
    assert_eq!(run(), run());
    let mut rng_a = seeded_rng(5, 1);
    let mut rng_b = seeded_rng(5, 1);
    let prep = Prep::Angles(PrepAngles::new(0.0, 0.0).unwrap());
    let (rec, _) = run_stabilization(&model(1), Scheme::Pipelined, &prep, LogicalPauli::Z, 3).unwrap();
    assert_eq!(
        sample_post_selected(&rec, LogicalPauli::Z, 1000, &mut rng_a).unwrap(),
        sample_post_selected(&rec, LogicalPauli::Z, 1000, &mut rng_b).unwrap()
    );
}

#[test]
fn summary_has_every_table_row() {
    let m = NoiseModel::noiseless();
    let init = run_cardinal_init_suite(&m, Scheme::Pipelined, TomoMode::Exact).unwrap();
    let eq = run_logical_measurement_sweeps(&SweepSpec::equatorial(4, Scheme::Pipelined), &m).unwrap();
    let pol = run_logical_measurement_sweeps(&SweepSpec::polar(5, Scheme::Pipelined), &m).unwrap();
    let gates: Vec<_> = [LogicalGate::ZL, LogicalGate::XL, LogicalGate::XTheta(PI / 2.0), LogicalGate::t()]
        .iter()
        .map(|g| logical_process_tomography(g, &m, Scheme::Pipelined, TomoMode::Exact).unwrap())
        .collect();
    let rows = summary_rows(&init, &eq, &pol, &gates);
    assert_eq!(rows.len(), 13);
    assert!(rows.iter().all(|r| (r.simulated - 1.0).abs() < 1e-6 && r.reference > 0.8 && r.reference < 1.0));
    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &rows).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("section,operation,characteristic,metric,simulated,reference"));
    assert_eq!(read_summary_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn config_hash_is_stable() {
    #[derive(serde::Serialize)]
    struct C {
        a: u8,
        b: f64,
    }
    let h = config_hash(&C { a: 1, b: 0.5 });
    assert_eq!(h.len(), 64);
    assert_eq!(h, config_hash(&C { a: 1, b: 0.5 }));
    assert_ne!(h, config_hash(&C { a: 2, b: 0.5 }));
}
