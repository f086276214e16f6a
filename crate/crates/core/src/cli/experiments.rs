//! One function per subcommand. Each returns its files, a JSON result digest and the
//! lines printed on success.

use super::svg::{heatmap, line_plot, Series};
use super::{AxisChoice, Mode, RunConfig};
use crate::calibration::*;
use crate::circuits::*;
use crate::error::{Error, Result};
use crate::experiments::*;
use crate::noise::{DeviceParams, NoiseModel, SITE_NAMES};
use crate::tomography::{cardinal_preps, logical_process_tomography, write_ptm_csv, ProcessTomo, Ptm, TomoMode};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Ratio of the pipelined detection rate the ablation report compares against.
pub const GAMMA_TARGET: f64 = 0.45;

#[derive(Debug, Default)]
pub struct Outcome {
    /// (file name, contents), written in this order.
    pub files: Vec<(String, Vec<u8>)>,
    pub results: serde_json::Value,
    pub report: Vec<String>,
}

impl Outcome {
    fn csv<F: FnOnce(&mut Vec<u8>) -> Result<()>>(&mut self, name: &str, f: F) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.files.push((name.into(), buf));
        Ok(())
    }
    fn text(&mut self, name: &str, s: String) {
        self.files.push((name.into(), s.into_bytes()));
    }
}

fn write_rows<T: Serialize>(buf: &mut Vec<u8>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn device(cfg: &RunConfig) -> Result<DeviceParams> {
    let d = DeviceParams::resolve(&cfg.device)?;
    for w in &d.warnings {
        eprintln!("warning: {w}");
    }
    Ok(d)
}

fn model(cfg: &RunConfig) -> Result<NoiseModel> {
    NoiseModel::new(cfg.noise, device(cfg)?, cfg.l1)
}

fn tomo_mode(cfg: &RunConfig) -> TomoMode {
    match (cfg.mode, cfg.seed) {
        (Mode::Sampled, Some(seed)) => TomoMode::Sampled { shots: cfg.shots, seed },
        _ => TomoMode::Exact,
    }
}

fn prep_for(state: &str) -> Result<Prep> {
    cardinal_preps()
        .into_iter()
        .find(|(n, _)| *n == state)
        .map(|(_, p)| p)
        .ok_or_else(|| Error::Param(format!("unknown state {state:?}")))
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.experiment.as_str() {
        "init-suite" => init_suite(cfg),
        "measure-sweep" => measure_sweep(cfg),
        "gate-tomo" => gate_tomo(cfg),
        "stabilize" => stabilize(cfg),
        "compare-schemes" => schemes(cfg),
        "ablation" => ablation(cfg),
        "fit" => fit(cfg),
        "calibrate-zz" => calibrate_zz(cfg),
        "leakage-estimate" => leakage_estimate(cfg),
        "summary" => summary(cfg),
        e => Err(Error::Param(format!("unknown experiment {e:?}"))),
    }
}

fn init_suite(cfg: &RunConfig) -> Result<Outcome> {
    let rows = run_cardinal_init_suite(&model(cfg)?, cfg.single_scheme()?, tomo_mode(cfg))?;
    let mut o = Outcome::default();
    o.csv("init.csv", |b| write_init_csv(b, &rows))?;
    let idx = |f: fn(&InitRow) -> f64| rows.iter().enumerate().map(|(i, r)| (i as f64, f(r))).collect();
    o.text(
        "init.svg",
        line_plot(
            "Initialization fidelities",
            "row of init.csv",
            "fidelity",
            &[Series::dots("F_4Q", idx(|r| r.f4q)), Series::dots("F_L", idx(|r| r.fl))],
        ),
    );
    o.report.push("state  variant  F_4Q      F_L       P".into());
    for r in &rows {
        o.report.push(format!(
            "{:<6} {:<8} {:.6}  {:.6}  {:.6}",
            r.state,
            if r.fault_tolerant { "FT" } else { "non-FT" },
            r.f4q,
            r.fl,
            r.post_selected
        ));
    }
    o.results = json!({ "rows": rows });
    Ok(o)
}

fn sweep_specs(cfg: &RunConfig) -> Result<Vec<(&'static str, SweepSpec)>> {
    let s = cfg.single_scheme()?;
    let mut v = Vec::new();
    if matches!(cfg.axis, AxisChoice::Phi | AxisChoice::Both) {
        v.push(("fig2c", SweepSpec::equatorial(cfg.points, s)));
    }
    if matches!(cfg.axis, AxisChoice::Theta | AxisChoice::Both) {
        v.push(("fig2e", SweepSpec::polar(cfg.points, s)));
    }
    Ok(v)
}

#[derive(Serialize)]
struct ReadoutRow {
    sweep: &'static str,
    basis: char,
    amplitude: f64,
    fidelity: f64,
}

fn sweep_svg(name: &str, spec: &SweepSpec, res: &SweepResult) -> String {
    let mut series = Vec::new();
    for b in ['X', 'Y', 'Z'] {
        let pts: Vec<&SweepPoint> = res.points.iter().filter(|p| p.basis == b).collect();
        series.push(Series::dots(format!("<{b}_L>"), pts.iter().map(|p| (p.angle, p.expectation)).collect()));
        series.push(Series::line(format!("<{b}_L> ideal"), pts.iter().map(|p| (p.angle, p.ideal_expectation)).collect()));
    }
    let pz: Vec<(f64, f64)> = res.points.iter().filter(|p| p.basis == 'Z').map(|p| (p.angle, p.post_selected)).collect();
    series.push(Series::dots("P", pz));
    let axis = match spec.axis {
        SweepAxis::Phi => "phi (rad)",
        SweepAxis::Theta => "theta (rad)",
    };
    line_plot(&format!("{name}: logical readout sweep"), axis, "expectation / P", &series)
}

fn run_sweeps(cfg: &RunConfig, m: &NoiseModel, o: &mut Outcome) -> Result<Vec<(&'static str, SweepResult)>> {
    let mut out = Vec::new();
    let mut readout = Vec::new();
    for (name, spec) in sweep_specs(cfg)? {
        let res = run_logical_measurement_sweeps(&spec, m)?;
        o.csv(&format!("{name}.csv"), |b| write_sweep_csv(b, &res))?;
        o.text(&format!("{name}.svg"), sweep_svg(name, &spec, &res));
        for r in &res.readout {
            readout.push(ReadoutRow { sweep: name, basis: r.basis, amplitude: r.amplitude, fidelity: r.fidelity });
        }
        out.push((name, res));
    }
    o.csv("readout.csv", |b| write_rows(b, &readout))?;
    for r in &readout {
        o.report.push(format!("{} {}_L  F_L^R = {:.6}  (amplitude {:.6})", r.sweep, r.basis, r.fidelity, r.amplitude));
    }
    Ok(out)
}

fn measure_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let m = model(cfg)?;
    let mut o = Outcome::default();
    let res = run_sweeps(cfg, &m, &mut o)?;
    let digest: Vec<_> = res.iter().map(|(n, r)| json!({ "sweep": n, "mean_fl": r.mean_fl, "readout": r.readout })).collect();
    o.results = json!({ "sweeps": digest });
    Ok(o)
}

fn file_label(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

#[derive(Serialize)]
struct GateRow {
    gate: String,
    fault_tolerant: bool,
    fidelity: f64,
    mean_post_selected: f64,
}

fn ptm_rows(p: &Ptm) -> Vec<Vec<f64>> {
    p.0.iter().map(|r| r.to_vec()).collect()
}

fn run_gates(cfg: &RunConfig, m: &NoiseModel, o: &mut Outcome) -> Result<Vec<ProcessTomo>> {
    let scheme = cfg.single_scheme()?;
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for g in cfg.parsed_gates()? {
        let pt = logical_process_tomography(&g, m, scheme, tomo_mode(cfg))?;
        let f = file_label(&pt.gate);
        o.csv(&format!("ptm_{f}.csv"), |b| write_ptm_csv(b, &pt.projected))?;
        o.csv(&format!("ptm_{f}_raw.csv"), |b| write_ptm_csv(b, &pt.raw))?;
        let labels = ["I", "X", "Y", "Z"];
        o.text(&format!("ptm_{f}.svg"), heatmap(&format!("{} logical PTM (out x in)", pt.gate), &labels, &labels, &ptm_rows(&pt.projected)));
        o.report.push(format!("{}  F_L^G = {:.6}", pt.gate, pt.fidelity));
        rows.push(GateRow {
            gate: pt.gate.clone(),
            fault_tolerant: g.fault_tolerant(),
            fidelity: pt.fidelity,
            mean_post_selected: pt.post_selected.iter().sum::<f64>() / pt.post_selected.len() as f64,
        });
        out.push(pt);
    }
    o.csv("gates.csv", |b| write_rows(b, &rows))?;
    Ok(out)
}

fn gate_tomo(cfg: &RunConfig) -> Result<Outcome> {
    let m = model(cfg)?;
    let mut o = Outcome::default();
    let pts = run_gates(cfg, &m, &mut o)?;
    let digest: Vec<_> = pts.iter().map(|p| json!({ "gate": p.gate, "fidelity": p.fidelity, "ptm": p.projected.0 })).collect();
    o.results = json!({ "gates": digest });
    Ok(o)
}

/// `scheme,cycle,post_selected_fraction,shots,expectation`; the first three columns
/// follow the decay schema, so a single-scheme file feeds `fit` directly.
#[derive(Serialize)]
struct DecayOut {
    scheme: &'static str,
    cycle: usize,
    post_selected_fraction: f64,
    shots: Option<u64>,
    expectation: f64,
}

fn stabilize(cfg: &RunConfig) -> Result<Outcome> {
    let m = model(cfg)?;
    let prep = prep_for(&cfg.state)?;
    let basis = cfg.parsed_basis()?;
    let mut o = Outcome::default();
    let mut all = Vec::new();
    let mut decay = Vec::new();
    let mut fits = Vec::new();
    let (mut exp_series, mut p_series) = (Vec::new(), Vec::new());
    let mut envelope = None;
    for (k, s) in cfg.scheme.schemes().into_iter().enumerate() {
        let (rec, rows) = run_stabilization(&m, s, &prep, basis, cfg.cycles)?;
        let exact = rec.post_selected(basis);
        let p = match (cfg.mode, cfg.seed) {
            (Mode::Sampled, Some(seed)) => sample_post_selected(&rec, basis, cfg.shots, &mut crate::seeded_rng(seed, k as u64))?,
            _ => exact,
        };
        let shots = (cfg.mode == Mode::Sampled).then_some(cfg.shots);
        for (r, &pp) in rows.iter().zip(&p) {
            decay.push(DecayOut { scheme: s.name(), cycle: r.n, post_selected_fraction: pp, shots, expectation: r.expectation });
        }
        let fit = if p.len() >= 3 && p.iter().all(|x| *x > 0.0) { Some(fit_series(&p)?) } else { None };
        match &fit {
            Some(f) => o.report.push(format!("{}: gamma = {:.6}, A = {:.6}", s.name(), f.gamma, f.amplitude)),
            None => o.report.push(format!("{}: too few cycles for a decay fit", s.name())),
        }
        o.report.push(format!("  n  P(n)      <{}_L>", basis_char(basis)));
        for (r, pp) in rows.iter().zip(&p) {
            o.report.push(format!("  {:<2} {:.6}  {:+.6}", r.n, pp, r.expectation));
        }
        fits.push(json!({ "scheme": s.name(), "fit": fit, "post_selected": p }));
        exp_series.push(Series::dots(format!("<{}_L> {}", basis_char(basis), s.name()), rows.iter().map(|r| (r.time_ns * 1e-3, r.expectation)).collect()));
        p_series.push(Series::dots(format!("P(n) {}", s.name()), rows.iter().zip(&p).map(|(r, pp)| (r.n as f64, *pp)).collect()));
        if envelope.is_none() {
            envelope = Some((
                Series::line("exp(-t/T1) min", rows.iter().map(|r| (r.time_ns * 1e-3, r.excited_t1_min)).collect()),
                Series::line("exp(-t/T1) max", rows.iter().map(|r| (r.time_ns * 1e-3, r.excited_t1_max)).collect()),
            ));
        }
        all.extend(rows);
    }
    if let Some((a, b)) = envelope {
        exp_series.push(a);
        exp_series.push(b);
    }
    o.csv("fig4c.csv", |b| write_stabilize_csv(b, &all))?;
    o.csv("fig4d.csv", |b| write_rows(b, &decay))?;
    o.text("fig4c.svg", line_plot("Logical observable under repeated stabilization", "time (us)", "expectation", &exp_series));
    o.text("fig4d.svg", line_plot("Post-selected fraction", "cycle n", "P(n)", &p_series));
    o.results = json!({ "state": cfg.state, "basis": cfg.basis, "schemes": fits });
    Ok(o)
}

fn schemes(cfg: &RunConfig) -> Result<Outcome> {
    let cmp = compare_schemes(cfg.cycles, &model(cfg)?)?;
    let mut o = Outcome::default();
    o.csv("figS3.csv", |b| write_schemes_csv(b, &cmp))?;
    let pts = |f: fn(&SchemeRow) -> f64| cmp.rows.iter().enumerate().map(|(i, r)| (i as f64, f(r))).collect();
    o.text(
        "figS3.svg",
        line_plot("Detection rate per scheme", "input state (0, 1, +, -)", "gamma", &[Series::dots("pipelined", pts(|r| r.gamma_pip)), Series::dots("parallel", pts(|r| r.gamma_par))]),
    );
    o.report.push("state  gamma_pip  gamma_par  ratio".into());
    for r in &cmp.rows {
        let ratio = r.ratio.map_or("n/a".to_string(), |x| format!("{x:.4}"));
        o.report.push(format!("{:<6} {:.6}   {:.6}   {ratio}", r.state, r.gamma_pip, r.gamma_par));
    }
    o.report.push(match cmp.mean_ratio {
        Some(x) => format!("mean gamma_pip/gamma_par = {x:.4}"),
        None => "mean gamma_pip/gamma_par undefined (gamma_par = 0)".into(),
    });
    o.results = json!(cmp);
    Ok(o)
}

fn curve_series(curves: &[AblationCurve], label: impl Fn(&AblationCurve) -> String) -> Vec<Series> {
    curves
        .iter()
        .map(|c| Series::line(label(c), c.post_selected.iter().enumerate().map(|(k, p)| ((k + 1) as f64, *p)).collect()))
        .collect()
}

fn ablation(cfg: &RunConfig) -> Result<Outcome> {
    let ab = run_model_ablation(&device(cfg)?, &cfg.l1_grid, cfg.cycles, cfg.single_scheme()?)?;
    let mut o = Outcome::default();
    o.csv("figS5a.csv", |b| write_ablation_models_csv(b, &ab))?;
    o.csv("figS5b.csv", |b| write_ablation_l1_csv(b, &ab))?;
    o.text("figS5a.svg", line_plot("P(n) per noise model", "cycle n", "P(n)", &curve_series(&ab.models, |c| format!("model {} (gamma {:.3})", c.level, c.gamma))));
    o.text("figS5b.svg", line_plot("P(n) with leakage", "cycle n", "P(n)", &curve_series(&ab.leakage, |c| format!("L1 {} (gamma {:.3})", c.l1, c.gamma))));
    let mut rep = vec!["model  L1      gamma".to_string()];
    for c in ab.models.iter().chain(&ab.leakage) {
        rep.push(format!("{:<6} {:<7} {:.6}", c.level, if c.level == 5 { format!("{}", c.l1) } else { "-".into() }, c.gamma));
    }
    rep.push(String::new());
    for c in &ab.leakage {
        rep.push(format!("target gamma {GAMMA_TARGET:.2}: L1 = {} gives gamma = {:.4} (difference {:+.4})", c.l1, c.gamma, c.gamma - GAMMA_TARGET));
    }
    if let Some(c) = closest_l1(&ab, GAMMA_TARGET) {
        rep.push(format!("closest to target: L1 = {} (gamma = {:.4})", c.l1, c.gamma));
    }
    o.text("report.txt", rep.join("\n") + "\n");
    o.report = rep;
    o.results = json!({
        "models": ab.models.iter().map(|c| json!({ "level": c.level, "gamma": c.gamma })).collect::<Vec<_>>(),
        "leakage": ab.leakage.iter().map(|c| json!({ "l1": c.l1, "gamma": c.gamma })).collect::<Vec<_>>(),
        "gamma_target": GAMMA_TARGET,
    });
    Ok(o)
}

#[derive(Serialize)]
struct FitRow {
    amplitude: f64,
    gamma: f64,
    residual: f64,
    points: usize,
}

fn read_file(p: &std::path::Path) -> Result<std::fs::File> {
    std::fs::File::open(p).map_err(|e| Error::Param(format!("cannot open {}: {e}", p.display())))
}

fn fit(cfg: &RunConfig) -> Result<Outcome> {
    let path = cfg.input.as_deref().ok_or_else(|| Error::Param("fit needs --input".into()))?;
    let rows = read_decay_csv(read_file(path)?)?;
    let f = fit_rows(&rows)?;
    let mut o = Outcome::default();
    o.csv("fit.csv", |b| write_rows(b, &[FitRow { amplitude: f.amplitude, gamma: f.gamma, residual: f.residual, points: rows.len() }]))?;
    let data: Vec<(f64, f64)> = rows.iter().map(|r| (r.cycle as f64, r.post_selected_fraction)).collect();
    let model_curve = data.iter().map(|(n, _)| (*n, f.predict(*n))).collect();
    o.text("fit.svg", line_plot("Detection-rate fit", "cycle n", "P(n)", &[Series::dots("data", data), Series::line("A(1-gamma)^n", model_curve)]));
    o.report.push(format!("gamma = {:.6}  A = {:.6}  residual = {:.3e}  ({} points)", f.gamma, f.amplitude, f.residual, rows.len()));
    o.results = json!({ "fit": f, "points": rows.len() });
    Ok(o)
}

#[derive(Serialize)]
struct CzRow {
    check: &'static str,
    ancilla: &'static str,
    data: &'static str,
    phi01: f64,
    phi10: f64,
    phi11: f64,
    residual: f64,
}

fn calibrate_zz(cfg: &RunConfig) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut out = Vec::new();
    let m = if cfg.input.is_none() { Some(model(cfg)?) } else { None };
    for check in cfg.parsed_checks()? {
        let sys = match (&cfg.input, &m) {
            (Some(p), _) => {
                let mut sys = RamseySystem::for_check(check);
                let phases = read_phase_csv(read_file(p)?)?;
                if phases.len() != sys.rows() {
                    return Err(Error::Param(format!("{} needs {} Ramsey phases, got {}", check.name(), sys.rows(), phases.len())));
                }
                sys.phi_ram = phases;
                sys
            }
            (None, Some(m)) => {
                let sys = generate_ramsey_phases(check, m)?;
                o.csv(&format!("ramsey_{}.csv", check.name()), |b| write_phase_csv(b, &sys.phi_ram))?;
                sys
            }
            (None, None) => unreachable!("model built when no input is given"),
        };
        let sol = solve_cz_phases(&sys)?;
        let fitted = sys.forward(&sol.x);
        let idx = |v: &[f64]| v.iter().enumerate().map(|(i, x)| (i as f64, *x)).collect();
        o.text(
            &format!("ramsey_{}.svg", check.name()),
            line_plot(&format!("{} Ramsey phases", check.name()), "row index", "phase (rad)", &[Series::dots("measured", idx(&sys.phi_ram)), Series::dots("model", idx(&fitted))]),
        );
        o.report.push(format!("{}: residual {:.3e}", check.name(), sol.residual));
        for (&d, p) in check.data().iter().zip(unknowns_to_phases(&sol.x)) {
            let a = SITE_NAMES[check.ancilla()];
            o.report.push(format!("  {a}-{}  phi01 {:.6}  phi10 {:.6}  phi11 {:.6}", SITE_NAMES[d], p.phi01, p.phi10, p.phi11));
            out.push(CzRow { check: check.name(), ancilla: a, data: SITE_NAMES[d], phi01: p.phi01, phi10: p.phi10, phi11: p.phi11, residual: sol.residual });
        }
    }
    o.csv("cz_phases.csv", |b| write_rows(b, &out))?;
    o.results = json!({ "cz": out });
    Ok(o)
}

/// `state,voltage` calibration shots, state ∈ {0, 1, 2}.
#[derive(Serialize, Deserialize)]
pub struct CalibrationRow {
    pub state: usize,
    pub voltage: f64,
}

#[derive(Serialize)]
struct LeakRow {
    cycle: usize,
    p_leak: f64,
    p_declared: f64,
}

/// Synthetic readout: state means 0, 1, 2 (arbitrary units) with σ = 0.25.
pub fn demo_voltage_components(p_leak: f64) -> [Gaussian; 3] {
    let rest = (1.0 - p_leak) / 2.0;
    [
        Gaussian { mean: 0.0, sigma: 0.25, weight: rest },
        Gaussian { mean: 1.0, sigma: 0.25, weight: rest },
        Gaussian { mean: 2.0, sigma: 0.25, weight: p_leak },
    ]
}

/// Two-state chain for `transmon`: CZs per cycle in which it is the leaking partner, the
/// scheme's cycle time and its T1. Both partners are taken as half excited on average.
pub fn markov_chain(dev: &DeviceParams, scheme: Scheme, transmon: &str) -> MarkovLeak {
    let cycle = build_cycle(CycleOptions::new(scheme));
    let cz = cycle
        .instrs
        .iter()
        .filter(|i| matches!(i.kind, Kind::Cz { .. }))
        .filter(|i| dev.leaker(SITE_NAMES[i.sites[0]], SITE_NAMES[i.sites[1]]) == transmon)
        .count();
    MarkovLeak { cz_per_cycle: cz as f64, neighbour_factor: 0.25, cycle_ns: cycle.period_ns as f64, t1_us: dev.transmon(transmon).t1_us }
}

fn leakage_estimate(cfg: &RunConfig) -> Result<Outcome> {
    let dev = device(cfg)?;
    let chain = markov_chain(&dev, cfg.single_scheme()?, &cfg.transmon);
    let mut o = Outcome::default();
    let mut truth = None;
    let shots = match &cfg.input {
        Some(p) => read_voltage_csv(read_file(p)?)?,
        None => {
            let seed = cfg.seed.ok_or_else(|| Error::Param("synthetic leakage data needs --seed".into()))?;
            let mut rng = crate::seeded_rng(seed, 0);
            let series = chain.series(cfg.l1, cfg.cycles);
            let data = series
                .iter()
                .enumerate()
                .map(|(k, &p)| Ok((k + 1, VoltageModel::new(demo_voltage_components(p))?.sample(cfg.shots as usize, &mut rng)?)))
                .collect::<Result<Vec<_>>>()?;
            o.csv("voltages.csv", |b| write_voltage_csv(b, &data))?;
            truth = Some(series);
            data
        }
    };
    let calib = match &cfg.calibration {
        Some(p) => {
            let mut c: [Vec<f64>; 3] = Default::default();
            for row in csv::Reader::from_reader(read_file(p)?).deserialize::<CalibrationRow>() {
                let row = row?;
                c.get_mut(row.state).ok_or_else(|| Error::Param(format!("calibration state {} (0, 1, 2)", row.state)))?.push(row.voltage);
            }
            Some(c)
        }
        None => None,
    };
    let est = estimate_leakage(&shots, calib.as_ref())?;
    let rows: Vec<LeakRow> = est.cycles.iter().zip(est.p_leak.iter().zip(&est.p_declared)).map(|(&c, (&a, &b))| LeakRow { cycle: c, p_leak: a, p_declared: b }).collect();
    o.csv("leakage.csv", |b| write_rows(b, &rows))?;
    let consecutive = est.cycles.iter().enumerate().all(|(i, &c)| c == i + 1);
    let l1 = if consecutive { estimate_l1_markov(&est.p_leak, &chain) } else { Err(Error::Param("cycles are not 1..=N".into())) };
    let mut series = vec![
        Series::dots("p_leak (EM)", rows.iter().map(|r| (r.cycle as f64, r.p_leak)).collect()),
        Series::dots("p_declared (threshold)", rows.iter().map(|r| (r.cycle as f64, r.p_declared)).collect()),
    ];
    if let Ok(e) = &l1 {
        series.push(Series::line(format!("Markov, L1 = {:.4}", e.l1), chain.series(e.l1, rows.len()).into_iter().enumerate().map(|(k, p)| ((k + 1) as f64, p)).collect()));
    }
    o.text("leakage.svg", line_plot(&format!("Leaked population of {}", cfg.transmon), "cycle n", "p_leak", &series));
    o.report.push("cycle  p_leak    p_declared".into());
    for r in &rows {
        o.report.push(format!("{:<6} {:.6}  {:.6}", r.cycle, r.p_leak, r.p_declared));
    }
    if est.low_confidence {
        o.report.push(format!("warning: |1>/|2> separation {:.2} sigma is below {CONFIDENCE_SEPARATION}; estimates are low confidence", est.model.separation()));
    }
    match &l1 {
        Ok(e) => o.report.push(format!("L1 estimate (two-state Markov chain): {:.5}  residual {:.3e}", e.l1, e.residual)),
        Err(e) => o.report.push(format!("L1 estimate unavailable: {e}")),
    }
    o.results = json!({
        "transmon": cfg.transmon,
        "p_leak": est.p_leak,
        "p_declared": est.p_declared,
        "low_confidence": est.low_confidence,
        "voltage_model": est.model,
        "chain": chain,
        "l1_estimate": l1.as_ref().ok(),
        "l1_note": l1.as_ref().err().map(|e| e.to_string()),
        "synthetic_truth": truth,
    });
    Ok(o)
}

fn summary(cfg: &RunConfig) -> Result<Outcome> {
    let m = model(cfg)?;
    let mut o = Outcome::default();
    let init = run_cardinal_init_suite(&m, cfg.single_scheme()?, tomo_mode(cfg))?;
    o.csv("init.csv", |b| write_init_csv(b, &init))?;
    let mut c = cfg.clone();
    c.axis = AxisChoice::Both;
    let sweeps = run_sweeps(&c, &m, &mut o)?;
    let gates = run_gates(cfg, &m, &mut o)?;
    let rows = summary_rows(&init, &sweeps[0].1, &sweeps[1].1, &gates);
    o.csv("summary.csv", |b| write_summary_csv(b, &rows))?;
    o.report.push("section      operation  characteristic  metric  simulated  reference".into());
    for r in &rows {
        o.report.push(format!("{:<12} {:<10} {:<15} {:<7} {:.4}     {:.4}", r.section, r.operation, r.characteristic, r.metric, r.simulated, r.reference));
    }
    o.results = json!({ "summary": rows });
    Ok(o)
}

