use crate::calibration::fit_series;
use crate::circuits::*;
use crate::code::LogicalPauli;
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, SITE_NAMES};
use crate::tomography::cardinal_preps;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizeRow {
    pub scheme: &'static str,
    pub n: usize,
    pub time_ns: f64,
    pub expectation: f64,
    pub post_selected: f64,
    /// e^{−t/T1} for the shortest and longest T1 on the device.
    pub excited_t1_min: f64,
    pub excited_t1_max: f64,
}

/// Repeated stabilization of `prep` read out in `basis`, n = 1..=cycles, for one scheme.
pub fn run_stabilization(
    model: &NoiseModel,
    scheme: Scheme,
    prep: &Prep,
    basis: LogicalPauli,
    cycles: usize,
) -> Result<(ExperimentRecord, Vec<StabilizeRow>)> {
    let mut spec = DetectionSpec::new(prep.clone(), scheme, cycles);
    spec.bases = vec![basis];
    let rec = run_detection(&spec, model)?;
    let t1s: Vec<f64> = SITE_NAMES.iter().map(|s| model.device.transmon(s).t1_us * 1e3).collect();
    let (lo, hi) = t1s.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    let rows = rec
        .cycles
        .iter()
        .map(|c| {
            let b = c.basis(basis).expect("recorded basis");
            StabilizeRow {
                scheme: scheme.name(),
                n: c.n,
                time_ns: c.time_ns,
                expectation: b.expectation,
                post_selected: b.post_selected,
                excited_t1_min: (-c.time_ns / lo).exp(),
                excited_t1_max: (-c.time_ns / hi).exp(),
            }
        })
        .collect();
    Ok((rec, rows))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeRow {
    pub state: &'static str,
    pub gamma_pip: f64,
    pub gamma_par: f64,
    /// γ_pip/γ_par, absent when γ_par vanishes.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeComparison {
    pub rows: Vec<SchemeRow>,
    pub mean_ratio: Option<f64>,
}

impl SchemeComparison {
    pub fn row(&self, state: &str) -> Option<&SchemeRow> {
        self.rows.iter().find(|r| r.state == state)
    }
}

/// γ for both schemes on the same model, for |0_L⟩, |1_L⟩ (read in Z) and |±_L⟩ (read in X).
pub fn compare_schemes(n_max: usize, model: &NoiseModel) -> Result<SchemeComparison> {
    if n_max < 5 {
        return Err(Error::Param(format!("n_max = {n_max}, need at least 5")));
    }
    let preps = cardinal_preps();
    let jobs: Vec<(&'static str, Prep, LogicalPauli, Scheme)> = preps[..4]
        .iter()
        .flat_map(|(name, p)| {
            let b = if name.contains('+') || name.contains('-') { LogicalPauli::X } else { LogicalPauli::Z };
            Scheme::ALL.into_iter().map(move |s| (*name, p.clone(), b, s))
        })
        .collect();
    let gammas: Vec<f64> = jobs
        .par_iter()
        .map(|(_, p, b, s)| {
            let (rec, _) = run_stabilization(model, *s, p, *b, n_max)?;
            Ok(fit_series(&rec.post_selected(*b))?.gamma)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SchemeRow> = jobs
        .chunks(2)
        .zip(gammas.chunks(2))
        .map(|(j, g)| SchemeRow {
            state: j[0].0,
            gamma_pip: g[0],
            gamma_par: g[1],
            ratio: (g[1].abs() > 1e-12).then(|| g[0] / g[1]),
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let mean_ratio = (ratios.len() == rows.len()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
    Ok(SchemeComparison { rows, mean_ratio })
}
