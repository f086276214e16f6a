//! CSV writers for the figure analogues and the summary table.

use super::*;
use crate::error::Result;
use crate::tomography::ProcessTomo;
use serde::Serialize;
use std::io::Write;

fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_init_csv<W: Write>(w: W, rows: &[InitRow]) -> Result<()> {
    write_rows(w, rows)
}

/// `angle_rad,basis,expectation,post_selected,ideal_expectation,ideal_post_selected`
pub fn write_sweep_csv<W: Write>(w: W, res: &SweepResult) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        angle_rad: f64,
        basis: char,
        expectation: f64,
        post_selected: f64,
        ideal_expectation: f64,
        ideal_post_selected: f64,
    }
    let rows: Vec<Row> = res
        .points
        .iter()
        .map(|p| Row {
            angle_rad: p.angle,
            basis: p.basis,
            expectation: p.expectation,
            post_selected: p.post_selected,
            ideal_expectation: p.ideal_expectation,
            ideal_post_selected: p.ideal_post_selected,
        })
        .collect();
    write_rows(w, &rows)
}

/// `scheme,n,time_ns,expectation,post_selected,excited_t1_min,excited_t1_max`
pub fn write_stabilize_csv<W: Write>(w: W, rows: &[StabilizeRow]) -> Result<()> {
    write_rows(w, rows)
}

/// `state,gamma_pip,gamma_par,ratio`
pub fn write_schemes_csv<W: Write>(w: W, cmp: &SchemeComparison) -> Result<()> {
    write_rows(w, &cmp.rows)
}

#[derive(Serialize)]
struct CurveRow {
    model: u8,
    l1: f64,
    n: usize,
    post_selected_fraction: f64,
    gamma: f64,
}

fn curve_rows(curves: &[AblationCurve]) -> Vec<CurveRow> {
    curves
        .iter()
        .flat_map(|c| {
            c.post_selected.iter().enumerate().map(move |(k, &p)| CurveRow {
                model: c.level,
                l1: c.l1,
                n: k + 1,
                post_selected_fraction: p,
                gamma: c.gamma,
            })
        })
        .collect()
}

/// Models 0–4: `model,l1,n,post_selected_fraction,gamma`
pub fn write_ablation_models_csv<W: Write>(w: W, ab: &Ablation) -> Result<()> {
    write_rows(w, &curve_rows(&ab.models))
}

/// Model 5 over L1, same columns.
pub fn write_ablation_l1_csv<W: Write>(w: W, ab: &Ablation) -> Result<()> {
    write_rows(w, &curve_rows(&ab.leakage))
}

/// One row of the summary table.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct SummaryRow {
    pub section: String,
    pub operation: String,
    pub characteristic: String,
    pub metric: String,
    pub simulated: f64,
    /// Reference value from the experiment, percent as a fraction.
    pub reference: f64,
}

fn row(section: &str, op: &str, ch: &str, metric: &str, sim: f64, reference: f64) -> SummaryRow {
    SummaryRow {
        section: section.into(),
        operation: op.into(),
        characteristic: ch.into(),
        metric: metric.into(),
        simulated: sim,
        reference,
    }
}

/// Rows for initialization, measurement and gates. `equatorial` supplies X and Y, `polar`
/// Z and X (X is the mean of both); `gates` are matched by label.
pub fn summary_rows(
    init: &[InitRow],
    equatorial: &SweepResult,
    polar: &SweepResult,
    gates: &[ProcessTomo],
) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    let fl = |s: &str, ft: bool| init.iter().find(|r| r.state == s && r.fault_tolerant == ft).map(|r| r.fl);
    let init_ref = [("0", true, 0.9983), ("1", true, 0.9997), ("+", false, 0.9702), ("+", true, 0.9978), ("-", false, 0.9554), ("-", true, 0.9964)];
    for (s, ft, r) in init_ref {
        if let Some(v) = fl(s, ft) {
            let op = format!("|{s}_L>");
            out.push(row("init", &op, if ft { "FT" } else { "non-FT" }, "F_L", v, r));
        }
    }
    let fr = |res: &SweepResult, b: char| res.readout.iter().find(|r| r.basis == b).map(|r| r.fidelity);
    if let Some(z) = fr(polar, 'Z') {
        out.push(row("measurement", "Z_L", "FT", "F_L^R", z, 0.994));
    }
    let xs: Vec<f64> = [fr(equatorial, 'X'), fr(polar, 'X')].into_iter().flatten().collect();
    if !xs.is_empty() {
        out.push(row("measurement", "X_L", "FT", "F_L^R", xs.iter().sum::<f64>() / xs.len() as f64, 0.960));
    }
    if let Some(y) = fr(equatorial, 'Y') {
        out.push(row("measurement", "Y_L", "non-FT", "F_L^R", y, 0.875));
    }
    let gate_ref = [("ZL", "Z_L", "FT", 0.981), ("XL", "X_L", "FT", 0.979), ("XL90", "X_L^pi/2", "non-FT", 0.956), ("TL", "T_L", "non-FT", 0.973)];
    for (label, op, ft, r) in gate_ref {
        if let Some(g) = gates.iter().find(|g| g.gate == label) {
            out.push(row("gate", op, ft, "F_L^G", g.fidelity, r));
        }
    }
    out
}

pub fn write_summary_csv<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    write_rows(w, rows)
}

pub fn read_summary_csv<R: std::io::Read>(r: R) -> Result<Vec<SummaryRow>> {
    Ok(csv::Reader::from_reader(r).deserialize().collect::<std::result::Result<_, _>>()?)
}
