//! Error-detection rate from P(n) = A(1−γ)^n.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub amplitude: f64,
    pub gamma: f64,
    /// Weighted RMS residual in log space.
    pub residual: f64,
}

impl DecayFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.amplitude * (1.0 - self.gamma).powf(n)
    }
}

/// Weighted linear fit of ln P against n. `weights` (shot counts, say) default to 1.
pub fn fit_detection_rate(n: &[f64], p: &[f64], weights: Option<&[f64]>) -> Result<DecayFit> {
    if n.len() != p.len() || weights.is_some_and(|w| w.len() != p.len()) {
        return Err(Error::Dimension("series lengths differ".into()));
    }
    if p.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", p.len())));
    }
    if let Some(x) = p.iter().find(|x| !(**x > 0.0 && **x <= 1.0 + 1e-12)) {
        return Err(Error::Fit(format!("P value {x} outside (0, 1]")));
    }
    let w: Vec<f64> = weights.map_or_else(|| vec![1.0; p.len()], |w| w.to_vec());
    let y: Vec<f64> = p.iter().map(|x| x.ln()).collect();
    let sw: f64 = w.iter().sum();
    let mx = n.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = y.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..p.len() {
        sxx += w[i] * (n[i] - mx).powi(2);
        sxy += w[i] * (n[i] - mx) * (y[i] - my);
    }
    if sxx <= 0.0 {
        return Err(Error::Fit("all cycle numbers equal".into()));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let res = (0..p.len()).map(|i| w[i] * (y[i] - icpt - slope * n[i]).powi(2)).sum::<f64>() / sw;
    Ok(DecayFit { amplitude: icpt.exp(), gamma: 1.0 - slope.exp(), residual: res.sqrt() })
}

/// Fit over cycles 1..=len.
pub fn fit_series(p: &[f64]) -> Result<DecayFit> {
    let n: Vec<f64> = (1..=p.len()).map(|k| k as f64).collect();
    fit_detection_rate(&n, p, None)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecayRow {
    pub cycle: usize,
    pub post_selected_fraction: f64,
    pub shots: Option<u64>,
}

pub fn read_decay_csv<R: std::io::Read>(r: R) -> Result<Vec<DecayRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let rows: std::result::Result<Vec<DecayRow>, _> = rd.deserialize().collect();
    Ok(rows?)
}

pub fn write_decay_csv<W: std::io::Write>(w: W, rows: &[DecayRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Fit of a parsed CSV series, weighted by shots when every row has them.
pub fn fit_rows(rows: &[DecayRow]) -> Result<DecayFit> {
    let n: Vec<f64> = rows.iter().map(|r| r.cycle as f64).collect();
    let p: Vec<f64> = rows.iter().map(|r| r.post_selected_fraction).collect();
    let w: Option<Vec<f64>> = rows.iter().map(|r| r.shots.map(|s| s as f64)).collect();
    fit_detection_rate(&n, &p, w.as_deref())
}
