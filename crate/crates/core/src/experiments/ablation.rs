use crate::calibration::fit_series;
use crate::circuits::*;
use crate::code::LogicalPauli;
use crate::error::Result;
use crate::noise::{DeviceParams, NoiseModel};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationCurve {
    pub level: u8,
    pub l1: f64,
    pub post_selected: Vec<f64>,
    pub gamma: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ablation {
    /// Models 0 to 4.
    pub models: Vec<AblationCurve>,
    /// Model 5, one curve per L1.
    pub leakage: Vec<AblationCurve>,
}

impl Ablation {
    pub fn model(&self, level: u8) -> Option<&AblationCurve> {
        self.models.iter().find(|c| c.level == level)
    }
}

/// |0_L⟩ stabilized for `cycles` rounds under Models 0–4 and Model 5 at each L1.
pub fn run_model_ablation(device: &DeviceParams, l1_grid: &[f64], cycles: usize, scheme: Scheme) -> Result<Ablation> {
    let jobs: Vec<(u8, f64)> = (0..5u8).map(|l| (l, 0.0)).chain(l1_grid.iter().map(|&x| (5, x))).collect();
    let prep = Prep::Angles(PrepAngles { theta: 0.0, phi: 0.0 });
    let curves: Vec<AblationCurve> = jobs
        .par_iter()
        .map(|&(level, l1)| {
            let model = NoiseModel::new(level, device.clone(), l1)?;
            let rec = run_detection(&DetectionSpec::new(prep.clone(), scheme, cycles), &model)?;
            let p = rec.post_selected(LogicalPauli::Z);
            let f = fit_series(&p)?;
            Ok(AblationCurve { level, l1, post_selected: p, gamma: f.gamma, amplitude: f.amplitude })
        })
        .collect::<Result<_>>()?;
    let (models, leakage) = curves.into_iter().partition(|c| c.level < 5);
    Ok(Ablation { models, leakage })
}

/// Smallest |γ − target| over the Model 5 curves.
pub fn closest_l1(ab: &Ablation, target: f64) -> Option<&AblationCurve> {
    ab.leakage.iter().min_by(|a, b| (a.gamma - target).abs().total_cmp(&(b.gamma - target).abs()))
}
