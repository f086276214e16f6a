use crate::circuits::*;
use crate::code::{logical_fidelity, project_to_codespace, LogicalPauli};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Theta,
    Phi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    /// The angle held fixed (φ for a θ sweep and vice versa).
    pub fixed: f64,
    pub bases: Vec<LogicalPauli>,
    pub scheme: Scheme,
}

impl SweepSpec {
    /// θ = π/2, φ on `n` equally spaced points in [0, 2π).
    pub fn equatorial(n: usize, scheme: Scheme) -> Self {
        SweepSpec {
            axis: SweepAxis::Phi,
            grid: (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
            fixed: FRAC_PI_2,
            bases: LogicalPauli::ALL.to_vec(),
            scheme,
        }
    }

    /// φ = 0, θ on `n` points spanning [0, π].
    pub fn polar(n: usize, scheme: Scheme) -> Self {
        SweepSpec {
            axis: SweepAxis::Theta,
            grid: (0..n).map(|k| PI * k as f64 / (n - 1).max(1) as f64).collect(),
            fixed: 0.0,
            bases: LogicalPauli::ALL.to_vec(),
            scheme,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.bases.is_empty() {
            return Err(Error::Param("sweep needs a grid and at least one basis".into()));
        }
        if self.grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Param("sweep grid must be sorted".into()));
        }
        for &g in &self.grid {
            self.angles(g)?;
        }
        Ok(())
    }

    pub fn angles(&self, g: f64) -> Result<PrepAngles> {
        match self.axis {
            SweepAxis::Theta => PrepAngles::new(g, self.fixed),
            SweepAxis::Phi => PrepAngles::new(self.fixed, g),
        }
    }
}

/// Ideal ⟨O_L⟩ of the prepared state.
pub fn ideal_expectation(a: PrepAngles, basis: LogicalPauli) -> f64 {
    let (c2, s2) = a.c2_s2();
    let n = c2 * c2 + s2 * s2;
    match basis {
        LogicalPauli::Z => (c2 * c2 - s2 * s2) / n,
        LogicalPauli::X => 2.0 * c2 * s2 * a.phi.cos() / n,
        LogicalPauli::Y => 2.0 * c2 * s2 * a.phi.sin() / n,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub angle: f64,
    pub basis: char,
    pub expectation: f64,
    pub post_selected: f64,
    pub ideal_expectation: f64,
    pub ideal_post_selected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReadoutFidelity {
    pub basis: char,
    /// Least-squares amplitude of the measured curve against the ideal one.
    pub amplitude: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Mean logical fidelity of the prepared states.
    pub mean_fl: f64,
    pub readout: Vec<ReadoutFidelity>,
}

/// Preparation, one stabilizer round and a logical readout in each basis, per grid point.
/// F_L^R follows (2F_L^R − 1)(2F_L − 1) = amplitude for every basis whose ideal curve is
/// not identically zero.
pub fn run_logical_measurement_sweeps(spec: &SweepSpec, model: &NoiseModel) -> Result<SweepResult> {
    spec.validate()?;
    let per: Vec<(Vec<SweepPoint>, f64)> = spec
        .grid
        .par_iter()
        .map(|&g| {
            let a = spec.angles(g)?;
            let mut r = Runner::new(model, CycleOptions::new(spec.scheme))?;
            r.prep(&Prep::Angles(a))?;
            r.cycle()?;
            let (l, _) = project_to_codespace(&r.data_state()?.qubit_restriction()?.0.to_cmat())?;
            let fl = logical_fidelity(&l, a.logical_amplitudes());
            let pts = spec
                .bases
                .iter()
                .map(|&b| {
                    let ro = r.readout(b)?;
                    Ok(SweepPoint {
                        angle: g,
                        basis: basis_char(b),
                        expectation: ro.expectation,
                        post_selected: r.ex.prob * ro.accept,
                        ideal_expectation: ideal_expectation(a, b),
                        ideal_post_selected: a.projection_probability(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((pts, fl))
        })
        .collect::<Result<_>>()?;
    let mean_fl = per.iter().map(|p| p.1).sum::<f64>() / per.len() as f64;
    let points: Vec<SweepPoint> = per.into_iter().flat_map(|p| p.0).collect();
    let mut readout = Vec::new();
    for &b in &spec.bases {
        let c = basis_char(b);
        let (num, den) = points
            .iter()
            .filter(|p| p.basis == c)
            .fold((0.0, 0.0), |(n, d), p| (n + p.expectation * p.ideal_expectation, d + p.ideal_expectation.powi(2)));
        if den < 1e-9 {
            continue;
        }
        let amplitude = num / den;
        let fidelity = 0.5 * (amplitude / (2.0 * mean_fl - 1.0) + 1.0);
        readout.push(ReadoutFidelity { basis: c, amplitude, fidelity });
    }
    Ok(SweepResult { points, mean_fl, readout })
}
