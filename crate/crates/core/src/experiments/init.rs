use crate::circuits::*;
use crate::code::cardinal;
use crate::error::Result;
use crate::noise::NoiseModel;
use crate::tomography::{characterize, TomoMode};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitRow {
    pub state: &'static str,
    pub fault_tolerant: bool,
    pub f4q: f64,
    pub fl: f64,
    /// Post-selected fraction of the preparation round.
    pub post_selected: f64,
    pub codespace_weight: f64,
}

/// Preparations of the init suite: angles for 0, 1, ±, then the product-state FT ± variants.
pub fn init_preps() -> Vec<(&'static str, bool, Prep)> {
    let a = |t: f64, p: f64| Prep::Angles(PrepAngles { theta: t, phi: p });
    vec![
        ("0", true, a(0.0, 0.0)),
        ("1", true, a(PI, 0.0)),
        ("+", false, a(FRAC_PI_2, 0.0)),
        ("-", false, a(FRAC_PI_2, PI)),
        ("+", true, Prep::FtPlus),
        ("-", true, Prep::FtMinus),
    ]
}

/// Preparation, one stabilizer round, four-qubit tomography and codespace projection.
pub fn run_cardinal_init_suite(model: &NoiseModel, scheme: Scheme, mode: TomoMode) -> Result<Vec<InitRow>> {
    init_preps()
        .into_par_iter()
        .enumerate()
        .map(|(k, (state, ft, prep))| {
            let mut r = Runner::new(model, CycleOptions::new(scheme))?;
            r.prep(&prep)?;
            r.cycle()?;
            let target = cardinal::all().iter().find(|(n, _)| *n == state).expect("cardinal").1;
            let t = characterize(&r.data_state()?, target, None, mode, 100 + k as u64)?;
            Ok(InitRow {
                state,
                fault_tolerant: ft,
                f4q: t.f4q,
                fl: t.fl,
                post_selected: r.ex.prob,
                codespace_weight: t.codespace_weight,
            })
        })
        .collect()
}
