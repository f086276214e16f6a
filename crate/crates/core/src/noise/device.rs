//! Device parameter table (JSON). Units are in the field names.

use crate::engine::Povm;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SITE_NAMES: [&str; 7] = ["D1", "D2", "D3", "D4", "A1", "A2", "A3"];

const TABLE_S1: &str = include_str!("../../data/device_table_s1.json");
const EXAMPLE: &str = include_str!("../../data/device_example.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transmon {
    pub name: String,
    pub freq_ghz: f64,
    pub anharmonicity_mhz: Option<f64>,
    pub readout_freq_ghz: f64,
    pub t1_us: f64,
    pub t2_star_us: f64,
    pub t2_echo_us: f64,
    pub readout_fidelity_pct: f64,
    /// D_φ at the CZ interaction point, GHz/Φ₀.
    #[serde(default)]
    pub flux_sensitivity_cz_ghz_per_phi0: f64,
    /// D_φ at the parking point, GHz/Φ₀.
    #[serde(default)]
    pub flux_sensitivity_park_ghz_per_phi0: f64,
    #[serde(default)]
    pub residual_excitation: f64,
    /// Full P(i|j) override; otherwise symmetric errors from the readout fidelity.
    #[serde(default)]
    pub assignment: Option<Povm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZzCoupling {
    pub a: String,
    pub b: String,
    pub khz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    pub transmons: Vec<Transmon>,
    pub flux_noise_sqrt_a_uphi0: f64,
    /// Entry [a, b]: the CZ between a and b leaks `b` (via |20⟩) instead of the
    /// higher-frequency transmon.
    #[serde(default)]
    pub leak_to_partner: Vec<[String; 2]>,
    #[serde(default)]
    pub zz_khz: Vec<ZzCoupling>,
    #[serde(default)]
    pub note: String,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl DeviceParams {
    /// Published table only; flux sensitivities, p_e and ZZ are zero.
    pub fn table_s1() -> Self {
        Self::from_json_str(TABLE_S1).expect("bundled table parses")
    }

    /// Published table plus the illustrative Model 2–4 profile.
    pub fn example_profile() -> Self {
        Self::from_json_str(EXAMPLE).expect("bundled profile parses")
    }

    /// `builtin:table-s1`, `builtin:example`, or a path.
    pub fn resolve(spec: &str) -> Result<Self> {
        match spec {
            "builtin:table-s1" => Ok(Self::table_s1()),
            "builtin:example" => Ok(Self::example_profile()),
            path => Self::load(path),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let mut d: DeviceParams = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }

    /// Checks ranges. An echo T2 above 2·T1 (true of D1 in the published table) is
    /// clamped to 2·T1, i.e. zero pure dephasing, and noted in `warnings`.
    pub fn validate(&mut self) -> Result<()> {
        for name in SITE_NAMES {
            if !self.transmons.iter().any(|t| t.name == name) {
                return Err(Error::Param(format!("device table lacks transmon {name}")));
            }
        }
        for t in &mut self.transmons {
            if !(t.t1_us > 0.0 && t.t2_echo_us > 0.0 && t.t2_star_us > 0.0) {
                return Err(Error::Param(format!("{}: coherence times must be positive", t.name)));
            }
            if t.t2_echo_us > 2.0 * t.t1_us {
                self.warnings.push(format!(
                    "{}: T2 = {} us exceeds 2*T1 = {} us; clamped (no pure dephasing)",
                    t.name,
                    t.t2_echo_us,
                    2.0 * t.t1_us
                ));
                t.t2_echo_us = 2.0 * t.t1_us;
            }
            if !(0.0..=100.0).contains(&t.readout_fidelity_pct) || !(0.0..=1.0).contains(&t.residual_excitation) {
                return Err(Error::Param(format!("{}: probability out of range", t.name)));
            }
            if t.flux_sensitivity_cz_ghz_per_phi0 < 0.0 || t.flux_sensitivity_park_ghz_per_phi0 < 0.0 {
                return Err(Error::Param(format!("{}: negative flux sensitivity", t.name)));
            }
            if let Some(p) = &t.assignment {
                p.validate()?;
            }
        }
        if self.flux_noise_sqrt_a_uphi0 < 0.0 {
            return Err(Error::Param("negative flux-noise amplitude".into()));
        }
        for z in &self.zz_khz {
            for n in [&z.a, &z.b] {
                if !SITE_NAMES.contains(&n.as_str()) {
                    return Err(Error::Param(format!("ZZ entry names unknown transmon {n}")));
                }
            }
        }
        Ok(())
    }

    pub fn transmon(&self, name: &str) -> &Transmon {
        self.transmons.iter().find(|t| t.name == name).expect("validated device has every site")
    }

    /// Sweetspot pure-dephasing rate 1/T_φ^max = 1/T2 − 1/(2T1), in 1/s.
    pub fn sweetspot_dephasing_rate(&self, name: &str) -> f64 {
        let t = self.transmon(name);
        (1.0 / t.t2_echo_us - 0.5 / t.t1_us).max(0.0) * 1e6
    }

    pub fn t1_s(&self, name: &str) -> f64 {
        self.transmon(name).t1_us * 1e-6
    }

    pub fn assignment(&self, name: &str) -> Povm {
        let t = self.transmon(name);
        t.assignment.unwrap_or_else(|| Povm::symmetric(1.0 - t.readout_fidelity_pct / 100.0))
    }

    /// Residual ZZ coupling ξ in Hz (0 when not listed).
    pub fn zz_hz(&self, a: &str, b: &str) -> f64 {
        self.zz_khz
            .iter()
            .find(|z| (z.a == a && z.b == b) || (z.a == b && z.b == a))
            .map_or(0.0, |z| z.khz * 1e3)
    }

    /// The transmon that is fluxed down during a CZ between `a` and `b`.
    pub fn fluxed(&self, a: &str, b: &str) -> String {
        if self.transmon(a).freq_ghz >= self.transmon(b).freq_ghz {
            a.to_string()
        } else {
            b.to_string()
        }
    }

    /// The transmon that can leak to |2⟩ during a CZ between `a` and `b`.
    pub fn leaker(&self, a: &str, b: &str) -> String {
        for [x, y] in &self.leak_to_partner {
            if (x == a && y == b) || (x == b && y == a) {
                return y.clone();
            }
        }
        self.fluxed(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let d = DeviceParams::table_s1();
        assert_eq!(d.transmon("D1").t1_us, 27.0);
        assert_eq!(d.transmon("A2").readout_fidelity_pct, 94.2);
        assert!(d.warnings.iter().any(|w| w.starts_with("D1")));
        assert_eq!(d.warnings.len(), 1);
        let e = DeviceParams::example_profile();
        assert!(e.zz_hz("D1", "A2") > 0.0);
    }

    #[test]
    fn frequency_roles() {
        let d = DeviceParams::table_s1();
        assert_eq!(d.fluxed("A1", "D1"), "D1");
        assert_eq!(d.fluxed("A2", "D4"), "A2");
        assert_eq!(d.leaker("A1", "D3"), "D3");
        assert_eq!(d.leaker("A3", "D4"), "A3");
    }

    #[test]
    fn rejects_bad_values() {
        let mut d = DeviceParams::table_s1();
        d.transmons[0].t1_us = -1.0;
        assert!(d.validate().is_err());
        let mut d = DeviceParams::table_s1();
        d.transmons.pop();
        assert!(d.validate().is_err());
    }
}
