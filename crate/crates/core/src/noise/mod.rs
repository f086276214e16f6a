//! Models 0–5: decoherence, off-sweetspot dephasing, SPAM, ZZ crosstalk, CZ leakage.
//! Each level adds one layer on top of the previous ones.

pub mod device;

use crate::engine::mat::{CMat, ONE};
use crate::engine::{Channel, KrausChannel, Povm};
use crate::error::{Error, Result};
pub use device::{DeviceParams, SITE_NAMES};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// The eight CZ pairs of the device, ancilla first.
pub const CZ_PAIRS: [(&str, &str); 8] = [
    ("A1", "D1"),
    ("A1", "D3"),
    ("A2", "D1"),
    ("A2", "D2"),
    ("A2", "D3"),
    ("A2", "D4"),
    ("A3", "D2"),
    ("A3", "D4"),
];

/// Amplitude damping with survival η = e^{−t/T1}. On a qutrit this is the bosonic loss
/// channel, so |2⟩ relaxes at twice the rate of |1⟩.
pub fn amplitude_damping_kraus(d: usize, eta: f64) -> Vec<CMat> {
    let g = 1.0 - eta;
    let c = |x: f64| C64::new(x, 0.0);
    match d {
        2 => {
            let k0 = CMat::diag(&[ONE, c(eta.sqrt())]);
            let mut k1 = CMat::zeros(2);
            k1[(0, 1)] = c(g.sqrt());
            vec![k0, k1]
        }
        3 => {
            let k0 = CMat::diag(&[ONE, c(eta.sqrt()), c(eta)]);
            let mut k1 = CMat::zeros(3);
            k1[(0, 1)] = c(g.sqrt());
            k1[(1, 2)] = c((2.0 * eta * g).sqrt());
            let mut k2 = CMat::zeros(3);
            k2[(0, 2)] = c(g);
            vec![k0, k1, k2]
        }
        _ => panic!("sites have 2 or 3 levels"),
    }
}

/// Coherence multipliers e^{−(j−k)² x} for pure dephasing with x = t/T_φ.
pub fn dephasing_factors(d: usize, x: f64) -> Vec<C64> {
    (0..d * d)
        .map(|i| {
            let dj = (i / d) as f64 - (i % d) as f64;
            C64::new((-dj * dj * x).exp(), 0.0)
        })
        .collect()
}

/// Fast path used by the executor: damping for `t1_time` seconds of T1 exposure
/// and a dephasing exponent `x`.
pub fn damping_channel(d: usize, site: usize, t1_exposure: f64, x: f64) -> Channel {
    let ch = if t1_exposure > 0.0 {
        Channel::from_kraus(&amplitude_damping_kraus(d, (-t1_exposure).exp()), &[site])
    } else {
        Channel::schur(vec![ONE; d * d], &[site])
    };
    if x > 0.0 {
        ch.then_schur(&dephasing_factors(d, x))
    } else {
        ch
    }
}

/// Amplitude-phase damping for `duration` (any time unit shared with the other two).
/// `t_phi` may be infinite.
pub fn idle_channel(d: usize, site: usize, t1: f64, t_phi: f64, duration: f64) -> Result<KrausChannel> {
    if !(t1 > 0.0 && t_phi > 0.0) || duration < 0.0 {
        return Err(Error::Param("idle channel needs positive T1, T_phi and a nonnegative duration".into()));
    }
    let ad = amplitude_damping_kraus(d, (-duration / t1).exp());
    let deph = dephasing_kraus(d, duration / t_phi);
    let mut ops = Vec::new();
    for a in &ad {
        for p in &deph {
            ops.push(p * a);
        }
    }
    KrausChannel::new(ops, vec![site])
}

/// Diagonal Kraus operators reproducing the dephasing multiplier (F = Σ v v†, K = diag v).
pub fn dephasing_kraus(d: usize, x: f64) -> Vec<CMat> {
    let f = CMat::from_vec(dephasing_factors(d, x));
    let (vals, vecs) = f.eigh();
    vals.iter()
        .zip(&vecs)
        .filter(|(l, _)| **l > 1e-15)
        .map(|(l, v)| CMat::diag(&v.iter().map(|z| z * l.sqrt()).collect::<Vec<_>>()))
        .collect()
}

/// Pure-dephasing rate away from the sweetspot, 1/s:
/// 2π √(ln 2) √A D_φ + 1/T_φ^max, with √A in µΦ₀ and D_φ in GHz/Φ₀.
pub fn offsweetspot_rate(sqrt_a_uphi0: f64, d_phi_ghz: f64, sweet_rate: f64) -> f64 {
    2.0 * PI * 2f64.ln().sqrt() * sqrt_a_uphi0 * 1e-6 * d_phi_ghz * 1e9 + sweet_rate
}

/// Phases of a dressed CZ, diag(1, e^{iφ01}, e^{iφ10}, e^{iφ11}) in (first, second) order.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CzPhases {
    pub phi01: f64,
    pub phi10: f64,
    pub phi11: f64,
}

impl CzPhases {
    pub const IDEAL: CzPhases = CzPhases { phi01: 0.0, phi10: 0.0, phi11: PI };

    pub fn validate(&self) -> Result<()> {
        for p in [self.phi01, self.phi10, self.phi11] {
            if !(0.0..2.0 * PI).contains(&p) {
                return Err(Error::Param(format!("CZ phase {p} outside [0, 2π)")));
            }
        }
        Ok(())
    }

    pub fn diag(&self) -> [C64; 4] {
        [ONE, C64::from_polar(1.0, self.phi01), C64::from_polar(1.0, self.phi10), C64::from_polar(1.0, self.phi11)]
    }
}

/// Which window a stretch of time belongs to, for the dephasing rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Idle,
    /// Inside a CZ; `fluxed` is true for the transmon moved away from its sweetspot.
    Cz { fluxed: bool },
    Park,
}

#[derive(Clone, Debug)]
pub struct NoiseModel {
    pub level: u8,
    pub l1: f64,
    pub device: DeviceParams,
    /// Replaces every transmon's assignment matrix when set.
    pub assignment_override: Option<Povm>,
    /// Explicit CZ phases by "A2-D1"-style key; otherwise derived from the ZZ table.
    pub cz_phase_table: BTreeMap<String, CzPhases>,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::new(0, DeviceParams::table_s1(), 0.0).expect("level 0 is valid")
    }

    /// Level `level` ∈ 0..=5 on `device`; `l1` is only used at level 5.
    pub fn new(level: u8, device: DeviceParams, l1: f64) -> Result<Self> {
        if level > 5 {
            return Err(Error::Param(format!("noise level {level} (0-5)")));
        }
        if !(0.0..=0.25).contains(&l1) {
            return Err(Error::Param(format!("L1 = {l1} outside [0, 0.25]")));
        }
        Ok(NoiseModel { level, l1, device, assignment_override: None, cz_phase_table: BTreeMap::new() })
    }

    pub fn with_assignment(mut self, povm: Povm) -> Result<Self> {
        povm.validate()?;
        self.assignment_override = Some(povm);
        Ok(self)
    }

    pub fn with_cz_phases(mut self, pair: (&str, &str), phases: CzPhases) -> Result<Self> {
        phases.validate()?;
        self.cz_phase_table.insert(pair_key(pair.0, pair.1), phases);
        Ok(self)
    }

    pub fn decoherence(&self) -> bool {
        self.level >= 1
    }
    pub fn flux_dephasing(&self) -> bool {
        self.level >= 2
    }
    pub fn spam(&self) -> bool {
        self.level >= 3 || self.assignment_override.is_some()
    }
    pub fn crosstalk(&self) -> bool {
        self.level >= 4 || !self.cz_phase_table.is_empty()
    }
    pub fn leakage(&self) -> bool {
        self.level >= 5
    }

    /// Transmons that can leak under this model.
    pub fn leakers(&self) -> Vec<String> {
        if !self.leakage() {
            return Vec::new();
        }
        let mut v: Vec<String> = CZ_PAIRS.iter().map(|(a, b)| self.device.leaker(a, b)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Level count per site for the given labels: 3 for leakers, else 2.
    pub fn site_dims(&self, labels: &[&str]) -> Vec<usize> {
        let l = self.leakers();
        labels.iter().map(|s| if l.iter().any(|x| x == s) { 3 } else { 2 }).collect()
    }

    /// T1 in seconds, None without decoherence.
    pub fn t1(&self, site: &str) -> Option<f64> {
        self.decoherence().then(|| self.device.t1_s(site))
    }

    /// Pure-dephasing rate in 1/s for a site in a window.
    pub fn dephasing_rate(&self, site: &str, window: Window) -> f64 {
        if !self.decoherence() {
            return 0.0;
        }
        let sweet = self.device.sweetspot_dephasing_rate(site);
        if !self.flux_dephasing() {
            return sweet;
        }
        let t = self.device.transmon(site);
        let d_phi = match window {
            Window::Idle | Window::Cz { fluxed: false } => return sweet,
            Window::Cz { fluxed: true } => t.flux_sensitivity_cz_ghz_per_phi0,
            Window::Park => t.flux_sensitivity_park_ghz_per_phi0,
        };
        offsweetspot_rate(self.device.flux_noise_sqrt_a_uphi0, d_phi, sweet)
    }

    pub fn povm(&self, site: &str) -> Povm {
        if let Some(p) = self.assignment_override {
            return p;
        }
        if self.level >= 3 {
            self.device.assignment(site)
        } else {
            Povm::ideal()
        }
    }

    pub fn residual_excitation(&self, site: &str) -> f64 {
        if self.level >= 3 {
            self.device.transmon(site).residual_excitation
        } else {
            0.0
        }
    }

    /// Initial single-site state: |0⟩ with p_e of |1⟩ mixed in.
    pub fn initial_site_state(&self, site: &str, d: usize, occ: usize) -> CMat {
        let pe = self.residual_excitation(site);
        let mut m = CMat::zeros(d);
        // a residual excitation flips the intended level within {0,1}
        let other = if occ == 0 { 1 } else if occ == 1 { 0 } else { occ };
        m[(occ, occ)] += C64::new(1.0 - pe, 0.0);
        m[(other, other)] += C64::new(pe, 0.0);
        m
    }

    /// Phases of the CZ between `a` and `b` whose pair stays coherent for `exposure_ns`
    /// outside the gate itself.
    pub fn cz_phases(&self, a: &str, b: &str, exposure_ns: f64) -> CzPhases {
        if let Some(p) = self.cz_phase_table.get(&pair_key(a, b)) {
            return *p;
        }
        if let Some(p) = self.cz_phase_table.get(&pair_key(b, a)) {
            return CzPhases { phi01: p.phi10, phi10: p.phi01, phi11: p.phi11 };
        }
        if self.level < 4 {
            return CzPhases::IDEAL;
        }
        let chi = 2.0 * PI * self.device.zz_hz(a, b) * exposure_ns * 1e-9;
        CzPhases { phi01: 0.0, phi10: 0.0, phi11: (PI - chi).rem_euclid(2.0 * PI) }
    }

    /// Full CZ unitary on local dims (da, db): dressed phases on the qubit block and, at
    /// level 5, the partial exchange of |11⟩ with |20⟩ or |02⟩ (whichever side leaks).
    pub fn cz_unitary(&self, a: &str, b: &str, da: usize, db: usize, exposure_ns: f64) -> CMat {
        let ph = self.cz_phases(a, b, exposure_ns).diag();
        let n = da * db;
        let idx = |x: usize, y: usize| x * db + y;
        let mut d = CMat::identity(n);
        d[(idx(0, 1), idx(0, 1))] = ph[1];
        d[(idx(1, 0), idx(1, 0))] = ph[2];
        d[(idx(1, 1), idx(1, 1))] = ph[3];
        if !self.leakage() || self.l1 == 0.0 {
            return d;
        }
        let leaker = self.device.leaker(a, b);
        let target = if leaker == a && da == 3 {
            idx(2, 0)
        } else if leaker == b && db == 3 {
            idx(0, 2)
        } else {
            return d;
        };
        leakage_exchange(&d, idx(1, 1), target, self.l1)
    }
}

/// Rotation by 2·arcsin(√(4 L1)) in span{|11⟩, |leak⟩}, zero exchange phase, then `phases`.
pub fn leakage_exchange(phases: &CMat, i11: usize, leak: usize, l1: f64) -> CMat {
    let s = (4.0 * l1).sqrt().min(1.0);
    let c = (1.0 - s * s).max(0.0).sqrt();
    let mut r = CMat::identity(phases.dim());
    r[(i11, i11)] = C64::new(c, 0.0);
    r[(leak, leak)] = C64::new(c, 0.0);
    r[(leak, i11)] = C64::new(s, 0.0);
    r[(i11, leak)] = C64::new(-s, 0.0);
    phases * &r
}

pub fn pair_key(a: &str, b: &str) -> String {
    format!("{a}-{b}")
}
