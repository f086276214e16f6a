//! Builders for preparations, stabilizer cycles, logical measurements and gates.

use super::*;
use crate::code::LogicalPauli;
use crate::engine::mat::{gates, CMat};
use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Angles of the product-state preparation.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PrepAngles {
    pub theta: f64,
    pub phi: f64,
}

impl PrepAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI + 1e-12).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::Param(format!("prep angles θ={theta}, φ={phi} out of range")));
        }
        Ok(PrepAngles { theta: theta.min(PI), phi })
    }

    /// C_θ² and S_θ² with C = cos(θ/2), S = sin(θ/2).
    pub fn c2_s2(&self) -> (f64, f64) {
        ((self.theta / 2.0).cos().powi(2), (self.theta / 2.0).sin().powi(2))
    }

    /// Post-selection probability ½(C⁴ + S⁴) of projecting the product state.
    pub fn projection_probability(&self) -> f64 {
        let (c2, s2) = self.c2_s2();
        0.5 * (c2 * c2 + s2 * s2)
    }

    /// Logical amplitudes (C², S² e^{iφ}) of the projected state, unnormalized.
    pub fn logical_amplitudes(&self) -> (num_complex::Complex64, num_complex::Complex64) {
        let (c2, s2) = self.c2_s2();
        (num_complex::Complex64::new(c2, 0.0), num_complex::Complex64::from_polar(s2, self.phi))
    }
}

/// State preparations used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Prep {
    Angles(PrepAngles),
    /// |++++⟩, projects to |+_L⟩ on every branch.
    FtPlus,
    /// |++−−⟩, projects to |−_L⟩.
    FtMinus,
}

impl Prep {
    /// Target logical amplitudes (normalized).
    pub fn target(&self) -> (num_complex::Complex64, num_complex::Complex64) {
        use crate::code::cardinal;
        match self {
            Prep::Angles(a) => {
                let (x, y) = a.logical_amplitudes();
                let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
                (x / n, y / n)
            }
            Prep::FtPlus => cardinal::plus(),
            Prep::FtMinus => cardinal::minus(),
        }
    }

    pub fn circuit(&self) -> TimedCircuit {
        match self {
            Prep::Angles(a) => build_prep(*a),
            Prep::FtPlus => build_ft_prep(false),
            Prep::FtMinus => build_ft_prep(true),
        }
    }
}

/// R_y^θ on D1 and an equatorial rotation on D3 whose |1⟩ amplitude carries e^{iφ}
/// (axis at φ + π/2 in the R_φ convention), both from |0000⟩.
pub fn build_prep(a: PrepAngles) -> TimedCircuit {
    let mut c = TimedCircuit::new();
    c.push(Kind::Rot { theta: a.theta, phi: FRAC_PI_2 }, &[D1], 0);
    c.push(Kind::Rot { theta: a.theta, phi: (a.phi + FRAC_PI_2).rem_euclid(2.0 * PI) }, &[D3], 0);
    c
}

/// |++++⟩ (or |++−−⟩ with `minus`).
pub fn build_ft_prep(minus: bool) -> TimedCircuit {
    let mut c = TimedCircuit::new();
    for d in DATA {
        let theta = if minus && (d == D3 || d == D4) { -FRAC_PI_2 } else { FRAC_PI_2 };
        c.push(Kind::Rot { theta, phi: FRAC_PI_2 }, &[d], 0);
    }
    c
}

fn ry(theta: f64) -> Kind {
    Kind::Rot { theta, phi: FRAC_PI_2 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Check {
    Z13,
    X1234,
    Z24,
}

impl Check {
    pub const ALL: [Check; 3] = [Check::Z13, Check::X1234, Check::Z24];

    pub fn ancilla(self) -> usize {
        match self {
            Check::Z13 => A1,
            Check::X1234 => A2,
            Check::Z24 => A3,
        }
    }

    /// Data qubits in CZ order.
    pub fn data(self) -> &'static [usize] {
        match self {
            Check::Z13 => &[D1, D3],
            Check::X1234 => &[D1, D2, D3, D4],
            Check::Z24 => &[D2, D4],
        }
    }

    /// Calibration name. The weight-4 check is calibrated as a Z parity, hence "Z1234";
    /// `parse` accepts either spelling.
    pub fn name(self) -> &'static str {
        match self {
            Check::Z13 => "Z13",
            Check::X1234 => "Z1234",
            Check::Z24 => "Z24",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Z13" => Ok(Check::Z13),
            "Z1234" | "X1234" => Ok(Check::X1234),
            "Z24" => Ok(Check::Z24),
            _ => Err(Error::Param(format!("unknown check {s:?}"))),
        }
    }
}

/// Coherent part of one parity check: ancilla R_y^{π/2}, CZs, R_y^{−π/2}. With
/// `data_frame` the X check rotates its data into the X frame around the CZs.
pub fn check_block(check: Check, data_frame: bool) -> TimedCircuit {
    let a = check.ancilla();
    let data = check.data();
    let n = data.len() as i64;
    // the leading data rotations run alongside the ancilla's
    let coherent = 2 * T_1Q + n * T_CZ + if data_frame { T_1Q } else { 0 };
    let exposure = (coherent - T_CZ) as f64;
    let mut c = TimedCircuit::new();
    c.push(ry(FRAC_PI_2), &[a], 0);
    let mut t = T_1Q;
    if data_frame {
        for &d in data {
            c.push(ry(-FRAC_PI_2), &[d], 0);
        }
    }
    for &d in data {
        c.push(Kind::Cz { exposure_ns: exposure }, &[a, d], t);
        t += T_CZ;
    }
    if data_frame {
        for &d in data {
            c.push(ry(FRAC_PI_2), &[d], t);
        }
        t += T_1Q;
    }
    c.push(ry(-FRAC_PI_2), &[a], t);
    c
}

/// X1X2X3X4 check, 300 ns. The CZ order D1, D2, D3, D4 turns a mid-check ancilla fault
/// into X3X4, which the Z checks see.
pub fn x_coherent(parks: bool) -> TimedCircuit {
    let mut c = check_block(Check::X1234, true);
    if parks {
        c.push(Kind::Park, &[A1], T_1Q);
        c.push(Kind::Park, &[A3], T_1Q + T_CZ);
    }
    c
}

/// Z1Z3 and Z2Z4 checks side by side, 160 ns.
pub fn z_coherent(parks: bool) -> TimedCircuit {
    let mut c = check_block(Check::Z13, false);
    c.instrs.extend(check_block(Check::Z24, false).instrs);
    if parks {
        c.push(Kind::Park, &[A2], T_1Q);
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CycleOptions {
    pub scheme: Scheme,
    /// Axis of the data refocusing pulse; 0 (X) makes the noiseless cycle the identity on
    /// the codespace since X⊗4 is a stabilizer.
    pub echo_phi: f64,
    pub echo: bool,
}

impl CycleOptions {
    pub fn new(scheme: Scheme) -> Self {
        CycleOptions { scheme, echo_phi: 0.0, echo: true }
    }
}

/// One error-detection cycle. Pipelined: the Z checks run during the A2 readout.
/// Parallel: all readouts together after both coherent blocks. Spectator parking only
/// appears in the parallel schedule, where the middle-frequency ancillas are idle.
pub fn build_cycle(opts: CycleOptions) -> TimedCircuit {
    let mut c = TimedCircuit::new();
    let ps = Kind::Measure { postselect: true };
    match opts.scheme {
        Scheme::Pipelined => {
            c.instrs.extend(x_coherent(false).instrs);
            c.push(ps.clone(), &[A2], 300);
            c.instrs.extend(z_coherent(false).shifted(300).instrs);
            c.push(ps.clone(), &[A1], 460);
            c.push(ps, &[A3], 460);
        }
        Scheme::Parallel => {
            c.instrs.extend(x_coherent(true).instrs);
            c.instrs.extend(z_coherent(true).shifted(300).instrs);
            for a in [A2, A1, A3] {
                c.push(ps.clone(), &[a], 460);
            }
        }
    }
    let period = c.asap_offset(&c);
    if opts.echo {
        // halfway through the data idle window before the next cycle
        let idle_start = 460;
        let mid = (idle_start + period) / 2;
        for d in DATA {
            c.push(Kind::Rot { theta: PI, phi: opts.echo_phi }, &[d], mid - T_1Q / 2);
        }
    }
    c.period_ns = c.asap_offset(&c);
    c
}

/// Measurement basis of one data qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    /// Pre-rotation that maps this basis onto Z.
    pub fn prerotation(self) -> Option<Kind> {
        match self {
            Basis::X => Some(ry(-FRAC_PI_2)),
            Basis::Y => Some(Kind::Rot { theta: FRAC_PI_2, phi: 0.0 }),
            Basis::Z => None,
        }
    }
}

/// Destructive logical measurement: data bases, product rule and detection checks.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalMeasurement {
    pub basis: LogicalPauli,
    pub data_bases: [Basis; 4],
    /// Data positions (0..4) whose outcomes multiply into the logical value.
    pub value: Vec<usize>,
    /// Each check is a set of data positions whose outcome product must be +1.
    pub checks: Vec<Vec<usize>>,
}

impl LogicalMeasurement {
    pub fn new(basis: LogicalPauli) -> Self {
        use Basis::*;
        match basis {
            LogicalPauli::Z => LogicalMeasurement {
                basis,
                data_bases: [Z, Z, Z, Z],
                value: vec![0, 1],
                checks: vec![vec![0, 2], vec![1, 3]],
            },
            LogicalPauli::X => LogicalMeasurement {
                basis,
                data_bases: [X, X, X, X],
                value: vec![0, 2],
                checks: vec![vec![0, 1, 2, 3]],
            },
            // Y1 Z2 X3, with D4 read in Z to check Z2Z4
            LogicalPauli::Y => LogicalMeasurement {
                basis,
                data_bases: [Y, Z, X, Z],
                value: vec![0, 1, 2],
                checks: vec![vec![1, 3]],
            },
        }
    }

    /// Pre-rotations then simultaneous readout of all data qubits.
    pub fn block(&self) -> TimedCircuit {
        let mut c = TimedCircuit::new();
        let mut t0 = 0;
        for (k, b) in self.data_bases.iter().enumerate() {
            if let Some(r) = b.prerotation() {
                c.push(r, &[DATA[k]], 0);
                t0 = T_1Q;
            }
        }
        for d in DATA {
            c.push(Kind::Measure { postselect: false }, &[d], t0);
        }
        c
    }

    /// (accepted, logical value ±1) for a declared outcome string over D1..D4
    /// (0 ↦ +1, 1 ↦ −1, 2 rejects).
    pub fn evaluate(&self, outcomes: &[usize; 4]) -> (bool, i8) {
        if outcomes.contains(&2) {
            return (false, 0);
        }
        let parity = |set: &[usize]| set.iter().map(|&k| outcomes[k]).sum::<usize>() % 2;
        let ok = self.checks.iter().all(|c| parity(c) == 0);
        (ok, if parity(&self.value) == 0 { 1 } else { -1 })
    }
}

/// Logical gates of the suite.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum LogicalGate {
    /// Transversal R_y^π R_x^π on D1, D2.
    ZL,
    /// Transversal R_x^π on D1, D3.
    XL,
    /// Gate-by-measurement Z_L^θ through A2 (T_L is θ = π/4).
    ZTheta(f64),
    /// Gate-by-measurement X_L^θ through A2.
    XTheta(f64),
}

impl LogicalGate {
    pub fn t() -> Self {
        LogicalGate::ZTheta(PI / 4.0)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ZL" => Ok(LogicalGate::ZL),
            "XL" => Ok(LogicalGate::XL),
            "TL" => Ok(LogicalGate::t()),
            "XL90" => Ok(LogicalGate::XTheta(FRAC_PI_2)),
            _ => {
                let angle = |x: &str| {
                    x.parse::<f64>().map_err(|_| Error::Param(format!("bad gate angle in {s:?}")))
                };
                if let Some(x) = s.strip_prefix("Z:") {
                    Ok(LogicalGate::ZTheta(angle(x)?))
                } else if let Some(x) = s.strip_prefix("X:") {
                    Ok(LogicalGate::XTheta(angle(x)?))
                } else {
                    Err(Error::Param(format!("unknown gate {s:?} (ZL, XL, TL, XL90, Z:<rad>, X:<rad>)")))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            LogicalGate::ZL => "ZL".into(),
            LogicalGate::XL => "XL".into(),
            LogicalGate::ZTheta(t) if (*t - PI / 4.0).abs() < 1e-12 => "TL".into(),
            LogicalGate::XTheta(t) if (*t - FRAC_PI_2).abs() < 1e-12 => "XL90".into(),
            LogicalGate::ZTheta(t) => format!("Z:{t}"),
            LogicalGate::XTheta(t) => format!("X:{t}"),
        }
    }

    pub fn fault_tolerant(&self) -> bool {
        matches!(self, LogicalGate::ZL | LogicalGate::XL)
    }

    /// Ideal logical unitary (global phase dropped).
    pub fn ideal_unitary(&self) -> CMat {
        match *self {
            LogicalGate::ZL => gates::pauli_z(),
            LogicalGate::XL => gates::pauli_x(),
            LogicalGate::ZTheta(t) => gates::rz(t),
            LogicalGate::XTheta(t) => gates::rot(t, 0.0),
        }
    }

    /// The physical schedule. Rotation gates end with an A2 readout post-selected on m = +1.
    pub fn circuit(&self) -> TimedCircuit {
        let mut c = TimedCircuit::new();
        match *self {
            LogicalGate::ZL => {
                for d in [D1, D2] {
                    c.push(Kind::Rot { theta: PI, phi: 0.0 }, &[d], 0);
                    c.push(ry(PI), &[d], T_1Q);
                }
            }
            LogicalGate::XL => {
                for d in [D1, D3] {
                    c.push(Kind::Rot { theta: PI, phi: 0.0 }, &[d], 0);
                }
            }
            LogicalGate::ZTheta(theta) | LogicalGate::XTheta(theta) => {
                let x_frame = matches!(self, LogicalGate::XTheta(_));
                let pair = if x_frame { [D1, D3] } else { [D1, D2] };
                // R_x^θ|0⟩ = H|A_θ⟩ up to phase; the CZ pair then acts as controlled-Z_L
                // (or X_L in the rotated frame) and A2 is read out in the X basis.
                c.push(Kind::Rot { theta, phi: 0.0 }, &[A2], 0);
                if x_frame {
                    for d in pair {
                        c.push(ry(-FRAC_PI_2), &[d], 0);
                    }
                }
                let exposure = (2 * T_1Q + T_CZ) as f64;
                c.push(Kind::Cz { exposure_ns: exposure }, &[A2, pair[0]], T_1Q);
                c.push(Kind::Cz { exposure_ns: exposure }, &[A2, pair[1]], T_1Q + T_CZ);
                let t = T_1Q + 2 * T_CZ;
                if x_frame {
                    for d in pair {
                        c.push(ry(FRAC_PI_2), &[d], t);
                    }
                }
                c.push(ry(-FRAC_PI_2), &[A2], t);
                c.push(Kind::Measure { postselect: true }, &[A2], t + T_1Q);
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_periods() {
        let p = build_cycle(CycleOptions::new(Scheme::Pipelined));
        let q = build_cycle(CycleOptions::new(Scheme::Parallel));
        p.validate().unwrap();
        q.validate().unwrap();
        assert_eq!(p.duration_ns(), 840);
        assert_eq!(q.duration_ns(), 1000);
        let mut two = p.clone();
        assert_eq!(two.append_asap(&p), 840);
        two.validate().unwrap();
    }

    #[test]
    fn blocks_have_stated_lengths() {
        assert_eq!(x_coherent(false).end_ns(), 300);
        assert_eq!(z_coherent(false).end_ns(), 160);
    }

    #[test]
    fn gate_circuits_validate() {
        for g in [LogicalGate::ZL, LogicalGate::XL, LogicalGate::t(), LogicalGate::XTheta(FRAC_PI_2)] {
            g.circuit().validate().unwrap();
            assert_eq!(LogicalGate::parse(&g.label()).unwrap(), g);
        }
    }

    #[test]
    fn measurement_rules() {
        let z = LogicalMeasurement::new(LogicalPauli::Z);
        assert_eq!(z.evaluate(&[0, 0, 0, 0]), (true, 1));
        assert_eq!(z.evaluate(&[0, 1, 0, 1]), (true, -1));
        assert!(!z.evaluate(&[1, 0, 0, 0]).0);
        assert!(!z.evaluate(&[2, 0, 2, 0]).0);
        let y = LogicalMeasurement::new(LogicalPauli::Y);
        assert!(!y.evaluate(&[0, 1, 0, 0]).0);
    }

    #[test]
    fn prep_angle_domain() {
        assert!(PrepAngles::new(-0.1, 0.0).is_err());
        assert!(PrepAngles::new(0.1, 2.0 * PI).is_err());
        assert!((PrepAngles::new(FRAC_PI_2, 0.0).unwrap().projection_probability() - 0.25).abs() < 1e-15);
    }
}
