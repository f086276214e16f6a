//! Leaked-population estimates from scalar readout voltages.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Fewest shots accepted per cycle point.
pub const MIN_SHOTS: usize = 1000;
/// |1⟩/|2⟩ separation, in units of the wider σ, below which estimates are flagged.
pub const CONFIDENCE_SEPARATION: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub sigma: f64,
    pub weight: f64,
}

impl Gaussian {
    fn pdf(&self, v: f64) -> f64 {
        let z = (v - self.mean) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Three components for |0⟩, |1⟩, |2⟩ and the |2⟩-vs-rest threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoltageModel {
    pub components: [Gaussian; 3],
    pub threshold: f64,
    /// True when the |2⟩ side of the threshold is above it.
    pub leaked_above: bool,
}

impl VoltageModel {
    pub fn new(components: [Gaussian; 3]) -> Result<Self> {
        let sw: f64 = components.iter().map(|c| c.weight).sum();
        if components.iter().any(|c| !(c.sigma > 0.0) || c.weight < 0.0) || (sw - 1.0).abs() > 1e-9 {
            return Err(Error::Param("components need σ > 0 and weights summing to 1".into()));
        }
        let mut m = VoltageModel { components, threshold: 0.0, leaked_above: true };
        m.place_threshold();
        Ok(m)
    }

    /// Threshold maximising P(declare 2 | 2) − P(declare 2 | 0 or 1), the rest weighted by
    /// their relative populations (equal when both are empty).
    fn place_threshold(&mut self) {
        let [c0, c1, c2] = self.components;
        let (w0, w1) = if c0.weight + c1.weight > 0.0 { (c0.weight, c1.weight) } else { (0.5, 0.5) };
        let (w0, w1) = (w0 / (w0 + w1), w1 / (w0 + w1));
        self.leaked_above = c2.mean >= w0 * c0.mean + w1 * c1.mean;
        let tail = |g: &Gaussian, t: f64| {
            let p = 0.5 * erfc((t - g.mean) / (g.sigma * std::f64::consts::SQRT_2));
            if self.leaked_above { p } else { 1.0 - p }
        };
        let lo = self.components.iter().map(|c| c.mean - 6.0 * c.sigma).fold(f64::INFINITY, f64::min);
        let hi = self.components.iter().map(|c| c.mean + 6.0 * c.sigma).fold(f64::NEG_INFINITY, f64::max);
        let score = |t: f64| tail(&c2, t) - w0 * tail(&c0, t) - w1 * tail(&c1, t);
        let mut best = (f64::NEG_INFINITY, lo);
        for i in 0..=4000 {
            let t = lo + (hi - lo) * i as f64 / 4000.0;
            let s = score(t);
            if s > best.0 {
                best = (s, t);
            }
        }
        self.threshold = best.1;
    }

    pub fn declared_leaked(&self, v: f64) -> bool {
        (v > self.threshold) == self.leaked_above
    }

    /// Separation of the |1⟩ and |2⟩ means in units of the wider σ.
    pub fn separation(&self) -> f64 {
        let [_, c1, c2] = self.components;
        (c2.mean - c1.mean).abs() / c1.sigma.max(c2.sigma)
    }

    pub fn low_confidence(&self) -> bool {
        self.separation() < CONFIDENCE_SEPARATION
    }

    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<Vec<f64>> {
        let normals: Vec<Normal<f64>> = self
            .components
            .iter()
            .map(|c| Normal::new(c.mean, c.sigma).map_err(|e| Error::Param(e.to_string())))
            .collect::<Result<_>>()?;
        Ok((0..shots)
            .map(|_| {
                let u: f64 = rng.random();
                let k = if u < self.components[0].weight {
                    0
                } else if u < self.components[0].weight + self.components[1].weight {
                    1
                } else {
                    2
                };
                normals[k].sample(rng)
            })
            .collect())
    }
}

/// Complementary error function (Numerical Recipes erfcc, relative error < 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t * (-z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807 + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 { r } else { 2.0 - r }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeakageEstimate {
    pub cycles: Vec<usize>,
    /// EM weight of the |2⟩ component per cycle.
    pub p_leak: Vec<f64>,
    /// Fraction of shots beyond the threshold per cycle.
    pub p_declared: Vec<f64>,
    pub model: VoltageModel,
    pub low_confidence: bool,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt())
}

/// Initial components: from per-state calibration shots, else 1-D k-means with 3 centres
/// (labelled by rising voltage, so it needs all three populations in the data).
fn initial(all: &[f64], calib: Option<&[Vec<f64>; 3]>) -> Result<[Gaussian; 3]> {
    if let Some(c) = calib {
        let mut g = [Gaussian { mean: 0.0, sigma: 1.0, weight: 1.0 / 3.0 }; 3];
        for k in 0..3 {
            if c[k].len() < 2 {
                return Err(Error::Param(format!("need calibration shots for |{k}⟩")));
            }
            let (m, s) = mean_sd(&c[k]);
            g[k].mean = m;
            g[k].sigma = s.max(1e-12);
        }
        return Ok(g);
    }
    let mut sorted = all.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |f: f64| sorted[((sorted.len() - 1) as f64 * f) as usize];
    let mut centres = [q(1.0 / 6.0), q(0.5), q(5.0 / 6.0)];
    let mut assign = vec![0usize; all.len()];
    for _ in 0..100 {
        for (i, v) in all.iter().enumerate() {
            assign[i] = (0..3).min_by(|&a, &b| (v - centres[a]).abs().total_cmp(&(v - centres[b]).abs())).unwrap();
        }
        let mut next = centres;
        for (k, c) in next.iter_mut().enumerate() {
            let pts: Vec<f64> = all.iter().zip(&assign).filter(|(_, a)| **a == k).map(|(v, _)| *v).collect();
            if !pts.is_empty() {
                *c = mean_sd(&pts).0;
            }
        }
        if next == centres {
            break;
        }
        centres = next;
    }
    let mut g = [Gaussian { mean: 0.0, sigma: 1.0, weight: 1.0 / 3.0 }; 3];
    for k in 0..3 {
        let pts: Vec<f64> = all.iter().zip(&assign).filter(|(_, a)| **a == k).map(|(v, _)| *v).collect();
        let (m, s) = if pts.len() > 1 { mean_sd(&pts) } else { (centres[k], mean_sd(all).1 / 3.0) };
        g[k] = Gaussian { mean: m, sigma: s.max(1e-9), weight: pts.len().max(1) as f64 / all.len() as f64 };
    }
    Ok(g)
}

/// Responsibility-weighted component weights for `v` with shapes held fixed.
fn em_weights(v: &[f64], g: &[Gaussian; 3], iters: usize) -> [f64; 3] {
    let mut w = [1.0 / 3.0; 3];
    let dens: Vec<[f64; 3]> = v.iter().map(|&x| [g[0].pdf(x), g[1].pdf(x), g[2].pdf(x)]).collect();
    for _ in 0..iters {
        let mut acc = [0.0; 3];
        for d in &dens {
            let z = w[0] * d[0] + w[1] * d[1] + w[2] * d[2];
            if z > 0.0 {
                for k in 0..3 {
                    acc[k] += w[k] * d[k] / z;
                }
            }
        }
        let next = acc.map(|a| a / v.len() as f64);
        let step = (0..3).map(|k| (next[k] - w[k]).abs()).fold(0.0, f64::max);
        w = next;
        if step < 1e-12 {
            break;
        }
    }
    w
}

/// Fits the three-component model to all shots (EM, shapes and weights free), then
/// re-estimates only the weights cycle by cycle. `calib` holds per-state calibration shots.
pub fn estimate_leakage(shots: &[(usize, Vec<f64>)], calib: Option<&[Vec<f64>; 3]>) -> Result<LeakageEstimate> {
    if shots.is_empty() {
        return Err(Error::Param("no cycle points".into()));
    }
    if let Some((c, v)) = shots.iter().find(|(_, v)| v.len() < MIN_SHOTS) {
        return Err(Error::Param(format!("cycle {c}: {} shots, need {MIN_SHOTS}", v.len())));
    }
    let all: Vec<f64> = shots.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let mut g = initial(&all, calib)?;
    let spread = mean_sd(&all).1.max(1e-300);
    for _ in 0..500 {
        let mut n = [0.0; 3];
        let mut s1 = [0.0; 3];
        let mut s2 = [0.0; 3];
        for &x in &all {
            let r = [g[0].weight * g[0].pdf(x), g[1].weight * g[1].pdf(x), g[2].weight * g[2].pdf(x)];
            let z: f64 = r.iter().sum();
            if z <= 0.0 {
                continue;
            }
            for k in 0..3 {
                let p = r[k] / z;
                n[k] += p;
                s1[k] += p * x;
                s2[k] += p * x * x;
            }
        }
        let mut next = g;
        for k in 0..3 {
            if n[k] < 1e-9 * all.len() as f64 {
                // empty component: keep its shape, zero weight
                next[k].weight = 0.0;
                continue;
            }
            let m = s1[k] / n[k];
            let var = (s2[k] / n[k] - m * m).max(0.0);
            next[k] = Gaussian { mean: m, sigma: var.sqrt(), weight: n[k] / all.len() as f64 };
            if next[k].sigma < 1e-6 * spread && n[k] > 1.0 {
                return Err(Error::Fit(format!("component {k} collapsed (σ = {:.3e})", next[k].sigma)));
            }
        }
        let step = (0..3).map(|k| (next[k].mean - g[k].mean).abs() / spread).fold(0.0, f64::max);
        g = next;
        if step < 1e-10 {
            break;
        }
    }
    let sw: f64 = g.iter().map(|c| c.weight).sum();
    for c in &mut g {
        c.weight /= sw;
    }
    let model = VoltageModel::new(g)?;
    let mut cycles = Vec::new();
    let mut p_leak = Vec::new();
    let mut p_declared = Vec::new();
    for (c, v) in shots {
        cycles.push(*c);
        p_leak.push(em_weights(v, &model.components, 2000)[2]);
        p_declared.push(v.iter().filter(|x| model.declared_leaked(**x)).count() as f64 / v.len() as f64);
    }
    let low_confidence = model.low_confidence();
    Ok(LeakageEstimate { cycles, p_leak, p_declared, model, low_confidence })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoltageRow {
    pub cycle: usize,
    pub voltage: f64,
}

/// Reads `cycle,voltage` rows, grouped by cycle in ascending order.
pub fn read_voltage_csv<R: std::io::Read>(r: R) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut map = std::collections::BTreeMap::<usize, Vec<f64>>::new();
    for row in csv::Reader::from_reader(r).deserialize::<VoltageRow>() {
        let row = row?;
        map.entry(row.cycle).or_default().push(row.voltage);
    }
    Ok(map.into_iter().collect())
}

pub fn write_voltage_csv<W: std::io::Write>(w: W, shots: &[(usize, Vec<f64>)]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for (c, v) in shots {
        for &x in v {
            wr.serialize(VoltageRow { cycle: *c, voltage: x })?;
        }
    }
    wr.flush()?;
    Ok(())
}
