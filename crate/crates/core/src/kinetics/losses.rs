//! Particle loss channels: exponential background and cross-talk decay, the
//! evaporation knife, and the spatial cull.

use nalgebra::Vector3;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Particle;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::rng::{stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaporationMode {
    /// Remove when U(r) + ½mv² − U_min exceeds the threshold.
    #[default]
    Energy,
    /// Remove when U(r) − U_min exceeds the threshold.
    Position,
}

/// Where the knife acts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KnifeRegion {
    #[default]
    Everywhere,
    /// Only on the side of the plane `(p − point)·normal > 0`.
    Beyond { point: Vector3<f64>, normal: Vector3<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannels {
    /// Background-gas lifetime, s.
    pub tau_background: Option<f64>,
    /// Cross-talk lifetime while the beam runs, s.
    pub tau_crosstalk: Option<f64>,
    /// Evaporation threshold above the trap bottom, μK.
    pub evaporation_threshold: Option<f64>,
    pub evaporation_mode: EvaporationMode,
    pub knife_region: KnifeRegion,
    /// Particles farther than this from the cull axis have escaped, m.
    pub spatial_cull_radius: f64,
    pub cull_center: Vector3<f64>,
    /// Measure the cull distance from this line through `cull_center`;
    /// spherical distance when `None`.
    pub cull_axis: Option<Vector3<f64>>,
}

impl Default for LossChannels {
    fn default() -> Self {
        Self {
            tau_background: None,
            tau_crosstalk: None,
            evaporation_threshold: None,
            evaporation_mode: EvaporationMode::Energy,
            knife_region: KnifeRegion::Everywhere,
            spatial_cull_radius: f64::INFINITY,
            cull_center: Vector3::zeros(),
            cull_axis: None,
        }
    }
}

impl LossChannels {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("tau_background", self.tau_background), ("tau_crosstalk", self.tau_crosstalk)] {
            if let Some(t) = t {
                if !(t > 0.0) {
                    return Err(Error::Config(format!("{name} must be positive")));
                }
            }
        }
        if let Some(th) = self.evaporation_threshold {
            if !(th >= 0.0) {
                return Err(Error::Config("evaporation threshold must be nonnegative".into()));
            }
        }
        if !(self.spatial_cull_radius > 0.0) {
            return Err(Error::Config("cull radius must be positive".into()));
        }
        Ok(())
    }

    fn decay_rate(&self, crosstalk_on: bool) -> (f64, f64) {
        let bg = self.tau_background.map_or(0.0, |t| 1.0 / t);
        let cr = if crosstalk_on { self.tau_crosstalk.map_or(0.0, |t| 1.0 / t) } else { 0.0 };
        (bg, cr)
    }

    fn culled(&self, p: &Vector3<f64>) -> bool {
        let r = p - self.cull_center;
        let d = match self.cull_axis {
            Some(a) => (r - a * r.dot(&a)).norm(),
            None => r.norm(),
        };
        d > self.spatial_cull_radius
    }

    fn knife_applies(&self, p: &Vector3<f64>) -> bool {
        match self.knife_region {
            KnifeRegion::Everywhere => true,
            KnifeRegion::Beyond { point, normal } => (p - point).dot(&normal) > 0.0,
        }
    }
}

/// Particle counts removed per channel. Weighted numbers are count × weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossLedger {
    pub background: u64,
    pub crosstalk: u64,
    pub evaporated: u64,
    pub escaped: u64,
}

impl LossLedger {
    pub fn total(&self) -> u64 {
        self.background + self.crosstalk + self.evaporated + self.escaped
    }

    pub fn add(&mut self, o: &LossLedger) {
        self.background += o.background;
        self.crosstalk += o.crosstalk;
        self.evaporated += o.evaporated;
        self.escaped += o.escaped;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fate {
    Keep,
    Background,
    Crosstalk,
    Evaporated,
    Escaped,
}

const CHUNK: usize = 1024;

/// Apply every active channel for a time `dt` and drop the removed particles.
///
/// Exponential channels remove each particle with probability `dt/τ`, drawn
/// from the stream `(seed, Loss, step, chunk)` for fixed chunks of 1024
/// particles. The knife and the cull are deterministic. `u_min` is the trap
/// bottom in joules.
#[allow(clippy::too_many_arguments)]
pub fn apply_losses<P: Potential + ?Sized>(
    particles: &mut Vec<Particle>,
    channels: &LossChannels,
    pot: &P,
    u_min: f64,
    dt: f64,
    crosstalk_on: bool,
    seed: u64,
    step: u64,
) -> LossLedger {
    let (rb, rc) = channels.decay_rate(crosstalk_on);
    let (pb, pc) = (rb * dt, rc * dt);
    let c = pot.constants();
    let threshold = channels.evaporation_threshold.map(|t| c.uk_to_joule(t));
    let fates: Vec<Fate> = particles
        .par_chunks(CHUNK)
        .enumerate()
        .flat_map_iter(|(k, chunk)| {
            let mut rng = stream(seed, Purpose::Loss, step, k as u64);
            chunk
                .iter()
                .map(|p| {
                    let u: f64 = rng.gen();
                    if u < pb {
                        return Fate::Background;
                    }
                    if u < pb + pc {
                        return Fate::Crosstalk;
                    }
                    if channels.culled(&p.position) {
                        return Fate::Escaped;
                    }
                    if let Some(th) = threshold {
                        if channels.knife_applies(&p.position) {
                            let Ok(up) = pot.energy(&p.position) else { return Fate::Escaped };
                            let e = match channels.evaporation_mode {
                                EvaporationMode::Energy => up + p.kinetic_energy(c.mass),
                                EvaporationMode::Position => up,
                            };
                            if e - u_min > th {
                                return Fate::Evaporated;
                            }
                        }
                    }
                    Fate::Keep
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut ledger = LossLedger::default();
    for f in &fates {
        match f {
            Fate::Keep => {}
            Fate::Background => ledger.background += 1,
            Fate::Crosstalk => ledger.crosstalk += 1,
            Fate::Evaporated => ledger.evaporated += 1,
            Fate::Escaped => ledger.escaped += 1,
        }
    }
    if ledger.total() > 0 {
        let mut it = fates.iter();
        particles.retain(|_| *it.next().unwrap() == Fate::Keep);
    }
    ledger
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::HarmonicPotential;

    fn cloud(n: usize) -> Vec<Particle> {
        (0..n)
            .map(|i| {
                let s = i as f64 / n as f64;
                Particle::new(Vector3::new(1e-5 * s, 0.0, 0.0), Vector3::new(0.01 * s, 0.0, 0.0), 1.0)
            })
            .collect()
    }

    #[test]
    fn infinite_threshold_removes_nothing() {
        let pot = HarmonicPotential::isotropic(600.0);
        let mut ps = cloud(100);
        let ch = LossChannels { evaporation_threshold: Some(f64::INFINITY), ..Default::default() };
        let l = apply_losses(&mut ps, &ch, &pot, 0.0, 1e-3, false, 1, 0);
        assert_eq!(l.total(), 0);
        assert_eq!(ps.len(), 100);
    }

    #[test]
    fn zero_threshold_removes_everything_that_moves() {
        let pot = HarmonicPotential::isotropic(600.0);
        let mut ps = cloud(100);
        let ch = LossChannels { evaporation_threshold: Some(0.0), ..Default::default() };
        let l = apply_losses(&mut ps, &ch, &pot, 0.0, 1e-3, false, 1, 0);
        assert_eq!(l.evaporated, 99);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].velocity, Vector3::zeros());
    }

    #[test]
    fn cull_is_cylindrical() {
        let pot = HarmonicPotential::isotropic(1.0);
        let mut ps = vec![
            Particle::new(Vector3::new(5.0, 0.0, 0.0), Vector3::zeros(), 1.0),
            Particle::new(Vector3::new(0.0, 2.0, 0.0), Vector3::zeros(), 1.0),
        ];
        let ch = LossChannels { spatial_cull_radius: 1.0, cull_axis: Some(Vector3::x()), ..Default::default() };
        let l = apply_losses(&mut ps, &ch, &pot, 0.0, 1e-3, false, 1, 0);
        assert_eq!(l.escaped, 1);
        assert_eq!(ps[0].position.x, 5.0);
    }

    #[test]
    fn crosstalk_only_while_enabled() {
        let pot = HarmonicPotential::isotropic(1.0);
        let mut ps = cloud(10_000);
        let ch = LossChannels { tau_crosstalk: Some(1e-3), ..Default::default() };
        let l = apply_losses(&mut ps, &ch, &pot, 0.0, 1e-4, false, 1, 0);
        assert_eq!(l.total(), 0);
        let l = apply_losses(&mut ps, &ch, &pot, 0.0, 1e-4, true, 1, 0);
        assert!(l.crosstalk > 800 && l.crosstalk < 1200, "{}", l.crosstalk);
    }
}
