//! Weighted macroparticle dynamics: Verlet motion in a potential, DSMC
//! elastic collisions, loss channels and ensemble statistics.

pub mod dsmc;
pub mod losses;
pub mod stats;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::potential::Potential;

pub use dsmc::{collide, CollisionCellGrid, CollisionReport, ScatteringModel};
pub use losses::{apply_losses, EvaporationMode, KnifeRegion, LossChannels, LossLedger};
pub use stats::{stats, stats_lenient, EnsembleStats, StatsOptions};

/// Set once a particle has crossed the barrier plane into the trap.
pub const FLAG_ENTERED: u8 = 1;
/// Set the first time a particle counts as trapped.
pub const FLAG_CAPTURED: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    /// Acceleration at `position`, kept between steps for the Verlet scheme.
    pub accel: Vector3<f64>,
    /// Physical atoms represented by this particle.
    pub weight: f64,
    pub flags: u8,
}

impl Particle {
    pub fn new(position: Vector3<f64>, velocity: Vector3<f64>, weight: f64) -> Self {
        Self { position, velocity, accel: Vector3::zeros(), weight, flags: 0 }
    }

    pub fn kinetic_energy(&self, mass: f64) -> f64 {
        0.5 * mass * self.velocity.norm_squared()
    }

    pub fn has(&self, flag: u8) -> bool {
        self.flags & flag != 0
    }
}

/// Fill in `accel` from the force of `pot`. Returns indices where the
/// potential could not be evaluated, ascending.
pub fn init_accel<P: Potential + ?Sized>(particles: &mut [Particle], pot: &P) -> Vec<usize> {
    let m = pot.constants().mass;
    particles
        .par_iter_mut()
        .enumerate()
        .filter_map(|(i, p)| match pot.energy_gradient(&p.position) {
            Ok((_, g)) => {
                p.accel = -g / m;
                None
            }
            Err(_) => Some(i),
        })
        .collect()
}

/// One velocity-Verlet step (kick, drift, kick) with force −∇U.
///
/// Particles whose new position cannot be evaluated (conductor core, outside
/// the tabulated region) are left where they moved to, with a half kick, and
/// their indices returned in ascending order so the caller can cull them.
pub fn push<P: Potential + ?Sized>(particles: &mut [Particle], pot: &P, dt: f64) -> Vec<usize> {
    let m = pot.constants().mass;
    let half = 0.5 * dt;
    particles
        .par_iter_mut()
        .with_min_len(512)
        .enumerate()
        .filter_map(|(i, p)| {
            p.velocity += p.accel * half;
            p.position += p.velocity * dt;
            match pot.energy_gradient(&p.position) {
                Ok((_, g)) => {
                    p.accel = -g / m;
                    p.velocity += p.accel * half;
                    None
                }
                Err(_) => Some(i),
            }
        })
        .collect()
}

/// Remove the particles at `indices` (ascending) preserving the order of the rest.
pub fn remove_indices(particles: &mut Vec<Particle>, indices: &[usize]) {
    if indices.is_empty() {
        return;
    }
    let mut next = indices.iter().peekable();
    let mut k = 0;
    particles.retain(|_| {
        let drop = next.peek().is_some_and(|&&i| i == k);
        if drop {
            next.next();
        }
        k += 1;
        !drop
    });
}
