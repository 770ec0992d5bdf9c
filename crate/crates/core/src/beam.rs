//! The incoming atom beam: macroparticles emitted at the guide entrance.

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kinetics::Particle;
use crate::potential::Potential;

/// Orthonormal pair spanning the plane with unit normal `n`. For a normal
/// along +x this is (+y, +z).
pub fn plane_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n.z.abs() < 0.9 { Vector3::z() } else { Vector3::x() };
    let e1 = helper.cross(n).normalize();
    (e1, n.cross(&e1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    /// Atoms per second.
    pub flux: f64,
    /// Mean velocity along the entrance-plane normal, m/s.
    pub mean_velocity: f64,
    /// Longitudinal and radial temperatures, K.
    pub t_long: f64,
    pub t_rad: f64,
    pub entrance_point: [f64; 3],
    pub entrance_normal: [f64; 3],
    /// Gaussian position spread along the two plane axes, m.
    pub transverse_sigma: [f64; 2],
    pub macroparticle_weight: f64,
}

impl BeamSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("beam: {m}")));
        if !(self.flux > 0.0) {
            return bad("flux must be positive");
        }
        if !(self.mean_velocity > 0.0) {
            return bad("mean velocity must be positive");
        }
        if !(self.t_long > 0.0 && self.t_rad > 0.0) {
            return bad("temperatures must be positive");
        }
        if !(self.macroparticle_weight >= 1.0) {
            return bad("macroparticle weight must be at least 1");
        }
        if !(Vector3::from(self.entrance_normal).norm() > 0.0) {
            return bad("entrance normal must be nonzero");
        }
        if self.transverse_sigma.iter().any(|s| !(*s >= 0.0)) {
            return bad("transverse sigma must be nonnegative");
        }
        Ok(())
    }

    pub fn normal(&self) -> Vector3<f64> {
        Vector3::from(self.entrance_normal).normalize()
    }

    pub fn longitudinal_sigma(&self, c: &PhysicalConstants) -> f64 {
        c.thermal_velocity(self.t_long)
    }

    pub fn radial_sigma(&self, c: &PhysicalConstants) -> f64 {
        c.thermal_velocity(self.t_rad)
    }

    /// m⟨|v|²⟩/(3kB) of the emitted distribution in the lab frame, K,
    /// ignoring the (tiny) effect of the v > 0 truncation.
    pub fn kinetic_temperature(&self, c: &PhysicalConstants) -> f64 {
        let v2 = self.mean_velocity.powi(2) + c.k_b * (self.t_long + 2.0 * self.t_rad) / c.mass;
        c.mass * v2 / (3.0 * c.k_b)
    }

    /// Mean longitudinal kinetic energy ½m(v̄² + σ²), J.
    pub fn mean_longitudinal_energy(&self, c: &PhysicalConstants) -> f64 {
        0.5 * c.mass * self.mean_velocity.powi(2) + 0.5 * c.k_b * self.t_long
    }
}

/// Draw the particles entering during one step of length `dt` with mean
/// weighted atom number `atoms`.
fn draw<R: Rng + ?Sized>(spec: &BeamSpec, atoms: f64, c: &PhysicalConstants, rng: &mut R) -> Vec<Particle> {
    let mean = atoms / spec.macroparticle_weight;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0);
    let n = spec.normal();
    let (e1, e2) = plane_basis(&n);
    let origin = Vector3::from(spec.entrance_point);
    let std = Normal::new(0.0, 1.0).unwrap();
    let (sl, sr) = (spec.longitudinal_sigma(c), spec.radial_sigma(c));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let vl = loop {
            let v = spec.mean_velocity + sl * std.sample(rng);
            if v > 0.0 {
                break v;
            }
        };
        let pos = origin + e1 * (spec.transverse_sigma[0] * std.sample(rng)) + e2 * (spec.transverse_sigma[1] * std.sample(rng));
        let vel = n * vl + e1 * (sr * std.sample(rng)) + e2 * (sr * std.sample(rng));
        out.push(Particle::new(pos, vel, spec.macroparticle_weight));
    }
    out
}

/// Particles emitted by a constant-flux beam during `dt`.
pub fn emit<R: Rng + ?Sized>(spec: &BeamSpec, dt: f64, c: &PhysicalConstants, rng: &mut R) -> Vec<Particle> {
    if !(dt > 0.0) {
        return Vec::new();
    }
    draw(spec, spec.flux * dt, c, rng)
}

/// Time dependence of the beam flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FluxEnvelope {
    /// The constant flux of the `BeamSpec`.
    Constant,
    /// Raised-cosine pulses of length `width` at the start of every `period`,
    /// each carrying `atoms_per_launch` atoms.
    Pulsed { period: f64, atoms_per_launch: f64, width: f64 },
}

impl FluxEnvelope {
    /// Atoms emitted in `[0, t]` for a constant flux `flux`.
    pub fn cumulative(&self, flux: f64, t: f64) -> f64 {
        match *self {
            FluxEnvelope::Constant => flux * t,
            FluxEnvelope::Pulsed { period, atoms_per_launch, width } => {
                let k = (t / period).floor();
                let tau = (t - k * period).min(width);
                let x = tau / width;
                let partial = x - (2.0 * std::f64::consts::PI * x).sin() / (2.0 * std::f64::consts::PI);
                atoms_per_launch * (k + partial)
            }
        }
    }

    /// Instantaneous flux, atoms/s.
    pub fn flux(&self, flux: f64, t: f64) -> f64 {
        match *self {
            FluxEnvelope::Constant => flux,
            FluxEnvelope::Pulsed { period, atoms_per_launch, width } => {
                let tau = t - (t / period).floor() * period;
                if tau < width {
                    atoms_per_launch / width * (1.0 - (2.0 * std::f64::consts::PI * tau / width).cos())
                } else {
                    0.0
                }
            }
        }
    }

    pub fn mean_flux(&self, flux: f64) -> f64 {
        match *self {
            FluxEnvelope::Constant => flux,
            FluxEnvelope::Pulsed { period, atoms_per_launch, .. } => atoms_per_launch / period,
        }
    }
}

/// Periodic pulse train carrying `atoms_per_launch` per `period`, with
/// pulses lasting `width` (at most one period).
pub fn pulsed_schedule(period: f64, atoms_per_launch: f64, width: f64, max_flux: f64) -> Result<FluxEnvelope> {
    if !(period > 0.0) || !(width > 0.0 && width <= period) || !(atoms_per_launch >= 0.0) {
        return Err(Error::InconsistentSpec("pulse needs period > 0, 0 < width <= period, atoms >= 0".into()));
    }
    if atoms_per_launch / period > max_flux {
        return Err(Error::InconsistentSpec(format!(
            "mean flux {:.3e}/s exceeds the configured maximum {max_flux:.3e}/s",
            atoms_per_launch / period
        )));
    }
    Ok(FluxEnvelope::Pulsed { period, atoms_per_launch, width })
}

/// Particles emitted during `[t, t + dt]` under `envelope`. With
/// [`FluxEnvelope::Constant`] this consumes the generator exactly like [`emit`].
pub fn emit_enveloped<R: Rng + ?Sized>(
    spec: &BeamSpec,
    envelope: &FluxEnvelope,
    t: f64,
    dt: f64,
    c: &PhysicalConstants,
    rng: &mut R,
) -> Vec<Particle> {
    if !(dt > 0.0) {
        return Vec::new();
    }
    let atoms = match envelope {
        FluxEnvelope::Constant => spec.flux * dt,
        e => e.cumulative(spec.flux, t + dt) - e.cumulative(spec.flux, t),
    };
    draw(spec, atoms, c, rng)
}

/// Transverse equilibrium of the guide in the entrance plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntranceProfile {
    /// Boltzmann-weighted centre of the guide cross-section.
    pub center: [f64; 3],
    /// Rms widths along the plane axes at the radial temperature.
    pub sigma: [f64; 2],
}

/// Boltzmann-weighted centre and rms widths of a thermal cloud at `t_rad`
/// in the plane through `point` with normal `normal`, sampled on a square
/// `half_width` around `point`.
pub fn entrance_profile<P: Potential + ?Sized>(
    pot: &P,
    point: &Vector3<f64>,
    normal: &Vector3<f64>,
    t_rad: f64,
    half_width: f64,
    samples: usize,
) -> Result<EntranceProfile> {
    let (e1, e2) = plane_basis(&normal.normalize());
    let c = pot.constants();
    let kt = c.k_b * t_rad;
    let n = samples.max(3);
    let coord = |i: usize| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64;
    let mut pts = Vec::with_capacity(n * n);
    let mut u_min = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let q = Vector2::new(coord(i), coord(j));
            if let Ok(u) = pot.energy(&(point + e1 * q.x + e2 * q.y)) {
                u_min = u_min.min(u);
                pts.push((q, u));
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::NoTrap("guide cross-section at the entrance could not be evaluated".into()));
    }
    let (mut z, mut m1) = (0.0, Vector2::zeros());
    for (q, u) in &pts {
        let w = (-(u - u_min) / kt).exp();
        z += w;
        m1 += q * w;
    }
    let mean = m1 / z;
    let mut m2 = Vector2::zeros();
    for (q, u) in &pts {
        let w = (-(u - u_min) / kt).exp();
        let d = q - mean;
        m2 += d.component_mul(&d) * w;
    }
    let sigma = (m2 / z).map(f64::sqrt);
    let center = point + e1 * mean.x + e2 * mean.y;
    Ok(EntranceProfile { center: center.into(), sigma: [sigma.x, sigma.y] })
}
