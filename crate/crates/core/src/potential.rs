//! The `Potential` abstraction every analysis and integrator works against.

use nalgebra::{Matrix3, Vector3};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Default step for central-difference derivatives, m.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Potential energy (J) of one atom as a function of position (m).
pub trait Potential: Send + Sync {
    fn energy(&self, p: &Vector3<f64>) -> Result<f64>;

    /// Energy and its gradient (J/m). Central differences unless overridden.
    fn energy_gradient(&self, p: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        let u = self.energy(p)?;
        let h = DEFAULT_FD_STEP;
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = h;
            g[i] = (self.energy(&(p + e))? - self.energy(&(p - e))?) / (2.0 * h);
        }
        Ok((u, g))
    }

    /// Constants the energies refer to (mass for frequencies, kB for μK).
    fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::RB87
    }
}

impl<P: Potential + ?Sized> Potential for &P {
    fn energy(&self, p: &Vector3<f64>) -> Result<f64> {
        (**self).energy(p)
    }
    fn energy_gradient(&self, p: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        (**self).energy_gradient(p)
    }
    fn constants(&self) -> PhysicalConstants {
        (**self).constants()
    }
}

/// Central-difference gradient and symmetrized Hessian of `pot` at `p`.
pub fn potential_gradient_hessian<P: Potential + ?Sized>(
    pot: &P,
    p: &Vector3<f64>,
    step: f64,
) -> Result<(Vector3<f64>, Matrix3<f64>)> {
    if !(step > 1e-7 && step < 1e-4) {
        return Err(Error::Config(format!("finite-difference step {step} m outside (1e-7, 1e-4)")));
    }
    let h = step;
    let e = |i: usize| {
        let mut v = Vector3::zeros();
        v[i] = h;
        v
    };
    let u0 = pot.energy(p)?;
    let mut plus = [0.0; 3];
    let mut minus = [0.0; 3];
    for i in 0..3 {
        plus[i] = pot.energy(&(p + e(i)))?;
        minus[i] = pot.energy(&(p - e(i)))?;
    }
    let grad = Vector3::from_fn(|i, _| (plus[i] - minus[i]) / (2.0 * h));
    let mut hess = Matrix3::zeros();
    for i in 0..3 {
        hess[(i, i)] = (plus[i] - 2.0 * u0 + minus[i]) / (h * h);
        for j in (i + 1)..3 {
            let upp = pot.energy(&(p + e(i) + e(j)))?;
            let upm = pot.energy(&(p + e(i) - e(j)))?;
            let ump = pot.energy(&(p - e(i) + e(j)))?;
            let umm = pot.energy(&(p - e(i) - e(j)))?;
            let v = (upp - upm - ump + umm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok((grad, hess))
}

/// Anisotropic harmonic well `½·m·Σ ω_i²·((r − c)·axis_i)²` plus an offset.
#[derive(Debug, Clone)]
pub struct HarmonicPotential {
    pub center: Vector3<f64>,
    /// Angular frequencies along x, y, z (rad/s).
    pub omega: Vector3<f64>,
    pub offset: f64,
    /// Energies above `clip` are flattened to `clip`.
    pub clip: Option<f64>,
    pub constants: PhysicalConstants,
}

impl HarmonicPotential {
    pub fn new(center: Vector3<f64>, omega: Vector3<f64>) -> Self {
        Self { center, omega, offset: 0.0, clip: None, constants: PhysicalConstants::RB87 }
    }

    pub fn isotropic(omega: f64) -> Self {
        Self::new(Vector3::zeros(), Vector3::repeat(omega))
    }

    pub fn with_clip(mut self, clip: f64) -> Self {
        self.clip = Some(clip);
        self
    }
}

impl Potential for HarmonicPotential {
    fn energy(&self, p: &Vector3<f64>) -> Result<f64> {
        Ok(self.energy_gradient(p)?.0)
    }

    fn energy_gradient(&self, p: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        let r = p - self.center;
        let k = self.omega.component_mul(&self.omega) * self.constants.mass;
        let u = 0.5 * (k.x * r.x * r.x + k.y * r.y * r.y + k.z * r.z * r.z) + self.offset;
        match self.clip {
            Some(c) if u >= c => Ok((c, Vector3::zeros())),
            _ => Ok((u, k.component_mul(&r))),
        }
    }

    fn constants(&self) -> PhysicalConstants {
        self.constants
    }
}

/// Potential given by a closure, for synthetic landscapes.
pub struct FnPotential<F> {
    f: F,
    constants: PhysicalConstants,
}

impl<F> FnPotential<F>
where
    F: Fn(&Vector3<f64>) -> f64 + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f, constants: PhysicalConstants::RB87 }
    }
}

impl<F> Potential for FnPotential<F>
where
    F: Fn(&Vector3<f64>) -> f64 + Send + Sync,
{
    fn energy(&self, p: &Vector3<f64>) -> Result<f64> {
        Ok((self.f)(p))
    }
    fn constants(&self) -> PhysicalConstants {
        self.constants
    }
}
