//! Magnetostatics of straight-wire chip layouts and the Zeeman potential they create.

pub mod field_map;
pub mod interp;
pub mod layout;
pub mod segment;
pub mod zeeman;

use nalgebra::{Matrix3, Vector3};

use crate::error::Result;

pub use interp::InterpolatedField;
pub use layout::{total_field, ChipLayout, CurrentSetting, Wire, WireField, DEFAULT_CURRENT_LIMIT};
pub use segment::{segment_field, segment_field_jacobian, WireSegment, DEFAULT_CORE_RADIUS};
pub use zeeman::{zeeman_potential, SpinState, ZeemanPotential};

/// A static magnetic field in tesla.
pub trait MagneticField: Send + Sync {
    fn field(&self, p: &Vector3<f64>) -> Result<Vector3<f64>>;

    /// Field together with `J[i][j] = ∂B_i/∂p_j`. The default uses central differences.
    fn field_jacobian(&self, p: &Vector3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        let h = 1e-7;
        let b = self.field(p)?;
        let mut jac = Matrix3::zeros();
        for j in 0..3 {
            let mut e = Vector3::zeros();
            e[j] = h;
            let d = (self.field(&(p + e))? - self.field(&(p - e))?) / (2.0 * h);
            jac.set_column(j, &d);
        }
        Ok((b, jac))
    }
}

impl<F: MagneticField + ?Sized> MagneticField for &F {
    fn field(&self, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        (**self).field(p)
    }
    fn field_jacobian(&self, p: &Vector3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        (**self).field_jacobian(p)
    }
}

/// Analytic Ioffe-Pritchard field: bias `b0` along x, radial quadrupole gradient
/// `gradient` (T/m) and axial curvature `curvature` (T/m²), centred on `center`.
///
/// `Bx = B0 + B''/2·(x² − (y²+z²)/2)`, `By = B'·y − B''/2·x·y`, `Bz = −B'·z − B''/2·x·z`.
#[derive(Debug, Clone, Copy)]
pub struct IoffePritchardField {
    pub b0: f64,
    pub gradient: f64,
    pub curvature: f64,
    pub center: Vector3<f64>,
}

impl IoffePritchardField {
    /// Harmonic frequencies (radial, axial) in rad/s for a moment `mu` (J/T) and mass `m`.
    pub fn frequencies(&self, mu: f64, m: f64) -> (f64, f64) {
        let radial = (mu / m * (self.gradient * self.gradient / self.b0 - self.curvature / 2.0)).sqrt();
        let axial = (mu / m * self.curvature).sqrt();
        (radial, axial)
    }
}

impl MagneticField for IoffePritchardField {
    fn field(&self, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        let r = p - self.center;
        let (x, y, z) = (r.x, r.y, r.z);
        let c = self.curvature / 2.0;
        Ok(Vector3::new(
            self.b0 + c * (x * x - 0.5 * (y * y + z * z)),
            self.gradient * y - c * x * y,
            -self.gradient * z - c * x * z,
        ))
    }

    fn field_jacobian(&self, p: &Vector3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        let r = p - self.center;
        let (x, y, z) = (r.x, r.y, r.z);
        let c = self.curvature / 2.0;
        let jac = Matrix3::new(
            2.0 * c * x, -c * y, -c * z,
            -c * y, self.gradient - c * x, 0.0,
            -c * z, 0.0, -self.gradient - c * x,
        );
        Ok((self.field(p)?, jac))
    }
}

/// Spatially uniform field.
#[derive(Debug, Clone, Copy)]
pub struct UniformField(pub Vector3<f64>);

impl MagneticField for UniformField {
    fn field(&self, _p: &Vector3<f64>) -> Result<Vector3<f64>> {
        Ok(self.0)
    }
    fn field_jacobian(&self, _p: &Vector3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        Ok((self.0, Matrix3::zeros()))
    }
}
