//! Zeeman energy of a weak-field-seeking spin state, optionally with gravity.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::MagneticField;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::potential::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    pub f: i32,
    pub m_f: i32,
    pub g_f: f64,
}

impl SpinState {
    /// |F=2, mF=2⟩ of Rb-87.
    pub const RB87_F2_MF2: SpinState = SpinState { f: 2, m_f: 2, g_f: 0.5 };
    /// |F=1, mF=−1⟩ of Rb-87.
    pub const RB87_F1_MFM1: SpinState = SpinState { f: 1, m_f: -1, g_f: -0.5 };

    pub fn is_valid(&self) -> bool {
        self.f >= 0 && self.m_f.abs() <= self.f
    }

    pub fn is_trappable(&self) -> bool {
        self.is_valid() && self.m_f as f64 * self.g_f > 0.0
    }

    /// Effective magnetic moment mF·gF·μB in J/T.
    pub fn moment(&self, c: &PhysicalConstants) -> f64 {
        self.m_f as f64 * self.g_f * c.mu_b
    }

    fn check(&self) -> Result<()> {
        if self.is_trappable() {
            Ok(())
        } else {
            Err(Error::UntrappableState { f: self.f, m_f: self.m_f, g_f: self.g_f })
        }
    }
}

impl Default for SpinState {
    fn default() -> Self {
        Self::RB87_F2_MF2
    }
}

/// Adiabatic potential mF·gF·μB·|B|, plus m·|g|·z when `gravity` is set.
pub fn zeeman_potential(
    b: &Vector3<f64>,
    s: &SpinState,
    c: &PhysicalConstants,
    p: &Vector3<f64>,
    gravity: bool,
) -> Result<f64> {
    s.check()?;
    let mut u = s.moment(c) * b.norm();
    if gravity {
        u -= c.mass * c.gravity * p.z;
    }
    Ok(u)
}

/// Potential-energy landscape of a spin state in a static field.
#[derive(Debug, Clone)]
pub struct ZeemanPotential<F> {
    pub field: F,
    pub spin: SpinState,
    pub constants: PhysicalConstants,
    pub gravity: bool,
}

impl<F: MagneticField> ZeemanPotential<F> {
    pub fn new(field: F, spin: SpinState, constants: PhysicalConstants, gravity: bool) -> Result<Self> {
        spin.check()?;
        Ok(Self { field, spin, constants, gravity })
    }

    pub fn field_magnitude(&self, p: &Vector3<f64>) -> Result<f64> {
        Ok(self.field.field(p)?.norm())
    }
}

impl<F: MagneticField> Potential for ZeemanPotential<F> {
    fn energy(&self, p: &Vector3<f64>) -> Result<f64> {
        let b = self.field.field(p)?;
        zeeman_potential(&b, &self.spin, &self.constants, p, self.gravity)
    }

    /// Analytic gradient via ∇|B| = Jᵀ·B/|B|.
    fn energy_gradient(&self, p: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        let (b, jac) = self.field.field_jacobian(p)?;
        let mu = self.spin.moment(&self.constants);
        let norm = b.norm();
        let mut grad = if norm > 0.0 { jac.transpose() * b * (mu / norm) } else { Vector3::zeros() };
        let mut u = mu * norm;
        if self.gravity {
            u -= self.constants.mass * self.constants.gravity * p.z;
            grad.z -= self.constants.mass * self.constants.gravity;
        }
        Ok((u, grad))
    }

    fn constants(&self) -> PhysicalConstants {
        self.constants
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: PhysicalConstants = PhysicalConstants::RB87;

    #[test]
    fn offset_field_in_microkelvin() {
        let b = Vector3::new(1.15e-4, 0.0, 0.0);
        let u = zeeman_potential(&b, &SpinState::RB87_F2_MF2, &C, &Vector3::zeros(), false).unwrap();
        let uk = C.joule_to_uk(u);
        assert!((uk - 77.25).abs() < 0.05, "{uk}");
    }

    #[test]
    fn lower_hyperfine_state() {
        let b = Vector3::new(0.0, 1e-4, 0.0);
        let u = zeeman_potential(&b, &SpinState::RB87_F1_MFM1, &C, &Vector3::zeros(), false).unwrap();
        assert!((C.joule_to_uk(u) - 33.6).abs() < 0.05);
    }

    #[test]
    fn zero_field_zero_energy() {
        let u = zeeman_potential(&Vector3::zeros(), &SpinState::RB87_F2_MF2, &C, &Vector3::new(0.0, 0.0, 1.0), false).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn untrappable_rejected() {
        let s = SpinState { f: 2, m_f: -2, g_f: 0.5 };
        assert!(matches!(
            zeeman_potential(&Vector3::zeros(), &s, &C, &Vector3::zeros(), false),
            Err(Error::UntrappableState { .. })
        ));
        let s = SpinState { f: 1, m_f: 0, g_f: -0.5 };
        assert!(!s.is_trappable());
    }
}
