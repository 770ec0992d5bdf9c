//! Physical constants (CODATA 2018) and the Rb-87 atomic mass.

use serde::{Deserialize, Serialize};

/// Identifier written into run manifests and field-map sidecars.
pub const CONSTANTS_VERSION: &str = "CODATA-2018/Rb87";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Vacuum permeability, T·m/A.
    pub mu0: f64,
    /// Bohr magneton, J/T.
    pub mu_b: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Planck constant, J·s.
    pub h: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Gravitational acceleration along +z, m/s² (negative: pointing away from the chip).
    pub gravity: f64,
}

impl PhysicalConstants {
    pub const RB87: PhysicalConstants = PhysicalConstants {
        mu0: 1.256_637_062_12e-6,
        mu_b: 9.274_010_078_3e-24,
        k_b: 1.380_649e-23,
        h: 6.626_070_15e-34,
        mass: 1.443_160_648e-25,
        gravity: -9.806_65,
    };

    /// Energy in joules to temperature-equivalent microkelvin.
    #[inline]
    pub fn joule_to_uk(&self, e: f64) -> f64 {
        e / self.k_b * 1e6
    }

    #[inline]
    pub fn uk_to_joule(&self, t_uk: f64) -> f64 {
        t_uk * 1e-6 * self.k_b
    }

    /// One-dimensional thermal velocity spread sqrt(kB·T/m).
    pub fn thermal_velocity(&self, temperature: f64) -> f64 {
        (self.k_b * temperature / self.mass).sqrt()
    }

    /// Thermal de Broglie wavelength h/sqrt(2π·m·kB·T).
    pub fn de_broglie_wavelength(&self, temperature: f64) -> f64 {
        self.h / (2.0 * std::f64::consts::PI * self.mass * self.k_b * temperature).sqrt()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::RB87
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_positive() {
        let c = PhysicalConstants::RB87;
        for v in [c.mu0, c.mu_b, c.k_b, c.h, c.mass] {
            assert!(v > 0.0);
        }
        assert!(c.gravity < 0.0);
    }

    #[test]
    fn thermal_velocity_at_93_uk() {
        let c = PhysicalConstants::RB87;
        let v = c.thermal_velocity(93e-6);
        assert!((v - 0.0943).abs() < 5e-4, "{v}");
    }

    #[test]
    fn de_broglie_at_102_uk() {
        let c = PhysicalConstants::RB87;
        let l = c.de_broglie_wavelength(102e-6);
        assert!((l - 18.5e-9).abs() < 0.1e-9, "{l}");
    }
}
