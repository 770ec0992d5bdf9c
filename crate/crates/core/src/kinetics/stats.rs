//! Ensemble observables: atom number, temperature, peak density, phase-space density.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::Particle;
use crate::error::{Error, Result};
use crate::potential::Potential;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsOptions {
    /// Histogram bin edge as a fraction of the cloud's rms width on each axis.
    pub bin_fraction: f64,
    /// Bins span ±`bin_range` rms widths around the centroid.
    pub bin_range: f64,
    /// Fewer particles than this in the peak bin marks the density unreliable.
    pub min_peak_count: usize,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self { bin_fraction: 0.4, bin_range: 4.0, min_peak_count: 20 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    /// Weighted atom number.
    pub n: f64,
    pub particles: usize,
    /// Kelvin, from the trace of the velocity covariance.
    pub temperature: f64,
    /// Peak density, m⁻³.
    pub n_peak: f64,
    pub psd: f64,
    /// Total (kinetic + potential) energy of all atoms, J.
    pub e_total: f64,
    pub peak_count: usize,
    pub psd_reliable: bool,
}

/// Statistics with the density check enforced.
pub fn stats<P: Potential + ?Sized>(particles: &[Particle], pot: &P, opts: &StatsOptions) -> Result<EnsembleStats> {
    let s = stats_lenient(particles, pot, opts);
    if !s.psd_reliable {
        return Err(Error::Underpopulated { count: s.peak_count, min: opts.min_peak_count });
    }
    Ok(s)
}

/// Statistics that flag, rather than reject, a thinly populated peak bin.
///
/// Sums run sequentially in particle order so results are reproducible. The
/// peak density is the fullest bin of an unsmoothed histogram whose bins are
/// `bin_fraction` of the rms width along x, y and z.
pub fn stats_lenient<P: Potential + ?Sized>(particles: &[Particle], pot: &P, opts: &StatsOptions) -> EnsembleStats {
    let c = pot.constants();
    let count = particles.len();
    let w = particles.first().map_or(0.0, |p| p.weight);
    let n = w * count as f64;
    let mut e_total = 0.0;
    for p in particles {
        e_total += w * (p.kinetic_energy(c.mass) + pot.energy(&p.position).unwrap_or(0.0));
    }
    if count < 2 {
        return EnsembleStats { n, particles: count, temperature: 0.0, n_peak: 0.0, psd: 0.0, e_total, peak_count: count, psd_reliable: false };
    }
    let inv = 1.0 / count as f64;
    let vbar = particles.iter().fold(Vector3::zeros(), |a, p| a + p.velocity) * inv;
    let var_v = particles.iter().fold(0.0, |a, p| a + (p.velocity - vbar).norm_squared()) * inv;
    let temperature = c.mass * var_v / (3.0 * c.k_b);

    let rbar = particles.iter().fold(Vector3::zeros(), |a, p| a + p.position) * inv;
    let var_r = particles.iter().fold(Vector3::zeros(), |a, p| {
        let d = p.position - rbar;
        a + d.component_mul(&d)
    }) * inv;
    let (n_peak, peak_count) = peak_density(particles, &rbar, &var_r.map(f64::sqrt), w, opts);
    let psd = if temperature > 0.0 { n_peak * c.de_broglie_wavelength(temperature).powi(3) } else { 0.0 };
    EnsembleStats {
        n,
        particles: count,
        temperature,
        n_peak,
        psd,
        e_total,
        peak_count,
        psd_reliable: peak_count >= opts.min_peak_count,
    }
}

fn peak_density(particles: &[Particle], center: &Vector3<f64>, rms: &Vector3<f64>, w: f64, opts: &StatsOptions) -> (f64, usize) {
    if rms.iter().any(|&s| !(s > 0.0)) {
        return (0.0, 0);
    }
    let h = rms * opts.bin_fraction;
    let nb = (2.0 * opts.bin_range / opts.bin_fraction).ceil() as usize;
    let lo = center - rms * opts.bin_range;
    let mut hist = vec![0usize; nb * nb * nb];
    for p in particles {
        let u = (p.position - lo).component_div(&h);
        if u.iter().all(|&v| v >= 0.0 && v < nb as f64) {
            let (i, j, k) = (u.x as usize, u.y as usize, u.z as usize);
            hist[(i * nb + j) * nb + k] += 1;
        }
    }
    let peak = hist.into_iter().max().unwrap_or(0);
    (peak as f64 * w / (h.x * h.y * h.z), peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::HarmonicPotential;
    use crate::rng::{stream, Purpose};
    use crate::PhysicalConstants;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn particles_at_rest_are_cold() {
        let pot = HarmonicPotential::isotropic(100.0);
        let ps: Vec<Particle> = (0..10).map(|i| Particle::new(Vector3::repeat(i as f64 * 1e-6), Vector3::zeros(), 5.0)).collect();
        let s = stats_lenient(&ps, &pot, &StatsOptions::default());
        assert_eq!(s.temperature, 0.0);
        assert_eq!(s.n, 50.0);
        assert_eq!(s.psd, 0.0);
    }

    #[test]
    fn harmonic_equilibrium_peak_density() {
        let c = PhysicalConstants::RB87;
        let t = 100e-6;
        let w = Vector3::new(1200.0, 1100.0, 40.0);
        let pot = HarmonicPotential::new(Vector3::zeros(), w);
        let n = 200_000;
        let sv = (c.k_b * t / c.mass).sqrt();
        let mut rng = stream(1, Purpose::Test, 0, 0);
        let g = Normal::new(0.0, 1.0).unwrap();
        let ps: Vec<Particle> = (0..n)
            .map(|_| {
                let r = Vector3::new(g.sample(&mut rng) * sv / w.x, g.sample(&mut rng) * sv / w.y, g.sample(&mut rng) * sv / w.z);
                let v = Vector3::new(g.sample(&mut rng), g.sample(&mut rng), g.sample(&mut rng)) * sv;
                Particle::new(r, v, 100.0)
            })
            .collect();
        let s = stats(&ps, &pot, &StatsOptions::default()).unwrap();
        assert!((s.temperature / t - 1.0).abs() < 0.01);
        let atoms = n as f64 * 100.0;
        let oracle = atoms * w.x * w.y * w.z * (c.mass / (2.0 * std::f64::consts::PI * c.k_b * t)).powf(1.5);
        assert!((s.n_peak / oracle - 1.0).abs() < 0.1, "{} vs {oracle}", s.n_peak);
    }

    #[test]
    fn sparse_peak_is_flagged() {
        let pot = HarmonicPotential::isotropic(100.0);
        let ps: Vec<Particle> = (0..5).map(|i| Particle::new(Vector3::repeat(i as f64 * 1e-6), Vector3::new(0.01 * i as f64, 0.0, 0.0), 1.0)).collect();
        assert!(matches!(stats(&ps, &pot, &StatsOptions::default()), Err(Error::Underpopulated { .. })));
    }
}
