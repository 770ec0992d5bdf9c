//! No-time-counter DSMC collisions on a uniform cell grid.

use nalgebra::Vector3;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Particle;
use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

/// Hard-sphere s-wave scattering of identical bosons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringModel {
    /// Scattering length, m.
    pub scattering_length: f64,
}

impl ScatteringModel {
    pub fn new(scattering_length: f64) -> Result<Self> {
        if !(scattering_length > 0.0) {
            return Err(Error::Config("scattering length must be positive".into()));
        }
        Ok(Self { scattering_length })
    }

    /// σ = 8π·a².
    pub fn cross_section(&self) -> f64 {
        8.0 * std::f64::consts::PI * self.scattering_length * self.scattering_length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionCellGrid {
    pub origin: [f64; 3],
    pub cell_size: [f64; 3],
    pub extents: [usize; 3],
    /// Cells holding more particles than this signal a misconfigured grid.
    pub max_per_cell: usize,
}

impl CollisionCellGrid {
    /// Grid covering `[lo, hi]` with cells no larger than `cell`.
    pub fn covering(lo: Vector3<f64>, hi: Vector3<f64>, cell: Vector3<f64>) -> Result<Self> {
        let mut extents = [0; 3];
        let mut size = [0.0; 3];
        for i in 0..3 {
            if !(hi[i] > lo[i]) || !(cell[i] > 0.0) {
                return Err(Error::Config("collision grid needs hi > lo and positive cell size".into()));
            }
            extents[i] = ((hi[i] - lo[i]) / cell[i]).ceil().max(1.0) as usize;
            size[i] = (hi[i] - lo[i]) / extents[i] as f64;
        }
        let g = Self { origin: lo.into(), cell_size: size, extents, max_per_cell: 100_000 };
        if g.cell_count() > 50_000_000 {
            return Err(Error::Config(format!("collision grid of {} cells is too large", g.cell_count())));
        }
        Ok(g)
    }

    pub fn cell_count(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_size.iter().product()
    }

    #[inline]
    pub fn cell_of(&self, p: &Vector3<f64>) -> Option<usize> {
        let mut idx = [0usize; 3];
        for i in 0..3 {
            let u = (p[i] - self.origin[i]) / self.cell_size[i];
            if !(u >= 0.0) || u >= self.extents[i] as f64 {
                return None;
            }
            idx[i] = u as usize;
        }
        Some((idx[0] * self.extents[1] + idx[1]) * self.extents[2] + idx[2])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CollisionReport {
    pub candidates: u64,
    pub collisions: u64,
    pub occupied_cells: usize,
}

/// Reorder `particles` by collision cell (stable), particles outside the grid
/// last. Returns `(cell, start, len)` for every occupied cell in cell order.
pub fn sort_by_cell(particles: &mut Vec<Particle>, grid: &CollisionCellGrid) -> Vec<(usize, usize, usize)> {
    let n_cells = grid.cell_count();
    let keys: Vec<usize> = particles.par_iter().map(|p| grid.cell_of(&p.position).unwrap_or(n_cells)).collect();
    let mut counts = vec![0u32; n_cells + 1];
    for &k in &keys {
        counts[k] += 1;
    }
    let mut start = vec![0usize; n_cells + 1];
    let mut acc = 0usize;
    let mut occupied = Vec::new();
    for (c, &n) in counts.iter().enumerate() {
        start[c] = acc;
        if n > 0 && c < n_cells {
            occupied.push((c, acc, n as usize));
        }
        acc += n as usize;
    }
    let mut sorted = Vec::with_capacity(particles.len());
    // Stable placement: destination of each particle, then its inverse.
    let mut dest = vec![0usize; particles.len()];
    for (i, &k) in keys.iter().enumerate() {
        dest[i] = start[k];
        start[k] += 1;
    }
    let mut inverse = vec![0usize; particles.len()];
    for (i, &d) in dest.iter().enumerate() {
        inverse[d] = i;
    }
    sorted.extend(inverse.iter().map(|&i| particles[i]));
    *particles = sorted;
    occupied
}

/// Elastic collisions among particles sharing a cell, for a time `dt`.
///
/// Particles are reordered by cell. Per cell: `M = ½·Nc·(Nc−1)·w·σ·g_max·dt/V`
/// candidate pairs (fractional part resolved randomly), each accepted with
/// probability `g/g_max`, where `g_max = 2·max|v − v̄|` bounds every pair speed
/// in the cell. Accepted pairs get an isotropic new relative velocity of the
/// same magnitude. Random numbers come from the stream `(seed, Collide, step, cell)`.
pub fn collide(
    particles: &mut Vec<Particle>,
    grid: &CollisionCellGrid,
    model: &ScatteringModel,
    dt: f64,
    seed: u64,
    step: u64,
) -> Result<CollisionReport> {
    let cells = sort_by_cell(particles, grid);
    if let Some(&(cell, _, count)) = cells.iter().find(|c| c.2 > grid.max_per_cell) {
        return Err(Error::CellOverflow { cell, count, cap: grid.max_per_cell });
    }
    let sigma = model.cross_section();
    let vol = grid.cell_volume();

    let mut slices: Vec<(usize, &mut [Particle])> = Vec::with_capacity(cells.len());
    let mut rest: &mut [Particle] = particles.as_mut_slice();
    let mut offset = 0;
    for &(cell, start, len) in &cells {
        let (_, tail) = rest.split_at_mut(start - offset);
        let (mine, tail) = tail.split_at_mut(len);
        rest = tail;
        offset = start + len;
        if len >= 2 {
            slices.push((cell, mine));
        }
    }

    let (candidates, collisions) = slices
        .into_par_iter()
        .map(|(cell, ps)| collide_cell(ps, sigma, vol, dt, seed, step, cell as u64))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(CollisionReport { candidates, collisions, occupied_cells: cells.len() })
}

fn collide_cell(ps: &mut [Particle], sigma: f64, vol: f64, dt: f64, seed: u64, step: u64, cell: u64) -> (u64, u64) {
    let n = ps.len();
    let w = ps[0].weight;
    let mean = ps.iter().fold(Vector3::zeros(), |a, p| a + p.velocity) / n as f64;
    let spread = ps.iter().map(|p| (p.velocity - mean).norm()).fold(0.0, f64::max);
    let g_max = 2.0 * spread;
    if g_max == 0.0 {
        return (0, 0);
    }
    let mut rng = stream(seed, Purpose::Collide, step, cell);
    let expected = 0.5 * n as f64 * (n - 1) as f64 * w * sigma * g_max * dt / vol;
    let mut m = expected.floor() as u64;
    if rng.gen::<f64>() < expected - m as f64 {
        m += 1;
    }
    let mut accepted = 0;
    for _ in 0..m {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let g = ps[i].velocity - ps[j].velocity;
        let gn = g.norm();
        if rng.gen::<f64>() * g_max >= gn {
            continue;
        }
        let cos_t = 2.0 * rng.gen::<f64>() - 1.0;
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let g_new = Vector3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t) * gn;
        let vcm = (ps[i].velocity + ps[j].velocity) * 0.5;
        ps[i].velocity = vcm + g_new * 0.5;
        ps[j].velocity = vcm - g_new * 0.5;
        accepted += 1;
    }
    (m, accepted)
}
