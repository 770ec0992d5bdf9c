//! Tabulated field for the particle pusher.
//!
//! Stores B and its Jacobian at the nodes of a regular grid (single
//! precision) and interpolates both trilinearly. The Zeeman energy and force
//! are then formed from the interpolated values, so the sharp minimum of |B|
//! is never interpolated directly; B itself varies on the scale of the wire
//! spacing.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::MagneticField;
use crate::error::{Error, Result};

const STRIDE: usize = 12;

#[derive(Debug, Clone)]
pub struct InterpolatedField {
    origin: Vector3<f64>,
    spacing: Vector3<f64>,
    inv_spacing: Vector3<f64>,
    counts: [usize; 3],
    /// Node index offsets of the eight cell corners.
    corners: [usize; 8],
    /// Per node: Bx, By, Bz, then the Jacobian row-major. NaN marks nodes
    /// inside a conductor core.
    data: Vec<[f32; STRIDE]>,
}

impl InterpolatedField {
    /// Tabulate `field` on the box `[lo, hi]` with at most `spacing` between nodes.
    pub fn sample<F: MagneticField>(field: &F, lo: Vector3<f64>, hi: Vector3<f64>, spacing: Vector3<f64>) -> Result<Self> {
        let mut counts = [0usize; 3];
        let mut step = Vector3::zeros();
        for i in 0..3 {
            if !(hi[i] > lo[i]) || !(spacing[i] > 0.0) {
                return Err(Error::Config("interpolation grid needs hi > lo and positive spacing".into()));
            }
            let n = ((hi[i] - lo[i]) / spacing[i]).ceil() as usize + 1;
            counts[i] = n.max(2);
            step[i] = (hi[i] - lo[i]) / (counts[i] - 1) as f64;
        }
        let total = counts[0] * counts[1] * counts[2];
        if total > 200_000_000 / STRIDE {
            return Err(Error::Config(format!("interpolation grid of {total} nodes is too large")));
        }
        let [_, ny, nz] = counts;
        let mut data = vec![[0f32; STRIDE]; total];
        data.par_iter_mut().enumerate().for_each(|(k, node)| {
            let (ix, iy, iz) = (k / (ny * nz), (k / nz) % ny, k % nz);
            let p = lo + Vector3::new(ix as f64 * step.x, iy as f64 * step.y, iz as f64 * step.z);
            match field.field_jacobian(&p) {
                Ok((b, j)) => {
                    for a in 0..3 {
                        node[a] = b[a] as f32;
                        for c in 0..3 {
                            node[3 + 3 * a + c] = j[(a, c)] as f32;
                        }
                    }
                }
                Err(_) => node.fill(f32::NAN),
            }
        });
        let corners = std::array::from_fn(|c| ((c >> 2 & 1) * ny + (c >> 1 & 1)) * nz + (c & 1));
        Ok(Self { origin: lo, spacing: step, inv_spacing: step.map(|s| 1.0 / s), counts, corners, data })
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        let ext = Vector3::new(
            self.spacing.x * (self.counts[0] - 1) as f64,
            self.spacing.y * (self.counts[1] - 1) as f64,
            self.spacing.z * (self.counts[2] - 1) as f64,
        );
        (self.origin, self.origin + ext)
    }

    pub fn memory_bytes(&self) -> usize {
        self.data.len() * std::mem::size_of::<[f32; STRIDE]>()
    }

    #[inline]
    fn interpolate(&self, p: &Vector3<f64>) -> Result<[f64; STRIDE]> {
        let mut base = [0usize; 3];
        let mut frac = [0f64; 3];
        for i in 0..3 {
            let u = (p[i] - self.origin[i]) * self.inv_spacing[i];
            if !(u >= 0.0) || u > (self.counts[i] - 1) as f64 {
                return Err(Error::OutOfDomain);
            }
            let b = (u as usize).min(self.counts[i] - 2);
            base[i] = b;
            frac[i] = u - b as f64;
        }
        let [_, ny, nz] = self.counts;
        let k0 = (base[0] * ny + base[1]) * nz + base[2];
        // Single precision matches the stored values and vectorizes.
        let (fx, fy, fz) = (frac[0] as f32, frac[1] as f32, frac[2] as f32);
        let wx = [1.0 - fx, fx];
        let wy = [1.0 - fy, fy];
        let wz = [1.0 - fz, fz];
        let mut acc = [0f32; STRIDE];
        for (c, off) in self.corners.iter().enumerate() {
            let w = wx[c >> 2 & 1] * wy[c >> 1 & 1] * wz[c & 1];
            let node = &self.data[k0 + off];
            for j in 0..STRIDE {
                acc[j] += w * node[j];
            }
        }
        let out = acc.map(f64::from);
        if out[0].is_nan() {
            return Err(Error::OutOfDomain);
        }
        Ok(out)
    }
}

impl MagneticField for InterpolatedField {
    fn field(&self, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        let v = self.interpolate(p)?;
        Ok(Vector3::new(v[0], v[1], v[2]))
    }

    fn field_jacobian(&self, p: &Vector3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        let v = self.interpolate(p)?;
        Ok((Vector3::new(v[0], v[1], v[2]), Matrix3::from_row_slice(&v[3..])))
    }
}
