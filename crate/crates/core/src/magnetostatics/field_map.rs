//! Sampled |B| and potential on rectilinear grids, with CSV export.

use std::io::Write;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{zeeman_potential, MagneticField, SpinState};
use crate::constants::{PhysicalConstants, CONSTANTS_VERSION};
use crate::error::{Error, Result};

pub const FIELD_MAP_HEADER: &str = "x_m,y_m,z_m,Bx_T,By_T,Bz_T,Bmag_G,U_over_kB_uK";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub counts: [usize; 3],
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            if self.counts[i] == 0 {
                return Err(Error::Config("grid counts must be positive".into()));
            }
            if self.counts[i] > 1 && !(self.max[i] > self.min[i]) {
                return Err(Error::Config("grid max must exceed min on sampled axes".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        if self.counts[axis] == 1 {
            self.min[axis]
        } else {
            self.min[axis] + (self.max[axis] - self.min[axis]) * i as f64 / (self.counts[axis] - 1) as f64
        }
    }

    /// Position of row-major sample `k` (z fastest).
    pub fn point(&self, k: usize) -> Vector3<f64> {
        let [_, ny, nz] = self.counts;
        let iz = k % nz;
        let iy = (k / nz) % ny;
        let ix = k / (ny * nz);
        Vector3::new(self.coordinate(0, ix), self.coordinate(1, iy), self.coordinate(2, iz))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub position: Vector3<f64>,
    /// `None` where the point fell inside a conductor core.
    pub field: Option<Vector3<f64>>,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FieldMap {
    pub grid: GridSpec,
    pub samples: Vec<FieldSample>,
    pub constants: PhysicalConstants,
}

impl FieldMap {
    pub fn masked(&self) -> usize {
        self.samples.iter().filter(|s| s.field.is_none()).count()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{FIELD_MAP_HEADER}")?;
        for s in &self.samples {
            let p = s.position;
            match (s.field, s.energy) {
                (Some(b), Some(u)) => writeln!(
                    w,
                    "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
                    p.x,
                    p.y,
                    p.z,
                    b.x,
                    b.y,
                    b.z,
                    b.norm() * 1e4,
                    self.constants.joule_to_uk(u)
                )?,
                _ => writeln!(w, "{:.9e},{:.9e},{:.9e},nan,nan,nan,nan,nan", p.x, p.y, p.z)?,
            }
        }
        Ok(())
    }

    /// Sidecar metadata: grid, layout hash, constants version.
    pub fn metadata(&self, layout_hash: &str) -> serde_json::Value {
        serde_json::json!({
            "grid": self.grid,
            "layout_hash": layout_hash,
            "constants_version": CONSTANTS_VERSION,
            "order": "row-major, z fastest",
            "masked_samples": self.masked(),
        })
    }
}

/// Samples `field` and its Zeeman potential on `grid`. Core-region points are masked.
pub fn field_map<F: MagneticField>(
    field: &F,
    spin: &SpinState,
    constants: &PhysicalConstants,
    gravity: bool,
    grid: &GridSpec,
) -> Result<FieldMap> {
    grid.validate()?;
    let samples = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let position = grid.point(k);
            match field.field(&position) {
                Ok(b) => {
                    let u = zeeman_potential(&b, spin, constants, &position, gravity)?;
                    Ok(FieldSample { position, field: Some(b), energy: Some(u) })
                }
                Err(Error::CoreRegion { .. }) => Ok(FieldSample { position, field: None, energy: None }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldMap { grid: grid.clone(), samples, constants: *constants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnetostatics::{ChipLayout, CurrentSetting, Wire, WireField};

    #[test]
    fn single_point_grid() {
        let layout = ChipLayout::new(vec![Wire {
            name: "w".into(),
            channel: "w".into(),
            points: vec![Vector3::new(-1.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0)],
        }])
        .unwrap();
        let mut cur = CurrentSetting::default();
        cur.set("w", 5.0);
        let f = WireField::new(&layout, &cur).unwrap();
        let grid = GridSpec { min: [0.0, 0.0, -1e-3], max: [0.0, 0.0, -1e-3], counts: [1, 1, 1] };
        let map = field_map(&f, &SpinState::default(), &PhysicalConstants::RB87, false, &grid).unwrap();
        assert_eq!(map.samples.len(), 1);
        assert_eq!(map.samples[0].field.unwrap(), f.field(&Vector3::new(0.0, 0.0, -1e-3)).unwrap());
        let mut out = Vec::new();
        map.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(FIELD_MAP_HEADER));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn core_samples_masked() {
        let layout = ChipLayout::new(vec![Wire {
            name: "w".into(),
            channel: "w".into(),
            points: vec![Vector3::new(-1.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0)],
        }])
        .unwrap();
        let mut cur = CurrentSetting::default();
        cur.set("w", 5.0);
        let f = WireField::new(&layout, &cur).unwrap();
        let grid = GridSpec { min: [0.0, 0.0, -1e-3], max: [0.0, 0.0, 1e-3], counts: [1, 1, 3] };
        let map = field_map(&f, &SpinState::default(), &PhysicalConstants::RB87, false, &grid).unwrap();
        assert_eq!(map.masked(), 1);
        assert!(map.samples[1].field.is_none());
    }
}
