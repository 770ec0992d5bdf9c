//! Wire layouts, current settings, and the summed chip field.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::segment::{segment_field, segment_field_jacobian, WireSegment, DEFAULT_CORE_RADIUS};
use super::MagneticField;
use crate::error::{Error, Result};

/// Default hardware bound on any channel current, A.
pub const DEFAULT_CURRENT_LIMIT: f64 = 150.0;

/// A named polyline conductor; kept alongside the flattened segments for export.
#[derive(Debug, Clone, PartialEq)]
pub struct Wire {
    pub name: String,
    pub channel: String,
    /// Polyline vertices in metres.
    pub points: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChipLayout {
    pub wires: Vec<Wire>,
    pub segments: Vec<WireSegment>,
    pub channels: BTreeSet<String>,
}

impl ChipLayout {
    pub fn new(wires: Vec<Wire>) -> Result<Self> {
        let mut segments = Vec::new();
        let mut channels = BTreeSet::new();
        for wire in &wires {
            if wire.points.len() < 2 {
                return Err(Error::Config(format!("wire {} needs at least two points", wire.name)));
            }
            for pair in wire.points.windows(2) {
                segments.push(WireSegment::new(pair[0], pair[1], wire.channel.clone())?);
            }
            channels.insert(wire.channel.clone());
        }
        Ok(Self { wires, segments, channels })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Union of two layouts (segments of `other` appended after ours).
    pub fn merged(&self, other: &ChipLayout) -> Result<Self> {
        let mut wires = self.wires.clone();
        wires.extend(other.wires.iter().cloned());
        Self::new(wires)
    }
}

/// Channel name → signed current in amperes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurrentSetting(pub BTreeMap<String, f64>);

impl CurrentSetting {
    pub fn get(&self, channel: &str) -> Option<f64> {
        self.0.get(channel).copied()
    }

    pub fn set(&mut self, channel: &str, current: f64) {
        self.0.insert(channel.to_string(), current);
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|(k, v)| (k.clone(), v * s)).collect())
    }

    /// Checks that every layout channel is present and within `limit`.
    pub fn validate(&self, layout: &ChipLayout, limit: f64) -> Result<()> {
        for ch in &layout.channels {
            match self.0.get(ch) {
                None => return Err(Error::Config(format!("no current given for channel {ch}"))),
                Some(i) if !i.is_finite() || i.abs() > limit => {
                    return Err(Error::Config(format!("current {i} A on channel {ch} exceeds the {limit} A bound")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Neumaier-compensated accumulator for a 3-vector.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: Vector3<f64>,
    comp: Vector3<f64>,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, v: &Vector3<f64>) {
        for i in 0..3 {
            let t = self.sum[i] + v[i];
            if self.sum[i].abs() >= v[i].abs() {
                self.comp[i] += (self.sum[i] - t) + v[i];
            } else {
                self.comp[i] += (v[i] - t) + self.sum[i];
            }
            self.sum[i] = t;
        }
    }

    fn total(&self) -> Vector3<f64> {
        self.sum + self.comp
    }
}

/// Field of a layout driven by a fixed current setting, plus a uniform bias.
#[derive(Debug, Clone)]
pub struct WireField {
    segments: Vec<(WireSegment, f64)>,
    pub bias: Vector3<f64>,
    pub core_radius: f64,
}

impl WireField {
    pub fn new(layout: &ChipLayout, currents: &CurrentSetting) -> Result<Self> {
        currents.validate(layout, f64::INFINITY)?;
        let segments = layout
            .segments
            .iter()
            .map(|s| (s.clone(), currents.get(&s.channel).unwrap_or(0.0)))
            .filter(|(_, i)| *i != 0.0)
            .collect();
        Ok(Self { segments, bias: Vector3::zeros(), core_radius: DEFAULT_CORE_RADIUS })
    }

    pub fn with_bias(mut self, bias: Vector3<f64>) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_core_radius(mut self, r: f64) -> Self {
        self.core_radius = r;
        self
    }

    /// Distance from `p` to the nearest segment that carries current.
    pub fn nearest_conductor(&self, p: &Vector3<f64>) -> f64 {
        self.segments
            .iter()
            .map(|(s, _)| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}

impl MagneticField for WireField {
    fn field(&self, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        let mut acc = CompensatedSum::default();
        acc.add(&self.bias);
        for (seg, current) in &self.segments {
            acc.add(&segment_field(seg, *current, p, self.core_radius)?);
        }
        Ok(acc.total())
    }

    fn field_jacobian(&self, p: &Vector3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        let mut b = CompensatedSum::default();
        b.add(&self.bias);
        let mut jac = Matrix3::zeros();
        for (seg, current) in &self.segments {
            let (bs, js) = segment_field_jacobian(seg, *current, p, self.core_radius)?;
            b.add(&bs);
            jac += js;
        }
        Ok((b.total(), jac))
    }
}

/// Field of `layout` under `currents` at `p`, plus a uniform `bias`.
pub fn total_field(
    layout: &ChipLayout,
    currents: &CurrentSetting,
    bias: &Vector3<f64>,
    p: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    WireField::new(layout, currents)?.with_bias(*bias).field(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wire(name: &str, pts: &[[f64; 3]]) -> Wire {
        Wire { name: name.into(), channel: name.into(), points: pts.iter().map(|p| Vector3::from(*p)).collect() }
    }

    #[test]
    fn empty_layout_gives_bias() {
        let bias = Vector3::new(1e-4, -2e-5, 3e-6);
        let b = total_field(&ChipLayout::empty(), &CurrentSetting::default(), &bias, &Vector3::new(0.1, 0.2, 0.3)).unwrap();
        assert_eq!(b, bias);
    }

    #[test]
    fn antiparallel_pair_cancels_along_separation() {
        let layout = ChipLayout::new(vec![
            wire("a", &[[-1.0, -1e-3, 0.0], [1.0, -1e-3, 0.0]]),
            wire("b", &[[1.0, 1e-3, 0.0], [-1.0, 1e-3, 0.0]]),
        ])
        .unwrap();
        let mut cur = CurrentSetting::default();
        cur.set("a", 10.0);
        cur.set("b", 10.0);
        let b = total_field(&layout, &cur, &Vector3::zeros(), &Vector3::zeros()).unwrap();
        let single_layout = ChipLayout::new(vec![wire("a", &[[-1.0, -1e-3, 0.0], [1.0, -1e-3, 0.0]])]).unwrap();
        let mut c1 = CurrentSetting::default();
        c1.set("a", 10.0);
        let one = total_field(&single_layout, &c1, &Vector3::zeros(), &Vector3::zeros()).unwrap();
        assert!(b.y.abs() < 1e-15 * b.norm());
        assert!((b.norm() - 2.0 * one.norm()).abs() < 1e-12 * b.norm());
    }

    #[test]
    fn missing_channel_rejected() {
        let layout = ChipLayout::new(vec![wire("a", &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])]).unwrap();
        assert!(WireField::new(&layout, &CurrentSetting::default()).is_err());
        let mut cur = CurrentSetting::default();
        cur.set("a", 200.0);
        assert!(cur.validate(&layout, DEFAULT_CURRENT_LIMIT).is_err());
    }
}
