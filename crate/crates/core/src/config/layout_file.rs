//! Chip layout files.
//!
//! ```toml
//! [meta]
//! name = "example"
//!
//! [[wire]]
//! name = "g2"
//! channel = "g2"
//! points_mm = [[-80, 0, 40], [-80, 0, 0], [28.5, 0, 0], [28.5, 0, 40]]
//!
//! [currents]
//! g2 = 102.5
//! ```
//!
//! Coordinates are millimetres, currents amperes. Positive current flows from
//! the first polyline vertex towards the last.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnetostatics::{ChipLayout, CurrentSetting, Wire};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutMeta {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireEntry {
    pub name: String,
    pub channel: String,
    pub points_mm: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutFile {
    #[serde(default)]
    pub meta: LayoutMeta,
    #[serde(rename = "wire", default)]
    pub wires: Vec<WireEntry>,
    #[serde(default)]
    pub currents: BTreeMap<String, f64>,
}

impl LayoutFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("layout file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read layout {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn layout(&self) -> Result<ChipLayout> {
        let wires = self
            .wires
            .iter()
            .map(|w| Wire {
                name: w.name.clone(),
                channel: w.channel.clone(),
                points: w.points_mm.iter().map(|p| Vector3::from(*p) * 1e-3).collect(),
            })
            .collect();
        ChipLayout::new(wires)
    }

    pub fn currents(&self) -> CurrentSetting {
        CurrentSetting(self.currents.clone())
    }

    /// Parsed layout and its own current block, validated against each other.
    pub fn resolve(&self, limit: f64) -> Result<(ChipLayout, CurrentSetting)> {
        let layout = self.layout()?;
        let currents = self.currents();
        currents.validate(&layout, limit)?;
        Ok((layout, currents))
    }
}

/// The reconstructed trapping-region layout shipped with the crate.
pub const DEFAULT_LAYOUT_TOML: &str = include_str!("../../data/chip_layout.toml");

pub fn default_layout() -> Result<(ChipLayout, CurrentSetting)> {
    LayoutFile::parse(DEFAULT_LAYOUT_TOML)?.resolve(crate::magnetostatics::DEFAULT_CURRENT_LIMIT)
}
