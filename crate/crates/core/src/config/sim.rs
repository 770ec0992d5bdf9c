//! Simulation configuration files.
//!
//! One TOML file describes a complete experiment: which layout to load, the
//! currents, beam, losses, collision model, numerical domain and run
//! settings, plus the parameters of scans and optimizations. Lengths in the
//! file are millimetres (keys ending in `_mm`), temperatures μK, times s,
//! currents A. Every key has a default, so a config only needs the values
//! it changes. `--set section.key=value` overrides are applied to the parsed
//! document before it is interpreted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::layout_file::{LayoutFile, DEFAULT_LAYOUT_TOML};
use crate::beam::{pulsed_schedule, FluxEnvelope};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kinetics::{EvaporationMode, ScatteringModel, StatsOptions};
use crate::loading::{
    BeamSettings, CountMode, DomainSettings, LoadingConfig, LossSettings, SnapshotSettings, TrapSetup,
};
use crate::magnetostatics::SpinState;
use crate::trap::SearchBox;

/// The configuration shipped with the crate.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../../data/default_config.toml");

fn mm(v: [f64; 3]) -> Vector3<f64> {
    Vector3::from(v) * 1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSection {
    /// Path of a layout file, relative to the config file; "builtin" selects
    /// the bundled layout.
    pub file: String,
    pub current_limit_a: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        Self { file: "builtin".into(), current_limit_a: crate::magnetostatics::DEFAULT_CURRENT_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSection {
    pub spin_f: i32,
    pub spin_m_f: i32,
    pub spin_g_f: f64,
    pub gravity: bool,
    pub bias_g: [f64; 3],
    pub minimum_guess_mm: [f64; 3],
    pub search_lo_mm: [f64; 3],
    pub search_hi_mm: [f64; 3],
    pub guide_entrance_mm: [f64; 3],
    pub guide_axis: [f64; 3],
    pub depth_rays: usize,
    pub depth_slices: usize,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            spin_f: 2,
            spin_m_f: 2,
            spin_g_f: 0.5,
            gravity: true,
            bias_g: [0.0; 3],
            minimum_guess_mm: [8.0, 0.0, -3.6],
            search_lo_mm: [-12.0, -6.0, -10.0],
            search_hi_mm: [35.0, 6.0, -0.3],
            guide_entrance_mm: [-6.0, 0.0, -3.6],
            guide_axis: [1.0, 0.0, 0.0],
            depth_rays: 64,
            depth_slices: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub period_s: f64,
    pub atoms_per_launch: f64,
    pub width_s: f64,
    pub max_flux: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamSection {
    pub flux: f64,
    pub mean_velocity: f64,
    pub t_long_uk: f64,
    pub t_rad_uk: f64,
    pub weight: f64,
    /// Omit to use the guide's thermal profile.
    pub transverse_sigma_mm: Option<[f64; 2]>,
    pub start_s: f64,
    pub stop_s: Option<f64>,
    pub pulse: Option<PulseSection>,
}

impl Default for BeamSection {
    fn default() -> Self {
        Self {
            flux: 7.6e7,
            mean_velocity: 0.256,
            t_long_uk: 93.0,
            t_rad_uk: 77.0,
            weight: 380.0,
            transverse_sigma_mm: None,
            start_s: 0.0,
            stop_s: None,
            pulse: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossSection {
    pub tau_background_s: Option<f64>,
    pub tau_crosstalk_s: Option<f64>,
    pub evaporation_threshold_uk: Option<f64>,
    pub evaporation_mode: EvaporationMode,
    pub cull_radius_mm: f64,
}

impl Default for LossSection {
    fn default() -> Self {
        Self {
            tau_background_s: Some(240.0),
            tau_crosstalk_s: Some(12.0),
            evaporation_threshold_uk: None,
            evaporation_mode: EvaporationMode::Energy,
            cull_radius_mm: 2.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollisionSection {
    pub enabled: bool,
    pub scattering_length_m: f64,
    pub lo_mm: [f64; 3],
    pub hi_mm: [f64; 3],
    pub cell_mm: [f64; 3],
    pub max_per_cell: usize,
}

impl Default for CollisionSection {
    fn default() -> Self {
        Self {
            enabled: true,
            scattering_length_m: 5.24e-9,
            lo_mm: [-6.5, -1.2, -4.8],
            hi_mm: [24.0, 1.2, -2.4],
            cell_mm: [0.4, 0.06, 0.06],
            max_per_cell: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainSection {
    pub lo_mm: [f64; 3],
    pub hi_mm: [f64; 3],
    pub spacing_mm: [f64; 3],
}

impl Default for DomainSection {
    fn default() -> Self {
        Self { lo_mm: [-6.5, -2.8, -6.4], hi_mm: [24.0, 2.8, -0.8], spacing_mm: [0.2, 0.1, 0.1] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Omit for 1/(50·f_max) of the analysed trap.
    pub dt_s: Option<f64>,
    pub collide_every: usize,
    pub duration_s: f64,
    pub record_interval_s: f64,
    pub seed: u64,
    pub count_mode: CountMode,
    pub hold_time_s: f64,
    pub min_peak_count: usize,
    pub snapshots: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            dt_s: None,
            collide_every: 10,
            duration_s: 60.0,
            record_interval_s: 0.5,
            seed: 1,
            count_mode: CountMode::Energy,
            hold_time_s: 2.25,
            min_peak_count: 20,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub channel: String,
    pub currents_a: Vec<f64>,
    pub thresholds_uk: Vec<f64>,
    pub loading_time_s: f64,
    pub seeds: Vec<u64>,
    pub capture_window_s: f64,
    pub capture_settle_s: f64,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            channel: "p5".into(),
            currents_a: vec![8.0, 10.0, 12.0, 15.0, 19.0, 24.0, 28.1, 34.0, 40.0, 48.0],
            thresholds_uk: vec![100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 750.0, 900.0, 1100.0],
            loading_time_s: 33.0,
            seeds: vec![1, 2, 3, 4],
            capture_window_s: 1.0,
            capture_settle_s: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub channels: Vec<String>,
    pub lower_a: Vec<f64>,
    pub upper_a: Vec<f64>,
    /// Omit for 10 × the number of free channels.
    pub population: Option<usize>,
    pub f_weight: f64,
    pub crossover: f64,
    pub generations: usize,
    pub evals_per_candidate: usize,
    pub loading_time_s: f64,
    pub seed: u64,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self {
            channels: vec!["p5".into()],
            lower_a: vec![8.0],
            upper_a: vec![48.0],
            population: None,
            f_weight: 0.6,
            crossover: 0.9,
            generations: 10,
            evals_per_candidate: 2,
            loading_time_s: 33.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldMapSection {
    pub lo_mm: [f64; 3],
    pub hi_mm: [f64; 3],
    pub counts: [usize; 3],
}

impl Default for FieldMapSection {
    fn default() -> Self {
        Self { lo_mm: [-8.0, 0.0, -6.0], hi_mm: [24.0, 0.0, -1.0], counts: [161, 1, 51] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub layout: LayoutSection,
    /// Overrides of the layout's own current block.
    pub currents: BTreeMap<String, f64>,
    pub trap: TrapSection,
    pub beam: BeamSection,
    pub losses: LossSection,
    pub collisions: CollisionSection,
    pub domain: DomainSection,
    pub run: RunSection,
    pub scan: ScanSection,
    pub optimize: OptimizeSection,
    pub field_map: FieldMapSection,
}

/// A parsed config together with where it came from and its hash.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: SimConfig,
    /// Directory relative paths in the config refer to.
    pub base_dir: PathBuf,
    /// SHA-256 of the normalized document (after overrides).
    pub hash: String,
}

/// Apply `section.key=value` to a TOML document. The value is read as a TOML
/// value when possible (numbers, booleans, arrays) and as a string otherwise.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form section.key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("bad override key `{path}`")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut table = doc;
    for k in &keys[..keys.len() - 1] {
        let entry = table.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| Error::Config(format!("override path `{path}` crosses a non-table value")))?;
    }
    table.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// SHA-256 (hex) of a document, invariant to whitespace, comments and key order.
pub fn normalized_hash(doc: &toml::Table) -> String {
    let json = serde_json::to_value(doc).expect("toml values are representable as JSON");
    hex::encode(Sha256::digest(json.to_string().as_bytes()))
}

impl SimConfig {
    pub fn parse_with(text: &str, overrides: &[String]) -> Result<(Self, String)> {
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let hash = normalized_hash(&doc);
        let cfg: SimConfig = toml::Value::Table(doc).try_into().map_err(|e| Error::Config(format!("config: {e}")))?;
        Ok((cfg, hash))
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let (config, hash) = Self::parse_with(&text, overrides)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig { config, base_dir, hash })
    }

    /// The bundled default configuration, with overrides.
    pub fn builtin(overrides: &[String]) -> Result<LoadedConfig> {
        let (config, hash) = Self::parse_with(DEFAULT_CONFIG_TOML, overrides)?;
        Ok(LoadedConfig { config, base_dir: PathBuf::new(), hash })
    }

    pub fn layout_file(&self, base_dir: &Path) -> Result<LayoutFile> {
        if self.layout.file == "builtin" {
            LayoutFile::parse(DEFAULT_LAYOUT_TOML)
        } else {
            LayoutFile::load(&base_dir.join(&self.layout.file))
        }
    }

    pub fn spin(&self) -> SpinState {
        SpinState { f: self.trap.spin_f, m_f: self.trap.spin_m_f, g_f: self.trap.spin_g_f }
    }

    pub fn trap_setup(&self, base_dir: &Path) -> Result<TrapSetup> {
        let lf = self.layout_file(base_dir)?;
        let layout = lf.layout()?;
        let mut currents = lf.currents();
        for (k, v) in &self.currents {
            currents.set(k, *v);
        }
        currents.validate(&layout, self.layout.current_limit_a)?;
        let t = &self.trap;
        let axis = Vector3::from(t.guide_axis);
        if !(axis.norm() > 0.0) {
            return Err(Error::Config("trap.guide_axis must be nonzero".into()));
        }
        Ok(TrapSetup {
            layout,
            currents,
            bias: Vector3::from(t.bias_g) * 1e-4,
            spin: self.spin(),
            constants: PhysicalConstants::RB87,
            gravity: t.gravity,
            search_box: SearchBox::new(mm(t.search_lo_mm), mm(t.search_hi_mm)),
            minimum_guess: mm(t.minimum_guess_mm),
            guide_entrance: mm(t.guide_entrance_mm),
            guide_axis: axis.normalize(),
            depth_rays: t.depth_rays,
            depth_slices: t.depth_slices,
        })
    }

    /// Everything needed for a loading run. An unset `dt` becomes zero,
    /// which the loading module resolves from the trap frequencies.
    pub fn loading_config(&self, base_dir: &Path, hash: &str, out_dir: Option<&Path>) -> Result<LoadingConfig> {
        let b = &self.beam;
        let envelope = match &b.pulse {
            Some(p) => pulsed_schedule(p.period_s, p.atoms_per_launch, p.width_s, p.max_flux)?,
            None => FluxEnvelope::Constant,
        };
        let l = &self.losses;
        let c = &self.collisions;
        let scattering = if c.enabled { Some(ScatteringModel::new(c.scattering_length_m)?) } else { None };
        let d = &self.domain;
        let r = &self.run;
        let cfg = LoadingConfig {
            trap: self.trap_setup(base_dir)?,
            beam: BeamSettings {
                flux: b.flux,
                mean_velocity: b.mean_velocity,
                t_long: b.t_long_uk * 1e-6,
                t_rad: b.t_rad_uk * 1e-6,
                weight: b.weight,
                transverse_sigma: b.transverse_sigma_mm.map(|s| [s[0] * 1e-3, s[1] * 1e-3]),
                envelope,
                start: b.start_s,
                stop: b.stop_s,
            },
            losses: LossSettings {
                tau_background: l.tau_background_s,
                tau_crosstalk: l.tau_crosstalk_s,
                evaporation_threshold: l.evaporation_threshold_uk,
                evaporation_mode: l.evaporation_mode,
                cull_radius: l.cull_radius_mm * 1e-3,
            },
            scattering,
            domain: DomainSettings {
                lo: mm(d.lo_mm),
                hi: mm(d.hi_mm),
                spacing: mm(d.spacing_mm),
                collision_lo: mm(c.lo_mm),
                collision_hi: mm(c.hi_mm),
                cell: mm(c.cell_mm),
                max_per_cell: c.max_per_cell,
            },
            dt: r.dt_s.unwrap_or(0.0),
            collide_every: r.collide_every,
            duration: r.duration_s,
            record_interval: r.record_interval_s,
            seed: r.seed,
            count_mode: r.count_mode,
            hold_time: r.hold_time_s,
            stats: StatsOptions { min_peak_count: r.min_peak_count, ..Default::default() },
            snapshots: match (r.snapshots, out_dir) {
                (true, Some(dir)) => Some(SnapshotSettings { dir: dir.join("snapshots"), config_hash: hash.to_string() }),
                _ => None,
            },
            initial: Vec::new(),
        };
        Ok(cfg)
    }
}

impl LoadedConfig {
    pub fn trap_setup(&self) -> Result<TrapSetup> {
        self.config.trap_setup(&self.base_dir)
    }

    pub fn loading_config(&self, out_dir: Option<&Path>) -> Result<LoadingConfig> {
        self.config.loading_config(&self.base_dir, &self.hash, out_dir)
    }

    /// SHA-256 of the normalized layout file actually used.
    pub fn layout_hash(&self) -> Result<String> {
        let lf = self.config.layout_file(&self.base_dir)?;
        let json = serde_json::to_value(&lf).map_err(|e| Error::Config(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(json.to_string().as_bytes())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_config_parses() {
        let c = SimConfig::builtin(&[]).unwrap();
        let lc = c.loading_config(None).unwrap();
        assert_eq!(lc.trap.currents.get("p5"), Some(28.1));
        assert_eq!(lc.beam.weight, c.config.beam.weight);
    }

    #[test]
    fn overrides_apply_and_change_hash() {
        let a = SimConfig::builtin(&[]).unwrap();
        let b = SimConfig::builtin(&["currents.p5=20.0".into(), "run.seed=7".into(), "losses.evaporation_mode=position".into()]).unwrap();
        assert_eq!(b.config.currents.get("p5"), Some(&20.0));
        assert_eq!(b.config.run.seed, 7);
        assert_eq!(b.config.losses.evaporation_mode, EvaporationMode::Position);
        assert_ne!(a.hash, b.hash);
    }

    #[test]
    fn hash_ignores_formatting() {
        let (_, h1) = SimConfig::parse_with("[run]\nseed = 3\nduration_s = 5.0\n", &[]).unwrap();
        let (_, h2) = SimConfig::parse_with("# comment\n[run]\nduration_s=5.0\n\n   seed   =   3\n", &[]).unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let e = SimConfig::parse_with("[run]\nsede = 3\n", &[]).unwrap_err();
        assert_eq!(e.category(), crate::error::Category::Config);
        assert!(SimConfig::parse_with("", &["nodot".into()]).is_err());
    }
}
