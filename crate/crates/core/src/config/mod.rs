//! Configuration files: chip layouts and simulation settings.

pub mod layout_file;

pub use layout_file::{default_layout, LayoutFile, DEFAULT_LAYOUT_TOML};
pub mod sim;

pub use sim::{LoadedConfig, SimConfig, DEFAULT_CONFIG_TOML};
