pub mod beam;
pub mod cli;
pub mod config;
pub mod constants;
pub mod error;
pub mod kinetics;
pub mod loading;
pub mod magnetostatics;
pub mod optimize;
pub mod potential;
pub mod rng;
pub mod trap;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
