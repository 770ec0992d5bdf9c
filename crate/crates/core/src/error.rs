//! Error type shared by every module, with the exit-code category the CLI reports.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation point lies inside the guard radius of a line conductor.
    #[error("point lies within {distance:.3e} m of a conductor (core radius {core_radius:.3e} m)")]
    CoreRegion { distance: f64, core_radius: f64 },

    #[error("spin state F={f}, mF={m_f}, gF={g_f} is not magnetically trappable")]
    UntrappableState { f: i32, m_f: i32, g_f: f64 },

    #[error("point outside the sampled potential domain")]
    OutOfDomain,

    #[error("minimizer did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("stationary point is a saddle (Hessian eigenvalue {eigenvalue:.3e})")]
    SaddleDetected { eigenvalue: f64 },

    #[error("Hessian is not positive definite (eigenvalue {eigenvalue:.3e})")]
    NotAMinimum { eigenvalue: f64 },

    #[error("no escape saddle below the search-box boundary energy")]
    Unbounded,

    #[error("potential along the guide path has no entrance barrier")]
    NoBarrier,

    #[error("no bound trap: {0}")]
    NoTrap(String),

    #[error("inconsistent specification: {0}")]
    InconsistentSpec(String),

    #[error("collision cell {cell} holds {count} particles (cap {cap})")]
    CellOverflow { cell: usize, count: usize, cap: usize },

    #[error("peak density cell holds {count} particles (need {min})")]
    Underpopulated { count: usize, min: usize },

    #[error("objective evaluation failed: {0}")]
    ObjectiveFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure classes surfaced by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Config,
    Physics,
    Runtime,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 2,
            Category::Physics => 3,
            Category::Runtime => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Config => "config",
            Category::Physics => "physics",
            Category::Runtime => "runtime",
        }
    }
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Config(_) | Error::InconsistentSpec(_) => Category::Config,
            Error::CoreRegion { .. }
            | Error::UntrappableState { .. }
            | Error::NoConvergence { .. }
            | Error::SaddleDetected { .. }
            | Error::NotAMinimum { .. }
            | Error::Unbounded
            | Error::NoBarrier
            | Error::NoTrap(_) => Category::Physics,
            Error::OutOfDomain
            | Error::CellOverflow { .. }
            | Error::Underpopulated { .. }
            | Error::ObjectiveFailure(_)
            | Error::Io(_) => Category::Runtime,
        }
    }

    /// Short machine-readable tag, e.g. `NoTrap`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CoreRegion { .. } => "CoreRegion",
            Error::UntrappableState { .. } => "UntrappableState",
            Error::OutOfDomain => "OutOfDomain",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SaddleDetected { .. } => "SaddleDetected",
            Error::NotAMinimum { .. } => "NotAMinimum",
            Error::Unbounded => "Unbounded",
            Error::NoBarrier => "NoBarrier",
            Error::NoTrap(_) => "NoTrap",
            Error::InconsistentSpec(_) => "InconsistentSpec",
            Error::CellOverflow { .. } => "CellOverflow",
            Error::Underpopulated { .. } => "Underpopulated",
            Error::ObjectiveFailure(_) => "ObjectiveFailure",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }
}
