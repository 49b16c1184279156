use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// The variants are grouped by how a caller is expected to react; the CLI maps
/// them onto exit codes through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("grid size {0} must be a power of two in [512, 2^20]")]
    GridSize(usize),

    #[error("branch index {index} out of range for dimension {dim}")]
    BranchOutOfRange { index: usize, dim: usize },

    #[error("prior is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("infeasible: target lies outside the numerical range (support violation {violation:.3e})")]
    Infeasible { violation: f64 },

    #[error("boundary proximity: target is within {margin:.3e} of the boundary; use the extreme-point path")]
    BoundaryProximity { margin: f64 },

    #[error("normal cone interior: no curvature")]
    NormalConeInterior,

    #[error("not a regular exposed point")]
    NotRegularExposed,

    #[error("dual undefined for dim < 2")]
    DualUndefined,

    #[error("tolerance breakdown: {0}")]
    ToleranceBreakdown(String),

    #[error("infeasible at this mesh")]
    MeshInfeasible,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 input error, 3 infeasible target, 4 internal
    /// tolerance breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible { .. } | Error::BoundaryProximity { .. } | Error::MeshInfeasible => 3,
            Error::ToleranceBreakdown(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
