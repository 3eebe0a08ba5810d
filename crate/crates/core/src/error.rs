use thiserror::Error;

use crate::quantum_numbers::HalfInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("inconsistent sector: |k| = {k} differs from |m_j| = {mj}")]
    InconsistentSector { k: HalfInt, mj: HalfInt },

    #[error("{0} is not in the spectrum of K (must be a nonzero half-odd integer)")]
    NotHalfOdd(String),

    #[error("angular grid size {0} must be a power of two and at least 8")]
    BadAngularGrid(usize),

    #[error("angular grid mismatch: {0} vs {1} samples")]
    GridMismatch(usize, usize),

    #[error("harmonic range |l| <= {l_max} aliases on a {n_angles}-point grid")]
    Aliasing { l_max: i64, n_angles: usize },

    #[error("operator `{op}` cannot act on this representation: {reason}")]
    RepresentationMismatch { op: String, reason: String },

    #[error("momentum |p| = {p:e} is below the regularization floor {floor:e}")]
    BelowMomentumFloor { p: f64, floor: f64 },

    #[error("radial coordinate must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("invalid radial grid: {0}")]
    BadGrid(String),

    #[error("invalid potential: {0}")]
    BadPotential(String),

    #[error("symmetry condition not met: {0}")]
    SymmetryViolated(String),

    #[error("finite-difference oracle limited to {max} points, requested {requested}")]
    OracleTooLarge { requested: usize, max: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),
}
