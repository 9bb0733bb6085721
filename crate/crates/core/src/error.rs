use thiserror::Error;

use crate::fock::ModeLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode {0} is not part of the Fock space")]
    ModeNotInSpace(ModeLabel),

    #[error("photon number {requested} exceeds the truncation N_max = {n_max}")]
    TruncationOverflow { requested: u32, n_max: u32 },

    #[error("truncation N_max = {n_max} drops {tail:.3e} of Poisson weight; need N_max >= {required}")]
    InsufficientTruncation { n_max: u32, required: u32, tail: f64 },

    #[error("observable is not Hermitian")]
    NonHermitian,

    #[error("expectation value has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),

    #[error("bipartition has an empty side")]
    EmptyPartition,

    #[error("no mirror mode with charge {charge} in channel {channel}")]
    MissingMirrorMode { channel: u8, charge: i32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("derivative magnitude {derivative:.3e} below floor at a stationary point; no first-order information")]
    StationaryPoint { derivative: f64 },

    #[error("degenerate scaling grid: {0}")]
    DegenerateGrid(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("detuning grid is not symmetric about the central frequency")]
    AsymmetricGrid,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("undersampled: {0}")]
    Undersampled(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("object profile is not passive: |f| = {0} > 1")]
    NotPassive(f64),

    #[error("profile parse error: {0}")]
    Parse(String),
}
