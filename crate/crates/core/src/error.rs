use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wavefunctions live on different grids")]
    GridMismatch,

    #[error("amplitude count {got} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("wavefunction has zero (or non-finite) norm")]
    ZeroNorm,

    #[error("shift {shift} is not a whole number of grid steps (h = {step})")]
    IncommensurateShift { shift: f64, step: f64 },

    #[error("shift of {nodes} nodes leaves fewer than 3 interior nodes")]
    ShiftExceedsWindow { nodes: usize },

    #[error("translation dropped {lost:.3e} of the norm (limit {limit:.0e})")]
    NormLoss { lost: f64, limit: f64 },

    #[error("edge fraction {0} is outside (0, 0.5)")]
    EdgeFraction(f64),

    #[error("window too small: boundary mass {mass:.3e} exceeds {limit:.0e}")]
    WindowTooSmall { mass: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular coefficient: {0}")]
    Singular(&'static str),

    #[error("exponential tilt {tilt} produced a non-normalizable state on this window")]
    TiltOverflow { tilt: f64 },

    #[error("envelope amplitude at node {0} is negative or complex")]
    InvalidEnvelope(usize),

    #[error("grid has no node at x = 0")]
    NoOriginNode,

    #[error("error-measure forms disagree on a mirror-symmetric pair: {from_minus} vs {from_plus}")]
    ErrorMeasureMismatch { from_minus: f64, from_plus: f64 },

    #[error("error measure {0} is outside [0, 1/2]")]
    ErrorMeasureRange(f64),

    #[error("no nodes above the overlap threshold")]
    EmptySupport,

    #[error("qubit amplitudes are not normalized: |alpha|^2 + |beta|^2 = {0}")]
    QubitNorm(f64),

    #[error("branch wavefunction is not normalized: norm^2 = {0}")]
    BranchNorm(f64),

    #[error("marginal position density is degenerate")]
    DegenerateMarginal,
}

impl Error {
    /// Short snake-case tag used in output flags.
    pub fn code(&self) -> &'static str {
        match self {
            Self::InvalidGrid(_) => "invalid_grid",
            Self::GridMismatch => "grid_mismatch",
            Self::LengthMismatch { .. } => "length_mismatch",
            Self::ZeroNorm => "zero_norm",
            Self::IncommensurateShift { .. } => "incommensurate_shift",
            Self::ShiftExceedsWindow { .. } => "shift_exceeds_window",
            Self::NormLoss { .. } => "norm_loss",
            Self::EdgeFraction(_) => "edge_fraction",
            Self::WindowTooSmall { .. } => "window_too_small",
            Self::InvalidParameter(_) => "invalid_parameter",
            Self::Singular(_) => "singular",
            Self::TiltOverflow { .. } => "tilt_overflow",
            Self::InvalidEnvelope(_) => "invalid_envelope",
            Self::NoOriginNode => "no_origin_node",
            Self::ErrorMeasureMismatch { .. } => "error_measure_mismatch",
            Self::ErrorMeasureRange(_) => "error_measure_range",
            Self::EmptySupport => "empty_support",
            Self::QubitNorm(_) => "qubit_norm",
            Self::BranchNorm(_) => "branch_norm",
            Self::DegenerateMarginal => "degenerate_marginal",
        }
    }
}
