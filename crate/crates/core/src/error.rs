//! Error types shared across the crate.

use thiserror::Error;

/// Per-block residuals reported when a constrained solve cannot reproduce the
/// target pair matrix exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct OverConstraintReport {
    /// Relative Frobenius residual of the full reconstruction.
    pub residual: f64,
    /// `((group_i, group_j), residual)` for every block whose reconstruction
    /// misses the target, worst first.
    pub block_residuals: Vec<((String, String), f64)>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown {kind} label `{label}`")]
    UnknownLabel { kind: &'static str, label: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entry at ({0}, {1}) is not finite")]
    NonFiniteEntry(usize, usize),

    #[error("matrix is not unitary: residual {residual:.3e} exceeds {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("partition group `{0}` is empty")]
    EmptyGroup(String),

    #[error("mode {0} is not assigned to exactly one partition group")]
    UncoveredMode(usize),

    #[error("unknown partition group `{0}`")]
    UnknownGroup(String),

    #[error("edge connects vertex `{0}` to itself")]
    SelfLoop(String),

    #[error("duplicate edge ({u}, {color_u})--({v}, {color_v})")]
    DuplicateEdge { u: String, color_u: String, v: String, color_v: String },

    #[error("edge weight for ({u}, {color_u})--({v}, {color_v}) is zero or not finite")]
    BadEdgeWeight { u: String, color_u: String, v: String, color_v: String },

    #[error("adjacency entry links two modes of external `{0}`; self-loops are unsupported")]
    AdjacencySelfLoop(String),

    #[error("graph has no perfect matching")]
    NoPerfectMatching,

    #[error("coincidence postselection left no usable terms")]
    EmptyPostselection,

    #[error("state vanishes after amplitude cancellation")]
    ZeroState,

    #[error("number of external modes must be even, got {0}")]
    OddExternalCount(usize),

    #[error("state shape mismatch: ({0} qudits, d={1}) vs ({2} qudits, d={3})")]
    StateShapeMismatch(usize, usize, usize, usize),

    #[error("encoding does not cover {kind} label `{label}`")]
    EncodingGap { kind: &'static str, label: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "no exact block-diagonal solution: residual {:.3e} over {} inconsistent block(s)",
        .0.residual,
        .0.block_residuals.len()
    )]
    OverConstrained(OverConstraintReport),
}

pub type Result<T> = std::result::Result<T, Error>;
