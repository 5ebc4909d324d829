use thiserror::Error;

use crate::cone::Cone;
use crate::linalg::IntVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sublattice is not saturated; the quotient would have torsion")]
    UnsaturatedSublattice,

    #[error("cone {0} is not strictly convex")]
    NotStrictlyConvex(Cone),

    #[error("cones {first} and {second} do not meet in a common face")]
    FaceToFaceViolation { first: Cone, second: Cone },

    #[error("quasi-fan cones {first} and {second} have different lineality spaces")]
    LinealityMismatch { first: Cone, second: Cone },

    #[error("cone {inner} is not contained in {outer}")]
    NotContained { inner: Cone, outer: Cone },

    #[error("a system of fans needs at least one chart")]
    EmptySystem,

    #[error("chart index {index} out of range ({count} charts)")]
    ChartIndexOutOfRange { index: usize, count: usize },

    #[error("glueing data for ({i},{j}) and ({j},{i}) differ")]
    SymmetryViolation { i: usize, j: usize },

    #[error("triple condition fails for charts ({i},{j},{k}): {cone} lies in D_ij and D_jk but not in D_ik")]
    TripleConditionViolation { i: usize, j: usize, k: usize, cone: Cone },

    #[error("glueing cone {cone} of ({i},{j}) is not a common face of both charts")]
    NotSubfan { i: usize, j: usize, cone: Cone },

    #[error("source cone {cone} maps into no target cone")]
    Incompatible { cone: Cone },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("selection is not saturated: {cone} is p-equivalent to {partner}, which lies outside")]
    NotSaturated { cone: Cone, partner: Cone },

    #[error("point {point} is outside the support")]
    OutsideSupport { point: IntVector },

    #[error("quotient loop exceeded the iteration cap of {cap} steps")]
    IterationCapExceeded { cap: usize },

    #[error("schema error at {path}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Schema {
        path: String,
        line: Option<usize>,
        message: String,
    },

    #[error("validation error in object '{object}': {message}")]
    Validation { object: String, message: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable short name used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::UnsaturatedSublattice => "UnsaturatedSublattice",
            Error::NotStrictlyConvex(_) => "NotStrictlyConvex",
            Error::FaceToFaceViolation { .. } => "FaceToFaceViolation",
            Error::LinealityMismatch { .. } => "LinealityMismatch",
            Error::NotContained { .. } => "NotContained",
            Error::EmptySystem => "EmptySystem",
            Error::ChartIndexOutOfRange { .. } => "ChartIndexOutOfRange",
            Error::SymmetryViolation { .. } => "SymmetryViolation",
            Error::TripleConditionViolation { .. } => "TripleConditionViolation",
            Error::NotSubfan { .. } => "NotSubfan",
            Error::Incompatible { .. } => "Incompatible",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NotSaturated { .. } => "NotSaturated",
            Error::OutsideSupport { .. } => "OutsideSupport",
            Error::IterationCapExceeded { .. } => "IterationCapExceeded",
            Error::Schema { .. } => "SchemaError",
            Error::Validation { .. } => "ValidationError",
            Error::Internal(_) => "InternalError",
        }
    }

    /// Guard and internal failures, as opposed to bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::IterationCapExceeded { .. } | Error::Internal(_))
    }
}
