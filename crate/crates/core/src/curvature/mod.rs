//! Normal curvature matrices `P^(r)`, the osculating flag they generate and
//! the checks that tie the flag back to the raw derivatives of `f`.

mod analysis;
mod frame;
mod oracle;
mod verify;

use thiserror::Error;

use crate::immersion::ImmersionError;
use crate::jet::JetError;
use crate::linalg::LinalgError;

pub use analysis::{
    analyze, analyze_jets, analyze_with, curvature_matrix, Analysis, AnalysisOptions,
    CurvatureLevel, FlagReport, OsculatingFlag, StopReason,
};
pub use frame::{
    adapted_frame_fields, derivative_columns, tangent_frame, AdaptedFrame, BasePointFrame,
};
pub use oracle::{oracle_flag_dims, oracle_flag_dims_from_jets};
pub use verify::{
    frame_invariance_residual, random_orthogonal, symmetry_residual, verify_eigen_span,
    verify_frame_invariance, verify_frame_invariance_with, verify_symmetry,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("not an immersion at the base point: Jacobian rank {rank} < {n}")]
    NotAnImmersion { rank: usize, n: usize },
    #[error("jet order exhausted before level {level}")]
    JetOrderExhausted { level: usize },
    #[error("max order must be at least 1")]
    InvalidOrder,
    #[error(transparent)]
    Immersion(#[from] ImmersionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Jet(#[from] JetError),
}
