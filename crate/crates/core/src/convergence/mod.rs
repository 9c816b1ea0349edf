//! The eigenvector-based stopping criterion and the adaptive driver that
//! expands the Arnoldi iteration until it is met.

pub mod adaptive;
pub mod config;
pub mod criterion;
pub mod eigen;
pub mod schur;

pub use adaptive::{run_adaptive, write_trace_csv, AdaptiveRun, CheckStatus, StopReason, TraceRow};
pub use config::{CriterionConfig, EigensolverKind, DENSE_EIGEN_LIMIT};
pub use criterion::{criterion_from_rows, criterion_value};
pub use eigen::{
    dominant_eigenvector, select_closest_to_one, ComplexRejection, DominantEigenvector,
    EigenOutcome, EIGEN_RESIDUAL_TOLERANCE,
};
