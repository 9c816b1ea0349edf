//! The Arnoldi iteration on `(p₀, P)` and the aggregations it induces.

pub mod aggregation;
pub mod measures;
pub mod persist;
pub mod state;

pub use aggregation::{build_aggregation, build_aggregation_with, ArnoldiAggregation};
pub use measures::{
    closed_form_error, error_bound, error_bound_profile, naive_criteria, orthonormality_defect,
    residual_row_sums, transient_error, transient_errors, NaiveCriteria,
};
pub use state::{ArnoldiOptions, ArnoldiState, Expansion};
