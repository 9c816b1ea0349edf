//! Vectors, dense and sparse matrices, Markov-chain semantics and the naive
//! transient oracle.

pub mod chain;
pub mod dense;
pub mod mtx;
pub mod sparse;
pub mod vector;

pub use chain::{disaggregate, transient_naive, uniformise, AggregationTriple};
pub use dense::{inf_row_sum_norm, DenseMatrix};
pub use sparse::{spmv_left, CsrMatrix, SparseGeneratorMatrix, SparseStochasticMatrix};
pub use vector::{l1_norm, l2_norm, DenseVector, Distribution};
