//! Arnoldi aggregation of finite discrete-time Markov chains.
//!
//! The Arnoldi iteration run on `(p₀, P)` yields an orthonormal basis `Q_j`
//! of the Krylov space `span{p₀ᵀ, p₀ᵀP, …, p₀ᵀP^{j−1}}` and a Hessenberg
//! coefficient matrix `H_j`. Used as a reduced system `(Π = H_j, A = Q_j,
//! π₀ = ‖p₀‖₂e₁)` it reproduces the first `j − 1` transient distributions
//! exactly and is exact for all horizons once the Krylov space is invariant.
//!
//! * [`markov`]: vectors, CSR matrices, uniformisation, the naive oracle.
//! * [`arnoldi`]: the iteration, aggregations and their error formulas.
//! * [`convergence`]: the eigenvector-based stopping criterion and the adaptive driver.
//! * [`models`]: reaction-network CTMCs, the benchmark catalog and test fixtures.
//! * [`cli`]: the `arnagg` command-line front end.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arnoldi;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod markov;
pub mod models;

pub use error::{Error, Result};
