use serde::{Deserialize, Serialize};

use crate::arnoldi::ArnoldiOptions;
use crate::error::{Error, Result};

/// Which eigensolver computes the dominant left eigenvector of `H_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigensolverKind {
    /// Dense up to [`DENSE_EIGEN_LIMIT`], Krylov-Schur above.
    #[default]
    Auto,
    Dense,
    KrylovSchur,
}

/// Largest dimension handled by the dense eigensolver in [`EigensolverKind::Auto`].
pub const DENSE_EIGEN_LIMIT: usize = 512;

/// Settings of the stopping criterion and the adaptive driver.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionConfig {
    /// Threshold for `⟨|π|, |H_jQ_j − Q_jP|·𝟏⟩`. May be `+∞`.
    pub epsilon: f64,
    /// The criterion is evaluated when the dimension is a multiple of this.
    pub check_every: usize,
    /// Dimension cap; `None` means the number of states.
    pub max_dimension: Option<usize>,
    /// Relative size of imaginary parts below which an eigenvector counts as real.
    pub eig_tolerance: f64,
    /// Seed for the eigensolver start vectors.
    pub seed: u64,
    pub eigensolver: EigensolverKind,
    pub arnoldi: ArnoldiOptions,
}

impl CriterionConfig {
    pub fn new(epsilon: f64) -> Self {
        CriterionConfig {
            epsilon,
            check_every: 10,
            max_dimension: None,
            eig_tolerance: 1e-10,
            seed: 0x5eed,
            eigensolver: EigensolverKind::Auto,
            arnoldi: ArnoldiOptions::default(),
        }
    }

    /// Checks the settings against a chain with `n` states and returns the effective dimension cap.
    pub fn validate(&self, n: usize) -> Result<usize> {
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        if self.check_every == 0 {
            return Err(Error::InvalidArgument(
                "check_every must be at least 1".into(),
            ));
        }
        if !(self.eig_tolerance >= 0.0) {
            return Err(Error::InvalidArgument(
                "eig_tolerance must be nonnegative".into(),
            ));
        }
        let cap = self.max_dimension.unwrap_or(n);
        if cap == 0 || cap > n {
            return Err(Error::InvalidArgument(format!(
                "max_dimension {cap} outside 1..={n}"
            )));
        }
        Ok(cap)
    }
}
