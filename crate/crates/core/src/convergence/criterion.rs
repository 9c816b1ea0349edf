use crate::arnoldi::residual_row_sums;
use crate::convergence::eigen::DominantEigenvector;
use crate::error::{check_len, Result};
use crate::markov::dense::DenseMatrix;
use crate::markov::sparse::SparseStochasticMatrix;

/// `⟨|π|, |H_jQ_j − Q_jP|·𝟏_n⟩`, evaluated one row of the difference at a time.
pub fn criterion_value(
    pi: &DominantEigenvector,
    h: &DenseMatrix,
    q: &DenseMatrix,
    p: &SparseStochasticMatrix,
) -> Result<f64> {
    check_len(h.rows(), pi.vector().len())?;
    let b = residual_row_sums(h, q, p)?;
    Ok(criterion_from_rows(pi.vector(), &b))
}

/// `⟨|π|, b⟩` for precomputed row sums `b`.
pub fn criterion_from_rows(pi: &[f64], b: &[f64]) -> f64 {
    pi.iter().zip(b).map(|(x, y)| x.abs() * y).sum()
}
