//! Markov-chain semantics on top of the sparse and dense containers:
//! uniformisation of a CTMC, step-by-step transient distributions and the
//! generic aggregated-system triple `(Π, A, π₀)`.

use crate::error::{check_len, Error, Result};
use crate::markov::dense::DenseMatrix;
use crate::markov::sparse::{CsrMatrix, SparseGeneratorMatrix, SparseStochasticMatrix};
use crate::markov::vector::DenseVector;

/// Safety margin applied to the largest exit rate when no rate is supplied.
pub const DEFAULT_RATE_FACTOR: f64 = 1.001;

/// Negative diagonals of at most this size are rounding artefacts and set to zero.
const DIAGONAL_ROUNDING: f64 = 1e-12;

/// Embeds a CTMC into a DTMC via `P = I + Q/λ`.
///
/// Returns the stochastic matrix together with the rate that was used. When
/// `rate` is `None`, `λ = 1.001 · max_i |Q(i,i)|` (or `1` for the zero
/// generator). The diagonal is formed as `1 − Σ_{j≠i} Q(i,j)/λ`, which equals
/// `1 + Q(i,i)/λ` for a generator with zero row sums.
pub fn uniformise(
    q: &SparseGeneratorMatrix,
    rate: Option<f64>,
) -> Result<(SparseStochasticMatrix, f64)> {
    let max_exit = q.max_exit_rate();
    let lambda = match rate {
        Some(r) => {
            if !(r > 0.0) || !r.is_finite() || r < max_exit {
                return Err(Error::InvalidRate { rate: r, max_exit });
            }
            r
        }
        None if max_exit == 0.0 => 1.0,
        None => DEFAULT_RATE_FACTOR * max_exit,
    };
    let n = q.n();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(q.nnz() + n);
    let mut values = Vec::with_capacity(q.nnz() + n);
    row_offsets.push(0);
    for i in 0..n {
        let (cols, vals) = q.row(i);
        let off_diag: f64 = cols
            .iter()
            .zip(vals)
            .filter(|(&j, _)| j != i)
            .map(|(_, &v)| v / lambda)
            .sum();
        let mut diag = 1.0 - off_diag;
        if diag < 0.0 && diag > -DIAGONAL_ROUNDING {
            // λ equal to this row's exit rate: the exact diagonal is zero.
            diag = 0.0;
        }
        let mut diag_written = false;
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                continue;
            }
            if j > i && !diag_written {
                push_nonzero(&mut col_indices, &mut values, i, diag);
                diag_written = true;
            }
            push_nonzero(&mut col_indices, &mut values, j, v / lambda);
        }
        if !diag_written {
            push_nonzero(&mut col_indices, &mut values, i, diag);
        }
        row_offsets.push(col_indices.len());
    }
    let p = CsrMatrix::try_new(n, n, row_offsets, col_indices, values)?;
    Ok((SparseStochasticMatrix::new(p)?, lambda))
}

fn push_nonzero(cols: &mut Vec<usize>, vals: &mut Vec<f64>, j: usize, v: f64) {
    if v != 0.0 {
        cols.push(j);
        vals.push(v);
    }
}

/// `p_kᵀ = p₀ᵀP^k` by `k` successive sparse products.
///
/// The result is returned as a plain vector: over long horizons the mass can
/// drift from one by more than the distribution tolerance.
pub fn transient_naive(p0: &[f64], p: &SparseStochasticMatrix, k: usize) -> Result<DenseVector> {
    check_len(p.n(), p0.len())?;
    let mut cur = p0.to_vec();
    let mut next = vec![0.0; p.n()];
    for _ in 0..k {
        p.left_mul_into(&cur, &mut next)?;
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(DenseVector::from_vec_unchecked(cur))
}

/// `π_kᵀA`; not necessarily a probability vector.
pub fn disaggregate(pi: &[f64], a: &DenseMatrix) -> Result<DenseVector> {
    Ok(DenseVector::from_vec_unchecked(a.left_mul(pi)?))
}

/// A reduced system of dimension `m ≤ n`: step matrix `Π` (m×m),
/// disaggregation matrix `A` (m×n) and initial aggregated vector `π₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationTriple {
    step: DenseMatrix,
    disaggregation: DenseMatrix,
    initial: Vec<f64>,
}

impl AggregationTriple {
    pub fn new(step: DenseMatrix, disaggregation: DenseMatrix, initial: Vec<f64>) -> Result<Self> {
        let m = step.rows();
        check_len(m, step.cols())?;
        check_len(m, disaggregation.rows())?;
        check_len(m, initial.len())?;
        if m == 0 || m > disaggregation.cols() {
            return Err(Error::InvalidArgument(format!(
                "aggregation dimension {m} must lie in 1..={}",
                disaggregation.cols()
            )));
        }
        if !step.is_all_finite() || !disaggregation.is_all_finite() {
            return Err(Error::InvalidArgument(
                "aggregation has non-finite entries".into(),
            ));
        }
        if let Some(i) = initial.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(AggregationTriple {
            step,
            disaggregation,
            initial,
        })
    }

    pub fn dimension(&self) -> usize {
        self.step.rows()
    }

    /// Number of original states.
    pub fn n(&self) -> usize {
        self.disaggregation.cols()
    }

    /// `Π`
    pub fn step_matrix(&self) -> &DenseMatrix {
        &self.step
    }

    /// `A`
    pub fn disaggregation(&self) -> &DenseMatrix {
        &self.disaggregation
    }

    /// `π₀`
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// `π_kᵀ = π₀ᵀΠ^k`
    pub fn aggregated_transient(&self, k: usize) -> Vec<f64> {
        let mut cur = self.initial.clone();
        for _ in 0..k {
            cur = step_left(&self.step, &cur);
        }
        cur
    }

    /// `p̃_kᵀ = π_kᵀA`
    pub fn approx_transient(&self, k: usize) -> DenseVector {
        let pi = self.aggregated_transient(k);
        disaggregate(&pi, &self.disaggregation).expect("dimensions checked at construction")
    }
}

/// `xᵀM` for square `M`, skipping zero entries of `x`.
pub(crate) fn step_left(m: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.cols()];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(m.row(i)) {
            *o += xi * v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn uniformise_symmetric_two_state() {
        let q =
            SparseGeneratorMatrix::from_dense(&dense(&[vec![-1.0, 1.0], vec![1.0, -1.0]])).unwrap();
        let (p, lambda) = uniformise(&q, Some(2.0)).unwrap();
        assert_eq!(lambda, 2.0);
        assert_eq!(p.to_dense(), dense(&[vec![0.5, 0.5], vec![0.5, 0.5]]));
    }

    #[test]
    fn uniformise_zero_generator_is_identity() {
        let q = SparseGeneratorMatrix::new(CsrMatrix::from_triplets(3, 3, &[]).unwrap()).unwrap();
        let (p, lambda) = uniformise(&q, Some(1.0)).unwrap();
        assert_eq!(lambda, 1.0);
        assert_eq!(p.to_dense(), DenseMatrix::identity(3));
        let (_, default_rate) = uniformise(&q, None).unwrap();
        assert_eq!(default_rate, 1.0);
    }

    #[test]
    fn uniformise_three_cycle() {
        // 0 -> 1 at rate 2, 1 -> 2 at rate 3, 2 -> 0 at rate 4
        let q = SparseGeneratorMatrix::from_dense(&dense(&[
            vec![-2.0, 2.0, 0.0],
            vec![0.0, -3.0, 3.0],
            vec![4.0, 0.0, -4.0],
        ]))
        .unwrap();
        let (p, _) = uniformise(&q, Some(4.0)).unwrap();
        let expected = dense(&[
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.25, 0.75],
            vec![1.0, 0.0, 0.0],
        ]);
        assert_eq!(p.to_dense(), expected);
        for i in 0..3 {
            assert!((p.row_sum(i) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn uniformise_rejects_small_rate() {
        let q =
            SparseGeneratorMatrix::from_dense(&dense(&[vec![-3.0, 3.0], vec![0.0, 0.0]])).unwrap();
        assert!(matches!(
            uniformise(&q, Some(2.0)),
            Err(Error::InvalidRate { .. })
        ));
        let (_, lambda) = uniformise(&q, None).unwrap();
        assert!((lambda - 3.003).abs() < 1e-12);
    }

    #[test]
    fn naive_transient_period_two() {
        let p =
            SparseStochasticMatrix::from_dense(&dense(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert_eq!(
            transient_naive(&[1.0, 0.0], &p, 3).unwrap().as_slice(),
            &[0.0, 1.0]
        );
        assert_eq!(
            transient_naive(&[1.0, 0.0], &p, 0).unwrap().as_slice(),
            &[1.0, 0.0]
        );
    }

    #[test]
    fn naive_transient_identity() {
        let p = SparseStochasticMatrix::identity(3);
        let p0 = [0.2, 0.3, 0.5];
        assert_eq!(transient_naive(&p0, &p, 17).unwrap().as_slice(), &p0);
    }

    #[test]
    fn disaggregate_examples() {
        let a = dense(&[vec![0.2, 0.8]]);
        assert_eq!(disaggregate(&[1.0], &a).unwrap().as_slice(), &[0.2, 0.8]);
        let a = dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert_eq!(
            disaggregate(&[1.0, 1.0], &a).unwrap().as_slice(),
            &[1.0, 1.0, 0.0]
        );
        assert_eq!(
            disaggregate(&[0.0, 0.0], &a).unwrap().as_slice(),
            &[0.0, 0.0, 0.0]
        );
        assert!(disaggregate(&[1.0], &a).is_err());
    }
}
