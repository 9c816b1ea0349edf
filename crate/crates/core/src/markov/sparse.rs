use std::ops::Deref;

use crate::error::{check_len, Error, Result};
use crate::markov::dense::DenseMatrix;
use crate::markov::vector::DenseVector;

/// Tolerance on row sums of a stochastic matrix.
pub const STOCHASTIC_ROW_TOLERANCE: f64 = 1e-12;
/// Tolerance on row sums of a generator matrix.
pub const GENERATOR_ROW_TOLERANCE: f64 = 1e-9;

/// Compressed sparse row storage with strictly increasing column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn try_new(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != rows + 1 {
            return Err(Error::MalformedSparse(format!(
                "expected {} row offsets, found {}",
                rows + 1,
                row_offsets.len()
            )));
        }
        if row_offsets[0] != 0 || row_offsets[rows] != col_indices.len() {
            return Err(Error::MalformedSparse(
                "row offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(Error::MalformedSparse(
                "column index and value arrays differ in length".into(),
            ));
        }
        for i in 0..rows {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if start > end {
                return Err(Error::MalformedSparse(format!(
                    "row offsets decrease at row {i}"
                )));
            }
            let cols_i = &col_indices[start..end];
            if cols_i.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::MalformedSparse(format!(
                    "column indices of row {i} are not strictly increasing"
                )));
            }
            if cols_i.last().is_some_and(|&c| c >= cols) {
                return Err(Error::MalformedSparse(format!(
                    "column index out of range in row {i}"
                )));
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(CsrMatrix {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed in input order.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::MalformedSparse(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        // stable: duplicates keep input order
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));
        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = triplets[k];
            if last == Some((i, j)) {
                *values.last_mut().expect("entry present") += v;
            } else {
                col_indices.push(j);
                values.push(v);
                row_offsets[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::try_new(rows, cols, row_offsets, col_indices, values)
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        let mut triplets = Vec::new();
        for i in 0..m.rows() {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), &triplets)
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).1.iter().sum()
    }

    /// `‖M‖_∞`
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `out = vᵀM`, accumulated row-major over the stored entries.
    pub fn left_mul_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.rows, v.len())?;
        check_len(self.cols, out.len())?;
        out.fill(0.0);
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            for k in s..e {
                out[self.col_indices[k]] += vi * self.values[k];
            }
        }
        Ok(())
    }

    pub fn left_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.cols];
        self.left_mul_into(v, &mut out)?;
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Iterates `(row, col, value)` in storage order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }
}

/// Row-stochastic transition matrix `P` of a DTMC.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseStochasticMatrix(CsrMatrix);

impl SparseStochasticMatrix {
    pub fn new(m: CsrMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::NotStochastic(format!(
                "matrix is {}x{}, expected square",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() == 0 {
            return Err(Error::NotStochastic("matrix has no states".into()));
        }
        if let Some(k) = m.values().iter().position(|&v| v < 0.0) {
            return Err(Error::NotStochastic(format!(
                "negative entry {} at storage position {k}",
                m.values()[k]
            )));
        }
        for i in 0..m.rows() {
            let s = m.row_sum(i);
            if (s - 1.0).abs() > STOCHASTIC_ROW_TOLERANCE {
                return Err(Error::NotStochastic(format!("row {i} sums to {s}")));
            }
        }
        Ok(SparseStochasticMatrix(m))
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        Self::new(CsrMatrix::from_dense(m)?)
    }

    pub fn identity(n: usize) -> Self {
        SparseStochasticMatrix(CsrMatrix::identity(n))
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn as_csr(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn into_csr(self) -> CsrMatrix {
        self.0
    }
}

impl Deref for SparseStochasticMatrix {
    type Target = CsrMatrix;

    fn deref(&self) -> &CsrMatrix {
        &self.0
    }
}

/// Infinitesimal generator `Q` of a CTMC.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGeneratorMatrix(CsrMatrix);

impl SparseGeneratorMatrix {
    pub fn new(m: CsrMatrix) -> Result<Self> {
        if m.rows() != m.cols() || m.rows() == 0 {
            return Err(Error::NotGenerator(format!(
                "matrix is {}x{}, expected non-empty square",
                m.rows(),
                m.cols()
            )));
        }
        for i in 0..m.rows() {
            let (cols, vals) = m.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if i == j && v > 0.0 {
                    return Err(Error::NotGenerator(format!(
                        "diagonal entry of row {i} is positive ({v})"
                    )));
                }
                if i != j && v < 0.0 {
                    return Err(Error::NotGenerator(format!(
                        "off-diagonal entry ({i}, {j}) is negative ({v})"
                    )));
                }
            }
            let s = m.row_sum(i);
            if s.abs() > GENERATOR_ROW_TOLERANCE {
                return Err(Error::NotGenerator(format!("row {i} sums to {s}")));
            }
        }
        Ok(SparseGeneratorMatrix(m))
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        Self::new(CsrMatrix::from_dense(m)?)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    /// `max_i |Q(i,i)|`
    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n())
            .map(|i| self.0.get(i, i).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_csr(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn into_csr(self) -> CsrMatrix {
        self.0
    }
}

impl Deref for SparseGeneratorMatrix {
    type Target = CsrMatrix;

    fn deref(&self) -> &CsrMatrix {
        &self.0
    }
}

/// `vᵀP`
pub fn spmv_left(v: &[f64], p: &SparseStochasticMatrix) -> Result<DenseVector> {
    Ok(DenseVector::from_vec_unchecked(p.left_mul(v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> SparseStochasticMatrix {
        SparseStochasticMatrix::from_dense(
            &DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn spmv_on_permutation() {
        assert_eq!(
            spmv_left(&[1.0, 0.0], &swap()).unwrap().as_slice(),
            &[0.0, 1.0]
        );
    }

    #[test]
    fn spmv_keeps_stationary_vector() {
        let p = SparseStochasticMatrix::from_dense(
            &DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        )
        .unwrap();
        assert_eq!(spmv_left(&[0.5, 0.5], &p).unwrap().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        assert!(matches!(
            spmv_left(&[1.0, 0.0, 0.0], &swap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m =
            CsrMatrix::from_triplets(2, 3, &[(1, 2, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 2, 0.5)])
                .unwrap();
        assert_eq!(m.row_offsets(), &[0, 1, 3]);
        assert_eq!(m.col_indices(), &[1, 0, 2]);
        assert_eq!(m.values(), &[2.0, 3.0, 1.5]);
    }

    #[test]
    fn rejects_unsorted_columns() {
        let err = CsrMatrix::try_new(1, 2, vec![0, 2], vec![1, 0], vec![0.5, 0.5]);
        assert!(matches!(err, Err(Error::MalformedSparse(_))));
    }

    #[test]
    fn stochastic_validation() {
        let bad = CsrMatrix::from_triplets(2, 2, &[(0, 0, 0.5), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            SparseStochasticMatrix::new(bad),
            Err(Error::NotStochastic(_))
        ));
        let neg = CsrMatrix::from_triplets(1, 1, &[(0, 0, 1.0)]).unwrap();
        assert!(SparseStochasticMatrix::new(neg).is_ok());
    }

    #[test]
    fn generator_validation() {
        let q = CsrMatrix::from_triplets(
            2,
            2,
            &[(0, 0, -1.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, -2.0)],
        )
        .unwrap();
        let q = SparseGeneratorMatrix::new(q).unwrap();
        assert_eq!(q.max_exit_rate(), 2.0);
        let bad = CsrMatrix::from_triplets(1, 2, &[(0, 0, -1.0)]).unwrap();
        assert!(SparseGeneratorMatrix::new(bad).is_err());
    }
}
