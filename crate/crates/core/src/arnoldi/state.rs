use crate::arnoldi::aggregation::ArnoldiAggregation;
use crate::error::{check_len, Error, Result};
use crate::markov::dense::DenseMatrix;
use crate::markov::sparse::SparseStochasticMatrix;
use crate::markov::vector::{axpy, dot, l1_norm, l2_norm};

/// Knobs of the Arnoldi iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArnoldiOptions {
    /// `h_{j,j+1} ≤ invariance_tolerance · ‖P‖_∞` is treated as an invariant Krylov space.
    pub invariance_tolerance: f64,
    /// Run a second Gram-Schmidt pass on every new residual.
    pub reorthogonalize: bool,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        ArnoldiOptions {
            invariance_tolerance: 1e-14,
            reorthogonalize: false,
        }
    }
}

/// Result of an expansion attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expansion {
    /// The dimension grew by one.
    Expanded,
    /// The Krylov space is invariant; the state is unchanged and must not be expanded further.
    Invariant,
}

/// An Arnoldi iteration in progress.
///
/// At dimension `j` the state holds `q₁ … q_j`, the rows `1 … j` of the
/// coefficient matrix and the boundary pair `(h_{j,j+1}, q_{j+1})`. Rows are
/// oriented so that `H_jQ_j + h_{j,j+1}e_jq_{j+1}ᵀ = Q_jP`, which makes `H_j`
/// lower Hessenberg: row `i` is nonzero only in columns `1 … i+1`.
///
/// Every row is final once computed, so the prefix of a longer run is exactly
/// the state a shorter run would have produced.
#[derive(Debug, Clone)]
pub struct ArnoldiState {
    n: usize,
    /// `q₁ … q_j`, row-major.
    basis: Vec<f64>,
    /// Row `i` holds `h_{i,1} … h_{i,i+1}`.
    rows: Vec<Vec<f64>>,
    /// `‖Σ_{l≤i} h_{i,l}q_l − q_iᵀP‖₁`: row sums of `|H_iQ_i − Q_iP|` for the last row.
    open_residual: Vec<f64>,
    /// Same, including `h_{i,i+1}q_{i+1}`; `None` when `q_{i+1}` was not formed.
    closed_residual: Vec<Option<f64>>,
    /// `‖r_{i+1}‖₁` per row.
    residual_l1: Vec<f64>,
    q_next: Option<Vec<f64>>,
    source_norm: f64,
    threshold: f64,
    options: ArnoldiOptions,
}

impl ArnoldiState {
    /// Starts the iteration from `q₁ = p₀/‖p₀‖₂` and computes the first row.
    pub fn new(p0: &[f64], p: &SparseStochasticMatrix, options: ArnoldiOptions) -> Result<Self> {
        check_len(p.n(), p0.len())?;
        if let Some(i) = p0.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let source_norm = l2_norm(p0);
        if source_norm == 0.0 {
            return Err(Error::ZeroInitialVector);
        }
        let mut state = ArnoldiState {
            n: p.n(),
            basis: p0.iter().map(|x| x / source_norm).collect(),
            rows: Vec::new(),
            open_residual: Vec::new(),
            closed_residual: Vec::new(),
            residual_l1: Vec::new(),
            q_next: None,
            source_norm,
            threshold: options.invariance_tolerance * p.inf_norm(),
            options,
        };
        state.compute_row(p)?;
        Ok(state)
    }

    /// One outer pass of the iteration: appends `q_{j+1}` and computes row `j+1`.
    ///
    /// Fails at `j = n`, which is only reachable when the last residual did not vanish.
    pub fn expand(&mut self, p: &SparseStochasticMatrix) -> Result<Expansion> {
        check_len(self.n, p.n())?;
        if self.q_next.is_none() {
            return Ok(Expansion::Invariant);
        }
        if self.dimension() == self.n {
            return Err(Error::InvalidArgument(format!(
                "cannot expand beyond the {} states of the chain",
                self.n
            )));
        }
        let q = self.q_next.take().expect("checked above");
        self.basis.extend_from_slice(&q);
        self.compute_row(p)?;
        Ok(Expansion::Expanded)
    }

    /// Expands until `target` (at most `n`) is reached or the space becomes invariant.
    pub fn expand_to(&mut self, p: &SparseStochasticMatrix, target: usize) -> Result<usize> {
        while self.dimension() < target.min(self.n) {
            if self.expand(p)? == Expansion::Invariant {
                break;
            }
        }
        Ok(self.dimension())
    }

    fn compute_row(&mut self, p: &SparseStochasticMatrix) -> Result<()> {
        let n = self.n;
        let j = self.basis.len() / n;
        let qp = p.left_mul(self.basis_row(j - 1))?;
        let mut r = qp.clone();
        let mut row = vec![0.0; j + 1];
        // `acc` collects Σ_l h_l q_l in the same order as `residual_row_l1`, so the
        // cached residuals agree bit-for-bit with a recomputation from scratch.
        let mut acc = vec![0.0; n];
        for (i, h) in row.iter_mut().take(j).enumerate() {
            let qi = &self.basis[i * n..(i + 1) * n];
            *h = dot(&r, qi);
            let c = *h;
            for ((rx, ax), qx) in r.iter_mut().zip(acc.iter_mut()).zip(qi) {
                *rx -= c * qx;
                *ax += c * qx;
            }
        }
        if self.options.reorthogonalize {
            for (i, h) in row.iter_mut().take(j).enumerate() {
                let qi = &self.basis[i * n..(i + 1) * n];
                let c = dot(&r, qi);
                *h += c;
                axpy(&mut r, -c, qi);
            }
            acc.iter_mut().for_each(|a| *a = 0.0);
            for (i, &c) in row.iter().take(j).enumerate() {
                axpy(&mut acc, c, &self.basis[i * n..(i + 1) * n]);
            }
        }
        let h_next = l2_norm(&r);
        row[j] = h_next;
        self.residual_l1.push(l1_norm(&r));
        self.open_residual.push(distance_l1(&acc, None, &qp));
        // At `j = n` the residual vanishes in exact arithmetic. If it does not,
        // the basis has lost orthogonality, and the boundary pair is kept so that
        // the aggregation is not mistaken for an exact one.
        if h_next > self.threshold {
            for x in r.iter_mut() {
                *x /= h_next;
            }
            self.closed_residual
                .push(Some(distance_l1(&acc, Some((h_next, &r)), &qp)));
            self.q_next = Some(r);
        } else {
            self.closed_residual.push(None);
            self.q_next = None;
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Number of states of the chain.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `‖p₀‖₂`
    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    pub fn options(&self) -> ArnoldiOptions {
        self.options
    }

    /// Absolute threshold below which `h_{j,j+1}` signals invariance.
    pub fn invariance_threshold(&self) -> f64 {
        self.threshold
    }

    /// `h_{j,j+1}` at the current dimension.
    pub fn h_next(&self) -> f64 {
        self.boundary_coefficient(self.dimension())
    }

    /// `q_{j+1}` at the current dimension.
    pub fn q_next(&self) -> Option<&[f64]> {
        self.q_next.as_deref()
    }

    pub fn is_invariant(&self) -> bool {
        self.q_next.is_none()
    }

    /// `q_{i+1}` (zero-based row `i`).
    pub fn basis_row(&self, i: usize) -> &[f64] {
        &self.basis[i * self.n..(i + 1) * self.n]
    }

    fn check_prefix(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.dimension() {
            return Err(Error::InvalidArgument(format!(
                "prefix dimension {j} outside 1..={}",
                self.dimension()
            )));
        }
        Ok(())
    }

    /// `h_{j,j+1}` of the size-`j` prefix.
    pub fn boundary_coefficient(&self, j: usize) -> f64 {
        self.rows[j - 1][j]
    }

    /// `q_{j+1}` of the size-`j` prefix, if it was formed.
    pub fn boundary_vector(&self, j: usize) -> Option<&[f64]> {
        if j < self.dimension() {
            Some(self.basis_row(j))
        } else {
            self.q_next()
        }
    }

    /// `H_j` of the size-`j` prefix.
    pub fn hessenberg(&self, j: usize) -> Result<DenseMatrix> {
        self.check_prefix(j)?;
        let mut h = DenseMatrix::zeros(j, j);
        for (i, row) in self.rows.iter().take(j).enumerate() {
            let width = (i + 2).min(j);
            h.row_mut(i)[..width].copy_from_slice(&row[..width]);
        }
        Ok(h)
    }

    /// `Q_j` of the size-`j` prefix.
    pub fn basis_matrix(&self, j: usize) -> Result<DenseMatrix> {
        self.check_prefix(j)?;
        DenseMatrix::from_row_major(j, self.n, self.basis[..j * self.n].to_vec())
    }

    /// `Σ_i coeffs[i]·q_{i+1}` over the first `coeffs.len()` basis vectors.
    pub fn combine_rows(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_prefix(coeffs.len())?;
        let mut out = vec![0.0; self.n];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                axpy(&mut out, c, self.basis_row(i));
            }
        }
        Ok(out)
    }

    /// Row sums of `|H_jQ_j − Q_jP|` for the size-`j` prefix.
    pub fn residual_row_sums(&self, j: usize) -> Result<Vec<f64>> {
        self.check_prefix(j)?;
        let mut b: Vec<f64> = self.closed_residual[..j - 1]
            .iter()
            .map(|c| c.expect("inner rows always have a successor"))
            .collect();
        b.push(self.open_residual[j - 1]);
        Ok(b)
    }

    /// `‖r_{j+1}‖₁` for the size-`j` prefix.
    pub fn residual_l1(&self, j: usize) -> f64 {
        self.residual_l1[j - 1]
    }

    /// Residual of the Arnoldi relation in `‖·‖_∞` for the size-`j` prefix:
    /// `‖H_jQ_j + h_{j,j+1}e_jq_{j+1}ᵀ − Q_jP‖_∞` when `q_{j+1}` exists, and
    /// `‖H_jQ_j − Q_jP‖_∞` otherwise.
    pub fn relation_residual(&self, j: usize) -> Result<f64> {
        self.check_prefix(j)?;
        let inner = self.closed_residual[..j - 1]
            .iter()
            .map(|c| c.expect("inner rows always have a successor"))
            .fold(0.0, f64::max);
        let last = self.closed_residual[j - 1].unwrap_or(self.open_residual[j - 1]);
        Ok(inner.max(last))
    }

    /// The Arnoldi aggregation of size `j` (a prefix of this run).
    pub fn snapshot(&self, j: usize) -> Result<ArnoldiAggregation> {
        self.check_prefix(j)?;
        let boundary_vector = self.boundary_vector(j).map(<[f64]>::to_vec);
        ArnoldiAggregation::from_parts(
            self.hessenberg(j)?,
            self.basis_matrix(j)?,
            self.source_norm,
            self.boundary_coefficient(j),
            boundary_vector,
            self.residual_l1(j),
        )
    }

    /// The aggregation at the current dimension.
    pub fn to_aggregation(&self) -> Result<ArnoldiAggregation> {
        self.snapshot(self.dimension())
    }
}

/// `‖Σ_l coeffs[l]·q_l (+ extra) − qp‖₁`, accumulating in index order.
pub(crate) fn residual_row_l1(
    coeffs: &[f64],
    basis: &[f64],
    n: usize,
    extra: Option<(f64, &[f64])>,
    qp: &[f64],
) -> f64 {
    let mut acc = vec![0.0; n];
    for (l, &c) in coeffs.iter().enumerate() {
        axpy(&mut acc, c, &basis[l * n..(l + 1) * n]);
    }
    distance_l1(&acc, extra, qp)
}

fn distance_l1(acc: &[f64], extra: Option<(f64, &[f64])>, qp: &[f64]) -> f64 {
    match extra {
        None => acc.iter().zip(qp).map(|(a, b)| (a - b).abs()).sum(),
        Some((c, q)) => acc
            .iter()
            .zip(q)
            .zip(qp)
            .map(|((a, x), b)| ((a + c * x) - b).abs())
            .sum(),
    }
}
