use crate::arnoldi::state::{ArnoldiOptions, ArnoldiState};
use crate::error::{check_len, Error, Result};
use crate::markov::chain::{disaggregate, AggregationTriple};
use crate::markov::dense::DenseMatrix;
use crate::markov::sparse::SparseStochasticMatrix;
use crate::markov::vector::DenseVector;

/// An Arnoldi aggregation of size `j`: the triple `(Π = H_j, A = Q_j,
/// π₀ = ‖p₀‖₂e₁)` together with the boundary pair `(h_{j,j+1}, q_{j+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArnoldiAggregation {
    triple: AggregationTriple,
    source_norm: f64,
    boundary_coefficient: f64,
    boundary_vector: Option<Vec<f64>>,
    residual_l1: f64,
}

impl ArnoldiAggregation {
    /// Assembles an aggregation from its parts. `boundary_vector` is `None`
    /// exactly when the Krylov space was detected as invariant.
    pub fn from_parts(
        hessenberg: DenseMatrix,
        basis: DenseMatrix,
        source_norm: f64,
        boundary_coefficient: f64,
        boundary_vector: Option<Vec<f64>>,
        residual_l1: f64,
    ) -> Result<Self> {
        if !(source_norm > 0.0) || !source_norm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "source norm must be positive and finite, got {source_norm}"
            )));
        }
        if !(boundary_coefficient >= 0.0) || !boundary_coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "boundary coefficient must be nonnegative, got {boundary_coefficient}"
            )));
        }
        if !(residual_l1 >= 0.0) || !residual_l1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "residual norm must be nonnegative, got {residual_l1}"
            )));
        }
        let j = hessenberg.rows();
        let mut initial = vec![0.0; j];
        if let Some(first) = initial.first_mut() {
            *first = source_norm;
        }
        let triple = AggregationTriple::new(hessenberg, basis, initial)?;
        if let Some(q) = &boundary_vector {
            check_len(triple.n(), q.len())?;
            if let Some(i) = q.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(ArnoldiAggregation {
            triple,
            source_norm,
            boundary_coefficient,
            boundary_vector,
            residual_l1,
        })
    }

    pub fn dimension(&self) -> usize {
        self.triple.dimension()
    }

    pub fn n(&self) -> usize {
        self.triple.n()
    }

    pub fn triple(&self) -> &AggregationTriple {
        &self.triple
    }

    /// `H_j`
    pub fn hessenberg(&self) -> &DenseMatrix {
        self.triple.step_matrix()
    }

    /// `Q_j`
    pub fn basis(&self) -> &DenseMatrix {
        self.triple.disaggregation()
    }

    /// `π₀ = (‖p₀‖₂, 0, …, 0)`
    pub fn initial(&self) -> &[f64] {
        self.triple.initial()
    }

    /// `‖p₀‖₂`
    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    /// `h_{j,j+1}`
    pub fn boundary_coefficient(&self) -> f64 {
        self.boundary_coefficient
    }

    /// `q_{j+1}`, absent for an invariant aggregation.
    pub fn boundary_vector(&self) -> Option<&[f64]> {
        self.boundary_vector.as_deref()
    }

    /// `‖r_{j+1}‖₁` as computed by the iteration.
    pub fn residual_l1(&self) -> f64 {
        self.residual_l1
    }

    /// True when the Krylov space was found invariant, making the aggregation exact.
    pub fn is_invariant(&self) -> bool {
        self.boundary_vector.is_none()
    }

    /// `π_kᵀ = π₀ᵀH_j^k`
    pub fn aggregated_transient(&self, k: usize) -> Vec<f64> {
        let mut cur = self.initial().to_vec();
        for _ in 0..k {
            cur = hessenberg_step(self.hessenberg(), &cur);
        }
        cur
    }

    /// `π_i` for every `i` in `0..=k`.
    pub fn aggregated_trajectory(&self, k: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(k + 1);
        out.push(self.initial().to_vec());
        for i in 0..k {
            let next = hessenberg_step(self.hessenberg(), &out[i]);
            out.push(next);
        }
        out
    }

    /// `p̃_kᵀ = π_kᵀQ_j`; may have negative entries and need not sum to one.
    pub fn approx_transient(&self, k: usize) -> DenseVector {
        self.lift(&self.aggregated_transient(k))
    }

    /// `πᵀQ_j` for an arbitrary aggregated vector of matching length.
    pub fn lift(&self, pi: &[f64]) -> DenseVector {
        disaggregate(pi, self.basis()).expect("aggregated vector has the aggregation dimension")
    }
}

/// `xᵀH` for a lower Hessenberg `H`, touching only the structurally nonzero part.
pub(crate) fn hessenberg_step(h: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    let j = h.cols();
    let mut out = vec![0.0; j];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let width = (i + 2).min(j);
        for (o, v) in out[..width].iter_mut().zip(&h.row(i)[..width]) {
            *o += xi * v;
        }
    }
    out
}

/// Runs the Arnoldi iteration from `p₀` until dimension `j` or invariance.
pub fn build_aggregation(
    p0: &[f64],
    p: &SparseStochasticMatrix,
    j: usize,
) -> Result<ArnoldiAggregation> {
    build_aggregation_with(p0, p, j, ArnoldiOptions::default())
}

pub fn build_aggregation_with(
    p0: &[f64],
    p: &SparseStochasticMatrix,
    j: usize,
    options: ArnoldiOptions,
) -> Result<ArnoldiAggregation> {
    check_len(p.n(), p0.len())?;
    if j == 0 || j > p.n() {
        return Err(Error::InvalidArgument(format!(
            "target dimension {j} outside 1..={}",
            p.n()
        )));
    }
    let mut state = ArnoldiState::new(p0, p, options)?;
    state.expand_to(p, j)?;
    state.to_aggregation()
}
