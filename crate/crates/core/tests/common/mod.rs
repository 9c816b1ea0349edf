//! Independent dense oracles and seeded corpora shared by the integration tests.
//!
//! Everything here goes through nalgebra dense matrices built entry by entry
//! from the sparse input, so the checks do not reuse the library's own
//! sparse products or cached residuals.

#![allow(dead_code)]

use arnoldi_agg::arnoldi::ArnoldiAggregation;
use arnoldi_agg::markov::{DenseMatrix, SparseStochasticMatrix};
use arnoldi_agg::models::{random_distribution, random_stochastic};
use nalgebra::{DMatrix, DVector, RowDVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dense(p: &SparseStochasticMatrix) -> DMatrix<f64> {
    let n = p.n();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let (cols, vals) = p.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            d[(i, j)] += v;
        }
    }
    d
}

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// `p₀ᵀP^k` for `k = 0..=kmax` by dense row-vector products.
pub fn oracle_transients(p0: &[f64], p: &DMatrix<f64>, kmax: usize) -> Vec<Vec<f64>> {
    let mut x = RowDVector::from_row_slice(p0);
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(x.iter().copied().collect());
    for _ in 0..kmax {
        x = &x * p;
        out.push(x.iter().copied().collect());
    }
    out
}

/// `p₀ᵀP^k` for a single `k`.
pub fn oracle_transient(p0: &[f64], p: &DMatrix<f64>, k: usize) -> Vec<f64> {
    let mut x = RowDVector::from_row_slice(p0);
    for _ in 0..k {
        x = &x * p;
    }
    x.iter().copied().collect()
}

/// `p̃_k = π₀ᵀH^kQ` by dense products.
pub fn oracle_approx(agg: &ArnoldiAggregation, k: usize) -> Vec<f64> {
    let h = to_na(agg.hessenberg());
    let q = to_na(agg.basis());
    let mut pi = RowDVector::from_row_slice(agg.initial());
    for _ in 0..k {
        pi = &pi * &h;
    }
    (pi * q).iter().copied().collect()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `‖M‖_∞`, the largest absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖H_jQ_j + h·e_jq_{j+1}ᵀ − Q_jP‖_∞`; the boundary term is dropped when the aggregation is invariant.
pub fn relation_residual(agg: &ArnoldiAggregation, p: &DMatrix<f64>) -> f64 {
    let h = to_na(agg.hessenberg());
    let q = to_na(agg.basis());
    let mut lhs = &h * &q;
    if let Some(next) = agg.boundary_vector() {
        let j = agg.dimension();
        for (c, v) in next.iter().enumerate() {
            lhs[(j - 1, c)] += agg.boundary_coefficient() * v;
        }
    }
    inf_norm(&(lhs - &q * p))
}

/// `‖H_jQ_j − Q_jP‖_∞`
pub fn dynamic_residual(agg: &ArnoldiAggregation, p: &DMatrix<f64>) -> f64 {
    let h = to_na(agg.hessenberg());
    let q = to_na(agg.basis());
    inf_norm(&(&h * &q - &q * p))
}

/// `max_{i,l} |⟨q_i, q_l⟩ − δ_il|`
pub fn orthonormality_defect(agg: &ArnoldiAggregation) -> f64 {
    let q = to_na(agg.basis());
    let g = &q * q.transpose();
    (g - DMatrix::identity(q.nrows(), q.nrows())).abs().max()
}

pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn numerical_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    singular_values(rows).iter().filter(|&&s| s > tol).count()
}

/// Residual of projecting `v` onto the row space of `Q` (orthonormal rows), in `‖·‖₂`.
pub fn projection_residual(q: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = DVector::from_column_slice(v);
    let coeffs = q * &v;
    (v - q.transpose() * coeffs).norm()
}

/// A chain, an initial distribution and a target dimension.
pub struct Instance {
    pub label: String,
    pub p: SparseStochasticMatrix,
    pub p0: Vec<f64>,
    pub j: usize,
}

/// `count` seeded random sparse chains with `n` in `n_range`, random full-support `p₀`
/// and a target dimension in `j_range` (clipped to `n`).
pub fn random_corpus(
    count: usize,
    n_range: (usize, usize),
    j_range: (usize, usize),
    seed: u64,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|idx| {
            let n = rng.gen_range(n_range.0..=n_range.1);
            let per_row = rng.gen_range(2..=8.min(n));
            let mseed: u64 = rng.gen();
            let p = random_stochastic(n, per_row, mseed).unwrap();
            let p0 = random_distribution(n, mseed ^ 0x9e37_79b9)
                .unwrap()
                .as_slice()
                .to_vec();
            let j = rng.gen_range(j_range.0..=j_range.1).min(n);
            Instance {
                label: format!("#{idx} n={n} per_row={per_row} seed={mseed}"),
                p,
                p0,
                j,
            }
        })
        .collect()
}

/// The corpus shared by the initial-exactness and relation checks.
pub fn main_corpus() -> Vec<Instance> {
    random_corpus(50, (10, 200), (2, 30), 2024)
}

/// Small chains used for the closed-form checks.
pub fn small_corpus() -> Vec<Instance> {
    random_corpus(20, (5, 50), (1, 10), 77)
}
