//! Transient errors of an Arnoldi aggregation: the direct comparison
//! against the naive oracle, the closed form driven by the boundary pair,
//! the a-priori bound and the cheap residual diagnostics.

use crate::arnoldi::aggregation::{hessenberg_step, ArnoldiAggregation};
use crate::arnoldi::state::residual_row_l1;
use crate::error::{check_len, Result};
use crate::markov::dense::DenseMatrix;
use crate::markov::sparse::SparseStochasticMatrix;
use crate::markov::vector::{axpy, dot, l1_distance, l1_norm};

/// `‖p̃_k − p_k‖₁` with `p_k` from the naive oracle.
pub fn transient_error(
    agg: &ArnoldiAggregation,
    p0: &[f64],
    p: &SparseStochasticMatrix,
    k: usize,
) -> Result<f64> {
    Ok(transient_errors(agg, p0, p, &[k])?[0])
}

/// `‖p̃_k − p_k‖₁` for several horizons, stepping both systems once up to the largest.
///
/// The result is ordered like `horizons`, which need not be sorted.
pub fn transient_errors(
    agg: &ArnoldiAggregation,
    p0: &[f64],
    p: &SparseStochasticMatrix,
    horizons: &[usize],
) -> Result<Vec<f64>> {
    check_len(agg.n(), p0.len())?;
    check_len(agg.n(), p.n())?;
    let mut order: Vec<usize> = (0..horizons.len()).collect();
    order.sort_by_key(|&i| horizons[i]);
    let mut out = vec![0.0; horizons.len()];
    let mut exact = p0.to_vec();
    let mut scratch = vec![0.0; p.n()];
    let mut pi = agg.initial().to_vec();
    let mut step = 0usize;
    for idx in order {
        while step < horizons[idx] {
            p.left_mul_into(&exact, &mut scratch)?;
            std::mem::swap(&mut exact, &mut scratch);
            pi = hessenberg_step(agg.hessenberg(), &pi);
            step += 1;
        }
        out[idx] = l1_distance(agg.lift(&pi).as_slice(), &exact);
    }
    Ok(out)
}

/// `‖err_k‖₁` evaluated from the boundary pair as
/// `‖Σ_{i=j−1}^{k−1} s_i·h_{j,j+1}·q_{j+1}ᵀP^{k−1−i}‖₁` with `s_i = (π₀ᵀH_j^i)(j)`.
///
/// The sum is accumulated Horner-style, `v ← vP + s_iq_{j+1}`, so the cost is
/// `k − j + 1` sparse products and no matrix power is formed.
pub fn closed_form_error(
    agg: &ArnoldiAggregation,
    p: &SparseStochasticMatrix,
    k: usize,
) -> Result<f64> {
    check_len(agg.n(), p.n())?;
    let j = agg.dimension();
    let Some(q) = agg.boundary_vector() else {
        return Ok(0.0);
    };
    if k < j || agg.boundary_coefficient() == 0.0 {
        return Ok(0.0);
    }
    let mut pi = agg.aggregated_transient(j - 1);
    let mut v = vec![0.0; p.n()];
    axpy(&mut v, pi[j - 1], q);
    let mut scratch = vec![0.0; p.n()];
    for _ in j..k {
        pi = hessenberg_step(agg.hessenberg(), &pi);
        p.left_mul_into(&v, &mut scratch)?;
        std::mem::swap(&mut v, &mut scratch);
        axpy(&mut v, pi[j - 1], q);
    }
    Ok(agg.boundary_coefficient() * l1_norm(&v))
}

/// Row sums `b(i) = Σ_l |(H_jQ_j − Q_jP)(i,l)|`, one row of the difference at a time.
pub fn residual_row_sums(
    hessenberg: &DenseMatrix,
    basis: &DenseMatrix,
    p: &SparseStochasticMatrix,
) -> Result<Vec<f64>> {
    let j = hessenberg.rows();
    check_len(j, hessenberg.cols())?;
    check_len(j, basis.rows())?;
    check_len(basis.cols(), p.n())?;
    let n = p.n();
    let mut qp = vec![0.0; n];
    let mut b = Vec::with_capacity(j);
    for i in 0..j {
        p.left_mul_into(basis.row(i), &mut qp)?;
        let width = (i + 2).min(j);
        b.push(residual_row_l1(
            &hessenberg.row(i)[..width],
            basis.as_slice(),
            n,
            None,
            &qp,
        ));
    }
    Ok(b)
}

/// `Σ_{i=0}^{k−1} ⟨|π_i|, b⟩`, an upper bound on `‖err_k‖₁` for every Arnoldi
/// aggregation of a stochastic matrix.
pub fn error_bound(agg: &ArnoldiAggregation, p: &SparseStochasticMatrix, k: usize) -> Result<f64> {
    Ok(*error_bound_profile(agg, p, k)?
        .last()
        .expect("profile has k + 1 entries"))
}

/// The bound for every horizon `0..=k`, sharing one residual evaluation.
pub fn error_bound_profile(
    agg: &ArnoldiAggregation,
    p: &SparseStochasticMatrix,
    k: usize,
) -> Result<Vec<f64>> {
    let b = residual_row_sums(agg.hessenberg(), agg.basis(), p)?;
    Ok(bound_profile_from_rows(agg, &b, k))
}

pub(crate) fn bound_profile_from_rows(agg: &ArnoldiAggregation, b: &[f64], k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    let mut total = 0.0;
    out.push(total);
    let mut pi = agg.initial().to_vec();
    for _ in 0..k {
        total += pi.iter().zip(b).map(|(x, y)| x.abs() * y).sum::<f64>();
        out.push(total);
        pi = hessenberg_step(agg.hessenberg(), &pi);
    }
    out
}

/// Residual diagnostics that do not involve an eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveCriteria {
    /// `‖r_{j+1}‖₁`
    pub residual_l1: f64,
    /// `|h_{j,j+1}|`
    pub boundary_abs: f64,
    /// `‖H_jQ_j − Q_jP‖_∞`
    pub dynamic_residual_inf: f64,
}

pub fn naive_criteria(
    agg: &ArnoldiAggregation,
    p: &SparseStochasticMatrix,
) -> Result<NaiveCriteria> {
    let b = residual_row_sums(agg.hessenberg(), agg.basis(), p)?;
    Ok(naive_criteria_from_rows(agg, &b))
}

pub(crate) fn naive_criteria_from_rows(agg: &ArnoldiAggregation, b: &[f64]) -> NaiveCriteria {
    let residual_l1 = match agg.boundary_vector() {
        Some(q) => agg.boundary_coefficient() * l1_norm(q),
        None => agg.residual_l1(),
    };
    NaiveCriteria {
        residual_l1,
        boundary_abs: agg.boundary_coefficient().abs(),
        dynamic_residual_inf: b.iter().copied().fold(0.0, f64::max),
    }
}

/// `max_{i,l} |⟨q_i,q_l⟩ − δ_il|`
pub fn orthonormality_defect(basis: &DenseMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..basis.rows() {
        for l in 0..=i {
            let target = if i == l { 1.0 } else { 0.0 };
            worst = worst.max((dot(basis.row(i), basis.row(l)) - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arnoldi::aggregation::build_aggregation;

    fn stochastic(rows: &[Vec<f64>]) -> SparseStochasticMatrix {
        SparseStochasticMatrix::from_dense(&DenseMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn swap_chain_size_one() {
        let p = stochastic(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let agg = build_aggregation(&[1.0, 0.0], &p, 1).unwrap();
        // H₁ = [0], so p̃₁ = 0 while p₁ = (0, 1).
        assert_eq!(agg.hessenberg()[(0, 0)], 0.0);
        assert_eq!(transient_error(&agg, &[1.0, 0.0], &p, 1).unwrap(), 1.0);
        assert_eq!(closed_form_error(&agg, &p, 1).unwrap(), 1.0);
        assert_eq!(transient_error(&agg, &[1.0, 0.0], &p, 0).unwrap(), 0.0);
        assert!(error_bound(&agg, &p, 1).unwrap() >= 1.0);
        assert_eq!(error_bound(&agg, &p, 0).unwrap(), 0.0);
    }

    #[test]
    fn invariant_measures_vanish() {
        let p = stochastic(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let agg = build_aggregation(&[1.0, 0.0], &p, 2).unwrap();
        let c = naive_criteria(&agg, &p).unwrap();
        assert_eq!(c.residual_l1, 0.0);
        assert_eq!(c.boundary_abs, 0.0);
        assert_eq!(c.dynamic_residual_inf, 0.0);
        for k in [0, 1, 7, 100] {
            assert_eq!(closed_form_error(&agg, &p, k).unwrap(), 0.0);
            assert_eq!(error_bound(&agg, &p, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn unsorted_horizons_keep_their_order() {
        let p = stochastic(&[
            vec![0.2, 0.8, 0.0],
            vec![0.0, 0.3, 0.7],
            vec![0.6, 0.0, 0.4],
        ]);
        let agg = build_aggregation(&[1.0, 0.0, 0.0], &p, 1).unwrap();
        let both = transient_errors(&agg, &[1.0, 0.0, 0.0], &p, &[5, 2]).unwrap();
        assert_eq!(
            both[0],
            transient_error(&agg, &[1.0, 0.0, 0.0], &p, 5).unwrap()
        );
        assert_eq!(
            both[1],
            transient_error(&agg, &[1.0, 0.0, 0.0], &p, 2).unwrap()
        );
    }
}
