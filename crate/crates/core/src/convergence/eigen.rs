//! Left eigenvector of `H_j` whose eigenvalue is closest to one.
//!
//! Both solvers work on `Hᵀ` in complex arithmetic. The dense path takes all
//! eigenvalues from a Schur form and refines the selected one by inverse
//! iteration. The Krylov-Schur path keeps a small projected problem and
//! restarts with the Ritz values nearest to one.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convergence::config::{CriterionConfig, EigensolverKind, DENSE_EIGEN_LIMIT};
use crate::convergence::schur::{complex_schur, real_eigenvalues, reorder_front};
use crate::error::{Error, Result};
use crate::markov::dense::{inf_row_sum_norm, DenseMatrix};
use crate::markov::vector::l1_norm;

/// Residual bound `‖πᵀH − λπᵀ‖₂ ≤ EIGEN_RESIDUAL_TOLERANCE·‖H‖_∞·‖π‖₂` accepted from the solvers.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-8;

const INVERSE_ITERATION_STEPS: usize = 6;
const SHIFT_ATTEMPTS: usize = 5;

const KRYLOV_SUBSPACE: usize = 40;
const KRYLOV_RESTARTS: usize = 1000;
const KRYLOV_TOLERANCE: f64 = 1e-11;

/// A real left eigenvector `π` of `H_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantEigenvector {
    vector: Vec<f64>,
    eigenvalue: f64,
    normalizer: f64,
}

impl DominantEigenvector {
    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    /// `‖πᵀQ_j‖₁` before [`normalized`](Self::normalized) rescaled `π`; `1` before that.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Rescales so that `‖πᵀQ‖₁ = 1` and `Σ(πᵀQ) ≥ 0`.
    pub fn normalized(self, q: &DenseMatrix) -> Result<Self> {
        let lifted = q.left_mul(&self.vector)?;
        self.normalized_by_lift(&lifted)
    }

    /// Same as [`normalized`](Self::normalized), given `πᵀQ` directly.
    pub fn normalized_by_lift(mut self, lifted: &[f64]) -> Result<Self> {
        let norm = l1_norm(lifted);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::EigenSolver(format!(
                "cannot normalize eigenvector, ‖πᵀQ‖₁ = {norm}"
            )));
        }
        let sign = if lifted.iter().sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        for x in &mut self.vector {
            *x *= sign / norm;
        }
        self.normalizer = norm;
        Ok(self)
    }

    /// `‖πᵀH − λπᵀ‖₂`
    pub fn residual(&self, h: &DenseMatrix) -> f64 {
        let ph = h
            .left_mul(&self.vector)
            .expect("eigenvector has the matrix dimension");
        ph.iter()
            .zip(&self.vector)
            .map(|(a, b)| (a - self.eigenvalue * b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// The selected eigenvector had imaginary parts above tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexRejection {
    pub eigenvalue: Complex64,
    /// `max|Im π_i| / max|π_i|` after rotating the largest entry onto the positive real axis.
    pub imaginary_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenOutcome {
    Real(DominantEigenvector),
    Complex(ComplexRejection),
}

/// Index of the value closest to one; ties go to the larger real part, then the smaller index.
pub fn select_closest_to_one(values: &[Complex64]) -> Option<usize> {
    let one = Complex64::new(1.0, 0.0);
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) => {
                let (d, db) = ((v - one).norm(), (values[b] - one).norm());
                if d < db || (d == db && v.re > values[b].re) {
                    best = Some(i);
                }
            }
        }
    }
    best
}

/// Computes the left eigenvector of `h` whose eigenvalue is closest to one.
pub fn dominant_eigenvector(h: &DenseMatrix, cfg: &CriterionConfig) -> Result<EigenOutcome> {
    let j = h.rows();
    if j == 0 || h.cols() != j {
        return Err(Error::InvalidArgument(format!(
            "expected a nonempty square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let h_norm = inf_row_sum_norm(h);
    let (lambda, x) = match cfg.eigensolver {
        EigensolverKind::Dense => dense_pair(h, h_norm, cfg.seed)?,
        EigensolverKind::KrylovSchur => krylov_schur_pair(h, h_norm, cfg.seed)?,
        EigensolverKind::Auto if j <= DENSE_EIGEN_LIMIT => dense_pair(h, h_norm, cfg.seed)?,
        EigensolverKind::Auto => krylov_schur_pair(h, h_norm, cfg.seed)?,
    };
    Ok(classify(lambda, x, cfg.eig_tolerance))
}

fn classify(lambda: Complex64, mut x: Vec<Complex64>, tolerance: f64) -> EigenOutcome {
    let (imax, amax) = x.iter().enumerate().fold((0, 0.0), |(bi, ba), (i, v)| {
        if v.norm() > ba {
            (i, v.norm())
        } else {
            (bi, ba)
        }
    });
    let phase = x[imax].conj() / amax;
    for v in &mut x {
        *v *= phase;
    }
    let imag = x.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let ratio = imag / amax;
    if ratio > tolerance {
        return EigenOutcome::Complex(ComplexRejection {
            eigenvalue: lambda,
            imaginary_ratio: ratio,
        });
    }
    EigenOutcome::Real(DominantEigenvector {
        vector: x.iter().map(|v| v.re / amax).collect(),
        eigenvalue: lambda.re,
        normalizer: 1.0,
    })
}

/// `Hᵀ` as a complex nalgebra matrix.
fn transposed(h: &DenseMatrix) -> DMatrix<Complex64> {
    let j = h.rows();
    DMatrix::from_fn(j, j, |r, c| Complex64::new(h[(c, r)], 0.0))
}

fn random_start(len: usize, seed: u64) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(len, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

fn residual_ok(
    a: &DMatrix<Complex64>,
    lambda: Complex64,
    x: &DVector<Complex64>,
    h_norm: f64,
) -> bool {
    let r = a * x - x * lambda;
    r.norm() <= EIGEN_RESIDUAL_TOLERANCE * h_norm.max(f64::MIN_POSITIVE) * x.norm()
}

fn dense_pair(h: &DenseMatrix, h_norm: f64, seed: u64) -> Result<(Complex64, Vec<Complex64>)> {
    let j = h.rows();
    if j == 1 {
        return Ok((
            Complex64::new(h[(0, 0)], 0.0),
            vec![Complex64::new(1.0, 0.0)],
        ));
    }
    let ht_real = DMatrix::from_fn(j, j, |r, c| h[(c, r)]);
    let values = real_eigenvalues(ht_real)?;
    let idx = select_closest_to_one(&values).expect("nonempty spectrum");
    let lambda = values[idx];
    let a = transposed(h);
    let scale = h_norm.max(f64::MIN_POSITIVE);
    let start = random_start(j, seed);
    for attempt in 0..SHIFT_ATTEMPTS {
        let shift = if attempt == 0 {
            lambda
        } else {
            lambda + Complex64::new(scale * 1e-13 * 10f64.powi(attempt as i32), 0.0)
        };
        let mut m = a.clone();
        for i in 0..j {
            m[(i, i)] -= shift;
        }
        let lu = m.lu();
        let mut x = start.clone();
        for _ in 0..INVERSE_ITERATION_STEPS {
            let Some(y) = lu.solve(&x) else { break };
            let norm = y.norm();
            if !(norm > 0.0) || !norm.is_finite() {
                break;
            }
            x = y / Complex64::new(norm, 0.0);
            if residual_ok(&a, lambda, &x, h_norm) {
                return Ok((lambda, x.iter().copied().collect()));
            }
        }
    }
    Err(Error::EigenSolver(format!(
        "inverse iteration did not reach the residual tolerance for eigenvalue {lambda}"
    )))
}

/// `y = Hᵀx`, using the lower Hessenberg structure of `H`.
fn apply_transposed(h: &DenseMatrix, x: &[Complex64], y: &mut [Complex64]) {
    let j = h.rows();
    y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for (i, xi) in x.iter().enumerate() {
        if xi.norm_sqr() == 0.0 {
            continue;
        }
        let width = (i + 2).min(j);
        for (yc, hv) in y[..width].iter_mut().zip(&h.row(i)[..width]) {
            *yc += xi * hv;
        }
    }
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `Σ_c basis[c]·coeffs[c]`
fn combine(basis: &[Vec<Complex64>], coeffs: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); basis[0].len()];
    for (v, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * c;
        }
    }
    out
}

/// Krylov-Schur iteration for the eigenpair of `Hᵀ` closest to one.
///
/// Maintains `A V_k = V_k B_k + v_{k+1}bᵀ` with `A = Hᵀ`; restarts keep the
/// Schur vectors of the Ritz values nearest to one.
fn krylov_schur_pair(
    h: &DenseMatrix,
    h_norm: f64,
    seed: u64,
) -> Result<(Complex64, Vec<Complex64>)> {
    let j = h.rows();
    let m = KRYLOV_SUBSPACE.min(j);
    if m == j {
        return dense_pair(h, h_norm, seed);
    }
    let keep = (m / 2).max(1);
    let scale = h_norm.max(f64::MIN_POSITIVE);
    let tol = KRYLOV_TOLERANCE * scale;
    let zero = Complex64::new(0.0, 0.0);

    let mut basis: Vec<Vec<Complex64>> = vec![random_start(j, seed).iter().copied().collect()];
    // Rows 0..m hold B, row m holds bᵀ.
    let mut b = DMatrix::from_element(m + 1, m, zero);
    let mut k = 0usize;
    let mut w = vec![zero; j];
    for _ in 0..KRYLOV_RESTARTS {
        let mut size = m;
        while k < m {
            apply_transposed(h, &basis[k], &mut w);
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate().take(k + 1) {
                    let c = inner(v, &w);
                    b[(i, k)] += c;
                    for (wx, vx) in w.iter_mut().zip(v) {
                        *wx -= c * vx;
                    }
                }
            }
            let beta = norm2(&w);
            if beta <= 1e-14 * scale {
                size = k + 1;
                break;
            }
            b[(k + 1, k)] = Complex64::new(beta, 0.0);
            basis.push(w.iter().map(|x| x / beta).collect());
            k += 1;
        }
        let projected = b.view((0, 0), (size, size)).into_owned();
        let (mut u, mut t) = complex_schur(projected)?;
        let ritz: Vec<Complex64> = (0..size).map(|i| t[(i, i)]).collect();
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&x, &y| {
            let (dx, dy) = ((ritz[x] - 1.0).norm(), (ritz[y] - 1.0).norm());
            dx.total_cmp(&dy)
                .then(ritz[y].re.total_cmp(&ritz[x].re))
                .then(x.cmp(&y))
        });
        let kept = keep.min(size);
        reorder_front(&mut t, &mut u, &order[..kept]);
        let lambda = t[(0, 0)];
        if size < m {
            // Invariant Krylov space: the Ritz pairs are exact.
            let x = combine(&basis[..size], u.column(0).iter().copied());
            return Ok((lambda, x));
        }
        let coupling: Vec<Complex64> = (0..m)
            .map(|c| (0..m).map(|r| b[(m, r)] * u[(r, c)]).sum())
            .collect();
        if coupling[0].norm() <= tol {
            let x = combine(&basis[..m], u.column(0).iter().copied());
            return Ok((lambda, x));
        }
        let mut next: Vec<Vec<Complex64>> = (0..kept)
            .map(|c| combine(&basis[..m], u.column(c).iter().copied()))
            .collect();
        next.push(basis.pop().expect("basis holds m + 1 vectors"));
        basis = next;
        b.fill(zero);
        for r in 0..kept {
            for c in r..kept {
                b[(r, c)] = t[(r, c)];
            }
            b[(kept, r)] = coupling[r];
        }
        k = kept;
    }
    Err(Error::EigenSolver(format!(
        "Krylov-Schur did not converge within {KRYLOV_RESTARTS} restarts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: EigensolverKind) -> CriterionConfig {
        let mut c = CriterionConfig::new(0.0);
        c.eigensolver = kind;
        c
    }

    #[test]
    fn scalar_matrix() {
        let h = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        let EigenOutcome::Real(ev) = dominant_eigenvector(&h, &cfg(EigensolverKind::Auto)).unwrap()
        else {
            panic!("expected a real eigenvector")
        };
        assert_eq!(ev.eigenvalue(), 1.0);
        assert_eq!(ev.vector(), &[1.0]);
    }

    #[test]
    fn swap_matrix_selects_one() {
        let h = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let EigenOutcome::Real(ev) =
            dominant_eigenvector(&h, &cfg(EigensolverKind::Dense)).unwrap()
        else {
            panic!("expected a real eigenvector")
        };
        assert!((ev.eigenvalue() - 1.0).abs() < 1e-14);
        let v = ev.vector();
        assert!((v[0] - v[1]).abs() < 1e-12);
        assert!(ev.residual(&h) <= 1e-12);
    }

    #[test]
    fn rotation_is_rejected_as_complex() {
        // Eigenvalues ±i are equally close to one; both have complex eigenvectors.
        let h = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        match dominant_eigenvector(&h, &cfg(EigensolverKind::Dense)).unwrap() {
            EigenOutcome::Complex(c) => {
                assert!((c.eigenvalue.re).abs() < 1e-12);
                assert!(c.imaginary_ratio > 0.5);
            }
            EigenOutcome::Real(_) => panic!("rotation has no real eigenvector"),
        }
    }

    #[test]
    fn tie_break_prefers_larger_real_part_then_smaller_index() {
        let v = [
            Complex64::new(1.0, 0.5),
            Complex64::new(1.0, -0.5),
            Complex64::new(0.5, 0.0),
            Complex64::new(1.5, 0.0),
        ];
        assert_eq!(select_closest_to_one(&v), Some(3));
        assert_eq!(select_closest_to_one(&v[..3]), Some(0));
        let w = [Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0)];
        assert_eq!(select_closest_to_one(&w), Some(1));
        assert_eq!(select_closest_to_one(&[]), None);
    }

    #[test]
    fn krylov_schur_matches_dense() {
        // A lower Hessenberg matrix with a dominant eigenvalue near one.
        let j = 90;
        let mut rows = vec![vec![0.0; j]; j];
        for (i, row) in rows.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate().take((i + 2).min(j)) {
                *v = (((i * 31 + c * 17) % 23) as f64 - 11.0) / 200.0;
            }
            row[i] += 0.3;
        }
        rows[0][0] = 1.0;
        let h = DenseMatrix::from_rows(&rows).unwrap();
        let dense = dominant_eigenvector(&h, &cfg(EigensolverKind::Dense)).unwrap();
        let ks = dominant_eigenvector(&h, &cfg(EigensolverKind::KrylovSchur)).unwrap();
        match (dense, ks) {
            (EigenOutcome::Real(d), EigenOutcome::Real(k)) => {
                assert!((d.eigenvalue() - k.eigenvalue()).abs() < 1e-9);
                let hn = inf_row_sum_norm(&h);
                assert!(
                    k.residual(&h)
                        <= EIGEN_RESIDUAL_TOLERANCE * hn * crate::markov::l2_norm(k.vector())
                );
                let sign = d.vector()[0].signum() * k.vector()[0].signum();
                for (a, b) in d.vector().iter().zip(k.vector()) {
                    assert!((a - sign * b).abs() < 1e-7);
                }
            }
            (d, k) => panic!("unexpected outcomes {d:?} / {k:?}"),
        }
    }
}
