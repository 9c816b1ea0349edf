//! Complex Schur forms and their reordering.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Iteration budget of the QR algorithm per matrix row.
const QR_ITERATIONS_PER_ROW: usize = 300;

/// `M = U T Uᴴ` with `U` unitary and `T` upper triangular.
pub fn complex_schur(m: DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    let budget = QR_ITERATIONS_PER_ROW * n.max(1);
    let schur = Schur::try_new(m, f64::EPSILON, budget).ok_or_else(|| {
        Error::EigenSolver(format!(
            "QR iteration did not converge within {budget} steps"
        ))
    })?;
    let (u, mut t) = schur.unpack();
    for c in 0..n {
        for r in c + 1..n {
            t[(r, c)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((u, t))
}

/// Eigenvalues of a real square matrix, conjugate pairs included.
pub fn real_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let budget = QR_ITERATIONS_PER_ROW * n.max(1);
    let schur = Schur::try_new(m, f64::EPSILON, budget).ok_or_else(|| {
        Error::EigenSolver(format!(
            "QR iteration did not converge within {budget} steps"
        ))
    })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Rotation `[[c, s], [−s̄, c]]` with real `c` mapping `(f, g)` to `(r, 0)`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    if g.norm() == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let rho = f.norm().hypot(g.norm());
    (f.norm() / rho, (f / f.norm()) * g.conj() / rho)
}

/// `x ← c·x + s·y`, `y ← c·y − s̄·x`.
fn rotate(x: &mut Complex64, y: &mut Complex64, c: f64, s: Complex64) {
    let (a, b) = (*x, *y);
    *x = a * c + s * b;
    *y = b * c - s.conj() * a;
}

/// Exchanges the diagonal entries `k` and `k + 1` of the triangular `t`,
/// updating `u` so that `U T Uᴴ` is preserved.
pub fn swap_adjacent(t: &mut DMatrix<Complex64>, u: &mut DMatrix<Complex64>, k: usize) {
    let n = t.nrows();
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    let (c, s) = givens(t[(k, k + 1)], t22 - t11);
    for col in k + 2..n {
        let (mut x, mut y) = (t[(k, col)], t[(k + 1, col)]);
        rotate(&mut x, &mut y, c, s);
        t[(k, col)] = x;
        t[(k + 1, col)] = y;
    }
    for row in 0..k {
        let (mut x, mut y) = (t[(row, k)], t[(row, k + 1)]);
        rotate(&mut x, &mut y, c, s.conj());
        t[(row, k)] = x;
        t[(row, k + 1)] = y;
    }
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    for row in 0..u.nrows() {
        let (mut x, mut y) = (u[(row, k)], u[(row, k + 1)]);
        rotate(&mut x, &mut y, c, s.conj());
        u[(row, k)] = x;
        u[(row, k + 1)] = y;
    }
}

/// Moves the diagonal entries listed in `wanted` (original positions) to the
/// front, in the given order.
pub fn reorder_front(t: &mut DMatrix<Complex64>, u: &mut DMatrix<Complex64>, wanted: &[usize]) {
    let mut labels: Vec<usize> = (0..t.nrows()).collect();
    for (target, &w) in wanted.iter().enumerate() {
        let mut pos = labels
            .iter()
            .position(|&l| l == w)
            .expect("wanted index in range");
        while pos > target {
            swap_adjacent(t, u, pos - 1);
            labels.swap(pos - 1, pos);
            pos -= 1;
        }
    }
}
