use std::sync::Once;

use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::Solve;
use faer::Col;
use num_complex::Complex64;

use crate::sparse::{norm2, ComplexSparseMatrix, ComplexVector};
use crate::{Error, Result};

/// Default relative residual accepted by [`solve_linear`].
pub const DEFAULT_LINEAR_TOL: f64 = 1e-10;

const REFINEMENT_STEPS: usize = 3;

static SEQUENTIAL: Once = Once::new();

/// Sparse LU solve of `A x = b` with iterative refinement.
///
/// Fails with [`Error::Singular`] when the factorisation breaks down or
/// produces non-finite values, and with [`Error::Residual`] when the relative
/// residual stays above `tol`.
pub fn solve_linear(a: &ComplexSparseMatrix, b: &[Complex64], tol: f64) -> Result<ComplexVector> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument(format!("matrix is {}×{}, not square", n, a.ncols())));
    }
    if b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {}, expected {n}",
            b.len()
        )));
    }
    let b_norm = norm2(b);
    if n == 0 || b_norm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    // Keep factorisations bit-reproducible regardless of the thread count.
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));

    let triplets: Vec<Triplet<usize, usize, Complex64>> =
        a.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::InvalidArgument(format!("sparse matrix construction failed: {e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| Error::Singular(format!("LU factorisation failed: {e:?}")))?;

    let solve = |rhs: &[Complex64]| -> Result<ComplexVector> {
        let col = Col::<Complex64>::from_fn(n, |i| rhs[i]);
        let x = lu.solve(&col);
        let out: ComplexVector = (0..n).map(|i| x[i]).collect();
        if out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Singular("factorisation produced non-finite values".into()))
        }
    };

    let mut x = solve(b)?;
    let mut residual = relative_residual(a, &x, b, b_norm);
    for _ in 0..REFINEMENT_STEPS {
        if residual <= tol * 1e-2 {
            break;
        }
        let r: ComplexVector = a.mul_vec(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
        let dx = solve(&r)?;
        let candidate: ComplexVector = x.iter().zip(&dx).map(|(xi, di)| xi + di).collect();
        let next = relative_residual(a, &candidate, b, b_norm);
        if next >= residual {
            break;
        }
        x = candidate;
        residual = next;
    }
    if residual > tol {
        return Err(Error::Residual { residual, tol });
    }
    Ok(x)
}

/// `‖A x − b‖ / ‖b‖`.
pub fn relative_residual(a: &ComplexSparseMatrix, x: &[Complex64], b: &[Complex64], b_norm: f64) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    if b_norm > 0.0 {
        r / b_norm
    } else {
        r
    }
}
