use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::{ComplexMatrix, ToleranceConfig};
use crate::error::{Error, Result};

/// Singular values in non-increasing order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m
        .to_nalgebra()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rank_rtol * sigma_max`.
pub fn rank(m: &ComplexMatrix, tol: &ToleranceConfig) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else {
        return 0;
    };
    let cutoff = tol.rank_rtol * smax;
    s.iter().filter(|&&x| x > cutoff).count()
}

pub fn kernel_dim(m: &ComplexMatrix, tol: &ToleranceConfig) -> usize {
    m.cols() - rank(m, tol)
}

/// Minimum-norm least-squares solution of `a x = b`, truncating singular
/// values below `rtol * sigma_max`.
pub fn lstsq(a: &ComplexMatrix, b: &[C64], rtol: f64) -> Result<Vec<C64>> {
    if b.len() != a.rows() {
        return Err(Error::ShapeMismatch {
            op: "lstsq",
            left: a.shape(),
            right: (b.len(), 1),
        });
    }
    let svd = a.to_nalgebra().svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u.as_ref(), svd.v_t.as_ref()) else {
        return Err(Error::Numerical(
            "SVD did not produce singular vectors".into(),
        ));
    };
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let cutoff = rtol * smax;
    let rhs = DVector::from_column_slice(b);
    let utb = u.adjoint() * rhs;
    let mut scaled = utb.clone();
    for (k, z) in scaled.iter_mut().enumerate() {
        *z = if s[k] > cutoff && s[k] > 0.0 {
            *z / s[k]
        } else {
            C64::new(0.0, 0.0)
        };
    }
    let x = v_t.adjoint() * scaled;
    Ok(x.iter().copied().collect())
}

/// Solves `a x = b` for square `a` and matrix right-hand side by LU with
/// partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.ensure_square("solve")?;
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch {
            op: "solve",
            left: a.shape(),
            right: b.shape(),
        });
    }
    a.to_nalgebra()
        .lu()
        .solve(&b.to_nalgebra())
        .map(|x| ComplexMatrix::from_nalgebra(&x))
        .ok_or_else(|| Error::Numerical("singular matrix in linear solve".into()))
}

/// Eigendecomposition of a hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    m.ensure_square("hermitian_eigen")?;
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_gaussian_matrix, random_hermitian, seeded_rng};

    #[test]
    fn rank_examples() {
        let tol = ToleranceConfig::default();
        assert_eq!(kernel_dim(&ComplexMatrix::zeros(9, 9), &tol), 9);
        assert_eq!(kernel_dim(&ComplexMatrix::identity(9), &tol), 0);
        let r = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(rank(&r, &tol), 1);
    }

    #[test]
    fn rank_plus_kernel_is_cols() {
        let tol = ToleranceConfig::default();
        let mut rng = seeded_rng(2);
        for (r, c) in [(3, 5), (5, 3), (4, 4)] {
            let a = complex_gaussian_matrix(r, 2, &mut rng);
            let b = complex_gaussian_matrix(2, c, &mut rng);
            let m = &a * &b;
            assert_eq!(rank(&m, &tol), 2);
            assert_eq!(rank(&m, &tol) + kernel_dim(&m, &tol), c);
        }
    }

    #[test]
    fn lstsq_recovers_consistent_solution() {
        let mut rng = seeded_rng(4);
        let a = complex_gaussian_matrix(6, 3, &mut rng);
        let x = complex_gaussian_matrix(3, 1, &mut rng);
        let b = a.apply(x.as_slice()).unwrap();
        let got = lstsq(&a, &b, 1e-12).unwrap();
        for (p, q) in got.iter().zip(x.as_slice()) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn solve_and_singular() {
        let mut rng = seeded_rng(6);
        let a = complex_gaussian_matrix(4, 4, &mut rng);
        let b = complex_gaussian_matrix(4, 2, &mut rng);
        let x = solve(&a, &b).unwrap();
        assert!((&a * &x).max_abs_diff(&b) < 1e-12);
        assert!(solve(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let mut rng = seeded_rng(8);
        let h = random_hermitian(4, &mut rng);
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d =
            ComplexMatrix::from_diag(&vals.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let back = &(&vecs * &d) * &vecs.adjoint();
        assert!(back.max_abs_diff(&h) < 1e-12);
    }
}
