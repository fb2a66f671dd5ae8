use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Orthonormal hermitian basis of the `n²`-dimensional real space of
/// hermitian `n`×`n` matrices: `I/√n` followed by the generalized Gell-Mann
/// matrices (symmetric, antisymmetric, then diagonal families).
pub fn hermitian_basis(n: usize) -> Result<Vec<ComplexMatrix>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "hermitian basis needs dimension >= 2, got {n}"
        )));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(n * n);
    basis.push(ComplexMatrix::identity(n).scale_real(1.0 / (n as f64).sqrt()));

    for j in 0..n {
        for k in j + 1..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(j, k)] = C64::new(inv_sqrt2, 0.0);
            m[(k, j)] = C64::new(inv_sqrt2, 0.0);
            basis.push(m);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(j, k)] = C64::new(0.0, -inv_sqrt2);
            m[(k, j)] = C64::new(0.0, inv_sqrt2);
            basis.push(m);
        }
    }
    for l in 1..n {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 0..l {
            m[(j, j)] = C64::new(norm, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        basis.push(m);
    }
    Ok(basis)
}
