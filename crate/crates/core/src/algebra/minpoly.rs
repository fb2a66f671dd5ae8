use num_complex::Complex64 as C64;

use super::{lstsq, rank, singular_values, ComplexMatrix, ToleranceConfig};
use crate::error::Result;

const SNAP_RTOL: f64 = 1e-9;

/// Monic minimal polynomial of a square matrix, coefficients in ascending
/// degree (the last entry is 1).
///
/// The degree is the smallest `m` for which the flattened powers
/// `I, M, …, Mᵐ` are numerically dependent. Powers are formed from `M / ‖M‖₂`
/// and each is normalized before the rank test so that the threshold does
/// not depend on the spread of eigenvalue magnitudes; the coefficients are
/// then rescaled back to `M`. Coefficients below `1e-9 · max|c|` snap to 0.
pub fn minimal_polynomial(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<C64>> {
    let n = m.ensure_square("minimal_polynomial")?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    if n == 0 {
        return Ok(vec![one]);
    }
    let alpha = singular_values(m).first().copied().unwrap_or(0.0);
    if alpha == 0.0 {
        return Ok(vec![zero, one]);
    }
    let scaled = m.scale_real(1.0 / alpha);

    let mut powers = vec![ComplexMatrix::identity(n)];
    let mut norms = vec![(n as f64).sqrt()];
    for degree in 1..=n {
        let next = &powers[degree - 1] * &scaled;
        norms.push(next.frobenius_norm());
        powers.push(next);

        let columns = normalized_columns(&powers, &norms);
        if rank(&columns, tol) <= degree {
            return Ok(coefficients(&powers, &norms, alpha));
        }
    }
    // Cayley–Hamilton guarantees dependence at degree n; reaching here means
    // the threshold never detected it, so fall back to the full degree.
    Ok(coefficients(&powers, &norms, alpha))
}

/// Flattened powers as columns, each scaled to unit norm. Columns whose norm
/// has collapsed to roundoff are left as-is (they are numerically zero).
fn normalized_columns(powers: &[ComplexMatrix], norms: &[f64]) -> ComplexMatrix {
    let rows = powers[0].rows() * powers[0].cols();
    let floor = f64::EPSILON * norms[0];
    ComplexMatrix::from_fn(rows, powers.len(), |i, j| {
        let s = if norms[j] > floor {
            1.0 / norms[j]
        } else {
            1.0
        };
        powers[j].as_slice()[i] * s
    })
}

fn coefficients(powers: &[ComplexMatrix], norms: &[f64], alpha: f64) -> Vec<C64> {
    let degree = powers.len() - 1;
    let basis = normalized_columns(&powers[..degree], &norms[..degree]);
    let rhs: Vec<C64> = powers[degree].as_slice().iter().map(|z| -z).collect();
    let solution = lstsq(&basis, &rhs, 1e-15).expect("shapes agree by construction");

    let floor = f64::EPSILON * norms[0];
    let mut coeffs: Vec<C64> = solution
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let unnormalize = if norms[k] > floor {
                1.0 / norms[k]
            } else {
                1.0
            };
            // p(M/α) = 0 with monic p  ⇒  Σ c_k α^{m-k} M^k = 0
            c * unnormalize * alpha.powi((degree - k) as i32)
        })
        .collect();
    coeffs.push(C64::new(1.0, 0.0));

    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in &mut coeffs {
        if c.re.abs() < SNAP_RTOL * cmax {
            c.re = 0.0;
        }
        if c.im.abs() < SNAP_RTOL * cmax {
            c.im = 0.0;
        }
    }
    coeffs
}

/// Evaluates `Σ c_k z^k` (ascending coefficients) by Horner's rule.
pub fn eval_poly(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Evaluates `Σ c_k M^k` by Horner's rule.
pub fn eval_poly_matrix(coeffs: &[C64], m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let ident = ComplexMatrix::identity(n);
    coeffs
        .iter()
        .rev()
        .fold(ComplexMatrix::zeros(n, n), |acc, &c| {
            &(&acc * m) + &ident.scale(c)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::eigenvalues;
    use crate::random::{complex_gaussian_matrix, seeded_rng};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_is_lambda_minus_one() {
        let p = minimal_polynomial(&ComplexMatrix::identity(3), &tol()).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p[0] - c(-1.0)).norm() < 1e-12);
        assert_eq!(p[1], c(1.0));
    }

    #[test]
    fn projector_has_two_roots() {
        let m = ComplexMatrix::from_diag(&[c(0.0), c(0.0), c(1.0)]);
        let p = minimal_polynomial(&m, &tol()).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[0], c(0.0));
        assert!((p[1] - c(-1.0)).norm() < 1e-12);
        assert_eq!(p[2], c(1.0));
    }

    #[test]
    fn zero_matrix_is_lambda() {
        let p = minimal_polynomial(&ComplexMatrix::zeros(4, 4), &tol()).unwrap();
        assert_eq!(p, vec![c(0.0), c(1.0)]);
    }

    #[test]
    fn jordan_block_needs_full_degree() {
        // J_3(2): minimal polynomial (λ-2)^3 = λ³ - 6λ² + 12λ - 8
        let m = ComplexMatrix::from_real_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![0.0, 2.0, 1.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let p = minimal_polynomial(&m, &tol()).unwrap();
        let want = [c(-8.0), c(12.0), c(-6.0), c(1.0)];
        assert_eq!(p.len(), 4);
        for (a, b) in p.iter().zip(&want) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn simple_spectrum_nine() {
        let d: Vec<C64> = (0..9).map(|k| c(-(k as f64))).collect();
        let p = minimal_polynomial(&ComplexMatrix::from_diag(&d), &tol()).unwrap();
        assert_eq!(p.len(), 10);
        for z in &d {
            let scale: f64 = p
                .iter()
                .enumerate()
                .map(|(k, ck)| ck.norm() * z.norm().powi(k as i32))
                .sum();
            assert!(eval_poly(&p, *z).norm() <= 1e-8 * scale.max(1.0));
        }
    }

    #[test]
    fn annihilates_random_matrices() {
        let mut rng = seeded_rng(44);
        for n in 1..=5 {
            let m = complex_gaussian_matrix(n, n, &mut rng);
            let p = minimal_polynomial(&m, &tol()).unwrap();
            assert_eq!(p.len(), n + 1, "generic matrix is non-derogatory");
            let norm = m.frobenius_norm();
            let residual = eval_poly_matrix(&p, &m).max_abs();
            assert!(
                residual <= 1e-8 * norm.powi(n as i32).max(1.0),
                "n={n} residual {residual:e}"
            );
            for z in eigenvalues(&m).unwrap() {
                let scale: f64 = p
                    .iter()
                    .enumerate()
                    .map(|(k, ck)| ck.norm() * z.norm().powi(k as i32))
                    .sum();
                assert!(eval_poly(&p, z).norm() <= 1e-8 * scale);
            }
        }
    }
}
