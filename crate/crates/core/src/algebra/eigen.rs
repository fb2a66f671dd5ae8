//! Eigenvalues of general complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! complex QR iteration with Wilkinson shifts and Givens rotations. Only
//! eigenvalues are produced; Schur vectors are never accumulated, so each QR
//! sweep is restricted to the active unreduced block.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 30;

fn abs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// All `n` eigenvalues of a square matrix, with multiplicity, in the order
/// they deflate (no particular sorting).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = m.ensure_square("eigenvalues")?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    qr_iterate(&mut h)
}

/// Similarity reduction to upper Hessenberg form.
pub(crate) fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut a = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // A <- (I - 2 v v†) A
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * a[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= *vr * dot * 2.0;
            }
        }
        // A <- A (I - 2 v v†)
        for i in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| a[(i, k + 1 + r)] * vr)
                .sum();
            for (r, vr) in v.iter().enumerate() {
                a[(i, k + 1 + r)] -= dot * vr.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    a
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Rotation `[[c, s], [-s̄, c]]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

fn qr_iterate(h: &mut ComplexMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let max_iter = ITERATIONS_PER_EIGENVALUE * n;
    let mut found = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut total_iter = 0;
    let mut since_deflation = 0;

    loop {
        if hi == 0 {
            found.push(h[(0, 0)]);
            break;
        }
        // find the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let mut scale = abs1(h[(lo, lo)]) + abs1(h[(lo - 1, lo - 1)]);
            if scale == 0.0 {
                scale = hnorm;
            }
            if abs1(h[(lo, lo - 1)]) <= eps * scale {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            found.push(h[(hi, hi)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        if total_iter >= max_iter {
            return Err(Error::NoConvergence {
                iterations: total_iter,
                found: found.len(),
                n,
            });
        }
        total_iter += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)]
                + C64::new(
                    h[(hi, hi - 1)].re.abs()
                        + if hi >= 2 {
                            h[(hi - 1, hi - 2)].re.abs()
                        } else {
                            0.0
                        },
                    0.0,
                ) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = C64::new(0.0, 0.0);
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            for i in lo..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(found)
}
