use super::{solve, ComplexMatrix};
use crate::error::Result;

// Degree-13 Padé coefficients and the 1-norm bound below which the unscaled
// approximant is accurate to double precision (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn axpy(acc: &mut ComplexMatrix, coef: f64, x: &ComplexMatrix) {
    *acc += &x.scale_real(coef);
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square("expm")?;
    let norm = a.norm_1();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(squarings));

    let ident = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let mut u_inner = a6.scale_real(b[13]);
    axpy(&mut u_inner, b[11], &a4);
    axpy(&mut u_inner, b[9], &a2);
    let mut u = &a6 * &u_inner;
    axpy(&mut u, b[7], &a6);
    axpy(&mut u, b[5], &a4);
    axpy(&mut u, b[3], &a2);
    axpy(&mut u, b[1], &ident);
    let u = &a * &u;

    let mut v_inner = a6.scale_real(b[12]);
    axpy(&mut v_inner, b[10], &a4);
    axpy(&mut v_inner, b[8], &a2);
    let mut v = &a6 * &v_inner;
    axpy(&mut v, b[6], &a6);
    axpy(&mut v, b[4], &a4);
    axpy(&mut v, b[2], &a2);
    axpy(&mut v, b[0], &ident);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}
