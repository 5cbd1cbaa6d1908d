use num_complex::Complex64;

use super::{ComplexMatrix, Lu};
use crate::error::{Error, Result};

// Padé [13/13] coefficients and the one-norm threshold for degree 13.
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

// Guard on the number of squarings; overflow itself is detected on the result.
const MAX_NORM: f64 = 1e7;

/// `e^{tA}` by scaling and squaring with a degree-13 Padé approximant.
pub fn matrix_exponential(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("exp of {}x{} matrix", a.rows(), a.cols())));
    }
    if !t.is_finite() {
        return Err(Error::Invalid(format!("exp: t = {t} is not finite")));
    }
    let n = a.rows();
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let ta = a.scale_real(t);
    let norm = ta.norm_one();
    if !norm.is_finite() {
        return Err(Error::Overflow(norm));
    }
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    if norm > MAX_NORM {
        return Err(Error::Overflow(norm));
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = ta.scale_real(0.5f64.powi(s));

    let id = ComplexMatrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);

    let mut inner_u = a6.scale(b(13));
    inner_u.add_scaled(b(11), &a4);
    inner_u.add_scaled(b(9), &a2);
    let mut u = a6.matmul(&inner_u);
    u.add_scaled(b(7), &a6);
    u.add_scaled(b(5), &a4);
    u.add_scaled(b(3), &a2);
    u.add_scaled(b(1), &id);
    let u = scaled.matmul(&u);

    let mut inner_v = a6.scale(b(12));
    inner_v.add_scaled(b(10), &a4);
    inner_v.add_scaled(b(8), &a2);
    let mut v = a6.matmul(&inner_v);
    v.add_scaled(b(6), &a6);
    v.add_scaled(b(4), &a4);
    v.add_scaled(b(2), &a2);
    v.add_scaled(b(0), &id);

    let q = &v - &u;
    let p = &v + &u;
    let mut r = Lu::new(&q)?.solve(&p);
    for _ in 0..s {
        r = r.matmul(&r);
    }
    if !r.is_finite() {
        return Err(Error::Overflow(norm));
    }
    Ok(r)
}
