use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector, Lu, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 80;

/// Eigenvalue with a unit eigenvector and its residual `||(A - lambda) v||`.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: Complex64,
    pub vector: ComplexVector,
    pub residual: f64,
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2vv*) H
        for j in 0..n {
            let dot: Complex64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= 2.0 * v[i] * dot;
            }
        }
        // H <- H (I - 2vv*)
        for i in 0..n {
            let dot: Complex64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= 2.0 * dot * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let m1 = mid + disc;
    let m2 = mid - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

/// Eigenvalues of a square matrix by shifted QR on the Hessenberg form.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("eigenvalues of {}x{} matrix", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    let n = a.rows();
    let mut h = hessenberg(a);
    let anorm = a.max_abs();
    let mut hi = n.saturating_sub(1);
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n.max(1);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if diag > 0.0 { diag } else { anorm };
            if sub <= f64::EPSILON * scale || sub <= f64::MIN_POSITIVE {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence(format!("QR iteration exceeded {budget} sweeps")));
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * Complex64::new(0.75, 0.4375)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, l, hi, mu);
    }
    Ok(h.diagonal())
}

/// One explicit shifted QR step on the active block `l..=hi`.
fn qr_step(h: &mut ComplexMatrix, l: usize, hi: usize, mu: Complex64) {
    for i in l..=hi {
        h[(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - l);
    for k in l..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = l + idx;
        for i in l..=(k + 2).min(hi) {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s.conj();
            h[(i, k + 1)] = -a * s + b * c;
        }
    }
    for i in l..=hi {
        h[(i, i)] += mu;
    }
}

/// Eigenvalues with unit eigenvectors refined by inverse iteration.
///
/// Each residual `||(A - lambda) v||` is checked against `1e-8 ||A||`.
pub fn eigenpairs(a: &ComplexMatrix) -> Result<Vec<Eigenpair>> {
    let values = eigenvalues(a)?;
    let n = a.rows();
    let anorm = super::operator_norm(a);
    let tol = 1e-8 * anorm;
    let mut out = Vec::with_capacity(n);
    for (idx, &lambda) in values.iter().enumerate() {
        let shift = lambda + Complex64::new(1.0, 0.5) * (anorm.max(1.0) * 1e-12);
        let m = ComplexMatrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] - shift } else { a[(i, j)] });
        let lu = Lu::new_regularized(&m);
        let mut v: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 + 0.1 * ((j + idx) % 7) as f64, 0.05 * j as f64))
            .collect();
        normalize(&mut v);
        let mut best: Option<(ComplexVector, f64)> = None;
        for _ in 0..6 {
            v = lu.solve_vec(&v);
            if v.iter().any(|z| !z.is_finite()) {
                break;
            }
            normalize(&mut v);
            let cand = ComplexVector::new(v.clone());
            let res = residual(a, lambda, &cand);
            if best.as_ref().map_or(true, |(_, r)| res < *r) {
                best = Some((cand, res));
            }
            if res <= 0.01 * tol {
                break;
            }
        }
        let (vector, residual) =
            best.ok_or_else(|| Error::NoConvergence("inverse iteration produced non-finite vector".into()))?;
        if residual > tol && residual > 1e-300 {
            return Err(Error::NoConvergence(format!(
                "eigenvector residual {residual:.3e} exceeds {tol:.3e} for eigenvalue {lambda}"
            )));
        }
        out.push(Eigenpair { value: lambda, vector, residual });
    }
    Ok(out)
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

fn residual(a: &ComplexMatrix, lambda: Complex64, v: &ComplexVector) -> f64 {
    let mut av = a.mul_vec(v);
    av.add_scaled(-lambda, v);
    av.norm()
}
