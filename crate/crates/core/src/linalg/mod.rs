//! Dense complex linear algebra for the small matrices (n <= 64) this crate works with.
//!
//! Everything here is self-contained: LU solves, a Hessenberg QR eigenvalue
//! solver, Padé scaling-and-squaring for `exp(tA)` and the spectral norm.

mod eigen;
mod expm;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{eigenpairs, eigenvalues, Eigenpair};
pub use expm::matrix_exponential;

/// Relative pivot tolerance used by [`solve`].
pub const SINGULAR_TOLERANCE: f64 = 1e-14;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Wire form: `{"rows": n, "cols": n, "re": [...], "im": [...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        let len = m.rows * m.cols;
        if m.rows == 0 || m.cols == 0 {
            return Err(Error::Invalid("matrix must have positive dimensions".into()));
        }
        if m.re.len() != len || m.im.len() != len {
            return Err(Error::Invalid(format!(
                "matrix {}x{} needs {} re/im entries, got {}/{}",
                m.rows,
                m.cols,
                len,
                m.re.len(),
                m.im.len()
            )));
        }
        let data: Vec<Complex64> = m
            .re
            .iter()
            .zip(&m.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { rows: m.rows, cols: m.cols, data })
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds from row-major entries; panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length");
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "row-major data length");
        ComplexMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: Complex64, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add_scaled shape");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension");
        let mut out = vec![ZERO; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *o = row.iter().zip(v.entries()).map(|(a, b)| a * b).sum();
        }
        ComplexVector::new(out)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut k: u32) -> ComplexMatrix {
        assert!(self.is_square());
        let mut result = ComplexMatrix::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.matmul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

/// Element of `X = C^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        ComplexVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexVector(vec![ZERO; dim])
    }

    pub fn from_real(entries: &[f64]) -> Self {
        ComplexVector(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexVector(self.0.iter().map(|&z| z * c).collect())
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: Complex64, other: &ComplexVector) {
        assert_eq!(self.dim(), other.dim(), "vector dimension");
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            *a += alpha * b;
        }
    }

    pub fn distance(&self, other: &ComplexVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension");
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

impl<'a> Add<&'a ComplexVector> for &'a ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl<'a> Sub<&'a ComplexVector> for &'a ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes `a`, failing if a pivot drops below `SINGULAR_TOLERANCE * ||a||_inf`.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let tol = SINGULAR_TOLERANCE * a.norm_inf();
        Self::factor(a, Some(tol))
    }

    /// Factorization that replaces tiny pivots instead of failing; used by inverse iteration.
    pub(crate) fn new_regularized(a: &ComplexMatrix) -> Self {
        Self::factor(a, None).expect("regularized factorization never fails")
    }

    fn factor(a: &ComplexMatrix, tol: Option<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let floor = f64::EPSILON * a.norm_inf().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            match tol {
                Some(tol) if pmag <= tol || pmag == 0.0 => {
                    return Err(Error::SingularMatrix { pivot: pmag, tolerance: tol });
                }
                _ => {}
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            if lu[k * n + k].norm() < floor {
                lu[k * n + k] = Complex64::new(floor, 0.0);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= factor * u;
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(b.rows, self.n, "rhs rows");
        let mut out = ComplexMatrix::zeros(b.rows, b.cols);
        let mut col = vec![ZERO; b.rows];
        for j in 0..b.cols {
            for i in 0..b.rows {
                col[i] = b[(i, j)];
            }
            let x = self.solve_vec(&col);
            for i in 0..b.rows {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

/// Solves `A X = B`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "solve: A is {}x{}, B has {} rows",
            a.rows, a.cols, b.rows
        )));
    }
    Ok(Lu::new(a)?.solve(b))
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows))
}

/// Spectral norm (largest singular value) by power iteration on `A* A`.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.rows == 1 && a.cols == 1 {
        return a.data[0].norm();
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let a = a.scale_real(1.0 / scale);
    let gram = a.adjoint().matmul(&a);
    let n = gram.rows;
    // irregular start so that structured inputs are not orthogonal to it
    let mut v = ComplexVector::new(
        (0..n)
            .map(|j| Complex64::new(1.0 + 0.37 * j as f64, 0.23 * (j * j) as f64 - 0.11))
            .collect(),
    );
    let nv = v.norm();
    v = v.scale(Complex64::new(1.0 / nv, 0.0));
    let mut prev = 0.0;
    for _ in 0..3000 {
        let w = gram.mul_vec(&v);
        // Rayleigh quotient v* G v with |v| = 1
        let rq: f64 = v.entries().iter().zip(w.entries()).map(|(a, b)| (a.conj() * b).re).sum();
        let nw = w.norm();
        if nw == 0.0 {
            break;
        }
        v = w.scale(Complex64::new(1.0 / nw, 0.0));
        if (rq - prev).abs() <= 1e-15 * rq.abs() {
            return scale * rq.max(0.0).sqrt();
        }
        prev = rq;
    }
    // slow power iteration (clustered top singular values): fall back to the
    // eigenvalues of the Hermitian Gram matrix
    match eigenvalues(&gram) {
        Ok(ev) => scale * ev.iter().map(|z| z.re).fold(prev, f64::max).max(0.0).sqrt(),
        Err(_) => scale * prev.max(0.0).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_identity_and_scalar() {
        let b = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.0), c(0.0, 4.0)]);
        let x = solve(&ComplexMatrix::identity(2), &b).unwrap();
        assert_eq!(x, b);
        let two = ComplexMatrix::identity(2).scale_real(2.0);
        let x = solve(&two, &ComplexMatrix::identity(2)).unwrap();
        assert_relative_eq!((&x - &ComplexMatrix::identity(2).scale_real(0.5)).max_abs(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn solve_upper_triangular_inverse() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 2.0]);
        let x = solve(&a, &ComplexMatrix::identity(2)).unwrap();
        let expect = ComplexMatrix::from_real(2, 2, &[1.0, -0.5, 0.0, 0.5]);
        assert!((&x - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn solve_singular_is_rejected() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(solve(&a, &ComplexMatrix::identity(2)), Err(Error::SingularMatrix { .. })));
        let z = ComplexMatrix::zeros(3, 3);
        assert!(matches!(solve(&z, &ComplexMatrix::identity(3)), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        let d = ComplexMatrix::from_diagonal(&[c(3.0, 0.0), c(0.0, -4.0)]);
        assert_relative_eq!(operator_norm(&d), 4.0, max_relative = 1e-8);
        let n = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert_relative_eq!(operator_norm(&n), 2.0, max_relative = 1e-8);
    }

    #[test]
    fn operator_norm_of_unitary_is_one() {
        // equal singular values: the power iteration converges immediately
        let rot = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_relative_eq!(operator_norm(&rot), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn json_round_trip_shape() {
        let m = ComplexMatrix::from_row_major(1, 2, vec![c(1.0, -1.0), c(0.0, 2.5)]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"re":[1.0,0.0],"im":[-1.0,2.5]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"re":[1],"im":[0]}"#).is_err());
    }
}
