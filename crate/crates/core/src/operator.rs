//! Bounded operators on `C^n` as they appear in resolvent and Green function values.
//!
//! Resolvent-oracle generators are diagonal with up to a few hundred poles, so
//! diagonal values are kept diagonal instead of being densified.

use num_complex::Complex64;

use crate::linalg::{operator_norm, ComplexMatrix, ComplexVector};

#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Dense(ComplexMatrix),
    Diagonal(Vec<Complex64>),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense(m) => m.rows(),
            Operator::Diagonal(d) => d.len(),
        }
    }

    pub fn identity_like(&self) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(ComplexMatrix::identity(m.rows())),
            Operator::Diagonal(d) => Operator::Diagonal(vec![Complex64::new(1.0, 0.0); d.len()]),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Diagonal(d) => ComplexMatrix::from_diagonal(d),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match self {
            Operator::Dense(m) => m[(i, j)],
            Operator::Diagonal(d) if i == j => d[i],
            Operator::Diagonal(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m.scale(c)),
            Operator::Diagonal(d) => Operator::Diagonal(d.iter().map(|&z| z * c).collect()),
        }
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        match (self, other) {
            (Operator::Diagonal(a), Operator::Diagonal(b)) => {
                Operator::Diagonal(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (Operator::Diagonal(a), Operator::Dense(b)) => {
                Operator::Dense(ComplexMatrix::from_fn(b.rows(), b.cols(), |i, j| a[i] * b[(i, j)]))
            }
            (Operator::Dense(a), Operator::Diagonal(b)) => {
                Operator::Dense(ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] * b[j]))
            }
            (Operator::Dense(a), Operator::Dense(b)) => Operator::Dense(a.matmul(b)),
        }
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        match self {
            Operator::Dense(m) => m.mul_vec(v),
            Operator::Diagonal(d) => {
                assert_eq!(d.len(), v.dim(), "operator-vector dimension");
                ComplexVector::new(d.iter().zip(v.entries()).map(|(a, b)| a * b).collect())
            }
        }
    }

    /// Accumulates `alpha * op * v` into `out` without allocating.
    pub fn mul_vec_acc(&self, alpha: Complex64, v: &[Complex64], out: &mut [Complex64]) {
        match self {
            Operator::Dense(m) => {
                let n = m.cols();
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &m.data()[i * n..(i + 1) * n];
                    let s: Complex64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
                    *o += alpha * s;
                }
            }
            Operator::Diagonal(d) => {
                for ((o, a), b) in out.iter_mut().zip(d).zip(v) {
                    *o += alpha * a * b;
                }
            }
        }
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        match self {
            Operator::Dense(m) => operator_norm(m),
            Operator::Diagonal(d) => d.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Operator::Dense(m) => m.max_abs(),
            Operator::Diagonal(d) => d.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Operator::Dense(m) => m.is_finite(),
            Operator::Diagonal(d) => d.iter().all(|z| z.is_finite()),
        }
    }

    /// Entries that may be nonzero, as `(i, j, value)`.
    pub fn stored_entries(&self) -> Vec<(usize, usize, Complex64)> {
        match self {
            Operator::Dense(m) => {
                let n = m.cols();
                m.data().iter().enumerate().map(|(k, &z)| (k / n, k % n, z)).collect()
            }
            Operator::Diagonal(d) => d.iter().enumerate().map(|(i, &z)| (i, i, z)).collect(),
        }
    }
}

/// Values that quadrature rules can accumulate.
pub trait LinearValue: Clone + Send + Sync {
    fn zeros_like(&self) -> Self;
    /// `self += alpha * x`
    fn axpy(&mut self, alpha: Complex64, x: &Self);
    /// Cheap size measure used for convergence tests (largest entry modulus).
    fn magnitude(&self) -> f64;
}

impl LinearValue for Operator {
    fn zeros_like(&self) -> Self {
        match self {
            Operator::Dense(m) => Operator::Dense(ComplexMatrix::zeros(m.rows(), m.cols())),
            Operator::Diagonal(d) => Operator::Diagonal(vec![Complex64::new(0.0, 0.0); d.len()]),
        }
    }

    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        match (&mut *self, x) {
            (Operator::Dense(a), Operator::Dense(b)) => a.add_scaled(alpha, b),
            (Operator::Diagonal(a), Operator::Diagonal(b)) => {
                assert_eq!(a.len(), b.len(), "operator dimension");
                for (p, &q) in a.iter_mut().zip(b) {
                    *p += alpha * q;
                }
            }
            (Operator::Dense(a), Operator::Diagonal(b)) => {
                for (i, &q) in b.iter().enumerate() {
                    a[(i, i)] += alpha * q;
                }
            }
            (Operator::Diagonal(_), Operator::Dense(b)) => {
                let mut dense = self.to_dense();
                dense.add_scaled(alpha, b);
                *self = Operator::Dense(dense);
            }
        }
    }

    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

impl LinearValue for Complex64 {
    fn zeros_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        *self += alpha * x;
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl LinearValue for ComplexVector {
    fn zeros_like(&self) -> Self {
        ComplexVector::zeros(self.dim())
    }

    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        self.add_scaled(alpha, x);
    }

    fn magnitude(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
