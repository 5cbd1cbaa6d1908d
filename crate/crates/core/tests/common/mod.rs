#![allow(dead_code)]

use greensolve::generator::GeneratorSpec;
use greensolve::harmonic::TrigPolynomial;
use greensolve::linalg::{inverse, ComplexMatrix, ComplexVector};
use num_complex::Complex64;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_2024;

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn scalar(a: f64) -> GeneratorSpec {
    GeneratorSpec::matrix(ComplexMatrix::from_real(1, 1, &[a])).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
}

/// `S diag(μ) S^{-1}` with `|Re μ| ∈ [0.5, 2]` of random sign, so no spectrum on the imaginary axis.
pub fn random_dichotomy(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    loop {
        let s = ComplexMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 2.0 } else { 0.0 };
            c(d + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let Ok(inv) = inverse(&s) else { continue };
        let mu: Vec<Complex64> = (0..n)
            .map(|_| {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                c(sign * rng.gen_range(0.5..2.0), rng.gen_range(-3.0..3.0))
            })
            .collect();
        return s.matmul(&ComplexMatrix::from_diagonal(&mu)).matmul(&inv);
    }
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    ComplexVector::new((0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
}

pub fn random_trig(rng: &mut ChaCha8Rng, dim: usize, terms: usize, band: f64) -> TrigPolynomial {
    let t = (0..terms).map(|_| (rng.gen_range(-band..band), random_vector(rng, dim))).collect();
    TrigPolynomial::new(dim, t).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
