//! Vector-valued trigonometric polynomials `Σ x_j e^{i λ_j t}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::SampledFunction;
use crate::linalg::ComplexVector;
use crate::operator::Operator;
use crate::sets::SpectrumSet;

/// Frequencies closer than this (relative to `max(1, |λ|)`) are merged.
pub const FREQUENCY_MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub frequency: f64,
    pub amplitude: ComplexVector,
}

/// Terms are sorted by frequency, pairwise distinct and nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrig", into = "RawTrig")]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<TrigTerm>,
    sup_bound: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTrig {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TryFrom<RawTrig> for TrigPolynomial {
    type Error = Error;

    fn try_from(r: RawTrig) -> Result<Self> {
        TrigPolynomial::new(r.dim, r.terms.into_iter().map(|t| (t.frequency, t.amplitude)).collect())
    }
}

impl From<TrigPolynomial> for RawTrig {
    fn from(p: TrigPolynomial) -> Self {
        RawTrig { dim: p.dim, terms: p.terms }
    }
}

impl TrigPolynomial {
    pub fn new(dim: usize, terms: Vec<(f64, ComplexVector)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("trigonometric polynomial of dimension 0".into()));
        }
        let mut sorted = Vec::with_capacity(terms.len());
        for (lambda, x) in terms {
            if !lambda.is_finite() {
                return Err(Error::Invalid(format!("non-finite frequency {lambda}")));
            }
            if x.dim() != dim {
                return Err(Error::DimensionMismatch(format!("amplitude of dimension {} in a {dim}-dimensional polynomial", x.dim())));
            }
            if x.entries().iter().any(|z| !z.is_finite()) {
                return Err(Error::Invalid(format!("non-finite amplitude at frequency {lambda}")));
            }
            sorted.push((lambda, x));
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<TrigTerm> = Vec::with_capacity(sorted.len());
        for (lambda, x) in sorted {
            match merged.last_mut() {
                Some(last) if (lambda - last.frequency).abs() <= FREQUENCY_MERGE_TOLERANCE * lambda.abs().max(1.0) => {
                    last.amplitude.add_scaled(Complex64::new(1.0, 0.0), &x);
                }
                _ => merged.push(TrigTerm { frequency: lambda, amplitude: x }),
            }
        }
        merged.retain(|t| !t.amplitude.is_zero());
        let sup_bound = merged.iter().map(|t| t.amplitude.norm()).sum();
        Ok(TrigPolynomial { dim, terms: merged, sup_bound })
    }

    pub fn zero(dim: usize) -> Self {
        TrigPolynomial { dim, terms: vec![], sup_bound: 0.0 }
    }

    /// `e^{i λ t} x`
    pub fn exponential(lambda: f64, x: ComplexVector) -> Result<Self> {
        let dim = x.dim();
        TrigPolynomial::new(dim, vec![(lambda, x)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.frequency).collect()
    }

    /// Triangle bound `Σ ‖x_j‖ ≥ sup_t ‖P(t)‖`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn eval(&self, t: f64) -> ComplexVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.eval_into(t, &mut out);
        ComplexVector::new(out)
    }

    pub fn eval_into(&self, t: f64, out: &mut [Complex64]) {
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for term in &self.terms {
            let phase = Complex64::from_polar(1.0, term.frequency * t);
            for (o, x) in out.iter_mut().zip(term.amplitude.entries()) {
                *o += phase * x;
            }
        }
    }

    /// Samples at `t0 + k step`, `k < n`, with the triangle bound as declared sup.
    pub fn sample(&self, t0: f64, step: f64, n: usize) -> Result<SampledFunction> {
        let mut data = vec![Complex64::new(0.0, 0.0); n * self.dim];
        for (k, chunk) in data.chunks_mut(self.dim).enumerate() {
            self.eval_into(t0 + k as f64 * step, chunk);
        }
        let max = data.chunks(self.dim).map(norm).fold(0.0, f64::max);
        SampledFunction::new(t0, step, self.dim, data, self.sup_bound.max(max))
    }

    /// Translate: `t ↦ P(t + a)`.
    pub fn translate(&self, a: f64) -> Self {
        self.map_terms(|lambda, x| x.scale(Complex64::from_polar(1.0, lambda * a)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_terms(|_, x| x.scale(c))
    }

    /// `α P + β Q`
    pub fn combine(&self, alpha: Complex64, other: &TrigPolynomial, beta: Complex64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| (t.frequency, t.amplitude.scale(alpha)))
            .chain(other.terms.iter().map(|t| (t.frequency, t.amplitude.scale(beta))))
            .collect();
        TrigPolynomial::new(self.dim, terms)
    }

    /// Exact mean `(1/h) ∫_0^h P(t + s) ds`.
    pub fn mean(&self, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Invalid(format!("mean window must be positive, got {h}")));
        }
        Ok(self.map_terms(|lambda, x| {
            let z = Complex64::new(0.0, lambda * h);
            // (e^z - 1)/z, with the series near z = 0
            let factor = if z.norm() < 1e-5 { Complex64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 } else { (z.exp() - 1.0) / z };
            x.scale(factor)
        }))
    }

    fn map_terms(&self, mut f: impl FnMut(f64, &ComplexVector) -> ComplexVector) -> Self {
        let terms: Vec<TrigTerm> = self
            .terms
            .iter()
            .map(|t| TrigTerm { frequency: t.frequency, amplitude: f(t.frequency, &t.amplitude) })
            .filter(|t| !t.amplitude.is_zero())
            .collect();
        let sup_bound = terms.iter().map(|t| t.amplitude.norm()).sum();
        TrigPolynomial { dim: self.dim, terms, sup_bound }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frequency set `{λ_j : x_j ≠ 0}`.
pub fn trig_spectrum(p: &TrigPolynomial) -> SpectrumSet {
    SpectrumSet::from_points(p.frequencies())
}

/// Term-wise `(λ_j, x_j) ↦ (λ_j, F̂(λ_j) x_j)`.
pub fn convolve_trig(symbol: impl Fn(f64) -> Operator, p: &TrigPolynomial) -> TrigPolynomial {
    try_convolve_trig(|s| Ok(symbol(s)), p).expect("infallible symbol")
}

/// As [`convolve_trig`] for symbols that can fail (resolvents near the spectrum).
pub fn try_convolve_trig(symbol: impl Fn(f64) -> Result<Operator>, p: &TrigPolynomial) -> Result<TrigPolynomial> {
    let mut terms = Vec::with_capacity(p.terms.len());
    for t in &p.terms {
        let m = symbol(t.frequency)?;
        if m.dim() != p.dim {
            return Err(Error::DimensionMismatch(format!("symbol of dimension {} on {}-vectors", m.dim(), p.dim)));
        }
        terms.push((t.frequency, m.mul_vec(&t.amplitude)));
    }
    TrigPolynomial::new(p.dim, terms)
}
