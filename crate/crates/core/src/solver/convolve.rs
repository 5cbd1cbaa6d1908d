//! `u = G * φ` on sampled inputs, and the exact solution for trig inputs.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::green::GreenFunction;
use crate::harmonic::{lagrange4, try_convolve_trig, SampledFunction, TrigPolynomial};

/// Distance from `iλ` to `σ(A)` below which `solve_trig` refuses.
pub const RESONANCE_TOLERANCE: f64 = 1e-6;

/// Relative panel mass below which Green panels are skipped in the convolution.
const NEGLIGIBLE_PANEL: f64 = 1e-17;

/// `Σ_j e^{iλ_j t} R(iλ_j, A) x_j`
pub fn solve_trig(g: &GeneratorSpec, p: &TrigPolynomial) -> Result<TrigPolynomial> {
    if g.dim() != p.dim() {
        return Err(Error::DimensionMismatch(format!("generator of dimension {} with {}-vector input", g.dim(), p.dim())));
    }
    for t in p.terms() {
        let d = g.resonance_distance(t.frequency);
        if d < RESONANCE_TOLERANCE {
            return Err(Error::Resonance { frequency: t.frequency, distance: d });
        }
    }
    try_convolve_trig(|s| g.resolvent(s), p)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionMetadata {
    /// `sup φ · (tail mass beyond t_max + near-zero mass)`.
    pub truncation_bound: f64,
    /// `‖G‖_{L1} · sup φ`.
    pub young_bound: f64,
    pub young_bound_holds: bool,
    pub quadrature_nodes: usize,
}

#[derive(Clone, Debug)]
pub struct Convolution {
    pub solution: SampledFunction,
    pub metadata: ConvolutionMetadata,
}

/// `u(t) = ∫ G(s) φ(t - s) ds` at the grid points of `φ` inside `[t_lo, t_hi]`,
/// with `φ` interpolated by cubic Lagrange between samples.
pub fn convolve_green(gf: &GreenFunction, phi: &SampledFunction, t_lo: f64, t_hi: f64) -> Result<Convolution> {
    let dim = gf.cutoff().generator().dim();
    if phi.dim() != dim {
        return Err(Error::DimensionMismatch(format!("input of dimension {} for a {dim}-dimensional Green function", phi.dim())));
    }
    if !(t_lo <= t_hi) {
        return Err(Error::Invalid(format!("empty output window [{t_lo}, {t_hi}]")));
    }
    let t_max = gf.t_max();
    let slack = 1e-9 * phi.step();
    if phi.t0() > t_lo - t_max + slack || phi.t_end() < t_hi + t_max - slack {
        return Err(Error::InsufficientSpan(format!(
            "input covers [{}, {}], need [{}, {}]",
            phi.t0(),
            phi.t_end(),
            t_lo - t_max,
            t_hi + t_max
        )));
    }
    let out_grid = phi.restrict(t_lo, t_hi)?;
    let first = phi.index_of(out_grid.t0(), 1e-6).expect("restricted grid lies on the input grid");
    let n_out = out_grid.len();
    let nodes = gf.quadrature_nodes(1.0, NEGLIGIBLE_PANEL);
    let step = phi.step();
    let n_in = phi.len();
    let data = phi.data();

    let mut out = vec![Complex64::new(0.0, 0.0); n_out * dim];
    out.par_chunks_mut(dim).enumerate().for_each(|(i, acc)| {
        let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
        for (s, w, g) in &nodes {
            let x = (first + i) as f64 - s / step;
            let base = (x.floor() as isize - 1).clamp(0, n_in as isize - 4) as usize;
            let l = lagrange4(x - base as f64);
            tmp.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for (q, lq) in l.iter().enumerate() {
                let v = &data[(base + q) * dim..(base + q + 1) * dim];
                for (t, vz) in tmp.iter_mut().zip(v) {
                    *t += vz * lq;
                }
            }
            g.mul_vec_acc(Complex64::new(*w, 0.0), &tmp, acc);
        }
    });

    let sup_phi = phi.sup_bound();
    let young_bound = gf.l1_norm() * sup_phi;
    let truncation_bound = sup_phi * (gf.tail_mass_bound() + gf.near_zero().contribution);
    let actual = out.chunks(dim).map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let solution = SampledFunction::new(out_grid.t0(), step, dim, out, young_bound.max(actual))?;
    Ok(Convolution {
        solution,
        metadata: ConvolutionMetadata {
            truncation_bound,
            young_bound,
            young_bound_holds: actual <= young_bound,
            quadrature_nodes: nodes.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, ComplexVector};

    #[test]
    fn scalar_exponential_input() {
        let g = GeneratorSpec::matrix(ComplexMatrix::from_real(1, 1, &[-1.0])).unwrap();
        let p = TrigPolynomial::exponential(1.0, ComplexVector::from_real(&[1.0])).unwrap();
        let u = solve_trig(&g, &p).unwrap();
        let want = Complex64::new(1.0, 0.0) / Complex64::new(1.0, 1.0);
        assert!((u.terms()[0].amplitude.entries()[0] - want).norm() < 1e-15);
    }

    #[test]
    fn constant_input_uses_inverse() {
        let g = GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[-2.0, 1.0, 0.0, -4.0])).unwrap();
        let x = ComplexVector::from_real(&[1.0, 2.0]);
        let u = solve_trig(&g, &TrigPolynomial::exponential(0.0, x).unwrap()).unwrap();
        // (-A)^{-1} x = [[1/2, 1/8], [0, 1/4]] x
        let v = u.eval(0.0);
        assert!((v.entries()[0] - Complex64::new(0.75, 0.0)).norm() < 1e-15);
        assert!((v.entries()[1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_and_resonant_inputs() {
        let g = GeneratorSpec::matrix(ComplexMatrix::from_diagonal(&[Complex64::new(0.0, 2.0)])).unwrap();
        assert!(solve_trig(&g, &TrigPolynomial::zero(1)).unwrap().is_zero());
        let p = TrigPolynomial::exponential(2.0, ComplexVector::from_real(&[1.0])).unwrap();
        assert_eq!(solve_trig(&g, &p).unwrap_err().kind(), "ResonanceError");
    }
}
