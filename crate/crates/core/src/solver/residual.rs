//! Defects of a sampled candidate `u` in the integrated and the
//! variation-of-constants forms of `u' = Au + φ`, normalized by `1 + ‖u‖_∞`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::harmonic::{mean_operator, SampledFunction};
use crate::linalg::ComplexVector;

/// Longest probe interval accepted by [`mild_residual_voc`].
pub const MAX_PROBE_LENGTH: f64 = 10.0;

fn vnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `φ` on the grid of `u` (exact on shared grid points, cubic otherwise).
pub fn resample_onto(phi: &SampledFunction, u: &SampledFunction) -> Result<SampledFunction> {
    if phi.dim() != u.dim() {
        return Err(Error::DimensionMismatch(format!("u has dimension {}, phi {}", u.dim(), phi.dim())));
    }
    let mut data = Vec::with_capacity(u.len() * u.dim());
    for k in 0..u.len() {
        let t = u.time(k);
        let v = match phi.index_of(t, 1e-9) {
            Some(j) => phi.value(j).to_vec(),
            None => phi.interpolate(t).ok_or_else(|| Error::InsufficientSpan(format!("phi does not cover t = {t}")))?,
        };
        data.extend(v);
    }
    SampledFunction::from_data(u.t0(), u.step(), u.dim(), data)
}

fn check_dim(g: &GeneratorSpec, u: &SampledFunction) -> Result<()> {
    if g.dim() != u.dim() {
        return Err(Error::DimensionMismatch(format!("generator of dimension {}, samples of dimension {}", g.dim(), u.dim())));
    }
    Ok(())
}

/// Max over probes `(t0, t)` of `‖u(t) - e^{(t-t0)A} u(t0) - ∫_{t0}^t e^{(t-s)A} φ(s) ds‖`,
/// trapezoid at the step of `u`, accumulated by Horner with `e^{hA}`.
pub fn mild_residual_voc(g: &GeneratorSpec, u: &SampledFunction, phi: &SampledFunction, probes: &[(f64, f64)]) -> Result<f64> {
    check_dim(g, u)?;
    if g.is_oracle() {
        return Err(Error::OracleUnavailable);
    }
    let step = u.step();
    let phi = resample_onto(phi, u)?;
    let e_h = g.semigroup(step)?;
    let scale = 1.0 + u.sup_norm();
    let defects: Vec<Result<f64>> = probes
        .par_iter()
        .map(|&(t0, t)| {
            if !(t >= t0) || t - t0 > MAX_PROBE_LENGTH {
                return Err(Error::Invalid(format!("probe ({t0}, {t}) must satisfy 0 <= t - t0 <= {MAX_PROBE_LENGTH}")));
            }
            let i0 = u.index_of(t0, 1e-6).ok_or_else(|| Error::Invalid(format!("probe start {t0} is not a grid point of u")))?;
            let i1 = u.index_of(t, 1e-6).ok_or_else(|| Error::Invalid(format!("probe end {t} is not a grid point of u")))?;
            let mut acc = ComplexVector::new(phi.value(i0).to_vec()).scale(Complex64::new(0.5, 0.0));
            for j in i0 + 1..=i1 {
                let w = if j == i1 { 0.5 } else { 1.0 };
                acc = e_h.mul_vec(&acc);
                acc.add_scaled(Complex64::new(w, 0.0), &ComplexVector::new(phi.value(j).to_vec()));
            }
            if i1 == i0 {
                acc = ComplexVector::zeros(u.dim());
            }
            let orbit = g.semigroup((i1 - i0) as f64 * step)?.mul_vec(&u.vector(i0));
            let mut r = u.vector(i1);
            r.add_scaled(Complex64::new(-1.0, 0.0), &orbit);
            r.add_scaled(Complex64::new(-step, 0.0), &acc);
            Ok(r.norm())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for d in defects {
        worst = worst.max(d?);
    }
    Ok(worst / scale)
}

/// Index of the grid point used as the origin of the integrated form.
fn origin_index(u: &SampledFunction) -> Result<usize> {
    if u.t0() > 0.5 * u.step() || u.t_end() < -0.5 * u.step() {
        return Err(Error::InsufficientSpan(format!("grid [{}, {}] does not contain 0", u.t0(), u.t_end())));
    }
    Ok(((-u.t0() / u.step()).round() as usize).min(u.len() - 1))
}

/// Signed cumulative trapezoid integrals from index `i0`.
fn cumulative_from(f: &SampledFunction, i0: usize) -> Vec<Complex64> {
    let dim = f.dim();
    let h = f.step();
    let mut c = vec![Complex64::new(0.0, 0.0); f.len() * dim];
    for k in i0 + 1..f.len() {
        for d in 0..dim {
            c[k * dim + d] = c[(k - 1) * dim + d] + 0.5 * h * (f.value(k - 1)[d] + f.value(k)[d]);
        }
    }
    for k in (0..i0).rev() {
        for d in 0..dim {
            c[k * dim + d] = c[(k + 1) * dim + d] - 0.5 * h * (f.value(k)[d] + f.value(k + 1)[d]);
        }
    }
    c
}

/// Max over grid `t` of `‖u(t) - u(0) - A ∫_0^t u - ∫_0^t φ‖`, with the grid
/// point nearest to 0 as origin.
pub fn mild_residual_integral(g: &GeneratorSpec, u: &SampledFunction, phi: &SampledFunction) -> Result<f64> {
    check_dim(g, u)?;
    let phi = resample_onto(phi, u)?;
    let i0 = origin_index(u)?;
    let dim = u.dim();
    let cu = cumulative_from(u, i0);
    let cp = cumulative_from(&phi, i0);
    let u0 = u.value(i0);
    let worst = (0..u.len())
        .into_par_iter()
        .map(|k| {
            let au = g.apply(&cu[k * dim..(k + 1) * dim]);
            let r: Vec<Complex64> = (0..dim).map(|d| u.value(k)[d] - u0[d] - au[d] - cp[k * dim + d]).collect();
            vnorm(&r)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst / (1.0 + u.sup_norm()))
}

/// Max over interior grid points of `‖(M_h u)' - A M_h u - M_h φ‖` with centered
/// differences, normalized like the other residuals.
pub fn mean_regularization_check(g: &GeneratorSpec, u: &SampledFunction, phi: &SampledFunction, h: f64) -> Result<f64> {
    check_dim(g, u)?;
    if h < 4.0 * u.step() * (1.0 - 1e-12) {
        return Err(Error::Invalid(format!("window {h} is shorter than 4 steps ({})", 4.0 * u.step())));
    }
    let phi = resample_onto(phi, u)?;
    let v = mean_operator(u, h)?;
    let psi = mean_operator(&phi, h)?;
    if v.len() < 3 {
        return Err(Error::InsufficientSpan("fewer than 3 averaged samples".into()));
    }
    let dim = u.dim();
    let inv = 0.5 / v.step();
    let worst = (1..v.len() - 1)
        .into_par_iter()
        .map(|k| {
            let av = g.apply(v.value(k));
            let r: Vec<Complex64> =
                (0..dim).map(|d| (v.value(k + 1)[d] - v.value(k - 1)[d]) * inv - av[d] - psi.value(k)[d]).collect();
            vnorm(&r)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst / (1.0 + u.sup_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    fn scalar(a: f64) -> GeneratorSpec {
        GeneratorSpec::matrix(ComplexMatrix::from_real(1, 1, &[a])).unwrap()
    }

    fn sample(t0: f64, step: f64, n: usize, f: impl Fn(f64) -> Complex64) -> SampledFunction {
        SampledFunction::from_fn(t0, step, n, 1, |t| vec![f(t)]).unwrap()
    }

    #[test]
    fn homogeneous_orbit_has_tiny_residuals() {
        let g = scalar(-1.0);
        let u = sample(-2.0, 0.01, 401, |t| Complex64::new((-t).exp(), 0.0));
        let zero = sample(-2.0, 0.01, 401, |_| Complex64::new(0.0, 0.0));
        assert!(mild_residual_voc(&g, &u, &zero, &[(-2.0, 0.0), (0.0, 2.0)]).unwrap() < 1e-8);
        assert!(mild_residual_integral(&g, &u, &zero).unwrap() < 1e-4);
        assert!(mean_regularization_check(&g, &u, &zero, 0.5).unwrap() < 1e-4);
    }

    #[test]
    fn constant_non_solution_is_detected() {
        let g = scalar(-1.0);
        let u = sample(-5.0, 0.01, 1001, |_| Complex64::new(1.0, 0.0));
        let zero = sample(-5.0, 0.01, 1001, |_| Complex64::new(0.0, 0.0));
        assert!(mild_residual_integral(&g, &u, &zero).unwrap() > 0.1);
    }

    #[test]
    fn ramp_fails_mean_check() {
        let g = scalar(-1.0);
        let u = sample(-5.0, 0.01, 1001, |t| Complex64::new(t, 0.0));
        let zero = sample(-5.0, 0.01, 1001, |_| Complex64::new(0.0, 0.0));
        assert!(mean_regularization_check(&g, &u, &zero, 0.5).unwrap() > 0.1);
    }

    #[test]
    fn oracle_has_no_semigroup() {
        let g = GeneratorSpec::oracle(vec![Complex64::new(-1.0, 0.0)], None).unwrap();
        let u = sample(0.0, 0.1, 10, |_| Complex64::new(0.0, 0.0));
        assert_eq!(mild_residual_voc(&g, &u, &u, &[(0.0, 0.5)]).unwrap_err().kind(), "OracleUnavailable");
    }
}
