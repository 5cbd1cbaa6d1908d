//! Sliding mean `(M_h f)(t) = (1/h) ∫_0^h f(t + s) ds`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic::{lagrange4, SampledFunction};

// two-point Gauss rule on [0, 1], exact for the cubic interpolant
const GAUSS2: [(f64, f64); 2] = [(0.211_324_865_405_187_1, 0.5), (0.788_675_134_594_812_9, 0.5)];

/// Composite trapezoid with Euler–Maclaurin end corrections (derivatives by
/// second-order differences); a window end between samples is integrated on
/// the cubic interpolant. The output lives on the same grid, shortened by `h`
/// at the right end.
pub fn mean_operator(f: &SampledFunction, h: f64) -> Result<SampledFunction> {
    let step = f.step();
    let span = f.span();
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Invalid(format!("window must be positive, got {h}")));
    }
    if h > span {
        return Err(Error::WindowTooWide { h, span });
    }
    if h < step * (1.0 - 1e-12) {
        return Err(Error::Invalid(format!("window {h} is shorter than the step {step}")));
    }
    let n = f.len();
    let dim = f.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut cum = vec![zero; n * dim];
    for k in 1..n {
        for c in 0..dim {
            cum[k * dim + c] = cum[(k - 1) * dim + c] + 0.5 * step * (f.value(k - 1)[c] + f.value(k)[c]);
        }
    }
    let deriv = derivatives(f);
    let em = step * step / 12.0;
    let shift = h / step;
    let whole = (shift + 1e-9).floor() as usize;
    let theta = (shift - whole as f64).max(0.0);
    let partial = theta > 1e-9;
    let out_len = n - whole - usize::from(partial);
    if out_len == 0 {
        return Err(Error::WindowTooWide { h, span });
    }
    let mut data = Vec::with_capacity(out_len * dim);
    for k in 0..out_len {
        let j = k + whole;
        let tail = if partial { partial_weights(j, theta, n, step) } else { None };
        for c in 0..dim {
            let mut integral = cum[j * dim + c] - cum[k * dim + c];
            if let Some(d) = &deriv {
                integral -= em * (d[j * dim + c] - d[k * dim + c]);
            }
            if let Some((base, w)) = tail {
                for (q, wq) in w.iter().enumerate() {
                    integral += f.value(base + q)[c] * wq;
                }
            } else if partial {
                // fewer than four samples: linear interpolant
                let a = f.value(j)[c];
                let b = f.value(j + 1)[c];
                integral += step * (theta * a + 0.5 * theta * theta * (b - a));
            }
            data.push(integral / h);
        }
    }
    let max = data.chunks(dim).map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max);
    SampledFunction::new(f.t0(), step, dim, data, f.sup_bound().max(max))
}

/// Second-order difference estimates of `f'` at every sample.
fn derivatives(f: &SampledFunction) -> Option<Vec<Complex64>> {
    let n = f.len();
    if n < 3 {
        return None;
    }
    let dim = f.dim();
    let inv = 0.5 / f.step();
    let mut d = Vec::with_capacity(n * dim);
    for k in 0..n {
        for c in 0..dim {
            let v = |i: usize| f.value(i)[c];
            d.push(match k {
                0 => (-3.0 * v(0) + 4.0 * v(1) - v(2)) * inv,
                _ if k == n - 1 => (3.0 * v(k) - 4.0 * v(k - 1) + v(k - 2)) * inv,
                _ => (v(k + 1) - v(k - 1)) * inv,
            });
        }
    }
    Some(d)
}

/// Weights of `∫_{t_j}^{t_j + θ step}` on the cubic through four nearby samples.
fn partial_weights(j: usize, theta: f64, n: usize, step: f64) -> Option<(usize, [f64; 4])> {
    if n < 4 {
        return None;
    }
    let base = (j as isize - 1).clamp(0, n as isize - 4) as usize;
    let x0 = (j - base) as f64;
    let mut w = [0.0; 4];
    for (xi, wg) in GAUSS2 {
        let l = lagrange4(x0 + theta * xi);
        for q in 0..4 {
            w[q] += wg * theta * step * l[q];
        }
    }
    Some((base, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_fixed() {
        let f = SampledFunction::from_fn(0.0, 0.1, 50, 1, |_| vec![Complex64::new(2.0, -1.0)]).unwrap();
        let m = mean_operator(&f, 0.73).unwrap();
        assert!(m.data().iter().all(|z| (z - Complex64::new(2.0, -1.0)).norm() < 1e-14));
        assert_eq!(m.len(), 50 - 8);
    }

    #[test]
    fn exponential_window_closed_form() {
        let f = SampledFunction::from_fn(-5.0, 1e-3, 10_001, 1, |t| vec![Complex64::from_polar(1.0, 2.0 * t)]).unwrap();
        let m = mean_operator(&f, 1.0).unwrap();
        let i2 = Complex64::new(0.0, 2.0);
        let factor = (i2.exp() - 1.0) / i2;
        let err = (0..m.len()).map(|k| (m.value(k)[0] - Complex64::from_polar(1.0, 2.0 * m.time(k)) * factor).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "err = {err:e}");
    }

    #[test]
    fn step_window_is_close_to_f() {
        let f = SampledFunction::from_fn(0.0, 1e-3, 2000, 1, |t| vec![Complex64::new(t.sin(), 0.0)]).unwrap();
        let m = mean_operator(&f, 1e-3).unwrap();
        let err = (0..m.len()).map(|k| (m.value(k)[0] - f.value(k)[0]).norm()).fold(0.0, f64::max);
        assert!(err < 1e-3);
    }

    #[test]
    fn too_wide() {
        let f = SampledFunction::from_fn(0.0, 0.5, 4, 1, |_| vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(mean_operator(&f, 2.0).unwrap_err().kind(), "WindowTooWide");
    }
}
