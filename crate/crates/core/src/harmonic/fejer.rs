//! Fejér approximation of sampled data by trigonometric polynomials whose
//! exponents avoid a prescribed compact set `M`.
//!
//! `f` is restricted to `[-n, n]`, resampled on an aligned grid and extended
//! 2n-periodically through its piecewise linear interpolant, whose Fourier
//! coefficients are exact (DFT times the hat-function factor). The Cesàro
//! mean of order `N` is then corrected by `1 - ψ̂` with `ψ̂` the plateau bump
//! equal to 1 near `M`, so exponents inside `M` vanish exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::cutoff::{make_bump, PlateauBump};
use crate::error::{Error, Result};
use crate::harmonic::{periodogram, spectrum_estimate, SampledFunction, TrigPolynomial};
use crate::linalg::ComplexVector;
use crate::sets::SpectrumSet;

const ROUNDOFF: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FejerOptions {
    /// Threshold for the spectrum surrogate of `f` used in the separation test.
    pub threshold: f64,
    pub initial_order: usize,
    pub max_order: usize,
    /// Evaluation grid is this many times finer than the resampled data.
    pub refine: usize,
    /// Extra strict upper bound on the accepted L1 error.
    pub error_cap: f64,
}

impl Default for FejerOptions {
    fn default() -> Self {
        FejerOptions { threshold: 0.1, initial_order: 8, max_order: 1 << 18, refine: 4, error_cap: f64::INFINITY }
    }
}

#[derive(Clone, Debug)]
pub struct FejerApproximation {
    pub polynomial: TrigPolynomial,
    pub n: usize,
    pub order: usize,
    /// `∫_{-n}^{n} ‖f - σ_N‖` against the linear interpolant, before correction.
    pub l1_error: f64,
    pub target: f64,
    pub target_met: bool,
    /// Grid maximum of `‖Π_n‖` over one period.
    pub sup_norm: f64,
    /// `‖f‖_∞ + 1`
    pub sup_limit: f64,
    pub bump: PlateauBump,
}

impl FejerApproximation {
    pub fn sup_bound_holds(&self) -> bool {
        self.sup_norm <= self.sup_limit
    }
}

pub fn fejer_approximation(f: &SampledFunction, n: usize, m_avoid: &SpectrumSet) -> Result<FejerApproximation> {
    fejer_approximation_with(f, n, m_avoid, FejerOptions::default())
}

/// Approximations for `n = 1..=n_max`, each accepted only below the previous L1 error.
pub fn fejer_sequence(f: &SampledFunction, n_max: usize, m_avoid: &SpectrumSet, opts: FejerOptions) -> Result<Vec<FejerApproximation>> {
    let mut out: Vec<FejerApproximation> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let cap = out.last().map_or(opts.error_cap, |p| p.l1_error.min(opts.error_cap));
        out.push(fejer_approximation_with(f, n, m_avoid, FejerOptions { error_cap: cap, ..opts })?);
    }
    Ok(out)
}

pub fn fejer_approximation_with(f: &SampledFunction, n: usize, m_avoid: &SpectrumSet, opts: FejerOptions) -> Result<FejerApproximation> {
    if n == 0 {
        return Err(Error::Invalid("Fejér index n must be at least 1".into()));
    }
    let half = n as f64;
    let step = f.step();
    let slack = 1e-9 * step;
    if f.t0() > -half + slack || f.t_end() < half - slack {
        return Err(Error::InsufficientSpan(format!("samples cover [{}, {}], need [-{n}, {n}]", f.t0(), f.t_end())));
    }
    let bump = avoidance_bump(f, m_avoid, opts.threshold)?;

    // aligned periodic grid on [-n, n)
    let m = ((2.0 * half / step).round() as usize).max(8);
    let h = 2.0 * half / m as f64;
    let dim = f.dim();
    let mut grid = vec![vec![Complex64::new(0.0, 0.0); m]; dim];
    for j in 0..m {
        let v = f.interpolate(-half + j as f64 * h).expect("inside the sampled span");
        for c in 0..dim {
            grid[c][j] = v[c];
        }
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let spectra: Vec<Vec<Complex64>> = grid
        .iter()
        .map(|g| {
            let mut b = g.clone();
            fwd.process(&mut b);
            b
        })
        .collect();
    // Fourier coefficient of the periodic linear interpolant at frequency πk/n
    let coefficient = |c: usize, k: i64| -> Complex64 {
        let x = PI * k as f64 / m as f64;
        let hat = if k == 0 { 1.0 } else { (x.sin() / x).powi(2) };
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        spectra[c][k.rem_euclid(m as i64) as usize] * (sign * hat / m as f64)
    };

    let l = m * opts.refine.max(1);
    let inv = planner.plan_fft_inverse(l);
    let fine_ref: Vec<Vec<Complex64>> = grid
        .iter()
        .map(|g| {
            (0..l)
                .map(|i| {
                    let x = i as f64 / opts.refine.max(1) as f64;
                    let j = x.floor() as usize;
                    let th = x - j as f64;
                    g[j % m] * (1.0 - th) + g[(j + 1) % m] * th
                })
                .collect()
        })
        .collect();
    let evaluate = |order: usize, weight: &dyn Fn(i64) -> f64| -> Vec<Vec<Complex64>> {
        (0..dim)
            .map(|c| {
                let mut bins = vec![Complex64::new(0.0, 0.0); l];
                for k in -(order as i64)..=(order as i64) {
                    let w = weight(k);
                    if w == 0.0 {
                        continue;
                    }
                    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    bins[k.rem_euclid(l as i64) as usize] += coefficient(c, k) * (w * sign);
                }
                inv.process(&mut bins);
                bins
            })
            .collect()
    };
    let cell = 2.0 * half / l as f64;
    let l1_distance = |vals: &[Vec<Complex64>]| -> f64 {
        (0..l).map(|i| (0..dim).map(|c| (vals[c][i] - fine_ref[c][i]).norm_sqr()).sum::<f64>().sqrt()).sum::<f64>() * cell
    };

    let target = 0.5f64.powi(n as i32).max(1e-3 * f.sup_norm()).min(opts.error_cap);
    let mut order = opts.initial_order.max(1);
    let (order, l1_error, target_met) = loop {
        let fej = |k: i64| 1.0 - k.unsigned_abs() as f64 / (order + 1) as f64;
        let err = l1_distance(&evaluate(order, &fej));
        if err < target {
            break (order, err, true);
        }
        let next = ((order as f64) * std::f64::consts::SQRT_2).ceil() as usize;
        if next > opts.max_order {
            break (order, err, false);
        }
        order = next;
    };

    let correction = |k: i64| -> f64 {
        let lambda = PI * k as f64 / half;
        (1.0 - k.unsigned_abs() as f64 / (order + 1) as f64) * (1.0 - bump.value(lambda))
    };
    let mut terms = Vec::with_capacity(2 * order + 1);
    for k in -(order as i64)..=(order as i64) {
        let w = correction(k);
        if w == 0.0 {
            continue;
        }
        let amp = ComplexVector::new((0..dim).map(|c| coefficient(c, k) * w).collect());
        terms.push((PI * k as f64 / half, amp));
    }
    // FFT round-off leaves nonzero dust on absent harmonics
    let largest = terms.iter().map(|(_, x)| x.norm()).fold(0.0, f64::max);
    terms.retain(|(_, x)| x.norm() > ROUNDOFF * largest);
    let polynomial = TrigPolynomial::new(dim, terms)?;
    if let Some(bad) = polynomial.frequencies().into_iter().find(|&x| m_avoid.contains(x)) {
        return Err(Error::Separation(format!("exponent {bad} survived inside the avoided set")));
    }
    let vals = evaluate(order, &correction);
    let sup_norm = (0..l).map(|i| (0..dim).map(|c| vals[c][i].norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max);
    Ok(FejerApproximation {
        polynomial,
        n,
        order,
        l1_error,
        target,
        target_met,
        sup_norm,
        sup_limit: f.sup_norm() + 1.0,
        bump,
    })
}

/// Plateau bump equal to 1 near `M`, supported away from the dominant content of `f`.
fn avoidance_bump(f: &SampledFunction, m_avoid: &SpectrumSet, threshold: f64) -> Result<PlateauBump> {
    if m_avoid.is_empty() {
        return Ok(PlateauBump::zero());
    }
    let cover = m_avoid.as_intervals();
    if cover.iter().any(|c| !c.is_bounded()) {
        return Err(Error::Invalid("avoided set must be compact".into()));
    }
    let content = spectrum_estimate(f, threshold)?;
    let bin = periodogram(f)?.bin_width;
    let d = content.distance_to_intervals(&cover);
    if d <= bin {
        return Err(Error::Separation(format!("avoided set lies within {d:.3e} of the content of f (bin width {bin:.3e})")));
    }
    let margin = d.min(4.0) / 4.0;
    make_bump(&cover, &content, margin)
}
