//! Finite-sample evidence for Bohr almost periodicity.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::SampledFunction;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApEvidence {
    pub is_ap_evidence: bool,
    /// Largest gap between successive almost periods, divided by the window.
    pub period_density: f64,
    pub eps: f64,
    pub window: f64,
    pub almost_periods: usize,
    pub max_gap: f64,
}

/// Scans grid shifts `τ ∈ (0, span/2]` and checks that every length-`window`
/// interval of `(0, span/2]` holds an `eps`-almost period, measured as
/// `sup_t ‖f(t + τ) - f(t)‖` over the sample overlap.
pub fn ap_detector(f: &SampledFunction, eps: f64, window: f64) -> Result<ApEvidence> {
    if !(eps > 0.0) || !(window > 0.0) {
        return Err(Error::Invalid(format!("eps and window must be positive (eps = {eps}, window = {window})")));
    }
    let span = f.span();
    if span < 8.0 * window {
        return Err(Error::InsufficientSpan(format!("span {span} is shorter than 8 * window = {}", 8.0 * window)));
    }
    let step = f.step();
    let n = f.len();
    let dim = f.dim();
    let data = f.data();
    let max_shift = ((0.5 * span) / step + 1e-9).floor() as usize;
    let eps2 = eps * eps;
    let hits: Vec<usize> = (1..=max_shift)
        .into_par_iter()
        .filter(|&s| {
            (0..n - s).all(|k| {
                let a = &data[k * dim..(k + 1) * dim];
                let b = &data[(k + s) * dim..(k + s + 1) * dim];
                a.iter().zip(b).map(|(x, y)| (y - x).norm_sqr()).sum::<f64>() <= eps2
            })
        })
        .collect();
    let half = max_shift as f64 * step;
    let mut prev = 0.0;
    let mut max_gap: f64 = 0.0;
    for &s in &hits {
        let tau = s as f64 * step;
        max_gap = max_gap.max(tau - prev);
        prev = tau;
    }
    max_gap = max_gap.max(half - prev);
    Ok(ApEvidence {
        is_ap_evidence: max_gap <= window,
        period_density: max_gap / window,
        eps,
        window,
        almost_periods: hits.len(),
        max_gap,
    })
}
