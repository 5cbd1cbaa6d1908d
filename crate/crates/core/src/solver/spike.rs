//! Spike train `φ = Σ_{k=2}^{n_max} k · 1_{[k, k+1/k]}` for `u' = -u + φ`:
//! bounded in the Stepanoff norm, with a bounded solution that is not
//! uniformly continuous.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_SPIKES: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct SpikeTrainReport {
    pub n_max: usize,
    pub sup_norm: f64,
    /// `(n, |u(n + 1/n) - u(n)|)`
    pub increments: Vec<(usize, f64)>,
    /// `sup_x ∫_x^{x+1} |φ|`
    pub stepanoff_norm: f64,
    pub stepanoff_bound_holds: bool,
}

/// `u(t) = ∫_0^∞ e^{-s} φ(t - s) ds`, summed spike by spike in closed form.
pub fn spike_solution(n_max: usize, t: f64) -> f64 {
    let mut u = 0.0;
    for k in 2..=n_max {
        let lo = k as f64;
        if t <= lo {
            break;
        }
        let hi = lo + 1.0 / k as f64;
        let top = t.min(hi);
        // k ∫_lo^top e^{-(t - r)} dr
        u += k as f64 * ((top - t).exp() - (lo - t).exp());
    }
    u
}

fn spike_mass(n_max: usize, a: f64, b: f64) -> f64 {
    (2..=n_max)
        .map(|k| {
            let lo = k as f64;
            let hi = lo + 1.0 / k as f64;
            k as f64 * (b.min(hi) - a.max(lo)).max(0.0)
        })
        .sum()
}

pub fn spike_train_counterexample(n_max: usize) -> Result<SpikeTrainReport> {
    if !(2..=MAX_SPIKES).contains(&n_max) {
        return Err(Error::Invalid(format!("n_max must lie in 2..={MAX_SPIKES}, got {n_max}")));
    }
    let end = n_max as f64 + 2.0;
    // local maxima sit at spike ends; the uniform grid covers the rest
    let mut sup: f64 = 0.0;
    let grid = (end / 1e-3) as usize;
    for i in 0..=grid {
        sup = sup.max(spike_solution(n_max, i as f64 * 1e-3));
    }
    for k in 2..=n_max {
        sup = sup.max(spike_solution(n_max, k as f64 + 1.0 / k as f64));
    }
    let increments = (2..=n_max)
        .map(|n| {
            let t = n as f64;
            (n, (spike_solution(n_max, t + 1.0 / t) - spike_solution(n_max, t)).abs())
        })
        .collect();
    // the window mass is piecewise linear in x with kinks where x or x + 1 hits a spike end
    let mut stepanoff: f64 = 0.0;
    for k in 2..=n_max {
        let lo = k as f64;
        let hi = lo + 1.0 / k as f64;
        for x in [lo, hi, lo - 1.0, hi - 1.0] {
            stepanoff = stepanoff.max(spike_mass(n_max, x, x + 1.0));
        }
    }
    Ok(SpikeTrainReport { n_max, sup_norm: sup, increments, stepanoff_norm: stepanoff, stepanoff_bound_holds: stepanoff <= 2.0 })
}
