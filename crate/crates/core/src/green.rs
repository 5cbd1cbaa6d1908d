//! The Green function `G(t) = (1/2π) ∫ H(s) e^{its} ds` and its certificates.
//!
//! `G` is evaluated in the integrated-by-parts form
//! `G(t) = (1/2π) (i/t)^k ∫ H^{(k)}(s) e^{its} ds` with `k = 1` for `|t| < 1`
//! and `k = 2` otherwise. The frequency integral runs over `[-S, S]` with a
//! Filon rule; beyond `±S` two further integrations by parts of the pure
//! resolvent tail give a closed-form correction with a certified remainder.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutoff::CutoffResolvent;
use crate::error::{Error, Result};
use crate::generator::{derivative_bound_value, factorial};
use crate::operator::{LinearValue, Operator};
use crate::quadrature::{LegendreRule, PanelPlan, PanelTolerance};

/// `G` is not evaluated for `|t|` below this.
pub const NEAR_ZERO: f64 = 1e-6;
/// Target for the discarded frequency tail of `G(t)`.
pub const TAIL_TARGET: f64 = 1e-8;
/// Largest admissible near-zero contribution to the L1 norm.
pub const NEAR_ZERO_BUDGET: f64 = 1e-5;

const S_ORDER: usize = 16;
const T_ORDER: usize = 12;
const OUTER_RATIO: f64 = 1.5;
const CORE_PANEL_WIDTH: f64 = 1.0;
const UNIT_PANEL_LIMIT: f64 = 64.0;
const FAR_RATIO: f64 = 1.25;
const NEAR_MODEL_DECADE: f64 = 1e-5;

/// `R^{(1)}, R^{(2)}, R^{(3)}` at `±S`.
#[derive(Clone, Debug)]
struct EdgeValues {
    d: Vec<Operator>,
}

/// Frequency-side quadrature layout valid for every `|t| >= t_min`.
#[derive(Clone, Debug)]
pub struct GreenPlan {
    cutoff: CutoffResolvent,
    plan: PanelPlan<Operator>,
    s_max: f64,
    t_min: f64,
    right: EdgeValues,
    left: EdgeValues,
}

fn order_for(t: f64) -> usize {
    if t.abs() >= 1.0 {
        2
    } else {
        1
    }
}

impl GreenPlan {
    pub fn new(cutoff: &CutoffResolvent, t_min: f64) -> Result<Self> {
        if !(t_min >= NEAR_ZERO) {
            return Err(Error::NearZero(t_min));
        }
        let g = cutoff.generator();
        let rho = g.neumann_radius();
        let s_max = choose_s(cutoff, t_min);

        let lambda_im = g.spectrum().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let core = (cutoff.b().max(rho).max(lambda_im) + 2.0).min(s_max);
        let mut breaks: Vec<f64> = vec![-core, core, 0.0, cutoff.b(), -cutoff.b()];
        breaks.extend(g.spectrum().iter().map(|z| z.im));
        breaks.extend(cutoff.bump().breakpoints());
        breaks.retain(|x| x.abs() <= core);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + y.abs()));

        let mut initial: Vec<(f64, f64)> = Vec::new();
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let n = ((hi - lo) / CORE_PANEL_WIDTH).ceil().max(1.0) as usize;
            for i in 0..n {
                let a = lo + (hi - lo) * i as f64 / n as f64;
                let b = if i + 1 == n { hi } else { lo + (hi - lo) * (i + 1) as f64 / n as f64 };
                initial.push((a, b));
            }
        }
        let mut x = core;
        while x < s_max {
            let next = (x * OUTER_RATIO).min(s_max);
            let next = if s_max - next < 0.25 * (next - x) { s_max } else { next };
            initial.push((x, next));
            initial.push((-next, -x));
            x = next;
        }

        let plan = PanelPlan::build(
            LegendreRule::new(S_ORDER),
            &initial,
            2,
            PanelTolerance::default(),
            |s| {
                let mut d = cutoff.derivatives(s, 2)?;
                let h2 = d.pop().expect("order 2");
                let h1 = d.pop().expect("order 1");
                Ok(vec![h1, h2])
            },
            |v: &Operator| v.norm(),
        )?;

        let edge = |s: f64| -> Result<EdgeValues> {
            let mut d = g.resolvent_derivatives(s, 3)?;
            d.remove(0);
            Ok(EdgeValues { d })
        };
        Ok(GreenPlan {
            cutoff: cutoff.clone(),
            plan,
            s_max,
            t_min,
            right: edge(s_max)?,
            left: edge(-s_max)?,
        })
    }

    pub fn cutoff(&self) -> &CutoffResolvent {
        &self.cutoff
    }

    /// Frequency truncation `S`.
    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn panel_count(&self) -> usize {
        self.plan.panels().len()
    }

    /// Panels accepted only by the width/depth guard.
    pub fn guard_hits(&self) -> usize {
        self.plan.guard_hits()
    }

    /// Numerical `∫_{-S}^{S} ||H''(s)|| ds`.
    pub fn h2_norm_integral(&self) -> f64 {
        self.plan.norm_integral(1)
    }

    /// `c₂ = (1/2π)(∫||H''|| + 2 (S - ρ)^{-2})`, so that `||G(t)|| <= c₂ / t²`.
    pub fn tail_coefficient(&self) -> f64 {
        let gap = self.s_max - self.cutoff.generator().neumann_radius();
        (self.h2_norm_integral() + 2.0 / (gap * gap)) / (2.0 * PI)
    }

    /// Certified bound on the error of the two-term tail correction at `t`.
    pub fn tail_remainder_bound(&self, t: f64) -> f64 {
        tail_remainder(&self.cutoff, self.s_max, t.abs(), order_for(t))
    }

    /// `G(t)` for `|t| >= t_min`.
    pub fn eval(&self, t: f64) -> Result<Operator> {
        if t.abs() < NEAR_ZERO {
            return Err(Error::NearZero(t.abs()));
        }
        if t.abs() < self.t_min * (1.0 - 1e-12) {
            return Err(Error::Domain(format!("|t| = {} below the plan's t_min = {}", t.abs(), self.t_min)));
        }
        let k = order_for(t);
        let mut acc = self.plan.integrate(k - 1, t).unwrap_or_else(|| self.right.d[0].zeros_like());
        let it = Complex64::new(0.0, t);
        let e_right = Complex64::from_polar(1.0, t * self.s_max);
        let e_left = e_right.conj();
        // ∫_S^∞ f e^{its} ≈ -f(S)e^{itS}/(it) + f'(S)e^{itS}/(it)²
        acc.axpy(-e_right / it, &self.right.d[k - 1]);
        acc.axpy(e_right / (it * it), &self.right.d[k]);
        // ∫_{-∞}^{-S} f e^{its} ≈ f(-S)e^{-itS}/(it) - f'(-S)e^{-itS}/(it)²
        acc.axpy(e_left / it, &self.left.d[k - 1]);
        acc.axpy(-e_left / (it * it), &self.left.d[k]);
        let pre = Complex64::new(0.0, 1.0 / t).powi(k as i32) / (2.0 * PI);
        Ok(acc.scale(pre))
    }
}

/// `(1/2π) |t|^{-k-2} · 2 · min(Neumann, decay-bound)` estimate of `∫_{|s|>S} ||R^{(k+2)}||`.
fn tail_remainder(cutoff: &CutoffResolvent, s: f64, t: f64, k: usize) -> f64 {
    let g = cutoff.generator();
    let gap = s - g.neumann_radius();
    let neumann = if gap > 0.0 { factorial(k + 1) / gap.powi(k as i32 + 2) } else { f64::INFINITY };
    let p = (k + 3) as f64 * g.delta() - 1.0;
    let decay = if s >= g.a() && p > 0.0 {
        derivative_bound_value(g.eta(), g.delta(), s, k + 2) * s / p
    } else {
        f64::INFINITY
    };
    t.powi(-(k as i32) - 2) * 2.0 * neumann.min(decay) / (2.0 * PI)
}

/// Smallest `S >= max(b, ρ) + 1` for which the tail remainder is below
/// [`TAIL_TARGET`] for every `|t| >= t_min`.
fn choose_s(cutoff: &CutoffResolvent, t_min: f64) -> f64 {
    let g = cutoff.generator();
    let floor = (cutoff.b() + 1.0).max(g.neumann_radius() + 1.0);
    // worst cases: k = 1 at t_min (if t_min < 1), k = 2 at max(t_min, 1)
    let mut cases = vec![(2usize, t_min.max(1.0))];
    if t_min < 1.0 {
        cases.push((1, t_min));
    }
    let ok = |s: f64| cases.iter().all(|&(k, t)| tail_remainder(cutoff, s, t, k) < TAIL_TARGET);
    if ok(floor) {
        return floor;
    }
    let mut hi = floor * 2.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `G(t)` directly; builds a frequency layout for this `t` alone.
pub fn green_at(cutoff: &CutoffResolvent, t: f64) -> Result<Operator> {
    if t.abs() < NEAR_ZERO {
        return Err(Error::NearZero(t.abs()));
    }
    GreenPlan::new(cutoff, t.abs())?.eval(t)
}

/// `||G(t)|| ≈ c₀ |t|^{δ-1}` on `[1e-6, 1e-5]` per side, integrated over `(0, 1e-6)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NearZeroModel {
    pub exponent: f64,
    pub c0_positive: f64,
    pub c0_negative: f64,
    pub contribution: f64,
}

/// One Gauss–Legendre panel of the time grid.
#[derive(Clone, Debug)]
pub struct TimePanel {
    pub lo: f64,
    pub hi: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<Operator>,
    pub norms: Vec<f64>,
    pub coeffs: Vec<Operator>,
}

impl TimePanel {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.hi + self.lo)
    }
}

/// Time-grid refinement tolerances.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for GridTolerance {
    fn default() -> Self {
        GridTolerance { abs: 1e-9, rel: 1e-8 }
    }
}

/// Sampled `G` on a graded symmetric grid with its L1 certificate.
#[derive(Clone, Debug)]
pub struct GreenFunction {
    plan: GreenPlan,
    rule: LegendreRule,
    panels: Vec<TimePanel>,
    t_max: f64,
    n_near: usize,
    tolerance: GridTolerance,
    c2: f64,
    sampled_l1: f64,
    near_zero: NearZeroModel,
    l1_norm: f64,
}

/// Numbers describing a built Green function, for reports and manifests.
#[derive(Clone, Debug, Serialize)]
pub struct GreenSummary {
    pub t_max: f64,
    pub n_near: usize,
    pub grid_tolerance: GridTolerance,
    pub frequency_cutoff: f64,
    pub frequency_panels: usize,
    pub frequency_guard_hits: usize,
    pub time_panels: usize,
    pub samples: usize,
    pub delta: f64,
    pub eta: f64,
    pub tail_coefficient: f64,
    pub sampled_l1: f64,
    pub tail_mass_bound: f64,
    pub near_zero: NearZeroModel,
    pub l1_norm: f64,
}

/// Positive half of the base time grid.
fn base_edges(t_max: f64, n_near: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=n_near).map(|i| NEAR_ZERO * (1.0 / NEAR_ZERO).powf(i as f64 / n_near as f64)).collect();
    *e.last_mut().expect("nonempty") = 1.0;
    let unit_end = t_max.min(UNIT_PANEL_LIMIT);
    let mut x = 1.0;
    while x < unit_end {
        x = (x + 1.0).min(unit_end);
        e.push(x);
    }
    while x < t_max {
        let next = (x * FAR_RATIO).min(t_max);
        x = if t_max - next < 0.25 * (next - x) { t_max } else { next };
        e.push(x);
    }
    e
}

/// Samples `G` on the graded grid and certifies its L1 norm.
pub fn build_green(cutoff: &CutoffResolvent, t_max: f64, n_near: usize) -> Result<GreenFunction> {
    build_green_with(cutoff, t_max, n_near, GridTolerance::default())
}

pub fn build_green_with(
    cutoff: &CutoffResolvent,
    t_max: f64,
    n_near: usize,
    tolerance: GridTolerance,
) -> Result<GreenFunction> {
    if !(t_max >= 10.0) || !t_max.is_finite() {
        return Err(Error::Grid(format!("t_max = {t_max} must be at least 10")));
    }
    if n_near < 32 {
        return Err(Error::Grid(format!("n_near = {n_near} must be at least 32")));
    }
    let plan = GreenPlan::new(cutoff, NEAR_ZERO)?;
    let rule = LegendreRule::new(T_ORDER);
    let edges = base_edges(t_max, n_near);
    let mut pending: Vec<(f64, f64, usize)> = Vec::new();
    for w in edges.windows(2) {
        pending.push((w[0], w[1], 0));
        pending.push((-w[1], -w[0], 0));
    }
    let mut panels: Vec<TimePanel> = Vec::new();
    let mut scale = 0.0f64;
    while !pending.is_empty() {
        let nodes: Vec<f64> = pending.iter().flat_map(|&(lo, hi, _)| rule.panel_nodes(lo, hi)).collect();
        let values: Vec<Result<Operator>> = nodes.par_iter().map(|&t| plan.eval(t)).collect();
        let values: Vec<Operator> = values.into_iter().collect::<Result<_>>()?;
        scale = values.iter().map(|v| v.max_abs()).fold(scale, f64::max);
        let mut next = Vec::new();
        for (i, &(lo, hi, depth)) in pending.iter().enumerate() {
            let vals = values[i * T_ORDER..(i + 1) * T_ORDER].to_vec();
            let coeffs = rule.coefficients(&vals);
            let tail: f64 = coeffs[T_ORDER - 3..].iter().map(|c| c.max_abs()).sum();
            let center = 0.5 * (lo + hi);
            let guard = depth >= 30 || hi - lo <= 1e-9 * center.abs().max(1.0);
            if tail <= tolerance.abs + tolerance.rel * scale || guard {
                panels.push(TimePanel {
                    lo,
                    hi,
                    nodes: nodes[i * T_ORDER..(i + 1) * T_ORDER].to_vec(),
                    norms: vec![],
                    values: vals,
                    coeffs,
                });
            } else {
                next.push((lo, center, depth + 1));
                next.push((center, hi, depth + 1));
            }
        }
        pending = next;
    }
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    panels.par_iter_mut().for_each(|p| p.norms = p.values.iter().map(|v| v.norm()).collect());

    let sampled_l1: f64 = panels
        .iter()
        .map(|p| p.half_width() * p.norms.iter().zip(rule.weights()).map(|(n, w)| n * w).sum::<f64>())
        .sum();
    let delta = cutoff.generator().delta();
    let exponent = delta - 1.0;
    let envelope = |sign: f64| {
        panels
            .iter()
            .flat_map(|p| p.nodes.iter().zip(&p.norms))
            .filter(|(t, _)| t.signum() == sign && t.abs() <= NEAR_MODEL_DECADE)
            .map(|(t, n)| n / t.abs().powf(exponent))
            .fold(0.0, f64::max)
    };
    let c0_positive = envelope(1.0);
    let c0_negative = envelope(-1.0);
    let contribution = (c0_positive + c0_negative) * NEAR_ZERO.powf(delta) / delta;
    if contribution >= NEAR_ZERO_BUDGET {
        return Err(Error::Grid(format!(
            "near-zero model contributes {contribution:.3e} >= {NEAR_ZERO_BUDGET:.0e} to the L1 norm"
        )));
    }
    let c2 = plan.tail_coefficient();
    let l1_norm = sampled_l1 + contribution + 2.0 * c2 / t_max;
    Ok(GreenFunction {
        plan,
        rule,
        panels,
        t_max,
        n_near,
        tolerance,
        c2,
        sampled_l1,
        near_zero: NearZeroModel { exponent, c0_positive, c0_negative, contribution },
        l1_norm,
    })
}

impl GreenFunction {
    pub fn cutoff(&self) -> &CutoffResolvent {
        self.plan.cutoff()
    }

    pub fn plan(&self) -> &GreenPlan {
        &self.plan
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_near(&self) -> usize {
        self.n_near
    }

    pub fn panels(&self) -> &[TimePanel] {
        &self.panels
    }

    /// `c₂` with `||G(t)|| <= c₂/t²`.
    pub fn tail_coefficient(&self) -> f64 {
        self.c2
    }

    /// Bound on `∫_{|t| > t_max} ||G||`.
    pub fn tail_mass_bound(&self) -> f64 {
        2.0 * self.c2 / self.t_max
    }

    pub fn near_zero(&self) -> NearZeroModel {
        self.near_zero
    }

    /// Certified `∫ ||G||`: grid quadrature + near-zero model + tail bound.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// `(t, G(t))` at every grid node, ascending in `t`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, &Operator)> {
        self.panels.iter().flat_map(|p| p.nodes.iter().copied().zip(p.values.iter()))
    }

    pub fn sample_count(&self) -> usize {
        self.panels.len() * T_ORDER
    }

    /// `G(t)` from the stored expansion (`None` outside the grid).
    pub fn interpolate(&self, t: f64) -> Option<Operator> {
        let idx = self.panels.partition_point(|p| p.hi < t);
        let p = self.panels.get(idx)?;
        if t < p.lo {
            return None;
        }
        let x = ((t - p.center()) / p.half_width()).clamp(-1.0, 1.0);
        Some(self.rule.evaluate(&p.coeffs, x))
    }

    /// `Ĝ(s) = ∫ G(t) e^{-ist} dt` over the grid.
    pub fn transform(&self, s: f64) -> Operator {
        let mut acc = self.panels[0].values[0].zeros_like();
        for p in &self.panels {
            let hw = p.half_width();
            let part = self.rule.filon(&p.coeffs, -s * hw);
            acc.axpy(Complex64::from_polar(hw, -s * p.center()), &part);
        }
        acc
    }

    /// `max ||Ĝ(s) - H(s)||` over the probes.
    pub fn verify_transform(&self, probes: &[f64]) -> Result<f64> {
        let errs: Vec<Result<f64>> = probes
            .par_iter()
            .map(|&s| {
                let mut d = self.transform(s);
                d.axpy(Complex64::new(-1.0, 0.0), &self.cutoff().value(s)?);
                Ok(d.norm())
            })
            .collect();
        errs.into_iter().try_fold(0.0, |m, e| Ok(f64::max(m, e?)))
    }

    /// Gauss nodes `(s, w, G(s))` for `∫ G(s) f(s) ds`, with panels wider than
    /// `max_width` split and resampled from the stored expansion. Panels whose
    /// contribution is below `skip_below` (relative to the largest) are dropped.
    pub fn quadrature_nodes(&self, max_width: f64, skip_below: f64) -> Vec<(f64, f64, Operator)> {
        let peak = self.panels.iter().flat_map(|p| p.norms.iter()).fold(0.0f64, |m, &x| m.max(x));
        let mut out = Vec::new();
        for p in &self.panels {
            let mass = p.norms.iter().fold(0.0f64, |m, &x| m.max(x)) * (p.hi - p.lo);
            if mass <= skip_below * peak {
                continue;
            }
            let width = p.hi - p.lo;
            if width <= max_width {
                for ((&t, v), w) in p.nodes.iter().zip(&p.values).zip(self.rule.weights()) {
                    out.push((t, w * p.half_width(), v.clone()));
                }
                continue;
            }
            let m = (width / max_width).ceil() as usize;
            for i in 0..m {
                let lo = p.lo + width * i as f64 / m as f64;
                let hi = p.lo + width * (i + 1) as f64 / m as f64;
                let hw = 0.5 * (hi - lo);
                for (t, w) in self.rule.panel_nodes(lo, hi).into_iter().zip(self.rule.weights()) {
                    let x = ((t - p.center()) / p.half_width()).clamp(-1.0, 1.0);
                    out.push((t, w * hw, self.rule.evaluate(&p.coeffs, x)));
                }
            }
        }
        out
    }

    pub fn summary(&self) -> GreenSummary {
        let g = self.cutoff().generator();
        GreenSummary {
            t_max: self.t_max,
            n_near: self.n_near,
            grid_tolerance: self.tolerance,
            frequency_cutoff: self.plan.s_max(),
            frequency_panels: self.plan.panel_count(),
            frequency_guard_hits: self.plan.guard_hits(),
            time_panels: self.panels.len(),
            samples: self.sample_count(),
            delta: g.delta(),
            eta: g.eta(),
            tail_coefficient: self.c2,
            sampled_l1: self.sampled_l1,
            tail_mass_bound: self.tail_mass_bound(),
            near_zero: self.near_zero,
            l1_norm: self.l1_norm,
        }
    }
}

/// The three bounds on `||B₊(t)||` for `0 < t <= 1` together with a direct value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProofBounds {
    pub t: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    /// `||∫_b^T R(s) e^{its} ds||` with `T = 10³ b`.
    pub b_plus: f64,
    pub holds: bool,
}

/// `(v₁, v₂, v₃)` by direct substitution.
pub fn proof_bound_values(eta: f64, delta: f64, b: f64, t: f64) -> Result<(f64, f64, f64)> {
    if !(delta > 0.5) || !(delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} outside (1/2, 1)")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("t = {t} outside (0, 1]")));
    }
    let v1 = eta * b.powf(1.0 - delta) / (1.0 - delta) * t.powf(delta - 1.0);
    let v2 = eta * b.powf(-delta) * t.powf(delta - 1.0);
    let v3 = eta * eta * t.powf(2.0 * delta - 2.0) * b.powf(1.0 - 2.0 * delta) / (2.0 * delta - 1.0);
    Ok((v1, v2, v3))
}

/// Bounds `v₁, v₂, v₃` and the direct quadrature of `B₊(t) = ∫_b^{10³b} R(s) e^{its} ds`.
pub fn l1_proof_bounds(cutoff: &CutoffResolvent, t: f64) -> Result<ProofBounds> {
    let g = cutoff.generator();
    let b = cutoff.b();
    let (v1, v2, v3) = proof_bound_values(g.eta(), g.delta(), b, t)?;
    let top = 1e3 * b;
    let mut initial = Vec::new();
    let mut x = b;
    while x < top {
        let next = (x + 1.0).max(x * 1.25).min(top);
        initial.push((x, next));
        x = next;
    }
    let plan = PanelPlan::build(
        LegendreRule::new(S_ORDER),
        &initial,
        1,
        PanelTolerance::default(),
        |s| Ok(vec![g.resolvent(s)?]),
        |v: &Operator| v.max_abs(),
    )?;
    let b_plus = plan.integrate(0, t).map(|v| v.norm()).unwrap_or(0.0);
    Ok(ProofBounds { t, v1, v2, v3, b_plus, holds: b_plus <= v1 + v2 + v3 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::GeneratorSpec;
    use crate::linalg::ComplexMatrix;
    use crate::sets::SpectrumSet;

    fn scalar_cutoff() -> CutoffResolvent {
        let g = GeneratorSpec::matrix(ComplexMatrix::from_real(1, 1, &[-1.0])).unwrap();
        CutoffResolvent::new(g, SpectrumSet::whole_line()).unwrap()
    }

    #[test]
    fn proof_bound_substitution() {
        let (v1, v2, v3) = proof_bound_values(1.0, 0.9, 1.0, 1.0).unwrap();
        assert!((v1 - 10.0).abs() < 1e-12);
        assert!((v2 - 1.0).abs() < 1e-12);
        assert!((v3 - 1.25).abs() < 1e-12);
        assert!(matches!(proof_bound_values(1.0, 0.5, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn near_zero_is_rejected() {
        assert!(matches!(green_at(&scalar_cutoff(), 1e-7), Err(Error::NearZero(_))));
    }

    #[test]
    fn scalar_green_is_one_sided_exponential() {
        let c = scalar_cutoff();
        let plan = GreenPlan::new(&c, 0.1).unwrap();
        for t in [0.1, 0.5, 1.0, 3.0] {
            let g = plan.eval(t).unwrap().entry(0, 0);
            assert!((g - Complex64::new((-t).exp(), 0.0)).norm() < 1e-6, "t = {t}: {g}");
        }
        for t in [-0.5, -2.0] {
            assert!(plan.eval(t).unwrap().entry(0, 0).norm() < 1e-6);
        }
    }

    #[test]
    fn base_grid_is_increasing() {
        let e = base_edges(1000.0, 32);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(e[0], NEAR_ZERO);
        assert_eq!(*e.last().unwrap(), 1000.0);
    }
}
