//! Gauss–Legendre rules and a Filon-type rule for `∫ f(s) e^{its} ds`.
//!
//! On each panel `f` is expanded in Legendre polynomials from its values at
//! Gauss nodes; the oscillatory moments of the Legendre polynomials are exact,
//! `∫_{-1}^{1} P_j(x) e^{iκx} dx = 2 i^j j_j(κ)`, so the rule does not need to
//! resolve the oscillation and one panel layout serves every `t`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::LinearValue;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(p >= 1);
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    for i in 0..p {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (pn, dpn) = legendre_with_derivative(p, x);
            dp = dpn;
            let dx = pn / dpn;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dpn) = legendre_with_derivative(p, x);
        if dpn.is_finite() {
            dp = dpn;
        }
        nodes[p - 1 - i] = x;
        weights[p - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `P_0(x), ..., P_{n-1}(x)`.
pub fn legendre_values(n: usize, x: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    if n == 0 {
        return v;
    }
    v.push(1.0);
    if n > 1 {
        v.push(x);
    }
    for j in 1..n.saturating_sub(1) {
        let next = ((2 * j + 1) as f64 * x * v[j] - j as f64 * v[j - 1]) / (j + 1) as f64;
        v.push(next);
    }
    v
}

/// Spherical Bessel functions `j_0(x), ..., j_nmax(x)`.
pub fn spherical_bessel(nmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    let mut j = vec![0.0; nmax + 1];
    if ax == 0.0 {
        j[0] = 1.0;
        return j;
    }
    if ax < 1e-3 {
        let x2 = ax * ax;
        let mut pref = 1.0;
        for (n, out) in j.iter_mut().enumerate() {
            if n > 0 {
                pref *= ax / (2 * n + 1) as f64;
            }
            let a = (2 * n + 3) as f64;
            let b = (2 * n + 5) as f64;
            *out = pref * (1.0 - x2 / (2.0 * a) + x2 * x2 / (8.0 * a * b));
        }
    } else if ax > nmax as f64 {
        // upward recurrence is stable for n < x
        let (s, c) = ax.sin_cos();
        j[0] = s / ax;
        if nmax >= 1 {
            j[1] = s / (ax * ax) - c / ax;
        }
        for n in 1..nmax {
            j[n + 1] = (2 * n + 1) as f64 / ax * j[n] - j[n - 1];
        }
    } else {
        // Miller backward recurrence, normalized by j_0 or j_1
        let start = 2 * nmax + 32;
        let mut next = 0.0;
        let mut cur = 1e-30;
        for n in (1..=start).rev() {
            let prev = (2 * n + 1) as f64 / ax * cur - next;
            next = cur;
            cur = prev;
            if n - 1 <= nmax {
                j[n - 1] = cur;
            }
            if n <= nmax {
                j[n] = next;
            }
            if cur.abs() > 1e250 {
                cur *= 1e-250;
                next *= 1e-250;
                for v in j.iter_mut() {
                    *v *= 1e-250;
                }
            }
        }
        let (s, c) = ax.sin_cos();
        let j0 = s / ax;
        let j1 = s / (ax * ax) - c / ax;
        let scale = if j0.abs() >= j1.abs() || nmax == 0 { j0 / j[0] } else { j1 / j[1] };
        for v in j.iter_mut() {
            *v *= scale;
        }
    }
    if x < 0.0 {
        for (n, v) in j.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    j
}

/// `∫_{-1}^{1} P_j(x) e^{iκx} dx` for `j < p`.
pub fn filon_moments(p: usize, kappa: f64) -> Vec<Complex64> {
    let j = spherical_bessel(p - 1, kappa);
    let mut ipow = Complex64::new(2.0, 0.0);
    let mut out = Vec::with_capacity(p);
    for v in j {
        out.push(ipow * v);
        ipow *= Complex64::new(0.0, 1.0);
    }
    out
}

/// Gauss–Legendre rule with the node-to-Legendre-coefficient projection.
#[derive(Clone, Debug)]
pub struct LegendreRule {
    p: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // proj[j * p + m] = (2j + 1)/2 * w_m * P_j(x_m)
    proj: Vec<f64>,
}

impl LegendreRule {
    pub fn new(p: usize) -> Self {
        let (nodes, weights) = gauss_legendre(p);
        let mut proj = vec![0.0; p * p];
        for m in 0..p {
            let pv = legendre_values(p, nodes[m]);
            for j in 0..p {
                proj[j * p + m] = (2 * j + 1) as f64 * 0.5 * weights[m] * pv[j];
            }
        }
        LegendreRule { p, nodes, weights, proj }
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes mapped to `[lo, hi]`.
    pub fn panel_nodes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        self.nodes.iter().map(|x| c + h * x).collect()
    }

    /// Legendre coefficients of the interpolant through node values.
    pub fn coefficients<V: LinearValue>(&self, values: &[V]) -> Vec<V> {
        assert_eq!(values.len(), self.p);
        (0..self.p)
            .map(|j| {
                let mut acc = values[0].zeros_like();
                for (m, v) in values.iter().enumerate() {
                    acc.axpy(Complex64::new(self.proj[j * self.p + m], 0.0), v);
                }
                acc
            })
            .collect()
    }

    /// Evaluates a Legendre series at `x ∈ [-1, 1]`.
    pub fn evaluate<V: LinearValue>(&self, coeffs: &[V], x: f64) -> V {
        let pv = legendre_values(coeffs.len(), x);
        let mut acc = coeffs[0].zeros_like();
        for (c, p) in coeffs.iter().zip(pv) {
            acc.axpy(Complex64::new(p, 0.0), c);
        }
        acc
    }

    /// `∫_{-1}^{1} (Σ c_j P_j(x)) e^{iκx} dx`.
    pub fn filon<V: LinearValue>(&self, coeffs: &[V], kappa: f64) -> V {
        let w = filon_moments(coeffs.len(), kappa);
        let mut acc = coeffs[0].zeros_like();
        for (c, wj) in coeffs.iter().zip(w) {
            acc.axpy(wj, c);
        }
        acc
    }
}

/// Refinement controls for [`PanelPlan::build`].
#[derive(Clone, Copy, Debug)]
pub struct PanelTolerance {
    /// Absolute bound on the trailing Legendre coefficients.
    pub abs: f64,
    /// Bound relative to the largest sampled magnitude of the component.
    pub rel: f64,
    /// Panels narrower than `min_width * max(1, |center|)` are not split.
    pub min_width: f64,
    pub max_depth: usize,
}

impl Default for PanelTolerance {
    fn default() -> Self {
        PanelTolerance { abs: 1e-12, rel: 1e-10, min_width: 1e-10, max_depth: 60 }
    }
}

#[derive(Clone, Debug)]
pub struct Panel<V> {
    pub lo: f64,
    pub hi: f64,
    /// `coeffs[component][j]`, empty when the panel is identically zero.
    pub coeffs: Vec<Vec<V>>,
    /// Gauss approximation of `∫_panel ||f_c||` per component.
    pub norm_integrals: Vec<f64>,
}

impl<V> Panel<V> {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.hi + self.lo)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Adaptive panel layout with Legendre expansions of several related functions.
#[derive(Clone, Debug)]
pub struct PanelPlan<V> {
    rule: LegendreRule,
    panels: Vec<Panel<V>>,
    components: usize,
    guard_hits: usize,
}

/// Sampler result at one node: one value per component.
pub type Sample<V> = Vec<V>;

impl<V: LinearValue> PanelPlan<V> {
    /// Refines `initial` panels until the trailing Legendre coefficients of every
    /// component are below tolerance. `f(s)` returns the component values at `s`,
    /// `norm` the norm used for `∫||f||`.
    pub fn build<F, N>(
        rule: LegendreRule,
        initial: &[(f64, f64)],
        components: usize,
        tol: PanelTolerance,
        f: F,
        norm: N,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Result<Sample<V>> + Sync,
        N: Fn(&V) -> f64 + Sync,
    {
        let p = rule.order();
        let tail_terms = 3.min(p);
        let mut pending: Vec<(f64, f64, usize)> = initial.iter().map(|&(a, b)| (a, b, 0)).collect();
        if pending.iter().any(|(a, b, _)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::Invalid("quadrature panels must be finite and nonempty".into()));
        }
        let mut scale = vec![0.0f64; components];
        let mut accepted: Vec<Panel<V>> = Vec::new();
        let mut guard_hits = 0;
        while !pending.is_empty() {
            let evaluated: Vec<Result<(Vec<Vec<V>>, Vec<f64>, Vec<f64>)>> = pending
                .par_iter()
                .map(|&(lo, hi, _)| {
                    let hw = 0.5 * (hi - lo);
                    let mut per_comp: Vec<Vec<V>> = (0..components).map(|_| Vec::with_capacity(p)).collect();
                    let mut norms = vec![0.0; components];
                    let mut peak = vec![0.0f64; components];
                    for (m, s) in rule.panel_nodes(lo, hi).into_iter().enumerate() {
                        let vals = f(s)?;
                        if vals.len() != components {
                            return Err(Error::Invalid("sampler returned wrong component count".into()));
                        }
                        for (c, v) in vals.into_iter().enumerate() {
                            let nv = norm(&v);
                            norms[c] += hw * rule.weights()[m] * nv;
                            peak[c] = peak[c].max(v.magnitude());
                            per_comp[c].push(v);
                        }
                    }
                    let coeffs: Vec<Vec<V>> = per_comp.iter().map(|vals| rule.coefficients(vals)).collect();
                    Ok((coeffs, norms, peak))
                })
                .collect();
            let mut results = Vec::with_capacity(evaluated.len());
            for r in evaluated {
                let r = r?;
                for (s, pk) in scale.iter_mut().zip(&r.2) {
                    *s = s.max(*pk);
                }
                results.push(r);
            }
            let mut next = Vec::new();
            for (&(lo, hi, depth), (coeffs, norms, peak)) in pending.iter().zip(results) {
                let converged = coeffs.iter().enumerate().all(|(c, cs)| {
                    let tail: f64 = cs[p - tail_terms..].iter().map(|v| v.magnitude()).sum();
                    tail <= tol.abs + tol.rel * scale[c]
                });
                let width = hi - lo;
                let center = 0.5 * (hi + lo);
                let guard = depth >= tol.max_depth || width <= tol.min_width * center.abs().max(1.0);
                if converged || guard {
                    if !converged {
                        guard_hits += 1;
                    }
                    let zero = peak.iter().all(|&x| x == 0.0);
                    accepted.push(Panel {
                        lo,
                        hi,
                        coeffs: if zero { vec![] } else { coeffs },
                        norm_integrals: norms,
                    });
                } else {
                    next.push((lo, center, depth + 1));
                    next.push((center, hi, depth + 1));
                }
            }
            pending = next;
        }
        accepted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Ok(PanelPlan { rule, panels: accepted, components, guard_hits })
    }

    pub fn panels(&self) -> &[Panel<V>] {
        &self.panels
    }

    pub fn rule(&self) -> &LegendreRule {
        &self.rule
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Panels accepted only because of the width or depth guard.
    pub fn guard_hits(&self) -> usize {
        self.guard_hits
    }

    /// `∫ f_c(s) e^{its} ds` over the whole layout.
    pub fn integrate(&self, component: usize, t: f64) -> Option<V> {
        let mut acc: Option<V> = None;
        for p in self.panels.iter().filter(|p| !p.is_zero()) {
            let hw = p.half_width();
            let phase = Complex64::from_polar(hw, t * p.center());
            let part = self.rule.filon(&p.coeffs[component], t * hw);
            match acc.as_mut() {
                Some(a) => a.axpy(phase, &part),
                None => {
                    let mut z = part.zeros_like();
                    z.axpy(phase, &part);
                    acc = Some(z);
                }
            }
        }
        acc
    }

    /// `∫ ||f_c(s)|| ds`.
    pub fn norm_integral(&self, component: usize) -> f64 {
        self.panels.iter().map(|p| p.norm_integrals[component]).sum()
    }

    /// Value of component `c` at `s` from the stored expansion.
    pub fn evaluate(&self, component: usize, s: f64) -> Option<V> {
        let idx = self.panels.partition_point(|p| p.hi < s);
        let p = self.panels.get(idx)?;
        if s < p.lo || p.is_zero() {
            return None;
        }
        let x = ((s - p.center()) / p.half_width()).clamp(-1.0, 1.0);
        Some(self.rule.evaluate(&p.coeffs[component], x))
    }
}
