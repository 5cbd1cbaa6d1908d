//! Plateau bumps and the cutoff resolvent `H = (1 - χ) R`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::operator::{LinearValue, Operator};
use crate::sets::{Interval, SpectrumSet};
use num_complex::Complex64;

/// Smallest admissible distance between `K` and `F`.
pub const MIN_SEPARATION: f64 = 1e-6;

// exp(-1/x) underflows past this
const RAMP_CUTOFF: f64 = 700.0;

/// `f(x) = exp(-1/x)` and its first two derivatives, zero for `x <= 0`.
fn seed(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0; 3];
    }
    let inv = 1.0 / x;
    if inv > RAMP_CUTOFF {
        return [0.0; 3];
    }
    let f = (-inv).exp();
    let inv2 = inv * inv;
    [f, f * inv2, f * (inv2 * inv2 - 2.0 * inv2 * inv)]
}

/// Smooth step `r(x) = f(x) / (f(x) + f(1 - x))` with `r' ` and `r''`.
pub fn ramp(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let [g, g1, g2] = seed(x);
    let [h, hd1, hd2] = seed(1.0 - x);
    // derivatives of h(x) = f(1 - x)
    let h1 = -hd1;
    let h2 = hd2;
    let d = g + h;
    let d1 = g1 + h1;
    let n = g1 * h - g * h1;
    let n1 = g2 * h - g * h2;
    [g / d, n / (d * d), (n1 * d - 2.0 * n * d1) / (d * d * d)]
}

/// One connected component: plateau `[lo - m/2, hi + m/2]`, support `(lo - 2m, hi + 2m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpPiece {
    pub cover_lo: f64,
    pub cover_hi: f64,
}

/// Smooth `χ` equal to 1 near a compact cover and 0 away from it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauBump {
    pieces: Vec<BumpPiece>,
    margin: f64,
}

impl PlateauBump {
    /// `χ ≡ 0`.
    pub fn zero() -> Self {
        PlateauBump { pieces: vec![], margin: 0.0 }
    }

    pub fn pieces(&self) -> &[BumpPiece] {
        &self.pieces
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Distance from the cover within which `χ = 1`.
    pub fn r_inner(&self) -> f64 {
        0.5 * self.margin
    }

    /// Distance from the cover beyond which `χ = 0`.
    pub fn r_outer(&self) -> f64 {
        2.0 * self.margin
    }

    fn ramp_width(&self) -> f64 {
        self.r_outer() - self.r_inner()
    }

    /// Closed support intervals `[lo - 2m, hi + 2m]`.
    pub fn support(&self) -> Vec<Interval> {
        self.pieces
            .iter()
            .map(|p| Interval { lo: p.cover_lo - self.r_outer(), hi: p.cover_hi + self.r_outer() })
            .collect()
    }

    pub fn plateaus(&self) -> Vec<Interval> {
        self.pieces
            .iter()
            .map(|p| Interval { lo: p.cover_lo - self.r_inner(), hi: p.cover_hi + self.r_inner() })
            .collect()
    }

    /// Ends of every ramp, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(4 * self.pieces.len());
        for (s, p) in self.support().iter().zip(self.plateaus()) {
            v.extend([s.lo, p.lo, p.hi, s.hi]);
        }
        v
    }

    /// True if `s` lies in the closed plateau, where `χ = 1` and all derivatives vanish.
    pub fn in_plateau(&self, s: f64) -> bool {
        self.plateaus().iter().any(|p| p.contains(s))
    }

    /// `[χ, χ', χ'']` at `s`.
    pub fn eval(&self, s: f64) -> [f64; 3] {
        let w = self.ramp_width();
        for p in &self.pieces {
            let left = p.cover_lo - self.r_outer();
            let right = p.cover_hi + self.r_outer();
            if s <= left || s >= right {
                continue;
            }
            let [u0, u1, u2] = ramp((s - left) / w);
            let [v0, v1, v2] = ramp((right - s) / w);
            let winv = 1.0 / w;
            return [
                u0 * v0,
                (u1 * v0 - u0 * v1) * winv,
                (u2 * v0 - 2.0 * u1 * v1 + u0 * v2) * winv * winv,
            ];
        }
        [0.0; 3]
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s)[0]
    }

    /// `χ^{(k)}(s)` for `k <= 2`.
    pub fn derivative(&self, s: f64, k: usize) -> f64 {
        assert!(k <= 2, "bump derivative order {k} > 2");
        self.eval(s)[k]
    }
}

/// Builds `χ` with plateau on `cover` fattened by `margin/2` and support inside
/// `cover` fattened by `2 margin`; requires `dist(cover, F) > 2 margin`.
pub fn make_bump(cover: &[Interval], f: &SpectrumSet, margin: f64) -> Result<PlateauBump> {
    if cover.is_empty() {
        return Ok(PlateauBump::zero());
    }
    if !(margin > 0.0) || !margin.is_finite() {
        return Err(Error::Invalid(format!("bump margin must be positive, got {margin}")));
    }
    if cover.iter().any(|c| !c.is_bounded()) {
        return Err(Error::Invalid("bump cover must be compact".into()));
    }
    let d = f.distance_to_intervals(cover);
    if d <= 2.0 * margin {
        return Err(Error::Separation(format!("dist(cover, F) = {d} is not above 2 * margin = {}", 2.0 * margin)));
    }
    let mut sorted: Vec<Interval> = cover.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut pieces: Vec<BumpPiece> = Vec::new();
    for c in sorted {
        match pieces.last_mut() {
            // supports of pieces closer than 4m would overlap
            Some(p) if c.lo - p.cover_hi <= 4.0 * margin => p.cover_hi = p.cover_hi.max(c.hi),
            _ => pieces.push(BumpPiece { cover_lo: c.lo, cover_hi: c.hi }),
        }
    }
    Ok(PlateauBump { pieces, margin })
}

/// `H = (1 - χ) R` with `χ = 1` near `K` and `supp χ ∩ F = ∅`.
#[derive(Clone, Debug)]
pub struct CutoffResolvent {
    generator: GeneratorSpec,
    bump: PlateauBump,
    f_set: SpectrumSet,
    m_set: Vec<Interval>,
    b: f64,
    separation: f64,
}

/// Parameters echoed into run manifests.
#[derive(Clone, Debug, Serialize)]
pub struct CutoffSummary {
    pub k_set: Vec<f64>,
    pub a: f64,
    pub separation: f64,
    pub margin: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    pub m_set: Vec<Interval>,
    pub b: f64,
}

impl CutoffResolvent {
    /// Cutoff for the closed set `F`, using `margin = min(d, 4)/4` with `d = dist(K, F)`.
    pub fn new(generator: GeneratorSpec, f: SpectrumSet) -> Result<Self> {
        let (k, a) = generator.imaginary_spectrum();
        if k.is_empty() {
            return Ok(CutoffResolvent {
                generator,
                bump: PlateauBump::zero(),
                f_set: f,
                m_set: vec![],
                b: a + 1.0,
                separation: f64::INFINITY,
            });
        }
        let ks = SpectrumSet::from_points(k.clone());
        let d = ks.distance_to_set(&f);
        if d <= MIN_SEPARATION {
            return Err(Error::Separation(format!("dist(K, F) = {d:.3e} <= {MIN_SEPARATION:.0e}")));
        }
        let margin = d.min(4.0) / 4.0;
        let cover: Vec<Interval> = k.iter().map(|&x| Interval::point(x)).collect();
        let bump = make_bump(&cover, &f, margin)?;
        let m_set = bump.support();
        let sup_m = m_set.iter().map(|i| i.lo.abs().max(i.hi.abs())).fold(0.0, f64::max);
        let b = a.max(sup_m) + 1.0;
        Ok(CutoffResolvent { generator, bump, f_set: f, m_set, b, separation: d })
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.generator
    }

    pub fn bump(&self) -> &PlateauBump {
        &self.bump
    }

    pub fn f_set(&self) -> &SpectrumSet {
        &self.f_set
    }

    /// `M = supp χ` as closed intervals.
    pub fn m_set(&self) -> &[Interval] {
        &self.m_set
    }

    /// `H = R` outside `(-b, b)`.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn summary(&self) -> CutoffSummary {
        CutoffSummary {
            k_set: self.generator.k_set().to_vec(),
            a: self.generator.a(),
            separation: self.separation,
            margin: self.bump.margin(),
            r_inner: self.bump.r_inner(),
            r_outer: self.bump.r_outer(),
            m_set: self.m_set.clone(),
            b: self.b,
        }
    }

    fn zero(&self) -> Operator {
        let n = self.generator.dim();
        if self.generator.is_oracle() {
            Operator::Diagonal(vec![Complex64::new(0.0, 0.0); n])
        } else {
            Operator::Dense(crate::linalg::ComplexMatrix::zeros(n, n))
        }
    }

    /// `[H, H', ..., H^{(kmax)}]` at `s`, `kmax <= 2`.
    pub fn derivatives(&self, s: f64, kmax: usize) -> Result<Vec<Operator>> {
        assert!(kmax <= 2, "H derivative order {kmax} > 2");
        if self.bump.in_plateau(s) {
            return Ok(vec![self.zero(); kmax + 1]);
        }
        let r = self.generator.resolvent_derivatives(s, kmax)?;
        let [c0, c1, c2] = self.bump.eval(s);
        if c0 == 0.0 && c1 == 0.0 && c2 == 0.0 {
            return Ok(r);
        }
        let one_minus = Complex64::new(1.0 - c0, 0.0);
        let mut out = Vec::with_capacity(kmax + 1);
        out.push(r[0].scale(one_minus));
        if kmax >= 1 {
            let mut h1 = r[1].scale(one_minus);
            h1.axpy(Complex64::new(-c1, 0.0), &r[0]);
            out.push(h1);
        }
        if kmax >= 2 {
            let mut h2 = r[2].scale(one_minus);
            h2.axpy(Complex64::new(-2.0 * c1, 0.0), &r[1]);
            h2.axpy(Complex64::new(-c2, 0.0), &r[0]);
            out.push(h2);
        }
        Ok(out)
    }

    /// `H^{(k)}(s)`.
    pub fn derivative(&self, s: f64, k: usize) -> Result<Operator> {
        Ok(self.derivatives(s, k)?.pop().expect("nonempty"))
    }

    pub fn value(&self, s: f64) -> Result<Operator> {
        self.derivative(s, 0)
    }
}
