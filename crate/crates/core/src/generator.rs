//! The generator `A`: a dense matrix or a diagonal resolvent oracle.
//!
//! A [`GeneratorSpec`] caches the spectrum, the imaginary-axis set
//! `K = {Im λ : λ ∈ σ(A), |Re λ| <= 1e-10}`, the radius `a` with `K ⊂ (-a, a)`,
//! and the decay parameters `(theta, delta, eta)` of `R(t) = (it - A)^{-1}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::operator::Operator;

/// Eigenvalues with `|Re λ|` at most this count as imaginary-axis spectrum.
pub const IMAGINARY_AXIS_TOLERANCE: f64 = 1e-10;
/// Minimum distance from `K` at which the resolvent is evaluated.
pub const SPECTRUM_HIT_TOLERANCE: f64 = 1e-8;
/// Fitted exponents at or below `1/2 + DECAY_MARGIN` are rejected.
pub const DECAY_MARGIN: f64 = 1e-3;

const PROBE_POINTS_PER_SIGN: usize = 64;
const PROBE_DECADES: f64 = 3.0;
const ENVELOPE_POINTS_PER_SIGN: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    Matrix(ComplexMatrix),
    /// `A = diag(poles)`, so `R(t) = diag(1/(it - λ_k))`.
    Oracle(Vec<Complex64>),
}

/// Result of a log-log least-squares fit of `||R(t)||` against `|t|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub theta_hat: f64,
    pub delta: f64,
    pub eta_hat: f64,
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    kind: GeneratorKind,
    spectrum: Vec<Complex64>,
    k_set: Vec<f64>,
    a: f64,
    theta: f64,
    delta: f64,
    eta: f64,
    rho: f64,
}

/// `δ = min(θ, 1 - 1e-3)` clamped into `(1/2, 1)`.
pub fn delta_from_theta(theta: f64) -> f64 {
    theta.min(1.0 - DECAY_MARGIN).clamp(0.5 + DECAY_MARGIN, 1.0 - DECAY_MARGIN)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 || hi <= lo {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()).collect()
}

impl GeneratorSpec {
    /// Matrix generator; the decay parameters are fitted on the default probe.
    pub fn matrix(a: ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("generator must be square, got {}x{}", a.rows(), a.cols())));
        }
        if !a.is_finite() {
            return Err(Error::Invalid("generator has non-finite entries".into()));
        }
        if a.rows() > 64 {
            return Err(Error::Invalid(format!("dimension {} exceeds the supported 64", a.rows())));
        }
        let spectrum = linalg::eigenvalues(&a)?;
        let rho = linalg::operator_norm(&a);
        Self::finish(GeneratorKind::Matrix(a), spectrum, rho, None)
    }

    /// Diagonal resolvent oracle with the given poles. A declared `theta`
    /// replaces the fitted exponent.
    pub fn oracle(poles: Vec<Complex64>, theta: Option<f64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::Invalid("oracle needs at least one pole".into()));
        }
        if poles.iter().any(|z| !z.is_finite()) {
            return Err(Error::Invalid("oracle poles must be finite".into()));
        }
        let rho = poles.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Self::finish(GeneratorKind::Oracle(poles.clone()), poles, rho, theta)
    }

    fn finish(kind: GeneratorKind, spectrum: Vec<Complex64>, rho: f64, declared: Option<f64>) -> Result<Self> {
        let mut k_set: Vec<f64> = spectrum
            .iter()
            .filter(|z| z.re.abs() <= IMAGINARY_AXIS_TOLERANCE)
            .map(|z| z.im)
            .collect();
        k_set.sort_by(f64::total_cmp);
        k_set.dedup_by(|x, y| (*x - *y).abs() <= SPECTRUM_HIT_TOLERANCE);
        let a = match k_set.iter().map(|k| k.abs()).reduce(f64::max) {
            Some(m) => (m + 1.0).max(1.0),
            None => 1.0,
        };
        let mut spec = GeneratorSpec { kind, spectrum, k_set, a, theta: 1.0, delta: 0.999, eta: 1.0, rho };
        let probe = spec.default_probe();
        let fit = spec.fit_decay(&probe)?;
        let theta = match declared {
            Some(th) if th <= 0.5 + DECAY_MARGIN || !th.is_finite() => {
                return Err(Error::DecayViolation { theta: th });
            }
            Some(th) => th,
            None => fit.theta_hat,
        };
        spec.theta = theta;
        spec.delta = delta_from_theta(theta);
        spec.eta = spec.envelope_eta(spec.delta, &probe)?;
        Ok(spec)
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            GeneratorKind::Matrix(m) => m.rows(),
            GeneratorKind::Oracle(p) => p.len(),
        }
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self.kind, GeneratorKind::Oracle(_))
    }

    pub fn matrix_ref(&self) -> Option<&ComplexMatrix> {
        match &self.kind {
            GeneratorKind::Matrix(m) => Some(m),
            GeneratorKind::Oracle(_) => None,
        }
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn k_set(&self) -> &[f64] {
        &self.k_set
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Radius beyond which the Neumann series bound `||R(s)|| <= 1/(|s| - rho)` holds.
    pub fn neumann_radius(&self) -> f64 {
        self.rho
    }

    /// `(K, a)`.
    pub fn imaginary_spectrum(&self) -> (Vec<f64>, f64) {
        (self.k_set.clone(), self.a)
    }

    pub fn distance_to_k(&self, t: f64) -> f64 {
        self.k_set.iter().map(|k| (k - t).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Distance from `iλ` to the spectrum of `A`.
    pub fn resonance_distance(&self, lambda: f64) -> f64 {
        let il = Complex64::new(0.0, lambda);
        self.spectrum.iter().map(|z| (z - il).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `R(t) = (itI - A)^{-1}`.
    pub fn resolvent(&self, t: f64) -> Result<Operator> {
        let d = self.distance_to_k(t);
        if d < SPECTRUM_HIT_TOLERANCE {
            return Err(Error::SpectrumHit { t, distance: d });
        }
        let it = Complex64::new(0.0, t);
        match &self.kind {
            GeneratorKind::Matrix(a) => {
                let n = a.rows();
                let m = ComplexMatrix::from_fn(n, n, |i, j| if i == j { it - a[(i, j)] } else { -a[(i, j)] });
                Ok(Operator::Dense(linalg::inverse(&m)?))
            }
            GeneratorKind::Oracle(poles) => Ok(Operator::Diagonal(poles.iter().map(|l| (it - l).inv()).collect())),
        }
    }

    /// `R^{(k)}(t) = k! (-i)^k R(t)^{k+1}` for `k = 0..=kmax`.
    pub fn resolvent_derivatives(&self, t: f64, kmax: usize) -> Result<Vec<Operator>> {
        let r = self.resolvent(t)?;
        let mut out = Vec::with_capacity(kmax + 1);
        let mut power = r.clone();
        let mut coeff = Complex64::new(1.0, 0.0);
        out.push(r.clone());
        for k in 1..=kmax {
            power = power.matmul(&r);
            coeff *= Complex64::new(0.0, -(k as f64));
            out.push(power.scale(coeff));
        }
        Ok(out)
    }

    pub fn resolvent_derivative(&self, t: f64, k: usize) -> Result<Operator> {
        if k > 2 {
            return Err(Error::Invalid(format!("derivative order {k} not in 0..=2")));
        }
        Ok(self.resolvent_derivatives(t, k)?.pop().expect("nonempty"))
    }

    /// `eta_k |t|^{-(k+1) delta}` with `eta_k = k! eta^{k+1}`.
    pub fn derivative_bound(&self, t: f64, k: usize) -> Result<f64> {
        if t.abs() < self.a {
            return Err(Error::Domain(format!("|t| = {} below a = {}", t.abs(), self.a)));
        }
        Ok(derivative_bound_value(self.eta, self.delta, t, k))
    }

    /// Neumann bound `k! / (|s| - rho)^{k+1}` on `||R^{(k)}(s)||`, infinite inside the radius.
    pub fn neumann_bound(&self, s: f64, k: usize) -> f64 {
        let gap = s.abs() - self.rho;
        if gap <= 0.0 {
            return f64::INFINITY;
        }
        factorial(k) / gap.powi(k as i32 + 1)
    }

    /// The default probe: 64 log-spaced points per sign on `[a, 10^3 a]`.
    ///
    /// For oracles each sign is capped at the pole band `max |Im λ|` of that
    /// sign (a finite family always decays like `1/|t|` beyond its poles); a
    /// sign whose band spans less than two decades is dropped.
    pub fn default_probe(&self) -> Vec<f64> {
        let a = self.a;
        let full_hi = a * 10f64.powf(PROBE_DECADES);
        let mut signs: Vec<(f64, f64)> = vec![(1.0, full_hi), (-1.0, full_hi)];
        if let GeneratorKind::Oracle(poles) = &self.kind {
            let band = |sign: f64| poles.iter().map(|p| p.im * sign).fold(0.0, f64::max);
            let capped: Vec<(f64, f64)> = [1.0, -1.0]
                .into_iter()
                .map(|s| (s, band(s).min(full_hi)))
                .filter(|&(_, hi)| hi >= 100.0 * a)
                .collect();
            if !capped.is_empty() {
                signs = capped;
            }
        }
        let mut probe = Vec::with_capacity(2 * PROBE_POINTS_PER_SIGN);
        for (sign, hi) in signs {
            probe.extend(log_grid(a, hi, PROBE_POINTS_PER_SIGN).into_iter().map(|t| sign * t));
        }
        probe
    }

    /// Least-squares slope of `log ||R(t)||` against `log |t|`.
    pub fn fit_decay(&self, probe: &[f64]) -> Result<DecayFit> {
        if probe.len() < 16 {
            return Err(Error::Domain(format!("probe has {} points, need at least 16", probe.len())));
        }
        if let Some(t) = probe.iter().find(|t| t.abs() < self.a) {
            return Err(Error::Domain(format!("probe point {t} lies inside (-a, a), a = {}", self.a)));
        }
        let (lo, hi) = probe.iter().fold((f64::INFINITY, 0.0f64), |(l, h), t| (l.min(t.abs()), h.max(t.abs())));
        if hi < 100.0 * lo * (1.0 - 1e-12) {
            return Err(Error::Domain(format!("probe spans [{lo}, {hi}], need two decades")));
        }
        let mut pts = Vec::with_capacity(probe.len());
        for &t in probe {
            let n = self.resolvent(t)?.norm();
            pts.push((t.abs().ln(), n.ln(), t.abs(), n));
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let theta_hat = -sxy / sxx;
        if !theta_hat.is_finite() || theta_hat <= 0.5 + DECAY_MARGIN {
            return Err(Error::DecayViolation { theta: theta_hat });
        }
        let delta = delta_from_theta(theta_hat);
        let eta_hat = pts.iter().map(|p| p.2.powf(delta) * p.3).fold(0.0, f64::max);
        Ok(DecayFit { theta_hat, delta, eta_hat })
    }

    /// `sup |t|^delta ||R(t)||` over the probe, a wider log grid reaching the
    /// Neumann regime, and the imaginary parts of the poles.
    fn envelope_eta(&self, delta: f64, probe: &[f64]) -> Result<f64> {
        let a = self.a;
        let hi = (a * 10f64.powf(PROBE_DECADES)).max(10.0 * (self.rho + a));
        let mut pts: Vec<f64> = probe.to_vec();
        for t in log_grid(a, hi, ENVELOPE_POINTS_PER_SIGN) {
            pts.push(t);
            pts.push(-t);
        }
        pts.extend(self.spectrum.iter().map(|z| z.im).filter(|t| t.abs() >= a));
        let mut eta: f64 = 0.0;
        for t in pts {
            if self.distance_to_k(t) < SPECTRUM_HIT_TOLERANCE {
                continue;
            }
            eta = eta.max(t.abs().powf(delta) * self.resolvent(t)?.norm());
        }
        Ok(eta)
    }

    /// `A x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.kind {
            GeneratorKind::Matrix(m) => m.mul_vec(&ComplexVector::new(x.to_vec())).into_entries(),
            GeneratorKind::Oracle(p) => p.iter().zip(x).map(|(l, v)| l * v).collect(),
        }
    }

    /// `T(t) = e^{tA}`; unavailable for oracle generators.
    pub fn semigroup(&self, t: f64) -> Result<ComplexMatrix> {
        match &self.kind {
            GeneratorKind::Matrix(m) => linalg::matrix_exponential(m, t),
            GeneratorKind::Oracle(_) => Err(Error::OracleUnavailable),
        }
    }

    pub fn descriptor(&self) -> GeneratorDescriptor {
        match &self.kind {
            GeneratorKind::Matrix(m) => GeneratorDescriptor {
                kind: DescriptorKind::Matrix,
                matrix: Some(m.clone()),
                poles: None,
                theta: None,
            },
            GeneratorKind::Oracle(p) => GeneratorDescriptor {
                kind: DescriptorKind::Oracle,
                matrix: None,
                poles: Some(p.iter().map(|z| Pole { re: z.re, im: z.im }).collect()),
                theta: Some(self.theta),
            },
        }
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// `k! eta^{k+1} |t|^{-(k+1) delta}`.
pub fn derivative_bound_value(eta: f64, delta: f64, t: f64, k: usize) -> f64 {
    factorial(k) * eta.powi(k as i32 + 1) * t.abs().powf(-((k + 1) as f64) * delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptorKind {
    Matrix,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub re: f64,
    pub im: f64,
}

/// JSON form: `{"kind": "matrix"|"oracle", "matrix": {...}, "poles": [{"re", "im"}], "theta": optional}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDescriptor {
    pub kind: DescriptorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<Vec<Pole>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl GeneratorDescriptor {
    pub fn build(&self) -> Result<GeneratorSpec> {
        match self.kind {
            DescriptorKind::Matrix => {
                let m = self.matrix.clone().ok_or_else(|| Error::Invalid("matrix generator needs \"matrix\"".into()))?;
                GeneratorSpec::matrix(m)
            }
            DescriptorKind::Oracle => {
                let poles = self.poles.as_ref().ok_or_else(|| Error::Invalid("oracle generator needs \"poles\"".into()))?;
                GeneratorSpec::oracle(poles.iter().map(|p| Complex64::new(p.re, p.im)).collect(), self.theta)
            }
        }
    }
}

/// Poles `-k^p + ik`, `k = 1..=n`: a diagonal family whose resolvent decays like `|t|^{-p}` on its band.
pub fn power_law_poles(n: usize, p: f64) -> Vec<Complex64> {
    (1..=n).map(|k| Complex64::new(-(k as f64).powf(p), k as f64)).collect()
}
