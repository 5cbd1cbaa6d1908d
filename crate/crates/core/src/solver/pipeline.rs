//! End-to-end solves: cutoff, Green function, convolution or exact trig
//! solution, residual and spectrum checks, and almost-periodicity transfer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff::{CutoffResolvent, CutoffSummary};
use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::green::{build_green_with, GreenFunction, GreenSummary, GridTolerance};
use crate::harmonic::{
    ap_detector, mean_operator, periodogram, spectrum_estimate, trig_spectrum, ApEvidence, SampledFunction, TrigPolynomial,
    MIN_SAMPLES,
};
use crate::sets::SpectrumSet;
use crate::solver::{convolve_green, mild_residual_integral, mild_residual_voc, resample_onto, solve_trig, ConvolutionMetadata};

/// Input frequencies closer than this to `K` violate non-resonance.
pub const NON_RESONANCE_GAP: f64 = 1e-3;

/// Shifts used for the uniform-continuity probe.
pub const MODULUS_SHIFTS: [f64; 2] = [1e-2, 1e-1];

#[derive(Clone, Debug)]
pub enum PipelineInput {
    Trig(TrigPolynomial),
    Sampled(SampledFunction),
}

impl PipelineInput {
    pub fn dim(&self) -> usize {
        match self {
            PipelineInput::Trig(p) => p.dim(),
            PipelineInput::Sampled(f) => f.dim(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub t_max: f64,
    pub n_near: usize,
    /// Output window `[t_lo, t_hi]`; must contain 0 for the integrated residual.
    pub t_lo: f64,
    pub t_hi: f64,
    /// Output step for trig inputs (sampled inputs keep their own grid).
    pub step: f64,
    /// Threshold of the spectrum surrogate for sampled inputs.
    pub spectrum_threshold: f64,
    /// Also build `G` and convolve for trig inputs.
    pub cross_check: bool,
    pub probe_length: f64,
    pub grid_tolerance: GridTolerance,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            t_max: 200.0,
            n_near: 64,
            t_lo: -10.0,
            t_hi: 10.0,
            step: 0.01,
            spectrum_threshold: 0.05,
            cross_check: false,
            probe_length: 2.0,
            grid_tolerance: GridTolerance::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    /// Frequency sets of trigonometric polynomials.
    Exact,
    /// Thresholded periodograms, compared within one bin.
    Surrogate,
    /// Too few output samples for a periodogram.
    Unavailable,
}

#[derive(Clone, Debug, Serialize)]
pub struct MildSolutionReport {
    #[serde(skip)]
    pub solution: SampledFunction,
    /// Exact solution for trig inputs.
    #[serde(skip)]
    pub trig_solution: Option<TrigPolynomial>,
    pub window: [f64; 2],
    pub step: f64,
    pub k_set: Vec<f64>,
    pub a: f64,
    pub input_spectrum: SpectrumSet,
    pub solution_spectrum: Option<SpectrumSet>,
    pub residual_variation_of_constants: Option<f64>,
    pub residual_integral_form: f64,
    pub sup_norm: f64,
    pub modulus_of_continuity: Vec<(f64, f64)>,
    pub spectrum_check: bool,
    pub spectrum_method: SpectrumMethod,
    pub cutoff: CutoffSummary,
    pub green: Option<GreenSummary>,
    pub convolution: Option<ConvolutionMetadata>,
    /// `max ‖u_conv - u_trig‖` on the window, when both were computed.
    pub convolution_vs_trig: Option<f64>,
}

/// Solves `u' = Au + φ` for bounded `φ` with spectrum in `F`.
pub fn mild_solution_pipeline(g: &GeneratorSpec, input: &PipelineInput, f: &SpectrumSet, opts: &PipelineOptions) -> Result<MildSolutionReport> {
    run(g, input, f, opts).map(|r| r.report)
}

/// [`mild_solution_pipeline`] that also hands back `G` when one was built.
pub fn mild_solution_with_green(
    g: &GeneratorSpec,
    input: &PipelineInput,
    f: &SpectrumSet,
    opts: &PipelineOptions,
) -> Result<(MildSolutionReport, Option<GreenFunction>)> {
    run(g, input, f, opts).map(|r| (r.report, r.green))
}

struct Run {
    report: MildSolutionReport,
    green: Option<GreenFunction>,
}

fn run(g: &GeneratorSpec, input: &PipelineInput, f: &SpectrumSet, opts: &PipelineOptions) -> Result<Run> {
    if g.dim() != input.dim() {
        return Err(Error::DimensionMismatch(format!("generator of dimension {}, input of dimension {}", g.dim(), input.dim())));
    }
    if !(opts.t_lo <= 0.0 && 0.0 <= opts.t_hi) || !(opts.step > 0.0) {
        return Err(Error::Invalid(format!("window [{}, {}] must contain 0 and step must be positive", opts.t_lo, opts.t_hi)));
    }
    let (k_set, a) = g.imaginary_spectrum();

    let (input_spectrum, tolerance) = match input {
        PipelineInput::Trig(p) => (trig_spectrum(p), 0.0),
        PipelineInput::Sampled(phi) => (spectrum_estimate(phi, opts.spectrum_threshold)?, periodogram(phi)?.bin_width),
    };
    for &lambda in input_spectrum.points() {
        let d = g.distance_to_k(lambda);
        if d < NON_RESONANCE_GAP {
            return Err(Error::NonResonanceViolation { frequency: lambda, distance: d });
        }
        if f.distance_to(lambda) > tolerance {
            return Err(Error::Invalid(format!("input frequency {lambda} lies outside F")));
        }
    }

    let cutoff = CutoffResolvent::new(g.clone(), f.clone())?;
    let need_green = matches!(input, PipelineInput::Sampled(_)) || opts.cross_check;
    let green = if need_green { Some(build_green_with(&cutoff, opts.t_max, opts.n_near, opts.grid_tolerance)?) } else { None };

    let (solution, phi_on_u, trig_solution, convolution, convolution_vs_trig) = match input {
        PipelineInput::Trig(p) => {
            let n = ((opts.t_hi - opts.t_lo) / opts.step + 1e-9).floor() as usize + 1;
            let exact = solve_trig(g, p)?;
            let u = exact.sample(opts.t_lo, opts.step, n)?;
            let phi = p.sample(opts.t_lo, opts.step, n)?;
            let (meta, diff) = match &green {
                Some(gf) => {
                    let pad = (opts.t_max / opts.step).ceil() as usize + 4;
                    let long = p.sample(opts.t_lo - pad as f64 * opts.step, opts.step, n + 2 * pad)?;
                    let conv = convolve_green(gf, &long, opts.t_lo, u.t_end())?;
                    let diff = (0..u.len().min(conv.solution.len()))
                        .map(|k| {
                            u.value(k).iter().zip(conv.solution.value(k)).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
                        })
                        .fold(0.0, f64::max);
                    (Some(conv.metadata), Some(diff))
                }
                None => (None, None),
            };
            (u, phi, Some(exact), meta, diff)
        }
        PipelineInput::Sampled(phi) => {
            let gf = green.as_ref().expect("built for sampled input");
            let conv = convolve_green(gf, phi, opts.t_lo, opts.t_hi)?;
            let phi_on_u = resample_onto(phi, &conv.solution)?;
            (conv.solution, phi_on_u, None, Some(conv.metadata), None)
        }
    };

    let residual_variation_of_constants = if g.is_oracle() {
        None
    } else {
        let probes: Vec<(f64, f64)> = (0..4)
            .map(|j| {
                let i0 = j * (solution.len() - 1) / 4;
                let i1 = (i0 + (opts.probe_length / solution.step()).round() as usize).min(solution.len() - 1);
                (solution.time(i0), solution.time(i1))
            })
            .collect();
        Some(mild_residual_voc(g, &solution, &phi_on_u, &probes)?)
    };
    let residual_integral_form = mild_residual_integral(g, &solution, &phi_on_u)?;

    let (solution_spectrum, spectrum_check, spectrum_method) = match &trig_solution {
        Some(u) => {
            let s = trig_spectrum(u);
            let ok = s.is_subset_of(&input_spectrum) && s.is_subset_of(f);
            (Some(s), ok, SpectrumMethod::Exact)
        }
        None if solution.len() >= MIN_SAMPLES => {
            let s = spectrum_estimate(&solution, opts.spectrum_threshold)?;
            let bin = periodogram(&solution)?.bin_width.max(tolerance);
            let ok = s.points().iter().all(|&x| input_spectrum.distance_to(x) <= 1.5 * bin);
            (Some(s), ok, SpectrumMethod::Surrogate)
        }
        None => (None, false, SpectrumMethod::Unavailable),
    };

    let modulus_of_continuity = MODULUS_SHIFTS.iter().map(|&h| modulus(&solution, h)).collect();
    let report = MildSolutionReport {
        sup_norm: solution.sup_norm(),
        window: [solution.t0(), solution.t_end()],
        step: solution.step(),
        solution,
        trig_solution,
        k_set,
        a,
        input_spectrum,
        solution_spectrum,
        residual_variation_of_constants,
        residual_integral_form,
        modulus_of_continuity,
        spectrum_check,
        spectrum_method,
        cutoff: cutoff.summary(),
        green: green.as_ref().map(|gf| gf.summary()),
        convolution,
        convolution_vs_trig,
    };
    Ok(Run { report, green })
}

/// `(h', sup_k ‖u(t_k + h') - u(t_k)‖)` with `h'` the nearest positive grid multiple of `h`.
fn modulus(u: &SampledFunction, h: f64) -> (f64, f64) {
    let s = ((h / u.step()).round() as usize).max(1);
    let sup = (0..u.len().saturating_sub(s))
        .map(|k| u.value(k + s).iter().zip(u.value(k)).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    (s as f64 * u.step(), sup)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ApOptions {
    pub eps: f64,
    pub window: f64,
    /// Evidence parameters for the means `M_h φ`.
    pub precondition_eps: f64,
    pub precondition_window: f64,
    /// Sampling step of the long records handed to the detector.
    pub step: f64,
}

impl Default for ApOptions {
    fn default() -> Self {
        ApOptions { eps: 0.05, window: 200.0, precondition_eps: 0.2, precondition_window: 200.0, step: 0.05 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanClassReport {
    pub report: MildSolutionReport,
    pub precondition: Vec<(f64, ApEvidence)>,
    pub solution_evidence: ApEvidence,
    pub ap_evidence: bool,
    #[serde(skip)]
    pub green: Option<GreenFunction>,
}

/// Checks that every `M_h φ` looks almost periodic, solves, and tests the solution.
pub fn mean_class_pipeline(
    g: &GeneratorSpec,
    input: &PipelineInput,
    f: &SpectrumSet,
    h_list: &[f64],
    opts: &PipelineOptions,
    ap: &ApOptions,
) -> Result<MeanClassReport> {
    let span = 8.0 * ap.window.max(ap.precondition_window);
    let n_long = (span / ap.step).ceil() as usize + 1;
    let mut precondition = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let mh = match input {
            PipelineInput::Trig(p) => p.mean(h)?.sample(0.0, ap.step, n_long)?,
            PipelineInput::Sampled(phi) => mean_operator(phi, h)?,
        };
        let ev = ap_detector(&mh, ap.precondition_eps, ap.precondition_window)?;
        if !ev.is_ap_evidence {
            return Err(Error::PreconditionEvidenceFailure(format!(
                "M_h phi with h = {h}: largest gap between {}-almost periods is {:.3} > window {}",
                ap.precondition_eps, ev.max_gap, ap.precondition_window
            )));
        }
        precondition.push((h, ev));
    }

    let Run { report, green } = run(g, input, f, opts)?;
    let long_solution = match (&report.trig_solution, input) {
        (Some(u), _) => u.sample(0.0, ap.step, n_long)?,
        (None, PipelineInput::Sampled(phi)) => {
            let gf = green.as_ref().expect("built for sampled input");
            let lo = phi.t0() + gf.t_max();
            let hi = phi.t_end() - gf.t_max();
            convolve_green(gf, phi, lo, hi)?.solution
        }
        (None, PipelineInput::Trig(_)) => unreachable!("trig inputs carry an exact solution"),
    };
    let solution_evidence = ap_detector(&long_solution, ap.eps, ap.window)?;
    Ok(MeanClassReport { ap_evidence: solution_evidence.is_ap_evidence, report, precondition, solution_evidence, green })
}

/// `e^{iλt} x` as a trig input, a convenience for builtins and tests.
pub fn exponential_input(lambda: f64, x: &[f64]) -> Result<TrigPolynomial> {
    TrigPolynomial::exponential(lambda, crate::linalg::ComplexVector::new(x.iter().map(|&v| Complex64::new(v, 0.0)).collect()))
}
