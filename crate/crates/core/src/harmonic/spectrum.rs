//! Thresholded Hann-windowed DFT surrogate for the spectrum of sampled data.
//!
//! Lossy by design: components below `threshold * max` disappear, and every
//! reported frequency is a bin center, so it is accurate to one bin width.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::harmonic::SampledFunction;
use crate::sets::SpectrumSet;

pub const MIN_SAMPLES: usize = 1 << 10;

/// Normalized windowed magnitudes, one per bin, with bin frequencies.
#[derive(Clone, Debug)]
pub struct Periodogram {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub bin_width: f64,
}

pub fn periodogram(f: &SampledFunction) -> Result<Periodogram> {
    let n = f.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: n, need: MIN_SAMPLES });
    }
    let window: Vec<f64> = (0..n).map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos()).collect();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut power = vec![0.0; n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..f.dim() {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = f.value(k)[c] * window[k];
        }
        fft.process(&mut buf);
        for (p, z) in power.iter_mut().zip(&buf) {
            *p += z.norm_sqr();
        }
    }
    let peak = power.iter().cloned().fold(0.0, f64::max);
    let scale = if peak > 0.0 { 1.0 / peak.sqrt() } else { 0.0 };
    let bin_width = 2.0 * PI / (n as f64 * f.step());
    let frequencies = (0..n).map(|k| if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 } * bin_width).collect();
    Ok(Periodogram { frequencies, magnitudes: power.iter().map(|p| p.sqrt() * scale).collect(), bin_width })
}

/// Local maxima of the normalized periodogram at or above `threshold`.
pub fn spectrum_estimate(f: &SampledFunction, threshold: f64) -> Result<SpectrumSet> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Invalid(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let p = periodogram(f)?;
    let n = p.magnitudes.len();
    let m = &p.magnitudes;
    let mut points = Vec::new();
    for k in 0..n {
        let left = m[(k + n - 1) % n];
        let right = m[(k + 1) % n];
        // ties resolve to the leftmost bin of a plateau
        if m[k] > 0.0 && m[k] >= threshold && m[k] > left && m[k] >= right {
            points.push(p.frequencies[k]);
        }
    }
    Ok(SpectrumSet::from_points(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_samples(terms: &[(f64, f64)], n: usize, step: f64) -> SampledFunction {
        SampledFunction::from_fn(0.0, step, n, 1, |t| {
            vec![terms.iter().map(|&(a, l)| Complex64::from_polar(a, l * t)).sum()]
        })
        .unwrap()
    }

    #[test]
    fn single_line() {
        let f = exp_samples(&[(1.0, 2.0)], 1 << 14, 0.01);
        let s = spectrum_estimate(&f, 0.5).unwrap();
        let bin = 2.0 * PI / ((1 << 14) as f64 * 0.01);
        assert_eq!(s.points().len(), 1);
        assert!((s.points()[0] - 2.0).abs() <= bin);
    }

    #[test]
    fn constant_is_zero_frequency() {
        let f = SampledFunction::from_fn(0.0, 0.1, 2048, 2, |_| vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -3.0)]).unwrap();
        assert_eq!(spectrum_estimate(&f, 0.5).unwrap().points(), &[0.0]);
    }

    #[test]
    fn weak_component_is_suppressed() {
        let f = exp_samples(&[(1.0, 2.0), (0.001, 7.0)], 1 << 14, 0.01);
        let s = spectrum_estimate(&f, 0.5).unwrap();
        assert_eq!(s.points().len(), 1);
        assert!((s.points()[0] - 2.0).abs() < 0.05);
    }

    #[test]
    fn too_few_samples() {
        let f = exp_samples(&[(1.0, 1.0)], 1000, 0.01);
        assert_eq!(spectrum_estimate(&f, 0.5).unwrap_err().kind(), "TooFewSamples");
    }
}
