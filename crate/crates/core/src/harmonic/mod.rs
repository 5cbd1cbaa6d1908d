//! Trigonometric polynomials, sampled functions and the operations on them:
//! spectra, Fejér approximation, sliding means and almost-period evidence.

mod ap;
mod fejer;
mod mean;
mod sampled;
mod spectrum;
mod trig;

pub use ap::{ap_detector, ApEvidence};
pub use fejer::{fejer_approximation, fejer_approximation_with, fejer_sequence, FejerApproximation, FejerOptions};
pub use mean::mean_operator;
pub use sampled::SampledFunction;
pub(crate) use sampled::lagrange4;
pub use spectrum::{periodogram, spectrum_estimate, Periodogram, MIN_SAMPLES};
pub use trig::{convolve_trig, trig_spectrum, try_convolve_trig, TrigPolynomial, TrigTerm, FREQUENCY_MERGE_TOLERANCE};
