//! Bounded mild solutions: exact trig solves, Green convolution, residual
//! checks, pipelines and the spike-train counterexample.

pub mod builtins;
mod convolve;
mod pipeline;
mod residual;
mod spike;

pub use convolve::{convolve_green, solve_trig, Convolution, ConvolutionMetadata, RESONANCE_TOLERANCE};
pub use pipeline::{
    exponential_input, mean_class_pipeline, mild_solution_pipeline, mild_solution_with_green, ApOptions, MeanClassReport, MildSolutionReport, PipelineInput,
    PipelineOptions, SpectrumMethod, MODULUS_SHIFTS, NON_RESONANCE_GAP,
};
pub use residual::{mean_regularization_check, mild_residual_integral, mild_residual_voc, resample_onto, MAX_PROBE_LENGTH};
pub use spike::{spike_solution, spike_train_counterexample, SpikeTrainReport, MAX_SPIKES};
