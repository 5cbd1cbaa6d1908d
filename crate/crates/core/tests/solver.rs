mod common;

use common::{c, random_dichotomy, random_trig, scalar};
use greensolve::cutoff::CutoffResolvent;
use greensolve::generator::GeneratorSpec;
use greensolve::green::build_green;
use greensolve::harmonic::{trig_spectrum, SampledFunction, TrigPolynomial};
use greensolve::linalg::{ComplexMatrix, ComplexVector};
use greensolve::sets::SpectrumSet;
use greensolve::solver::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(common::SEED)
}

fn shift_record(f: &SampledFunction, s: usize) -> SampledFunction {
    SampledFunction::from_data(f.t0(), f.step(), f.dim(), f.data()[s * f.dim()..].to_vec()).unwrap()
}

#[test]
fn trig_solution_is_linear() {
    let mut rng = rng();
    for _ in 0..10 {
        let g = GeneratorSpec::matrix(random_dichotomy(&mut rng, 3)).unwrap();
        let p = random_trig(&mut rng, 3, 3, 3.0);
        let q = random_trig(&mut rng, 3, 3, 3.0);
        let (alpha, beta) = (c(rng.gen_range(-2.0..2.0), 1.0), c(0.5, rng.gen_range(-2.0..2.0)));
        let lhs = solve_trig(&g, &p.combine(alpha, &q, beta).unwrap()).unwrap();
        let rhs = solve_trig(&g, &p).unwrap().combine(alpha, &solve_trig(&g, &q).unwrap(), beta).unwrap();
        for t in [-3.0, 0.0, 1.7, 10.0] {
            assert!(common::max_diff(lhs.eval(t).entries(), rhs.eval(t).entries()) < 1e-8);
        }
    }
}

#[test]
fn trig_solution_spectrum_is_included() {
    let mut rng = rng();
    for _ in 0..20 {
        let g = GeneratorSpec::matrix(random_dichotomy(&mut rng, 4)).unwrap();
        let p = random_trig(&mut rng, 4, 4, 3.0);
        let u = solve_trig(&g, &p).unwrap();
        assert!(trig_spectrum(&u).is_subset_of(&trig_spectrum(&p)));
    }
}

#[test]
fn trig_solution_is_translation_equivariant() {
    let mut rng = rng();
    let g = GeneratorSpec::matrix(random_dichotomy(&mut rng, 3)).unwrap();
    let p = random_trig(&mut rng, 3, 3, 3.0);
    let a = 2.5;
    let lhs = solve_trig(&g, &p.translate(a)).unwrap();
    let rhs = solve_trig(&g, &p).unwrap().translate(a);
    for t in [-1.0, 0.0, 4.0] {
        assert!(common::max_diff(lhs.eval(t).entries(), rhs.eval(t).entries()) < 1e-12);
    }
}

#[test]
fn convolution_examples_young_bound_and_translation() {
    let cut = CutoffResolvent::new(scalar(-1.0), SpectrumSet::whole_line()).unwrap();
    let gf = build_green(&cut, 64.0, 32).unwrap();
    let step = 0.01;
    let n = (150.0 / step) as usize + 1;
    let phi = SampledFunction::from_fn(-75.0, step, n, 1, |t| vec![Complex64::from_polar(1.0, t)]).unwrap();
    let conv = convolve_green(&gf, &phi, -5.0, 5.0).unwrap();
    let want = c(1.0, 0.0) / c(1.0, 1.0);
    let u = &conv.solution;
    let err = (0..u.len()).map(|k| (u.value(k)[0] - Complex64::from_polar(1.0, u.time(k)) * want).norm()).fold(0.0, f64::max);
    assert!(err < 1e-4, "err = {err:e}");
    assert!(conv.metadata.young_bound_holds);
    assert!(u.sup_norm() <= gf.l1_norm() * phi.sup_bound() + conv.metadata.truncation_bound);

    let zero = SampledFunction::from_fn(-75.0, step, n, 1, |_| vec![c(0.0, 0.0)]).unwrap();
    assert_eq!(convolve_green(&gf, &zero, -5.0, 5.0).unwrap().solution.sup_norm(), 0.0);

    // advancing the input by s samples advances the output by s samples
    let s = 137;
    let shifted = convolve_green(&gf, &shift_record(&phi, s), -5.0, 5.0).unwrap().solution;
    let moved = convolve_green(&gf, &phi, -5.0 + s as f64 * step, 5.0 + s as f64 * step).unwrap().solution;
    assert_eq!(shifted.len(), moved.len());
    assert!(common::max_diff(shifted.data(), moved.data()) < 1e-6);

    let short = SampledFunction::from_fn(-10.0, step, 2001, 1, |_| vec![c(1.0, 0.0)]).unwrap();
    assert_eq!(convolve_green(&gf, &short, -5.0, 5.0).unwrap_err().kind(), "InsufficientSpan");
}

#[test]
fn residual_forms_agree_on_corpus() {
    let mut rng = rng();
    let step = 0.005;
    for case in 0..8 {
        let g = GeneratorSpec::matrix(random_dichotomy(&mut rng, 3)).unwrap();
        let p = random_trig(&mut rng, 3, 2, 3.0);
        let u = solve_trig(&g, &p).unwrap().sample(-4.0, step, 1601).unwrap();
        let phi = p.sample(-4.0, step, 1601).unwrap();
        let candidate = if case % 2 == 0 {
            u
        } else {
            let off = common::random_vector(&mut rng, 3);
            u.map(|_, v| v.iter().zip(off.entries()).map(|(x, y)| x + y).collect()).unwrap()
        };
        let probes = [(-4.0, -2.0), (-1.0, 1.0), (2.0, 4.0)];
        let voc = mild_residual_voc(&g, &candidate, &phi, &probes).unwrap();
        let int = mild_residual_integral(&g, &candidate, &phi).unwrap();
        assert_eq!(voc <= 1e-3, int <= 1e-3, "case {case}: voc {voc:e}, integral {int:e}");
        assert_eq!(int <= 1e-3, case % 2 == 0, "case {case}: integral {int:e}");
    }
}

#[test]
fn injected_defect_is_detected() {
    let g = scalar(-1.0);
    let p = TrigPolynomial::exponential(1.0, ComplexVector::from_real(&[1.0])).unwrap();
    let u = solve_trig(&g, &p).unwrap().sample(-2.0, 0.01, 401).unwrap();
    let phi = p.sample(-2.0, 0.01, 401).unwrap();
    let clean = mild_residual_voc(&g, &u, &phi, &[(-1.0, 1.0)]).unwrap();
    assert!(clean < 1e-4, "clean {clean:e}");
    let k = u.index_of(1.0, 1e-9).unwrap();
    let bumped = u.map(|t, v| if (t - u.time(k)).abs() < 1e-9 { vec![v[0] + 0.1] } else { v.to_vec() }).unwrap();
    let r = mild_residual_voc(&g, &bumped, &phi, &[(-1.0, 1.0)]).unwrap();
    assert!(r >= 0.09 / (1.0 + bumped.sup_norm()));
}

#[test]
fn mean_regularization_on_trig_solution() {
    let g = GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[-1.0, 2.0, 0.0, -0.5])).unwrap();
    let p = TrigPolynomial::exponential(1.5, ComplexVector::from_real(&[1.0, -1.0])).unwrap();
    let u = solve_trig(&g, &p).unwrap().sample(-2.0, 1e-3, 4001).unwrap();
    let phi = p.sample(-2.0, 1e-3, 4001).unwrap();
    assert!(mean_regularization_check(&g, &u, &phi, 0.5).unwrap() < 1e-3);
}

#[test]
fn pipeline_examples() {
    let b = builtins::rotation_block().unwrap();
    let r = mild_solution_pipeline(&b.generator, &PipelineInput::Trig(b.input.clone()), &b.f_set, &PipelineOptions::default()).unwrap();
    assert!(r.residual_variation_of_constants.unwrap() <= 1e-3);
    assert!(r.residual_integral_form <= 1e-3);
    assert_eq!(r.solution_spectrum.as_ref().unwrap().points(), &[2.0]);
    assert!(r.spectrum_check);

    // no imaginary-axis spectrum and F = R: the cutoff is empty
    let g = GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[-1.0, 0.0, 0.0, -2.0])).unwrap();
    let p = TrigPolynomial::exponential(0.7, ComplexVector::from_real(&[1.0, 1.0])).unwrap();
    let r = mild_solution_pipeline(&g, &PipelineInput::Trig(p), &SpectrumSet::whole_line(), &PipelineOptions::default()).unwrap();
    assert!(r.cutoff.m_set.is_empty());
    assert!(r.residual_integral_form <= 1e-3);

    let g = GeneratorSpec::matrix(ComplexMatrix::from_diagonal(&[c(0.0, 2.0)])).unwrap();
    let p = TrigPolynomial::exponential(2.0, ComplexVector::from_real(&[1.0])).unwrap();
    let err = mild_solution_pipeline(&g, &PipelineInput::Trig(p), &SpectrumSet::whole_line(), &PipelineOptions::default()).unwrap_err();
    assert_eq!(err.kind(), "NonResonanceViolation");
}

#[test]
fn sampled_pipeline_on_oracle_generator() {
    let g = GeneratorSpec::oracle(vec![c(-1.0, 0.0), c(-0.5, 3.0)], None).unwrap();
    let opts = PipelineOptions { t_max: 40.0, t_lo: -3.0, t_hi: 3.0, ..Default::default() };
    let step = 0.01;
    let n = (100.0 / step) as usize + 1;
    let phi = SampledFunction::from_fn(-50.0, step, n, 2, |t| vec![Complex64::from_polar(1.0, t), c(0.5, 0.0)]).unwrap();
    let r = mild_solution_pipeline(&g, &PipelineInput::Sampled(phi), &SpectrumSet::whole_line(), &opts).unwrap();
    assert!(r.residual_variation_of_constants.is_none());
    assert!(r.residual_integral_form <= 1e-3, "{:e}", r.residual_integral_form);
    let conv = r.convolution.unwrap();
    assert!(conv.young_bound_holds);
}

#[test]
fn mean_class_precondition_rejects_bounded_ramp() {
    let g = scalar(-1.0);
    let step = 0.05;
    let n = (4000.0 / step) as usize;
    // bounded, slowly drifting: means are not almost periodic
    let phi = SampledFunction::from_fn(-2000.0, step, n, 1, |t| vec![c((t / 500.0).clamp(-1.0, 1.0), 0.0)]).unwrap();
    let err = mean_class_pipeline(
        &g,
        &PipelineInput::Sampled(phi),
        &SpectrumSet::whole_line(),
        &[1.0],
        &PipelineOptions::default(),
        &ApOptions::default(),
    )
    .unwrap_err();
    assert_eq!(err.kind(), "PreconditionEvidenceFailure");
}

#[test]
fn mean_class_trig_precondition_is_structural() {
    let g = scalar(-1.0);
    let p = TrigPolynomial::exponential(1.0, ComplexVector::from_real(&[1.0])).unwrap();
    let ap = ApOptions { eps: 0.05, window: 20.0, precondition_eps: 0.05, precondition_window: 20.0, step: 0.05 };
    let r = mean_class_pipeline(&g, &PipelineInput::Trig(p), &SpectrumSet::whole_line(), &[0.5, 1.0, 2.0], &PipelineOptions::default(), &ap).unwrap();
    assert!(r.precondition.iter().all(|(_, ev)| ev.is_ap_evidence));
    assert!(r.ap_evidence);
}

#[test]
fn spike_train_bounds() {
    let r = spike_train_counterexample(50).unwrap();
    assert!(r.sup_norm.is_finite() && r.sup_norm <= 3.0);
    assert!(r.stepanoff_bound_holds);
    let (n, inc) = *r.increments.last().unwrap();
    assert_eq!(n, 50);
    assert!(inc > 0.97);
}
