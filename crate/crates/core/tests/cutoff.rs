mod common;

use common::{c, config};
use greensolve::cutoff::{make_bump, ramp, CutoffResolvent};
use greensolve::generator::GeneratorSpec;
use greensolve::linalg::ComplexMatrix;
use greensolve::operator::LinearValue;
use greensolve::sets::{Interval, SpectrumSet};
use proptest::prelude::*;

fn rotation() -> GeneratorSpec {
    GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap()
}

#[test]
fn cutoff_vanishes_near_k_and_equals_resolvent_on_f() {
    let f = SpectrumSet::complement_of_gap(-1.5, 1.5);
    let h = CutoffResolvent::new(rotation(), f.clone()).unwrap();
    assert!((h.separation() - 0.5).abs() < 1e-12);
    for s in [-1.0, 1.0, 0.95, -1.05] {
        assert_eq!(h.value(s).unwrap().max_abs(), 0.0, "H({s})");
    }
    for s in [-7.0, -1.5, 1.5, 2.0, 40.0] {
        let r = h.generator().resolvent(s).unwrap();
        let mut d = h.value(s).unwrap();
        d.axpy(c(-1.0, 0.0), &r);
        assert!(d.max_abs() < 1e-15, "H({s}) differs from R");
    }
}

#[test]
fn empty_k_gives_plain_resolvent() {
    let g = GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[-1.0, 0.0, 0.0, -2.0])).unwrap();
    let h = CutoffResolvent::new(g, SpectrumSet::whole_line()).unwrap();
    assert!(h.m_set().is_empty());
    assert_eq!(h.bump().value(0.3), 0.0);
}

#[test]
fn overlapping_k_and_f_is_a_separation_error() {
    let err = CutoffResolvent::new(rotation(), SpectrumSet::whole_line()).unwrap_err();
    assert_eq!(err.kind(), "SeparationError");
}

#[test]
fn bump_respects_plateau_and_support() {
    let f = SpectrumSet::from_points(vec![3.0]);
    let b = make_bump(&[Interval::new(-1.0, 1.0).unwrap()], &f, 0.5).unwrap();
    assert_eq!(b.value(-1.2), 1.0);
    assert_eq!(b.value(1.25), 1.0);
    assert_eq!(b.value(2.0), 0.0);
    assert!(b.value(1.6) > 0.0 && b.value(1.6) < 1.0);
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn ramp_derivatives_match_finite_differences(x in 0.02f64..0.98) {
        let h = 1e-5;
        let [_, d1, d2] = ramp(x);
        let fd1 = (ramp(x + h)[0] - ramp(x - h)[0]) / (2.0 * h);
        let fd2 = (ramp(x + h)[1] - ramp(x - h)[1]) / (2.0 * h);
        prop_assert!((fd1 - d1).abs() < 1e-6 * (1.0 + d1.abs()));
        prop_assert!((fd2 - d2).abs() < 1e-5 * (1.0 + d2.abs()));
    }

    #[test]
    fn cutoff_derivatives_match_finite_differences(s in -4.0f64..4.0) {
        let h = CutoffResolvent::new(rotation(), SpectrumSet::complement_of_gap(-1.5, 1.5)).unwrap();
        let eps = 1e-5;
        let d = h.derivatives(s, 2).unwrap();
        let p = h.derivatives(s + eps, 2).unwrap();
        let m = h.derivatives(s - eps, 2).unwrap();
        for k in 0..2 {
            let mut fd = p[k].clone();
            fd.axpy(c(-1.0, 0.0), &m[k]);
            let mut err = fd.scale(c(0.5 / eps, 0.0));
            err.axpy(c(-1.0, 0.0), &d[k + 1]);
            prop_assert!(err.max_abs() < 1e-4 * (1.0 + d[k + 1].max_abs()), "k = {} s = {}", k + 1, s);
        }
    }
}
