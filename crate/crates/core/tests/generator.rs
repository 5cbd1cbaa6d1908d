mod common;

use common::{c, config, random_dichotomy};
use greensolve::generator::{power_law_poles, GeneratorDescriptor, GeneratorSpec};
use greensolve::linalg::ComplexMatrix;
use greensolve::operator::{LinearValue, Operator};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diff(a: &Operator, b: &Operator) -> f64 {
    let mut d = a.clone();
    d.axpy(c(-1.0, 0.0), b);
    d.max_abs()
}

#[test]
fn power_law_family_decay() {
    let g = GeneratorSpec::oracle(power_law_poles(200, 0.7), None).unwrap();
    assert!((0.63..=0.77).contains(&g.theta()), "theta = {}", g.theta());
    assert!(g.k_set().is_empty());
    let err = GeneratorSpec::oracle(power_law_poles(200, 0.3), None).unwrap_err();
    assert_eq!(err.kind(), "DecayViolation");
}

#[test]
fn matrix_generators_decay_like_one_over_t() {
    for a in [
        ComplexMatrix::from_real(1, 1, &[-1.0]),
        ComplexMatrix::from_real(2, 2, &[-1.0, 0.0, 0.0, -2.0]),
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]),
    ] {
        let g = GeneratorSpec::matrix(a).unwrap();
        // probes start at a, where nearby poles steepen the slope slightly
        assert!((0.95..=1.1).contains(&g.theta()), "theta = {}", g.theta());
        assert_eq!(g.delta(), g.theta().min(0.999));
    }
}

#[test]
fn rotation_has_resonant_set_plus_minus_one() {
    let g = GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
    let (k, a) = g.imaginary_spectrum();
    assert_eq!(k.len(), 2);
    assert!((k[0] + 1.0).abs() < 1e-12 && (k[1] - 1.0).abs() < 1e-12);
    assert!((a - 2.0).abs() < 1e-12);
    // R(2i) = (2i - A)^{-1} for A = [[0, 1], [-1, 0]]
    let r = g.resolvent(2.0).unwrap();
    let want = [[c(0.0, -2.0 / 3.0), c(-1.0 / 3.0, 0.0)], [c(1.0 / 3.0, 0.0), c(0.0, -2.0 / 3.0)]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((r.entry(i, j) - want[i][j]).norm() < 1e-14);
        }
    }
}

#[test]
fn descriptor_json_round_trip() {
    let g = GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[-1.0, 0.5, 0.0, -2.0])).unwrap();
    let json = serde_json::to_string(&g.descriptor()).unwrap();
    let back: GeneratorDescriptor = serde_json::from_str(&json).unwrap();
    let g2 = back.build().unwrap();
    assert_eq!(g2.matrix_ref(), g.matrix_ref());
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn resolvent_identity(seed in any::<u64>(), s in -5.0f64..5.0, t in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GeneratorSpec::matrix(random_dichotomy(&mut rng, 4)).unwrap();
        let rs = g.resolvent(s).unwrap();
        let rt = g.resolvent(t).unwrap();
        // R(s) - R(t) = i (t - s) R(s) R(t)
        let rhs = rs.matmul(&rt).scale(c(0.0, t - s));
        let mut lhs = rs.clone();
        lhs.axpy(c(-1.0, 0.0), &rt);
        let scale = rs.max_abs().max(rt.max_abs()).max(1.0);
        prop_assert!(diff(&lhs, &rhs) < 1e-10 * scale * scale);
    }

    #[test]
    fn resolvent_derivatives_match_finite_differences(seed in any::<u64>(), t in -6.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GeneratorSpec::matrix(random_dichotomy(&mut rng, 3)).unwrap();
        let h = 1e-4;
        let d = g.resolvent_derivatives(t, 2).unwrap();
        let rp = g.resolvent(t + h).unwrap();
        let rm = g.resolvent(t - h).unwrap();
        let mut d1 = rp.clone();
        d1.axpy(c(-1.0, 0.0), &rm);
        let d1 = d1.scale(c(0.5 / h, 0.0));
        let mut d2 = rp;
        d2.axpy(c(1.0, 0.0), &rm);
        d2.axpy(c(-2.0, 0.0), &d[0]);
        let d2 = d2.scale(c(1.0 / (h * h), 0.0));
        let scale = d[0].max_abs().max(1.0).powi(4);
        prop_assert!(diff(&d1, &d[1]) < 1e-6 * scale);
        prop_assert!(diff(&d2, &d[2]) < 1e-4 * scale);
    }

    #[test]
    fn oracle_resolvent_is_diagonal_inverse(t in -300.0f64..300.0) {
        let poles = power_law_poles(50, 0.7);
        let g = GeneratorSpec::oracle(poles.clone(), Some(0.7)).unwrap();
        let r = g.resolvent(t).unwrap();
        for (k, p) in poles.iter().enumerate() {
            prop_assert!((r.entry(k, k) * (c(0.0, t) - p) - c(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
