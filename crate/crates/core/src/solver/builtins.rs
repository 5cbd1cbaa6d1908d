//! Ready-made scenarios.

use num_complex::Complex64;

use crate::error::Result;
use crate::generator::GeneratorSpec;
use crate::harmonic::TrigPolynomial;
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::sets::{Interval, SpectrumSet};

#[derive(Clone, Debug)]
pub struct Builtin {
    pub name: &'static str,
    pub generator: GeneratorSpec,
    pub input: TrigPolynomial,
    pub f_set: SpectrumSet,
}

pub const BUILTIN_NAMES: [&str; 3] = ["rotation_block", "favard", "spike_train"];

/// Rotation generator with `K = {±1}`, forced at frequency 2.
pub fn rotation_block() -> Result<Builtin> {
    let generator = GeneratorSpec::matrix(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]))?;
    let input = TrigPolynomial::exponential(2.0, ComplexVector::from_real(&[1.0, 0.0]))?;
    Ok(Builtin { name: "rotation_block", generator, input, f_set: SpectrumSet::complement_of_gap(-1.5, 1.5) })
}

/// `y''' + y'' + 4y' + 4y = e^{it} + e^{i√3 t}` in companion form; the
/// characteristic roots are `-1, ±2i`, so `K = {±2}`.
pub fn favard() -> Result<Builtin> {
    let generator = GeneratorSpec::matrix(ComplexMatrix::from_real(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -4.0, -4.0, -1.0]))?;
    let e3 = ComplexVector::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    let input = TrigPolynomial::new(3, vec![(1.0, e3.clone()), (3f64.sqrt(), e3)])?;
    let f_set = SpectrumSet::new(
        vec![],
        vec![
            Interval::new(f64::NEG_INFINITY, -2.2)?,
            Interval::new(-1.8, 1.8)?,
            Interval::new(2.2, f64::INFINITY)?,
        ],
    );
    Ok(Builtin { name: "favard", generator, input, f_set })
}

pub fn builtin(name: &str) -> Option<Result<Builtin>> {
    match name {
        "rotation_block" => Some(rotation_block()),
        "favard" => Some(favard()),
        _ => None,
    }
}
