//! Green functions and bounded mild solutions of `u' = Au + φ` on the real line.
//!
//! The generator `A` is a dense complex matrix or a diagonal resolvent oracle.
//! Under non-resonance (input frequencies avoid the imaginary-axis spectrum of
//! `A`), the bounded solution is `u = G * φ` where `G` is the inverse Fourier
//! transform of a cutoff resolvent `H = (1 - χ)(i· - A)^{-1}`.

pub mod cutoff;
pub mod error;
pub mod generator;
pub mod green;
pub mod harmonic;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod quadrature;
pub mod sets;
pub mod solver;

pub use error::{Error, Result};
