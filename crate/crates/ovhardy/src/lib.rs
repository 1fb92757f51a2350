//! Numerical toolkit for operator-valued local Hardy-space analysis.
//!
//! Fields are n×n-matrix-valued functions sampled on a periodic box in R^d
//! (d ∈ {1,2}).  On top of that the crate provides the Poisson scale family
//! and related Fourier multipliers, conic/radial/discrete Littlewood–Paley
//! square functions, local BMO-type norms, Carleson functionals and tent
//! norms, shifted dyadic cube systems with a covering search, an atomic
//! decomposition, and verification suites that measure every exactly
//! testable identity and record empirical constants for the inequalities.
//!
//! Entry points: [`field`] for the field/grid types, [`kernels`] for
//! multipliers and test quadruples, [`square`] for square functions and the
//! strip embedding/retraction, [`norms`]/[`carleson`]/[`dyadic`] for the
//! derived functionals, and [`suites`] for the orchestrated checks used by
//! the CLI and the acceptance tests.

pub mod carleson;
pub mod config;
pub mod cubes;
pub mod cz;
pub mod duality;
pub mod dyadic;
pub mod fft;
pub mod field;
pub mod io;
pub mod kernels;
pub mod mat;
pub mod norms;
pub mod quadruple;
pub mod report;
pub mod scale;
pub mod square;
pub mod suites;
pub mod sum;

pub use field::{GridSpec, SampledField, SpectralField};
pub use scale::ScaleGrid;

/// Volume of the unit ball in R^d; the constant in the conic-to-radial
/// Fubini reduction and in the retraction prefactor.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => unreachable!("only d ∈ {{1,2}} is supported"),
    }
}

/// Normalizing constant of the spatial Poisson kernel
/// p_d ε/(|s|²+ε²)^{(d+1)/2}, i.e. Γ((d+1)/2)/π^{(d+1)/2}.
pub fn poisson_const(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        1 => 1.0 / PI,
        2 => 1.0 / (2.0 * PI),
        _ => unreachable!("only d ∈ {{1,2}} is supported"),
    }
}
