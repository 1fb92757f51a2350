//! The Poisson convolution family and related potentials, applied spectrally.
//!
//! Every kernel here is a real radial Fourier multiplier: Poisson e^{−2πε|ξ|},
//! its ε-derivative −2π|ξ|e^{−2πε|ξ|}, the half-Laplacian and Bessel lifts
//! |ξ|e^{−2πε|ξ|} and (1+|ξ|²)^{1/2}e^{−2πε|ξ|}, and the fixed potential
//! (1+|ξ|)^{−1}.  Spectral application is exact for band-limited fields; the
//! space-domain kernel ε-scalings appear only in oracle tests.

use crate::fft::{self};
use crate::field::SampledField;
use num_complex::Complex64;

/// Built-in radial Fourier multipliers.  `Poisson`, `DPoisson`,
/// `RieszPoisson`, `BesselPoisson` take a scale ε; `G` is scale-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// e^{−2πε|ξ|} — the Poisson semigroup.
    Poisson,
    /// −2π|ξ|e^{−2πε|ξ|} — ∂/∂ε of the Poisson symbol.
    DPoisson,
    /// |ξ|e^{−2πε|ξ|} — half-Laplacian of the Poisson extension.
    RieszPoisson,
    /// (1+|ξ|²)^{1/2}e^{−2πε|ξ|} — Bessel lift of the Poisson extension.
    BesselPoisson,
    /// (1+|ξ|)^{−1} — fixed smoothing potential, no scale.
    G,
}

impl Kernel {
    /// Symbol value at radial frequency u = |ξ| and scale ε (ignored by `G`).
    #[inline]
    pub fn symbol(self, u: f64, eps: f64) -> f64 {
        let decay = (-2.0 * std::f64::consts::PI * eps * u).exp();
        match self {
            Kernel::Poisson => decay,
            Kernel::DPoisson => -2.0 * std::f64::consts::PI * u * decay,
            Kernel::RieszPoisson => u * decay,
            Kernel::BesselPoisson => (1.0 + u * u).sqrt() * decay,
            Kernel::G => 1.0 / (1.0 + u),
        }
    }
}

/// Spectral convolution by a built-in kernel at scale ε.
pub fn convolve(f: &SampledField, k: Kernel, eps: f64) -> SampledField {
    let coeffs = fft::forward(f);
    let filtered = fft::apply_symbol(&coeffs, |g, s| {
        Complex64::new(k.symbol(g.xi_norm(s), eps), 0.0)
    });
    fft::inverse(&filtered)
}

/// Spectral convolution by a scale-free radial profile Φ̂, dilated to scale ε:
/// multiplier Φ̂(ε|ξ|) (so the space kernel is ε^{−d}Φ(s/ε)).
pub fn convolve_profile<P: Fn(f64) -> f64 + Sync>(
    f: &SampledField,
    profile: P,
    eps: f64,
) -> SampledField {
    let coeffs = fft::forward(f);
    let filtered = fft::apply_symbol(&coeffs, |g, s| {
        Complex64::new(profile(eps * g.xi_norm(s)), 0.0)
    });
    fft::inverse(&filtered)
}

/// The fixed-scale smoothing P∗f — Poisson at ε = 1.
pub fn poisson_star(f: &SampledField) -> SampledField {
    convolve(f, Kernel::Poisson, 1.0)
}
