//! Grids, matrix-valued sampled fields, and their Fourier-side companions.
//!
//! A field lives on the periodic box [−L/2, L/2)^d sampled at N points per
//! axis; every sample is an n×n complex matrix stored row-major.  The box
//! trace h^d Σ_s tr(·) stands in for the integral-plus-matrix-trace
//! functional, and is exact (to round-off) on band-limited fields.

use crate::mat::{self, MatError};
use crate::sum::{kahan_sum, Accumulator};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("spatial dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("samples per axis must be a power of two ≥ 8, got {0}")]
    BadSamples(usize),
    #[error("box side must be positive and finite, got {0}")]
    BadBox(f64),
    #[error("matrix size must be in 1..=8, got {0}")]
    BadMatrixSize(usize),
    #[error("grid would need {0} matrix entries, over the memory budget")]
    TooLarge(usize),
    #[error("exponent p must satisfy p ≥ 1, got {0}")]
    BadExponent(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("bump spills over the box boundary: max boundary entry {0:.3e} ≥ 1e-12")]
    BumpTooWide(f64),
    #[error("band limit {kmax} must be below the Nyquist index {nyquist}")]
    BandTooWide { kmax: usize, nyquist: usize },
    #[error(transparent)]
    Matrix(#[from] MatError),
}

/// Discretization of the box [−L/2, L/2)^d with n×n matrix samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Spatial dimension, 1 or 2.
    pub d: usize,
    /// Matrix size of the coefficient algebra.
    pub n: usize,
    /// Box side length L.
    pub l: f64,
    /// Samples per axis N (power of two); grid step h = L/N.
    pub nsamp: usize,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, l: f64, nsamp: usize) -> Result<Self, FieldError> {
        if d != 1 && d != 2 {
            return Err(FieldError::BadDimension(d));
        }
        if !(1..=8).contains(&n) {
            return Err(FieldError::BadMatrixSize(n));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(FieldError::BadBox(l));
        }
        if nsamp < 8 || !nsamp.is_power_of_two() {
            return Err(FieldError::BadSamples(nsamp));
        }
        let entries = nsamp.pow(d as u32) * n * n;
        if entries > 1 << 27 {
            return Err(FieldError::TooLarge(entries));
        }
        Ok(Self { d, n, l, nsamp })
    }

    /// Desk-scale default d=1 grid: N=1024 samples on a box of side 32.
    pub fn desk_1d(n: usize) -> Self {
        Self::new(1, n, 32.0, 1024).unwrap()
    }

    /// Desk-scale default d=2 grid: N=256 samples per axis on a box of side 16.
    pub fn desk_2d(n: usize) -> Self {
        Self::new(2, n, 16.0, 256).unwrap()
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.l / self.nsamp as f64
    }

    /// Grid cell volume h^d.
    #[inline]
    pub fn cell(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.nsamp.pow(self.d as u32)
    }

    #[inline]
    pub fn mat_len(&self) -> usize {
        self.n * self.n
    }

    /// Coordinate of axis index m: −L/2 + m·h.
    #[inline]
    pub fn coord(&self, m: usize) -> f64 {
        -0.5 * self.l + m as f64 * self.h()
    }

    /// Site index → per-axis indices.
    #[inline]
    pub fn axes(&self, site: usize) -> [usize; 2] {
        match self.d {
            1 => [site, 0],
            _ => [site / self.nsamp, site % self.nsamp],
        }
    }

    #[inline]
    pub fn site(&self, axes: [usize; 2]) -> usize {
        match self.d {
            1 => axes[0],
            _ => axes[0] * self.nsamp + axes[1],
        }
    }

    /// Position vector of a site (second entry 0 when d=1).
    #[inline]
    pub fn position(&self, site: usize) -> [f64; 2] {
        let ax = self.axes(site);
        match self.d {
            1 => [self.coord(ax[0]), 0.0],
            _ => [self.coord(ax[0]), self.coord(ax[1])],
        }
    }

    /// Integer frequency of axis index m, in [−N/2, N/2).
    #[inline]
    pub fn freq_index(&self, m: usize) -> i64 {
        if m < self.nsamp / 2 {
            m as i64
        } else {
            m as i64 - self.nsamp as i64
        }
    }

    /// Frequency vector ξ = k/L of a site in the spectral layout.
    #[inline]
    pub fn xi(&self, site: usize) -> [f64; 2] {
        let ax = self.axes(site);
        let f = |m: usize| self.freq_index(m) as f64 / self.l;
        match self.d {
            1 => [f(ax[0]), 0.0],
            _ => [f(ax[0]), f(ax[1])],
        }
    }

    /// |ξ| at a spectral site.
    #[inline]
    pub fn xi_norm(&self, site: usize) -> f64 {
        let x = self.xi(site);
        (x[0] * x[0] + x[1] * x[1]).sqrt()
    }
}

/// Matrix-valued function sampled on a grid; sample s is the row-major n×n
/// block `data[s*n*n .. (s+1)*n*n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: GridSpec,
    pub data: Vec<Complex64>,
}

/// Fourier coefficients f̂(ξ_k), k ∈ [−N/2, N/2)^d, stored in natural FFT
/// index order (use [`GridSpec::xi`] to map site → frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub data: Vec<Complex64>,
}

macro_rules! shared_field_impl {
    ($ty:ident) => {
        impl $ty {
            pub fn zeros(grid: GridSpec) -> Self {
                Self {
                    grid,
                    data: vec![Complex64::ZERO; grid.sites() * grid.mat_len()],
                }
            }

            #[inline]
            pub fn at(&self, site: usize) -> &[Complex64] {
                let m = self.grid.mat_len();
                &self.data[site * m..(site + 1) * m]
            }

            #[inline]
            pub fn at_mut(&mut self, site: usize) -> &mut [Complex64] {
                let m = self.grid.mat_len();
                &mut self.data[site * m..(site + 1) * m]
            }

            pub fn scale(&self, c: Complex64) -> Self {
                Self {
                    grid: self.grid,
                    data: self.data.iter().map(|z| c * z).collect(),
                }
            }

            pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
                if self.grid != other.grid {
                    return Err(FieldError::GridMismatch);
                }
                Ok(Self {
                    grid: self.grid,
                    data: self
                        .data
                        .iter()
                        .zip(&other.data)
                        .map(|(a, b)| a + b)
                        .collect(),
                })
            }

            pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
                if self.grid != other.grid {
                    return Err(FieldError::GridMismatch);
                }
                Ok(Self {
                    grid: self.grid,
                    data: self
                        .data
                        .iter()
                        .zip(&other.data)
                        .map(|(a, b)| a - b)
                        .collect(),
                })
            }

            pub fn max_abs_entry(&self) -> f64 {
                self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        }
    };
}

shared_field_impl!(SampledField);
shared_field_impl!(SpectralField);

impl SampledField {
    /// Pointwise conjugate transpose; an exact involution.
    pub fn adjoint(&self) -> Self {
        let n = self.grid.n;
        let mut out = Self::zeros(self.grid);
        for s in 0..self.grid.sites() {
            let src = self.at(s);
            let dst = out.at_mut(s);
            for i in 0..n {
                for j in 0..n {
                    dst[j * n + i] = src[i * n + j].conj();
                }
            }
        }
        out
    }

    /// Squared L₂(N) norm h^d Σ_s tr|f(s)|² (no eigensolve needed).
    pub fn l2_sq(&self) -> f64 {
        self.grid.cell() * kahan_sum(self.data.iter().map(|z| z.norm_sqr()))
    }

    /// ‖f‖_p = (h^d Σ_s tr|f(s)|^p)^{1/p}; p = ∞ is the max operator norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64, FieldError> {
        if !(p >= 1.0) {
            return Err(FieldError::BadExponent(p));
        }
        let n = self.grid.n;
        if p.is_infinite() {
            let mut best = 0.0_f64;
            for s in 0..self.grid.sites() {
                best = best.max(mat::op_norm(self.at(s), n));
            }
            return Ok(best);
        }
        if p == 2.0 {
            return Ok(self.l2_sq().sqrt());
        }
        let mut acc = Accumulator::new();
        for s in 0..self.grid.sites() {
            acc.add(mat::trace_abs_pow(self.at(s), n, p));
        }
        Ok((self.grid.cell() * acc.value()).powf(1.0 / p))
    }

    /// Relative L₂ distance ‖f−g‖₂ / ‖g‖₂ (0/0 counts as 0).
    pub fn rel_l2_error(&self, reference: &Self) -> Result<f64, FieldError> {
        let diff = self.sub(reference)?;
        let denom = reference.l2_sq().sqrt();
        let num = diff.l2_sq().sqrt();
        if denom == 0.0 {
            Ok(if num == 0.0 { 0.0 } else { f64::INFINITY })
        } else {
            Ok(num / denom)
        }
    }
}

impl SpectralField {
    /// Spectral-side squared L₂ mass L^{−d} Σ_k tr|f̂(ξ_k)|²; equals the
    /// spatial [`SampledField::l2_sq`] by the discrete Plancherel identity.
    pub fn l2_sq(&self) -> f64 {
        let vol = self.grid.l.powi(self.grid.d as i32);
        kahan_sum(self.data.iter().map(|z| z.norm_sqr())) / vol
    }
}

/// Scalar profiles available to `scalar-function-lift` test fields.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarProfile {
    /// exp(−|s|²/(2σ²)).
    Gaussian { sigma: f64 },
    /// cos(2π k·s / L) — exactly band-limited.
    Cosine { k: [i64; 2] },
}

impl ScalarProfile {
    pub fn eval(&self, pos: [f64; 2], l: f64) -> f64 {
        match self {
            ScalarProfile::Gaussian { sigma } => {
                let r2 = pos[0] * pos[0] + pos[1] * pos[1];
                (-r2 / (2.0 * sigma * sigma)).exp()
            }
            ScalarProfile::Cosine { k } => {
                let phase = 2.0 * std::f64::consts::PI * (k[0] as f64 * pos[0] + k[1] as f64 * pos[1]) / l;
                phase.cos()
            }
        }
    }
}

/// Generator descriptors for deterministic test fields.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    /// Every sample equals the given n×n matrix.
    Constant(Vec<Complex64>),
    /// Gaussian envelope exp(−|s|²/(2σ²)) times a seeded random Hermitian
    /// matrix; rejected when the envelope fails to die out at the boundary.
    GaussianBump { sigma: f64 },
    /// Random spectral coefficients supported on max-norm frequencies
    /// |k_i| ≤ kmax, transformed back to samples.
    BandLimited { kmax: usize },
    /// Scalar profile times the identity matrix.
    ScalarLift(ScalarProfile),
}

/// One standard complex Gaussian (Box–Muller on the uniform generator, so
/// only `rand`'s core API is needed).
fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    // Variance 1/2 per component: E|z|² = 1.
    Complex64::new(r * th.cos(), r * th.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n * n).map(|_| complex_gaussian(rng)).collect()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let g = random_matrix(rng, n);
    let ga = mat::adjoint(&g, n);
    g.iter().zip(&ga).map(|(a, b)| 0.5 * (a + b)).collect()
}

/// Deterministic-in-seed test-field factory.
pub fn make_field(spec: &FieldSpec, grid: GridSpec, seed: u64) -> Result<SampledField, FieldError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n;
    match spec {
        FieldSpec::Constant(m) => {
            debug_assert_eq!(m.len(), grid.mat_len());
            let mut f = SampledField::zeros(grid);
            for s in 0..grid.sites() {
                f.at_mut(s).copy_from_slice(m);
            }
            Ok(f)
        }
        FieldSpec::GaussianBump { sigma } => {
            let h = random_hermitian(&mut rng, n);
            let mut f = SampledField::zeros(grid);
            for s in 0..grid.sites() {
                let env = ScalarProfile::Gaussian { sigma: *sigma }.eval(grid.position(s), grid.l);
                for (dst, src) in f.at_mut(s).iter_mut().zip(&h) {
                    *dst = env * src;
                }
            }
            let boundary = boundary_max(&f);
            if boundary >= 1e-12 {
                return Err(FieldError::BumpTooWide(boundary));
            }
            Ok(f)
        }
        FieldSpec::BandLimited { kmax } => {
            if *kmax >= grid.nsamp / 2 {
                return Err(FieldError::BandTooWide {
                    kmax: *kmax,
                    nyquist: grid.nsamp / 2,
                });
            }
            let mut coeffs = SpectralField::zeros(grid);
            let modes = (2 * kmax + 1).pow(grid.d as u32) as f64;
            // Draw in a fixed site order so the field is seed-deterministic.
            for s in 0..grid.sites() {
                let ax = grid.axes(s);
                let in_band = (0..grid.d).all(|a| grid.freq_index(ax[a]).unsigned_abs() as usize <= *kmax);
                if !in_band {
                    continue;
                }
                let m = random_matrix(&mut rng, n);
                let norm = grid.l.powi(grid.d as i32).sqrt() / modes.sqrt();
                for (dst, src) in coeffs.at_mut(s).iter_mut().zip(&m) {
                    *dst = norm * src;
                }
            }
            Ok(crate::fft::inverse(&coeffs))
        }
        FieldSpec::ScalarLift(profile) => {
            let mut f = SampledField::zeros(grid);
            for s in 0..grid.sites() {
                let v = profile.eval(grid.position(s), grid.l);
                let dst = f.at_mut(s);
                for i in 0..n {
                    dst[i * n + i] = Complex64::new(v, 0.0);
                }
            }
            Ok(f)
        }
    }
}

/// Largest entry magnitude on the box boundary (any axis index 0 or N−1).
fn boundary_max(f: &SampledField) -> f64 {
    let g = f.grid;
    let mut best = 0.0_f64;
    for s in 0..g.sites() {
        let ax = g.axes(s);
        let on_edge = (0..g.d).any(|a| ax[a] == 0 || ax[a] == g.nsamp - 1);
        if on_edge {
            best = best.max(f.at(s).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_identity_field() {
        let g = GridSpec::new(1, 2, 32.0, 64).unwrap();
        let f = make_field(&FieldSpec::Constant(mat::identity(2)), g, 0).unwrap();
        for s in 0..g.sites() {
            assert_eq!(f.at(s), &mat::identity(2)[..]);
        }
    }

    #[test]
    fn band_limited_is_seed_deterministic() {
        let g = GridSpec::new(1, 2, 32.0, 128).unwrap();
        let a = make_field(&FieldSpec::BandLimited { kmax: 4 }, g, 7).unwrap();
        let b = make_field(&FieldSpec::BandLimited { kmax: 4 }, g, 7).unwrap();
        assert_eq!(a, b);
        let c = make_field(&FieldSpec::BandLimited { kmax: 4 }, g, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_tail_bound_at_default_width() {
        // Envelope at the box edge: exp(−(L/2)²/(2(L/16)²)) = exp(−32),
        // frozen value 1.2664165549e−14 — three orders under the 1e−12 gate.
        let tail = (-32.0_f64).exp();
        assert!((tail - 1.266_416_554_9e-14).abs() < 1e-23);
        let g = GridSpec::desk_1d(2);
        let f = make_field(&FieldSpec::GaussianBump { sigma: g.l / 16.0 }, g, 3).unwrap();
        assert!(boundary_max(&f) < 1e-12);
    }

    #[test]
    fn too_wide_bump_rejected() {
        let g = GridSpec::desk_1d(2);
        let err = make_field(&FieldSpec::GaussianBump { sigma: g.l / 4.0 }, g, 3).unwrap_err();
        assert!(matches!(err, FieldError::BumpTooWide(_)));
    }

    #[test]
    fn adjoint_is_involution_and_isometric() {
        let g = GridSpec::new(1, 3, 16.0, 64).unwrap();
        let f = make_field(&FieldSpec::BandLimited { kmax: 5 }, g, 11).unwrap();
        let ff = f.adjoint().adjoint();
        assert_eq!(f, ff);
        // Singular values of A and A* coincide, so every p-norm matches.
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let a = f.lp_norm(p).unwrap();
            let b = f.adjoint().lp_norm(p).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.max(1e-300), "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn lp_norm_of_constant_identity() {
        // ‖1⊗I‖_p = (V·n)^{1/p} on a box of volume V.
        let g = GridSpec::new(1, 2, 32.0, 256).unwrap();
        let f = make_field(&FieldSpec::Constant(mat::identity(2)), g, 0).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let want = (32.0_f64 * 2.0).powf(1.0 / p);
            assert!((f.lp_norm(p).unwrap() - want).abs() < 1e-10);
        }
        assert!((f.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_absolutely_homogeneous() {
        let g = GridSpec::new(1, 2, 16.0, 64).unwrap();
        let f = make_field(&FieldSpec::BandLimited { kmax: 3 }, g, 5).unwrap();
        let c = Complex64::new(-1.7, 0.4);
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let lhs = f.scale(c).lp_norm(p).unwrap();
            let rhs = c.norm() * f.lp_norm(p).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }
    }

    #[test]
    fn rejects_sub_one_exponent() {
        let g = GridSpec::new(1, 1, 16.0, 64).unwrap();
        let f = SampledField::zeros(g);
        assert!(matches!(f.lp_norm(0.5), Err(FieldError::BadExponent(_))));
    }
}
