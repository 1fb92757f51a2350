//! Square functions over the truncated cone and their discrete and
//! two-variable relatives, plus the strip embedding and its retraction.
//!
//! A `ConeProfile` is the strip field u(s, ε) obtained by convolving a
//! sampled field against a dilated kernel family at each scale node.  The
//! radial square integrates |u(s, ·)|² over scales at fixed s; the conic
//! square additionally averages over the lattice ball |t| < ε before the
//! scale integral.  Measure conventions follow the profile kind: a profile
//! storing ∂/∂ε P_ε f integrates against ε dε, everything else against
//! dε/ε.  The cone variable t is never materialized — cone sums translate
//! the stored strip field at integration time.

use crate::field::{GridSpec, SampledField};
use crate::kernels::Kernel;
use crate::mat::psd_sqrt;
use crate::quadruple::TestQuadruple;
use crate::scale::ScaleGrid;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// What the stored strip values represent; decides the scale measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// u = ∂/∂ε P_ε f; squares integrate |u|² ε dε (factor ε² against dε/ε).
    PoissonDeriv,
    /// u = ε·∂/∂ε P_ε f; squares integrate |u|² dε/ε.
    ScaledPoissonDeriv,
    /// u = Φ_ε ∗ f for a vanishing-mean Φ; squares integrate |u|² dε/ε.
    GeneralPhi,
}

impl ProfileKind {
    /// Factor against the dε/ε quadrature at scale ε.
    #[inline]
    pub(crate) fn factor(self, eps: f64) -> f64 {
        match self {
            ProfileKind::PoissonDeriv => eps * eps,
            _ => 1.0,
        }
    }
}

/// Scale weighting requested for a radial square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// |u|² ε dε — only valid on profiles that store ∂/∂ε P_ε f.
    PoissonDerivative,
    /// |u|² dε/ε — valid on general-Φ and pre-scaled derivative profiles.
    GeneralPhi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aperture {
    /// Truncated cone: scales below 1.
    Local,
    /// Full cone up to the grid's largest scale node; same code path, the
    /// flag records intent (a non-local square truncated to (0,1) IS the
    /// local square).
    Nonlocal,
}

/// Truncated-cone families indexed by the truncation level ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoVariableKind {
    /// Cone over scales r > ε with balls B(s, r − ε/2).
    ShiftedBall,
    /// Cone over scales r > ε with balls B(s, r/2).
    HalfBall,
    /// Radial integral over the scale window (ε, 2/3].
    RadialWindow,
}

#[derive(Debug, Error)]
pub enum SquareError {
    #[error("weighting {weighting:?} does not match profile kind {kind:?}")]
    WeightMismatch {
        kind: ProfileKind,
        weighting: Weighting,
    },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("retraction expects the scaled-derivative strip field, got {0:?}")]
    KindMismatch(ProfileKind),
    #[error("truncation level {0} outside [0, 1]")]
    BadTruncation(f64),
    #[error("operation requires the discrete quadruple variant")]
    NotDiscrete,
}

/// Strip field u(s, ε_j): one sampled field per scale node, largest first.
#[derive(Debug, Clone)]
pub struct ConeProfile {
    pub grid: GridSpec,
    pub scales: ScaleGrid,
    pub kind: ProfileKind,
    pub values: Vec<SampledField>,
}

/// PSD square of a square function together with its PSD square root.
#[derive(Debug, Clone)]
pub struct SquareField {
    pub grid: GridSpec,
    pub square: SampledField,
    pub root: SampledField,
}

impl SquareField {
    /// Wrap an accumulated PSD square, computing the root site by site.
    pub fn from_square(square: SampledField) -> Self {
        let grid = square.grid;
        let n = grid.n;
        let mut root = SampledField::zeros(grid);
        root.data
            .par_chunks_mut(grid.mat_len())
            .zip(square.data.par_chunks(grid.mat_len()))
            .for_each(|(r, s)| {
                r.copy_from_slice(&psd_sqrt(s, n));
            });
        SquareField { grid, square, root }
    }
}

/// acc += coef · u*u (Gram matrix), without allocating.
#[inline]
pub(crate) fn accumulate_gram(acc: &mut [Complex64], u: &[Complex64], n: usize, coef: f64) {
    for p in 0..n {
        for q in 0..n {
            let mut s = Complex64::ZERO;
            for k in 0..n {
                s += u[k * n + p].conj() * u[k * n + q];
            }
            acc[p * n + q] += coef * s;
        }
    }
}

/// Convolve f against a labeled kernel family at every scale node.
pub fn cone_profile(f: &SampledField, k: Kernel, scales: &ScaleGrid) -> ConeProfile {
    let kind = match k {
        Kernel::DPoisson => ProfileKind::PoissonDeriv,
        _ => ProfileKind::GeneralPhi,
    };
    let values = scales
        .nodes
        .iter()
        .map(|&eps| crate::kernels::convolve(f, k, eps))
        .collect();
    ConeProfile {
        grid: f.grid,
        scales: scales.clone(),
        kind,
        values,
    }
}

/// Strip field from an arbitrary symbol (ξ, ε) ↦ multiplier.
pub fn cone_profile_with<F>(
    f: &SampledField,
    kind: ProfileKind,
    scales: &ScaleGrid,
    symbol: F,
) -> ConeProfile
where
    F: Fn([f64; 2], f64) -> Complex64 + Sync,
{
    let hat = crate::fft::forward(f);
    let values = scales
        .nodes
        .iter()
        .map(|&eps| {
            let m = crate::fft::apply_symbol(&hat, |g: &GridSpec, s: usize| symbol(g.xi(s), eps));
            crate::fft::inverse(&m)
        })
        .collect();
    ConeProfile {
        grid: f.grid,
        scales: scales.clone(),
        kind,
        values,
    }
}

/// Strip field Φ_ε ∗ f from a quadruple's band generator.
pub fn cone_profile_band(f: &SampledField, q: &TestQuadruple, scales: &ScaleGrid) -> ConeProfile {
    cone_profile_with(f, ProfileKind::GeneralPhi, scales, |xi, eps| {
        let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        Complex64::new(q.big_phi_hat(eps * r), 0.0)
    })
}

/// Strip field Ψ_ε ∗ f from a quadruple's dual band symbol.
pub fn cone_profile_band_dual(
    f: &SampledField,
    q: &TestQuadruple,
    scales: &ScaleGrid,
) -> ConeProfile {
    cone_profile_with(f, ProfileKind::GeneralPhi, scales, |xi, eps| {
        let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        Complex64::new(q.big_psi_hat(eps * r), 0.0)
    })
}

pub(crate) fn check_weighting(kind: ProfileKind, weighting: Weighting) -> Result<(), SquareError> {
    let ok = matches!(
        (kind, weighting),
        (ProfileKind::PoissonDeriv, Weighting::PoissonDerivative)
            | (ProfileKind::ScaledPoissonDeriv, Weighting::GeneralPhi)
            | (ProfileKind::GeneralPhi, Weighting::GeneralPhi)
    );
    if ok {
        Ok(())
    } else {
        Err(SquareError::WeightMismatch { kind, weighting })
    }
}

/// Radial square: integrate |u(s, ·)|² over scales at each site.
pub fn radial_square(p: &ConeProfile, weighting: Weighting) -> Result<SquareField, SquareError> {
    check_weighting(p.kind, weighting)?;
    let n = p.grid.n;
    let m = p.grid.mat_len();
    let mut square = SampledField::zeros(p.grid);
    square
        .data
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(site, acc)| {
            for (j, (eps, w)) in p.scales.iter().enumerate() {
                let coef = w * p.kind.factor(eps);
                accumulate_gram(acc, p.values[j].at(site), n, coef);
            }
        });
    Ok(SquareField::from_square(square))
}

/// Lattice offsets with |t| < radius (strict); always contains the center.
fn ball_offsets(grid: &GridSpec, radius: f64) -> Vec<[i64; 2]> {
    let h = grid.h();
    let kmax = (radius / h).ceil() as i64 - 1;
    let kmax = kmax.max(0);
    let mut out = Vec::new();
    match grid.d {
        1 => {
            for k in -kmax..=kmax {
                if (k as f64 * h).abs() < radius {
                    out.push([k, 0]);
                }
            }
        }
        _ => {
            for k0 in -kmax..=kmax {
                for k1 in -kmax..=kmax {
                    let r2 = ((k0 * k0 + k1 * k1) as f64).sqrt() * h;
                    if r2 < radius {
                        out.push([k0, k1]);
                    }
                }
            }
        }
    }
    if out.is_empty() {
        out.push([0, 0]);
    }
    out
}

/// Core cone sum: Σ_j coef_j ε_j^{−d} Σ_{|t|<radius_j} h^d |u(s+t, ε_j)|²,
/// with per-scale radius and coefficient supplied by the caller.
fn cone_sum(p: &ConeProfile, spec: &[(usize, f64, f64)]) -> SquareField {
    // spec entries: (scale index j, ball radius, dε/ε coefficient).
    let grid = p.grid;
    let n = grid.n;
    let m = grid.mat_len();
    let hd = grid.cell();
    let nn = grid.nsamp as i64;
    let balls: Vec<Vec<[i64; 2]>> = spec
        .iter()
        .map(|&(_, radius, _)| ball_offsets(&grid, radius))
        .collect();
    let mut square = SampledField::zeros(grid);
    square
        .data
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(site, acc)| {
            let ax = grid.axes(site);
            for (b, &(j, _, coef)) in balls.iter().zip(spec.iter()) {
                let eps = p.scales.nodes[j];
                let c = coef * hd / eps.powi(grid.d as i32);
                let vals = &p.values[j];
                for t in b {
                    let a0 = (ax[0] as i64 + t[0]).rem_euclid(nn) as usize;
                    let a1 = (ax[1] as i64 + t[1]).rem_euclid(nn) as usize;
                    let s2 = grid.site([a0, a1]);
                    accumulate_gram(acc, vals.at(s2), n, c);
                }
            }
        });
    SquareField::from_square(square)
}

/// Conic square over the cone |t| < ε; the aperture flag records whether
/// the scale range is meant as the truncated cone or the full one.
pub fn conic_square(p: &ConeProfile, _mode: Aperture) -> SquareField {
    let spec: Vec<(usize, f64, f64)> = p
        .scales
        .iter()
        .enumerate()
        .map(|(j, (eps, w))| (j, eps, w * p.kind.factor(eps)))
        .collect();
    cone_sum(p, &spec)
}

/// Two-variable square families at truncation level eps ∈ [0, 1].
pub fn two_variable_square(
    p: &ConeProfile,
    kind: TwoVariableKind,
    eps: f64,
) -> Result<SquareField, SquareError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(SquareError::BadTruncation(eps));
    }
    match kind {
        TwoVariableKind::ShiftedBall | TwoVariableKind::HalfBall => {
            let spec: Vec<(usize, f64, f64)> = p
                .scales
                .iter()
                .enumerate()
                .filter(|&(_, (r, _))| r > eps)
                .map(|(j, (r, w))| {
                    let radius = match kind {
                        TwoVariableKind::ShiftedBall => r - 0.5 * eps,
                        _ => 0.5 * r,
                    };
                    (j, radius, w * p.kind.factor(r))
                })
                .collect();
            Ok(cone_sum(p, &spec))
        }
        TwoVariableKind::RadialWindow => {
            let n = p.grid.n;
            let m = p.grid.mat_len();
            let mut square = SampledField::zeros(p.grid);
            let picks: Vec<(usize, f64)> = p
                .scales
                .iter()
                .enumerate()
                .filter(|&(_, (r, _))| r > eps && r <= 2.0 / 3.0)
                .map(|(j, (r, w))| (j, w * p.kind.factor(r)))
                .collect();
            square
                .data
                .par_chunks_mut(m)
                .enumerate()
                .for_each(|(site, acc)| {
                    for &(j, coef) in &picks {
                        accumulate_gram(acc, p.values[j].at(site), n, coef);
                    }
                });
            Ok(SquareField::from_square(square))
        }
    }
}

/// Discrete squares from a dyadic quadruple: level sums of Φ_j ∗ f without
/// and with the lattice ball average.  Levels stop where 2^{−j} < h.
pub fn discrete_squares(
    f: &SampledField,
    q: &TestQuadruple,
) -> Result<(SquareField, SquareField), SquareError> {
    if q.variant != crate::quadruple::ResolutionVariant::Discrete {
        return Err(SquareError::NotDiscrete);
    }
    let scales = ScaleGrid::dyadic_for(&f.grid);
    let p = cone_profile_band(f, q, &scales);
    let radial = radial_square(&p, Weighting::GeneralPhi)?;
    let conic = conic_square(&p, Aperture::Local);
    Ok((radial, conic))
}

/// Embedding into the strip-plus-low-pass pair: the first component is the
/// strip field v(s, ε) = ε·∂/∂ε P_ε f(s) (cone translation applied lazily
/// by the cone sums), the second is the unit-scale Poisson average.
pub fn embed_e(f: &SampledField, scales: &ScaleGrid) -> (ConeProfile, SampledField) {
    let mut p = cone_profile(f, Kernel::DPoisson, scales);
    for (j, eps) in p.scales.nodes.clone().iter().enumerate() {
        p.values[j] = p.values[j].scale(Complex64::new(*eps, 0.0));
    }
    p.kind = ProfileKind::ScaledPoissonDeriv;
    (p, crate::kernels::poisson_star(f))
}

/// Retraction: pair the strip field against the Poisson derivative across
/// scales (weight 4 ε dε) and complete with the low-pass pair P + 4π I(P)
/// at unit scale.  Left-inverts the embedding up to scale-quadrature error.
pub fn retract_f(p: &ConeProfile, low: &SampledField) -> Result<SampledField, SquareError> {
    if p.kind != ProfileKind::ScaledPoissonDeriv {
        return Err(SquareError::KindMismatch(p.kind));
    }
    if p.grid != low.grid {
        return Err(SquareError::GridMismatch);
    }
    let grid = p.grid;
    let m = grid.mat_len();
    let mut acc = crate::fft::forward(low);
    // Low-pass completion (P + 4π·half-Laplacian of P) at unit scale,
    // applied to the stored Poisson average.
    for site in 0..grid.sites() {
        let r = grid.xi_norm(site);
        let sym = Kernel::Poisson.symbol(r, 1.0)
            + 4.0 * std::f64::consts::PI * Kernel::RieszPoisson.symbol(r, 1.0);
        for z in &mut acc.data[site * m..(site + 1) * m] {
            *z *= sym;
        }
    }
    for (j, (eps, w)) in p.scales.iter().enumerate() {
        let vhat = crate::fft::forward(&p.values[j]);
        let coef = 4.0 * w * eps;
        for site in 0..grid.sites() {
            let sym = coef * Kernel::DPoisson.symbol(grid.xi_norm(site), eps);
            for (a, v) in acc.data[site * m..(site + 1) * m]
                .iter_mut()
                .zip(&vhat.data[site * m..(site + 1) * m])
            {
                *a += sym * v;
            }
        }
    }
    Ok(crate::fft::inverse(&acc))
}
