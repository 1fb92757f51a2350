//! Singular-kernel condition checker for Hilbert-space-valued kernels.
//!
//! A kernel here maps each lattice site s to a vector k(s) in the Hilbert
//! space H = ℓ₂(scale nodes, scale weights): component j lives at scale ε_j.
//! The checker reports three empirical constants — a spectral bound, a size
//! (decay) bound at |s| ≥ 1, and a Lipschitz-type smoothness bound over
//! sampled pairs — and passes when all of them sit below their caps.  These
//! are the conditions under which scale-vector convolution operators are
//! bounded on the whole range of exponents.

use crate::field::{GridSpec, SampledField};
use crate::scale::ScaleGrid;
use crate::sum::kahan_sum;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy)]
pub struct KernelCheckParams {
    /// Decay exponent: the size constant weighs ‖k(s)‖_H by |s|^{d+ρ}.
    pub rho: f64,
    /// Smoothness exponent in the pair bound ‖k(s−t)−k(s)‖_H·|s−t|^{d+γ}/|t|^γ.
    pub gamma: f64,
    /// Caps for [spectral, size, lipschitz]; all three must stay below.
    pub caps: [f64; 3],
}

impl Default for KernelCheckParams {
    fn default() -> Self {
        KernelCheckParams {
            rho: 0.5,
            gamma: 0.5,
            caps: [50.0, 10.0, 50.0],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// sup over grid frequencies of ‖k̂(ξ)‖_H.
    pub spectral_sup: f64,
    /// sup over |s| ≥ 1 of |s|^{d+ρ} ‖k(s)‖_H.
    pub size_sup: f64,
    /// sup over sampled pairs |s| > 2|t| of ‖k(s−t)−k(s)‖_H·|s−t|^{d+γ}/|t|^γ.
    pub lipschitz_sup: f64,
    pub pass: bool,
}

#[derive(Debug, Error)]
pub enum CzError {
    #[error("empty kernel sample set")]
    EmptySamples,
    #[error("sample length {got} does not match sites × scales = {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("kernel samples must be scalar (grid with n = 1), got n = {0}")]
    NotScalar(usize),
}

fn h_norm(v: &[Complex64], scales: &ScaleGrid) -> f64 {
    kahan_sum(
        v.iter()
            .zip(scales.weights.iter())
            .map(|(z, &w)| w * z.norm_sqr()),
    )
    .sqrt()
}

/// Geometric norm of the displacement of a site from the origin, on the
/// periodic box (coordinates live in [−L/2, L/2)).
fn site_norm(grid: &GridSpec, site: usize) -> f64 {
    let p = grid.position(site);
    match grid.d {
        1 => p[0].abs(),
        _ => (p[0] * p[0] + p[1] * p[1]).sqrt(),
    }
}

/// Check the three singular-kernel conditions for scalar kernel samples
/// `samples[site * m + j]`, j indexing the scale nodes.
pub fn cz_kernel_check(
    grid: &GridSpec,
    scales: &ScaleGrid,
    samples: &[Complex64],
    params: &KernelCheckParams,
) -> Result<ConditionReport, CzError> {
    if grid.n != 1 {
        return Err(CzError::NotScalar(grid.n));
    }
    let m = scales.len();
    let sites = grid.sites();
    if samples.is_empty() || m == 0 {
        return Err(CzError::EmptySamples);
    }
    if samples.len() != sites * m {
        return Err(CzError::LengthMismatch {
            got: samples.len(),
            want: sites * m,
        });
    }

    // Spectral constant: transform each scale slot, then take the H-norm
    // frequency by frequency.
    let mut hat = vec![Complex64::ZERO; sites * m];
    for j in 0..m {
        let mut slot = SampledField::zeros(*grid);
        for s in 0..sites {
            slot.data[s] = samples[s * m + j];
        }
        let f = crate::fft::forward(&slot);
        for s in 0..sites {
            hat[s * m + j] = f.data[s];
        }
    }
    let spectral_sup = (0..sites)
        .map(|s| h_norm(&hat[s * m..(s + 1) * m], scales))
        .fold(0.0f64, f64::max);

    // Size constant over |s| ≥ 1.
    let dr = grid.d as f64 + params.rho;
    let size_sup = (0..sites)
        .filter(|&s| site_norm(grid, s) >= 1.0)
        .map(|s| site_norm(grid, s).powf(dr) * h_norm(&samples[s * m..(s + 1) * m], scales))
        .fold(0.0f64, f64::max);

    // Smoothness constant over a deterministic subsample of pairs (s, t)
    // with |s| > 2|t|; s is kept inside |s| ≤ 0.4L so s − t stays on the
    // same geometric sheet of the periodic box.
    let n = grid.nsamp;
    let stride_s = (n / 64).max(1);
    let stride_t = (n / 128).max(1);
    let t_max = 0.1 * grid.l;
    let dg = grid.d as f64 + params.gamma;
    let mut lipschitz_sup = 0.0f64;
    let t_range: Vec<i64> = {
        let k = (t_max / grid.h()).floor() as i64;
        (-k..=k).filter(|&v| v != 0 && (v.unsigned_abs() as usize) % stride_t == 0 || v.abs() == 1)
            .collect()
    };
    for s in (0..sites).step_by(stride_s) {
        let ns = site_norm(grid, s);
        if !(1.0..=0.4 * grid.l).contains(&ns) {
            continue;
        }
        let ax = grid.axes(s);
        let mut diff = vec![Complex64::ZERO; m];
        let mut consider = |shift: [i64; 2], nt: f64| {
            if ns <= 2.0 * nt {
                return;
            }
            let wrap = |a: usize, dlt: i64| -> usize {
                (a as i64 - dlt).rem_euclid(n as i64) as usize
            };
            let st = grid.site([wrap(ax[0], shift[0]), wrap(ax[1], shift[1])]);
            for j in 0..m {
                diff[j] = samples[st * m + j] - samples[s * m + j];
            }
            let p = grid.position(s);
            let q = [
                p[0] - shift[0] as f64 * grid.h(),
                p[1] - shift[1] as f64 * grid.h(),
            ];
            let nst = match grid.d {
                1 => q[0].abs(),
                _ => (q[0] * q[0] + q[1] * q[1]).sqrt(),
            };
            let val = h_norm(&diff, scales) * nst.powf(dg) / nt.powf(params.gamma);
            if val > lipschitz_sup {
                lipschitz_sup = val;
            }
        };
        match grid.d {
            1 => {
                for &t in &t_range {
                    consider([t, 0], (t.abs() as f64) * grid.h());
                }
            }
            _ => {
                for &t0 in &t_range {
                    for &t1 in &t_range {
                        let nt = ((t0 * t0 + t1 * t1) as f64).sqrt() * grid.h();
                        if nt <= t_max {
                            consider([t0, t1], nt);
                        }
                    }
                }
            }
        }
    }

    let pass = spectral_sup < params.caps[0]
        && size_sup < params.caps[1]
        && lipschitz_sup < params.caps[2];
    Ok(ConditionReport {
        spectral_sup,
        size_sup,
        lipschitz_sup,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadruple::RadialProfile;

    fn grid() -> GridSpec {
        GridSpec::new(1, 1, 32.0, 256).unwrap()
    }

    /// Spatial samples of the dilated family ε ↦ Φ_ε by spectral synthesis.
    fn dilated_family(g: &GridSpec, scales: &ScaleGrid, gen: RadialProfile) -> Vec<Complex64> {
        let m = scales.len();
        let mut out = vec![Complex64::ZERO; g.sites() * m];
        for (j, (eps, _)) in scales.iter().enumerate() {
            let mut hat = crate::field::SpectralField::zeros(*g);
            for s in 0..g.sites() {
                hat.data[s] = Complex64::new(gen.eval(eps * g.xi_norm(s)), 0.0);
            }
            let k = crate::fft::inverse(&hat);
            for s in 0..g.sites() {
                out[s * m + j] = k.data[s];
            }
        }
        out
    }

    #[test]
    fn smooth_decaying_family_passes() {
        let g = grid();
        let scales = ScaleGrid::local(&g, 16);
        let samples = dilated_family(&g, &scales, RadialProfile::GaussianLaplacian);
        let r = cz_kernel_check(&g, &scales, &samples, &KernelCheckParams::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.spectral_sup > 0.0 && r.spectral_sup.is_finite());
        assert!(r.size_sup.is_finite() && r.lipschitz_sup.is_finite());
    }

    #[test]
    fn zero_kernel_has_zero_constants() {
        let g = grid();
        let scales = ScaleGrid::local(&g, 8);
        let samples = vec![Complex64::ZERO; g.sites() * scales.len()];
        let r = cz_kernel_check(&g, &scales, &samples, &KernelCheckParams::default()).unwrap();
        assert_eq!(r.spectral_sup, 0.0);
        assert_eq!(r.size_sup, 0.0);
        assert_eq!(r.lipschitz_sup, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn slow_decay_fails_the_size_bound() {
        // k(s) = (1+|s|)^{−d/2}, constant across scales: |s|^{d+ρ}‖k(s)‖_H
        // grows like |s|^{d/2+ρ}·‖1‖_H and tops the cap at the box edge.
        let g = grid();
        let scales = ScaleGrid::local(&g, 16);
        let m = scales.len();
        let mut samples = vec![Complex64::ZERO; g.sites() * m];
        for s in 0..g.sites() {
            let v = (1.0 + site_norm(&g, s)).powf(-0.5 * g.d as f64);
            for j in 0..m {
                samples[s * m + j] = Complex64::new(v, 0.0);
            }
        }
        let r = cz_kernel_check(&g, &scales, &samples, &KernelCheckParams::default()).unwrap();
        assert!(!r.pass, "{r:?}");
        assert!(r.size_sup >= 10.0, "size {}", r.size_sup);
        assert!(r.lipschitz_sup.is_finite());
    }

    #[test]
    fn empty_and_mismatched_inputs_are_rejected() {
        let g = grid();
        let scales = ScaleGrid::local(&g, 8);
        assert!(matches!(
            cz_kernel_check(&g, &scales, &[], &KernelCheckParams::default()),
            Err(CzError::EmptySamples)
        ));
        let short = vec![Complex64::ZERO; 5];
        assert!(matches!(
            cz_kernel_check(&g, &scales, &short, &KernelCheckParams::default()),
            Err(CzError::LengthMismatch { .. })
        ));
    }
}
