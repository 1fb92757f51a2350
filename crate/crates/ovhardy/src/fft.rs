//! Discrete Fourier transforms matching the continuum normalization.
//!
//! Forward: f̂(ξ_k) = h^d Σ_m f(s_m) e^{−2πi s_m·ξ_k} with s_m = −L/2 + mh
//! and ξ_k = k/L, which reduces to the plain FFT times h^d(−1)^{Σ idx}
//! (N is even, so the integer frequency k and its storage index agree mod 2).
//! Inverse: f(s_m) = L^{−d} Σ_k f̂(ξ_k) e^{2πi s_m·ξ_k}; the two compose to
//! the identity exactly, and Plancherel reads h^dΣ|f|² = L^{−d}Σ|f̂|².

use crate::field::{GridSpec, SampledField, SpectralField};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().unwrap();
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

/// In-place unnormalized DFT along every axis of one scalar lattice.
fn lattice_fft(buf: &mut [Complex64], grid: &GridSpec, inverse: bool) {
    let n = grid.nsamp;
    let fft = plan(n, inverse);
    match grid.d {
        1 => fft.process(buf),
        _ => {
            // Rows are contiguous in the [m0][m1] layout.
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            let mut tmp = vec![Complex64::ZERO; buf.len()];
            for i in 0..n {
                for j in 0..n {
                    tmp[j * n + i] = buf[i * n + j];
                }
            }
            for row in tmp.chunks_exact_mut(n) {
                fft.process(row);
            }
            for i in 0..n {
                for j in 0..n {
                    buf[i * n + j] = tmp[j * n + i];
                }
            }
        }
    }
}

#[inline]
fn checker_sign(grid: &GridSpec, site: usize) -> f64 {
    let ax = grid.axes(site);
    if (ax[0] + ax[1]) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Transform one matrix slot across all sites.
fn transform_slot(
    data: &[Complex64],
    grid: &GridSpec,
    slot: usize,
    forward: bool,
) -> Vec<Complex64> {
    let m = grid.mat_len();
    let sites = grid.sites();
    let mut buf: Vec<Complex64> = (0..sites).map(|s| data[s * m + slot]).collect();
    if forward {
        lattice_fft(&mut buf, grid, false);
        let scale = grid.cell();
        for (s, z) in buf.iter_mut().enumerate() {
            *z *= scale * checker_sign(grid, s);
        }
    } else {
        let scale = 1.0 / grid.l.powi(grid.d as i32);
        for (s, z) in buf.iter_mut().enumerate() {
            *z *= checker_sign(grid, s);
        }
        lattice_fft(&mut buf, grid, true);
        for z in buf.iter_mut() {
            *z *= scale;
        }
    }
    buf
}

fn run(data: &[Complex64], grid: GridSpec, forward: bool) -> Vec<Complex64> {
    let m = grid.mat_len();
    let sites = grid.sites();
    let slots: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|slot| transform_slot(data, &grid, slot, forward))
        .collect();
    let mut out = vec![Complex64::ZERO; sites * m];
    for (slot, col) in slots.iter().enumerate() {
        for s in 0..sites {
            out[s * m + slot] = col[s];
        }
    }
    out
}

/// Fourier coefficients of a sampled field.
pub fn forward(f: &SampledField) -> SpectralField {
    SpectralField {
        grid: f.grid,
        data: run(&f.data, f.grid, true),
    }
}

/// Samples of a coefficient field.
pub fn inverse(c: &SpectralField) -> SampledField {
    SampledField {
        grid: c.grid,
        data: run(&c.data, c.grid, false),
    }
}

/// Multiply each coefficient block by a scalar symbol evaluated per spectral
/// site (the site → ξ map is [`GridSpec::xi`]).
pub fn apply_symbol<F: Fn(&GridSpec, usize) -> Complex64 + Sync>(
    c: &SpectralField,
    symbol: F,
) -> SpectralField {
    let m = c.grid.mat_len();
    let grid = c.grid;
    let data: Vec<Complex64> = c
        .data
        .par_chunks(m)
        .enumerate()
        .flat_map_iter(|(s, block)| {
            let w = symbol(&grid, s);
            block.iter().map(move |z| w * z).collect::<Vec<_>>()
        })
        .collect();
    SpectralField { grid, data }
}
