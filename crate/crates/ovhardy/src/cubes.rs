//! Axis-parallel cubes snapped to the sampling lattice, finite cube
//! families for norm suprema, and cube moments (means, mean-subtracted
//! second moments) of matrix fields.
//!
//! A cube is stored by real center and side; every operation first snaps
//! it to the lattice: the center to the nearest site, the side to
//! m = max(1, round(ℓ/h)) points per axis.  Integrals are exact grid sums
//! over the snapped window, which removes interpolation ambiguity.  The
//! per-site "sharp" moments (cube centered at every site of a fixed side)
//! are computed by separable periodic box filters, so a full field of cube
//! moments costs O(N^d) per level instead of O(N^d · m^d).

use crate::field::{GridSpec, SampledField};
use num_complex::Complex64;
use rayon::prelude::*;

/// Axis-parallel cube with real center and side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cube {
    pub center: [f64; 2],
    pub side: f64,
}

impl Cube {
    pub fn volume(&self, d: usize) -> f64 {
        self.side.powi(d as i32)
    }

    /// Points per axis after snapping: max(1, round(ℓ/h)).
    pub fn points_per_axis(&self, grid: &GridSpec) -> usize {
        ((self.side / grid.h()).round() as usize).max(1)
    }

    /// Index of the first window point along `axis` (may be negative before
    /// wrapping): snapped center index minus half the window.
    fn anchor(&self, grid: &GridSpec, axis: usize) -> i64 {
        let h = grid.h();
        let ci = ((self.center[axis] + grid.l / 2.0) / h).round() as i64;
        ci - (self.points_per_axis(grid) / 2) as i64
    }

    /// Sites of the snapped window, wrapped periodically.
    pub fn sites(&self, grid: &GridSpec) -> Vec<usize> {
        let m = self.points_per_axis(grid) as i64;
        let nn = grid.nsamp as i64;
        let a0 = self.anchor(grid, 0);
        match grid.d {
            1 => (0..m)
                .map(|i| grid.site([(a0 + i).rem_euclid(nn) as usize, 0]))
                .collect(),
            _ => {
                let a1 = self.anchor(grid, 1);
                let mut out = Vec::with_capacity((m * m) as usize);
                for i in 0..m {
                    for j in 0..m {
                        out.push(grid.site([
                            (a0 + i).rem_euclid(nn) as usize,
                            (a1 + j).rem_euclid(nn) as usize,
                        ]));
                    }
                }
                out
            }
        }
    }
}

/// Which part of the cube scale range a family covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeKind {
    /// Dyadic sides 2^{−k} only (|Q| < 1).
    Small,
    /// Side exactly 1.
    Unit,
    /// Both.
    All,
}

/// Finite family of snapped cubes used for norm suprema.
#[derive(Debug, Clone)]
pub struct CubeFamily {
    pub cubes: Vec<Cube>,
    pub kind: CubeKind,
}

impl CubeFamily {
    /// Deepest small-cube level: sides go down to 2^{−K}, K = log₂(N/8).
    pub fn max_small_level(grid: &GridSpec) -> usize {
        (((grid.nsamp / 8).max(2) as f64).log2().round() as usize).max(1)
    }

    /// Family with centers on a stride subgrid: all unit cubes, plus small
    /// cubes of side 2^{−k} for k = 1..=K.
    pub fn with_stride(grid: &GridSpec, kind: CubeKind, stride: usize) -> Self {
        let stride = stride.max(1);
        let mut cubes = Vec::new();
        let centers: Vec<[f64; 2]> = (0..grid.sites())
            .filter(|&s| {
                let ax = grid.axes(s);
                (0..grid.d).all(|a| ax[a] % stride == 0)
            })
            .map(|s| grid.position(s))
            .collect();
        if matches!(kind, CubeKind::Small | CubeKind::All) {
            for k in 1..=Self::max_small_level(grid) {
                let side = 0.5f64.powi(k as i32);
                cubes.extend(centers.iter().map(|&c| Cube { center: c, side }));
            }
        }
        if matches!(kind, CubeKind::Unit | CubeKind::All) {
            cubes.extend(centers.iter().map(|&c| Cube {
                center: c,
                side: 1.0,
            }));
        }
        CubeFamily { cubes, kind }
    }

    /// Default family (stride 4); `refine` doubles the center density.
    pub fn standard(grid: &GridSpec, kind: CubeKind, refine: bool) -> Self {
        Self::with_stride(grid, kind, if refine { 2 } else { 4 })
    }

    /// Strided family with the given sides (used for |Q| ≥ 1 comparisons).
    pub fn with_sides(grid: &GridSpec, sides: &[f64], stride: usize) -> Self {
        let stride = stride.max(1);
        let mut cubes = Vec::new();
        for s in 0..grid.sites() {
            let ax = grid.axes(s);
            if !(0..grid.d).all(|a| ax[a] % stride == 0) {
                continue;
            }
            let c = grid.position(s);
            for &side in sides {
                cubes.push(Cube { center: c, side });
            }
        }
        CubeFamily {
            cubes,
            kind: CubeKind::All,
        }
    }
}

/// Mean value of f over the snapped cube (an n×n matrix).
pub fn cube_mean(f: &SampledField, q: &Cube) -> Vec<Complex64> {
    let grid = f.grid;
    let m = grid.mat_len();
    let sites = q.sites(&grid);
    let mut acc = vec![Complex64::ZERO; m];
    for &s in &sites {
        for (a, v) in acc.iter_mut().zip(f.at(s)) {
            *a += v;
        }
    }
    let inv = 1.0 / sites.len() as f64;
    for a in &mut acc {
        *a *= inv;
    }
    acc
}

/// ∫_Q |f − f_Q|² dt (or the raw ∫_Q |f|² with `subtract_mean` off) as an
/// exact grid sum h^d Σ (f−m)*(f−m); the result is PSD.
pub fn second_moment(f: &SampledField, q: &Cube, subtract_mean: bool) -> Vec<Complex64> {
    let grid = f.grid;
    let n = grid.n;
    let sites = q.sites(&grid);
    let mean = if subtract_mean {
        cube_mean(f, q)
    } else {
        vec![Complex64::ZERO; grid.mat_len()]
    };
    let mut acc = vec![Complex64::ZERO; grid.mat_len()];
    let mut diff = vec![Complex64::ZERO; grid.mat_len()];
    for &s in &sites {
        for ((d, v), mu) in diff.iter_mut().zip(f.at(s)).zip(&mean) {
            *d = v - mu;
        }
        for p in 0..n {
            for r in 0..n {
                let mut t = Complex64::ZERO;
                for k in 0..n {
                    t += diff[k * n + p].conj() * diff[k * n + r];
                }
                acc[p * n + r] += t;
            }
        }
    }
    let hd = grid.cell();
    for a in &mut acc {
        *a *= hd;
    }
    acc
}

/// Periodic moving-window sum along one axis of a site-indexed block array.
/// `win` points starting at offset −(win/2) relative to each site.
pub(crate) fn box_filter_axis(
    data: &[Complex64],
    grid: &GridSpec,
    block: usize,
    axis: usize,
    win: usize,
) -> Vec<Complex64> {
    let nn = grid.nsamp;
    let lead = (win / 2) as i64;
    let mut out = vec![Complex64::ZERO; data.len()];
    let lines: Vec<Vec<[usize; 2]>> = if grid.d == 1 {
        vec![(0..nn).map(|i| [i, 0]).collect()]
    } else {
        match axis {
            0 => (0..nn)
                .map(|fixed| (0..nn).map(|i| [i, fixed]).collect())
                .collect(),
            _ => (0..nn)
                .map(|fixed| (0..nn).map(|i| [fixed, i]).collect())
                .collect(),
        }
    };
    // Running sums along each periodic line (exact re-accumulation per site
    // keeps the result independent of the traversal origin).
    for line in &lines {
        for (pos, ax) in line.iter().enumerate() {
            let s = grid.site(*ax);
            for b in 0..block {
                let mut acc = Complex64::ZERO;
                for o in 0..win as i64 {
                    let idx = (pos as i64 - lead + o).rem_euclid(nn as i64) as usize;
                    let sn = grid.site(*line
                        .get(idx)
                        .expect("periodic line covers every index"));
                    acc += data[sn * block + b];
                }
                out[s * block + b] = acc;
            }
        }
    }
    out
}

/// Per-site cube moments at a fixed side: the field s ↦ (1/|Q|)∫_{Q(s)}
/// |f − f_{Q(s)}|² dt over snapped cubes centered at every site (raw |f|²
/// when `subtract_mean` is off).  Matches [`second_moment`] windows exactly.
pub fn sharp_field(f: &SampledField, side: f64, subtract_mean: bool) -> SampledField {
    let grid = f.grid;
    let n = grid.n;
    let m = grid.mat_len();
    let win = Cube {
        center: [0.0, 0.0],
        side,
    }
    .points_per_axis(&grid);
    // Gram field f*f at each site.
    let mut gram = vec![Complex64::ZERO; f.data.len()];
    gram.par_chunks_mut(m)
        .zip(f.data.par_chunks(m))
        .for_each(|(g, v)| {
            for p in 0..n {
                for r in 0..n {
                    let mut t = Complex64::ZERO;
                    for k in 0..n {
                        t += v[k * n + p].conj() * v[k * n + r];
                    }
                    g[p * n + r] = t;
                }
            }
        });
    let mut gsum = box_filter_axis(&gram, &grid, m, 0, win);
    let mut fsum = box_filter_axis(&f.data, &grid, m, 0, win);
    if grid.d == 2 {
        gsum = box_filter_axis(&gsum, &grid, m, 1, win);
        fsum = box_filter_axis(&fsum, &grid, m, 1, win);
    }
    let cnt = (win as f64).powi(grid.d as i32);
    let vol = side.powi(grid.d as i32);
    let scale = grid.cell() / vol;
    let mut out = SampledField::zeros(grid);
    out.data
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(s, dst)| {
            let g = &gsum[s * m..(s + 1) * m];
            let fs = &fsum[s * m..(s + 1) * m];
            for p in 0..n {
                for r in 0..n {
                    let mut t = g[p * n + r];
                    if subtract_mean {
                        // Σ(f−μ)*(f−μ) = Σf*f − (Σf)*(Σf)/count.
                        let mut corr = Complex64::ZERO;
                        for k in 0..n {
                            corr += fs[k * n + p].conj() * fs[k * n + r];
                        }
                        t -= corr / cnt;
                    }
                    dst[p * n + r] = scale * t;
                }
            }
        });
    out
}

/// Deterministic supremum of a per-cube statistic over a family: the values
/// are computed in parallel but reduced in index order.
pub fn family_sup<F: Fn(&Cube) -> f64 + Sync>(family: &CubeFamily, stat: F) -> f64 {
    let vals: Vec<f64> = family.cubes.par_iter().map(|q| stat(q)).collect();
    vals.into_iter().fold(0.0f64, f64::max)
}
