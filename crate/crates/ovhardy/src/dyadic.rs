//! Shifted dyadic structure on the periodized box: d+1 filtrations whose
//! negative levels are offset so that every moderate cube is covered by a
//! comparable dyadic cube from one of the systems, conditional
//! expectations, atom validation and generation, and a constructive
//! atomic decomposition of grid fields into scaled atoms.
//!
//! System i uses the base shift α^i = (2i + 1)/6; level j cubes are the
//! half-open boxes (α_j^i + m·2^{−j}, α_j^i + (m+1)·2^{−j}] per axis.
//! Pairwise shift differences are ±1/3-type, never dyadic, so at every
//! level of side 2^{−j} ≤ 1 the boundary grids of distinct systems stay a
//! third of the scale apart — a cube straddling one system's line is
//! clear of the others at the same level.  For j ≥ 0 every system keeps
//! its base shift, so the levels nest; for j < 0 the shift moves by
//! ±(1/3)-type offsets so that boundary lines of successive coarse levels
//! interleave instead of accumulating.

use crate::cubes::{box_filter_axis, Cube};
use crate::field::{FieldError, GridSpec, SampledField};
use crate::io::OvfError;
use crate::mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DyadicError {
    #[error("level {level} outside the filtration range [{min}, {max}]")]
    LevelOutOfRange { level: i32, min: i32, max: i32 },
    #[error("cube extends outside the box")]
    CubeOutsideBox,
    #[error("no dyadic cover inside the box for a cube of side {side} (box too small)")]
    CoverExhausted { side: f64 },
    #[error("cube volume {0} exceeds 1, not admissible for atoms")]
    CubeTooLarge(f64),
    #[error("field mass {0:.3e} within the seam margin; decomposition needs interior support")]
    SupportNearSeam(f64),
    #[error("degenerate atom: zero mass on the cube")]
    DegenerateAtom,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ovf(#[from] OvfError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// One shifted dyadic filtration over a grid's box.
#[derive(Debug, Clone)]
pub struct DyadicFiltration {
    pub grid: GridSpec,
    /// System index i ∈ {0, …, d}.
    pub system: usize,
    /// Base shift α^i ∈ (0, 1).
    pub alpha: f64,
    /// Coarsest level (side 2^{−min_level} = half the box).
    pub min_level: i32,
    /// Finest level (side = the lattice spacing).
    pub max_level: i32,
}

/// The d+1 filtrations of the covering lemma for this grid.
pub fn filtrations(grid: &GridSpec) -> Vec<DyadicFiltration> {
    let min_level = 1 - grid.l.log2().round() as i32;
    let max_level = (grid.nsamp as f64 / grid.l).log2().round() as i32;
    (0..=grid.d)
        .map(|i| DyadicFiltration {
            grid: *grid,
            system: i,
            alpha: (2 * i + 1) as f64 / 6.0,
            min_level,
            max_level,
        })
        .collect()
}

impl DyadicFiltration {
    /// Per-level shift: the base shift for j ≥ 0, offset at coarse levels
    /// so boundary lines of different j < 0 interleave.
    pub fn shift(&self, j: i32) -> f64 {
        if j >= 0 {
            self.alpha
        } else if (-j) % 2 == 0 {
            self.alpha + (0.5f64.powi(j) - 1.0) / 3.0
        } else {
            self.alpha - (0.5f64.powi(j) + 1.0) / 3.0
        }
    }

    pub fn side(&self, j: i32) -> f64 {
        0.5f64.powi(j)
    }

    /// Cubes per axis once periodized: L / 2^{−j}.
    pub fn count(&self, j: i32) -> i64 {
        (self.grid.l * 2f64.powi(j)).round() as i64
    }

    /// Unwrapped index of the level-j cube containing coordinate x:
    /// the unique m with x ∈ (shift + m·2^{−j}, shift + (m+1)·2^{−j}].
    pub fn locate(&self, x: f64, j: i32) -> i64 {
        ((x - self.shift(j)) / self.side(j)).ceil() as i64 - 1
    }

    /// Half-open interval (a, b] of the level-j cube with index m.
    pub fn interval(&self, m: i64, j: i32) -> (f64, f64) {
        let s = self.side(j);
        let a = self.shift(j) + m as f64 * s;
        (a, a + s)
    }

    /// Flat periodized cube id of a site at level j.
    pub fn cube_id(&self, site: usize, j: i32) -> usize {
        let pos = self.grid.position(site);
        let c = self.count(j);
        let mut id = self.locate(pos[0], j).rem_euclid(c);
        if self.grid.d == 2 {
            id += c * self.locate(pos[1], j).rem_euclid(c);
        }
        id as usize
    }

    fn check_level(&self, j: i32) -> Result<(), DyadicError> {
        if j < self.min_level || j > self.max_level {
            return Err(DyadicError::LevelOutOfRange {
                level: j,
                min: self.min_level,
                max: self.max_level,
            });
        }
        Ok(())
    }
}

/// Averages f over every level-j cube of the filtration: piecewise
/// constant, idempotent, trace-preserving, and positivity-preserving.
pub fn conditional_expectation(
    f: &SampledField,
    filt: &DyadicFiltration,
    j: i32,
) -> Result<SampledField, DyadicError> {
    filt.check_level(j)?;
    if f.grid != filt.grid {
        return Err(DyadicError::Field(FieldError::GridMismatch));
    }
    let grid = f.grid;
    let block = grid.mat_len();
    let c = filt.count(j) as usize;
    let ids: Vec<usize> = (0..grid.sites()).map(|s| filt.cube_id(s, j)).collect();
    let ncubes = if grid.d == 2 { c * c } else { c };
    let mut sums = vec![Complex64::ZERO; ncubes * block];
    let mut counts = vec![0usize; ncubes];
    for (s, &id) in ids.iter().enumerate() {
        counts[id] += 1;
        let src = f.at(s);
        let dst = &mut sums[id * block..(id + 1) * block];
        for (d, v) in dst.iter_mut().zip(src) {
            *d += v;
        }
    }
    let mut out = SampledField::zeros(grid);
    for (s, &id) in ids.iter().enumerate() {
        let inv = 1.0 / counts[id] as f64;
        let src = &sums[id * block..(id + 1) * block];
        for (d, v) in out.at_mut(s).iter_mut().zip(src) {
            *d = inv * v;
        }
    }
    Ok(out)
}

/// Window mean (1/|Q|)∫_{t+Q} f over the cube of the given side centered
/// at each site, by separable periodic box filters.
pub fn mean_function(f: &SampledField, side: f64) -> SampledField {
    let grid = f.grid;
    let block = grid.mat_len();
    let win = ((side / grid.h()).round() as usize).max(1);
    let mut data = box_filter_axis(&f.data, &grid, block, 0, win);
    let mut cells = win;
    if grid.d == 2 {
        data = box_filter_axis(&data, &grid, block, 1, win);
        cells *= win;
    }
    let inv = 1.0 / cells as f64;
    let mut out = SampledField::zeros(grid);
    out.data = data.into_iter().map(|z| inv * z).collect();
    out
}

/// A dyadic cube found to contain a query cube.
#[derive(Debug, Clone, Serialize)]
pub struct Cover {
    pub system: usize,
    pub level: i32,
    pub index: [i64; 2],
    pub side: f64,
    /// Volume ratio |D| / |Q|.
    pub ratio: f64,
}

/// Finds the smallest dyadic cube (over all systems, levels scanned from
/// the first side ≥ ℓ(Q) upward) that contains Q without crossing the
/// box seam.  Usually one of the first two levels succeeds; positions
/// straddling boundary lines of every system at those levels fall through
/// to coarser levels, which is what bounds the covering constant.
pub fn cover_cube(q: &Cube, systems: &[DyadicFiltration]) -> Result<Cover, DyadicError> {
    let grid = systems
        .first()
        .expect("at least one dyadic system")
        .grid;
    let half = grid.l / 2.0;
    for axis in 0..grid.d {
        if q.center[axis].abs() + q.side / 2.0 > half + 1e-9 {
            return Err(DyadicError::CubeOutsideBox);
        }
    }
    let j0 = (-(q.side.log2().ceil()) as i32).min(systems[0].max_level);
    let vol_q = q.volume(grid.d);
    for j in (systems[0].min_level..=j0).rev() {
        for f in systems {
            let side = f.side(j);
            let tol = 1e-9 * side;
            let mut index = [0i64; 2];
            let mut ok = true;
            for axis in 0..grid.d {
                let m = f.locate(q.center[axis], j);
                let (a, b) = f.interval(m, j);
                let lo = q.center[axis] - q.side / 2.0;
                let hi = q.center[axis] + q.side / 2.0;
                if lo < a - tol || hi > b + tol || a < -half - tol || b > half + tol {
                    ok = false;
                    break;
                }
                index[axis] = m;
            }
            if ok {
                return Ok(Cover {
                    system: f.system,
                    level: j,
                    index,
                    side,
                    ratio: side.powi(grid.d as i32) / vol_q,
                });
            }
        }
    }
    Err(DyadicError::CoverExhausted { side: q.side })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomKind {
    Unit,
    Small,
}

/// A normalized building block supported on one cube.
#[derive(Debug, Clone)]
pub struct Atom {
    pub field: SampledField,
    pub cube: Cube,
    pub kind: AtomKind,
}

fn kind_of(side: f64) -> AtomKind {
    if side >= 1.0 - 1e-12 {
        AtomKind::Unit
    } else {
        AtomKind::Small
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomReport {
    pub support_ok: bool,
    /// L₂ mass tr(∫|a|²)^{1/2} and its admissible bound |Q|^{−1/2}.
    pub size: f64,
    pub size_bound: f64,
    pub size_ok: bool,
    /// Frobenius norm of the matrix mean ∫_Q a — only constrained for
    /// cubes of volume < 1.
    pub mean_defect: f64,
    pub mean_ok: bool,
    pub pass: bool,
}

/// Checks the three atom conditions: support inside the cube (to lattice
/// cell resolution), normalized size, and — for small cubes — zero mean.
pub fn validate_atom(a: &SampledField, q: &Cube) -> Result<AtomReport, DyadicError> {
    let grid = a.grid;
    let vol = q.volume(grid.d);
    if vol > 1.0 + 1e-12 {
        return Err(DyadicError::CubeTooLarge(vol));
    }
    let reach = q.side / 2.0 + grid.h() / 2.0 + 1e-9;
    let mut support_ok = true;
    'sites: for s in 0..grid.sites() {
        let entry = a.at(s).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if entry < 1e-12 {
            continue;
        }
        let pos = grid.position(s);
        for axis in 0..grid.d {
            if (pos[axis] - q.center[axis]).abs() > reach {
                support_ok = false;
                break 'sites;
            }
        }
    }
    let size = a.l2_sq().sqrt();
    let size_bound = 1.0 / vol.sqrt();
    let size_ok = size <= size_bound * (1.0 + 1e-9);
    let n = grid.n;
    let mut mean = vec![Complex64::ZERO; grid.mat_len()];
    for s in 0..grid.sites() {
        for (m, v) in mean.iter_mut().zip(a.at(s)) {
            *m += v;
        }
    }
    let cell = grid.cell();
    let mean_defect = mat::frobenius_sq(
        &mean.iter().map(|z| cell * z).collect::<Vec<_>>(),
        n,
    )
    .sqrt();
    let mean_ok = match kind_of(q.side) {
        AtomKind::Unit => true,
        AtomKind::Small => mean_defect <= 1e-10 * (1.0 + size),
    };
    Ok(AtomReport {
        support_ok,
        size,
        size_bound,
        size_ok,
        mean_defect,
        mean_ok,
        pass: support_ok && size_ok && mean_ok,
    })
}

/// Random atom on the snapped window of Q: seeded entries, mean-subtracted
/// when the cube is small, then scaled so the size bound holds with
/// equality.
pub fn make_random_atom(grid: GridSpec, q: &Cube, seed: u64) -> Result<Atom, DyadicError> {
    let vol = q.volume(grid.d);
    if vol > 1.0 + 1e-12 {
        return Err(DyadicError::CubeTooLarge(vol));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = q.sites(&grid);
    let block = grid.mat_len();
    let mut f = SampledField::zeros(grid);
    for &s in &sites {
        for v in f.at_mut(s) {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    if kind_of(q.side) == AtomKind::Small {
        let mut mean = vec![Complex64::ZERO; block];
        for &s in &sites {
            for (m, v) in mean.iter_mut().zip(f.at(s)) {
                *m += v;
            }
        }
        let inv = 1.0 / sites.len() as f64;
        for &s in &sites {
            for (v, m) in f.at_mut(s).iter_mut().zip(&mean) {
                *v -= inv * m;
            }
        }
    }
    let size = f.l2_sq().sqrt();
    if size <= 0.0 {
        return Err(DyadicError::DegenerateAtom);
    }
    let field = f.scale(Complex64::new(1.0 / (size * vol.sqrt()), 0.0));
    Ok(Atom {
        field,
        cube: *q,
        kind: kind_of(q.side),
    })
}

/// A finite atomic representation f = Σ λ_j a_j on the grid.
#[derive(Debug)]
pub struct Decomposition {
    pub terms: Vec<(f64, Atom)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    lambda: f64,
    center: [f64; 2],
    side: f64,
    kind: String,
    file: String,
}

impl Decomposition {
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|(l, _)| l).sum()
    }

    pub fn reconstruct(&self, grid: GridSpec) -> Result<SampledField, DyadicError> {
        let mut out = SampledField::zeros(grid);
        for (l, a) in &self.terms {
            out = out.add(&a.field.scale(Complex64::new(*l, 0.0)))?;
        }
        Ok(out)
    }

    /// Writes one field file per atom plus a JSON manifest naming them.
    pub fn export(&self, dir: &Path) -> Result<PathBuf, DyadicError> {
        std::fs::create_dir_all(dir)?;
        let mut entries = Vec::new();
        for (i, (l, a)) in self.terms.iter().enumerate() {
            let file = format!("atom_{i:04}.ovf1");
            crate::io::write_field(&dir.join(&file), &a.field)?;
            entries.push(ManifestEntry {
                lambda: *l,
                center: a.cube.center,
                side: a.cube.side,
                kind: match a.kind {
                    AtomKind::Unit => "unit".into(),
                    AtomKind::Small => "small".into(),
                },
                file,
            });
        }
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&entries)?)?;
        Ok(path)
    }
}

impl From<serde_json::Error> for DyadicError {
    fn from(e: serde_json::Error) -> Self {
        DyadicError::Io(e.into())
    }
}

/// Splits a field along system 0: unit-cube pieces of the level-0
/// expectation, martingale differences down to the level where cubes hold
/// four lattice points per axis, then per-cube residuals.  The scaled
/// atoms sum back to f exactly, and Σ|λ| is an upper bound for the atomic
/// norm.
pub fn atomic_decompose(f: &SampledField) -> Result<Decomposition, DyadicError> {
    let grid = f.grid;
    let peak = (0..grid.sites())
        .flat_map(|s| f.at(s).iter())
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let margin = 2.0;
    let mut seam_mass = 0.0f64;
    for s in 0..grid.sites() {
        let pos = grid.position(s);
        let near = (0..grid.d).any(|ax| pos[ax].abs() > grid.l / 2.0 - margin);
        if near {
            for z in f.at(s) {
                seam_mass = seam_mass.max(z.norm());
            }
        }
    }
    if seam_mass > 1e-12 * (1.0 + peak) {
        return Err(DyadicError::SupportNearSeam(seam_mass));
    }
    let sys = filtrations(&grid).remove(0);
    let k_stop = (sys.max_level - 2).max(0);
    let threshold = 1e-13 * (1.0 + f.l2_sq().sqrt());
    let mut terms = Vec::new();
    let mut push_pieces = |part: &SampledField, level: i32| -> Result<(), DyadicError> {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for s in 0..grid.sites() {
            groups.entry(sys.cube_id(s, level)).or_default().push(s);
        }
        for sites in groups.values() {
            let mut piece = SampledField::zeros(grid);
            for &s in sites {
                piece.at_mut(s).copy_from_slice(part.at(s));
            }
            let l2 = piece.l2_sq().sqrt();
            if l2 <= threshold {
                continue;
            }
            let side = sys.side(level);
            let mut center = [0.0f64; 2];
            for axis in 0..grid.d {
                let m = sys.locate(grid.position(sites[0])[axis], level);
                let (a, b) = sys.interval(m, level);
                center[axis] = 0.5 * (a + b);
            }
            let cube = Cube { center, side };
            let lambda = l2 * cube.volume(grid.d).sqrt();
            let atom = Atom {
                field: piece.scale(Complex64::new(1.0 / lambda, 0.0)),
                cube,
                kind: kind_of(side),
            };
            terms.push((lambda, atom));
        }
        Ok(())
    };
    let mut prev = conditional_expectation(f, &sys, 0)?;
    push_pieces(&prev, 0)?;
    for j in 1..=k_stop {
        let next = conditional_expectation(f, &sys, j)?;
        push_pieces(&next.sub(&prev)?, j - 1)?;
        prev = next;
    }
    push_pieces(&f.sub(&prev)?, k_stop)?;
    Ok(Decomposition { terms })
}
