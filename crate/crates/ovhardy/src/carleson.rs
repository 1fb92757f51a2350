//! Tents over cubes and Carleson-type functionals of positive strip
//! measures, the pointwise exponent-q majorant check, and tent-space
//! norms.
//!
//! A cone profile together with its kind label describes a positive
//! operator-valued measure on the strip: the Poisson-derivative kind
//! carries the density |∂_ε P_ε f|² ε dsdε, the general kinds carry
//! |Φ_ε∗f|² dsdε/ε.  Tent integrals reuse the kind's scale factor against
//! the shared dε/ε quadrature, so every functional here agrees with the
//! square-function plumbing node by node.

use crate::cubes::{family_sup, Cube, CubeFamily, CubeKind};
use crate::field::{FieldError, SampledField};
use crate::kernels::Kernel;
use crate::mat::{self, herm_max_eig};
use crate::scale::ScaleGrid;
use crate::square::{
    accumulate_gram, check_weighting, cone_profile, conic_square, Aperture, ConeProfile,
    SquareError, Weighting,
};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CarlesonError {
    #[error("exponent {0} not admissible here")]
    BadExponent(f64),
    #[error("majorant is not positive semidefinite at site {site}")]
    NotPsd { site: usize },
    #[error(transparent)]
    Square(#[from] SquareError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Region Q × (0, ℓ(Q)] resolved against a scale grid: the cube plus the
/// indices of the nodes with ε_j ≤ ℓ(Q).
#[derive(Debug, Clone)]
pub struct Tent {
    pub cube: Cube,
    pub levels: Vec<usize>,
}

impl Tent {
    pub fn over(cube: Cube, scales: &ScaleGrid) -> Self {
        let levels = scales
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, &e)| e <= cube.side)
            .map(|(i, _)| i)
            .collect();
        Tent { cube, levels }
    }
}

/// Un-normalized tent integral ∫_{T(Q)} dλ of the profile's measure — a
/// Hermitian PSD matrix.
pub fn tent_integral(p: &ConeProfile, tent: &Tent) -> Vec<Complex64> {
    let grid = p.grid;
    let n = grid.n;
    let mut acc = vec![Complex64::ZERO; grid.mat_len()];
    let sites = tent.cube.sites(&grid);
    for &j in &tent.levels {
        let eps = p.scales.nodes[j];
        let coef = grid.cell() * p.scales.weights[j] * p.kind.factor(eps);
        let v = &p.values[j];
        for &s in &sites {
            accumulate_gram(&mut acc, v.at(s), n, coef);
        }
    }
    acc
}

fn normalized_tent_value(p: &ConeProfile, q: &Cube) -> f64 {
    let x = tent_integral(p, &Tent::over(*q, &p.scales));
    herm_max_eig(&x, p.grid.n).max(0.0) / q.volume(p.grid.d)
}

/// Carleson functional N(λ) = sup over |Q| < 1 of (1/|Q|)·‖∫_{T(Q)} dλ‖.
/// The weighting label must match the profile kind's measure convention.
pub fn carleson_functional(
    p: &ConeProfile,
    family: &CubeFamily,
    weighting: Weighting,
) -> Result<f64, CarlesonError> {
    check_weighting(p.kind, weighting)?;
    let small = CubeFamily {
        cubes: family
            .cubes
            .iter()
            .copied()
            .filter(|q| q.side < 1.0)
            .collect(),
        kind: family.kind,
    };
    Ok(family_sup(&small, |q| normalized_tent_value(p, q)))
}

/// Smallest eigenvalue-split domination data of X against a ⪰ 0: the mass
/// of X outside range(a) and the least C with X ⪯ C·a on the range.
fn domination_stats(x: &[Complex64], a: &[Complex64], n: usize) -> (f64, f64) {
    let (avals, avecs) = mat::hermitian_eig(a, n);
    let top = avals.last().copied().unwrap_or(0.0).max(0.0);
    let floor = top * mat::EIG_CLAMP;
    // X in the eigenbasis of a.
    let y = mat::mul(&mat::adjoint(&avecs, n), &mat::mul(x, &avecs, n), n);
    let null: Vec<usize> = (0..n).filter(|&i| avals[i] <= floor).collect();
    let range: Vec<usize> = (0..n).filter(|&i| avals[i] > floor).collect();
    let sub = |idx: &[usize], scale: bool| -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        let m = idx.len();
        let mut s = vec![Complex64::ZERO; m * m];
        for (ii, &i) in idx.iter().enumerate() {
            for (jj, &j) in idx.iter().enumerate() {
                let mut z = y[i * n + j];
                if scale {
                    z /= (avals[i] * avals[j]).sqrt();
                }
                s[ii * m + jj] = z;
            }
        }
        herm_max_eig(&s, m).max(0.0)
    };
    (sub(&null, false), sub(&range, true))
}

/// Outcome of the pointwise tent-average domination test.
#[derive(Debug, Clone, Serialize)]
pub struct MajorantReport {
    pub pass: bool,
    /// Largest C with (1/|Q|)∫_{T(Q)} dλ_g ⪯ C·a(s) needed over all
    /// in-range pairs (cube, site).
    pub constant: f64,
    /// Largest tent-average mass found outside the range of a(s).
    pub max_violation: f64,
    /// Absolute allowance for off-range mass (a small multiple of the
    /// largest tent average, so quadrature dust cannot fail the check).
    pub floor: f64,
    pub cubes: usize,
    pub sites: usize,
}

/// Checks (1/|Q|)∫_{T(Q)} |∂_ε P_ε(g)|² ε dtdε ⪯ C·a(s) for every small
/// cube Q and every s ∈ Q, in the PSD order.
pub fn q_carleson_majorant_check(
    g: &SampledField,
    q: f64,
    a: &SampledField,
) -> Result<MajorantReport, CarlesonError> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(CarlesonError::BadExponent(q));
    }
    if a.grid != g.grid {
        return Err(CarlesonError::Field(FieldError::GridMismatch));
    }
    let grid = g.grid;
    let n = grid.n;
    for s in 0..grid.sites() {
        let m = a.at(s);
        let mut herm_defect = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm_defect = herm_defect.max((m[i * n + j] - m[j * n + i].conj()).norm());
                scale = scale.max(m[i * n + j].norm());
            }
        }
        let min_eig = -herm_max_eig(&m.iter().map(|z| -*z).collect::<Vec<_>>(), n);
        if herm_defect > 1e-10 * (1.0 + scale) || min_eig < -1e-10 * (1.0 + scale) {
            return Err(CarlesonError::NotPsd { site: s });
        }
    }
    let scales = ScaleGrid::local(&grid, 32);
    let profile = cone_profile(g, Kernel::DPoisson, &scales);
    let family = CubeFamily::standard(&grid, CubeKind::Small, false);
    let tents: Vec<(Vec<Complex64>, Vec<usize>)> = family
        .cubes
        .iter()
        .map(|qc| {
            let x = tent_integral(&profile, &Tent::over(*qc, &scales));
            let vol = qc.volume(grid.d);
            (
                x.iter().map(|z| z / vol).collect(),
                qc.sites(&grid),
            )
        })
        .collect();
    let top = tents
        .iter()
        .map(|(x, _)| herm_max_eig(x, n).max(0.0))
        .fold(0.0f64, f64::max);
    let floor = 1e-8 * top;
    let mut max_violation = 0.0f64;
    let mut constant = 0.0f64;
    let mut sites = 0usize;
    for (x, cube_sites) in &tents {
        for &s in cube_sites {
            let (leak, c) = domination_stats(x, a.at(s), n);
            max_violation = max_violation.max(leak);
            constant = constant.max(c);
            sites += 1;
        }
    }
    Ok(MajorantReport {
        pass: max_violation <= floor,
        constant,
        max_violation,
        floor,
        cubes: family.cubes.len(),
        sites,
    })
}

/// Tent-space norm of a strip function: p < ∞ gives ‖A^c(h)‖_p with the
/// cone aggregation A^c(h)(s)² = ∫∫_Γ̃ |h(s+t,ε)|² dtdε/ε^{d+1}; p = ∞
/// takes the sup over cubes |Q| ≤ 1 of the normalized tent integrals.
pub fn tent_norms(h: &ConeProfile, p: f64) -> Result<f64, CarlesonError> {
    if p.is_infinite() {
        let family = CubeFamily::standard(&h.grid, CubeKind::All, false);
        return Ok(family_sup(&family, |q| {
            normalized_tent_value(h, q).sqrt()
        }));
    }
    Ok(conic_square(h, Aperture::Local).root.lp_norm(p)?)
}

/// Strip pairing Σ_j w_j factor_j h^d Σ_s tr(u_j(s) v_j(s)*) — the
/// discrete ∫∫ tr(h k*) dsdε/ε, with each profile contributing its kind's
/// scale factor linearly (so two Poisson-derivative profiles pair with
/// ε², matching the ε dsdε ⊗ ε dsdε split of the quadratic forms).
pub fn tent_pairing(h: &ConeProfile, k: &ConeProfile) -> Result<Complex64, CarlesonError> {
    if h.grid != k.grid {
        return Err(CarlesonError::Field(FieldError::GridMismatch));
    }
    if h.scales != k.scales {
        return Err(CarlesonError::Square(SquareError::GridMismatch));
    }
    let grid = h.grid;
    let n = grid.n;
    let mut acc = Complex64::ZERO;
    for (j, (&eps, &w)) in h.scales.nodes.iter().zip(&h.scales.weights).enumerate() {
        let coef = grid.cell() * w * (h.kind.factor(eps) * k.kind.factor(eps)).sqrt();
        let (u, v) = (&h.values[j], &k.values[j]);
        let mut level = Complex64::ZERO;
        for s in 0..grid.sites() {
            let (us, vs) = (u.at(s), v.at(s));
            for r in 0..n {
                for c in 0..n {
                    level += us[r * n + c] * vs[r * n + c].conj();
                }
            }
        }
        acc += coef * level;
    }
    Ok(acc)
}

/// One diagnostic row per cube: center, side, and the normalized tent
/// value of the profile's measure on that cube.
pub fn tent_csv(p: &ConeProfile, family: &CubeFamily) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["center0", "center1", "side", "value"])?;
    for q in &family.cubes {
        let v = normalized_tent_value(p, q);
        w.write_record([
            format!("{:.6}", q.center[0]),
            format!("{:.6}", q.center[1]),
            format!("{:.6}", q.side),
            format!("{v:.12e}"),
        ])?;
    }
    let bytes = w.into_inner().expect("in-memory writer");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
