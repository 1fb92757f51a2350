//! Dense complex n×n matrix primitives for small n (the coefficient
//! algebra is n×n matrices, n ≤ 4 in practice).
//!
//! Matrices are row-major `&[Complex64]` slices of length n².  The only
//! nontrivial piece is a cyclic complex Jacobi eigensolver for Hermitian
//! matrices; everything spectral (absolute values, operator norms, PSD
//! roots and powers) is built on it.  Eigenvalues of A*A below
//! [`EIG_CLAMP`] relative to the largest are clamped to zero before
//! fractional powers so round-off cannot produce NaN.

use num_complex::Complex64;
use thiserror::Error;

/// Relative eigenvalue clamp for PSD spectral functions.
pub const EIG_CLAMP: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum MatError {
    #[error("matrix has a non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
}

pub fn check_finite(a: &[Complex64], n: usize) -> Result<(), MatError> {
    for i in 0..n {
        for j in 0..n {
            let z = a[i * n + j];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(MatError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn identity(n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::ONE;
    }
    m
}

/// out = a·b.
pub fn mul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == Complex64::ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn adjoint(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
    out
}

/// a*·a — Hermitian PSD by construction.
pub fn gram(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::ZERO;
            for k in 0..n {
                s += a[k * n + i].conj() * a[k * n + j];
            }
            out[i * n + j] = s;
        }
    }
    out
}

pub fn trace(a: &[Complex64], n: usize) -> Complex64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

pub fn frobenius_sq(a: &[Complex64], n: usize) -> f64 {
    a[..n * n].iter().map(|z| z.norm_sqr()).sum()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.  Returns eigenvalues ascending and the matching unitary
/// eigenvector columns (v[k*n+j] = component k of eigenvector j).
pub fn hermitian_eig(h: &[Complex64], n: usize) -> (Vec<f64>, Vec<Complex64>) {
    debug_assert_eq!(h.len(), n * n);
    let mut a = h.to_vec();
    let mut v = identity(n);
    if n == 1 {
        return (vec![a[0].re], v);
    }
    let scale = frobenius_sq(&a, n);
    let tol = scale * 1e-30 + f64::MIN_POSITIVE;
    for _sweep in 0..40 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let beta = apq.norm();
                if beta == 0.0 {
                    continue;
                }
                let phase = apq / beta; // e^{iφ} with a_pq = β e^{iφ}
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns p,q of a and v: right-multiplication by the
                // rotation U with U_pp = U_qq = c, U_pq = s·e^{iφ},
                // U_qp = −s·e^{−iφ}.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * phase.conj() * akq;
                    a[k * n + q] = s * phase * akp + c * akq;
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * phase.conj() * vkq;
                    v[k * n + q] = s * phase * vkp + c * vkq;
                }
                // Rows p,q of a: left-multiplication by U^H.
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * phase * aqk;
                    a[q * n + k] = s * phase.conj() * apk + c * aqk;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| eig[i].total_cmp(&eig[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig[i]).collect();
    let mut vecs = vec![Complex64::ZERO; n * n];
    for (jnew, &jold) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + jnew] = v[k * n + jold];
        }
    }
    (vals, vecs)
}

fn clamp_spectrum(vals: &mut [f64]) {
    let top = vals.iter().cloned().fold(0.0_f64, f64::max);
    let floor = top * EIG_CLAMP;
    for l in vals.iter_mut() {
        if *l < floor {
            *l = 0.0;
        }
    }
}

/// Rebuild V f(Λ) V* from an eigensystem.
fn assemble(vals: &[f64], vecs: &[Complex64], n: usize, f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; n * n];
    for (j, &l) in vals.iter().enumerate() {
        let fl = f(l);
        if fl == 0.0 {
            continue;
        }
        for r in 0..n {
            let vr = vecs[r * n + j];
            for c in 0..n {
                out[r * n + c] += fl * vr * vecs[c * n + j].conj();
            }
        }
    }
    out
}

/// |A| = (A*A)^{1/2} via Hermitian eigendecomposition of the Gram matrix.
pub fn matrix_abs(a: &[Complex64], n: usize) -> Result<Vec<Complex64>, MatError> {
    check_finite(a, n)?;
    let g = gram(a, n);
    let (mut vals, vecs) = hermitian_eig(&g, n);
    clamp_spectrum(&mut vals);
    Ok(assemble(&vals, &vecs, n, f64::sqrt))
}

/// Eigenvalues of A*A, ascending, clamped.  The singular values of A are
/// their square roots; all Schatten quantities reduce to this list.
pub fn gram_spectrum(a: &[Complex64], n: usize) -> Vec<f64> {
    let g = gram(a, n);
    let (mut vals, _) = hermitian_eig(&g, n);
    clamp_spectrum(&mut vals);
    vals
}

/// tr |A|^p = Σ λ_i(A*A)^{p/2}.
pub fn trace_abs_pow(a: &[Complex64], n: usize, p: f64) -> f64 {
    gram_spectrum(a, n)
        .into_iter()
        .map(|l| l.powf(p / 2.0))
        .sum()
}

/// Largest singular value.
pub fn op_norm(a: &[Complex64], n: usize) -> f64 {
    gram_spectrum(a, n)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// PSD square root of a Hermitian PSD matrix (clamped).
pub fn psd_sqrt(h: &[Complex64], n: usize) -> Vec<Complex64> {
    let (mut vals, vecs) = hermitian_eig(h, n);
    clamp_spectrum(&mut vals);
    assemble(&vals, &vecs, n, f64::sqrt)
}

/// Largest eigenvalue of a Hermitian matrix (0 for the empty spectrum).
pub fn herm_max_eig(h: &[Complex64], n: usize) -> f64 {
    let (vals, _) = hermitian_eig(h, n);
    vals.last().copied().unwrap_or(0.0)
}

/// λ_max(B^{+1/2} M B^{+1/2}) for Hermitian PSD B, M — the smallest C with
/// M ⪯ C·B on range(B), or +∞ when M is positive off range(B).
pub fn psd_domination_factor(m: &[Complex64], b: &[Complex64], n: usize) -> f64 {
    let (mut bvals, bvecs) = hermitian_eig(b, n);
    clamp_spectrum(&mut bvals);
    // W = B^{+1/2}: pseudo-inverse square root.
    let w = assemble(
        &bvals,
        &bvecs,
        n,
        |l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 },
    );
    // Off-range component of M: P M P with P the projector onto ker(B).
    let pker = assemble(&bvals, &bvecs, n, |l| if l > 0.0 { 0.0 } else { 1.0 });
    let mp = mul(&mul(&pker, m, n), &pker, n);
    let leak = herm_max_eig(&mp, n);
    let mscale = frobenius_sq(m, n).sqrt();
    if leak > mscale * 1e-10 {
        return f64::INFINITY;
    }
    let wmw = mul(&mul(&w, m, n), &w, n);
    herm_max_eig(&wmw, n).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn abs_of_real_diagonal_flips_signs() {
        let a = [c(-2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)];
        let m = matrix_abs(&a, 2).unwrap();
        assert!((m[0].re - 2.0).abs() < 1e-12 && (m[3].re - 3.0).abs() < 1e-12);
        assert!(m[1].norm() < 1e-12 && m[2].norm() < 1e-12);
    }

    #[test]
    fn abs_of_unitary_is_identity() {
        // A rotation by 0.3 with a phase twist.
        let (s, co) = (0.3_f64.sin(), 0.3_f64.cos());
        let a = [
            c(co, 0.0),
            c(0.0, -s),
            c(0.0, -s),
            c(co, 0.0),
        ];
        let m = matrix_abs(&a, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m[i * 2 + j] - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eig_matches_closed_form_2x2() {
        // [[2, 1−i],[1+i, 3]]: trace 5, det 6 − |1−i|² = 4, so the
        // characteristic roots are (5 ± 3)/2 = {1, 4} — oracle by hand.
        let h = [c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(3.0, 0.0)];
        let (vals, vecs) = hermitian_eig(&h, 2);
        let lo = 1.0;
        let hi = 4.0;
        assert!((vals[0] - lo).abs() < 1e-12);
        assert!((vals[1] - hi).abs() < 1e-12);
        // Residual ‖Hv − λv‖ for each pair.
        for j in 0..2 {
            for r in 0..2 {
                let hv: Complex64 = (0..2).map(|k| h[r * 2 + k] * vecs[k * 2 + j]).sum();
                assert!((hv - vals[j] * vecs[r * 2 + j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn abs_squares_to_gram_4x4() {
        // Deterministic non-normal 4×4.
        let n = 4;
        let mut a = vec![Complex64::ZERO; 16];
        for i in 0..n {
            for j in 0..n {
                let x = ((3 * i + 5 * j + 1) as f64).sin();
                let y = ((7 * i + 2 * j) as f64).cos() * 0.5;
                a[i * n + j] = c(x, y);
            }
        }
        let m = matrix_abs(&a, n).unwrap();
        let m2 = mul(&m, &m, n);
        let g = gram(&a, n);
        for k in 0..16 {
            assert!((m2[k] - g[k]).norm() < 1e-10, "entry {k}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        let a = [c(1.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(
            matrix_abs(&a, 2).unwrap_err(),
            MatError::NonFinite { row: 0, col: 1 }
        );
    }

    #[test]
    fn domination_factor_detects_off_range_mass() {
        let b = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let m = [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.2, 0.0)];
        assert!(psd_domination_factor(&m, &b, 2).is_infinite());
        let m_ok = [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!((psd_domination_factor(&m_ok, &b, 2) - 0.5).abs() < 1e-12);
    }
}
