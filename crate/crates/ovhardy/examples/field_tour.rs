//! Tour of the basic objects: grids, matrix-valued fields, the spectral
//! view, and kernel convolution.
//!
//!     cargo run --example field_tour

use ovhardy::field::{make_field, FieldSpec};
use ovhardy::kernels::{convolve, poisson_star, Kernel};
use ovhardy::{fft, GridSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A periodic box of side 32 on the line, sampled at 256 points, with
    // 2×2 matrix values at every site.
    let grid = GridSpec::new(1, 2, 32.0, 256)?;
    println!(
        "grid: d={} n={} box={} samples={} (h={:.4})",
        grid.d,
        grid.n,
        grid.l,
        grid.nsamp,
        grid.h()
    );

    // Deterministic random band-limited field: finitely many Fourier
    // modes with Hermitian-symmetric random matrix coefficients.
    let f = make_field(&FieldSpec::BandLimited { kmax: 8 }, grid, 42)?;
    println!("‖f‖₂²        = {:.6}", f.l2_sq());
    println!("‖f‖_∞ (op)   = {:.6}", f.lp_norm(f64::INFINITY)?);
    println!("‖f‖₁ (trace) = {:.6}", f.lp_norm(1.0)?);

    // Plancherel: the discrete transform preserves the L₂ mass.
    let hat = fft::forward(&f);
    let rel = (f.l2_sq() - hat.l2_sq()).abs() / hat.l2_sq();
    println!("Plancherel relative defect: {rel:.3e}");

    // Poisson smoothing at a few scales: contractive in L₂, and the
    // large-scale limit P∗ keeps only the slow modes.
    println!("\nPoisson scale family:");
    for eps in [0.1, 0.5, 2.0] {
        let smooth = convolve(&f, Kernel::Poisson, eps);
        println!("  ‖P_{eps:>3} f‖₂² = {:.6}", smooth.l2_sq());
    }
    let limit = poisson_star(&f);
    println!("  ‖P∗ f‖₂²    = {:.6} (large-scale limit)", limit.l2_sq());

    // A Gaussian bump is localized in space; compare the mass the
    // box-side tails carry.
    let bump = make_field(&FieldSpec::GaussianBump { sigma: 1.0 }, grid, 7)?;
    println!("\nbump ‖·‖₂² = {:.6}, ‖·‖₁ = {:.6}", bump.l2_sq(), bump.lp_norm(1.0)?);
    Ok(())
}
