//! The exact L₂ energy identity: square-function energy plus the
//! low-pass remainder equals a weighted spectral mass, with the weight
//! pinned inside [1 − 1/e, 1].
//!
//!     cargo run --example energy_identity

use std::f64::consts::PI;

use ovhardy::field::{make_field, FieldSpec};
use ovhardy::kernels::{poisson_star, Kernel};
use ovhardy::square::{cone_profile, conic_square, Aperture};
use ovhardy::{ball_volume, fft, GridSpec, ScaleGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 2, 32.0, 512)?;
    let scales = ScaleGrid::local(&grid, 24);
    let c_d = ball_volume(grid.d);

    println!("{:<8} {:>14} {:>14} {:>12}", "seed", "lhs", "rhs", "rel err");
    for seed in 1..=5u64 {
        let f = make_field(&FieldSpec::BandLimited { kmax: 8 }, grid, seed)?;

        // Left side: (4/c_d) ‖s^c f‖₂² + ‖P∗ f‖₂².
        let sq = conic_square(&cone_profile(&f, Kernel::DPoisson, &scales), Aperture::Local);
        let lhs = (4.0 / c_d) * sq.root.l2_sq() + poisson_star(&f).l2_sq();

        // Right side: Σ_ξ (1 − 4π|ξ| e^{−4π|ξ|}) |f̂(ξ)|² / L^d.
        let hat = fft::forward(&f);
        let block = grid.mat_len();
        let mut rhs = 0.0;
        for s in 0..grid.sites() {
            let a = 4.0 * PI * grid.xi_norm(s);
            let w = 1.0 - a * (-a).exp();
            let mass: f64 = hat.data[s * block..(s + 1) * block]
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            rhs += w * mass;
        }
        rhs /= grid.l.powi(grid.d as i32);

        let rel = (lhs - rhs).abs() / rhs;
        println!("{seed:<8} {lhs:>14.8} {rhs:>14.8} {rel:>12.3e}");
    }

    // The spectral weight itself never leaves [1 − 1/e, 1].
    let (mut wmin, mut wmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in 0..grid.sites() {
        let a = 4.0 * PI * grid.xi_norm(s);
        let w = 1.0 - a * (-a).exp();
        wmin = wmin.min(w);
        wmax = wmax.max(w);
    }
    println!(
        "\nweight range over the grid: [{wmin:.9}, {wmax:.9}]  (floor 1-1/e = {:.9})",
        1.0 - 1.0 / std::f64::consts::E
    );
    Ok(())
}
