//! The square-function variants side by side: conic, radial (weighted
//! and plain), and the two-variable forms, plus the exact Fubini
//! relation tying conic to radial in L₂.
//!
//!     cargo run --example square_function_zoo

use ovhardy::field::{make_field, FieldSpec};
use ovhardy::kernels::Kernel;
use ovhardy::square::{
    cone_profile, conic_square, radial_square, two_variable_square, Aperture, TwoVariableKind,
    Weighting,
};
use ovhardy::{ball_volume, GridSpec, ScaleGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 2, 32.0, 256)?;
    let scales = ScaleGrid::local(&grid, 16);
    let f = make_field(&FieldSpec::BandLimited { kmax: 6 }, grid, 11)?;

    // Everything is built from one cone profile: the derivative-Poisson
    // extension of f to the strip of scales.
    let p = cone_profile(&f, Kernel::DPoisson, &scales);
    println!(
        "cone profile: {} scales over [{:.4}, {:.4}]",
        p.scales.len(),
        p.scales.nodes.first().unwrap(),
        p.scales.nodes.last().unwrap()
    );

    let conic = conic_square(&p, Aperture::Local);
    let radial = radial_square(&p, Weighting::PoissonDerivative)?;
    println!("\n‖s^c f‖₂²  (conic)  = {:.6}", conic.root.l2_sq());
    println!("‖g^c f‖₂²  (radial) = {:.6}", radial.root.l2_sq());

    // In L₂ the cone average is exactly the ball volume times the radial
    // version: ‖s^c f‖₂² = c_d ‖g^c f‖₂².
    let ratio = conic.root.l2_sq() / radial.root.l2_sq();
    println!(
        "conic/radial L₂ ratio = {:.6} (ball volume c_d = {:.6}, rel dev {:.2e})",
        ratio,
        ball_volume(grid.d),
        (ratio / ball_volume(grid.d) - 1.0).abs()
    );

    // Two-variable square functions truncate the cone at level ε; their
    // mass shrinks monotonically as the truncation rises.
    println!("\ntruncated families:");
    for kind in [
        TwoVariableKind::ShiftedBall,
        TwoVariableKind::HalfBall,
        TwoVariableKind::RadialWindow,
    ] {
        let row: Vec<String> = [0.0, 0.25, 0.5]
            .iter()
            .map(|&eps| {
                let s = two_variable_square(&p, kind, eps).unwrap();
                format!("ε={eps}: {:.4}", s.root.l2_sq())
            })
            .collect();
        println!("  {kind:?}: {}", row.join("  "));
    }
    Ok(())
}
