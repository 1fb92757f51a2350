//! Local Hardy norms through their square-function characterizations:
//! the reference conic norm against Poisson-generated, Gaussian-generated
//! and discrete-dyadic variants, for p ∈ {1, 2, 4}.
//!
//!     cargo run --example hardy_characterizations

use ovhardy::field::{make_field, FieldSpec};
use ovhardy::norms::{hp_c_norm, hp_c_norm_via, ViaVariant};
use ovhardy::quadruple::{build_quadruple, RadialProfile, ResolutionVariant};
use ovhardy::{GridSpec, ScaleGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 2, 32.0, 512)?;
    let scales = ScaleGrid::local(&grid, 24);
    let f = make_field(&FieldSpec::BandLimited { kmax: 8 }, grid, 3)?;

    let variants: [(&str, RadialProfile, ResolutionVariant, ViaVariant); 4] = [
        (
            "poisson-conic",
            RadialProfile::PoissonDeriv,
            ResolutionVariant::Continuous,
            ViaVariant::Conic,
        ),
        (
            "poisson-radial",
            RadialProfile::PoissonDeriv,
            ResolutionVariant::Continuous,
            ViaVariant::Radial,
        ),
        (
            "gauss-conic",
            RadialProfile::GaussianLaplacian,
            ResolutionVariant::Continuous,
            ViaVariant::Conic,
        ),
        (
            "dyadic-conic",
            RadialProfile::PoissonDeriv,
            ResolutionVariant::Discrete,
            ViaVariant::DiscreteConic,
        ),
    ];

    for p in [1.0, 2.0, 4.0] {
        let reference = hp_c_norm(&f, p, &scales)?;
        println!("p = {p}: reference ‖f‖ = {reference:.6}");
        for (name, gen, res, via) in &variants {
            let q = build_quadruple(&grid, *gen, *res)?;
            let norm = hp_c_norm_via(&f, p, &q, *via, &scales)?;
            println!(
                "  {name:<16} {norm:>10.6}   ratio {:>7.4}",
                norm / reference
            );
        }
    }

    println!("\nall ratios sit inside a fixed bracket around 1; the suites");
    println!("track the bracket and its stability under refinement.");
    Ok(())
}
