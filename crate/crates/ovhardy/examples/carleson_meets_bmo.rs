//! Carleson energy against the local oscillation norm: the square-root
//! of the Carleson functional (plus the unit-scale average) brackets the
//! bmo norm from both sides, and the global/ambient comparison facts.
//!
//!     cargo run --example carleson_meets_bmo

use ovhardy::carleson::carleson_functional;
use ovhardy::cubes::{CubeFamily, CubeKind};
use ovhardy::field::{make_field, FieldSpec};
use ovhardy::kernels::{convolve, Kernel};
use ovhardy::norms::{big_bmo_c_norm, bmo_c_norm, linf_rd_norm};
use ovhardy::square::{cone_profile, Weighting};
use ovhardy::{GridSpec, ScaleGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 2, 32.0, 512)?;
    let scales = ScaleGrid::local(&grid, 16);
    let small = CubeFamily::standard(&grid, CubeKind::SmallOnly, false);
    let all = CubeFamily::standard(&grid, CubeKind::All, false);
    println!(
        "cube family: {} small cubes, {} total",
        small.cubes.len(),
        all.cubes.len()
    );

    println!(
        "\n{:<6} {:>12} {:>12} {:>10}",
        "seed", "carleson", "bmo", "ratio"
    );
    for seed in 0..6u64 {
        let f = make_field(&FieldSpec::BandLimited { kmax: 8 }, grid, 60 + seed)?;
        // Carleson route: sup over small cubes of the tent energy of the
        // derivative-Poisson extension, completed by a unit-scale average.
        let p = cone_profile(&f, Kernel::DPoisson, &scales);
        let tent = carleson_functional(&p, &small, Weighting::PoissonDerivative)?;
        let unit = convolve(&f, Kernel::BesselPoisson, 1.0).lp_norm(f64::INFINITY)?;
        let carl = tent.sqrt() + unit;
        // Oscillation route: means over small cubes, raw size on large.
        let bmo = bmo_c_norm(&f, &all);
        println!("{seed:<6} {carl:>12.5} {bmo:>12.5} {:>10.4}", carl / bmo);
    }

    // Comparison facts for one field.
    let f = make_field(&FieldSpec::BandLimited { kmax: 8 }, grid, 60)?;
    let local = bmo_c_norm(&f, &all);
    println!("\nbmo (local)        = {:.5}", local);
    println!("BMO (global means) = {:.5}  (≤ local)", big_bmo_c_norm(&f, &all));
    println!("weighted ambient   = {:.5}  (≤ C·local)", linf_rd_norm(&f));
    Ok(())
}
