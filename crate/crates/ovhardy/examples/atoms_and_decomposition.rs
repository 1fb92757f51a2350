//! Atoms and the atomic decomposition: random atoms of both kinds
//! validate their moment and size constraints and carry uniformly
//! bounded Hardy norms; a compactly supported field decomposes into
//! weighted atoms that reconstruct it.
//!
//!     cargo run --example atoms_and_decomposition

use ovhardy::cubes::Cube;
use ovhardy::dyadic::{atomic_decompose, make_random_atom, validate_atom, AtomKind};
use ovhardy::field::{make_field, FieldSpec};
use ovhardy::norms::hp_c_norm;
use ovhardy::{GridSpec, ScaleGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 2, 32.0, 512)?;
    let scales = ScaleGrid::local(&grid, 16);

    // Random atoms on cubes of several sides.  Small cubes force the
    // mean-zero kind; the unit cube admits the plain size-bound kind.
    println!(
        "{:<6} {:>6} {:>10} {:>10} {:>8} {:>12}",
        "side", "kind", "L2 size", "bound", "valid", "‖a‖_{h1}"
    );
    for (i, side) in [0.25, 0.5, 1.0].into_iter().cycle().take(9).enumerate() {
        let q = Cube {
            center: [(i as f64) - 4.0, 0.0],
            side,
        };
        let atom = make_random_atom(grid, &q, 1000 + i as u64)?;
        let report = validate_atom(&atom.field, &q)?;
        let h1 = hp_c_norm(&atom.field, 1.0, &scales)?;
        println!(
            "{side:<6} {:>6} {:>10.4} {:>10.4} {:>8} {h1:>12.4}",
            match atom.kind {
                AtomKind::Small => "small",
                AtomKind::Unit => "unit",
            },
            report.size,
            report.size_bound,
            report.pass
        );
    }

    // Decompose a localized bump and add the pieces back together.
    let f = make_field(&FieldSpec::GaussianBump { sigma: 1.2 }, grid, 9)?;
    let decomp = atomic_decompose(&f)?;
    let back = decomp.reconstruct(grid)?;
    let err = back.rel_l2_error(&f)?;
    println!(
        "\ndecomposition: {} atoms, total weight {:.4}, ‖f‖_{{h1}} ≈ {:.4}",
        decomp.terms.len(),
        decomp.total_weight(),
        hp_c_norm(&f, 1.0, &scales)?
    );
    println!("reconstruction relative L₂ error: {err:.3e}");
    Ok(())
}
