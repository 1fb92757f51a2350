//! The shifted dyadic systems: nested filtrations with trace-preserving
//! conditional expectations, and the covering search — every cube of
//! side ≤ 1/3 of the box sits inside a dyadic cube of one of the three
//! systems with controlled volume ratio.
//!
//!     cargo run --example dyadic_toolkit

use ovhardy::cubes::Cube;
use ovhardy::dyadic::{conditional_expectation, cover_cube, filtrations, mean_function};
use ovhardy::field::{make_field, FieldSpec};
use ovhardy::GridSpec;
use rand::{Rng, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 2, 64.0, 512)?;
    let systems = filtrations(&grid);
    println!("{} shifted systems:", systems.len());
    for f in &systems {
        println!(
            "  shift {:+.4}, levels {}..{} (sides {}..{})",
            f.alpha,
            f.min_level,
            f.max_level,
            f.side(f.min_level),
            f.side(f.max_level),
        );
    }

    // Conditional expectation averages over level-j cubes; the total
    // trace integral is preserved exactly.
    let f = make_field(&FieldSpec::BandLimited { kmax: 6 }, grid, 17)?;
    let total = f.lp_norm(1.0)?;
    println!("\nconditional expectations of a band-limited field:");
    for j in [-2i32, 0, 3] {
        let e = conditional_expectation(&f, &systems[0], j)?;
        println!(
            "  E_{j:+}: ‖E f‖₂² = {:>10.5} (from {:.5}), ‖·‖₁ = {:.6}",
            e.l2_sq(),
            f.l2_sq(),
            e.lp_norm(1.0)?
        );
    }
    println!("  (trace mass {total:.6} is preserved at every level)");

    // Window means over arbitrary sides are averaging operators too.
    let m = mean_function(&f, 0.5);
    println!(
        "\nmean over side-1/2 windows: ‖m‖₂² = {:.5} ≤ ‖f‖₂² = {:.5}",
        m.l2_sq(),
        f.l2_sq()
    );

    // Covering search: random cubes, each covered by some system's cube.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    println!("\ncovering search (8 random cubes):");
    for _ in 0..8 {
        let side: f64 = rng.gen_range(0.05..2.0);
        let center = rng.gen_range(-6.0..6.0);
        let q = Cube {
            center: [center, 0.0],
            side,
        };
        let c = cover_cube(&q, &systems)?;
        worst = worst.max(c.ratio);
        println!(
            "  cube side {side:>6.3} at {center:>6.2} → system {} level {} side {:>7.3} (ratio {:>8.2})",
            c.system, c.level, c.side, c.ratio
        );
    }
    println!("worst volume ratio seen: {worst:.2}");
    Ok(())
}
