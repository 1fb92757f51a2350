//! Field persistence: the OVF1 container stores the grid header plus
//! row-major complex samples; write → read → bitwise-identical field.
//!
//!     cargo run --example field_io

use ovhardy::field::{make_field, FieldSpec};
use ovhardy::io::{read_field, write_field};
use ovhardy::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(2, 2, 16.0, 64)?;
    let f = make_field(&FieldSpec::BandLimited { kmax: 4 }, grid, 77)?;

    let path = std::env::temp_dir().join("ovhardy-example-field.ovf");
    write_field(&path, &f)?;
    let bytes = std::fs::metadata(&path)?.len();
    println!(
        "wrote {} ({} sites × {}×{} matrices, {} bytes)",
        path.display(),
        grid.sites(),
        grid.n,
        grid.n,
        bytes
    );

    let back = read_field(&path)?;
    assert_eq!(back.grid, f.grid);
    assert_eq!(back.data, f.data);
    println!("read back: grids equal, samples bitwise identical");
    println!("‖f‖₂² = {:.6} on both sides", back.l2_sq());
    Ok(())
}
