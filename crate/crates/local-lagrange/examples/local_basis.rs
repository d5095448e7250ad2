//! Build the sparse local basis at a size where the dense route would be
//! slow, verify its cardinal property on the footprints, and round-trip it
//! through the on-disk format.
//!
//! Run with: cargo run --release --example local_basis

use local_lagrange::geometry::{gen_fibonacci, NeighborIndex};
use local_lagrange::kernels::KernelSpec;
use local_lagrange::localbasis::{
    build_local_basis, footprint_count, read_local_basis_path, write_local_basis_path,
};
use std::time::Instant;

fn main() -> local_lagrange::Result<()> {
    let n = 2562;
    let spec = KernelSpec::parse("s2-tps:m=2")?;
    let nodes = gen_fibonacci(n)?;
    let index = NeighborIndex::build(&nodes);
    let m = footprint_count(n)?;
    println!(
        "N = {n}, footprint size M = {m}, side dimension Q = {}",
        spec.side_dim()
    );

    let t0 = Instant::now();
    let basis = build_local_basis(spec, &nodes, &index, m)?;
    println!(
        "built {} local functions in {:.2}s",
        basis.n(),
        t0.elapsed().as_secs_f64()
    );

    // Cardinal property: column xi evaluates to delta_{xi,zeta} at the nodes
    // of its own footprint (the linear system enforces it; re-check a sample).
    let mut worst = 0.0f64;
    for xi in (0..n).step_by(97) {
        let (rows, vals) = basis.column(xi);
        let side_c = basis.side_column(xi);
        for &zeta in rows {
            let x = nodes.point(zeta as usize);
            let mut v = 0.0;
            for (&row, &a) in rows.iter().zip(vals.iter()) {
                v += a * spec.eval(x, nodes.point(row as usize));
            }
            for (j, phi) in spec.side_basis(x)?.iter().enumerate() {
                v += side_c[j] * phi;
            }
            let want = if zeta as usize == xi { 1.0 } else { 0.0 };
            worst = worst.max((v - want).abs());
        }
    }
    println!("max deviation from the cardinal pattern on sampled footprints: {worst:.3e}");

    let dir = std::env::temp_dir().join("local_basis_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("basis_2562.txt");
    write_local_basis_path(&basis, &path)?;
    let reread = read_local_basis_path(&path)?;
    let same = basis.n() == reread.n()
        && (0..n).all(|xi| {
            let (r1, v1) = basis.column(xi);
            let (r2, v2) = reread.column(xi);
            r1 == r2 && v1 == v2 && basis.side_column(xi) == reread.side_column(xi)
        });
    println!(
        "file round-trip at {}: {}",
        path.display(),
        if same { "bitwise identical" } else { "MISMATCH" }
    );
    Ok(())
}
