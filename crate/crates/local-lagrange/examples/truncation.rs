//! Truncate one full Lagrange function two ways - by radius and by count -
//! and compare the sup error of the discarded tail against re-solving a
//! local problem of the same size.
//!
//! Run with: cargo run --release --example truncation

use local_lagrange::experiments::evaluation_grid;
use local_lagrange::geometry::{default_probe_count, gen_fibonacci, mesh_stats, NeighborIndex};
use local_lagrange::interpolate::{assemble, evaluate_many, lagrange_matrix, InterpolantCoeffs};
use local_lagrange::kernels::KernelSpec;
use local_lagrange::localbasis::{
    build_local_basis, footprint_count, truncate_lagrange, truncation_error, TruncationSpec,
};

fn main() -> local_lagrange::Result<()> {
    let n = 900;
    let spec = KernelSpec::parse("s2-tps:m=2")?;
    let nodes = gen_fibonacci(n)?;
    let index = NeighborIndex::build(&nodes);
    let sys = assemble(spec, &nodes)?;
    let full = lagrange_matrix(&sys)?;
    let grid = evaluation_grid(100, 200);
    let h = mesh_stats(&nodes, default_probe_count(n))?.h;

    // Center: node nearest the north pole.
    let xi = nodes.nearest_to([0.0, 0.0, 1.0]);
    let full_col = full.column(xi);
    let full_vals = evaluate_many(spec, &nodes, &full_col, &grid)?;
    let sup_full = full_vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("N = {n}, h = {h:.5}, sup of the full Lagrange function on the grid = {sup_full:.4}\n");

    println!("radius rule r = K h |ln h|:");
    println!("{:>3} {:>9} {:>9} {:>12}", "K", "r", "kept", "sup error");
    for k in [1.0, 2.0, 4.0] {
        let trunc = truncate_lagrange(&full, &nodes, &index, xi, TruncationSpec::ByRadius(k), h)?;
        let err = truncation_error(spec, &nodes, &full_col, &trunc, &grid);
        let r = k * h * h.ln().abs();
        println!("{:>3} {:>9.5} {:>9} {:>12.3e}", k, r, trunc.retained.len(), err);
    }

    let m = footprint_count(n)?;
    let trunc = truncate_lagrange(&full, &nodes, &index, xi, TruncationSpec::ByCount(m), h)?;
    let err_cut = truncation_error(spec, &nodes, &full_col, &trunc, &grid);

    // Re-solve on the same footprint instead of chopping coefficients.
    let basis = build_local_basis(spec, &nodes, &index, m)?;
    let (rows, vals) = basis.column(xi);
    let mut local = InterpolantCoeffs {
        a: vec![0.0; n],
        b: basis.side_column(xi).to_vec(),
    };
    for (&row, &a) in rows.iter().zip(vals.iter()) {
        local.a[row as usize] = a;
    }
    let local_vals = evaluate_many(spec, &nodes, &local, &grid)?;
    let err_local = full_vals
        .iter()
        .zip(local_vals.iter())
        .fold(0.0f64, |m, (f, l)| m.max((f - l).abs()));

    println!("\nkeeping the {m} nodes nearest the center and dropping the rest:");
    println!(
        "  plain truncation sup error:          {err_cut:.3e}  ({:.1}% of sup)",
        100.0 * err_cut / sup_full
    );
    println!(
        "  re-solved local function sup error:  {err_local:.3e}  ({:.1}% of sup)",
        100.0 * err_local / sup_full
    );
    println!("\nre-solving on the same footprint beats chopping coefficients,");
    println!("which is why the preconditioner builds local functions instead of");
    println!("truncating global ones.");
    Ok(())
}
