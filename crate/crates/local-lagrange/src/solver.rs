//! Matrix-free preconditioned solves in the local Lagrange basis.
//!
//! Writing the interpolant in the local basis and collocating at the nodes
//! gives the system (K·A_loc + Phi·B_loc)·c = f, i.e. the kernel system
//! right-preconditioned by the local coefficients. The operator is applied
//! without materializing K: the sparse products A_loc·c and B_loc·c come
//! first (O(N·M)), then one streamed pass over kernel rows (O(N) memory).
//! Because the local basis is near-cardinal, the composed operator is a
//! small perturbation of the identity and full GMRES converges in a handful
//! of iterations, roughly independent of N.
//!
//! Row sums always accumulate in ascending column order, so results are
//! identical for any block size or thread count.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::NodeSet;
use crate::kernels::KernelSpec;
use crate::localbasis::SparseLocalBasis;

/// Anything that acts like a square matrix on length-`dim` vectors.
pub trait LinearOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, c: &[f64]) -> Vec<f64>;
}

/// The composed operator K·A_loc + Phi·B_loc applied matrix-free.
pub struct PreconditionedOperator<'a> {
    pub spec: KernelSpec,
    pub nodes: &'a NodeSet,
    pub basis: &'a SparseLocalBasis,
    block: usize,
}

impl<'a> PreconditionedOperator<'a> {
    pub fn new(
        spec: KernelSpec,
        nodes: &'a NodeSet,
        basis: &'a SparseLocalBasis,
    ) -> Result<Self> {
        if nodes.manifold() != spec.manifold() {
            return Err(Error::InvalidInput(format!(
                "kernel {spec} expects {} nodes, got {}",
                spec.manifold().name(),
                nodes.manifold().name()
            )));
        }
        if basis.n() != nodes.len() {
            return Err(Error::InvalidInput(format!(
                "basis covers {} nodes, node set has {}",
                basis.n(),
                nodes.len()
            )));
        }
        if basis.q != spec.side_dim() {
            return Err(Error::InvalidInput(format!(
                "basis side dimension {} does not match kernel ({})",
                basis.q,
                spec.side_dim()
            )));
        }
        // fail here, not in the hot loop, if the side basis is unsupported
        spec.side_basis(nodes.point(0))?;
        Ok(Self {
            spec,
            nodes,
            basis,
            block: 512,
        })
    }

    /// Row-block size for the streamed kernel pass. Has no effect on the
    /// result, only on scheduling granularity.
    pub fn with_block(mut self, block: usize) -> Self {
        self.block = block.max(1);
        self
    }
}

impl LinearOp for PreconditionedOperator<'_> {
    fn dim(&self) -> usize {
        self.nodes.len()
    }

    fn apply(&self, c: &[f64]) -> Vec<f64> {
        use rayon::prelude::*;

        assert_eq!(c.len(), self.dim(), "operator applied to wrong length");
        let w = self.basis.apply_a(c);
        let v = self.basis.apply_b(c);
        let pts = self.nodes.points();
        let spec = self.spec;
        pts.par_iter()
            .with_min_len(self.block)
            .map(|&x| {
                let mut acc = 0.0;
                for (j, &p) in pts.iter().enumerate() {
                    acc += w[j] * spec.eval(x, p);
                }
                let phi = spec.side_basis(x).expect("side basis checked at construction");
                for (p, b) in phi.iter().zip(&v) {
                    acc += p * b;
                }
                acc
            })
            .collect()
    }
}

/// Applies the preconditioned operator to one coefficient vector.
pub fn apply_operator(op: &PreconditionedOperator, c: &[f64]) -> Vec<f64> {
    op.apply(c)
}

#[derive(Clone, Copy, Debug)]
pub struct GmresConfig {
    /// Relative-residual stopping tolerance, in (0, 1).
    pub tol: f64,
    /// Iteration cap across restarts.
    pub max_iter: usize,
    /// Krylov length per cycle; `None` means full (unrestarted) GMRES.
    pub restart: Option<usize>,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            restart: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residuals: the initial one, then one per iteration.
    /// Empty when the right-hand side is zero.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub wall_time: f64,
}

/// Full GMRES (optionally restarted) on `op`, stopping at relative residual
/// `cfg.tol` or `cfg.max_iter` iterations. Hitting the cap returns a
/// non-converged report, not an error; an Arnoldi breakdown that leaves the
/// residual above tolerance is an error.
pub fn gmres<O: LinearOp>(
    op: &O,
    f: &[f64],
    x0: &[f64],
    cfg: GmresConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = op.dim();
    if f.len() != n || x0.len() != n {
        return Err(Error::InvalidInput(format!(
            "gmres needs length-{n} vectors, got f: {}, x0: {}",
            f.len(),
            x0.len()
        )));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        return Err(Error::InvalidInput(format!(
            "gmres tolerance must lie in (0, 1), got {}",
            cfg.tol
        )));
    }
    if f.iter().chain(x0).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("gmres inputs must be finite".into()));
    }

    let fnorm = norm2(f);
    if fnorm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveReport {
                iterations: 0,
                residual_history: Vec::new(),
                converged: true,
                wall_time: start.elapsed().as_secs_f64(),
            },
        ));
    }

    let mut x = x0.to_vec();
    let mut history = Vec::new();
    let mut iterations = 0usize;
    let mut converged = false;

    'outer: while iterations < cfg.max_iter && !converged {
        let r0: Vec<f64> = {
            let ax = op.apply(&x);
            f.iter().zip(&ax).map(|(a, b)| a - b).collect()
        };
        let beta = norm2(&r0);
        let rel0 = beta / fnorm;
        if history.is_empty() {
            history.push(rel0.max(f64::MIN_POSITIVE));
        }
        if rel0 <= cfg.tol {
            converged = true;
            break;
        }

        let cycle = cfg
            .restart
            .unwrap_or(cfg.max_iter)
            .min(cfg.max_iter - iterations);
        let mut vs: Vec<Vec<f64>> = vec![r0.iter().map(|v| v / beta).collect()];
        // Hessenberg columns after Givens rotations (upper-triangular part)
        let mut r_cols: Vec<Vec<f64>> = Vec::new();
        let mut cos: Vec<f64> = Vec::new();
        let mut sin: Vec<f64> = Vec::new();
        let mut g = vec![0.0; cycle + 1];
        g[0] = beta;

        for k in 0..cycle {
            let mut w = op.apply(&vs[k]);
            let mut h = vec![0.0; k + 2];
            for (i, vi) in vs.iter().enumerate() {
                let hik = dot_slices(vi, &w);
                h[i] = hik;
                for (we, ve) in w.iter_mut().zip(vi) {
                    *we -= hik * ve;
                }
            }
            let hnext = norm2(&w);
            h[k + 1] = hnext;

            // previous rotations on the new column
            for i in 0..k {
                let (hi, hj) = (h[i], h[i + 1]);
                h[i] = cos[i] * hi + sin[i] * hj;
                h[i + 1] = -sin[i] * hi + cos[i] * hj;
            }

            if hnext < 1e-14 {
                // invariant subspace: either the projected system already
                // contains the solution, or nothing further can improve
                iterations += 1;
                if h[k].abs() >= 1e-14 {
                    r_cols.push(h[..k + 1].to_vec());
                    let y = back_substitute(&r_cols, &g[..k + 1]);
                    update_solution(&mut x, &vs, &y);
                    let ax = op.apply(&x);
                    let rel = norm2(
                        &f.iter().zip(&ax).map(|(a, b)| a - b).collect::<Vec<_>>(),
                    ) / fnorm;
                    history.push(rel.max(f64::MIN_POSITIVE));
                    if rel <= cfg.tol {
                        converged = true;
                        break 'outer;
                    }
                    return Err(Error::Breakdown {
                        iteration: iterations,
                        residual: rel,
                    });
                }
                let rel = g[k].abs() / fnorm;
                history.push(rel.max(f64::MIN_POSITIVE));
                if rel <= cfg.tol {
                    if k > 0 {
                        let y = back_substitute(&r_cols, &g[..k]);
                        update_solution(&mut x, &vs, &y);
                    }
                    converged = true;
                    break 'outer;
                }
                return Err(Error::Breakdown {
                    iteration: iterations,
                    residual: rel,
                });
            }

            let (c, s) = givens(h[k], h[k + 1]);
            cos.push(c);
            sin.push(s);
            h[k] = c * h[k] + s * h[k + 1];
            let gk = g[k];
            g[k] = c * gk;
            g[k + 1] = -s * gk;
            r_cols.push(h[..k + 1].to_vec());

            iterations += 1;
            let rel = g[k + 1].abs() / fnorm;
            history.push(rel.max(f64::MIN_POSITIVE));
            if rel <= cfg.tol {
                let y = back_substitute(&r_cols, &g[..k + 1]);
                update_solution(&mut x, &vs, &y);
                converged = true;
                break 'outer;
            }

            vs.push(w.iter().map(|v| v / hnext).collect());
        }

        // cycle exhausted without convergence: fold in the best update
        if !r_cols.is_empty() {
            let k = r_cols.len();
            let y = back_substitute(&r_cols, &g[..k]);
            update_solution(&mut x, &vs, &y);
        }
    }

    Ok((
        x,
        SolveReport {
            iterations,
            residual_history: history,
            converged,
            wall_time: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Solves the interpolation system in the local basis and maps back to
/// kernel-basis coefficients: a = A_loc·c, b = B_loc·c. Errors if GMRES did
/// not converge or the recovered coefficients fail to reproduce the data.
pub fn solve_interpolation(
    spec: KernelSpec,
    nodes: &NodeSet,
    basis: &SparseLocalBasis,
    f: &[f64],
    cfg: GmresConfig,
) -> Result<(Vec<f64>, Vec<f64>, SolveReport)> {
    let op = PreconditionedOperator::new(spec, nodes, basis)?;
    let (c, report) = gmres(&op, f, f, cfg)?;
    if !report.converged {
        return Err(Error::NonConvergence {
            iterations: report.iterations,
            residual: report
                .residual_history
                .last()
                .copied()
                .unwrap_or(f64::NAN),
            tol: cfg.tol,
        });
    }
    let a = basis.apply_a(&c);
    let b = basis.apply_b(&c);
    let f_max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let node_values = op.apply(&c);
    let residual = node_values
        .iter()
        .zip(f)
        .fold(0.0f64, |m, (y, fv)| m.max((y - fv).abs()));
    if residual > 10.0 * cfg.tol * f_max {
        return Err(Error::IllConditioned {
            cond: f64::NAN,
            context: format!(
                "recovered coefficients reproduce data to {residual:.3e}, worse than 10*tol*|f|"
            ),
        });
    }
    Ok((a, b, report))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    let r = a.hypot(b);
    if r == 0.0 {
        (1.0, 0.0)
    } else {
        (a / r, b / r)
    }
}

fn back_substitute(r_cols: &[Vec<f64>], g: &[f64]) -> Vec<f64> {
    let k = r_cols.len();
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for j in (i + 1)..k {
            acc -= r_cols[j][i] * y[j];
        }
        y[i] = acc / r_cols[i][i];
    }
    y
}

fn update_solution(x: &mut [f64], vs: &[Vec<f64>], y: &[f64]) {
    for (j, &yj) in y.iter().enumerate() {
        for (xe, ve) in x.iter_mut().zip(&vs[j]) {
            *xe += yj * ve;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_fibonacci, NeighborIndex};
    use crate::interpolate::{assemble, solve_saddle};
    use crate::localbasis::{build_local_basis, footprint_count};
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const M2: KernelSpec = KernelSpec::SphereSurfaceSpline { m: 2 };

    struct Identity(usize);
    impl LinearOp for Identity {
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, c: &[f64]) -> Vec<f64> {
            c.to_vec()
        }
    }

    /// Projects onto the first coordinate: singular, range = span(e0).
    struct FirstCoord(usize);
    impl LinearOp for FirstCoord {
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, c: &[f64]) -> Vec<f64> {
            let mut out = vec![0.0; self.0];
            out[0] = c[0];
            out
        }
    }

    fn setup(n: usize, m: usize) -> (NodeSet, SparseLocalBasis) {
        let nodes = gen_fibonacci(n).unwrap();
        let index = NeighborIndex::build(&nodes);
        let basis = build_local_basis(M2, &nodes, &index, m).unwrap();
        (nodes, basis)
    }

    use crate::geometry::NodeSet;

    #[test]
    fn zero_vector_maps_to_zero() {
        let (nodes, basis) = setup(100, 28);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let y = op.apply(&vec![0.0; 100]);
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_dense_oracle() {
        let (nodes, basis) = setup(200, 30);
        let sys = assemble(M2, &nodes).unwrap();
        // dense A_loc, B_loc
        let mut a_dense = DMatrix::zeros(200, 200);
        let mut b_dense = DMatrix::zeros(4, 200);
        for xi in 0..200 {
            let (rows, vals) = basis.column(xi);
            for (&r, &v) in rows.iter().zip(vals) {
                a_dense[(r as usize, xi)] = v;
            }
            for (j, &v) in basis.side_column(xi).iter().enumerate() {
                b_dense[(j, xi)] = v;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        for _ in 0..5 {
            let c: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let cv = DVector::from_column_slice(&c);
            let want = &sys.kernel * (&a_dense * &cv) + &sys.side * (&b_dense * &cv);
            let got = op.apply(&c);
            let scale = want.abs().max().max(1e-300);
            for i in 0..200 {
                assert!(
                    (got[i] - want[i]).abs() <= 1e-10 * scale,
                    "row {i}: {} vs {}",
                    got[i],
                    want[i]
                );
            }
        }
    }

    #[test]
    fn block_size_does_not_change_results() {
        let (nodes, basis) = setup(150, 28);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let c: Vec<f64> = (0..150).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let y1 = PreconditionedOperator::new(M2, &nodes, &basis)
            .unwrap()
            .with_block(1)
            .apply(&c);
        let y2 = PreconditionedOperator::new(M2, &nodes, &basis)
            .unwrap()
            .with_block(4096)
            .apply(&c);
        for (a, b) in y1.iter().zip(&y2) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn cardinal_input_reads_off_local_function_values() {
        let (nodes, basis) = setup(300, 49);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let xi = 17;
        let mut e = vec![0.0; 300];
        e[xi] = 1.0;
        let y = op.apply(&e);
        assert!((y[xi] - 1.0).abs() <= 1e-8);
        let (rows, _) = basis.column(xi);
        for &zeta in &rows[1..] {
            assert!(
                y[zeta as usize].abs() <= 1e-8,
                "member {zeta}: {}",
                y[zeta as usize]
            );
        }
    }

    #[test]
    fn operator_is_linear() {
        let (nodes, basis) = setup(120, 28);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let c1: Vec<f64> = (0..120).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let c2: Vec<f64> = (0..120).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let alpha: f64 = rng.random::<f64>() * 4.0 - 2.0;
            let lhs = op.apply(
                &c1.iter()
                    .zip(&c2)
                    .map(|(a, b)| alpha * a + b)
                    .collect::<Vec<_>>(),
            );
            let y1 = op.apply(&c1);
            let y2 = op.apply(&c2);
            let scale = lhs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
            for i in 0..120 {
                let rhs = alpha * y1[i] + y2[i];
                assert!((lhs[i] - rhs).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn recovers_known_coefficients() {
        let (nodes, basis) = setup(100, footprint_count(100).unwrap());
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let c_true: Vec<f64> = (0..100).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let f = op.apply(&c_true);
        let cfg = GmresConfig {
            tol: 1e-12,
            max_iter: 200,
            restart: None,
        };
        let (c, report) = gmres(&op, &f, &f, cfg).unwrap();
        assert!(report.converged);
        for (got, want) in c.iter().zip(&c_true) {
            assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_rhs_needs_no_iterations() {
        let (nodes, basis) = setup(50, 12);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let f = vec![0.0; 50];
        let (c, report) = gmres(&op, &f, &f, GmresConfig::default()).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
        assert_eq!(report.iterations, 0);
        assert!(report.converged);
        assert!(report.residual_history.is_empty());
    }

    #[test]
    fn residual_history_is_monotone_and_positive() {
        let (nodes, basis) = setup(200, 20);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let f: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let cfg = GmresConfig {
            tol: 1e-13,
            max_iter: 60,
            restart: None,
        };
        let (_, report) = gmres(&op, &f, &f, cfg).unwrap();
        assert!(report.iterations >= 2);
        let h = &report.residual_history;
        assert_eq!(h.len(), report.iterations + 1);
        assert!(h.iter().all(|&r| r > 0.0));
        for w in h.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "history not monotone: {w:?}");
        }
        if report.converged {
            assert!(*h.last().unwrap() <= cfg.tol);
        }
    }

    #[test]
    fn iteration_cap_reports_instead_of_erroring() {
        let (nodes, basis) = setup(200, 20);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let f: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let cfg = GmresConfig {
            tol: 1e-15,
            max_iter: 2,
            restart: None,
        };
        let (_, report) = gmres(&op, &f, &f, cfg).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 2);

        // the interpolation wrapper escalates that report to an error
        match solve_interpolation(M2, &nodes, &basis, &f, cfg) {
            Err(Error::NonConvergence { iterations, .. }) => assert_eq!(iterations, 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn restarted_gmres_still_converges() {
        let (nodes, basis) = setup(200, 20);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let f: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let cfg = GmresConfig {
            tol: 1e-10,
            max_iter: 200,
            restart: Some(3),
        };
        let (c, report) = gmres(&op, &f, &f, cfg).unwrap();
        assert!(report.converged);
        let ax = op.apply(&c);
        let rel = norm2(&f.iter().zip(&ax).map(|(a, b)| a - b).collect::<Vec<_>>())
            / norm2(&f);
        assert!(rel <= 1e-9, "true residual {rel:.3e}");
    }

    #[test]
    fn happy_breakdown_on_identity_converges() {
        let op = Identity(10);
        let f: Vec<f64> = (0..10).map(|i| i as f64 + 1.0).collect();
        let x0 = vec![0.0; 10];
        let cfg = GmresConfig {
            tol: 1e-10,
            max_iter: 50,
            restart: None,
        };
        let (c, report) = gmres(&op, &f, &x0, cfg).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2);
        for (got, want) in c.iter().zip(&f) {
            assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn breakdown_outside_range_is_an_error() {
        let op = FirstCoord(4);
        let f = vec![0.0, 1.0, 0.0, 0.0];
        let x0 = vec![0.0; 4];
        let cfg = GmresConfig {
            tol: 1e-10,
            max_iter: 50,
            restart: None,
        };
        match gmres(&op, &f, &x0, cfg) {
            Err(Error::Breakdown { residual, .. }) => {
                assert!(residual > cfg.tol, "residual {residual}")
            }
            other => panic!("expected breakdown, got {other:?}"),
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let (nodes, basis) = setup(50, 12);
        let op = PreconditionedOperator::new(M2, &nodes, &basis).unwrap();
        let f = vec![1.0; 50];
        for tol in [0.0, 1.0, -0.5, f64::NAN] {
            let cfg = GmresConfig {
                tol,
                max_iter: 10,
                restart: None,
            };
            assert!(matches!(
                gmres(&op, &f, &f, cfg),
                Err(Error::InvalidInput(_))
            ));
        }
        assert!(matches!(
            gmres(&op, &f[..10], &f, GmresConfig::default()),
            Err(Error::InvalidInput(_))
        ));
        let mut bad = f.clone();
        bad[3] = f64::INFINITY;
        assert!(matches!(
            gmres(&op, &bad, &f, GmresConfig::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn two_routes_agree_on_moderate_sets() {
        let (nodes, basis) = setup(300, footprint_count(300).unwrap());
        let sys = assemble(M2, &nodes).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let f: Vec<f64> = (0..300).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let direct = solve_saddle(&sys, &f).unwrap();
        let cfg = GmresConfig {
            tol: 1e-10,
            max_iter: 200,
            restart: None,
        };
        let (a, b, report) = solve_interpolation(M2, &nodes, &basis, &f, cfg).unwrap();
        assert!(report.converged);
        for (got, want) in a.iter().zip(&direct.a) {
            assert!((got - want).abs() <= 1e-6, "a: {got} vs {want}");
        }
        for (got, want) in b.iter().zip(&direct.b) {
            assert!((got - want).abs() <= 1e-6, "b: {got} vs {want}");
        }
    }

    #[test]
    fn constant_data_solves_to_constant_interpolant() {
        let (nodes, basis) = setup(200, footprint_count(200).unwrap());
        let f = vec![1.0; 200];
        let cfg = GmresConfig {
            tol: 1e-8,
            max_iter: 200,
            restart: None,
        };
        let (a, b, _) = solve_interpolation(M2, &nodes, &basis, &f, cfg).unwrap();
        let coeffs = crate::interpolate::InterpolantCoeffs { a, b };
        for &p in nodes.points() {
            let v = crate::interpolate::evaluate(M2, &nodes, &coeffs, p).unwrap();
            assert!((v - 1.0).abs() <= 10.0 * cfg.tol);
        }
    }
}
