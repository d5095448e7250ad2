//! Dense interpolation: the saddle-point system over all nodes.
//!
//! A kernel interpolant has the form
//!
//! ```text
//! s(x) = sum_i a_i k(x, xi_i) + sum_j b_j phi_j(x),
//! ```
//!
//! where the side coefficients b handle the kernel's conditional positive
//! definiteness and the kernel coefficients a are constrained to annihilate
//! the side basis on the nodes. Coefficients come from one (N+Q)-square
//! saddle system
//!
//! ```text
//! | K    Phi | | a |   | y |
//! | Phi'  0  | | b | = | 0 |
//! ```
//!
//! solved by a pivoted dense factorization. `lagrange_matrix` reuses one
//! factorization for all N cardinal right-hand sides, giving every Lagrange
//! function at once; its coefficient matrix A is symmetric (it is the Gram
//! matrix of the Lagrange functions in the kernel's native semi-inner
//! product) and positive semidefinite on the constrained subspace, which the
//! constructors check where affordable.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{NodeSet, Point3};
use crate::kernels::KernelSpec;

/// Node-count cap for dense factorization (O(N^2) memory, O(N^3) time).
pub const DENSE_CAP: usize = 4000;

/// Assembled dense system. Owns a copy of the nodes so results can outlive
/// the caller's set; the copy is trivial next to the N x N kernel block.
pub struct SaddleSystem {
    pub spec: KernelSpec,
    pub nodes: NodeSet,
    /// N x N kernel values, exactly symmetric, zero diagonal.
    pub kernel: DMatrix<f64>,
    /// N x Q side-basis samples, full column rank.
    pub side: DMatrix<f64>,
}

/// Coefficients of one interpolant.
#[derive(Clone, Debug)]
pub struct InterpolantCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Coefficients of every Lagrange function: column eta holds the kernel
/// coefficients of the function that is 1 at node eta and 0 elsewhere.
pub struct LagrangeCoeffMatrix {
    /// N x N kernel coefficients.
    pub a: DMatrix<f64>,
    /// Q x N side coefficients.
    pub b: DMatrix<f64>,
}

impl LagrangeCoeffMatrix {
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn column(&self, eta: usize) -> InterpolantCoeffs {
        InterpolantCoeffs {
            a: self.a.column(eta).iter().copied().collect(),
            b: self.b.column(eta).iter().copied().collect(),
        }
    }
}

/// Builds the kernel and side-basis blocks and verifies unisolvence by a
/// rank-revealing factorization of the side block.
pub fn assemble(spec: KernelSpec, nodes: &NodeSet) -> Result<SaddleSystem> {
    if nodes.manifold() != spec.manifold() {
        return Err(Error::InvalidInput(format!(
            "kernel {spec} expects {} nodes, got {}",
            spec.manifold().name(),
            nodes.manifold().name()
        )));
    }
    let n = nodes.len();
    let q = spec.side_dim();
    if n < q {
        return Err(Error::InvalidInput(format!(
            "need at least Q = {q} nodes for unisolvence, got {n}"
        )));
    }
    let pts = nodes.points();
    let mut kernel = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let v = spec.eval(pts[i], pts[j]);
            kernel[(i, j)] = v;
            kernel[(j, i)] = v;
        }
    }
    let mut side = DMatrix::zeros(n, q);
    for i in 0..n {
        let row = spec.side_basis(pts[i])?;
        for j in 0..q {
            side[(i, j)] = row[j];
        }
    }
    let svals = side.clone().svd(false, false).singular_values;
    let smax = svals.max();
    let rank = svals.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rank < q {
        return Err(Error::NonUnisolvent {
            rank,
            expected: q,
            detail: "side-basis sample matrix".into(),
        });
    }
    Ok(SaddleSystem {
        spec,
        nodes: nodes.clone(),
        kernel,
        side,
    })
}

/// One pivoted factorization of the full saddle matrix, reusable across
/// right-hand sides.
pub struct SaddleFactor<'a> {
    sys: &'a SaddleSystem,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    cond_estimate: f64,
}

impl SaddleSystem {
    pub fn n(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn q(&self) -> usize {
        self.side.ncols()
    }

    pub fn factorize(&self) -> Result<SaddleFactor<'_>> {
        let (n, q) = (self.n(), self.q());
        let mut s = DMatrix::zeros(n + q, n + q);
        s.view_mut((0, 0), (n, n)).copy_from(&self.kernel);
        s.view_mut((0, n), (n, q)).copy_from(&self.side);
        s.view_mut((n, 0), (q, n)).copy_from(&self.side.transpose());
        let lu = s.lu();
        let diag = lu.u().diagonal();
        let mut dmin = f64::INFINITY;
        let mut dmax: f64 = 0.0;
        for v in diag.iter() {
            dmin = dmin.min(v.abs());
            dmax = dmax.max(v.abs());
        }
        let cond_estimate = dmax / dmin;
        if dmin == 0.0 || !cond_estimate.is_finite() {
            return Err(Error::IllConditioned {
                cond: cond_estimate,
                context: "saddle factorization hit a zero pivot".into(),
            });
        }
        Ok(SaddleFactor {
            sys: self,
            lu,
            cond_estimate,
        })
    }
}

impl SaddleFactor<'_> {
    /// Rough condition estimate (pivot-ratio based) of the saddle matrix.
    pub fn cond_estimate(&self) -> f64 {
        self.cond_estimate
    }

    /// Solves for interpolation data `y`, checking the interpolation
    /// residual and the side conditions.
    pub fn solve(&self, y: &[f64]) -> Result<InterpolantCoeffs> {
        let (n, q) = (self.sys.n(), self.sys.q());
        if y.len() != n {
            return Err(Error::InvalidInput(format!(
                "data length {} does not match node count {n}",
                y.len()
            )));
        }
        let mut rhs = DVector::zeros(n + q);
        rhs.rows_mut(0, n).copy_from_slice(y);
        let sol = self.lu.solve(&rhs).ok_or_else(|| Error::IllConditioned {
            cond: self.cond_estimate,
            context: "saddle solve failed".into(),
        })?;
        let a = DVector::from(sol.rows(0, n).clone_owned());
        let b = DVector::from(sol.rows(n, q).clone_owned());

        let y_vec = DVector::from_column_slice(y);
        let residual = (&self.sys.kernel * &a + &self.sys.side * &b - &y_vec).abs().max();
        let y_max = y_vec.abs().max();
        if residual > 1e-8 * (1.0 + y_max) {
            return Err(Error::IllConditioned {
                cond: self.cond_estimate,
                context: format!("interpolation residual {residual:.3e} exceeds tolerance"),
            });
        }
        let side_residual = (self.sys.side.transpose() * &a).abs().max();
        let a_max = a.abs().max();
        if side_residual > 1e-8 * (1.0 + a_max) {
            return Err(Error::IllConditioned {
                cond: self.cond_estimate,
                context: format!("side conditions violated by {side_residual:.3e}"),
            });
        }
        Ok(InterpolantCoeffs {
            a: a.as_slice().to_vec(),
            b: b.as_slice().to_vec(),
        })
    }
}

/// Factorizes once and solves for one data vector.
pub fn solve_saddle(sys: &SaddleSystem, y: &[f64]) -> Result<InterpolantCoeffs> {
    sys.factorize()?.solve(y)
}

/// All Lagrange coefficients from one factorization and N cardinal
/// right-hand sides, with the default dense cap.
pub fn lagrange_matrix(sys: &SaddleSystem) -> Result<LagrangeCoeffMatrix> {
    lagrange_matrix_with_cap(sys, DENSE_CAP)
}

pub fn lagrange_matrix_with_cap(sys: &SaddleSystem, cap: usize) -> Result<LagrangeCoeffMatrix> {
    let (n, q) = (sys.n(), sys.q());
    if n > cap {
        return Err(Error::ResourceLimit(format!(
            "N = {n} exceeds the dense cap {cap}; use the local basis instead"
        )));
    }
    let factor = sys.factorize()?;
    let mut rhs = DMatrix::zeros(n + q, n);
    for i in 0..n {
        rhs[(i, i)] = 1.0;
    }
    let sol = factor
        .lu
        .solve(&rhs)
        .ok_or_else(|| Error::IllConditioned {
            cond: factor.cond_estimate,
            context: "cardinal solves failed".into(),
        })?;
    let a = sol.rows(0, n).clone_owned();
    let b = sol.rows(n, q).clone_owned();

    // Gram symmetry and the per-column side conditions are structural
    // consequences; if either fails, the factorization was not trustworthy.
    let a_max = a.abs().max();
    let mut asym: f64 = 0.0;
    for j in 0..n {
        for i in 0..j {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if asym > 1e-8 * a_max {
        return Err(Error::IllConditioned {
            cond: factor.cond_estimate,
            context: format!(
                "Lagrange coefficient matrix asymmetric by {:.3e} relative",
                asym / a_max
            ),
        });
    }
    let side_residual = (sys.side.transpose() * &a).abs().max();
    if side_residual > 1e-8 * (1.0 + a_max) {
        return Err(Error::IllConditioned {
            cond: factor.cond_estimate,
            context: format!("Lagrange side conditions violated by {side_residual:.3e}"),
        });
    }
    Ok(LagrangeCoeffMatrix { a, b })
}

/// Evaluates the interpolant at one point.
pub fn evaluate(
    spec: KernelSpec,
    nodes: &NodeSet,
    coeffs: &InterpolantCoeffs,
    x: Point3,
) -> Result<f64> {
    let side = spec.side_basis(x)?;
    let pts = nodes.points();
    let mut acc = 0.0;
    for (i, &p) in pts.iter().enumerate() {
        acc += coeffs.a[i] * spec.eval(x, p);
    }
    for (j, phi) in side.iter().enumerate() {
        acc += coeffs.b[j] * phi;
    }
    Ok(acc)
}

/// Evaluates the interpolant on many points (parallel over points).
pub fn evaluate_many(
    spec: KernelSpec,
    nodes: &NodeSet,
    coeffs: &InterpolantCoeffs,
    xs: &[Point3],
) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    xs.par_iter()
        .map(|&x| evaluate(spec, nodes, coeffs, x))
        .collect()
}

/// Dumps Lagrange coefficients as CSV rows `eta_index,xi_index,coefficient`,
/// keeping entries with magnitude strictly above `threshold`.
pub fn write_coeff_csv<W: Write>(
    m: &LagrangeCoeffMatrix,
    threshold: f64,
    mut w: W,
) -> Result<()> {
    writeln!(w, "eta_index,xi_index,coefficient")?;
    for eta in 0..m.a.ncols() {
        for xi in 0..m.a.nrows() {
            let c = m.a[(xi, eta)];
            if c.abs() > threshold {
                writeln!(w, "{eta},{xi},{c:.16e}")?;
            }
        }
    }
    Ok(())
}
