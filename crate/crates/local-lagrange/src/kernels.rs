//! Conditionally positive definite kernels and their side bases.
//!
//! On the unit sphere the kernel of order `m` is
//!
//! ```text
//! k_m(x, y) = (1 - x.y)^(m-1) * log(1 - x.y),
//! ```
//!
//! a zonal function of the inner product alone. On the torus we restrict the
//! ambient thin-plate spline `k(x, y) = r^2 log r`, `r = |x - y|`, to the
//! surface. Neither kernel is positive definite outright: each is
//! conditionally positive definite with respect to a small side space Π of
//! low-degree harmonics (sphere) or linear polynomials (torus), meaning the
//! quadratic form `sum a_i a_j k(x_i, x_j)` is positive for every nonzero
//! coefficient vector that annihilates Π on the nodes. Interpolation
//! therefore carries `Q = dim Π` extra unknowns and side conditions.
//!
//! Side-basis ordering is fixed (constant, then x, y, z, then the five real
//! quadratic harmonics) so that coefficient files are reproducible.

use crate::error::{Error, Result};
use crate::geometry::{dot, sub, Manifold, NodeSet, Point3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelSpec {
    /// Surface spline of order `m >= 2` on the unit sphere.
    SphereSurfaceSpline { m: u32 },
    /// Ambient thin-plate spline restricted to the torus.
    TorusTps,
}

impl KernelSpec {
    /// Parses the command-line kernel names `s2-tps:m=<m>` and `torus-tps`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "torus-tps" {
            return Ok(KernelSpec::TorusTps);
        }
        if let Some(rest) = s.strip_prefix("s2-tps:m=") {
            let m: u32 = rest.parse().map_err(|_| {
                Error::InvalidInput(format!("bad kernel order in {s:?}"))
            })?;
            if m < 2 {
                return Err(Error::InvalidInput(format!(
                    "kernel order m = {m} must be at least 2"
                )));
            }
            return Ok(KernelSpec::SphereSurfaceSpline { m });
        }
        Err(Error::InvalidInput(format!(
            "unknown kernel {s:?} (expected \"s2-tps:m=2\", \"s2-tps:m=3\", or \"torus-tps\")"
        )))
    }

    pub fn manifold(self) -> Manifold {
        match self {
            KernelSpec::SphereSurfaceSpline { .. } => Manifold::Sphere2,
            KernelSpec::TorusTps => Manifold::Torus,
        }
    }

    /// Intrinsic dimension of the surface (2 for both).
    pub fn intrinsic_dim(self) -> u32 {
        2
    }

    /// Order of conditional positive definiteness.
    pub fn order(self) -> u32 {
        match self {
            KernelSpec::SphereSurfaceSpline { m } => m,
            KernelSpec::TorusTps => 2,
        }
    }

    /// Dimension Q of the side space.
    pub fn side_dim(self) -> usize {
        match self {
            KernelSpec::SphereSurfaceSpline { m } => (m as usize) * (m as usize),
            KernelSpec::TorusTps => 4,
        }
    }

    /// Kernel value. Exactly symmetric in its arguments; the diagonal is the
    /// analytic limit 0.
    #[inline]
    pub fn eval(self, x: Point3, y: Point3) -> f64 {
        match self {
            KernelSpec::SphereSurfaceSpline { m } => {
                let t = dot(x, y).clamp(-1.0, 1.0);
                let w = 1.0 - t;
                if w <= 1e-15 {
                    return 0.0;
                }
                match m {
                    2 => w * w.ln(),
                    3 => w * w * w.ln(),
                    _ => w.powi(m as i32 - 1) * w.ln(),
                }
            }
            KernelSpec::TorusTps => {
                let d = sub(x, y);
                let r2 = dot(d, d);
                // r^2 log r = r^2 * log(r^2) / 2; skips the square root
                if r2 <= 1e-30 {
                    return 0.0;
                }
                0.5 * r2 * r2.ln()
            }
        }
    }

    /// Values of the Q side-basis functions at `x`, constant first.
    pub fn side_basis(self, x: Point3) -> Result<Vec<f64>> {
        match self {
            KernelSpec::SphereSurfaceSpline { m: 2 } | KernelSpec::TorusTps => {
                Ok(vec![1.0, x[0], x[1], x[2]])
            }
            KernelSpec::SphereSurfaceSpline { m: 3 } => Ok(vec![
                1.0,
                x[0],
                x[1],
                x[2],
                x[0] * x[1],
                x[1] * x[2],
                x[0] * x[2],
                x[0] * x[0] - x[1] * x[1],
                3.0 * x[2] * x[2] - 1.0,
            ]),
            KernelSpec::SphereSurfaceSpline { m } => Err(Error::UnsupportedOrder { m }),
        }
    }

    /// The raw CPD quadratic form `sum_i sum_j a_i a_j k(x_i, x_j)` by direct
    /// double sum. Positive for nonzero `a` annihilating the side space;
    /// callers wanting that guarantee must constrain `a` themselves.
    pub fn cpd_quadratic_form(self, nodes: &NodeSet, a: &[f64]) -> Result<f64> {
        if a.len() != nodes.len() {
            return Err(Error::InvalidInput(format!(
                "coefficient length {} does not match node count {}",
                a.len(),
                nodes.len()
            )));
        }
        let pts = nodes.points();
        let mut acc = 0.0;
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                acc += a[i] * a[j] * self.eval(pts[i], pts[j]);
            }
        }
        Ok(acc)
    }
}

impl std::fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelSpec::SphereSurfaceSpline { m } => write!(f, "s2-tps:m={m}"),
            KernelSpec::TorusTps => write!(f, "torus-tps"),
        }
    }
}
