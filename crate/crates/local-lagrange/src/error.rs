//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A size or budget guard tripped before the computation started.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A point fails the defining equation of its surface.
    #[error("point {index} is off the {manifold} surface by {residual:.3e}")]
    OffSurface {
        manifold: &'static str,
        index: usize,
        residual: f64,
    },

    /// Coincident nodes (zero separation) make every downstream system singular.
    #[error("degenerate node set: {0}")]
    DegenerateNodes(String),

    /// The side basis is only implemented for the orders the kernels need.
    #[error("side basis of order m = {m} is not supported (m must be 2 or 3)")]
    UnsupportedOrder { m: u32 },

    /// The side-condition matrix lost rank: the node set cannot determine
    /// the polynomial part of the interpolant.
    #[error("side-condition matrix is rank deficient ({detail}): rank {rank} < {expected}")]
    NonUnisolvent {
        rank: usize,
        expected: usize,
        detail: String,
    },

    /// A dense factorization failed or produced an unusable solution.
    #[error("linear system is numerically singular (condition estimate {cond:.3e}): {context}")]
    IllConditioned { cond: f64, context: String },

    /// The Arnoldi process broke down while the residual was still above
    /// tolerance, so the Krylov space cannot be extended.
    #[error(
        "gmres breakdown at iteration {iteration} with relative residual {residual:.3e} \
         still above tolerance"
    )]
    Breakdown { iteration: usize, residual: f64 },

    /// The iteration budget ran out before the residual target was met.
    #[error(
        "gmres did not converge: relative residual {residual:.3e} after {iterations} \
         iterations (tol {tol:.1e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    /// Too few samples survived the fitting window to define a decay rate.
    #[error(
        "decay window too small: {kept} samples above floor {floor:.1e} beyond s_min \
         {s_min}; need at least {need} (try a smaller floor)"
    )]
    WindowTooSmall {
        kept: usize,
        need: usize,
        floor: f64,
        s_min: f64,
    },

    /// A text input could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
