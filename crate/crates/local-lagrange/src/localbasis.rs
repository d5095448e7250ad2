//! Local Lagrange basis: small per-center saddle solves on nearest-neighbor
//! footprints, plus radius/count truncation of full Lagrange expansions.
//!
//! Each basis function χ̃_ξ is built from only the M nodes nearest ξ
//! (including ξ itself): an (M+Q)-square saddle system with cardinal data at
//! ξ. Columns are independent, so construction parallelizes trivially and
//! the result is deterministic. The assembled object is a column-sparse
//! coefficient matrix with exactly M structural nonzeros per column, paired
//! with a dense Q x N block of side coefficients.
//!
//! The pure-truncation route is also provided: take the exact Lagrange
//! coefficients and zero everything outside a ball (radius K·h·|ln h|) or a
//! nearest-count set, without re-solving. `truncation_error` measures the
//! sup-norm cost of the discarded tail.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, NodeSet, Point3};
use crate::interpolate::{InterpolantCoeffs, LagrangeCoeffMatrix};
use crate::kernels::KernelSpec;

/// One center's footprint: the center index first, then its M-1 nearest
/// neighbors in ascending-distance order.
#[derive(Clone, Debug)]
pub struct LocalFootprint {
    pub center: usize,
    pub members: Vec<u32>,
}

/// All local Lagrange coefficients. Column ξ of the sparse matrix lives in
/// `vals[ξ·M .. (ξ+1)·M]`, with row indices `footprints[ξ].members`; side
/// coefficients for column ξ live in `side[ξ·Q .. (ξ+1)·Q]`.
pub struct SparseLocalBasis {
    pub footprints: Vec<LocalFootprint>,
    pub vals: Vec<f64>,
    pub side: Vec<f64>,
    pub m: usize,
    pub q: usize,
}

impl SparseLocalBasis {
    pub fn n(&self) -> usize {
        self.footprints.len()
    }

    /// Kernel-coefficient column ξ as (row indices, values).
    pub fn column(&self, xi: usize) -> (&[u32], &[f64]) {
        (
            &self.footprints[xi].members,
            &self.vals[xi * self.m..(xi + 1) * self.m],
        )
    }

    /// Side-coefficient column ξ (length Q).
    pub fn side_column(&self, xi: usize) -> &[f64] {
        &self.side[xi * self.q..(xi + 1) * self.q]
    }

    /// w = A·c by column scatter; sequential, so the accumulation order is
    /// fixed and results are reproducible bit for bit.
    pub fn apply_a(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![0.0; n];
        for (xi, &cx) in c.iter().enumerate().take(n) {
            if cx == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(xi);
            for (&r, &v) in rows.iter().zip(vals) {
                w[r as usize] += v * cx;
            }
        }
        w
    }

    /// v = B·c (length Q); sequential ascending ξ.
    pub fn apply_b(&self, c: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.q];
        for (xi, &cx) in c.iter().enumerate().take(self.n()) {
            if cx == 0.0 {
                continue;
            }
            for (j, acc) in v.iter_mut().enumerate() {
                *acc += self.side[xi * self.q + j] * cx;
            }
        }
        v
    }
}

/// Footprint size for N nodes: 7·ceil((log10 N)^2), never more than N.
pub fn footprint_count(n: usize) -> Result<usize> {
    if n < 10 {
        return Err(Error::InvalidInput(format!(
            "footprint sizing needs at least 10 nodes, got {n}"
        )));
    }
    let lg = (n as f64).log10();
    let m = 7.0 * (lg * lg).ceil();
    Ok((m as usize).min(n))
}

/// Builds every local Lagrange column: for each center, the M-nearest
/// footprint and an (M+Q) saddle solve with cardinal data. Columns are
/// independent and computed in parallel; assembly order is fixed, so the
/// result is deterministic.
pub fn build_local_basis(
    spec: KernelSpec,
    nodes: &NodeSet,
    index: &NeighborIndex,
    m: usize,
) -> Result<SparseLocalBasis> {
    use rayon::prelude::*;

    if nodes.manifold() != spec.manifold() {
        return Err(Error::InvalidInput(format!(
            "kernel {spec} expects {} nodes, got {}",
            spec.manifold().name(),
            nodes.manifold().name()
        )));
    }
    let n = nodes.len();
    let q = spec.side_dim();
    if m < q + 1 {
        return Err(Error::InvalidInput(format!(
            "footprint size {m} must exceed the side dimension {q}"
        )));
    }
    if m > n {
        return Err(Error::InvalidInput(format!(
            "footprint size {m} exceeds node count {n}"
        )));
    }

    type ColumnParts = (Vec<u32>, Vec<f64>, Vec<f64>);
    let columns: Vec<Result<ColumnParts>> = (0..n)
        .into_par_iter()
        .map(|xi| {
            let members = index.knn(xi, m)?;
            let (a, b) = solve_local_column(spec, nodes, xi, &members)?;
            Ok((members, a, b))
        })
        .collect();

    let mut footprints = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n * m);
    let mut side = Vec::with_capacity(n * q);
    for (xi, col) in columns.into_iter().enumerate() {
        let (members, a, b) = col?;
        footprints.push(LocalFootprint {
            center: xi,
            members,
        });
        vals.extend_from_slice(&a);
        side.extend_from_slice(&b);
    }
    Ok(SparseLocalBasis {
        footprints,
        vals,
        side,
        m,
        q,
    })
}

/// Local saddle solve for one center: members[0] is the center, data is the
/// local cardinal vector e_0.
fn solve_local_column(
    spec: KernelSpec,
    nodes: &NodeSet,
    xi: usize,
    members: &[u32],
) -> Result<(Vec<f64>, Vec<f64>)> {
    use nalgebra::{DMatrix, DVector};

    let m = members.len();
    let q = spec.side_dim();
    let pts: Vec<Point3> = members.iter().map(|&i| nodes.point(i as usize)).collect();

    let mut s = DMatrix::zeros(m + q, m + q);
    for j in 0..m {
        for i in 0..j {
            let v = spec.eval(pts[i], pts[j]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let mut phi = DMatrix::zeros(m, q);
    for i in 0..m {
        let row = spec.side_basis(pts[i])?;
        for j in 0..q {
            phi[(i, j)] = row[j];
            s[(i, m + j)] = row[j];
            s[(m + j, i)] = row[j];
        }
    }
    let svals = phi.svd(false, false).singular_values;
    let smax = svals.max();
    let rank = svals.iter().filter(|&&v| v > 1e-10 * smax).count();
    if rank < q {
        return Err(Error::NonUnisolvent {
            rank,
            expected: q,
            detail: format!("footprint of node {xi}"),
        });
    }

    let mut rhs = DVector::zeros(m + q);
    rhs[0] = 1.0;
    let lu = s.clone().lu();
    let sol = lu.solve(&rhs).ok_or_else(|| Error::IllConditioned {
        cond: f64::INFINITY,
        context: format!("local solve at node {xi} failed"),
    })?;
    // one residual covers both the cardinality rows and the side rows
    let res = (&s * &sol - &rhs).abs().max();
    if res > 1e-8 {
        return Err(Error::IllConditioned {
            cond: f64::INFINITY,
            context: format!("local solve at node {xi}: residual {res:.3e}"),
        });
    }
    Ok((
        sol.as_slice()[..m].to_vec(),
        sol.as_slice()[m..].to_vec(),
    ))
}

/// How to pick the retained node set when truncating a full Lagrange column.
#[derive(Clone, Copy, Debug)]
pub enum TruncationSpec {
    /// Keep the `count` nodes nearest the center (center included).
    ByCount(usize),
    /// Keep nodes within radius K·h·|ln h| of the center.
    ByRadius(f64),
}

/// A full Lagrange column with coefficients outside the retained set zeroed.
/// The side coefficients are shared with the full column.
pub struct TruncatedColumn {
    pub xi: usize,
    /// Dense length-N kernel coefficients, zero outside `retained`.
    pub a: Vec<f64>,
    /// Indices of retained nodes (always contains xi).
    pub retained: Vec<usize>,
}

/// Zeroes the coefficients of `full`'s column ξ outside the retained set.
/// No re-solve happens: this is pure truncation of the exact expansion.
pub fn truncate_lagrange(
    full: &LagrangeCoeffMatrix,
    nodes: &NodeSet,
    index: &NeighborIndex,
    xi: usize,
    tspec: TruncationSpec,
    h: f64,
) -> Result<TruncatedColumn> {
    let n = full.n();
    if xi >= n {
        return Err(Error::InvalidInput(format!(
            "center index {xi} out of range for {n} nodes"
        )));
    }
    let retained: Vec<usize> = match tspec {
        TruncationSpec::ByCount(c) => {
            if c == 0 {
                return Err(Error::InvalidInput("retained count must be positive".into()));
            }
            index
                .knn(xi, c.min(n))?
                .into_iter()
                .map(|i| i as usize)
                .collect()
        }
        TruncationSpec::ByRadius(k) => {
            if k.is_nan() || k <= 0.0 || h.is_nan() || h <= 0.0 {
                return Err(Error::InvalidInput(
                    "truncation needs K > 0 and h > 0".into(),
                ));
            }
            let r = k * h * h.ln().abs();
            if r.is_nan() || r <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "truncation radius K*h*|ln h| = {r} must be positive"
                )));
            }
            let center = nodes.point(xi);
            let manifold = nodes.manifold();
            (0..n)
                .filter(|&i| i == xi || manifold.distance(center, nodes.point(i)) <= r)
                .collect()
        }
    };
    let mut a = vec![0.0; n];
    for &i in &retained {
        a[i] = full.a[(i, xi)];
    }
    Ok(TruncatedColumn { xi, a, retained })
}

/// Sup over `grid` of |χ_ξ − χ̃_ξ|. Since both share side coefficients, the
/// difference is the kernel expansion over the cut coefficients only.
pub fn truncation_error(
    spec: KernelSpec,
    nodes: &NodeSet,
    full_col: &InterpolantCoeffs,
    trunc: &TruncatedColumn,
    grid: &[Point3],
) -> f64 {
    use rayon::prelude::*;

    let cut: Vec<(Point3, f64)> = nodes
        .points()
        .iter()
        .zip(full_col.a.iter().zip(&trunc.a))
        .filter(|(_, (&af, &at))| af != at)
        .map(|(&p, (&af, &at))| (p, af - at))
        .collect();
    grid.par_iter()
        .map(|&x| {
            cut.iter()
                .map(|&(p, d)| d * spec.eval(x, p))
                .sum::<f64>()
                .abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// Writes the sparse basis: header `# N M Q`, N·M lines `col row value`,
/// then Q·N lines `col j value`.
pub fn write_local_basis<W: Write>(basis: &SparseLocalBasis, mut w: W) -> Result<()> {
    let (n, m, q) = (basis.n(), basis.m, basis.q);
    writeln!(w, "# {n} {m} {q}")?;
    for xi in 0..n {
        let (rows, vals) = basis.column(xi);
        for (&r, &v) in rows.iter().zip(vals) {
            writeln!(w, "{xi} {r} {v:.16e}")?;
        }
    }
    for xi in 0..n {
        for (j, &v) in basis.side_column(xi).iter().enumerate() {
            writeln!(w, "{xi} {j} {v:.16e}")?;
        }
    }
    Ok(())
}

pub fn write_local_basis_path<P: AsRef<Path>>(basis: &SparseLocalBasis, path: P) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_local_basis(basis, std::io::BufWriter::new(f))
}

pub fn read_local_basis<R: BufRead>(r: R) -> Result<SparseLocalBasis> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty basis file".into(),
        })?;
    let header = header?;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing '# N M Q' header".into(),
        })?
        .split_whitespace()
        .collect();
    if fields.len() != 3 {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header needs 3 fields, got {}", fields.len()),
        });
    }
    let parse_dim = |s: &str, what: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad {what}: {s:?}"),
        })
    };
    let n = parse_dim(fields[0], "node count")?;
    let m = parse_dim(fields[1], "footprint size")?;
    let q = parse_dim(fields[2], "side dimension")?;

    let mut footprints: Vec<LocalFootprint> = (0..n)
        .map(|xi| LocalFootprint {
            center: xi,
            members: Vec::with_capacity(m),
        })
        .collect();
    let mut vals = vec![0.0; n * m];
    let mut side = vec![0.0; n * q];
    let mut taken = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 3 fields, got {}", parts.len()),
            });
        }
        let col: usize = parts[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad column index {:?}", parts[0]),
        })?;
        let row: usize = parts[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad row index {:?}", parts[1]),
        })?;
        let val: f64 = parts[2].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad value {:?}", parts[2]),
        })?;
        if col >= n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("column {col} out of range"),
            });
        }
        if taken < n * m {
            // still in the kernel-coefficient block
            if row >= n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("row {row} out of range"),
                });
            }
            let fp = &mut footprints[col];
            if fp.members.len() == m {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("column {col} has more than {m} entries"),
                });
            }
            fp.members.push(row as u32);
            vals[col * m + fp.members.len() - 1] = val;
            taken += 1;
        } else {
            // side block
            if row >= q {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("side index {row} out of range"),
                });
            }
            side[col * q + row] = val;
            taken += 1;
        }
    }
    if taken != n * m + n * q {
        return Err(Error::Parse {
            line: 0,
            msg: format!(
                "expected {} coefficient lines, got {taken}",
                n * m + n * q
            ),
        });
    }
    for fp in &footprints {
        if fp.members.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "column {} has {} entries, expected {m}",
                    fp.center,
                    fp.members.len()
                ),
            });
        }
        if fp.members[0] as usize != fp.center {
            return Err(Error::Parse {
                line: 0,
                msg: format!("column {} does not start with its center", fp.center),
            });
        }
    }
    Ok(SparseLocalBasis {
        footprints,
        vals,
        side,
        m,
        q,
    })
}

pub fn read_local_basis_path<P: AsRef<Path>>(path: P) -> Result<SparseLocalBasis> {
    let f = std::fs::File::open(path)?;
    read_local_basis(std::io::BufReader::new(f))
}
