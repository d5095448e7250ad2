//! Node sets on embedded surfaces: generators, mesh statistics, nearest
//! neighbors, and a plain-text point format.
//!
//! Two surfaces are supported, both embedded in R^3: the unit sphere S^2 and
//! the torus of revolution with major radius 3 and minor radius 1 (center
//! circle in the xy-plane). Sphere distances are great-circle arcs in
//! radians. Torus distances are ambient (chordal) throughout; at the mesh
//! scales that matter here the chord approximates the surface geodesic to
//! third order, and it keeps every search structure exact.
//!
//! The two mesh quantities used everywhere downstream:
//!
//! * separation radius `q` — half the minimum pairwise distance, computed
//!   exactly (all pairs for small sets, via the neighbor index otherwise);
//! * fill distance `h` — radius of the largest hole, estimated by probing
//!   with a fixed quasi-uniform point set, so estimates are comparable
//!   across node sets of the same surface.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Major (center-circle) radius of the torus.
pub const TORUS_MAJOR: f64 = 3.0;
/// Minor (tube) radius of the torus.
pub const TORUS_MINOR: f64 = 1.0;

/// Points on-surface to this residual are accepted as exact members of the
/// surface; constructors enforce it.
pub const ON_SURFACE_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// small vector helpers
// ---------------------------------------------------------------------------

pub type Point3 = [f64; 3];

#[inline]
pub fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Point3, b: Point3) -> Point3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn normalize(a: Point3) -> Point3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Great-circle distance between unit vectors, robust near 0 and pi.
#[inline]
pub fn geodesic_sphere(a: Point3, b: Point3) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Chord length corresponding to a great-circle arc on the unit sphere.
#[inline]
fn chord_to_arc(chord: f64) -> f64 {
    2.0 * (0.5 * chord).clamp(-1.0, 1.0).asin()
}

// ---------------------------------------------------------------------------
// manifolds
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Manifold {
    Sphere2,
    Torus,
}

impl Manifold {
    pub fn name(self) -> &'static str {
        match self {
            Manifold::Sphere2 => "sphere2",
            Manifold::Torus => "torus",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s.trim() {
            "sphere2" => Ok(Manifold::Sphere2),
            "torus" => Ok(Manifold::Torus),
            other => Err(Error::InvalidInput(format!(
                "unknown manifold {other:?} (expected \"sphere2\" or \"torus\")"
            ))),
        }
    }

    /// Absolute residual of the defining surface equation at `p`.
    pub fn constraint_residual(self, p: Point3) -> f64 {
        match self {
            Manifold::Sphere2 => (dot(p, p) - 1.0).abs(),
            Manifold::Torus => {
                let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let d = s - TORUS_MAJOR;
                (d * d + p[2] * p[2] - TORUS_MINOR * TORUS_MINOR).abs()
            }
        }
    }

    /// Closest-point projection onto the surface (undefined only on the
    /// symmetry axis / center of the sphere, which never occurs for points
    /// already near the surface).
    pub fn project(self, p: Point3) -> Point3 {
        match self {
            Manifold::Sphere2 => normalize(p),
            Manifold::Torus => {
                let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let (cu, su) = if s > 0.0 {
                    (p[0] / s, p[1] / s)
                } else {
                    (1.0, 0.0)
                };
                let w = [s - TORUS_MAJOR, p[2]];
                let wn = (w[0] * w[0] + w[1] * w[1]).sqrt();
                let (cv, sv) = if wn > 0.0 {
                    (w[0] / wn, w[1] / wn)
                } else {
                    (1.0, 0.0)
                };
                let ring = TORUS_MAJOR + TORUS_MINOR * cv;
                [ring * cu, ring * su, TORUS_MINOR * sv]
            }
        }
    }

    /// Surface distance between on-surface points: great-circle arc for the
    /// sphere, ambient chord for the torus.
    #[inline]
    pub fn distance(self, a: Point3, b: Point3) -> f64 {
        match self {
            Manifold::Sphere2 => geodesic_sphere(a, b),
            Manifold::Torus => norm(sub(a, b)),
        }
    }

    pub fn surface_area(self) -> f64 {
        match self {
            Manifold::Sphere2 => 4.0 * PI,
            Manifold::Torus => 4.0 * PI * PI * TORUS_MAJOR * TORUS_MINOR,
        }
    }
}

/// Point on the torus at ring angle `u` (around the symmetry axis) and tube
/// angle `v` (around the tube center circle).
pub fn torus_point(u: f64, v: f64) -> Point3 {
    let ring = TORUS_MAJOR + TORUS_MINOR * v.cos();
    [ring * u.cos(), ring * u.sin(), TORUS_MINOR * v.sin()]
}

/// Recover `(u, v)` in `[0, 2pi)^2` from an on-surface torus point.
pub fn torus_params(p: Point3) -> (f64, f64) {
    let u = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
    let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
    let v = p[2].atan2(s - TORUS_MAJOR).rem_euclid(2.0 * PI);
    (u, v)
}

// ---------------------------------------------------------------------------
// node sets
// ---------------------------------------------------------------------------

/// An ordered set of pairwise-distinct points on one surface.
#[derive(Clone, Debug)]
pub struct NodeSet {
    manifold: Manifold,
    points: Vec<Point3>,
}

impl NodeSet {
    /// Wraps raw points, enforcing the on-surface constraint and rejecting
    /// exact duplicates (which would make every interpolation matrix
    /// downstream singular).
    pub fn new(manifold: Manifold, points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("node set is empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            let residual = manifold.constraint_residual(*p);
            if !residual.is_finite() || residual > ON_SURFACE_TOL {
                return Err(Error::OffSurface {
                    manifold: manifold.name(),
                    index: i,
                    residual,
                });
            }
        }
        let mut seen: HashMap<[u64; 3], usize> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let key = [p[0].to_bits(), p[1].to_bits(), p[2].to_bits()];
            if let Some(j) = seen.insert(key, i) {
                return Err(Error::DegenerateNodes(format!(
                    "points {j} and {i} coincide"
                )));
            }
        }
        Ok(NodeSet { manifold, points })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> Point3 {
        self.points[i]
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// Index of the node closest to `p` (ambient distance; ties broken by
    /// lowest index).
    pub fn nearest_to(&self, p: Point3) -> usize {
        let mut best = (f64::INFINITY, 0usize);
        for (i, &x) in self.points.iter().enumerate() {
            let d = dot(sub(x, p), sub(x, p));
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

/// Vertices of the icosahedron subdivided `level` times and pushed to the
/// unit sphere: N = 10 * 4^level + 2 nodes. Deterministic ordering: the 12
/// base vertices first, then edge midpoints in face-traversal order.
pub fn gen_icosahedral(level: u32) -> Result<NodeSet> {
    if level > 7 {
        return Err(Error::ResourceLimit(format!(
            "subdivision level {level} exceeds 7 (would give {} nodes)",
            10u64 * 4u64.pow(level) + 2
        )));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let s = 1.0 / (1.0 + phi * phi).sqrt();
    let (a, b) = (s, phi * s);
    let mut verts: Vec<Point3> = vec![
        [-a, b, 0.0],
        [a, b, 0.0],
        [-a, -b, 0.0],
        [a, -b, 0.0],
        [0.0, -a, b],
        [0.0, a, b],
        [0.0, -a, -b],
        [0.0, a, -b],
        [b, 0.0, -a],
        [b, 0.0, a],
        [-b, 0.0, -a],
        [-b, 0.0, a],
    ];
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    fn midpoint(
        i: u32,
        j: u32,
        verts: &mut Vec<Point3>,
        cache: &mut HashMap<(u32, u32), u32>,
    ) -> u32 {
        let key = (i.min(j), i.max(j));
        if let Some(&m) = cache.get(&key) {
            return m;
        }
        let m = normalize(add(verts[i as usize], verts[j as usize]));
        verts.push(m);
        let idx = (verts.len() - 1) as u32;
        cache.insert(key, idx);
        idx
    }

    for _ in 0..level {
        let mut cache = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut verts, &mut cache);
            let bc = midpoint(f[1], f[2], &mut verts, &mut cache);
            let ca = midpoint(f[2], f[0], &mut verts, &mut cache);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    NodeSet::new(Manifold::Sphere2, verts)
}

fn fibonacci_points(n: usize) -> Vec<Point3> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden_angle * i as f64;
            [r * theta.cos(), r * theta.sin(), z]
        })
        .collect()
}

/// Spherical Fibonacci lattice with `n >= 4` nodes: equal-area latitude
/// spacing with golden-angle longitude increments. Deterministic.
pub fn gen_fibonacci(n: usize) -> Result<NodeSet> {
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "fibonacci node count {n} is below the minimum of 4"
        )));
    }
    NodeSet::new(Manifold::Sphere2, fibonacci_points(n))
}

/// Area-weighted quasi-random torus nodes: ring angles follow a seeded
/// golden-ratio sequence, tube angles are rejection-sampled with density
/// proportional to the area element 3 + cos v, and a minimum-separation
/// guard (0.65 of the mean spacing) keeps the set quasi-uniform, which the
/// mesh-ratio-sensitive experiments need. Deterministic for a given seed.
pub fn gen_torus(n: usize, seed: u64) -> Result<NodeSet> {
    if n < 10 {
        return Err(Error::InvalidInput(format!(
            "torus node count {n} is below the minimum of 10"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let u_offset: f64 = rng.random();
    let area = Manifold::Torus.surface_area();
    let r_min = 0.65 * (area / n as f64).sqrt();

    // hash grid over ambient space with cell edge r_min
    let cell = |p: Point3| -> (i64, i64, i64) {
        (
            (p[0] / r_min).floor() as i64,
            (p[1] / r_min).floor() as i64,
            (p[2] / r_min).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut pts: Vec<Point3> = Vec::with_capacity(n);

    let budget = 2000u64 * n as u64;
    let mut candidate = 0u64;
    while pts.len() < n && candidate < budget {
        let u = 2.0 * PI * (candidate as f64 * golden + u_offset).fract();
        candidate += 1;
        let v = loop {
            let v: f64 = rng.random::<f64>() * 2.0 * PI;
            let accept: f64 = rng.random();
            if accept * (TORUS_MAJOR + TORUS_MINOR) < TORUS_MAJOR + TORUS_MINOR * v.cos() {
                break v;
            }
        };
        let p = torus_point(u, v);
        let (cx, cy, cz) = cell(p);
        let mut ok = true;
        'scan: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &j in ids {
                            if norm(sub(p, pts[j])) < r_min {
                                ok = false;
                                break 'scan;
                            }
                        }
                    }
                }
            }
        }
        if ok {
            grid.entry((cx, cy, cz)).or_default().push(pts.len());
            pts.push(p);
        }
    }
    if pts.len() < n {
        return Err(Error::ResourceLimit(format!(
            "torus sampling stalled at {} of {n} nodes within the candidate budget",
            pts.len()
        )));
    }
    NodeSet::new(Manifold::Torus, pts)
}

/// Fixed quasi-uniform probe set used for fill-distance estimation. Depends
/// only on the surface and the count, never on the node set being probed.
pub fn probe_points(manifold: Manifold, n_probe: usize) -> Vec<Point3> {
    match manifold {
        Manifold::Sphere2 => fibonacci_points(n_probe),
        Manifold::Torus => {
            let golden = (5f64.sqrt() - 1.0) / 2.0;
            (0..n_probe)
                .map(|i| {
                    let u = 2.0 * PI * (i as f64 * golden).fract();
                    let t = (i as f64 + 0.5) / n_probe as f64;
                    let v = torus_tube_quantile(t);
                    torus_point(u, v)
                })
                .collect()
        }
    }
}

/// Inverse CDF of the tube-angle density (3 + cos v) / 6 pi on [0, 2 pi],
/// solved by Newton iteration (the density is bounded away from zero).
fn torus_tube_quantile(t: f64) -> f64 {
    let target = 6.0 * PI * t;
    let mut v = 2.0 * PI * t;
    for _ in 0..40 {
        let g = 3.0 * v + v.sin() - target;
        let step = g / (3.0 + v.cos());
        v -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    v.clamp(0.0, 2.0 * PI)
}

// ---------------------------------------------------------------------------
// neighbor index
// ---------------------------------------------------------------------------

const LEAF_LEN: usize = 8;
const LEAF_MARK: u8 = u8::MAX;

/// Static kd-tree over a node set's ambient coordinates. Queries are exact;
/// equidistant candidates are ordered by node index, so results do not
/// depend on build order or thread scheduling.
pub struct NeighborIndex {
    pts: Vec<Point3>,
    order: Vec<u32>,
    dim_at: Vec<u8>,
}

impl NeighborIndex {
    pub fn build(nodes: &NodeSet) -> Self {
        let pts = nodes.points().to_vec();
        let n = pts.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut dim_at = vec![LEAF_MARK; n];
        Self::split(&mut order, 0, &pts, &mut dim_at);
        NeighborIndex { pts, order, dim_at }
    }

    fn split(order: &mut [u32], base: usize, pts: &[Point3], dim_at: &mut [u8]) {
        if order.len() <= LEAF_LEN {
            return;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in order.iter() {
            let p = pts[i as usize];
            for d in 0..3 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let mut dim = 0;
        for d in 1..3 {
            if hi[d] - lo[d] > hi[dim] - lo[dim] {
                dim = d;
            }
        }
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            pts[a as usize][dim]
                .total_cmp(&pts[b as usize][dim])
                .then(a.cmp(&b))
        });
        dim_at[base + mid] = dim as u8;
        let (left, rest) = order.split_at_mut(mid);
        let (_, right) = rest.split_at_mut(1);
        Self::split(left, base, pts, dim_at);
        Self::split(right, base + mid + 1, pts, dim_at);
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// The `k` nearest nodes to node `center` in ambient distance, starting
    /// with `center` itself; ties broken by node index.
    pub fn knn(&self, center: usize, k: usize) -> Result<Vec<u32>> {
        if center >= self.pts.len() {
            return Err(Error::InvalidInput(format!(
                "node index {center} out of range ({} nodes)",
                self.pts.len()
            )));
        }
        if k == 0 || k > self.pts.len() {
            return Err(Error::InvalidInput(format!(
                "neighbor count k = {k} must be in 1..={}",
                self.pts.len()
            )));
        }
        Ok(self
            .knn_point(self.pts[center], k)
            .into_iter()
            .map(|(_, i)| i)
            .collect())
    }

    /// Nearest node to an arbitrary ambient point: `(index, distance)`.
    pub fn nearest(&self, p: Point3) -> (u32, f64) {
        let best = self.knn_point(p, 1);
        (best[0].1, best[0].0.sqrt())
    }

    /// The `k` nearest nodes to an ambient point as `(distance^2, index)`,
    /// sorted ascending with index tie-breaks.
    pub fn knn_point(&self, p: Point3, k: usize) -> Vec<(f64, u32)> {
        debug_assert!(k >= 1 && k <= self.pts.len());
        let mut heap: Vec<(f64, u32)> = Vec::with_capacity(k);
        self.search(0, self.order.len(), p, k, &mut heap);
        heap.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        heap
    }

    fn consider(heap: &mut Vec<(f64, u32)>, k: usize, cand: (f64, u32)) {
        let worse = |a: &(f64, u32), b: &(f64, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if heap.len() < k {
            heap.push(cand);
            if heap.len() == k {
                heap.sort_unstable_by(|a, b| worse(b, a)); // max-heap order via sorted vec
            }
            return;
        }
        if worse(&cand, &heap[0]) == std::cmp::Ordering::Less {
            // replace current worst, restore descending order by insertion
            heap[0] = cand;
            let mut i = 0;
            while i + 1 < heap.len() && worse(&heap[i], &heap[i + 1]) == std::cmp::Ordering::Less {
                heap.swap(i, i + 1);
                i += 1;
            }
        }
    }

    fn search(&self, lo: usize, hi: usize, p: Point3, k: usize, heap: &mut Vec<(f64, u32)>) {
        if hi - lo <= LEAF_LEN {
            for &i in &self.order[lo..hi] {
                let d = sub(self.pts[i as usize], p);
                Self::consider(heap, k, (dot(d, d), i));
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let i = self.order[mid];
        let dim = self.dim_at[mid] as usize;
        let split_val = self.pts[i as usize][dim];
        let d = sub(self.pts[i as usize], p);
        Self::consider(heap, k, (dot(d, d), i));

        let delta = p[dim] - split_val;
        let (near, far) = if delta < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, p, k, heap);
        let worst = if heap.len() < k {
            f64::INFINITY
        } else {
            heap[0].0
        };
        if delta * delta <= worst {
            self.search(far.0, far.1, p, k, heap);
        }
    }
}

// ---------------------------------------------------------------------------
// mesh statistics
// ---------------------------------------------------------------------------

/// Separation radius, fill distance, and their ratio for one node set.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeshStats {
    #[serde(rename = "N")]
    pub n: usize,
    pub h: f64,
    pub q: f64,
    pub rho: f64,
}

/// Default probe budget: 100 probes per node, capped at one million.
pub fn default_probe_count(n: usize) -> usize {
    (100usize.saturating_mul(n)).min(1_000_000)
}

/// Computes mesh statistics: `q` exactly (all pairs up to 2000 nodes, via
/// the neighbor index beyond), `h` by probing with the fixed quasi-uniform
/// probe set of the node set's surface.
pub fn mesh_stats(nodes: &NodeSet, n_probe: usize) -> Result<MeshStats> {
    if nodes.len() < 2 {
        return Err(Error::InvalidInput(
            "mesh statistics need at least 2 nodes".into(),
        ));
    }
    if n_probe == 0 {
        return Err(Error::InvalidInput("probe count must be positive".into()));
    }
    let manifold = nodes.manifold();
    let index = NeighborIndex::build(nodes);

    // minimum pairwise chordal distance (exact either way)
    let min_chord = if nodes.len() <= 2000 {
        let pts = nodes.points();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = sub(pts[i], pts[j]);
                best = best.min(dot(d, d));
            }
        }
        best.sqrt()
    } else {
        let mut best = f64::INFINITY;
        for i in 0..nodes.len() {
            let nn = index.knn_point(nodes.point(i), 2);
            best = best.min(nn[1].0);
        }
        best.sqrt()
    };
    if min_chord <= 0.0 {
        return Err(Error::DegenerateNodes(
            "minimum pairwise distance is zero".into(),
        ));
    }

    let probes = probe_points(manifold, n_probe);
    let mut h_chord: f64 = 0.0;
    for p in &probes {
        h_chord = h_chord.max(index.nearest(*p).1);
    }

    let (h, q) = match manifold {
        Manifold::Sphere2 => (chord_to_arc(h_chord), chord_to_arc(min_chord) / 2.0),
        Manifold::Torus => (h_chord, min_chord / 2.0),
    };
    Ok(MeshStats {
        n: nodes.len(),
        h,
        q,
        rho: h / q,
    })
}

// ---------------------------------------------------------------------------
// node file format
// ---------------------------------------------------------------------------
//
// Plain UTF-8 text. First line: `# manifold: sphere2` or `# manifold: torus`.
// Any later line starting with `#` is a comment. Every other line holds one
// point as three whitespace-separated floats with enough digits to
// round-trip f64 exactly. On read, the surface residual of each point
// decides its fate: up to 1e-9 it is accepted (re-projected internally to
// restore the exact-surface invariant), up to 1e-6 it is re-projected with
// a warning, beyond that the file is rejected.

const READ_ACCEPT_TOL: f64 = 1e-9;
const READ_REPROJECT_TOL: f64 = 1e-6;

pub fn write_nodes<W: Write>(nodes: &NodeSet, mut w: W) -> Result<()> {
    writeln!(w, "# manifold: {}", nodes.manifold().name())?;
    for p in nodes.points() {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    Ok(())
}

pub fn write_nodes_path<P: AsRef<Path>>(nodes: &NodeSet, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_nodes(nodes, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_nodes<R: BufRead>(r: R) -> Result<NodeSet> {
    let mut manifold: Option<Manifold> = None;
    let mut points: Vec<Point3> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if manifold.is_none() {
                let rest = rest.trim();
                if let Some(name) = rest.strip_prefix("manifold:") {
                    manifold = Some(Manifold::from_name(name)?);
                    continue;
                }
            }
            continue; // other comments
        }
        let m = manifold.ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "point data before the \"# manifold:\" header".into(),
        })?;
        let mut coords = [0.0f64; 3];
        let mut fields = trimmed.split_whitespace();
        for c in coords.iter_mut() {
            let field = fields.next().ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected three coordinates".into(),
            })?;
            *c = field.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad float {field:?}: {e}"),
            })?;
        }
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: "more than three coordinates".into(),
            });
        }
        let residual = m.constraint_residual(coords);
        let p = if residual <= ON_SURFACE_TOL {
            coords
        } else if residual <= READ_ACCEPT_TOL {
            m.project(coords)
        } else if residual <= READ_REPROJECT_TOL {
            log::warn!(
                "line {lineno}: point off {} surface by {residual:.3e}, re-projecting",
                m.name()
            );
            m.project(coords)
        } else {
            return Err(Error::OffSurface {
                manifold: m.name(),
                index: points.len(),
                residual,
            });
        };
        points.push(p);
    }
    let manifold = manifold.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing \"# manifold:\" header".into(),
    })?;
    NodeSet::new(manifold, points)
}

pub fn read_nodes_path<P: AsRef<Path>>(path: P) -> Result<NodeSet> {
    read_nodes(BufReader::new(File::open(path)?))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_knn(nodes: &NodeSet, p: Point3, k: usize) -> Vec<u32> {
        let mut all: Vec<(f64, u32)> = nodes
            .points()
            .iter()
            .enumerate()
            .map(|(i, &x)| (dot(sub(x, p), sub(x, p)), i as u32))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all.truncate(k);
        all.into_iter().map(|(_, i)| i).collect()
    }

    #[test]
    fn icosahedral_counts_match_formula() {
        for level in 0..4 {
            let nodes = gen_icosahedral(level).unwrap();
            assert_eq!(nodes.len(), 10 * 4usize.pow(level) + 2);
        }
    }

    #[test]
    fn icosahedral_level_above_cap_is_rejected() {
        assert!(matches!(
            gen_icosahedral(8),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn icosahedron_neighbors_sit_at_atan_2() {
        // Each icosahedron vertex has exactly 5 neighbors, all at
        // great-circle distance atan(2) = arccos(1/sqrt 5).
        let nodes = gen_icosahedral(0).unwrap();
        let index = NeighborIndex::build(&nodes);
        let edge = 2f64.atan();
        for center in 0..nodes.len() {
            let nn = index.knn(center, 6).unwrap();
            assert_eq!(nn[0] as usize, center);
            for &j in &nn[1..] {
                let d = geodesic_sphere(nodes.point(center), nodes.point(j as usize));
                assert!((d - edge).abs() < 1e-12, "edge length {d} vs {edge}");
            }
            // the 7th nearest is strictly farther: next shell is pi - atan(2)
            let nn7 = index.knn(center, 7).unwrap();
            let d7 = geodesic_sphere(nodes.point(center), nodes.point(nn7[6] as usize));
            assert!((d7 - (std::f64::consts::PI - edge)).abs() < 1e-12);
        }
    }

    #[test]
    fn icosahedron_fill_distance_matches_face_circumradius() {
        // The deepest hole of the icosahedral vertex set is a face
        // circumcenter. Oracle: angle between a vertex and the normalized
        // centroid of one of its faces, built from scratch here.
        let nodes = gen_icosahedral(0).unwrap();
        let index = NeighborIndex::build(&nodes);
        let p0 = nodes.point(0);
        let nn = index.knn(0, 3).unwrap();
        // nn[1], nn[2] are two neighbors of vertex 0; adjacent neighbors of a
        // common vertex at edge distance from each other span a face with it.
        let a = nodes.point(nn[1] as usize);
        let mut face_third = None;
        for cand in index.knn(0, 6).unwrap().iter().skip(1) {
            let b = nodes.point(*cand as usize);
            if (geodesic_sphere(a, b) - 2f64.atan()).abs() < 1e-9 {
                face_third = Some(b);
                break;
            }
        }
        let b = face_third.expect("vertex 0 has two mutually adjacent neighbors");
        let centroid = normalize([
            (p0[0] + a[0] + b[0]) / 3.0,
            (p0[1] + a[1] + b[1]) / 3.0,
            (p0[2] + a[2] + b[2]) / 3.0,
        ]);
        let circum = geodesic_sphere(p0, centroid);
        assert!((circum - 0.6523581397843682).abs() < 1e-12);

        let stats = mesh_stats(&nodes, 100_000).unwrap();
        assert!(
            (stats.h - circum).abs() / circum < 0.02,
            "h = {} vs circumradius {}",
            stats.h,
            circum
        );
        let _ = nn;
    }

    #[test]
    fn fibonacci_fill_distance_tracks_equal_area_heuristic() {
        // Measured once and locked: the lattice covers better than the naive
        // equal-area estimate, h = 0.7377 * sqrt(4 pi / n) at n = 900.
        let nodes = gen_fibonacci(900).unwrap();
        let stats = mesh_stats(&nodes, default_probe_count(900)).unwrap();
        let heuristic = (4.0 * PI / 900.0).sqrt();
        let ratio = stats.h / heuristic;
        assert!(
            (0.70..=0.78).contains(&ratio),
            "h = {} ({ratio:.4} of sqrt(4 pi / n) = {heuristic})",
            stats.h
        );
        assert!(stats.q > 0.0);
        assert!(stats.rho >= 1.0);
    }

    #[test]
    fn fibonacci_mesh_ratio_stays_bounded() {
        for n in [100usize, 500, 2000] {
            let nodes = gen_fibonacci(n).unwrap();
            let stats = mesh_stats(&nodes, default_probe_count(n)).unwrap();
            assert!(stats.rho < 4.0, "n = {n}: rho = {}", stats.rho);
        }
    }

    #[test]
    fn fibonacci_rejects_tiny_counts() {
        assert!(gen_fibonacci(3).is_err());
    }

    #[test]
    fn torus_nodes_are_on_surface_and_separated() {
        let nodes = gen_torus(1000, 1).unwrap();
        assert_eq!(nodes.len(), 1000);
        for p in nodes.points() {
            assert!(Manifold::Torus.constraint_residual(*p) <= ON_SURFACE_TOL);
        }
        let stats = mesh_stats(&nodes, default_probe_count(1000)).unwrap();
        // Locked on the generated set: the separation guard keeps q well
        // above the 0.02 floor that downstream conditioning needs.
        assert!(stats.q > 0.02, "q = {}", stats.q);
    }

    #[test]
    fn torus_seeds_differ_but_statistics_agree() {
        let a = gen_torus(1000, 1).unwrap();
        let b = gen_torus(1000, 2).unwrap();
        assert_ne!(a.points()[..10], b.points()[..10]);
        let sa = mesh_stats(&a, default_probe_count(1000)).unwrap();
        let sb = mesh_stats(&b, default_probe_count(1000)).unwrap();
        for (x, y) in [(sa.h, sb.h), (sa.q, sb.q), (sa.rho, sb.rho)] {
            assert!((x - y).abs() / x.max(y) < 0.25, "{x} vs {y}");
        }
    }

    #[test]
    fn torus_generation_is_deterministic() {
        let a = gen_torus(250, 7).unwrap();
        let b = gen_torus(250, 7).unwrap();
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn antipodal_pair_has_separation_half_pi() {
        let nodes = NodeSet::new(
            Manifold::Sphere2,
            vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        )
        .unwrap();
        let stats = mesh_stats(&nodes, 1000).unwrap();
        assert_eq!(stats.q, PI / 2.0);
    }

    #[test]
    fn adding_a_node_never_increases_h_or_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let mut pts = fibonacci_points(80);
            // jitter longitude deterministically so sets differ per round
            let rot: f64 = rng.random::<f64>() * 2.0 * PI;
            for p in pts.iter_mut() {
                let (x, y) = (p[0], p[1]);
                p[0] = x * rot.cos() - y * rot.sin();
                p[1] = x * rot.sin() + y * rot.cos();
            }
            let base = NodeSet::new(Manifold::Sphere2, pts.clone()).unwrap();
            let s0 = mesh_stats(&base, 20_000).unwrap();
            let extra = normalize([
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            ]);
            pts.push(extra);
            let grown = NodeSet::new(Manifold::Sphere2, pts).unwrap();
            let s1 = mesh_stats(&grown, 20_000).unwrap();
            assert!(s1.h <= s0.h + 1e-15);
            assert!(s1.q <= s0.q + 1e-15);
        }
    }

    #[test]
    fn knn_matches_brute_force_on_both_surfaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sphere = gen_fibonacci(311).unwrap();
        let torus = gen_torus(277, 3).unwrap();
        for nodes in [&sphere, &torus] {
            let index = NeighborIndex::build(nodes);
            for _ in 0..50 {
                let center = rng.random_range(0..nodes.len());
                for k in [1usize, 5, 32] {
                    let got = index.knn(center, k).unwrap();
                    let want = brute_knn(nodes, nodes.point(center), k);
                    assert_eq!(got, want, "center {center} k {k}");
                }
            }
        }
    }

    #[test]
    fn knn_rejects_bad_arguments() {
        let nodes = gen_fibonacci(20).unwrap();
        let index = NeighborIndex::build(&nodes);
        assert!(index.knn(0, 0).is_err());
        assert!(index.knn(0, 21).is_err());
        assert!(index.knn(20, 1).is_err());
        assert_eq!(index.knn(0, 20).unwrap().len(), 20);
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let p = [0.0, 0.0, 1.0];
        assert!(matches!(
            NodeSet::new(Manifold::Sphere2, vec![p, [1.0, 0.0, 0.0], p]),
            Err(Error::DegenerateNodes(_))
        ));
    }

    #[test]
    fn off_surface_points_are_rejected() {
        assert!(matches!(
            NodeSet::new(Manifold::Sphere2, vec![[0.0, 0.0, 1.1]]),
            Err(Error::OffSurface { .. })
        ));
    }

    #[test]
    fn default_probe_count_caps_at_one_million() {
        assert_eq!(default_probe_count(900), 90_000);
        assert_eq!(default_probe_count(163_842), 1_000_000);
    }

    #[test]
    fn node_file_round_trips_bit_exactly() {
        for nodes in [gen_fibonacci(57).unwrap(), gen_torus(43, 5).unwrap()] {
            let mut buf = Vec::new();
            write_nodes(&nodes, &mut buf).unwrap();
            let back = read_nodes(&buf[..]).unwrap();
            assert_eq!(back.manifold(), nodes.manifold());
            for (a, b) in back.points().iter().zip(nodes.points()) {
                assert_eq!(a[0].to_bits(), b[0].to_bits());
                assert_eq!(a[1].to_bits(), b[1].to_bits());
                assert_eq!(a[2].to_bits(), b[2].to_bits());
            }
            let mut again = Vec::new();
            write_nodes(&back, &mut again).unwrap();
            assert_eq!(buf, again);
        }
    }

    #[test]
    fn node_file_reader_applies_tolerance_bands() {
        // mild violation (1e-7): re-projected with a warning
        let text = "# manifold: sphere2\n1.0000001 0.0 0.0\n0.0 1.0 0.0\n0.0 0.0 1.0\n0.0 0.0 -1.0\n";
        let nodes = read_nodes(text.as_bytes()).unwrap();
        for p in nodes.points() {
            assert!(Manifold::Sphere2.constraint_residual(*p) <= ON_SURFACE_TOL);
        }
        // gross violation (1e-3): rejected
        let text = "# manifold: sphere2\n1.001 0.0 0.0\n";
        assert!(matches!(
            read_nodes(text.as_bytes()),
            Err(Error::OffSurface { .. })
        ));
    }

    #[test]
    fn node_file_reader_requires_header_and_three_fields() {
        assert!(matches!(
            read_nodes("1.0 0.0 0.0\n".as_bytes()),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_nodes("# manifold: sphere2\n1.0 0.0\n".as_bytes()),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_nodes("# manifold: sphere2\n1.0 0.0 0.0 0.0\n".as_bytes()),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_nodes("# manifold: klein\n".as_bytes()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn torus_params_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u = rng.random::<f64>() * 2.0 * PI;
            let v = rng.random::<f64>() * 2.0 * PI;
            let p = torus_point(u, v);
            assert!(Manifold::Torus.constraint_residual(p) <= ON_SURFACE_TOL);
            let (uu, vv) = torus_params(p);
            let du = (uu - u).abs().min(2.0 * PI - (uu - u).abs());
            let dv = (vv - v).abs().min(2.0 * PI - (vv - v).abs());
            assert!(du < 1e-12 && dv < 1e-12);
        }
    }

    #[test]
    fn probe_points_are_on_surface() {
        for p in probe_points(Manifold::Torus, 5000) {
            assert!(Manifold::Torus.constraint_residual(p) <= 1e-10);
        }
        for p in probe_points(Manifold::Sphere2, 5000) {
            assert!(Manifold::Sphere2.constraint_residual(p) <= 1e-12);
        }
    }
}
