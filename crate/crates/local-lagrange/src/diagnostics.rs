//! Measurement tools: how fast Lagrange functions and their coefficients
//! decay, and how stable the local basis is in L_p.
//!
//! Decay is modeled as v = C·e^{−ν·s} with s = distance/h, so ν is a rate
//! per fill-distance unit and is comparable across node counts. Fits are
//! least squares on (s, log10 v) over an explicit window: samples below a
//! value floor are dropped (double precision plateaus near 1e−11) along
//! with the near field s ≤ s_min, where the exponential model is not
//! claimed. Every fit reports its window size and r² so a bad fit is
//! visible rather than silent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{probe_points, Manifold, MeshStats, NodeSet, Point3};
use crate::interpolate::{evaluate, InterpolantCoeffs, LagrangeCoeffMatrix};
use crate::kernels::KernelSpec;
use crate::localbasis::SparseLocalBasis;

/// Per-latitude maxima of |function| over a longitude sweep.
#[derive(Clone, Debug)]
pub struct LatitudinalProfile {
    /// Latitude angles from the north pole, radians, 0 through π inclusive.
    pub latitudes: Vec<f64>,
    /// max over n1 longitudes of |value| at each latitude.
    pub values: Vec<f64>,
}

/// Exponential-decay fit v ≈ C·e^{−ν s}.
#[derive(Clone, Copy, Debug)]
pub struct DecayFit {
    /// Decay rate per unit s = d/h (natural-log units).
    pub nu: f64,
    /// log10 of the prefactor C.
    pub log_c: f64,
    /// Coefficient of determination of the line on (s, log10 v).
    pub r2: f64,
    /// Samples inside the fit window.
    pub n_used: usize,
    /// Value floor that defined the window.
    pub floor: f64,
}

impl DecayFit {
    /// Prefactor C in linear units.
    pub fn c(&self) -> f64 {
        10f64.powf(self.log_c)
    }
}

/// Which L_p norm a stability experiment measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormP {
    Two,
    Inf,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub p: NormP,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Evaluates the interpolant on an n0 × n1 latitude/longitude grid and
/// returns the per-latitude maximum of |value|. Latitudes run from the
/// north pole (0) to the south pole (π) inclusive.
pub fn latitudinal_max(
    spec: KernelSpec,
    nodes: &NodeSet,
    coeffs: &InterpolantCoeffs,
    n0: usize,
    n1: usize,
) -> Result<LatitudinalProfile> {
    if nodes.manifold() != Manifold::Sphere2 || spec.manifold() != Manifold::Sphere2 {
        return Err(Error::InvalidInput(
            "latitudinal profiles are defined on the sphere".into(),
        ));
    }
    if n0 < 2 || n1 < 1 {
        return Err(Error::InvalidInput(format!(
            "grid must be at least 2 x 1, got {n0} x {n1}"
        )));
    }
    let latitudes: Vec<f64> = (0..n0)
        .map(|i| i as f64 * std::f64::consts::PI / (n0 - 1) as f64)
        .collect();
    let values: Result<Vec<f64>> = latitudes
        .par_iter()
        .map(|&theta| {
            let (st, ct) = theta.sin_cos();
            let mut best = 0.0f64;
            for j in 0..n1 {
                let phi = j as f64 * std::f64::consts::TAU / n1 as f64;
                let x = [st * phi.cos(), st * phi.sin(), ct];
                best = best.max(evaluate(spec, nodes, coeffs, x)?.abs());
            }
            Ok(best)
        })
        .collect();
    Ok(LatitudinalProfile {
        latitudes,
        values: values?,
    })
}

/// Least-squares exponential fit on samples (s, v), keeping v > floor and
/// s > s_min. At least 5 samples must survive.
pub fn fit_decay(samples: &[(f64, f64)], floor: f64, s_min: f64) -> Result<DecayFit> {
    let kept: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(s, v)| v > floor && s > s_min)
        .map(|&(s, v)| (s, v.log10()))
        .collect();
    if kept.len() < 5 {
        return Err(Error::WindowTooSmall {
            kept: kept.len(),
            need: 5,
            floor,
            s_min,
        });
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|&(s, _)| s).sum::<f64>() / n;
    let my = kept.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|&(s, _)| (s - mx) * (s - mx)).sum();
    let sxy: f64 = kept.iter().map(|&(s, y)| (s - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "decay fit needs at least two distinct distances".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = kept.iter().map(|&(_, y)| (y - my) * (y - my)).sum();
    let ss_res: f64 = kept
        .iter()
        .map(|&(s, y)| {
            let e = y - (slope * s + intercept);
            e * e
        })
        .sum();
    let r2 = if ss_tot <= 1e-30 {
        0.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(DecayFit {
        nu: -slope * std::f64::consts::LN_10,
        log_c: intercept,
        r2,
        n_used: kept.len(),
        floor,
    })
}

pub const DEFAULT_DECAY_FLOOR: f64 = 1e-9;
pub const DEFAULT_DECAY_S_MIN: f64 = 2.0;

/// Fits the decay of one Lagrange function's kernel coefficients against
/// distance from its center. Returns the fit plus the prefactor normalized
/// by q^{2m−d}, which removes the separation-radius growth and makes the
/// constant comparable across node counts.
pub fn coefficient_decay(
    spec: KernelSpec,
    a: &LagrangeCoeffMatrix,
    nodes: &NodeSet,
    xi: usize,
    stats: &MeshStats,
    floor: f64,
) -> Result<(DecayFit, f64)> {
    let n = a.n();
    if xi >= n || nodes.len() != n {
        return Err(Error::InvalidInput(format!(
            "center {xi} / matrix {n} / nodes {} mismatch",
            nodes.len()
        )));
    }
    let center = nodes.point(xi);
    let manifold = nodes.manifold();
    let samples: Vec<(f64, f64)> = (0..n)
        .filter(|&z| z != xi)
        .map(|z| {
            (
                manifold.distance(center, nodes.point(z)) / stats.h,
                a.a[(z, xi)].abs(),
            )
        })
        .collect();
    let fit = fit_decay(&samples, floor, DEFAULT_DECAY_S_MIN)?;
    let exponent = 2.0 * spec.order() as f64 - spec.intrinsic_dim() as f64;
    let c_normalized = fit.c() * stats.q.powf(exponent);
    Ok((fit, c_normalized))
}

/// Fits the decay of a latitudinal profile, interpreting latitude as
/// geodesic distance from the (polar) center.
pub fn lagrange_decay(
    profile: &LatitudinalProfile,
    stats: &MeshStats,
    floor: f64,
) -> Result<DecayFit> {
    let samples: Vec<(f64, f64)> = profile
        .latitudes
        .iter()
        .zip(&profile.values)
        .map(|(&lat, &v)| (lat / stats.h, v))
        .collect();
    fit_decay(&samples, floor, DEFAULT_DECAY_S_MIN)
}

/// Evaluates Σ_ξ a_ξ χ̃_ξ at the given points via the basis coefficients.
pub fn eval_combination(
    spec: KernelSpec,
    nodes: &NodeSet,
    basis: &SparseLocalBasis,
    a: &[f64],
    points: &[Point3],
) -> Result<Vec<f64>> {
    if a.len() != basis.n() || basis.n() != nodes.len() {
        return Err(Error::InvalidInput(format!(
            "coefficient length {} does not match basis ({}) or nodes ({})",
            a.len(),
            basis.n(),
            nodes.len()
        )));
    }
    let w = basis.apply_a(a);
    let v = basis.apply_b(a);
    let coeffs = InterpolantCoeffs { a: w, b: v };
    points
        .par_iter()
        .map(|&x| evaluate(spec, nodes, &coeffs, x))
        .collect()
}

/// Estimates the L_p stability ratio ‖Σ a_ξ χ̃_ξ‖_p / (q^{d/p}·‖a‖_p) over
/// seeded random sign vectors. Norms use an equal-weight Fibonacci
/// quadrature set of 20·N points.
pub fn stability_ratio(
    spec: KernelSpec,
    nodes: &NodeSet,
    basis: &SparseLocalBasis,
    stats: &MeshStats,
    p: NormP,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if trials == 0 {
        return Err(Error::InvalidInput(
            "stability estimate needs at least one trial".into(),
        ));
    }
    if nodes.manifold() != Manifold::Sphere2 {
        return Err(Error::InvalidInput(
            "stability quadrature is defined on the sphere".into(),
        ));
    }
    let n = nodes.len();
    let quad = probe_points(Manifold::Sphere2, 20 * n);
    let weight = 4.0 * std::f64::consts::PI / quad.len() as f64;
    let d = spec.intrinsic_dim() as f64;

    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0f64;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let a: Vec<f64> = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let vals = eval_combination(spec, nodes, basis, &a, &quad)?;
        let (num, den) = match p {
            NormP::Two => (
                (vals.iter().map(|v| v * v).sum::<f64>() * weight).sqrt(),
                stats.q.powf(d / 2.0) * (n as f64).sqrt(),
            ),
            NormP::Inf => (vals.iter().fold(0.0f64, |m, v| m.max(v.abs())), 1.0),
        };
        let ratio = num / den;
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);
    }
    Ok(StabilityReport {
        p,
        ratio_min,
        ratio_max,
        trials,
        seed,
    })
}
