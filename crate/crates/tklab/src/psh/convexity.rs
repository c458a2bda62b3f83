//! Convexity classification of scalar functions on a box.
//!
//! Two independent stages, both required:
//!
//! 1. finite-difference Hessians on a uniform grid, classified by the extreme
//!    eigenvalues over all grid points;
//! 2. randomized midpoint probes `g((p+q)/2) ≤ (g(p)+g(q))/2` on segments
//!    drawn from a fixed-seed generator, which catch convexity failures the
//!    grid misses (and validate the Hessian verdict without derivatives).
//!
//! A midpoint contradiction always demotes the verdict to `Indefinite`; the
//! two stages disagreeing is precisely the situation a classifier must not
//! paper over.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::PshError;
use crate::funcspace::fd_partial;

/// Eigenvalue / midpoint tolerance used when none is supplied.
pub const DEFAULT_CONVEX_TOL: f64 = 1e-7;

const SEGMENT_SEED: u64 = 0x5EED;

/// Convexity type of a function on a box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityTag {
    Linear,
    StrictlyConvex,
    Convex,
    StrictlyConcave,
    Concave,
    Indefinite,
}

impl ConvexityTag {
    pub fn is_convex(self) -> bool {
        matches!(self, ConvexityTag::Linear | ConvexityTag::StrictlyConvex | ConvexityTag::Convex)
    }

    pub fn is_concave(self) -> bool {
        matches!(
            self,
            ConvexityTag::Linear | ConvexityTag::StrictlyConcave | ConvexityTag::Concave
        )
    }
}

impl std::fmt::Display for ConvexityTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConvexityTag::Linear => "linear",
            ConvexityTag::StrictlyConvex => "strictly_convex",
            ConvexityTag::Convex => "convex",
            ConvexityTag::StrictlyConcave => "strictly_concave",
            ConvexityTag::Concave => "concave",
            ConvexityTag::Indefinite => "indefinite",
        };
        f.write_str(s)
    }
}

/// Everything the classifier measured.
#[derive(Clone, Debug)]
pub struct ConvexityVerdict {
    pub tag: ConvexityTag,
    /// Extremes of the Hessian spectrum over the grid.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub hessian_points: usize,
    pub segments: usize,
    /// Midpoint probes strictly above the chord (violating convexity).
    pub convex_violations: usize,
    /// Midpoint probes strictly below the chord (violating concavity).
    pub concave_violations: usize,
}

fn grid_points(lo: &[f64], hi: &[f64], per_axis: usize) -> Vec<Vec<f64>> {
    let dim = lo.len();
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut flat| {
            let mut p = vec![0.0; dim];
            for j in (0..dim).rev() {
                let k = flat % per_axis;
                flat /= per_axis;
                p[j] = lo[j] + (hi[j] - lo[j]) * k as f64 / (per_axis - 1) as f64;
            }
            p
        })
        .collect()
}

/// Classify `g` on the box `[lo, hi]`.
///
/// `per_axis` grid points per axis for the Hessian stage (≥ 3), `segments`
/// random midpoint probes for the chord stage. The same `tol` bounds both
/// the eigenvalue dead zone and the scaled midpoint slack.
pub fn check_convexity<G>(
    g: &G,
    lo: &[f64],
    hi: &[f64],
    per_axis: usize,
    segments: usize,
    tol: Option<f64>,
) -> Result<ConvexityVerdict, PshError>
where
    G: Fn(&[f64]) -> Result<f64, PshError> + Sync,
{
    let tol = tol.unwrap_or(DEFAULT_CONVEX_TOL);
    let dim = lo.len();
    if dim == 0 || hi.len() != dim {
        return Err(PshError::Invalid("convexity box has mismatched bounds".into()));
    }
    if lo.iter().zip(hi).any(|(l, h)| l >= h) {
        return Err(PshError::Invalid("convexity box must have positive extent".into()));
    }
    let per_axis = per_axis.max(3);

    // stage 1: Hessian spectrum over the grid
    let points = grid_points(lo, hi, per_axis);
    let spectra: Vec<Result<(f64, f64), PshError>> = points
        .par_iter()
        .map(|p| hessian_extremes(g, p))
        .collect();
    let mut min_eig = f64::INFINITY;
    let mut max_eig = f64::NEG_INFINITY;
    for s in spectra {
        let (lo_ev, hi_ev) = s?;
        min_eig = min_eig.min(lo_ev);
        max_eig = max_eig.max(hi_ev);
    }

    let mut tag = if min_eig.abs() <= tol && max_eig.abs() <= tol {
        ConvexityTag::Linear
    } else if min_eig >= tol {
        ConvexityTag::StrictlyConvex
    } else if min_eig >= -tol {
        ConvexityTag::Convex
    } else if max_eig <= -tol {
        ConvexityTag::StrictlyConcave
    } else if max_eig <= tol {
        ConvexityTag::Concave
    } else {
        ConvexityTag::Indefinite
    };

    // stage 2: midpoint probes on pre-generated segments (fixed seed, so the
    // verdict is reproducible; generation is sequential, evaluation parallel)
    let mut rng = ChaCha8Rng::seed_from_u64(SEGMENT_SEED);
    let mut pairs = Vec::with_capacity(segments);
    for _ in 0..segments {
        let mut p = vec![0.0; dim];
        let mut q = vec![0.0; dim];
        for j in 0..dim {
            p[j] = rng.gen_range(lo[j]..=hi[j]);
            q[j] = rng.gen_range(lo[j]..=hi[j]);
        }
        pairs.push((p, q));
    }
    let probes: Vec<Result<(f64, f64), PshError>> = pairs
        .par_iter()
        .map(|(p, q)| {
            let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
            let gp = g(p)?;
            let gq = g(q)?;
            let gm = g(&m)?;
            let chord = 0.5 * (gp + gq);
            let scale = 1.0 + gp.abs().max(gq.abs()).max(gm.abs());
            Ok(((gm - chord) / scale, scale))
        })
        .collect();
    let mut convex_violations = 0usize;
    let mut concave_violations = 0usize;
    for r in probes {
        let (excess, _) = r?;
        if excess > tol {
            convex_violations += 1;
        }
        if excess < -tol {
            concave_violations += 1;
        }
    }

    if tag.is_convex() && convex_violations > 0 {
        tag = ConvexityTag::Indefinite;
    }
    if tag.is_concave() && concave_violations > 0 {
        tag = ConvexityTag::Indefinite;
    }

    Ok(ConvexityVerdict {
        tag,
        min_eigenvalue: min_eig,
        max_eigenvalue: max_eig,
        hessian_points: points.len(),
        segments,
        convex_violations,
        concave_violations,
    })
}

fn hessian_extremes<G>(g: &G, p: &[f64]) -> Result<(f64, f64), PshError>
where
    G: Fn(&[f64]) -> Result<f64, PshError> + Sync,
{
    g(p)?; // surface domain errors with context before differencing
    let dim = p.len();
    // wide step: second differences amplify evaluation noise by ~5/h², and
    // the g's fed in here are quadrature-backed more often than not
    let h = 1e-2 * p.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let eval = |q: &[f64]| g(q).unwrap_or(f64::NAN);
    let mut hess = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for k in j..dim {
            let v = fd_partial(eval, &[j, k], p, Some(h));
            if !v.is_finite() {
                return Err(PshError::Invalid(format!(
                    "non-finite Hessian entry ({j},{k}) at {p:?}"
                )));
            }
            hess[(j, k)] = v;
            hess[(k, j)] = v;
        }
    }
    let ev = hess.symmetric_eigen().eigenvalues;
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}
