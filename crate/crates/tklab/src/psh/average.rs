//! Orbit averages and orbit maxima of torus fields.
//!
//! `F(x) = (2π)^{-n} ∬ f(x, y) dy` is the average of `f` over the compact
//! torus orbit at log-radius `x`; `M(x) = max_y f(x, y)` is the orbit
//! maximum. For plurisubharmonic `f` both are convex functions of `x`, `F` is
//! dominated by `M`, and the maximum of `f` over a closed polydisk is
//! attained on the distinguished boundary (the orbit through the corner).

use std::f64::consts::TAU;

use super::{GridSpec, PshError};
use crate::funcspace::{torus_quadrature, torus_quadrature_fixed, PeriodicScalarField, QuadratureRule};

/// Torus average with automatic quadrature refinement starting from `rule`.
pub fn torus_average(
    field: &PeriodicScalarField,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64, PshError> {
    let raw = torus_quadrature(field, x, rule)?;
    Ok(raw / TAU.powi(field.n() as i32))
}

/// Torus average with the fixed rule, no refinement. Use a calibrated rule
/// when the averages will be differenced (finite-difference convexity of
/// `F`), so refinement switchovers cannot inject value jumps.
pub fn torus_average_with(
    field: &PeriodicScalarField,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64, PshError> {
    let raw = torus_quadrature_fixed(field, x, rule)?;
    Ok(raw / TAU.powi(field.n() as i32))
}

/// An orbit maximum together with its maximizing angles.
#[derive(Clone, Debug)]
pub struct OrbitExtremum {
    pub value: f64,
    pub argmax_y: Vec<f64>,
}

fn default_scan(n: usize) -> usize {
    match n {
        1 | 2 => 64,
        3 => 24,
        _ => 8,
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a 1-d slice on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, mut g: impl FnMut(f64) -> f64) -> (f64, f64) {
    let mut c = hi - GOLDEN * (hi - lo);
    let mut d = lo + GOLDEN * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..70 {
        if gc >= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - GOLDEN * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + GOLDEN * (hi - lo);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Orbit maximum `M(x) = max_y f(x, y)`: a dense lattice scan followed by
/// cyclic per-angle golden-section refinement around the best node.
pub fn hadamard_max(
    field: &PeriodicScalarField,
    x: &[f64],
    scan_per_angle: Option<usize>,
) -> Result<OrbitExtremum, PshError> {
    let n = field.n();
    let scan = scan_per_angle.unwrap_or_else(|| default_scan(n)).max(2);
    // surface evaluation errors once; the scan then treats failures as -inf
    field.eval(x, &vec![0.0; n])?;
    let eval = |y: &[f64]| field.eval(x, y).unwrap_or(f64::NEG_INFINITY);

    let total = scan.pow(n as u32);
    let mut best = f64::NEG_INFINITY;
    let mut best_y = vec![0.0; n];
    let mut y = vec![0.0; n];
    for mut flat in 0..total {
        for j in (0..n).rev() {
            let k = flat % scan;
            flat /= scan;
            y[j] = TAU * k as f64 / scan as f64;
        }
        let v = eval(&y);
        if v > best {
            best = v;
            best_y.copy_from_slice(&y);
        }
    }

    // refine: each angle restricted to ± one lattice spacing
    let delta = TAU / scan as f64;
    let mut current = best_y.clone();
    let mut value = best;
    for _sweep in 0..100 {
        let before = value;
        for j in 0..n {
            let center = current[j];
            let mut probe = current.clone();
            let (t, v) = golden_max(center - delta, center + delta, |t| {
                probe[j] = t;
                eval(&probe)
            });
            if v > value {
                value = v;
                current[j] = t;
            }
        }
        if value - before <= 1e-13 * (1.0 + value.abs()) {
            break;
        }
    }
    for t in current.iter_mut() {
        *t = t.rem_euclid(TAU);
    }
    Ok(OrbitExtremum { value, argmax_y: current })
}

/// Outcome of a distinguished-boundary maximum-principle check on the closed
/// polydisk with log-radii `corner`.
#[derive(Clone, Debug)]
pub struct BoundaryMaxReport {
    /// `M(corner)`: the maximum over the distinguished boundary orbit.
    pub boundary_max: f64,
    /// Largest orbit maximum over the sampled interior radii.
    pub interior_max: f64,
    /// Radii where the interior maximum was attained.
    pub witness_x: Vec<f64>,
    /// `interior_max ≤ boundary_max + 1e-9 (1 + |boundary_max|)`.
    pub holds: bool,
    pub interior_points: usize,
}

/// Check that the maximum over a closed polydisk is attained on the
/// distinguished boundary: every interior orbit maximum must be dominated by
/// the boundary orbit maximum. Interior radii are sampled on a uniform grid
/// reaching `depth` below the corner in every log-radius.
pub fn distinguished_boundary_max(
    field: &PeriodicScalarField,
    corner: &[f64],
    depth: f64,
    per_axis: usize,
) -> Result<BoundaryMaxReport, PshError> {
    if depth <= 0.0 {
        return Err(PshError::Invalid("interior depth must be positive".into()));
    }
    let n = field.n();
    if corner.len() != n {
        return Err(PshError::Invalid(format!(
            "corner has {} coordinates for an {n}-dimensional field",
            corner.len()
        )));
    }
    let boundary = hadamard_max(field, corner, None)?;
    let lo: Vec<f64> = corner.iter().map(|c| c - depth).collect();
    let grid = GridSpec::uniform(lo, corner.to_vec(), per_axis.max(2))?;
    let mut interior_max = f64::NEG_INFINITY;
    let mut witness_x = corner.to_vec();
    for x in grid.points() {
        let m = hadamard_max(field, &x, None)?;
        if m.value > interior_max {
            interior_max = m.value;
            witness_x = x;
        }
    }
    let holds = interior_max <= boundary.value + 1e-9 * (1.0 + boundary.value.abs());
    Ok(BoundaryMaxReport {
        boundary_max: boundary.value,
        interior_max,
        witness_x,
        holds,
        interior_points: grid.len(),
    })
}
