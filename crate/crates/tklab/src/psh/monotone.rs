//! Radial monotonicity of torus averages.
//!
//! When a plurisubharmonic field extends across the degenerate locus
//! `{z_j = 0}`, its orbit average `F` is non-decreasing in each log-radius:
//! `F` is convex in `x_j` with slope tending to the (finite) limit value's
//! slope `0` as `x_j → -∞`, so the slope is nonnegative everywhere. The
//! differential form of the same statement is the identity
//!
//! ```text
//!   d²F/dx_j² = (2π)^{-n} ∬ (f_{x_j x_j} + f_{y_j y_j}) dy
//! ```
//!
//! — the angular part integrates to zero over full periods, so the radial
//! curvature of the average is the average of the per-variable Laplacian,
//! which is a diagonal entry of the Levi form and hence nonnegative.
//!
//! Without the extension hypothesis the slope argument has no anchor and the
//! statement is false (`Σ x_j²` on the cylinder is the stock counterexample:
//! its average is decreasing for `x_j < 0`). The checks here therefore
//! refuse fields that do not declare the extension.

use std::f64::consts::TAU;

use super::{torus_average_with, PshError};
use crate::funcspace::{fd_partial, per_variable_laplacian, PeriodicScalarField, QuadratureRule};

/// Samples and verdicts from a radial monotonicity sweep.
#[derive(Clone, Debug)]
pub struct MonotoneReport {
    pub axis: usize,
    /// Non-decrease of `F` between consecutive samples, within tolerance.
    pub holds: bool,
    /// Most negative consecutive difference encountered (0 if none).
    pub worst_drop: f64,
    /// `(t, F)` along the sweep.
    pub samples: Vec<(f64, f64)>,
    /// Smallest sampled value of the averaged per-variable Laplacian.
    pub kernel_min: f64,
    /// Whether the averaged per-variable Laplacian stayed nonnegative.
    pub kernel_nonneg: bool,
}

/// Sweep `x[axis] = t` over `[t_lo, t_hi]` and check that the torus average
/// is non-decreasing in `t`. Requires the field to extend across the
/// degenerate locus; the quadrature rule is frozen over the whole sweep so
/// consecutive averages are comparable at the `1e-10` level.
pub fn monotone_in_radius(
    field: &PeriodicScalarField,
    axis: usize,
    base: &[f64],
    t_lo: f64,
    t_hi: f64,
    steps: usize,
) -> Result<MonotoneReport, PshError> {
    if !field.extends_across_zero() {
        return Err(PshError::ExtensionRequired);
    }
    let n = field.n();
    if axis >= n {
        return Err(PshError::Invalid(format!("axis {axis} out of range for dimension {n}")));
    }
    if base.len() != n {
        return Err(PshError::Invalid("base point has the wrong dimension".into()));
    }
    if !(t_lo < t_hi) || steps < 2 {
        return Err(PshError::Invalid("sweep needs t_lo < t_hi and at least 2 steps".into()));
    }

    let at = |t: f64| {
        let mut x = base.to_vec();
        x[axis] = t;
        x
    };
    let probes: Vec<Vec<f64>> = [t_lo, 0.5 * (t_lo + t_hi), t_hi].iter().map(|&t| at(t)).collect();
    let rule = QuadratureRule::calibrate(field, &probes)?;

    let mut samples = Vec::with_capacity(steps);
    for k in 0..steps {
        let t = t_lo + (t_hi - t_lo) * k as f64 / (steps - 1) as f64;
        let f = torus_average_with(field, &at(t), &rule)?;
        samples.push((t, f));
    }

    let mut worst_drop = 0.0f64;
    let mut holds = true;
    for w in samples.windows(2) {
        let d = w[1].1 - w[0].1;
        let scale = 1.0 + w[0].1.abs().max(w[1].1.abs());
        if d < worst_drop {
            worst_drop = d;
        }
        if d < -1e-10 * scale {
            holds = false;
        }
    }

    let mut kernel_min = f64::INFINITY;
    for &(t, _) in &samples {
        let x = at(t);
        let avg = rule.integrate(|y| {
            per_variable_laplacian(field, axis, &x, y).unwrap_or(f64::NAN)
        }) / TAU.powi(n as i32);
        if !avg.is_finite() {
            return Err(PshError::Invalid("non-finite Laplacian average in sweep".into()));
        }
        kernel_min = kernel_min.min(avg);
    }
    let kernel_nonneg = kernel_min >= -1e-9 * (1.0 + kernel_min.abs());

    Ok(MonotoneReport { axis, holds, worst_drop, samples, kernel_min, kernel_nonneg })
}

/// Both sides of the radial curvature identity at `x`: the finite-difference
/// second derivative of the average in `x[axis]`, and the average of the
/// per-variable Laplacian. Equal for any smooth periodic field.
pub fn radial_curvature_identity(
    field: &PeriodicScalarField,
    axis: usize,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<(f64, f64), PshError> {
    let n = field.n();
    if axis >= n {
        return Err(PshError::Invalid(format!("axis {axis} out of range for dimension {n}")));
    }
    torus_average_with(field, x, rule)?; // surface evaluation errors eagerly
    let lhs = fd_partial(
        |p| {
            torus_average_with(field, p, rule).unwrap_or(f64::NAN)
        },
        &[axis, axis],
        x,
        Some(1e-2 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()))),
    );
    let rhs = rule.integrate(|y| per_variable_laplacian(field, axis, x, y).unwrap_or(f64::NAN))
        / TAU.powi(n as i32);
    if !lhs.is_finite() || !rhs.is_finite() {
        return Err(PshError::Invalid("non-finite value in curvature identity".into()));
    }
    Ok((lhs, rhs))
}
