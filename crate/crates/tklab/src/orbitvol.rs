//! Volumes of torus orbits, moment maps, critical orbits and boundary decay.
//!
//! For an invariant Kähler potential `φ` the orbit through log-radius `x` has
//! volume `Vol(x) = π^n √(det Hess φ(x))` in the induced metric, so
//!
//! ```text
//!   log Vol = n log π + ½ log det S,      S = Hess φ,
//!   ∇(log Vol)_j = ½ tr(S⁻¹ S_j),
//!   Hess(log Vol) = −2 R,
//! ```
//!
//! which ties the convexity type of `log Vol` to the sign of the Ricci form
//! and makes volume-critical orbits (the minimal Lagrangian tori) the
//! stationary points of a concave maximization problem precisely when the
//! curvature is positive.
//!
//! Stable evaluation: `log det S` comes from the oracle's log-space subset
//! expansion whenever one exists. That path is positive-semidefinite by
//! construction (every subset term is nonnegative), so no dense eigenvalue
//! check is run on it — the dense check at `|x| ≈ 20` would itself drown in
//! cancellation, which is what the expansion is there to avoid.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DVector;
use rayon::prelude::*;

use crate::funcspace::{
    fd_partial, integrate_auto, FuncError, InvariantPotential, PeriodicScalarField, QuadratureRule,
};
use crate::kahler::{
    classify_ricci, metric_at, ricci_form, tags_consistent, KahlerError, SignClassification,
    SignTag,
};
use crate::psh::{check_convexity, ConvexityVerdict, GridSpec, PshError};

/// `log Vol(x) = n log π + ½ log det Hess φ(x)`.
pub fn log_j_volume(potential: &InvariantPotential, x: &[f64]) -> Result<f64, KahlerError> {
    let n = potential.n() as f64;
    match potential.log_det_hess(x)? {
        Some(v) if v > f64::NEG_INFINITY => Ok(n * std::f64::consts::PI.ln() + 0.5 * v),
        Some(_) => Err(KahlerError::NotKahler { point: x.to_vec(), eigenvalue: 0.0 }),
        None => {
            let m = metric_at(potential, x)?;
            Ok(n * std::f64::consts::PI.ln() + 0.5 * m.log_det_hess)
        }
    }
}

/// Riemannian volume of the torus orbit at `x`.
pub fn j_volume(potential: &InvariantPotential, x: &[f64]) -> Result<f64, KahlerError> {
    Ok(log_j_volume(potential, x)?.exp())
}

/// Orbit volume for a general (not necessarily invariant) volume density
/// `H(x, y)`: `∫ √H dy` over the torus, refined by doubling; a Richardson
/// extrapolate is used if the doubling sequence hits its cap (which happens
/// when `H` touches zero and `√H` has a kink). Strictly negative density
/// samples are an error; exact zeros are allowed.
pub fn j_volume_general(
    density: &PeriodicScalarField,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64, KahlerError> {
    let n = density.n();
    density.eval(x, &vec![0.0; n])?;
    // worst negative sample, carried out of the parallel sampling as bits
    let worst = AtomicU64::new(0.0f64.to_bits());
    let out = integrate_auto(n, rule.points_per_angle(), |y| {
        let h = density.eval(x, y).unwrap_or(f64::NAN);
        if h < 0.0 {
            let mut cur = f64::from_bits(worst.load(Ordering::Relaxed));
            while h < cur {
                match worst.compare_exchange(
                    cur.to_bits(),
                    h.to_bits(),
                    Ordering::Relaxed,
                    Ordering::Relaxed,
                ) {
                    Ok(_) => break,
                    Err(prev) => cur = f64::from_bits(prev),
                }
            }
            return f64::NAN;
        }
        h.sqrt()
    });
    let worst = f64::from_bits(worst.load(Ordering::Relaxed));
    if worst < 0.0 {
        return Err(KahlerError::Func(FuncError::NonPositiveDensity { value: worst }));
    }
    if !out.value.is_finite() {
        return Err(KahlerError::Invalid("non-finite density sample in orbit volume".into()));
    }
    Ok(out.value)
}

fn logvol_gradient(potential: &InvariantPotential, x: &[f64]) -> Result<DVector<f64>, KahlerError> {
    let s = potential.hessian(x)?;
    let chol = s.clone().cholesky().ok_or_else(|| {
        let min_ev = s.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        KahlerError::NotKahler { point: x.to_vec(), eigenvalue: min_ev }
    })?;
    let n = potential.n();
    let mut g = DVector::zeros(n);
    for (j, sj) in potential.hessian_derivatives(x)?.into_iter().enumerate() {
        g[j] = 0.5 * chol.solve(&sj).trace();
    }
    Ok(g)
}

/// The moment map of the torus action, `μ(x) = ½ ∇φ(x)`.
pub fn moment_map(potential: &InvariantPotential, x: &[f64]) -> Result<Vec<f64>, KahlerError> {
    Ok(potential.gradient(x)?.into_iter().map(|v| 0.5 * v).collect())
}

/// Largest absolute mismatch between the finite-difference Jacobian of the
/// moment map and `½ Hess φ` at `x` — zero for an exact Hamiltonian torus
/// action, small for a correctly wired one.
pub fn hamiltonian_residual(
    potential: &InvariantPotential,
    x: &[f64],
) -> Result<f64, KahlerError> {
    let n = potential.n();
    let s = potential.hessian(x)?;
    moment_map(potential, x)?; // surface evaluation errors before differencing
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let fd = fd_partial(
                |p| moment_map(potential, p).map(|m| m[j]).unwrap_or(f64::NAN),
                &[k],
                x,
                None,
            );
            let res = (fd - 0.5 * s[(j, k)]).abs();
            if !res.is_finite() {
                return Err(KahlerError::Invalid(format!(
                    "non-finite moment-map derivative ({j},{k}) at {x:?}"
                )));
            }
            worst = worst.max(res);
        }
    }
    Ok(worst)
}

/// One row of an orbit profile over a grid of log-radii.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ProfileRow {
    pub x: Vec<f64>,
    /// Volume density `H = det h` of the invariant metric.
    pub density: f64,
    pub volume: f64,
    pub log_volume: f64,
    pub ricci_min: f64,
    pub ricci_max: f64,
    pub moment: Vec<f64>,
}

/// Orbit data tabulated over a grid, in the grid's lexicographic order.
#[derive(Clone, Debug, serde::Serialize)]
pub struct OrbitProfile {
    pub n: usize,
    pub potential: String,
    pub rows: Vec<ProfileRow>,
}

/// Tabulate density, volume, curvature extremes and moment coordinates over
/// a grid of log-radii.
pub fn logvol_profile(
    potential: &InvariantPotential,
    grid: &GridSpec,
) -> Result<OrbitProfile, KahlerError> {
    if grid.dim() != potential.n() {
        return Err(KahlerError::Invalid(format!(
            "grid dimension {} does not match potential dimension {}",
            grid.dim(),
            potential.n()
        )));
    }
    let points = grid.points();
    let rows: Vec<Result<ProfileRow, KahlerError>> = points
        .par_iter()
        .map(|x| {
            let m = metric_at(potential, x)?;
            let r = ricci_form(potential, x)?;
            let lv = log_j_volume(potential, x)?;
            Ok(ProfileRow {
                x: x.clone(),
                density: m.det,
                volume: lv.exp(),
                log_volume: lv,
                ricci_min: r.min_eigenvalue,
                ricci_max: r.max_eigenvalue,
                moment: moment_map(potential, x)?,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(OrbitProfile { n: potential.n(), potential: potential.name().to_string(), rows })
}

/// Joint curvature-sign / log-volume-convexity verdict over a box.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub ricci: SignClassification,
    pub logvol: ConvexityVerdict,
    /// Whether the two verdicts land in matching slots of the
    /// sign/convexity dictionary.
    pub consistent: bool,
}

/// Classify the Ricci sign and the log-volume convexity over `[lo, hi]` and
/// check them against each other through `Hess(log Vol) = −2R`.
pub fn consistency_theorem(
    potential: &InvariantPotential,
    lo: &[f64],
    hi: &[f64],
    max_spacing: f64,
    convexity_per_axis: usize,
    segments: usize,
    convex_tol: Option<f64>,
) -> Result<ConsistencyReport, KahlerError> {
    let ricci = classify_ricci(potential, lo, hi, max_spacing, None)?;
    let g = |p: &[f64]| -> Result<f64, PshError> {
        log_j_volume(potential, p).map_err(|e| PshError::Invalid(e.to_string()))
    };
    let logvol = check_convexity(&g, lo, hi, convexity_per_axis, segments, convex_tol)?;
    let consistent = tags_consistent(ricci.tag, logvol.tag);
    Ok(ConsistencyReport { ricci, logvol, consistent })
}

/// Errors from the critical-orbit solver.
#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Kahler(#[from] KahlerError),
    #[error("iterate left the search region at {0:?}")]
    DivergedOutOfRegion(Vec<f64>),
    #[error("no convergence within {0} iterations")]
    MaxIterations(usize),
}

/// A volume-critical orbit (stationary point of `log Vol`).
#[derive(Clone, Debug)]
pub struct CriticalOrbitResult {
    pub x_star: Vec<f64>,
    pub volume: f64,
    pub log_volume: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Sign of the Ricci form over the search region.
    pub ricci_tag: SignTag,
    /// True when the region classification certifies strict concavity of
    /// `log Vol` (positive Ricci), making the critical orbit the unique
    /// maximizer in the region.
    pub unique: bool,
}

const MAX_NEWTON_ITERS: usize = 100;

/// Ascend `log Vol` from `x0` inside the box `[lo, hi]`.
///
/// Newton steps `(2R)⁻¹ ∇ log Vol` with Armijo backtracking when the
/// curvature is positive definite; plain backtracked gradient ascent
/// otherwise. Terminates when `‖∇ log Vol‖_∞ ≤ 1e-10 (1 + |log Vol|)`.
pub fn find_critical_orbit(
    potential: &InvariantPotential,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
) -> Result<CriticalOrbitResult, SolveError> {
    let n = potential.n();
    if x0.len() != n || lo.len() != n || hi.len() != n {
        return Err(KahlerError::Invalid("solver inputs have mismatched dimensions".into()).into());
    }
    let inside = |x: &[f64]| x.iter().zip(lo.iter().zip(hi)).all(|(&v, (&l, &h))| v >= l && v <= h);
    if !inside(x0) {
        return Err(SolveError::DivergedOutOfRegion(x0.to_vec()));
    }

    let mut x = x0.to_vec();
    let mut value = log_j_volume(potential, &x)?;
    let mut iterations = 0usize;
    let mut grad_norm;
    loop {
        let g = logvol_gradient(potential, &x)?;
        grad_norm = g.amax();
        if grad_norm <= 1e-10 * (1.0 + value.abs()) {
            break;
        }
        if iterations >= MAX_NEWTON_ITERS {
            return Err(SolveError::MaxIterations(MAX_NEWTON_ITERS));
        }
        iterations += 1;

        // −Hess(log Vol) = 2R; positive definite exactly when Newton ascent
        // is trustworthy
        let r = ricci_form(potential, &x)?;
        let neg_hess = &r.matrix * 2.0;
        let direction: DVector<f64> = match neg_hess.clone().cholesky() {
            Some(chol) => chol.solve(&g),
            None => &g * (1.0 / (1.0 + grad_norm)), // scaled gradient fallback
        };
        let slope: f64 = g.dot(&direction);
        // a descent-direction sanity guard: fall back to the gradient if the
        // Newton system produced an ascent-incompatible direction
        let (direction, slope) = if slope > 0.0 {
            (direction, slope)
        } else {
            let d = &g * (1.0 / (1.0 + grad_norm));
            let s = g.dot(&d);
            (d, s)
        };

        let mut alpha = 1.0f64;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> =
                x.iter().zip(direction.iter()).map(|(v, d)| v + alpha * d).collect();
            if !inside(&trial) {
                alpha *= 0.5;
                continue;
            }
            let trial_value = log_j_volume(potential, &trial)?;
            if trial_value >= value + 1e-4 * alpha * slope {
                x = trial;
                value = trial_value;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // the line search exhausted itself inside the region: either the
            // iterate is pinned to the boundary or progress stalled
            return Err(SolveError::DivergedOutOfRegion(x));
        }
    }

    let spacing = (0..n)
        .map(|j| (hi[j] - lo[j]) / 40.0)
        .fold(0.0f64, f64::max)
        .clamp(0.05, 0.25);
    let class = classify_ricci(potential, lo, hi, spacing, None)?;
    Ok(CriticalOrbitResult {
        volume: value.exp(),
        log_volume: value,
        grad_norm,
        iterations,
        ricci_tag: class.tag,
        unique: class.tag == SignTag::Positive,
        x_star: x,
    })
}

/// Log-volume decay along a ray out of a compactifiable potential.
#[derive(Clone, Debug)]
pub struct DecayReport {
    pub direction: Vec<f64>,
    pub t_max: f64,
    /// `(t, log Vol(t · direction))` samples.
    pub samples: Vec<(f64, f64)>,
    /// First sampled `t` after which the log-volume decreases monotonically
    /// to the end of the ray, if any.
    pub monotone_after: Option<f64>,
    /// `log Vol(t_max · d) − log Vol(0)`.
    pub ratio_log: f64,
    /// Eventual monotone decrease and a terminal ratio at most `1e-8`.
    pub holds: bool,
}

/// Check that orbit volumes collapse along the ray `t ↦ t · direction`,
/// `t ∈ [0, t_max]`: the potential must be marked compactifiable (volumes of
/// a non-compactifiable cylinder do not decay, and the check refuses to
/// pretend otherwise).
pub fn boundary_decay(
    potential: &InvariantPotential,
    direction: &[f64],
    t_max: f64,
    steps: usize,
) -> Result<DecayReport, KahlerError> {
    let n = potential.n();
    if !potential.compactifiable() {
        return Err(KahlerError::Invalid(format!(
            "potential `{}` is not marked compactifiable; boundary decay is undefined",
            potential.name()
        )));
    }
    if direction.len() != n || direction.iter().all(|&d| d == 0.0) {
        return Err(KahlerError::Invalid("decay direction must be a nonzero vector".into()));
    }
    if !(t_max > 0.0) || steps < 3 {
        return Err(KahlerError::Invalid("decay ray needs t_max > 0 and at least 3 steps".into()));
    }

    let mut samples = Vec::with_capacity(steps);
    for k in 0..steps {
        let t = t_max * k as f64 / (steps - 1) as f64;
        let x: Vec<f64> = direction.iter().map(|d| t * d).collect();
        samples.push((t, log_j_volume(potential, &x)?));
    }

    // latest strict ascent (or plateau) decides where monotone decrease starts
    let mut monotone_from = 0usize;
    for k in 1..samples.len() {
        if samples[k].1 >= samples[k - 1].1 {
            monotone_from = k;
        }
    }
    let monotone_after =
        if monotone_from + 1 < samples.len() { Some(samples[monotone_from].0) } else { None };
    let ratio_log = samples[samples.len() - 1].1 - samples[0].1;
    let holds = monotone_after.is_some() && ratio_log <= 1e-8_f64.ln();
    Ok(DecayReport {
        direction: direction.to_vec(),
        t_max,
        samples,
        monotone_after,
        ratio_log,
        holds,
    })
}
