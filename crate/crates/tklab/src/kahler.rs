//! Kähler metrics from invariant potentials and their Ricci curvature.
//!
//! An invariant potential `φ(x)` with positive-definite Hessian `S = Hess φ`
//! defines the invariant Kähler metric with component matrix `h = ¼ S` in
//! log coordinates. Its volume density is `det h`, the Ricci potential is
//! `−log det h`, and the Ricci form reduces to the real symmetric matrix
//!
//! ```text
//!   R_jk = -¼ ∂_j ∂_k log det S
//!        = -¼ [ tr(S⁻¹ S_jk) − tr(S⁻¹ S_j S⁻¹ S_k) ]
//! ```
//!
//! with `S_j = ∂_j S`, `S_jk = ∂_j ∂_k S`. Analytic oracles go through the
//! trace formula (two derivative orders beyond the Hessian); bare-closure
//! potentials fall back to finite differences of the Ricci potential.
//!
//! For a non-invariant volume density `H(x, y) > 0` the same object is the
//! Levi form of `−log H`, see [`ricci_general`].

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::funcspace::{fd_partial, FuncError, InvariantPotential, OracleKind, PeriodicScalarField};
use crate::psh::{ConvexityTag, GridSpec, LeviForm, PshError};

/// Eigenvalue dead zone for the sign classifier.
pub const DEFAULT_SIGN_TOL: f64 = 1e-7;
/// Default grid spacing for curvature classification sweeps.
pub const DEFAULT_GRID_SPACING: f64 = 0.05;

/// Errors from the metric and curvature layer.
#[derive(Debug, thiserror::Error)]
pub enum KahlerError {
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error("potential is not Kähler at {point:?}: Hessian eigenvalue {eigenvalue:.6e} ≤ 0")]
    NotKahler { point: Vec<f64>, eigenvalue: f64 },
    #[error("{0}")]
    Invalid(String),
}

impl From<PshError> for KahlerError {
    fn from(e: PshError) -> Self {
        match e {
            PshError::Func(f) => KahlerError::Func(f),
            other => KahlerError::Invalid(other.to_string()),
        }
    }
}

/// The invariant metric at one point of log-orbit space.
#[derive(Clone, Debug)]
pub struct MetricAtPoint {
    pub n: usize,
    /// `S = Hess φ`.
    pub s: DMatrix<f64>,
    /// Metric components `h = ¼ S`.
    pub h: DMatrix<f64>,
    /// `det h`, computed in log space when the oracle allows.
    pub det: f64,
    /// `log det S` (stable subset expansion when available).
    pub log_det_hess: f64,
    /// Smallest eigenvalue of `S`.
    pub min_hessian_eigenvalue: f64,
}

/// Evaluate the metric, verifying positive definiteness.
pub fn metric_at(potential: &InvariantPotential, x: &[f64]) -> Result<MetricAtPoint, KahlerError> {
    let n = potential.n();
    let s = potential.hessian(x)?;
    let eigen = s.clone().symmetric_eigen().eigenvalues;
    let min_ev = eigen.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_ev > 0.0) {
        return Err(KahlerError::NotKahler { point: x.to_vec(), eigenvalue: min_ev });
    }
    let log_det_hess = match potential.log_det_hess(x)? {
        Some(v) => v,
        None => eigen.iter().map(|v| v.ln()).sum(),
    };
    let ln4 = 4.0_f64.ln();
    let det = (log_det_hess - n as f64 * ln4).exp();
    Ok(MetricAtPoint {
        n,
        h: &s * 0.25,
        s,
        det,
        log_det_hess,
        min_hessian_eigenvalue: min_ev,
    })
}

/// Ricci potential `−log det h = n log 4 − log det S`.
pub fn ricci_potential(potential: &InvariantPotential, x: &[f64]) -> Result<f64, KahlerError> {
    let m = metric_at(potential, x)?;
    Ok(potential.n() as f64 * 4.0_f64.ln() - m.log_det_hess)
}

/// The Ricci form at a point, as a real symmetric matrix in the log basis.
#[derive(Clone, Debug)]
pub struct RicciAtPoint {
    pub n: usize,
    pub matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Evaluate the Ricci form of an invariant metric.
pub fn ricci_form(potential: &InvariantPotential, x: &[f64]) -> Result<RicciAtPoint, KahlerError> {
    let n = potential.n();
    let matrix = match potential.kind() {
        OracleKind::Analytic => {
            let s = potential.hessian(x)?;
            let chol = match s.clone().cholesky() {
                Some(c) => c,
                None => {
                    let min_ev = s
                        .symmetric_eigen()
                        .eigenvalues
                        .iter()
                        .cloned()
                        .fold(f64::INFINITY, f64::min);
                    return Err(KahlerError::NotKahler { point: x.to_vec(), eigenvalue: min_ev });
                }
            };
            let s_d = potential.hessian_derivatives(x)?;
            // A_j = S⁻¹ S_j once, reused across all (j, k) pairs
            let a: Vec<DMatrix<f64>> = s_d.iter().map(|sj| chol.solve(sj)).collect();
            let mut r = DMatrix::zeros(n, n);
            for j in 0..n {
                for k in j..n {
                    let s_jk = potential.hessian_second_derivative(j, k, x)?;
                    let t1 = chol.solve(&s_jk).trace();
                    let t2 = (&a[j] * &a[k]).trace();
                    let v = -0.25 * (t1 - t2);
                    r[(j, k)] = v;
                    r[(k, j)] = v;
                }
            }
            r
        }
        OracleKind::FiniteDifference => {
            // R = ¼ Hess(ricci_potential); the inner metric check still runs
            ricci_potential(potential, x)?;
            let mut r = DMatrix::zeros(n, n);
            for j in 0..n {
                for k in j..n {
                    let v = 0.25
                        * fd_partial(
                            |p| ricci_potential(potential, p).unwrap_or(f64::NAN),
                            &[j, k],
                            x,
                            None,
                        );
                    if !v.is_finite() {
                        return Err(KahlerError::Invalid(format!(
                            "non-finite Ricci entry ({j},{k}) at {x:?}"
                        )));
                    }
                    r[(j, k)] = v;
                    r[(k, j)] = v;
                }
            }
            r
        }
    };
    let ev = matrix.clone().symmetric_eigen().eigenvalues;
    let min_eigenvalue = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(RicciAtPoint { n, matrix, min_eigenvalue, max_eigenvalue })
}

/// Sign type of a curvature form over a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignTag {
    Zero,
    Positive,
    Negative,
    SemiPositive,
    SemiNegative,
    Indefinite,
}

impl std::fmt::Display for SignTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SignTag::Zero => "zero",
            SignTag::Positive => "positive",
            SignTag::Negative => "negative",
            SignTag::SemiPositive => "semi_positive",
            SignTag::SemiNegative => "semi_negative",
            SignTag::Indefinite => "indefinite",
        };
        f.write_str(s)
    }
}

/// Result of a curvature sign sweep.
#[derive(Clone, Debug)]
pub struct SignClassification {
    pub tag: SignTag,
    /// Global extremes of the Ricci spectrum over the grid.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub points: usize,
}

/// Classify the sign of the Ricci form over the box `[lo, hi]`, sampling on
/// a grid with spacing at most `max_spacing`.
pub fn classify_ricci(
    potential: &InvariantPotential,
    lo: &[f64],
    hi: &[f64],
    max_spacing: f64,
    tol: Option<f64>,
) -> Result<SignClassification, KahlerError> {
    let tol = tol.unwrap_or(DEFAULT_SIGN_TOL);
    let grid = GridSpec::with_max_spacing(lo.to_vec(), hi.to_vec(), max_spacing)?;
    let points = grid.points();
    let spectra: Vec<Result<(f64, f64), KahlerError>> = points
        .par_iter()
        .map(|x| {
            let r = ricci_form(potential, x)?;
            Ok((r.min_eigenvalue, r.max_eigenvalue))
        })
        .collect();
    let mut m = f64::INFINITY;
    let mut big = f64::NEG_INFINITY;
    for s in spectra {
        let (lo_ev, hi_ev) = s?;
        m = m.min(lo_ev);
        big = big.max(hi_ev);
    }
    let tag = if m.abs() <= tol && big.abs() <= tol {
        SignTag::Zero
    } else if m >= tol {
        SignTag::Positive
    } else if big <= -tol {
        SignTag::Negative
    } else if m >= -tol {
        SignTag::SemiPositive
    } else if big <= tol {
        SignTag::SemiNegative
    } else {
        SignTag::Indefinite
    };
    Ok(SignClassification {
        tag,
        min_eigenvalue: m,
        max_eigenvalue: big,
        points: points.len(),
    })
}

/// The sign/convexity dictionary between the Ricci form and the log-volume
/// of torus orbits: `Hess(log Vol) = −2R`, so each curvature sign pairs with
/// the opposite convexity type.
pub fn tags_consistent(ricci: SignTag, logvol: ConvexityTag) -> bool {
    match ricci {
        SignTag::Zero => logvol == ConvexityTag::Linear,
        SignTag::Positive => logvol == ConvexityTag::StrictlyConcave,
        SignTag::Negative => logvol == ConvexityTag::StrictlyConvex,
        SignTag::SemiPositive => logvol.is_concave(),
        SignTag::SemiNegative => logvol.is_convex(),
        SignTag::Indefinite => logvol == ConvexityTag::Indefinite,
    }
}

/// Generalized Ricci form of a positive volume density `H(x, y)`: the Levi
/// form of `−log H`. Fails on any sample with `H ≤ 0`.
pub fn ricci_general(
    density: &PeriodicScalarField,
    x: &[f64],
    y: &[f64],
) -> Result<LeviForm, KahlerError> {
    let neg_log = density.neg_log();
    Ok(crate::psh::levi_form(&neg_log, x, y)?)
}
