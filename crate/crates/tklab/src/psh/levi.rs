//! The real Levi form of a torus field and pointwise plurisubharmonicity.
//!
//! In log coordinates `z_j = e^{x_j + i y_j}` the complex Hessian of a smooth
//! function `f(x, y)` becomes, after the identification `C^n ≅ R^{2n}` with
//! coordinates `(x, y)`, the symmetric `2n × 2n` matrix
//!
//! ```text
//!   L = ½ [ A  Bᵗ ]      A_jk = f_{x_j x_k} + f_{y_j y_k}   (symmetric)
//!       [ B  A  ]       B_jk = f_{x_j y_k} - f_{x_k y_j}   (antisymmetric)
//! ```
//!
//! Its spectrum is the spectrum of the complex Hessian with every eigenvalue
//! doubled, so `f` is plurisubharmonic exactly when `L ⪰ 0`, and
//! `tr L = Σ_j (f_{x_j x_j} + f_{y_j y_j})` is the flat Laplacian of `f`.

use nalgebra::DMatrix;

use super::{GridSpec, PshError};
use crate::funcspace::{FieldVar, PeriodicScalarField};

/// Pointwise PSD tolerance, scaled by `1 + ‖L‖`.
pub const DEFAULT_PSD_TOL: f64 = 1e-8;

/// The Levi form of a field at a point, with its defining blocks.
#[derive(Clone, Debug)]
pub struct LeviForm {
    pub n: usize,
    /// `A_jk = f_{x_j x_k} + f_{y_j y_k}`.
    pub a: DMatrix<f64>,
    /// `B_jk = f_{x_j y_k} - f_{x_k y_j}`.
    pub b: DMatrix<f64>,
    /// The assembled symmetric `2n × 2n` form `½ [[A, Bᵗ], [B, A]]`.
    pub matrix: DMatrix<f64>,
}

impl LeviForm {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        ev.sort_by(|p, q| p.partial_cmp(q).unwrap());
        ev
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Assemble the Levi form of `field` at `(x, y)`.
pub fn levi_form(
    field: &PeriodicScalarField,
    x: &[f64],
    y: &[f64],
) -> Result<LeviForm, PshError> {
    let n = field.n();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let xx = field.partial(&[FieldVar::X(j), FieldVar::X(k)], x, y)?;
            let yy = field.partial(&[FieldVar::Y(j), FieldVar::Y(k)], x, y)?;
            a[(j, k)] = xx + yy;
            a[(k, j)] = xx + yy;
        }
        for k in 0..n {
            if j == k {
                continue; // B is antisymmetric with exact zeros on the diagonal
            }
            let xjyk = field.partial(&[FieldVar::X(j), FieldVar::Y(k)], x, y)?;
            let xkyj = field.partial(&[FieldVar::X(k), FieldVar::Y(j)], x, y)?;
            b[(j, k)] = xjyk - xkyj;
        }
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = 0.5 * a[(j, k)];
            m[(n + j, n + k)] = 0.5 * a[(j, k)];
            m[(j, n + k)] = 0.5 * b[(k, j)]; // Bᵗ block
            m[(n + j, k)] = 0.5 * b[(j, k)];
        }
    }
    Ok(LeviForm { n, a, b, matrix: m })
}

/// Outcome of a grid plurisubharmonicity check.
#[derive(Clone, Debug)]
pub struct PshVerdict {
    pub holds: bool,
    /// Smallest Levi eigenvalue encountered.
    pub min_eigenvalue: f64,
    /// Where it was attained.
    pub witness_x: Vec<f64>,
    pub witness_y: Vec<f64>,
    pub points_checked: usize,
}

/// Check `L ⪰ 0` over `x` in a grid and `y` on a uniform angle lattice.
///
/// The tolerance is relative: an eigenvalue passes when
/// `λ ≥ -tol · (1 + ‖L‖)` with `‖L‖` the spectral radius at that point.
pub fn is_psh(
    field: &PeriodicScalarField,
    x_grid: &GridSpec,
    y_per_angle: usize,
    tol: Option<f64>,
) -> Result<PshVerdict, PshError> {
    let tol = tol.unwrap_or(DEFAULT_PSD_TOL);
    let n = field.n();
    let y_count = y_per_angle.max(1);
    let total_y = y_count.pow(n as u32);
    let y_at = |mut flat: usize| {
        let mut y = vec![0.0; n];
        for j in (0..n).rev() {
            let k = flat % y_count;
            flat /= y_count;
            y[j] = std::f64::consts::TAU * k as f64 / y_count as f64;
        }
        y
    };

    let mut holds = true;
    let mut min_eig = f64::INFINITY;
    let mut witness_x = vec![0.0; n];
    let mut witness_y = vec![0.0; n];
    let mut checked = 0usize;
    for x in x_grid.points() {
        for m in 0..total_y {
            let y = y_at(m);
            let levi = levi_form(field, &x, &y)?;
            let ev = levi.eigenvalues();
            let lo = ev[0];
            let radius = ev[0].abs().max(ev[ev.len() - 1].abs());
            checked += 1;
            if lo < min_eig {
                min_eig = lo;
                witness_x.copy_from_slice(&x);
                witness_y.copy_from_slice(&y);
            }
            if lo < -tol * (1.0 + radius) {
                holds = false;
            }
        }
    }
    Ok(PshVerdict {
        holds,
        min_eigenvalue: min_eig,
        witness_x,
        witness_y,
        points_checked: checked,
    })
}
