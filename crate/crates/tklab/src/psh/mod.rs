//! Plurisubharmonicity on the torus fibration: Levi forms, orbit averages
//! and maxima, convexity classification and radial monotonicity.
//!
//! The operators in this module take a torus field `f(x, y)` and study the
//! induced functions of the log-radii alone: the torus average
//! `F(x) = (2π)^{-n} ∬ f(x, y) dy`, the orbit maximum `M(x) = max_y f(x, y)`,
//! and their convexity/monotonicity, which encode plurisubharmonicity of `f`.

mod average;
mod convexity;
mod levi;
mod monotone;

pub use average::{
    distinguished_boundary_max, hadamard_max, torus_average, torus_average_with,
    BoundaryMaxReport, OrbitExtremum,
};
pub use convexity::{check_convexity, ConvexityTag, ConvexityVerdict, DEFAULT_CONVEX_TOL};
pub use levi::{is_psh, levi_form, LeviForm, PshVerdict, DEFAULT_PSD_TOL};
pub use monotone::{monotone_in_radius, radial_curvature_identity, MonotoneReport};

use crate::funcspace::FuncError;

/// Errors from the plurisubharmonicity operators.
#[derive(Debug, thiserror::Error)]
pub enum PshError {
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error("radial monotonicity requires a field that extends across the degenerate locus")]
    ExtensionRequired,
    #[error("{0}")]
    Invalid(String),
}

/// A uniform rectangular sample grid in `R^n`, lexicographic (first axis
/// slowest), endpoints included.
#[derive(Clone, Debug)]
pub struct GridSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<usize>,
}

impl GridSpec {
    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>, count_per_axis: usize) -> Result<Self, PshError> {
        let counts = vec![count_per_axis; lo.len()];
        Self::new(lo, hi, counts)
    }

    pub fn new(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>) -> Result<Self, PshError> {
        let g = Self { lo, hi, counts };
        g.validate()?;
        Ok(g)
    }

    /// Counts chosen so that no axis spacing exceeds `max_spacing`.
    pub fn with_max_spacing(lo: Vec<f64>, hi: Vec<f64>, max_spacing: f64) -> Result<Self, PshError> {
        if max_spacing <= 0.0 {
            return Err(PshError::Invalid("grid spacing must be positive".into()));
        }
        let counts = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| ((h - l) / max_spacing).ceil() as usize + 1)
            .map(|c| c.max(2))
            .collect();
        Self::new(lo, hi, counts)
    }

    fn validate(&self) -> Result<(), PshError> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() || self.lo.len() != self.counts.len()
        {
            return Err(PshError::Invalid("grid bounds have mismatched dimensions".into()));
        }
        for ((&l, &h), &c) in self.lo.iter().zip(&self.hi).zip(&self.counts) {
            if !(l <= h) {
                return Err(PshError::Invalid(format!("grid bound {l} exceeds {h}")));
            }
            if c < 2 && l < h {
                return Err(PshError::Invalid("a spanning axis needs at least 2 points".into()));
            }
            if c < 1 {
                return Err(PshError::Invalid("grid needs at least 1 point per axis".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// The `m`-th point in lexicographic order.
    pub fn point(&self, mut flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for j in (0..self.dim()).rev() {
            let c = self.counts[j];
            let k = flat % c;
            flat /= c;
            x[j] = if c == 1 {
                0.5 * (self.lo[j] + self.hi[j])
            } else {
                self.lo[j] + (self.hi[j] - self.lo[j]) * k as f64 / (c - 1) as f64
            };
        }
        x
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|m| self.point(m)).collect()
    }
}
