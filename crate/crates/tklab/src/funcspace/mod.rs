//! Function representations and numerical primitives.
//!
//! Conventions used throughout the crate:
//! * log coordinates `z_j = exp(x_j + i y_j)`, `x ∈ R^n`, `y ∈ [0,2π)^n`;
//! * derivative multi-indices are passed as slices of axes, e.g. `[0, 0, 1]`
//!   for `∂²/∂x₀² ∂/∂x₁`; order is irrelevant (mixed partials commute and are
//!   canonicalized by sorting);
//! * every operation is pure and deterministic: fixed summation orders,
//!   index-ordered parallel collection, no hidden global state.

mod catalog;
mod fd;
mod field;
mod potential;
mod quadrature;

pub use catalog::{
    builtin_names, catalog_entry, centered_box, default_battery_entries, make_builtin_potential,
    CatalogEntry, PotentialDescriptor,
};
pub use fd::{default_step, fd_partial};
pub use field::{
    make_periodic_field, FieldDescriptor, FieldVar, LaurentPoly, LaurentTermSpec,
    PeriodicScalarField,
};
pub use potential::{
    DomainBox, ExpSum, InvariantPotential, LogExpSum, OracleKind, PotentialOracle, SquareSum,
};
pub use quadrature::{
    integrate_auto, pairwise_sum, per_variable_laplacian, torus_quadrature,
    torus_quadrature_fixed, QuadOutcome, QuadratureRule,
};

/// Errors produced while constructing or evaluating function representations.
#[derive(Debug, thiserror::Error)]
pub enum FuncError {
    #[error("unknown builtin potential `{0}`")]
    UnknownName(String),
    #[error("dimension must be at least {min} (got {got})")]
    BadDimension { min: usize, got: usize },
    #[error("coefficient {0} must be positive")]
    NonPositiveCoefficient(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("point outside declared domain")]
    OutsideDomain,
    #[error("finite-difference stencil leaves the declared domain")]
    StencilOutsideDomain,
    #[error("derivative order {got} exceeds supported order {max}")]
    OrderTooHigh { got: usize, max: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("points-per-angle {0} must be a power of two in [4, 1024]")]
    BadQuadratureN(usize),
    #[error("log-modulus field requires a declared zero-free box")]
    MissingZeroFreeBox,
    #[error("non-positive value {value:.6e} where a positive density is required")]
    NonPositiveDensity { value: f64 },
    #[error("{0}")]
    Invalid(String),
}
