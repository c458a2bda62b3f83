//! Numerical laboratory for pluripotential theory and toric Kähler geometry.
//!
//! Everything is computed in log coordinates: a point of `(C*)^n` is written
//! `z_j = exp(x_j + i y_j)` with `x` ranging over `R^n` and `y` over the torus
//! `[0, 2π)^n`. Torus-invariant Kähler potentials become convex functions of
//! `x` ([`funcspace::InvariantPotential`]), general scalar functions become
//! `y`-periodic fields ([`funcspace::PeriodicScalarField`]), and every
//! geometric statement in scope (PSH ⇒ convex averages, Ricci sign ⇔
//! log-volume convexity, unique maximal torus orbit under positive Ricci)
//! turns into a statement about functions on `R^n` that can be checked by
//! quadrature, dense linear algebra and finite differences.
//!
//! Module map:
//! * [`funcspace`] — function representations, derivative oracles, the
//!   builtin potential catalog, periodic quadrature, finite differences.
//! * [`psh`] — Levi forms, PSH verification, torus averages `F`/`G`, angular
//!   maxima `M`, convexity/monotonicity/maximum-principle checks.
//! * [`kahler`] — metric from potential, anti-canonical density `H`, Ricci
//!   potential `−log H`, Ricci form and sign classification.
//! * [`orbitvol`] — J-volumes of torus orbits, log-volume profiles, moment
//!   maps, boundary decay and the critical-orbit Newton solver.
//! * [`cli`] — config ingestion, subcommands, CSV/JSON emission and the
//!   `verify` battery.

// Negated comparisons like `!(lo < hi)` are deliberate wherever they appear:
// they send NaN bounds down the rejection path, which `lo >= hi` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod funcspace;
pub mod psh;
pub mod kahler;
pub mod orbitvol;
pub mod cli;
