//! Scalar fields on the torus fibration: functions `f(x, y)` of log-moduli
//! `x ∈ R^n` and angles `y ∈ [0,2π)^n`, periodic in every angle.
//!
//! The built-in representations cover the test surface of the pluripotential
//! operators: pullbacks of invariant potentials (angle-independent), the real
//! part / imaginary part / squared modulus / log-modulus of a Laurent
//! polynomial in `z_j = e^{x_j + i y_j}`, sums, scalings, `−log` of a positive
//! field, and opaque closures with an optional exact derivative oracle
//! (finite differences over the joint `(x, y)` coordinates otherwise).
//!
//! `log|P|` needs `P ≠ 0` on the region of interest; the representation
//! therefore carries an explicit zero-free box in `x` (the angles always run
//! over the full torus) and refuses evaluation outside it.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use super::{fd_partial, FuncError, InvariantPotential, PotentialDescriptor};

/// A differentiation variable of a torus field: log-modulus axis `X(j)` or
/// angle axis `Y(j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldVar {
    X(usize),
    Y(usize),
}

impl FieldVar {
    fn index(self) -> usize {
        match self {
            FieldVar::X(j) | FieldVar::Y(j) => j,
        }
    }

    /// Position in the joint coordinate vector `(x₁..x_n, y₁..y_n)`.
    fn joint(self, n: usize) -> usize {
        match self {
            FieldVar::X(j) => j,
            FieldVar::Y(j) => n + j,
        }
    }
}

/// Laurent polynomial `P(z) = Σ_k c_k z^k` in the coordinates
/// `z_j = e^{x_j + i y_j}`, exponents `k ∈ Z^n`.
#[derive(Clone, Debug)]
pub struct LaurentPoly {
    n: usize,
    terms: Vec<(Complex64, Vec<i64>)>,
}

impl LaurentPoly {
    pub fn new(n: usize, terms: Vec<(Complex64, Vec<i64>)>) -> Result<Self, FuncError> {
        if n == 0 {
            return Err(FuncError::BadDimension { min: 1, got: 0 });
        }
        if terms.is_empty() {
            return Err(FuncError::Invalid("Laurent polynomial needs at least one term".into()));
        }
        for (_, k) in &terms {
            if k.len() != n {
                return Err(FuncError::BadParameter {
                    name: "powers".into(),
                    reason: format!("expected length {n}, got {}", k.len()),
                });
            }
        }
        Ok(Self { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Complex64, Vec<i64>)] {
        &self.terms
    }

    /// `P` at `(x, y)`: each monomial is `c e^{⟨k,x⟩} e^{i⟨k,y⟩}`.
    pub fn value(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (c, k) in &self.terms {
            let (mut kx, mut ky) = (0.0, 0.0);
            for j in 0..self.n {
                kx += k[j] as f64 * x[j];
                ky += k[j] as f64 * y[j];
            }
            acc += c * kx.exp() * Complex64::new(ky.cos(), ky.sin());
        }
        acc
    }

    /// Derivative with respect to a real coordinate: `∂_{x_j}` multiplies each
    /// monomial by `k_j`, `∂_{y_j}` by `i k_j`.
    pub fn derivative(&self, v: FieldVar) -> LaurentPoly {
        let terms = self
            .terms
            .iter()
            .map(|(c, k)| {
                let kj = k[v.index()] as f64;
                let factor = match v {
                    FieldVar::X(_) => Complex64::new(kj, 0.0),
                    FieldVar::Y(_) => Complex64::new(0.0, kj),
                };
                (c * factor, k.clone())
            })
            .collect();
        LaurentPoly { n: self.n, terms }
    }

    /// True when every exponent is componentwise nonnegative, i.e. `P` is an
    /// honest polynomial extending holomorphically across `z_j = 0`.
    pub fn all_powers_nonneg(&self) -> bool {
        self.terms.iter().all(|(_, k)| k.iter().all(|&p| p >= 0))
    }
}

#[derive(Clone)]
enum LaurentPart {
    Re,
    Im,
    Abs2,
    LogAbs { lo: Vec<f64>, hi: Vec<f64> },
}

type EvalFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
type PartialFn = Arc<dyn Fn(&[FieldVar], &[f64], &[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum FieldRepr {
    Pullback(Arc<InvariantPotential>),
    Laurent { poly: LaurentPoly, part: LaurentPart },
    Sum(Vec<PeriodicScalarField>),
    Scaled { c: f64, inner: Box<PeriodicScalarField> },
    NegLog { inner: Box<PeriodicScalarField> },
    Custom { eval: EvalFn, partial: Option<PartialFn> },
}

/// A scalar field on `R^n × T^n`, periodic in the angles, with derivatives up
/// to total order two.
#[derive(Clone)]
pub struct PeriodicScalarField {
    n: usize,
    name: String,
    repr: FieldRepr,
    extends_across_zero: bool,
}

impl std::fmt::Debug for PeriodicScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicScalarField")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("extends_across_zero", &self.extends_across_zero)
            .finish()
    }
}

fn reduce_angles(y: &[f64]) -> Vec<f64> {
    y.iter().map(|v| v.rem_euclid(TAU)).collect()
}

impl PeriodicScalarField {
    pub fn pullback(p: &InvariantPotential) -> Self {
        Self {
            n: p.n(),
            name: format!("pullback({})", p.name()),
            repr: FieldRepr::Pullback(Arc::new(p.clone())),
            extends_across_zero: false,
        }
    }

    pub fn laurent_re(poly: LaurentPoly) -> Self {
        let ext = poly.all_powers_nonneg();
        Self {
            n: poly.n(),
            name: "laurent_re".into(),
            repr: FieldRepr::Laurent { poly, part: LaurentPart::Re },
            extends_across_zero: ext,
        }
    }

    pub fn laurent_im(poly: LaurentPoly) -> Self {
        let ext = poly.all_powers_nonneg();
        Self {
            n: poly.n(),
            name: "laurent_im".into(),
            repr: FieldRepr::Laurent { poly, part: LaurentPart::Im },
            extends_across_zero: ext,
        }
    }

    pub fn laurent_abs2(poly: LaurentPoly) -> Self {
        let ext = poly.all_powers_nonneg();
        Self {
            n: poly.n(),
            name: "laurent_abs2".into(),
            repr: FieldRepr::Laurent { poly, part: LaurentPart::Abs2 },
            extends_across_zero: ext,
        }
    }

    /// `log|P|`, restricted to a declared box in `x` on which `P` has no
    /// zeros (the caller's assertion; evaluation only enforces the box).
    pub fn laurent_log_abs(
        poly: LaurentPoly,
        zero_free_lo: Vec<f64>,
        zero_free_hi: Vec<f64>,
    ) -> Result<Self, FuncError> {
        let n = poly.n();
        if zero_free_lo.len() != n || zero_free_hi.len() != n {
            return Err(FuncError::MissingZeroFreeBox);
        }
        if zero_free_lo.iter().zip(&zero_free_hi).any(|(l, h)| l >= h) {
            return Err(FuncError::MissingZeroFreeBox);
        }
        Ok(Self {
            n,
            name: "laurent_log_abs".into(),
            repr: FieldRepr::Laurent {
                poly,
                part: LaurentPart::LogAbs { lo: zero_free_lo, hi: zero_free_hi },
            },
            extends_across_zero: false,
        })
    }

    pub fn custom(
        name: impl Into<String>,
        n: usize,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            name: name.into(),
            repr: FieldRepr::Custom { eval: Arc::new(eval), partial: None },
            extends_across_zero: false,
        }
    }

    /// Opaque field with an exact partial-derivative oracle. The oracle
    /// receives the variables sorted (`X` axes before `Y` axes, each by
    /// index) and the angles reduced to `[0, 2π)`.
    pub fn custom_with_oracle(
        name: impl Into<String>,
        n: usize,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        partial: impl Fn(&[FieldVar], &[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            name: name.into(),
            repr: FieldRepr::Custom { eval: Arc::new(eval), partial: Some(Arc::new(partial)) },
            extends_across_zero: false,
        }
    }

    pub fn sum(parts: Vec<PeriodicScalarField>) -> Result<Self, FuncError> {
        let n = match parts.first() {
            Some(p) => p.n,
            None => return Err(FuncError::Invalid("sum of zero fields".into())),
        };
        if parts.iter().any(|p| p.n != n) {
            return Err(FuncError::Invalid("summands have mismatched dimensions".into()));
        }
        let ext = parts.iter().all(|p| p.extends_across_zero);
        Ok(Self {
            n,
            name: "sum".into(),
            repr: FieldRepr::Sum(parts),
            extends_across_zero: ext,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            name: format!("{c}*{}", self.name),
            repr: FieldRepr::Scaled { c, inner: Box::new(self.clone()) },
            extends_across_zero: self.extends_across_zero,
        }
    }

    /// `−log f`; evaluation fails on any sample where `f ≤ 0`.
    pub fn neg_log(&self) -> Self {
        Self {
            n: self.n,
            name: format!("-log({})", self.name),
            repr: FieldRepr::NegLog { inner: Box::new(self.clone()) },
            extends_across_zero: false,
        }
    }

    /// Override the automatic extension flag (e.g. a `log|P|` with `P`
    /// verified zero-free across the degenerate locus).
    pub fn declare_extension(mut self, flag: bool) -> Self {
        self.extends_across_zero = flag;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Whether the field is declared (or structurally known) to extend
    /// smoothly across the degenerate locus `{∃j: z_j = 0}`; the radial
    /// monotonicity statements require this.
    pub fn extends_across_zero(&self) -> bool {
        self.extends_across_zero
    }

    fn check_args(&self, x: &[f64], y: &[f64]) -> Result<(), FuncError> {
        if x.len() != self.n || y.len() != self.n {
            return Err(FuncError::BadDimension { min: self.n, got: x.len().min(y.len()) });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64, FuncError> {
        self.check_args(x, y)?;
        let yr = reduce_angles(y);
        self.eval_reduced(x, &yr)
    }

    fn eval_reduced(&self, x: &[f64], y: &[f64]) -> Result<f64, FuncError> {
        match &self.repr {
            FieldRepr::Pullback(p) => p.eval(x),
            FieldRepr::Laurent { poly, part } => match part {
                LaurentPart::Re => Ok(poly.value(x, y).re),
                LaurentPart::Im => Ok(poly.value(x, y).im),
                LaurentPart::Abs2 => Ok(poly.value(x, y).norm_sqr()),
                LaurentPart::LogAbs { lo, hi } => {
                    check_box(x, lo, hi)?;
                    Ok(0.5 * poly.value(x, y).norm_sqr().ln())
                }
            },
            FieldRepr::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.eval_reduced(x, y)?;
                }
                Ok(acc)
            }
            FieldRepr::Scaled { c, inner } => Ok(c * inner.eval_reduced(x, y)?),
            FieldRepr::NegLog { inner } => {
                let g = inner.eval_reduced(x, y)?;
                if g <= 0.0 {
                    return Err(FuncError::NonPositiveDensity { value: g });
                }
                Ok(-g.ln())
            }
            FieldRepr::Custom { eval, .. } => Ok(eval(x, y)),
        }
    }

    /// Mixed partial `∂_vars f(x, y)`, total order ≤ 2, any variable order
    /// (canonicalized by sorting, so symmetric pairs are bit-identical).
    pub fn partial(&self, vars: &[FieldVar], x: &[f64], y: &[f64]) -> Result<f64, FuncError> {
        if vars.len() > 2 {
            return Err(FuncError::OrderTooHigh { got: vars.len(), max: 2 });
        }
        for v in vars {
            if v.index() >= self.n {
                return Err(FuncError::AxisOutOfRange { axis: v.index(), dim: self.n });
            }
        }
        self.check_args(x, y)?;
        let yr = reduce_angles(y);
        let mut sorted: Vec<FieldVar> = vars.to_vec();
        sorted.sort_unstable();
        self.partial_reduced(&sorted, x, &yr)
    }

    fn partial_reduced(&self, vars: &[FieldVar], x: &[f64], y: &[f64]) -> Result<f64, FuncError> {
        if vars.is_empty() {
            return self.eval_reduced(x, y);
        }
        match &self.repr {
            FieldRepr::Pullback(p) => {
                let mut axes = Vec::with_capacity(vars.len());
                for v in vars {
                    match v {
                        FieldVar::X(j) => axes.push(*j),
                        FieldVar::Y(_) => return Ok(0.0),
                    }
                }
                p.partial(&axes, x)
            }
            FieldRepr::Laurent { poly, part } => match part {
                LaurentPart::Re => Ok(derived(poly, vars).value(x, y).re),
                LaurentPart::Im => Ok(derived(poly, vars).value(x, y).im),
                LaurentPart::Abs2 => Ok(abs2_partial(poly, vars, x, y)),
                LaurentPart::LogAbs { lo, hi } => {
                    check_box(x, lo, hi)?;
                    Ok(log_abs_partial(poly, vars, x, y))
                }
            },
            FieldRepr::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.partial_reduced(vars, x, y)?;
                }
                Ok(acc)
            }
            FieldRepr::Scaled { c, inner } => Ok(c * inner.partial_reduced(vars, x, y)?),
            FieldRepr::NegLog { inner } => {
                let g = inner.eval_reduced(x, y)?;
                if g <= 0.0 {
                    return Err(FuncError::NonPositiveDensity { value: g });
                }
                match vars {
                    [v] => Ok(-inner.partial_reduced(&[*v], x, y)? / g),
                    [u, v] => {
                        let gu = inner.partial_reduced(&[*u], x, y)?;
                        let gv = inner.partial_reduced(&[*v], x, y)?;
                        let guv = inner.partial_reduced(&[*u, *v], x, y)?;
                        Ok(-guv / g + gu * gv / (g * g))
                    }
                    _ => unreachable!("order bounded above"),
                }
            }
            FieldRepr::Custom { eval, partial } => {
                if let Some(p) = partial {
                    return Ok(p(vars, x, y));
                }
                // finite differences over the joint (x, y) coordinates
                let mut joint = Vec::with_capacity(2 * self.n);
                joint.extend_from_slice(x);
                joint.extend_from_slice(y);
                let axes: Vec<usize> = vars.iter().map(|v| v.joint(self.n)).collect();
                let n = self.n;
                Ok(fd_partial(
                    |p| {
                        let yr = reduce_angles(&p[n..]);
                        eval(&p[..n], &yr)
                    },
                    &axes,
                    &joint,
                    None,
                ))
            }
        }
    }
}

fn check_box(x: &[f64], lo: &[f64], hi: &[f64]) -> Result<(), FuncError> {
    if x.iter().zip(lo.iter().zip(hi)).all(|(&v, (&l, &h))| v >= l && v <= h) {
        Ok(())
    } else {
        Err(FuncError::OutsideDomain)
    }
}

fn derived(poly: &LaurentPoly, vars: &[FieldVar]) -> LaurentPoly {
    let mut p = poly.clone();
    for v in vars {
        p = p.derivative(*v);
    }
    p
}

/// Partials of `q = |P|²` from the product rule: `q_v = 2 Re(P_v P̄)` and
/// `q_uv = 2 Re(P_uv P̄ + P_v P̄_u)`.
fn abs2_partial(poly: &LaurentPoly, vars: &[FieldVar], x: &[f64], y: &[f64]) -> f64 {
    let p = poly.value(x, y);
    match vars {
        [v] => 2.0 * (poly.derivative(*v).value(x, y) * p.conj()).re,
        [u, v] => {
            let pu = poly.derivative(*u);
            let pv = poly.derivative(*v);
            let puv = pu.derivative(*v).value(x, y);
            2.0 * (puv * p.conj() + pv.value(x, y) * pu.value(x, y).conj()).re
        }
        _ => unreachable!("order bounded above"),
    }
}

/// Partials of `½ log q` by the chain rule through `q = |P|²`.
fn log_abs_partial(poly: &LaurentPoly, vars: &[FieldVar], x: &[f64], y: &[f64]) -> f64 {
    let q = poly.value(x, y).norm_sqr();
    match vars {
        [v] => abs2_partial(poly, &[*v], x, y) / (2.0 * q),
        [u, v] => {
            let qu = abs2_partial(poly, &[*u], x, y);
            let qv = abs2_partial(poly, &[*v], x, y);
            let quv = abs2_partial(poly, vars, x, y);
            quv / (2.0 * q) - qu * qv / (2.0 * q * q)
        }
        _ => unreachable!("order bounded above"),
    }
}

/// One monomial of a Laurent-polynomial field in serialized form.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct LaurentTermSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub powers: Vec<i64>,
}

/// Serialized description of a torus field, for configuration files.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldDescriptor {
    Pullback {
        potential: PotentialDescriptor,
    },
    LaurentRe {
        n: usize,
        terms: Vec<LaurentTermSpec>,
    },
    LaurentIm {
        n: usize,
        terms: Vec<LaurentTermSpec>,
    },
    LaurentAbs2 {
        n: usize,
        terms: Vec<LaurentTermSpec>,
    },
    LaurentLogAbs {
        n: usize,
        terms: Vec<LaurentTermSpec>,
        zero_free_lo: Vec<f64>,
        zero_free_hi: Vec<f64>,
    },
    Sum {
        parts: Vec<FieldDescriptor>,
    },
    Scale {
        c: f64,
        inner: Box<FieldDescriptor>,
    },
}

fn poly_from_specs(n: usize, terms: &[LaurentTermSpec]) -> Result<LaurentPoly, FuncError> {
    LaurentPoly::new(
        n,
        terms
            .iter()
            .map(|t| (Complex64::new(t.re, t.im), t.powers.clone()))
            .collect(),
    )
}

/// Build a field from its serialized description.
pub fn make_periodic_field(desc: &FieldDescriptor) -> Result<PeriodicScalarField, FuncError> {
    match desc {
        FieldDescriptor::Pullback { potential } => {
            let p = super::make_builtin_potential(potential)?;
            Ok(PeriodicScalarField::pullback(&p))
        }
        FieldDescriptor::LaurentRe { n, terms } => {
            Ok(PeriodicScalarField::laurent_re(poly_from_specs(*n, terms)?))
        }
        FieldDescriptor::LaurentIm { n, terms } => {
            Ok(PeriodicScalarField::laurent_im(poly_from_specs(*n, terms)?))
        }
        FieldDescriptor::LaurentAbs2 { n, terms } => {
            Ok(PeriodicScalarField::laurent_abs2(poly_from_specs(*n, terms)?))
        }
        FieldDescriptor::LaurentLogAbs { n, terms, zero_free_lo, zero_free_hi } => {
            PeriodicScalarField::laurent_log_abs(
                poly_from_specs(*n, terms)?,
                zero_free_lo.clone(),
                zero_free_hi.clone(),
            )
        }
        FieldDescriptor::Sum { parts } => {
            let built: Result<Vec<_>, _> = parts.iter().map(make_periodic_field).collect();
            PeriodicScalarField::sum(built?)
        }
        FieldDescriptor::Scale { c, inner } => Ok(make_periodic_field(inner)?.scaled(*c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{torus_quadrature_fixed, QuadratureRule};
    use approx::assert_relative_eq;

    fn poly_1p_zw() -> LaurentPoly {
        // 1 + z₁ z₂²  (n = 2)
        LaurentPoly::new(
            2,
            vec![
                (Complex64::new(1.0, 0.0), vec![0, 0]),
                (Complex64::new(1.0, 0.0), vec![1, 2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn laurent_value_matches_complex_arithmetic() {
        let p = poly_1p_zw();
        let (x, y) = ([0.3, -0.2], [1.1, 0.4]);
        let z1 = Complex64::new(x[0], y[0]).exp();
        let z2 = Complex64::new(x[1], y[1]).exp();
        let expected = Complex64::new(1.0, 0.0) + z1 * z2 * z2;
        let got = p.value(&x, &y);
        assert_relative_eq!(got.re, expected.re, max_relative = 1e-14);
        assert_relative_eq!(got.im, expected.im, max_relative = 1e-14);
    }

    #[test]
    fn derivative_multiplies_by_powers() {
        let p = poly_1p_zw();
        let dx = p.derivative(FieldVar::X(1));
        // constant term killed, z₁z₂² term multiplied by 2
        let (x, y) = ([0.1, 0.2], [0.5, 0.6]);
        let base = p.value(&x, &y) - Complex64::new(1.0, 0.0);
        let got = dx.value(&x, &y);
        assert_relative_eq!(got.re, 2.0 * base.re, max_relative = 1e-13);
        let dy = p.derivative(FieldVar::Y(1));
        let goty = dy.value(&x, &y);
        let expect = Complex64::new(0.0, 2.0) * base;
        assert_relative_eq!(goty.re, expect.re, max_relative = 1e-13);
        assert_relative_eq!(goty.im, expect.im, max_relative = 1e-13);
    }

    #[test]
    fn fields_are_periodic_in_every_angle() {
        let f = PeriodicScalarField::laurent_abs2(poly_1p_zw());
        let x = [0.2, -0.5];
        let y = [1.3, 2.1];
        let base = f.eval(&x, &y).unwrap();
        for j in 0..2 {
            let mut shifted = y;
            shifted[j] += TAU;
            let v = f.eval(&x, &shifted).unwrap();
            assert_relative_eq!(v, base, max_relative = 1e-12);
            shifted[j] = y[j] - TAU;
            let v = f.eval(&x, &shifted).unwrap();
            assert_relative_eq!(v, base, max_relative = 1e-12);
        }
    }

    #[test]
    fn abs2_partials_match_finite_differences() {
        let f = PeriodicScalarField::laurent_abs2(poly_1p_zw());
        let (x, y) = ([0.3, -0.1], [0.9, 2.2]);
        let pairs: Vec<Vec<FieldVar>> = vec![
            vec![FieldVar::X(0)],
            vec![FieldVar::Y(1)],
            vec![FieldVar::X(0), FieldVar::X(1)],
            vec![FieldVar::X(1), FieldVar::Y(0)],
            vec![FieldVar::Y(0), FieldVar::Y(0)],
            vec![FieldVar::X(0), FieldVar::X(0)],
        ];
        for vars in pairs {
            let exact = f.partial(&vars, &x, &y).unwrap();
            let mut joint = x.to_vec();
            joint.extend_from_slice(&y);
            let axes: Vec<usize> = vars.iter().map(|v| v.joint(2)).collect();
            let fd = fd_partial(
                |p| f.eval(&p[..2], &p[2..]).unwrap(),
                &axes,
                &joint,
                None,
            );
            assert_relative_eq!(exact, fd, epsilon = 1e-7, max_relative = 1e-7);
        }
    }

    #[test]
    fn log_abs_partials_and_zero_free_box() {
        // log|e⁴ + z₁ + z₂| is smooth for x in [-3, 3]²: the constant
        // dominates |z_j| ≤ e³ there.
        let poly = LaurentPoly::new(
            2,
            vec![
                (Complex64::new(4.0_f64.exp(), 0.0), vec![0, 0]),
                (Complex64::new(1.0, 0.0), vec![1, 0]),
                (Complex64::new(1.0, 0.0), vec![0, 1]),
            ],
        )
        .unwrap();
        let f = PeriodicScalarField::laurent_log_abs(
            poly,
            vec![-3.0, -3.0],
            vec![3.0, 3.0],
        )
        .unwrap();
        let (x, y) = ([1.0, -2.0], [0.7, 4.0]);
        let vars = [FieldVar::X(0), FieldVar::X(0)];
        let exact = f.partial(&vars, &x, &y).unwrap();
        let fd = fd_partial(
            |p| f.eval(&[p[0], x[1]], &y).unwrap(),
            &[0, 0],
            &[x[0]],
            None,
        );
        assert_relative_eq!(exact, fd, epsilon = 1e-7, max_relative = 1e-6);
        assert!(matches!(f.eval(&[5.0, 0.0], &y), Err(FuncError::OutsideDomain)));
    }

    #[test]
    fn pullback_ignores_angles() {
        use crate::funcspace::SquareSum;
        let p = InvariantPotential::from_oracle(
            "cyl",
            Arc::new(SquareSum::new(2).unwrap()),
            None,
        );
        let f = PeriodicScalarField::pullback(&p);
        let x = [0.4, -0.9];
        let a = f.eval(&x, &[0.0, 0.0]).unwrap();
        let b = f.eval(&x, &[2.0, 5.0]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(f.partial(&[FieldVar::Y(0)], &x, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(
            f.partial(&[FieldVar::X(1), FieldVar::Y(0)], &x, &[1.0, 1.0]).unwrap(),
            0.0
        );
        assert_relative_eq!(
            f.partial(&[FieldVar::X(1), FieldVar::X(1)], &x, &[1.0, 1.0]).unwrap(),
            2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn torus_average_of_abs2_sums_squared_coefficients() {
        // (2π)^{-n} ∬ |Σ c_k z^k|² dy = Σ |c_k|² e^{2⟨k,x⟩}
        let poly = LaurentPoly::new(
            2,
            vec![
                (Complex64::new(1.0, 0.0), vec![0, 0]),
                (Complex64::new(0.5, 0.25), vec![1, 2]),
                (Complex64::new(-0.25, 0.0), vec![2, -1]),
            ],
        )
        .unwrap();
        let f = PeriodicScalarField::laurent_abs2(poly.clone());
        let x = [0.3, -0.2];
        let rule = QuadratureRule::new(2, 16).unwrap();
        let avg = torus_quadrature_fixed(&f, &x, &rule).unwrap() / (TAU * TAU);
        let exact: f64 = poly
            .terms()
            .iter()
            .map(|(c, k)| {
                c.norm_sqr() * (2.0 * (k[0] as f64 * x[0] + k[1] as f64 * x[1])).exp()
            })
            .sum();
        assert_relative_eq!(avg, exact, max_relative = 1e-12);
    }

    #[test]
    fn custom_oracle_and_fd_fallback_agree() {
        // f = x₁² + cos y₁ on n = 1
        let eval = |x: &[f64], y: &[f64]| x[0] * x[0] + y[0].cos();
        let with_oracle = PeriodicScalarField::custom_with_oracle(
            "quad_cos",
            1,
            eval,
            |vars: &[FieldVar], x: &[f64], y: &[f64]| match vars {
                [FieldVar::X(0)] => 2.0 * x[0],
                [FieldVar::Y(0)] => -y[0].sin(),
                [FieldVar::X(0), FieldVar::X(0)] => 2.0,
                [FieldVar::Y(0), FieldVar::Y(0)] => -y[0].cos(),
                _ => 0.0,
            },
        );
        let plain = PeriodicScalarField::custom("quad_cos_fd", 1, eval);
        let (x, y) = ([0.7], [2.1]);
        for vars in [
            vec![FieldVar::X(0)],
            vec![FieldVar::Y(0)],
            vec![FieldVar::X(0), FieldVar::X(0)],
            vec![FieldVar::Y(0), FieldVar::Y(0)],
            vec![FieldVar::X(0), FieldVar::Y(0)],
        ] {
            let a = with_oracle.partial(&vars, &x, &y).unwrap();
            let b = plain.partial(&vars, &x, &y).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-7, max_relative = 1e-7);
        }
    }

    #[test]
    fn sum_scale_neg_log_compose() {
        let f = PeriodicScalarField::laurent_abs2(poly_1p_zw());
        let g = f.scaled(2.0);
        let s = PeriodicScalarField::sum(vec![f.clone(), g]).unwrap();
        let (x, y) = ([0.1, 0.2], [0.3, 0.4]);
        assert_relative_eq!(
            s.eval(&x, &y).unwrap(),
            3.0 * f.eval(&x, &y).unwrap(),
            max_relative = 1e-14
        );
        let nl = f.neg_log();
        assert_relative_eq!(
            nl.eval(&x, &y).unwrap(),
            -f.eval(&x, &y).unwrap().ln(),
            max_relative = 1e-14
        );
        // |1 + z₁z₂²| vanishes where the monomial is -1; −log must refuse a
        // non-positive sample rather than return NaN/∞
        let bad = PeriodicScalarField::laurent_re(LaurentPoly::new(
            1,
            vec![(Complex64::new(-1.0, 0.0), vec![0])],
        )
        .unwrap())
        .neg_log();
        assert!(matches!(
            bad.eval(&[0.0], &[0.0]),
            Err(FuncError::NonPositiveDensity { .. })
        ));
    }

    #[test]
    fn extension_flag_follows_powers() {
        assert!(PeriodicScalarField::laurent_abs2(poly_1p_zw()).extends_across_zero());
        let neg = LaurentPoly::new(
            1,
            vec![(Complex64::new(1.0, 0.0), vec![-1])],
        )
        .unwrap();
        assert!(!PeriodicScalarField::laurent_abs2(neg).extends_across_zero());
        let forced = PeriodicScalarField::laurent_abs2(poly_1p_zw()).declare_extension(false);
        assert!(!forced.extends_across_zero());
    }

    #[test]
    fn descriptor_round_trips_through_json() {
        let desc = FieldDescriptor::Scale {
            c: 0.5,
            inner: Box::new(FieldDescriptor::LaurentAbs2 {
                n: 2,
                terms: vec![
                    LaurentTermSpec { re: 1.0, im: 0.0, powers: vec![0, 0] },
                    LaurentTermSpec { re: 0.5, im: -0.5, powers: vec![1, 2] },
                ],
            }),
        };
        let text = serde_json::to_string(&desc).unwrap();
        assert!(text.contains("\"kind\":\"scale\""));
        assert!(text.contains("\"kind\":\"laurent_abs2\""));
        let back: FieldDescriptor = serde_json::from_str(&text).unwrap();
        let f = make_periodic_field(&back).unwrap();
        let g = make_periodic_field(&desc).unwrap();
        let (x, y) = ([0.2, 0.1], [1.0, 2.0]);
        assert_eq!(
            f.eval(&x, &y).unwrap().to_bits(),
            g.eval(&x, &y).unwrap().to_bits()
        );
    }

    #[test]
    fn rejects_order_three_variables() {
        let f = PeriodicScalarField::laurent_abs2(poly_1p_zw());
        let vars = [FieldVar::X(0), FieldVar::X(0), FieldVar::X(1)];
        assert!(matches!(
            f.partial(&vars, &[0.0, 0.0], &[0.0, 0.0]),
            Err(FuncError::OrderTooHigh { got: 3, max: 2 })
        ));
        assert!(matches!(
            f.partial(&[FieldVar::Y(5)], &[0.0, 0.0], &[0.0, 0.0]),
            Err(FuncError::AxisOutOfRange { axis: 5, dim: 2 })
        ));
    }
}
