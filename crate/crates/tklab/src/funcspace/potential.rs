//! Torus-invariant potentials on log-orbit space and their derivative oracles.
//!
//! An [`InvariantPotential`] is a smooth function `φ: R^n → R` of the
//! log-modulus coordinates `x` (the potential of an invariant Kähler form
//! `ω = i∂∂̄φ` when its Hessian is positive definite), together with an exact
//! or finite-difference partial-derivative oracle up to total order four —
//! order four because the Ricci form needs two derivatives of `log det Hess φ`.
//!
//! The analytic oracles are closed under the operations the catalog needs:
//! positive exponential sums, log-sum-exp, quadratics, positive scaling,
//! translation and direct sums. Exponential-sum and log-sum-exp oracles also
//! provide `log det Hess φ` in log space through the Cauchy–Binet subset
//! expansion, whose terms are all nonnegative; the naive determinant of the
//! assembled Hessian cancels catastrophically in the far regions probed by
//! the boundary-decay checks (for the Fubini–Study entry at `|x| ≈ 20` it can
//! even come out negative), while the subset expansion stays fully accurate.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{fd_partial, FuncError};

/// How a potential's derivative oracle is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Analytic,
    FiniteDifference,
}

/// Axis-aligned box in `R^n`; bounds may be infinite.
#[derive(Clone, Debug)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn unbounded(n: usize) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; n],
            hi: vec![f64::INFINITY; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_with_margin(x, 0.0)
    }

    /// True if the cube of radius `margin` around `x` stays inside.
    pub fn contains_with_margin(&self, x: &[f64], margin: f64) -> bool {
        x.len() == self.lo.len()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&l, &h))| v - margin >= l && v + margin <= h)
    }

    fn translate(&self, shift: &[f64]) -> Self {
        Self {
            lo: self.lo.iter().zip(shift).map(|(l, s)| l + s).collect(),
            hi: self.hi.iter().zip(shift).map(|(h, s)| h + s).collect(),
        }
    }

    fn concat(&self, other: &Self) -> Self {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.extend_from_slice(&other.lo);
        hi.extend_from_slice(&other.hi);
        Self { lo, hi }
    }
}

/// Derivative oracle behind a potential. `axes` lists differentiation axes in
/// nondecreasing order, length ≤ 4.
pub trait PotentialOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    fn partial(&self, axes: &[usize], x: &[f64]) -> f64;
    fn kind(&self) -> OracleKind {
        OracleKind::Analytic
    }
    /// Numerically stable `log det Hess φ(x)` where the representation admits
    /// one; `None` falls back to a dense determinant at the call site.
    /// `-inf` signals an everywhere-singular Hessian.
    fn log_det_hess(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
    m + s.ln()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// All `k`-element subsets of `0..m` in lexicographic order.
fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// One affine term `t(x) = log_coeff + ⟨exponent, x⟩` of a log-space
/// determinant expansion.
#[derive(Clone, Debug)]
struct SubsetTerm {
    log_coeff: f64,
    exponent: Vec<f64>,
}

const MAX_SUBSET_TERMS: usize = 20_000;

/// `φ(x) = Σ_k c_k exp⟨a_k, x⟩` with `c_k > 0`.
pub struct ExpSum {
    n: usize,
    terms: Vec<(f64, Vec<f64>)>,
    /// Cauchy–Binet expansion of `det(AᵀDA)`: one term per spanning
    /// `n`-subset of rows, `det Hess = Σ_S (Π_{k∈S} c_k e^{⟨a_k,x⟩}) det(A_S)²`.
    logdet_terms: Option<Vec<SubsetTerm>>,
}

impl ExpSum {
    pub fn new(n: usize, terms: Vec<(f64, Vec<f64>)>) -> Result<Self, FuncError> {
        if n == 0 {
            return Err(FuncError::BadDimension { min: 1, got: 0 });
        }
        if terms.is_empty() {
            return Err(FuncError::Invalid("exponential sum needs at least one term".into()));
        }
        for (c, a) in &terms {
            if *c <= 0.0 || !c.is_finite() {
                return Err(FuncError::NonPositiveCoefficient(*c));
            }
            if a.len() != n {
                return Err(FuncError::BadParameter {
                    name: "exponent".into(),
                    reason: format!("expected length {n}, got {}", a.len()),
                });
            }
        }
        let m = terms.len();
        let logdet_terms = if binomial(m, n) <= MAX_SUBSET_TERMS {
            let mut out = Vec::new();
            for s in subsets(m, n) {
                let mat = DMatrix::from_fn(n, n, |r, c| terms[s[r]].1[c]);
                let det = mat.determinant();
                if det.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                out.push(SubsetTerm {
                    log_coeff: s.iter().map(|&k| terms[k].0.ln()).sum::<f64>()
                        + 2.0 * det.abs().ln(),
                    exponent: (0..n).map(|j| s.iter().map(|&k| terms[k].1[j]).sum()).collect(),
                });
            }
            Some(out)
        } else {
            None
        };
        Ok(Self { n, terms, logdet_terms })
    }
}

impl PotentialOracle for ExpSum {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, a)| c * dot(a, x).exp()).sum()
    }

    fn partial(&self, axes: &[usize], x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, a)| {
                let factor: f64 = axes.iter().map(|&j| a[j]).product();
                c * factor * dot(a, x).exp()
            })
            .sum()
    }

    fn log_det_hess(&self, x: &[f64]) -> Option<f64> {
        let terms = self.logdet_terms.as_ref()?;
        let vals: Vec<f64> = terms.iter().map(|t| t.log_coeff + dot(&t.exponent, x)).collect();
        Some(log_sum_exp(&vals))
    }
}

fn binomial(m: usize, k: usize) -> usize {
    if k > m {
        return 0;
    }
    let mut acc: usize = 1;
    for i in 0..k.min(m - k) {
        acc = acc.saturating_mul(m - i) / (i + 1);
    }
    acc
}

/// `φ(x) = log Σ_k c_k exp⟨a_k, x⟩` with `c_k > 0`.
///
/// Derivatives are the cumulants of the discrete measure putting mass
/// `w_k ∝ c_k e^{⟨a_k,x⟩}` on the exponent vectors: the gradient is the mean,
/// the Hessian the covariance, orders three and four the corresponding
/// cumulant polynomials in the raw moments.
pub struct LogExpSum {
    n: usize,
    terms: Vec<(f64, Vec<f64>)>,
    /// Cauchy–Binet expansion of the covariance determinant over
    /// `(n+1)`-subsets: `det Cov = Σ_S (Π_{k∈S} w_k) det[a_{k_i}−a_{k_0}]²`.
    cov_terms: Option<Vec<SubsetTerm>>,
}

impl LogExpSum {
    pub fn new(n: usize, terms: Vec<(f64, Vec<f64>)>) -> Result<Self, FuncError> {
        // reuse validation
        let base = ExpSum::new(n, terms)?;
        let terms = base.terms;
        let m = terms.len();
        let cov_terms = if binomial(m, n + 1) <= MAX_SUBSET_TERMS {
            let mut out = Vec::new();
            for s in subsets(m, n + 1) {
                let mat =
                    DMatrix::from_fn(n, n, |r, c| terms[s[r + 1]].1[c] - terms[s[0]].1[c]);
                let det = mat.determinant();
                if det.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                out.push(SubsetTerm {
                    log_coeff: s.iter().map(|&k| terms[k].0.ln()).sum::<f64>()
                        + 2.0 * det.abs().ln(),
                    exponent: (0..n).map(|j| s.iter().map(|&k| terms[k].1[j]).sum()).collect(),
                });
            }
            Some(out)
        } else {
            None
        };
        Ok(Self { n, terms, cov_terms })
    }

    fn log_weights(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let s: Vec<f64> = self.terms.iter().map(|(c, a)| c.ln() + dot(a, x)).collect();
        let z = log_sum_exp(&s);
        (s, z)
    }

    /// Raw moment `Σ_k w_k Π_{i∈idx} a_k[i]` of the softmax weights.
    fn moment(&self, weights: &[f64], idx: &[usize]) -> f64 {
        self.terms
            .iter()
            .zip(weights)
            .map(|((_, a), w)| w * idx.iter().map(|&i| a[i]).product::<f64>())
            .sum()
    }
}

impl PotentialOracle for LogExpSum {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let (_, z) = self.log_weights(x);
        z
    }

    fn partial(&self, axes: &[usize], x: &[f64]) -> f64 {
        let (s, z) = self.log_weights(x);
        if axes.is_empty() {
            return z;
        }
        let w: Vec<f64> = s.iter().map(|t| (t - z).exp()).collect();
        let m = |idx: &[usize]| self.moment(&w, idx);
        match axes {
            [j] => m(&[*j]),
            [j, k] => m(&[*j, *k]) - m(&[*j]) * m(&[*k]),
            [j, k, l] => {
                m(&[*j, *k, *l])
                    - m(&[*j, *k]) * m(&[*l])
                    - m(&[*j, *l]) * m(&[*k])
                    - m(&[*k, *l]) * m(&[*j])
                    + 2.0 * m(&[*j]) * m(&[*k]) * m(&[*l])
            }
            [j, k, l, q] => {
                let (j, k, l, q) = (*j, *k, *l, *q);
                m(&[j, k, l, q])
                    - (m(&[j, k, l]) * m(&[q])
                        + m(&[j, k, q]) * m(&[l])
                        + m(&[j, l, q]) * m(&[k])
                        + m(&[k, l, q]) * m(&[j]))
                    - (m(&[j, k]) * m(&[l, q])
                        + m(&[j, l]) * m(&[k, q])
                        + m(&[j, q]) * m(&[k, l]))
                    + 2.0
                        * (m(&[j, k]) * m(&[l]) * m(&[q])
                            + m(&[j, l]) * m(&[k]) * m(&[q])
                            + m(&[j, q]) * m(&[k]) * m(&[l])
                            + m(&[k, l]) * m(&[j]) * m(&[q])
                            + m(&[k, q]) * m(&[j]) * m(&[l])
                            + m(&[l, q]) * m(&[j]) * m(&[k]))
                    - 6.0 * m(&[j]) * m(&[k]) * m(&[l]) * m(&[q])
            }
            _ => unreachable!("orders above 4 are rejected upstream"),
        }
    }

    fn log_det_hess(&self, x: &[f64]) -> Option<f64> {
        let terms = self.cov_terms.as_ref()?;
        let (_, z) = self.log_weights(x);
        let shift = (self.n as f64 + 1.0) * z;
        let vals: Vec<f64> =
            terms.iter().map(|t| t.log_coeff + dot(&t.exponent, x) - shift).collect();
        Some(log_sum_exp(&vals))
    }
}

/// `φ(x) = Σ x_j²`.
pub struct SquareSum {
    n: usize,
}

impl SquareSum {
    pub fn new(n: usize) -> Result<Self, FuncError> {
        if n == 0 {
            return Err(FuncError::BadDimension { min: 1, got: 0 });
        }
        Ok(Self { n })
    }
}

impl PotentialOracle for SquareSum {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn partial(&self, axes: &[usize], x: &[f64]) -> f64 {
        match axes {
            [] => self.eval(x),
            [j] => 2.0 * x[*j],
            [j, k] if j == k => 2.0,
            _ => 0.0,
        }
    }

    fn log_det_hess(&self, _x: &[f64]) -> Option<f64> {
        Some(self.n as f64 * 2.0_f64.ln())
    }
}

struct Scaled {
    c: f64,
    inner: Arc<dyn PotentialOracle>,
}

impl PotentialOracle for Scaled {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.c * self.inner.eval(x)
    }

    fn partial(&self, axes: &[usize], x: &[f64]) -> f64 {
        self.c * self.inner.partial(axes, x)
    }

    fn kind(&self) -> OracleKind {
        self.inner.kind()
    }

    fn log_det_hess(&self, x: &[f64]) -> Option<f64> {
        if self.c > 0.0 {
            Some(self.dim() as f64 * self.c.ln() + self.inner.log_det_hess(x)?)
        } else {
            None
        }
    }
}

struct Translated {
    shift: Vec<f64>,
    inner: Arc<dyn PotentialOracle>,
}

impl Translated {
    fn pullback(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).map(|(v, s)| v - s).collect()
    }
}

impl PotentialOracle for Translated {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.inner.eval(&self.pullback(x))
    }

    fn partial(&self, axes: &[usize], x: &[f64]) -> f64 {
        self.inner.partial(axes, &self.pullback(x))
    }

    fn kind(&self) -> OracleKind {
        self.inner.kind()
    }

    fn log_det_hess(&self, x: &[f64]) -> Option<f64> {
        self.inner.log_det_hess(&self.pullback(x))
    }
}

struct DirectSum {
    parts: Vec<Arc<dyn PotentialOracle>>,
    offsets: Vec<usize>,
    n: usize,
}

impl DirectSum {
    fn locate(&self, axis: usize) -> (usize, usize) {
        for (i, &off) in self.offsets.iter().enumerate() {
            if axis < off + self.parts[i].dim() {
                return (i, axis - off);
            }
        }
        unreachable!("axis bounds are checked upstream")
    }
}

impl PotentialOracle for DirectSum {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.parts
            .iter()
            .zip(&self.offsets)
            .map(|(p, &off)| p.eval(&x[off..off + p.dim()]))
            .sum()
    }

    fn partial(&self, axes: &[usize], x: &[f64]) -> f64 {
        if axes.is_empty() {
            return self.eval(x);
        }
        let (part, _) = self.locate(axes[0]);
        let off = self.offsets[part];
        let dim = self.parts[part].dim();
        let mut local = Vec::with_capacity(axes.len());
        for &a in axes {
            let (p, l) = self.locate(a);
            if p != part {
                // mixed partial across independent blocks
                return 0.0;
            }
            local.push(l);
        }
        self.parts[part].partial(&local, &x[off..off + dim])
    }

    fn kind(&self) -> OracleKind {
        if self.parts.iter().any(|p| p.kind() == OracleKind::FiniteDifference) {
            OracleKind::FiniteDifference
        } else {
            OracleKind::Analytic
        }
    }

    fn log_det_hess(&self, x: &[f64]) -> Option<f64> {
        let mut acc = 0.0;
        for (p, &off) in self.parts.iter().zip(&self.offsets) {
            acc += p.log_det_hess(&x[off..off + p.dim()])?;
        }
        Some(acc)
    }
}

type BareEval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Finite-difference fallback oracle around a bare evaluator.
struct FdOracle {
    n: usize,
    f: BareEval,
}

impl PotentialOracle for FdOracle {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn partial(&self, axes: &[usize], x: &[f64]) -> f64 {
        if axes.is_empty() {
            return (self.f)(x);
        }
        fd_partial(|p| (self.f)(p), axes, x, None)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::FiniteDifference
    }
}

/// A torus-invariant potential: dimension, domain, derivative oracle and the
/// flags the geometric layers need.
#[derive(Clone)]
pub struct InvariantPotential {
    name: String,
    n: usize,
    oracle: Arc<dyn PotentialOracle>,
    domain: DomainBox,
    compactifiable: bool,
}

impl std::fmt::Debug for InvariantPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvariantPotential")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("kind", &self.kind())
            .field("compactifiable", &self.compactifiable)
            .finish()
    }
}

impl InvariantPotential {
    pub fn from_oracle(
        name: impl Into<String>,
        oracle: Arc<dyn PotentialOracle>,
        domain: Option<DomainBox>,
    ) -> Self {
        let n = oracle.dim();
        Self {
            name: name.into(),
            n,
            oracle,
            domain: domain.unwrap_or_else(|| DomainBox::unbounded(n)),
            compactifiable: false,
        }
    }

    /// Potential backed by a bare evaluator; all partials by central
    /// differences (declare the domain so stencil excursions are caught).
    pub fn from_closure(
        name: impl Into<String>,
        n: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        domain: Option<DomainBox>,
    ) -> Self {
        Self::from_oracle(name, Arc::new(FdOracle { n, f: Arc::new(f) }), domain)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> OracleKind {
        self.oracle.kind()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    /// Whether the entry extends to a compact toric ambient (volumes of
    /// degenerate orbits decay to zero along every ray).
    pub fn compactifiable(&self) -> bool {
        self.compactifiable
    }

    pub fn mark_compactifiable(mut self, flag: bool) -> Self {
        self.compactifiable = flag;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check_point(&self, x: &[f64], order: usize) -> Result<(), FuncError> {
        if x.len() != self.n {
            return Err(FuncError::BadDimension { min: self.n, got: x.len() });
        }
        if self.kind() == OracleKind::FiniteDifference && order > 0 {
            // conservative hull of the nested stencil: 2h per difference level
            let h = super::fd::default_step(order, x);
            let margin = 2.0 * h * order as f64;
            if !self.domain.contains_with_margin(x, margin) {
                return if self.domain.contains(x) {
                    Err(FuncError::StencilOutsideDomain)
                } else {
                    Err(FuncError::OutsideDomain)
                };
            }
        } else if !self.domain.contains(x) {
            return Err(FuncError::OutsideDomain);
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, FuncError> {
        self.check_point(x, 0)?;
        Ok(self.oracle.eval(x))
    }

    /// Mixed partial `∂_axes φ(x)`; repetitions allowed, order ≤ 4, any
    /// ordering (canonicalized internally, so symmetric index pairs are
    /// bit-identical).
    pub fn partial(&self, axes: &[usize], x: &[f64]) -> Result<f64, FuncError> {
        if axes.len() > 4 {
            return Err(FuncError::OrderTooHigh { got: axes.len(), max: 4 });
        }
        for &a in axes {
            if a >= self.n {
                return Err(FuncError::AxisOutOfRange { axis: a, dim: self.n });
            }
        }
        self.check_point(x, axes.len())?;
        let mut sorted = [0usize; 4];
        sorted[..axes.len()].copy_from_slice(axes);
        sorted[..axes.len()].sort_unstable();
        Ok(self.oracle.partial(&sorted[..axes.len()], x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FuncError> {
        (0..self.n).map(|j| self.partial(&[j], x)).collect()
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>, FuncError> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for j in 0..self.n {
            for k in j..self.n {
                let v = self.partial(&[j, k], x)?;
                m[(j, k)] = v;
                m[(k, j)] = v;
            }
        }
        Ok(m)
    }

    /// Third-derivative matrices `S_j = ∂_j Hess φ(x)`.
    pub fn hessian_derivatives(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>, FuncError> {
        (0..self.n)
            .map(|j| {
                let mut m = DMatrix::zeros(self.n, self.n);
                for k in 0..self.n {
                    for l in k..self.n {
                        let v = self.partial(&[j, k, l], x)?;
                        m[(k, l)] = v;
                        m[(l, k)] = v;
                    }
                }
                Ok(m)
            })
            .collect()
    }

    /// Fourth-derivative matrix `S_{jk} = ∂_j ∂_k Hess φ(x)`.
    pub fn hessian_second_derivative(
        &self,
        j: usize,
        k: usize,
        x: &[f64],
    ) -> Result<DMatrix<f64>, FuncError> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for l in 0..self.n {
            for q in l..self.n {
                let v = self.partial(&[j, k, l, q], x)?;
                m[(l, q)] = v;
                m[(q, l)] = v;
            }
        }
        Ok(m)
    }

    /// Stable `log det Hess φ(x)` when the oracle provides one.
    pub fn log_det_hess(&self, x: &[f64]) -> Result<Option<f64>, FuncError> {
        self.check_point(x, 2)?;
        Ok(self.oracle.log_det_hess(x))
    }

    /// `c·φ` (any `c ≠ 0`; the stable determinant survives only for `c > 0`).
    pub fn scaled(&self, c: f64) -> Result<Self, FuncError> {
        if c == 0.0 || !c.is_finite() {
            return Err(FuncError::BadParameter {
                name: "scale".into(),
                reason: "must be finite and nonzero".into(),
            });
        }
        Ok(Self {
            name: format!("{}*{c}", self.name),
            n: self.n,
            oracle: Arc::new(Scaled { c, inner: self.oracle.clone() }),
            domain: self.domain.clone(),
            compactifiable: self.compactifiable && c > 0.0,
        })
    }

    /// `φ(· − shift)`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self, FuncError> {
        if shift.len() != self.n {
            return Err(FuncError::BadDimension { min: self.n, got: shift.len() });
        }
        Ok(Self {
            name: format!("{}@shift", self.name),
            n: self.n,
            oracle: Arc::new(Translated { shift: shift.to_vec(), inner: self.oracle.clone() }),
            domain: self.domain.translate(shift),
            compactifiable: self.compactifiable,
        })
    }

    /// Product metric: `φ(x, x') = φ₁(x) + φ₂(x')` on the concatenated
    /// coordinates.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        Self {
            name: format!("{}(+){}", self.name, other.name),
            n,
            oracle: Arc::new(DirectSum {
                parts: vec![self.oracle.clone(), other.oracle.clone()],
                offsets: vec![0, self.n],
                n,
            }),
            domain: self.domain.concat(&other.domain),
            compactifiable: self.compactifiable && other.compactifiable,
        }
    }
}
