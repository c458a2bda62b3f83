//! Central finite-difference stencils up to order four.
//!
//! First and second derivatives use the standard five-point order-4-accurate
//! central stencils; third and fourth (possibly mixed) derivatives are formed
//! by nesting those two operators. Truncation error is O(h⁴) for smooth
//! functions; the default steps below balance truncation against roundoff for
//! the orders involved (a pure order-4 difference loses roughly five digits,
//! which downstream tolerances budget for).

/// Default step for a stencil of total order `order` around point `p`:
/// `1e-3·max(1, |p|_∞)` for orders ≤ 2 and `1e-2·max(1, |p|_∞)` for orders 3–4.
pub fn default_step(order: usize, p: &[f64]) -> f64 {
    let scale = p.iter().fold(1.0_f64, |m, &v| m.max(v.abs()));
    if order <= 2 {
        1e-3 * scale
    } else {
        1e-2 * scale
    }
}

/// Order-4-accurate central-difference estimate of the mixed partial
/// `∂^α f (p)`, where `alpha` lists differentiation axes (repetitions allowed,
/// order irrelevant). `step` overrides the default spacing.
///
/// Up to `|alpha| = 4`. Repeated axes are peeled two at a time with the
/// second-difference stencil, single axes with the first-difference stencil,
/// nesting for mixed indices. The step is snapped to an exactly representable
/// offset of each coordinate so quadratics difference exactly.
pub fn fd_partial<F>(f: F, alpha: &[usize], p: &[f64], step: Option<f64>) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    assert!(alpha.len() <= 4, "fd_partial supports orders up to 4");
    let mut axes = [0usize; 4];
    axes[..alpha.len()].copy_from_slice(alpha);
    axes[..alpha.len()].sort_unstable();
    let h = step.unwrap_or_else(|| default_step(alpha.len(), p));
    let mut q = p.to_vec();
    fd_rec(&f, &axes[..alpha.len()], &mut q, h)
}

fn fd_rec<F>(f: &F, axes: &[usize], p: &mut Vec<f64>, h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    if axes.is_empty() {
        return f(p);
    }
    let j = axes[0];
    let c = p[j];
    // exactly representable offset of this coordinate
    let hj = (c + h) - c;
    let mut at = |t: f64, rest: &[usize]| {
        p[j] = t;
        let v = fd_rec(f, rest, p, h);
        p[j] = c;
        v
    };
    if axes.len() >= 2 && axes[1] == j {
        let rest = &axes[2..];
        (-at(c + 2.0 * hj, rest) + 16.0 * at(c + hj, rest) - 30.0 * at(c, rest)
            + 16.0 * at(c - hj, rest)
            - at(c - 2.0 * hj, rest))
            / (12.0 * hj * hj)
    } else {
        let rest = &axes[1..];
        (-at(c + 2.0 * hj, rest) + 8.0 * at(c + hj, rest) - 8.0 * at(c - hj, rest)
            + at(c - 2.0 * hj, rest))
            / (12.0 * hj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn second_difference_on_quadratic_hits_roundoff_floor() {
        // the stencil is exact on quadratics; what remains is cancellation
        // noise of order ε/h² ≈ 1e-10 at the default step
        let f = |x: &[f64]| x[0] * x[0];
        let d = fd_partial(f, &[0, 0], &[1.0], None);
        assert!((d - 2.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn second_derivative_of_exp() {
        let f = |x: &[f64]| (2.0 * x[0]).exp();
        let d = fd_partial(f, &[0, 0], &[0.0], None);
        assert!((d - 4.0).abs() < 1e-8, "got {d}");
    }

    #[test]
    fn fourth_derivative_of_sin_at_zero() {
        let f = |x: &[f64]| x[0].sin();
        let d = fd_partial(f, &[0, 0, 0, 0], &[0.0], None);
        assert!(d.abs() < 1e-5, "got {d}");
    }

    #[test]
    fn mixed_partial_symmetry_is_exact() {
        let f = |x: &[f64]| (x[0] * x[1]).sin() + x[0].exp() * x[1];
        let a = fd_partial(f, &[0, 1], &[0.3, -0.4], None);
        let b = fd_partial(f, &[1, 0], &[0.3, -0.4], None);
        assert_eq!(a, b);
    }

    #[test]
    fn mixed_third_and_fourth_orders() {
        // f = x^2 y: f_xxy = 2, f_xyy = 0, f_xxyy = 0
        let f = |x: &[f64]| x[0] * x[0] * x[1];
        assert!((fd_partial(f, &[0, 0, 1], &[0.7, -0.2], None) - 2.0).abs() < 1e-7);
        assert!(fd_partial(f, &[0, 1, 1], &[0.7, -0.2], None).abs() < 1e-7);
        assert!(fd_partial(f, &[0, 0, 1, 1], &[0.7, -0.2], None).abs() < 1e-6);
    }

    /// Evaluate c·x^a y^b and its exact partial for the given axis counts.
    fn poly_partial(c: f64, a: i32, b: i32, da: i32, db: i32, x: f64, y: f64) -> f64 {
        let fall = |p: i32, d: i32| -> f64 { (0..d).map(|k| f64::from(p - k)).product() };
        if a < da || b < db {
            return 0.0;
        }
        c * fall(a, da) * fall(b, db) * x.powi(a - da) * y.powi(b - db)
    }

    proptest! {
        /// Degree-≤4 polynomials differentiate to within 1e-8 of the exact value.
        #[test]
        fn polynomials_within_1e8(
            coeffs in proptest::collection::vec(-1.0..1.0f64, 15),
            px in -1.0..1.0f64,
            py in -1.0..1.0f64,
            alpha in proptest::collection::vec(0usize..2, 1..=4),
        ) {
            // all monomials x^a y^b with a+b ≤ 4
            let monos: Vec<(i32, i32)> = (0..=4i32)
                .flat_map(|a| (0..=(4 - a)).map(move |b| (a, b)))
                .collect();
            let cs = coeffs.clone();
            let ms = monos.clone();
            let f = move |p: &[f64]| -> f64 {
                ms.iter().zip(&cs).map(|(&(a, b), &c)| c * p[0].powi(a) * p[1].powi(b)).sum()
            };
            let da = alpha.iter().filter(|&&ax| ax == 0).count() as i32;
            let db = alpha.len() as i32 - da;
            let exact: f64 = monos.iter().zip(&coeffs)
                .map(|(&(a, b), &c)| poly_partial(c, a, b, da, db, px, py))
                .sum();
            // The stencils are exact on degree-≤4 polynomials at any step;
            // a coarse step keeps roundoff amplification (∝ h⁻² per nesting
            // level) below the 1e-8 bound for order-4 mixed indices.
            let got = fd_partial(&f, &alpha, &[px, py], Some(0.5));
            let tol = 1e-8 * (1.0 + exact.abs());
            prop_assert!((got - exact).abs() <= tol, "alpha {:?}: got {} want {}", alpha, got, exact);
        }
    }
}
