//! End-to-end acceptance battery.
//!
//! Every mathematical guarantee the crate advertises is exercised here
//! against an independently coded oracle: hand-assembled block matrices,
//! closed-form averages, maxima, curvatures and volumes, and the sign ⇔
//! convexity dictionary. The slow sweeps carry explicit wall-clock budgets
//! so performance regressions fail loudly instead of silently rotting.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tklab::cli::{verify_battery, REQUIRED_PROPOSITIONS};
use tklab::funcspace::{
    default_battery_entries, make_builtin_potential, InvariantPotential, LaurentPoly,
    PeriodicScalarField, PotentialDescriptor, QuadratureRule,
};
use tklab::kahler::{metric_at, ricci_form, SignTag};
use tklab::orbitvol::{
    boundary_decay, consistency_theorem, find_critical_orbit, hamiltonian_residual, j_volume,
    j_volume_general, log_j_volume, moment_map, SolveError,
};
use tklab::psh::{
    check_convexity, distinguished_boundary_max, hadamard_max, levi_form, monotone_in_radius,
    torus_average_with, ConvexityTag,
};

const PI: f64 = std::f64::consts::PI;
const TAU: f64 = std::f64::consts::TAU;

fn builtin(kind: &str, n: usize) -> InvariantPotential {
    make_builtin_potential(&PotentialDescriptor::bare(kind, n)).unwrap()
}

fn coeff_one(powers: Vec<i64>) -> (Complex64, Vec<i64>) {
    (Complex64::new(1.0, 0.0), powers)
}

/// `|1 + z_1 + … + z_n|²`: torus average `1 + Σ e^{2x_j}`, orbit maximum
/// `(1 + Σ e^{x_j})²`, both in closed form.
fn ones_abs2(n: usize) -> PeriodicScalarField {
    let mut terms = vec![coeff_one(vec![0; n])];
    for j in 0..n {
        let mut k = vec![0; n];
        k[j] = 1;
        terms.push(coeff_one(k));
    }
    PeriodicScalarField::laurent_abs2(LaurentPoly::new(n, terms).unwrap())
}

// ---------------------------------------------------------------------------
// Levi forms

/// The Levi form of a random quadratic must equal the hand-assembled block
/// matrix ½ [[A, Bᵗ], [B, A]] entry by entry, and its trace must equal the
/// flat Laplacian, here re-checked at 1000 points.
#[test]
fn levi_assembly_matches_the_block_formula() {
    let n = 2;
    let dim = 2 * n;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE55);
    let mut trace_points = 0usize;

    for _ in 0..50 {
        // random quadratic ½ pᵗQp + bᵗp in p = (x₁, x₂, y₁, y₂)
        let mut q = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = rng.gen_range(-2.0..2.0);
                q[(i, j)] = v;
                q[(j, i)] = v;
            }
        }
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let field = {
            let (q, b) = (q.clone(), b.clone());
            let (qe, be) = (q.clone(), b.clone());
            let pack = move |x: &[f64], y: &[f64]| {
                let mut p = vec![0.0; 2 * x.len()];
                p[..x.len()].copy_from_slice(x);
                p[x.len()..].copy_from_slice(y);
                p
            };
            PeriodicScalarField::custom_with_oracle(
                "quadratic",
                n,
                move |x, y| {
                    let p = DMatrix::from_vec(dim, 1, pack(x, y));
                    (0.5 * p.transpose() * &qe * &p)[(0, 0)]
                        + be.iter().zip(p.iter()).map(|(c, v)| c * v).sum::<f64>()
                },
                move |vars, x, y| {
                    let idx = |v: &tklab::funcspace::FieldVar| match *v {
                        tklab::funcspace::FieldVar::X(j) => j,
                        tklab::funcspace::FieldVar::Y(j) => n + j,
                    };
                    match vars.len() {
                        1 => {
                            let i = idx(&vars[0]);
                            let p = pack(x, y);
                            (0..dim).map(|k| q[(i, k)] * p[k]).sum::<f64>() + b[i]
                        }
                        2 => q[(idx(&vars[0]), idx(&vars[1]))],
                        _ => 0.0,
                    }
                },
            )
        };

        // the independent oracle: the block formula written out by hand
        let mut expected = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..n {
            for k in 0..n {
                let a_jk = q[(j, k)] + q[(n + j, n + k)];
                expected[(j, k)] = 0.5 * a_jk;
                expected[(n + j, n + k)] = 0.5 * a_jk;
                let b_jk = q[(j, n + k)] - q[(k, n + j)];
                expected[(n + j, k)] = 0.5 * b_jk;
                expected[(k, n + j)] = 0.5 * b_jk; // Bᵗ block, transposed slot
            }
        }

        let flat_laplacian: f64 = (0..dim).map(|i| q[(i, i)]).sum();

        for _ in 0..20 {
            let x = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let y = [rng.gen_range(0.3..5.9), rng.gen_range(0.3..5.9)];
            let l = levi_form(&field, &x, &y).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    assert!(
                        (l.matrix[(i, j)] - expected[(i, j)]).abs() <= 1e-10,
                        "entry ({i},{j}): {} vs {}",
                        l.matrix[(i, j)],
                        expected[(i, j)]
                    );
                }
            }
            assert!(
                (l.trace() - flat_laplacian).abs() <= 1e-10 * (1.0 + flat_laplacian.abs()),
                "trace {} vs flat Laplacian {flat_laplacian}",
                l.trace()
            );
            trace_points += 1;
        }
    }
    assert_eq!(trace_points, 1000);
}

// ---------------------------------------------------------------------------
// Torus averages

/// Averaging in the angles turns every member of the PSH suite into a convex
/// function of the log-radii for n = 1, 2, 3; the concave control must be
/// caught. Budget: 10 seconds.
#[test]
fn torus_averages_of_psh_suite_are_convex_up_to_dimension_three() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x717ACE);

    let classify = |field: &PeriodicScalarField, r: f64, per_axis: usize, tol: Option<f64>| {
        let n = field.n();
        let (lo, hi) = (vec![-r; n], vec![r; n]);
        let probes = vec![lo.clone(), vec![0.0; n], hi.clone()];
        let rule = QuadratureRule::calibrate(field, &probes).unwrap();
        let g = |p: &[f64]| torus_average_with(field, p, &rule);
        check_convexity(&g, &lo, &hi, per_axis, 60, tol).unwrap()
    };

    for n in 1..=3usize {
        let per_axis = [9, 5, 3][n - 1];

        // |1 + Σ z_j|² averages to 1 + Σ e^{2x_j}: strictly convex
        let v = classify(&ones_abs2(n), 3.0, per_axis, None);
        assert_eq!(v.tag, ConvexityTag::StrictlyConvex, "abs2 n={n}: {v:?}");

        // Re(z_1 ⋯ z_n) averages to zero: linear
        let re = PeriodicScalarField::laurent_re(
            LaurentPoly::new(n, vec![coeff_one(vec![1; n])]).unwrap(),
        );
        let v = classify(&re, 3.0, per_axis, Some(1e-5));
        assert_eq!(v.tag, ConvexityTag::Linear, "re n={n}: {v:?}");

        // pullbacks of invariant potentials average to themselves
        let p = builtin("fubini_study", n);
        let pull = PeriodicScalarField::pullback(&p);
        let rule = QuadratureRule::new(n, 8).unwrap();
        for _ in 0..5 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let avg = torus_average_with(&pull, &x, &rule).unwrap();
            assert!((avg - p.eval(&x).unwrap()).abs() <= 1e-12);
        }
        let v = classify(&pull, 3.0, per_axis, None);
        assert_eq!(v.tag, ConvexityTag::StrictlyConvex, "pullback n={n}: {v:?}");
    }

    // log|c + Σ z_j| with the constant dominating the box: the mean-value
    // property makes the average constant, hence linear
    for (n, c) in [(1usize, 25.0), (2, 100.0)] {
        let mut terms = vec![(Complex64::new(c, 0.0), vec![0; n])];
        for j in 0..n {
            let mut k = vec![0; n];
            k[j] = 1;
            terms.push(coeff_one(k));
        }
        let field = PeriodicScalarField::laurent_log_abs(
            LaurentPoly::new(n, terms).unwrap(),
            vec![-3.1; n],
            vec![3.1; n],
        )
        .unwrap();
        let v = classify(&field, 3.0, [9, 5][n - 1], Some(1e-5));
        assert_eq!(v.tag, ConvexityTag::Linear, "log_abs n={n}: {v:?}");
    }

    // the check is not vacuous: a concave control must land on the other side
    let v = classify(&ones_abs2(2).scaled(-1.0), 3.0, 5, None);
    assert_eq!(v.tag, ConvexityTag::StrictlyConcave);
    assert!(!v.tag.is_convex());

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}, budget 10s");
}

// ---------------------------------------------------------------------------
// Orbit maxima and maximum principles

/// Orbit maxima match the aligned-phase closed form, are convex along random
/// segments (as is their logarithm), dominate on distinguished boundaries of
/// random polydisks, and the averages grow with each radius. The two
/// non-PSH controls must fail their respective principles. Budget: 10 s.
#[test]
fn orbit_maxima_satisfy_hadamard_convexity_and_boundary_principles() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);

    // |1 + z₁ + z₁z₂|², positive coefficients: the maximizing phase aligns
    // all three terms, so M(x) = (1 + e^{x₁} + e^{x₁+x₂})²
    let field = PeriodicScalarField::laurent_abs2(
        LaurentPoly::new(2, vec![coeff_one(vec![0, 0]), coeff_one(vec![1, 0]), coeff_one(vec![1, 1])])
            .unwrap(),
    );
    let closed_m = |x: &[f64]| {
        let s = 1.0 + x[0].exp() + (x[0] + x[1]).exp();
        s * s
    };
    let m = |x: &[f64]| hadamard_max(&field, x, None).unwrap().value;

    for _ in 0..20 {
        let a = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let b = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let (ma, mb, mm) = (m(&a), m(&b), m(&mid));
        for (computed, x) in [(ma, &a), (mb, &b), (mm, &mid)] {
            let exact = closed_m(x);
            assert!(
                (computed - exact).abs() <= 1e-9 * exact,
                "M({x:?}) = {computed}, closed form {exact}"
            );
        }
        let scale = 1.0 + ma.abs().max(mb.abs());
        assert!(mm <= 0.5 * (ma + mb) + 1e-7 * scale, "M not midpoint convex at {mid:?}");
        let lscale = 1.0 + ma.ln().abs().max(mb.ln().abs());
        assert!(
            mm.ln() <= 0.5 * (ma.ln() + mb.ln()) + 1e-7 * lscale,
            "log M not midpoint convex at {mid:?}"
        );
    }

    // random polydisks: the maximum sits on the distinguished boundary
    for _ in 0..20 {
        let corner = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        let r = distinguished_boundary_max(&field, &corner, 3.0, 5).unwrap();
        assert!(
            r.holds,
            "interior {} beats boundary {} at corner {corner:?}",
            r.interior_max, r.boundary_max
        );
    }

    // averages are non-decreasing in each log-radius
    for axis in 0..2 {
        let r = monotone_in_radius(&field, axis, &[-0.4, -0.4], -4.0, 1.2, 30).unwrap();
        assert!(r.holds, "axis {axis} dropped by {}", r.worst_drop);
        assert!(r.kernel_nonneg, "axis {axis} kernel dips to {}", r.kernel_min);
    }

    // controls: -|z|² peaks strictly inside the polydisk, and the average of
    // -|1 + z|² decreases in the radius
    let neg_abs = PeriodicScalarField::laurent_abs2(
        LaurentPoly::new(1, vec![coeff_one(vec![1])]).unwrap(),
    )
    .scaled(-1.0);
    let r = distinguished_boundary_max(&neg_abs, &[0.0], 4.0, 9).unwrap();
    assert!(!r.holds, "concave control passed the boundary principle: {r:?}");

    let neg_avg = PeriodicScalarField::laurent_abs2(
        LaurentPoly::new(1, vec![coeff_one(vec![0]), coeff_one(vec![1])]).unwrap(),
    )
    .scaled(-1.0);
    let r = monotone_in_radius(&neg_avg, 0, &[0.0], -3.0, 2.0, 25).unwrap();
    assert!(!r.holds, "concave control passed radial monotonicity: {r:?}");

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}, budget 10s");
}

// ---------------------------------------------------------------------------
// Curvature closed forms

/// Ricci forms of the catalog metrics agree with their closed forms to 1e-8:
/// zero for flat space, R = (n+1)h for Fubini–Study, R = -sech²(2x) for the
/// negative example.
#[test]
fn ricci_matches_curvature_closed_forms() {
    for n in 1..=2usize {
        let flat = builtin("flat", n);
        for k in 0..9 {
            let t = -2.0 + 0.5 * k as f64;
            let x = vec![t; n];
            let r = ricci_form(&flat, &x).unwrap();
            assert!(r.matrix.amax() <= 1e-10, "flat n={n} at {t}: {:?}", r.matrix);
        }
    }

    for (n, factor) in [(1usize, 2.0), (2, 3.0)] {
        let fs = builtin("fubini_study", n);
        for flat_idx in 0..5usize.pow(n as u32) {
            let x: Vec<f64> = (0..n)
                .map(|j| -1.5 + 3.0 * ((flat_idx / 5usize.pow(j as u32)) % 5) as f64 / 4.0)
                .collect();
            let r = ricci_form(&fs, &x).unwrap();
            let h = metric_at(&fs, &x).unwrap().h;
            for i in 0..n {
                for j in 0..n {
                    let expect = factor * h[(i, j)];
                    assert!(
                        (r.matrix[(i, j)] - expect).abs() <= 1e-8 * (1.0 + expect.abs()),
                        "fubini_study n={n} at {x:?}: R[{i}{j}] = {} vs {expect}",
                        r.matrix[(i, j)]
                    );
                }
            }
        }
    }

    let cn = builtin("cosh_neg", 1);
    for k in 0..17 {
        let x = -2.0 + 0.25 * k as f64;
        let r = ricci_form(&cn, &[x]).unwrap();
        let expect = -1.0 / (2.0 * x).cosh().powi(2);
        assert!(
            (r.matrix[(0, 0)] - expect).abs() <= 1e-8 * (1.0 + expect.abs()),
            "cosh_neg at {x}: {} vs {expect}",
            r.matrix[(0, 0)]
        );
        assert!(r.max_eigenvalue < 0.0);
    }
}

// ---------------------------------------------------------------------------
// Volume closed forms

/// Orbit volumes against closed forms: 2π eˣ for flat C, π sech x for
/// Fubini–Study, the constant 2π² for the compact cylinder, √(16/27) π² for
/// the two-dimensional Fubini–Study central orbit, the (n/2) log c scaling
/// law, and the kinked quadrature integral ∫|1+e^{iy}| dy = 8.
#[test]
fn orbit_volumes_match_closed_forms() {
    let flat = builtin("flat", 1);
    for k in 0..25 {
        let x = -6.0 + 0.5 * k as f64;
        let v = j_volume(&flat, &[x]).unwrap();
        let expect = TAU * x.exp();
        assert!((v - expect).abs() <= 1e-10 * expect, "flat at {x}: {v} vs {expect}");
    }

    let fs = builtin("fubini_study", 1);
    for k in 0..33 {
        let x = -8.0 + 0.5 * k as f64;
        let v = j_volume(&fs, &[x]).unwrap();
        let expect = PI / x.cosh();
        assert!((v - expect).abs() <= 1e-9 * expect, "fs at {x}: {v} vs {expect}");
    }

    let cyl = builtin("flat_cylinder", 2);
    for k in 0..9 {
        let t = -2.0 + 0.5 * k as f64;
        let v = j_volume(&cyl, &[t, -t]).unwrap();
        let expect = 2.0 * PI * PI;
        assert!((v - expect).abs() <= 1e-12 * expect, "cylinder at {t}: {v}");
    }

    let fs2 = builtin("fubini_study", 2);
    let m = metric_at(&fs2, &[0.0, 0.0]).unwrap();
    assert!((m.s.determinant() - 16.0 / 27.0).abs() <= 1e-12);
    let v = j_volume(&fs2, &[0.0, 0.0]).unwrap();
    let expect = (16.0f64 / 27.0).sqrt() * PI * PI;
    assert!((v - expect).abs() <= 1e-12 * expect, "fs² central volume {v} vs {expect}");

    // scaling covariance: log Vol(cφ) = log Vol(φ) + (n/2) log c
    let c = 3.7;
    let scaled = fs2.scaled(c).unwrap();
    let base = log_j_volume(&fs2, &[0.4, -0.2]).unwrap();
    let shifted = log_j_volume(&scaled, &[0.4, -0.2]).unwrap();
    let expect_shift = (2.0 / 2.0) * c.ln();
    assert!((shifted - base - expect_shift).abs() <= 1e-12, "{shifted} vs {base}");

    // the general (quadrature) volume survives a kinked density
    let density = PeriodicScalarField::laurent_abs2(
        LaurentPoly::new(1, vec![coeff_one(vec![0]), coeff_one(vec![1])]).unwrap(),
    );
    let rule = QuadratureRule::new(1, 16).unwrap();
    let v = j_volume_general(&density, &[0.0], &rule).unwrap();
    assert!((v - 8.0).abs() <= 1e-12, "kink integral {v} vs 8");
}

// ---------------------------------------------------------------------------
// Sign ⇔ convexity equivalence

/// For every catalog entry the Ricci sign classification and the log-volume
/// convexity classification must land in matching slots of the dictionary —
/// including the indefinite product example. Budget: 30 seconds.
#[test]
fn ricci_sign_and_logvol_convexity_agree_on_the_catalog() {
    let started = Instant::now();
    let entries = default_battery_entries();
    assert!(entries.iter().any(|e| e.expected_ricci == SignTag::Indefinite));

    for e in &entries {
        let n = e.n;
        let (lo, hi) = (vec![-0.6; n], vec![0.6; n]);
        let rep = consistency_theorem(&e.potential, &lo, &hi, 0.2, 5, 200, None).unwrap();
        assert!(
            rep.consistent,
            "{} (n={n}): Ricci {:?} vs log-volume {:?}",
            e.name, rep.ricci.tag, rep.logvol.tag
        );
        assert_eq!(rep.ricci.tag, e.expected_ricci, "{} (n={n})", e.name);
        assert_eq!(rep.logvol.tag, e.expected_logvol, "{} (n={n})", e.name);
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}, budget 30s");
}

// ---------------------------------------------------------------------------
// Critical orbits

/// From ten random starts in each dimension the ascent must converge to the
/// Fubini–Study maximal orbit at the origin, certify uniqueness through the
/// positive Ricci sign, and reproduce the central volume. Potentials without
/// an interior maximum must make the solver fail, not fabricate one.
#[test]
fn newton_finds_the_unique_maximal_orbit_from_random_starts() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for n in 1..=2usize {
        let fs = builtin("fubini_study", n);
        // [-3, 3]ⁿ: large enough to contain every start, small enough that
        // strict Ricci positivity stays resolvable at the corners (at
        // (6, -6) the Hessian degenerates below the sign dead zone)
        let (lo, hi) = (vec![-3.0; n], vec![3.0; n]);
        for _ in 0..10 {
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let r = find_critical_orbit(&fs, &x0, &lo, &hi).unwrap();
            let dist = r.x_star.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(dist <= 1e-8, "n={n} from {x0:?}: ended at {:?}", r.x_star);
            assert!(r.grad_norm <= 1e-9);
            assert_eq!(r.ricci_tag, SignTag::Positive);
            assert!(r.unique, "n={n}: uniqueness not certified");
            if n == 2 {
                let expect = (16.0f64 / 27.0).sqrt() * PI * PI;
                assert!((r.volume - expect).abs() <= 1e-9 * expect);
            }
        }
    }

    // flat volume grows forever in +x: the ascent must hit the wall
    let flat = builtin("flat", 1);
    match find_critical_orbit(&flat, &[0.0], &[-4.0], &[4.0]) {
        Err(SolveError::DivergedOutOfRegion(_)) => {}
        other => panic!("flat potential produced {other:?}"),
    }
    // negatively curved: log-volume is convex, no interior maximum
    let cn = builtin("cosh_neg", 1);
    assert!(find_critical_orbit(&cn, &[0.3], &[-4.0], &[4.0]).is_err());
}

// ---------------------------------------------------------------------------
// Moment maps

/// The moment map must be Hamiltonian (Jacobian = ½ Hess φ) at random points
/// of every catalog entry, and the Fubini–Study moment coordinate must fill
/// the open interval (0, 1).
#[test]
fn moment_maps_are_hamiltonian_with_correct_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0B17);
    for e in &default_battery_entries() {
        for _ in 0..100 {
            let x: Vec<f64> = (0..e.n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let res = hamiltonian_residual(&e.potential, &x).unwrap();
            assert!(res <= 1e-6, "{} (n={}) at {x:?}: residual {res}", e.name, e.n);
        }
    }

    let fs = builtin("fubini_study", 1);
    let mu = |x: f64| moment_map(&fs, &[x]).unwrap()[0];
    assert!((mu(0.0) - 0.5).abs() <= 1e-12);
    assert!(mu(-8.0) > 0.0 && mu(-8.0) <= 1e-6);
    assert!(mu(8.0) < 1.0 && mu(8.0) >= 1.0 - 1e-6);
    let mut prev = mu(-3.0);
    for k in 1..=24 {
        let next = mu(-3.0 + 0.25 * k as f64);
        assert!(next > prev, "moment coordinate not increasing");
        prev = next;
    }
}

// ---------------------------------------------------------------------------
// Boundary decay

/// Along rays toward the moment polytope boundary the orbit volumes must
/// collapse monotonically, with a terminal ratio at most 1e-8; potentials
/// that do not compactify must be refused rather than swept.
#[test]
fn volumes_collapse_along_boundary_rays() {
    let log_tol = (1e-8f64).ln();

    let fs1 = builtin("fubini_study", 1);
    for d in [vec![1.0], vec![-1.0]] {
        let r = boundary_decay(&fs1, &d, 20.0, 41).unwrap();
        assert!(r.holds, "fs¹ along {d:?}: {r:?}");
        assert!(r.ratio_log <= log_tol);
        assert!(r.monotone_after.is_some());
    }

    let fs2 = builtin("fubini_study", 2);
    for d in [vec![1.0, 1.0], vec![1.0, 0.0], vec![-2.0, 1.0]] {
        let r = boundary_decay(&fs2, &d, 20.0, 41).unwrap();
        assert!(r.holds, "fs² along {d:?}: {r:?}");
        assert!(r.ratio_log <= log_tol);
    }

    assert!(boundary_decay(&builtin("flat_cylinder", 2), &[1.0, 0.0], 20.0, 41).is_err());
    assert!(boundary_decay(&builtin("flat", 1), &[1.0], 20.0, 41).is_err());
}

// ---------------------------------------------------------------------------
// The verification battery

/// The full battery must pass, cover every required proposition, render
/// byte-identically across runs, and turn red when the Fubini–Study
/// potential is deliberately corrupted. Budget: 60 seconds for one run.
#[test]
fn verification_battery_is_green_deterministic_and_falsifiable() {
    let started = Instant::now();
    let report = verify_battery(false);
    let elapsed = started.elapsed();

    let failures: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{}: {}", r.name, r.detail))
        .collect();
    assert!(failures.is_empty(), "battery failures: {failures:#?}");
    assert_eq!(report.passed, report.rows.len());
    let names: Vec<&str> = report.rows.iter().map(|r| r.name.as_str()).collect();
    for required in REQUIRED_PROPOSITIONS {
        assert!(names.contains(&required), "battery lost coverage of {required}");
    }
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}, budget 60s");

    let again = verify_battery(false);
    assert_eq!(report.render_text(), again.render_text(), "battery is not deterministic");

    let corrupt = verify_battery(true);
    assert!(!corrupt.all_passed(), "corrupted potential went undetected");
    for name in ["volume_fs_closed_form", "unique_critical_orbit", "boundary_volume_decay"] {
        let row = corrupt.rows.iter().find(|r| r.name == name).unwrap();
        assert!(!row.passed, "{name} stayed green under corruption");
    }
}
