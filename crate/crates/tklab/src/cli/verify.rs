//! The `verify` battery: a deterministic sweep of the library's mathematical
//! claims, each reduced to a named pass/fail row. Every row catches its own
//! errors, so a broken input turns into a failed row rather than an abort.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcspace::{
    fd_partial, make_builtin_potential, InvariantPotential, LaurentPoly, PeriodicScalarField,
    PotentialDescriptor, QuadratureRule,
};
use crate::kahler::{classify_ricci, metric_at, ricci_form, ricci_general, SignTag};
use crate::orbitvol::{
    boundary_decay, consistency_theorem, find_critical_orbit, hamiltonian_residual, j_volume,
    j_volume_general, log_j_volume, logvol_profile, moment_map,
};
use crate::psh::{
    check_convexity, distinguished_boundary_max, hadamard_max, is_psh, levi_form,
    monotone_in_radius, radial_curvature_identity, torus_average, torus_average_with,
    ConvexityTag, GridSpec, PshError,
};

/// Propositions the battery must cover; `coverage_manifest` fails if a
/// rename or deletion ever drops one.
pub const REQUIRED_PROPOSITIONS: [&str; 13] = [
    "levi_block_matrix_n2",
    "levi_trace_identity",
    "torus_average_convexity",
    "average_max_principle",
    "hadamard_convexity",
    "distinguished_boundary_max",
    "radial_monotonicity",
    "kernel_characterization",
    "jvolume_convexity_general",
    "logvol_ricci_equivalence",
    "periodic_convex_constant",
    "unique_critical_orbit",
    "boundary_volume_decay",
];

#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn render_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.rows {
            let mark = if r.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {:<width$}  {}\n", r.name, r.detail));
        }
        out.push_str(&format!(
            "\n{} checks: {} passed, {} failed\n",
            self.rows.len(),
            self.passed,
            self.failed
        ));
        out
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn builtin(kind: &str, n: usize) -> Result<InvariantPotential, String> {
    make_builtin_potential(&PotentialDescriptor::bare(kind, n)).map_err(fail)
}

/// `|1 + z₁ + z₁z₂|²` — the workhorse plurisubharmonic field: extends across
/// the degenerate orbits, vanishes somewhere on most tori, and has an
/// elementary average `1 + e^{2x₁} + e^{2(x₁+x₂)}`.
fn workhorse_field() -> PeriodicScalarField {
    PeriodicScalarField::laurent_abs2(
        LaurentPoly::new(
            2,
            vec![
                (Complex64::new(1.0, 0.0), vec![0, 0]),
                (Complex64::new(1.0, 0.0), vec![1, 0]),
                (Complex64::new(1.0, 0.0), vec![1, 1]),
            ],
        )
        .expect("static polynomial"),
    )
}

fn one_plus_z() -> PeriodicScalarField {
    PeriodicScalarField::laurent_abs2(
        LaurentPoly::new(
            1,
            vec![
                (Complex64::new(1.0, 0.0), vec![0]),
                (Complex64::new(1.0, 0.0), vec![1]),
            ],
        )
        .expect("static polynomial"),
    )
}

fn midpoint_convex<G>(
    g: &G,
    lo: &[f64],
    hi: &[f64],
    segments: usize,
    seed: u64,
    tol: f64,
) -> Result<(usize, f64), String>
where
    G: Fn(&[f64]) -> Result<f64, String>,
{
    let n = lo.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..segments {
        let a: Vec<f64> = (0..n).map(|j| rng.gen_range(lo[j]..=hi[j])).collect();
        let b: Vec<f64> = (0..n).map(|j| rng.gen_range(lo[j]..=hi[j])).collect();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect();
        let (ga, gb, gm) = (g(&a)?, g(&b)?, g(&mid)?);
        let scale = 1.0 + ga.abs().max(gb.abs()).max(gm.abs());
        let excess = (gm - 0.5 * (ga + gb)) / scale;
        worst = worst.max(excess);
        if excess > tol {
            violations += 1;
        }
    }
    Ok((violations, worst))
}

struct Battery {
    rows: Vec<CheckRow>,
}

impl Battery {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Result<String, String>) {
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.rows.push(CheckRow { name: name.to_string(), passed, detail });
    }
}

/// The Fubini–Study entry every curvature-positive row runs on; with
/// `--corrupt-fubini-study` it is deliberately negated, which must turn
/// those rows red.
fn fs_entry(n: usize, corrupt: bool) -> Result<InvariantPotential, String> {
    let p = builtin("fubini_study", n)?;
    if corrupt {
        p.scaled(-1.0).map_err(fail)
    } else {
        Ok(p)
    }
}

/// Run the full battery. `corrupt_fubini_study` swaps in a negated potential
/// to prove the battery can actually fail.
pub fn verify_battery(corrupt_fubini_study: bool) -> VerifyReport {
    let mut b = Battery { rows: Vec::new() };
    let fs1 = fs_entry(1, corrupt_fubini_study);
    let fs2 = fs_entry(2, corrupt_fubini_study);

    // --- Levi forms ------------------------------------------------------

    b.check("levi_block_matrix_n2", || {
        let f = PeriodicScalarField::custom("x1*y2", 2, |x: &[f64], y: &[f64]| x[0] * y[1]);
        let l = levi_form(&f, &[0.3, -0.2], &[1.0, 2.0]).map_err(fail)?;
        let mut expected = nalgebra::DMatrix::zeros(4, 4);
        expected[(0, 3)] = -0.5;
        expected[(1, 2)] = 0.5;
        expected[(2, 1)] = 0.5;
        expected[(3, 0)] = -0.5;
        let err = (&l.matrix - &expected).abs().max();
        if err <= 1e-9 {
            Ok(format!("4x4 block form matches, max err {err:.2e}"))
        } else {
            Err(format!("block form off by {err:.2e}: {:?}", l.matrix))
        }
    });

    b.check("levi_trace_identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x717ACE);
        let terms: Vec<(Complex64, Vec<i64>)> = [vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 1]]
            .into_iter()
            .map(|p| {
                (Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)), p)
            })
            .collect();
        let f = PeriodicScalarField::laurent_abs2(LaurentPoly::new(2, terms).map_err(fail)?);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let x = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
            let y = [
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ];
            let trace = levi_form(&f, &x, &y).map_err(fail)?.trace();
            // independent flat Laplacian: finite differences straight
            // through the evaluator
            let joint = [x[0], x[1], y[0], y[1]];
            let mut lap = 0.0;
            for a in 0..4 {
                lap += fd_partial(
                    |p: &[f64]| f.eval(&p[..2], &p[2..]).unwrap_or(f64::NAN),
                    &[a, a],
                    &joint,
                    None,
                );
            }
            let err = (trace - lap).abs() / (1.0 + trace.abs());
            worst = worst.max(err);
        }
        if worst <= 1e-6 {
            Ok(format!("trace = flat Laplacian at 20 points, worst rel err {worst:.2e}"))
        } else {
            Err(format!("trace identity off by {worst:.2e}"))
        }
    });

    b.check("levi_spectrum_doubling", || {
        let p = crate::funcspace::ExpSum::new(
            2,
            vec![(1.0, vec![2.0, 0.0]), (3.0, vec![0.0, 2.0])],
        )
        .map_err(fail)?;
        let p = InvariantPotential::from_oracle("two_disks", std::sync::Arc::new(p), None);
        let f = PeriodicScalarField::pullback(&p);
        let ev = levi_form(&f, &[0.0, 0.0], &[0.0, 0.0]).map_err(fail)?.eigenvalues();
        let expected = [2.0, 2.0, 6.0, 6.0];
        let err = ev
            .iter()
            .zip(expected.iter())
            .map(|(a, e)| (a - e).abs())
            .fold(0.0f64, f64::max);
        if err <= 1e-10 {
            Ok(format!("doubled spectrum {{2,2,6,6}}, max err {err:.2e}"))
        } else {
            Err(format!("spectrum {ev:?} != doubled {{2,2,6,6}}"))
        }
    });

    b.check("psh_positive_example", || {
        let grid = GridSpec::uniform(vec![-1.0, -1.0], vec![1.0, 1.0], 5).map_err(fail)?;
        let v = is_psh(&workhorse_field(), &grid, 8, None).map_err(fail)?;
        if v.holds {
            Ok(format!(
                "|P|² positive semidefinite at {} points, min eigenvalue {:.2e}",
                v.points_checked, v.min_eigenvalue
            ))
        } else {
            Err(format!("unexpected negative eigenvalue {:.2e}", v.min_eigenvalue))
        }
    });

    b.check("psh_negation_detected", || {
        let grid = GridSpec::uniform(vec![-1.0], vec![1.0], 5).map_err(fail)?;
        let v = is_psh(&one_plus_z().scaled(-1.0), &grid, 8, None).map_err(fail)?;
        if !v.holds && v.min_eigenvalue < -0.1 {
            Ok(format!(
                "-|P|² rejected, witness eigenvalue {:.2e} at x = {:?}",
                v.min_eigenvalue, v.witness_x
            ))
        } else {
            Err("negated field slipped through the positivity check".into())
        }
    });

    // --- Averages and maxima ---------------------------------------------

    b.check("average_reproduces_potential", || {
        let p = builtin("fubini_study", 2)?;
        let f = PeriodicScalarField::pullback(&p);
        let rule = QuadratureRule::new(2, 4).map_err(fail)?;
        let mut worst = 0.0f64;
        for x in [[0.0, 0.0], [0.5, -0.5], [-1.2, 0.8]] {
            let avg = torus_average(&f, &x, &rule).map_err(fail)?;
            let direct = p.eval(&x).map_err(fail)?;
            worst = worst.max((avg - direct).abs() / (1.0 + direct.abs()));
        }
        if worst <= 1e-12 {
            Ok(format!("averaging an invariant field is the identity, err {worst:.2e}"))
        } else {
            Err(format!("invariant average off by {worst:.2e}"))
        }
    });

    b.check("parseval_average", || {
        let poly = LaurentPoly::new(
            1,
            vec![
                (Complex64::new(1.0, 0.0), vec![0]),
                (Complex64::new(2.0, 0.0), vec![1]),
                (Complex64::new(0.0, 0.5), vec![3]),
            ],
        )
        .map_err(fail)?;
        let f = PeriodicScalarField::laurent_abs2(poly);
        let rule = QuadratureRule::new(1, 16).map_err(fail)?;
        let mut worst = 0.0f64;
        for x in [-0.5, 0.4] {
            let avg = torus_average(&f, &[x], &rule).map_err(fail)?;
            let exact = 1.0 + 4.0 * (2.0 * x).exp() + 0.25 * (6.0 * x).exp();
            worst = worst.max((avg - exact).abs() / exact);
        }
        if worst <= 1e-10 {
            Ok(format!("average |P|² matches Σ|c_k|² e^{{2<k,x>}}, err {worst:.2e}"))
        } else {
            Err(format!("coefficient identity off by {worst:.2e}"))
        }
    });

    b.check("torus_average_convexity", || {
        let f = workhorse_field();
        let probes: Vec<Vec<f64>> = vec![
            vec![-1.2, -1.2],
            vec![-1.2, 1.2],
            vec![1.2, -1.2],
            vec![1.2, 1.2],
            vec![0.0, 0.0],
        ];
        let rule = QuadratureRule::calibrate(&f, &probes).map_err(fail)?;
        let g = |x: &[f64]| torus_average_with(&f, x, &rule);
        let v = check_convexity(&g, &[-1.2, -1.2], &[1.2, 1.2], 5, 150, None).map_err(fail)?;
        if v.tag == ConvexityTag::StrictlyConvex {
            Ok(format!(
                "average of |P|² strictly convex, Hessian eigenvalues in [{:.2e}, {:.2e}]",
                v.min_eigenvalue, v.max_eigenvalue
            ))
        } else {
            Err(format!("expected strict convexity, got {:?}", v.tag))
        }
    });

    b.check("average_max_principle", || {
        let cases: Vec<(PeriodicScalarField, Vec<Vec<f64>>)> = vec![
            (
                workhorse_field(),
                vec![vec![0.0, 0.0], vec![0.5, -0.5], vec![-1.0, 1.0]],
            ),
            (one_plus_z(), vec![vec![-1.0], vec![0.7]]),
        ];
        let mut checked = 0;
        for (f, points) in &cases {
            let rule = QuadratureRule::new(f.n(), 16).map_err(fail)?;
            for x in points {
                let avg = torus_average(f, x, &rule).map_err(fail)?;
                let max = hadamard_max(f, x, None).map_err(fail)?.value;
                if avg > max + 1e-9 * (1.0 + max.abs()) {
                    return Err(format!("average {avg} exceeds orbit max {max} at {x:?}"));
                }
                checked += 1;
            }
        }
        Ok(format!("average ≤ orbit maximum at {checked} sample orbits"))
    });

    b.check("hadamard_known_maximum", || {
        let f = PeriodicScalarField::laurent_abs2(
            LaurentPoly::new(
                2,
                vec![
                    (Complex64::new(1.0, 0.0), vec![0, 0]),
                    (Complex64::new(1.0, 0.0), vec![1, 0]),
                    (Complex64::new(1.0, 0.0), vec![0, 1]),
                ],
            )
            .map_err(fail)?,
        );
        let m = hadamard_max(&f, &[0.0, 0.0], None).map_err(fail)?;
        let err = (m.value - 9.0).abs() / 9.0;
        if err <= 1e-9 {
            Ok(format!("max |1+z₁+z₂|² = 9 recovered, rel err {err:.2e}"))
        } else {
            Err(format!("maximum {} misses 9 by {err:.2e}", m.value))
        }
    });

    b.check("hadamard_convexity", || {
        let f = workhorse_field();
        let g = |x: &[f64]| -> Result<f64, String> {
            hadamard_max(&f, x, None).map(|m| m.value).map_err(fail)
        };
        let (viol, worst) = midpoint_convex(&g, &[-1.5, -1.5], &[1.5, 1.5], 200, 0x5EED, 1e-8)?;
        let glog = |x: &[f64]| -> Result<f64, String> {
            hadamard_max(&f, x, None).map(|m| m.value.ln()).map_err(fail)
        };
        let (viol_log, worst_log) =
            midpoint_convex(&glog, &[-1.5, -1.5], &[1.5, 1.5], 200, 0x5EED, 1e-8)?;
        if viol == 0 && viol_log == 0 {
            Ok(format!(
                "M and log M midpoint-convex on 200 segments, worst excess {:.2e}",
                worst.max(worst_log)
            ))
        } else {
            Err(format!(
                "{viol} midpoint violations for M ({worst:.2e}), {viol_log} for log M ({worst_log:.2e})"
            ))
        }
    });

    b.check("distinguished_boundary_max", || {
        let r = distinguished_boundary_max(&workhorse_field(), &[0.5, 0.5], 1.5, 6)
            .map_err(fail)?;
        if r.holds {
            Ok(format!(
                "polydisk max on the distinguished boundary: interior {:.6} ≤ boundary {:.6}",
                r.interior_max, r.boundary_max
            ))
        } else {
            Err(format!(
                "interior max {:.6} at {:?} beats boundary {:.6}",
                r.interior_max, r.witness_x, r.boundary_max
            ))
        }
    });

    b.check("boundary_failure_detected", || {
        // -|z|² peaks deep inside the polydisk, not on the distinguished
        // boundary; -|1+z|² would not do (its max sits at the corner x=0)
        let concave = PeriodicScalarField::laurent_abs2(
            LaurentPoly::new(1, vec![(Complex64::new(1.0, 0.0), vec![1])]).unwrap(),
        )
        .scaled(-1.0);
        let r = distinguished_boundary_max(&concave, &[0.0], 4.0, 9).map_err(fail)?;
        if !r.holds {
            Ok(format!(
                "concave control caught: interior {:.4} > boundary {:.4}",
                r.interior_max, r.boundary_max
            ))
        } else {
            Err("max principle reported for a non-psh field".into())
        }
    });

    // --- Radial monotonicity ---------------------------------------------

    b.check("radial_monotonicity", || {
        let f = workhorse_field();
        let mut details = Vec::new();
        for axis in 0..2 {
            let r = monotone_in_radius(&f, axis, &[-0.3, -0.3], -4.0, 1.5, 40).map_err(fail)?;
            if !r.holds {
                return Err(format!("axis {axis}: average dropped by {:.2e}", r.worst_drop));
            }
            if !r.kernel_nonneg {
                return Err(format!("axis {axis}: averaged Laplacian dips to {:.2e}", r.kernel_min));
            }
            details.push(format!("axis {axis} kernel ≥ {:.2e}", r.kernel_min));
        }
        Ok(format!("averages non-decreasing on both axes ({})", details.join(", ")))
    });

    b.check("monotone_extension_guard", || {
        let p = builtin("flat_cylinder", 2)?;
        let f = PeriodicScalarField::pullback(&p);
        match monotone_in_radius(&f, 0, &[0.0, 0.0], -2.0, 2.0, 10) {
            Err(PshError::ExtensionRequired) => {
                Ok("cylinder refused: no extension across degenerate orbits".into())
            }
            Err(e) => Err(format!("wrong refusal: {e}")),
            Ok(_) => Err("cylinder average accepted without the extension hypothesis".into()),
        }
    });

    b.check("kernel_characterization", || {
        let f = workhorse_field();
        let probes: Vec<Vec<f64>> = vec![vec![0.2, -0.4], vec![-1.0, 0.5]];
        let rule = QuadratureRule::calibrate(&f, &probes).map_err(fail)?;
        let mut worst = 0.0f64;
        for x in &probes {
            for axis in 0..2 {
                let (lhs, rhs) = radial_curvature_identity(&f, axis, x, &rule).map_err(fail)?;
                worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            }
        }
        if worst <= 1e-6 {
            Ok(format!(
                "d²F/dx² equals the averaged per-variable Laplacian, worst rel err {worst:.2e}"
            ))
        } else {
            Err(format!("kernel identity off by {worst:.2e}"))
        }
    });

    // --- Curvature -------------------------------------------------------

    b.check("curvature_flat_zero", || {
        let p = builtin("flat", 2)?;
        let mut worst = 0.0f64;
        for x in [[0.0, 0.0], [1.0, -2.0], [-0.5, 0.25]] {
            let r = ricci_form(&p, &x).map_err(fail)?;
            worst = worst.max(r.matrix.abs().max());
        }
        if worst <= 1e-10 {
            Ok(format!("flat space curvature vanishes, max entry {worst:.2e}"))
        } else {
            Err(format!("flat curvature as large as {worst:.2e}"))
        }
    });

    b.check("curvature_fs_einstein", || {
        let p1 = fs1.clone()?;
        let mut worst = 0.0f64;
        for x in [-1.0, 0.0, 0.7] {
            let r = ricci_form(&p1, &[x]).map_err(fail)?;
            let h = metric_at(&p1, &[x]).map_err(fail)?.h[(0, 0)];
            worst = worst.max((r.matrix[(0, 0)] - 2.0 * h).abs() / h);
        }
        let p2 = fs2.clone()?;
        let x = [0.3, -0.2];
        let r = ricci_form(&p2, &x).map_err(fail)?;
        let h = metric_at(&p2, &x).map_err(fail)?.h;
        let err2 = (&r.matrix - &(&h * 3.0)).abs().max() / h.abs().max();
        worst = worst.max(err2);
        if worst <= 1e-8 {
            Ok(format!("R = 2h (one variable) and R = 3h (two), worst rel err {worst:.2e}"))
        } else {
            Err(format!("Einstein identity off by {worst:.2e}"))
        }
    });

    b.check("curvature_cosh_negative", || {
        let p = builtin("cosh_neg", 1)?;
        let mut worst = 0.0f64;
        for x in [-0.8, 0.0, 1.3] {
            let r = ricci_form(&p, &[x]).map_err(fail)?.matrix[(0, 0)];
            let exact = -1.0 / (2.0 * x).cosh().powi(2);
            worst = worst.max((r - exact).abs());
        }
        if worst <= 1e-10 {
            Ok(format!("R = -sech²(2x) < 0 everywhere, max err {worst:.2e}"))
        } else {
            Err(format!("negative-curvature closed form off by {worst:.2e}"))
        }
    });

    b.check("ricci_translation_equivariance", || {
        let p = builtin("sum_exp", 2)?;
        let shift = vec![0.7, -0.3];
        let q = p.translated(&shift).map_err(fail)?;
        let mut worst = 0.0f64;
        for x in [[0.0, 0.0], [0.4, -0.6]] {
            let rx = ricci_form(&p, &x).map_err(fail)?;
            let shifted: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + s).collect();
            let ry = ricci_form(&q, &shifted).map_err(fail)?;
            worst = worst.max((&rx.matrix - &ry.matrix).abs().max());
        }
        if worst <= 1e-12 {
            Ok(format!("curvature commutes with log-radius translations, err {worst:.2e}"))
        } else {
            Err(format!("translation equivariance off by {worst:.2e}"))
        }
    });

    b.check("indefinite_witness", || {
        let p = builtin("fs_cosh", 2)?;
        let c = classify_ricci(&p, &[-0.6, -0.6], &[0.6, 0.6], 0.2, None).map_err(fail)?;
        if c.tag == SignTag::Indefinite && c.min_eigenvalue < 0.0 && c.max_eigenvalue > 0.0 {
            Ok(format!(
                "product metric has mixed curvature signs: [{:.3}, {:.3}]",
                c.min_eigenvalue, c.max_eigenvalue
            ))
        } else {
            Err(format!("expected an indefinite witness, got {:?}", c.tag))
        }
    });

    b.check("general_ricci_doubling", || {
        let p = builtin("fubini_study", 1)?;
        let q = p.clone();
        let dens = PeriodicScalarField::custom("det_hess", 1, move |x: &[f64], _: &[f64]| {
            q.log_det_hess(x).ok().flatten().map(f64::exp).unwrap_or(f64::NAN)
        });
        let mut worst = 0.0f64;
        for x in [-0.5, 0.0, 0.8] {
            let l = ricci_general(&dens, &[x], &[0.0]).map_err(fail)?;
            let r = ricci_form(&p, &[x]).map_err(fail)?.matrix[(0, 0)];
            worst = worst.max((l.matrix[(0, 0)] - 2.0 * r).abs());
            worst = worst.max((l.matrix[(1, 1)] - 2.0 * r).abs());
            worst = worst.max(l.matrix[(0, 1)].abs());
        }
        if worst <= 1e-5 {
            Ok(format!("Levi form of -log H doubles the Ricci form, err {worst:.2e}"))
        } else {
            Err(format!("generalized curvature off by {worst:.2e}"))
        }
    });

    // --- Orbit volumes ----------------------------------------------------

    b.check("volume_flat_closed_form", || {
        let p = builtin("flat", 1)?;
        let mut worst = 0.0f64;
        for x in [-2.0, 0.0, 1.5] {
            let v = j_volume(&p, &[x]).map_err(fail)?;
            let exact = std::f64::consts::TAU * x.exp();
            worst = worst.max((v - exact).abs() / exact);
        }
        if worst <= 1e-12 {
            Ok(format!("Vol = 2π e^x, rel err {worst:.2e}"))
        } else {
            Err(format!("flat volume off by {worst:.2e}"))
        }
    });

    b.check("volume_fs_closed_form", || {
        let p = fs1.clone()?;
        let mut worst = 0.0f64;
        for x in [-1.5, 0.0, 0.9, 2.0] {
            let v = j_volume(&p, &[x]).map_err(fail)?;
            let exact = std::f64::consts::PI / x.cosh();
            worst = worst.max((v - exact).abs() / exact);
        }
        if worst <= 1e-9 {
            Ok(format!("Vol = π sech x, rel err {worst:.2e}"))
        } else {
            Err(format!("volume profile off by {worst:.2e}"))
        }
    });

    b.check("volume_scaling_covariance", || {
        let p = fs2.clone()?;
        let c = 2.5;
        let scaled = p.scaled(c).map_err(fail)?;
        let x = [0.3, -0.4];
        let lhs = log_j_volume(&scaled, &x).map_err(fail)?;
        let rhs = log_j_volume(&p, &x).map_err(fail)? + 0.5 * 2.0 * c.ln();
        let err = (lhs - rhs).abs();
        if err <= 1e-12 {
            Ok(format!("log Vol shifts by (n/2) log c under φ → cφ, err {err:.2e}"))
        } else {
            Err(format!("scaling covariance off by {err:.2e}"))
        }
    });

    b.check("general_volume_kink", || {
        let f = one_plus_z();
        let rule = QuadratureRule::new(1, 16).map_err(fail)?;
        let v = j_volume_general(&f, &[0.0], &rule).map_err(fail)?;
        let err = (v - 8.0).abs();
        if err <= 1e-9 {
            Ok(format!("∫|1+e^{{iy}}| dy = 8 despite the density kink, err {err:.2e}"))
        } else {
            Err(format!("kinked orbit volume off by {err:.2e}"))
        }
    });

    b.check("jvolume_convexity_general", || {
        let f = workhorse_field();
        let rule = QuadratureRule::new(2, 16).map_err(fail)?;
        let g = |x: &[f64]| -> Result<f64, String> {
            j_volume_general(&f, x, &rule).map(|v| v.ln()).map_err(fail)
        };
        let (viol, worst) = midpoint_convex(&g, &[-1.2, -1.2], &[1.2, 1.2], 40, 0xA11CE, 1e-7)?;
        if viol == 0 {
            Ok(format!(
                "log of the general orbit volume midpoint-convex on 40 segments, worst excess {worst:.2e}"
            ))
        } else {
            Err(format!("{viol} log-convexity violations, worst excess {worst:.2e}"))
        }
    });

    b.check("logvol_ricci_equivalence", || {
        let entries = crate::funcspace::default_battery_entries();
        let mut summary = Vec::new();
        for e in &entries {
            let n = e.n;
            let lo = vec![-0.6; n];
            let hi = vec![0.6; n];
            let rep =
                consistency_theorem(&e.potential, &lo, &hi, 0.2, 5, 200, None).map_err(fail)?;
            if !rep.consistent {
                return Err(format!(
                    "{} (n={n}): Ricci {:?} inconsistent with log-volume {:?}",
                    e.name, rep.ricci.tag, rep.logvol.tag
                ));
            }
            if rep.ricci.tag != e.expected_ricci || rep.logvol.tag != e.expected_logvol {
                return Err(format!(
                    "{} (n={n}): classified ({:?}, {:?}), expected ({:?}, {:?})",
                    e.name, rep.ricci.tag, rep.logvol.tag, e.expected_ricci, e.expected_logvol
                ));
            }
            summary.push(format!("{}:{:?}", e.name, rep.ricci.tag));
        }
        Ok(format!("sign/convexity dictionary holds on {} entries ({})", entries.len(), summary.join(" ")))
    });

    b.check("periodic_convex_constant", || {
        let p = builtin("flat_cylinder", 2)?;
        let grid = GridSpec::uniform(vec![-2.0, -2.0], vec![2.0, 2.0], 5).map_err(fail)?;
        let prof = logvol_profile(&p, &grid).map_err(fail)?;
        let lvs: Vec<f64> = prof.rows.iter().map(|r| r.log_volume).collect();
        let spread = lvs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - lvs.iter().cloned().fold(f64::INFINITY, f64::min);
        if spread > 1e-12 {
            return Err(format!("cylinder log-volume varies by {spread:.2e}"));
        }
        let g = |x: &[f64]| -> Result<f64, PshError> {
            log_j_volume(&p, x).map_err(|e| PshError::Invalid(e.to_string()))
        };
        let v = check_convexity(&g, &[-2.0, -2.0], &[2.0, 2.0], 5, 100, None).map_err(fail)?;
        if v.tag != ConvexityTag::Linear {
            return Err(format!("constant log-volume classified as {:?}", v.tag));
        }
        let vol = j_volume(&p, &[0.0, 0.0]).map_err(fail)?;
        let exact = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        let err = (vol - exact).abs() / exact;
        if err <= 1e-12 {
            Ok(format!(
                "compact-factor volume constant (spread {spread:.2e}, Vol = 2π², err {err:.2e})"
            ))
        } else {
            Err(format!("cylinder volume off by {err:.2e}"))
        }
    });

    // --- Moment maps and critical orbits ---------------------------------

    b.check("moment_map_image", || {
        let p = fs1.clone()?;
        let mut vals = Vec::new();
        for x in [-8.0, -1.0, 0.0, 1.0, 8.0] {
            let mu = moment_map(&p, &[x]).map_err(fail)?[0];
            if !(0.0 < mu && mu < 1.0) {
                return Err(format!("moment coordinate {mu:.6} at x = {x} left (0, 1)"));
            }
            vals.push(mu);
        }
        let half_err = (vals[2] - 0.5).abs();
        if vals[0] > 2e-7 || vals[4] < 1.0 - 2e-7 || half_err > 1e-12 {
            return Err(format!(
                "endpoints not approached: μ(-8) = {:.3e}, μ(8) = 1 - {:.3e}",
                vals[0],
                1.0 - vals[4]
            ));
        }
        Ok(format!(
            "moment image fills (0, 1): μ(-8) = {:.3e}, μ(0) = ½, 1 - μ(8) = {:.3e}",
            vals[0],
            1.0 - vals[4]
        ))
    });

    b.check("hamiltonian_structure", || {
        let cases: Vec<(InvariantPotential, Vec<Vec<f64>>)> = vec![
            (builtin("flat", 2)?, vec![vec![0.2, 0.2], vec![-0.6, 0.9]]),
            (builtin("fubini_study", 2)?, vec![vec![0.3, -0.4], vec![0.0, 0.0]]),
            (builtin("cosh_neg", 1)?, vec![vec![0.5], vec![-1.1]]),
        ];
        let mut worst = 0.0f64;
        for (p, points) in &cases {
            for x in points {
                worst = worst.max(hamiltonian_residual(p, x).map_err(fail)?);
            }
        }
        if worst <= 1e-6 {
            Ok(format!("dμ = ½ Hess φ dx at 6 samples, worst residual {worst:.2e}"))
        } else {
            Err(format!("Hamiltonian residual {worst:.2e} exceeds 1e-6"))
        }
    });

    b.check("unique_critical_orbit", || {
        let p = fs2.clone()?;
        let r = find_critical_orbit(&p, &[0.9, -1.1], &[-2.0, -2.0], &[2.0, 2.0])
            .map_err(fail)?;
        let off = r.x_star.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if off > 1e-8 {
            return Err(format!("critical orbit at {:?}, expected the origin", r.x_star));
        }
        if !r.unique {
            return Err(format!(
                "positive curvature should certify uniqueness (classified {:?})",
                r.ricci_tag
            ));
        }
        Ok(format!(
            "maximal orbit at the origin in {} steps, |x*| ≤ {off:.2e}, grad {:.2e}, unique",
            r.iterations, r.grad_norm
        ))
    });

    b.check("boundary_volume_decay", || {
        let p = fs2.clone()?;
        let mut details = Vec::new();
        for dir in [[1.0, 1.0], [1.0, 0.0]] {
            let r = boundary_decay(&p, &dir, 20.0, 41).map_err(fail)?;
            if !r.holds {
                return Err(format!(
                    "ray {dir:?}: terminal log-ratio {:.2} (monotone after {:?})",
                    r.ratio_log, r.monotone_after
                ));
            }
            details.push(format!("{dir:?}: log ratio {:.1}", r.ratio_log));
        }
        Ok(format!("volumes collapse along boundary rays ({})", details.join(", ")))
    });

    // --- Coverage ---------------------------------------------------------

    let have: std::collections::BTreeSet<&str> =
        b.rows.iter().map(|r| r.name.as_str()).collect();
    let missing: Vec<&str> = REQUIRED_PROPOSITIONS
        .iter()
        .copied()
        .filter(|name| !have.contains(name))
        .collect();
    b.rows.push(CheckRow {
        name: "coverage_manifest".into(),
        passed: missing.is_empty(),
        detail: if missing.is_empty() {
            format!("all {} required propositions present", REQUIRED_PROPOSITIONS.len())
        } else {
            format!("missing propositions: {}", missing.join(", "))
        },
    });

    let passed = b.rows.iter().filter(|r| r.passed).count();
    let failed = b.rows.len() - passed;
    VerifyReport { rows: b.rows, passed, failed }
}
