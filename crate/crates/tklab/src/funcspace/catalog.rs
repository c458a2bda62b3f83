//! Built-in invariant potentials with known geometry.
//!
//! Each entry couples a potential constructor with the expected sign of its
//! Ricci curvature and the expected convexity type of its log-volume
//! function, so the verification battery can cross-check the numerical
//! classifiers against ground truth:
//!
//! | name            | potential                                   | Ricci      | log-volume       |
//! |-----------------|---------------------------------------------|------------|------------------|
//! | `flat`          | `Σ e^{2x_j}` (flat C^n)                     | zero       | linear           |
//! | `flat_cylinder` | `Σ x_j²` (flat (C*)^n)                      | zero       | linear           |
//! | `fubini_study`  | `log(1 + Σ e^{2x_j})`                       | positive   | strictly concave |
//! | `cosh_neg`      | `Σ cosh(2x_j)`                              | negative   | strictly convex  |
//! | `sum_exp`       | `Σ c_k e^{⟨a_k,x⟩}`, `c_k > 0` (defaults)   | negative   | strictly convex  |
//! | `fs_cosh`       | `(n−1)`-fold `fubini_study¹ ⊕ cosh_neg¹`    | indefinite | indefinite       |
//!
//! `fs_cosh` is the mixed witness: positively curved along the projective
//! factors, negatively along the cosh factor. A pure positive exponential
//! sum can never play that role — its log-determinant is a log-sum-exp of
//! affine functions (all Cauchy–Binet subset terms are nonnegative), hence
//! convex, so its Ricci form is negative semidefinite everywhere.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{DomainBox, ExpSum, FuncError, InvariantPotential, LogExpSum, SquareSum};
use crate::kahler::SignTag;
use crate::psh::ConvexityTag;

/// Serialized description of an invariant potential.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct PotentialDescriptor {
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl PotentialDescriptor {
    pub fn bare(kind: &str, n: usize) -> Self {
        Self { kind: kind.into(), n, params: BTreeMap::new() }
    }
}

/// Names accepted by [`make_builtin_potential`].
pub fn builtin_names() -> &'static [&'static str] {
    &["flat", "flat_cylinder", "fubini_study", "cosh_neg", "sum_exp", "fs_cosh"]
}

fn reject_unknown_params(
    params: &BTreeMap<String, f64>,
    recognized: &dyn Fn(&str) -> bool,
) -> Result<(), FuncError> {
    for key in params.keys() {
        if !recognized(key) {
            return Err(FuncError::BadParameter {
                name: key.clone(),
                reason: "not recognized by this potential".into(),
            });
        }
    }
    Ok(())
}

fn unit_axis(n: usize, j: usize, scale: f64) -> Vec<f64> {
    let mut a = vec![0.0; n];
    a[j] = scale;
    a
}

fn fubini_study(n: usize) -> Result<InvariantPotential, FuncError> {
    let mut terms = vec![(1.0, vec![0.0; n])];
    for j in 0..n {
        terms.push((1.0, unit_axis(n, j, 2.0)));
    }
    Ok(InvariantPotential::from_oracle(
        "fubini_study",
        Arc::new(LogExpSum::new(n, terms)?),
        None,
    )
    .mark_compactifiable(true))
}

fn cosh_neg(n: usize) -> Result<InvariantPotential, FuncError> {
    let mut terms = Vec::with_capacity(2 * n);
    for j in 0..n {
        terms.push((0.5, unit_axis(n, j, 2.0)));
        terms.push((0.5, unit_axis(n, j, -2.0)));
    }
    Ok(InvariantPotential::from_oracle(
        "cosh_neg",
        Arc::new(ExpSum::new(n, terms)?),
        None,
    ))
}

fn sum_exp_terms(n: usize, params: &BTreeMap<String, f64>) -> Result<Vec<(f64, Vec<f64>)>, FuncError> {
    let mut terms = Vec::new();
    let mut k = 1usize;
    while let Some(&c) = params.get(&format!("c{k}")) {
        let mut a = vec![0.0; n];
        for (j, slot) in a.iter_mut().enumerate() {
            if let Some(&v) = params.get(&format!("a{k}_{}", j + 1)) {
                *slot = v;
            }
        }
        terms.push((c, a));
        k += 1;
    }
    if terms.is_empty() {
        // default: the flat monomials plus one decaying cross term, which
        // bends the log-determinant and makes the curvature strictly negative
        for j in 0..n {
            terms.push((1.0, unit_axis(n, j, 2.0)));
        }
        terms.push((1.0, vec![-1.0; n]));
    }
    Ok(terms)
}

fn sum_exp(n: usize, params: &BTreeMap<String, f64>) -> Result<InvariantPotential, FuncError> {
    let term_count = {
        let mut k = 1usize;
        while params.contains_key(&format!("c{k}")) {
            k += 1;
        }
        k - 1
    };
    reject_unknown_params(params, &|key: &str| {
        for k in 1..=term_count.max(1) {
            if key == format!("c{k}") {
                return true;
            }
            for j in 1..=n {
                if key == format!("a{k}_{j}") {
                    return true;
                }
            }
        }
        false
    })?;
    Ok(InvariantPotential::from_oracle(
        "sum_exp",
        Arc::new(ExpSum::new(n, sum_exp_terms(n, params)?)?),
        None,
    ))
}

fn fs_cosh(n: usize) -> Result<InvariantPotential, FuncError> {
    if n < 2 {
        return Err(FuncError::BadDimension { min: 2, got: n });
    }
    let mut p = fubini_study(1)?;
    for _ in 1..n - 1 {
        p = p.direct_sum(&fubini_study(1)?);
    }
    Ok(p.direct_sum(&cosh_neg(1)?).with_name("fs_cosh"))
}

/// Construct a built-in potential from its serialized description.
pub fn make_builtin_potential(desc: &PotentialDescriptor) -> Result<InvariantPotential, FuncError> {
    let n = desc.n;
    if n == 0 {
        return Err(FuncError::BadDimension { min: 1, got: 0 });
    }
    match desc.kind.as_str() {
        "flat" => {
            reject_unknown_params(&desc.params, &|_| false)?;
            let terms = (0..n).map(|j| (1.0, unit_axis(n, j, 2.0))).collect();
            Ok(InvariantPotential::from_oracle(
                "flat",
                Arc::new(ExpSum::new(n, terms)?),
                None,
            ))
        }
        "flat_cylinder" => {
            reject_unknown_params(&desc.params, &|_| false)?;
            Ok(InvariantPotential::from_oracle(
                "flat_cylinder",
                Arc::new(SquareSum::new(n)?),
                None,
            ))
        }
        "fubini_study" => {
            reject_unknown_params(&desc.params, &|key: &str| key == "shift")?;
            let p = fubini_study(n)?;
            match desc.params.get("shift") {
                Some(&s) => Ok(p.translated(&vec![s; n])?.with_name("fubini_study")),
                None => Ok(p),
            }
        }
        "cosh_neg" => {
            reject_unknown_params(&desc.params, &|_| false)?;
            cosh_neg(n)
        }
        "sum_exp" => sum_exp(n, &desc.params),
        "fs_cosh" => {
            reject_unknown_params(&desc.params, &|_| false)?;
            fs_cosh(n)
        }
        other => Err(FuncError::UnknownName(other.into())),
    }
}

/// A catalog entry: the potential plus its ground-truth classification.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub n: usize,
    pub parameters: BTreeMap<String, f64>,
    pub expected_ricci: SignTag,
    pub expected_logvol: ConvexityTag,
    pub potential: InvariantPotential,
}

/// Catalog entry with default parameters and the expected classification
/// tags for the default parameters.
pub fn catalog_entry(name: &str, n: usize) -> Result<CatalogEntry, FuncError> {
    let desc = PotentialDescriptor::bare(name, n);
    let potential = make_builtin_potential(&desc)?;
    let (expected_ricci, expected_logvol) = match name {
        "flat" | "flat_cylinder" => (SignTag::Zero, ConvexityTag::Linear),
        "fubini_study" => (SignTag::Positive, ConvexityTag::StrictlyConcave),
        "cosh_neg" | "sum_exp" => (SignTag::Negative, ConvexityTag::StrictlyConvex),
        "fs_cosh" => (SignTag::Indefinite, ConvexityTag::Indefinite),
        other => return Err(FuncError::UnknownName(other.into())),
    };
    Ok(CatalogEntry {
        name: name.into(),
        n,
        parameters: desc.params,
        expected_ricci,
        expected_logvol,
        potential,
    })
}

/// The default verification battery: every catalog family at a small
/// dimension, plus Fubini–Study in two dimensions.
pub fn default_battery_entries() -> Vec<CatalogEntry> {
    [
        ("flat", 1),
        ("flat_cylinder", 2),
        ("fubini_study", 1),
        ("fubini_study", 2),
        ("cosh_neg", 1),
        ("sum_exp", 1),
        ("fs_cosh", 2),
    ]
    .into_iter()
    .map(|(name, n)| catalog_entry(name, n).expect("default battery entries are valid"))
    .collect()
}

/// A bounded box `[-r, r]^n` for probing potentials whose interesting
/// behaviour happens near the origin.
pub fn centered_box(n: usize, r: f64) -> DomainBox {
    DomainBox::new(vec![-r; n], vec![r; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn build(kind: &str, n: usize) -> InvariantPotential {
        make_builtin_potential(&PotentialDescriptor::bare(kind, n)).unwrap()
    }

    #[test]
    fn flat_matches_closed_form() {
        let p = build("flat", 2);
        let x: [f64; 2] = [0.4, -1.1];
        let expected: f64 = x.iter().map(|v| (2.0 * v).exp()).sum();
        assert_relative_eq!(p.eval(&x).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(
            p.partial(&[0, 0], &x).unwrap(),
            4.0 * (2.0 * x[0]).exp(),
            max_relative = 1e-15
        );
        assert_eq!(p.partial(&[0, 1], &x).unwrap(), 0.0);
        // log det Hess = Σ (ln 4 + 2 x_j)
        assert_relative_eq!(
            p.log_det_hess(&x).unwrap().unwrap(),
            2.0 * 4.0_f64.ln() + 2.0 * (x[0] + x[1]),
            max_relative = 1e-14
        );
    }

    #[test]
    fn fubini_study_one_dimensional_closed_forms() {
        let p = build("fubini_study", 1);
        assert_relative_eq!(p.eval(&[0.0]).unwrap(), 2.0_f64.ln(), max_relative = 1e-15);
        for &x in &[-1.0f64, 0.0, 0.8] {
            let e = (2.0 * x).exp();
            assert_relative_eq!(
                p.partial(&[0, 0], &[x]).unwrap(),
                4.0 * e / (1.0 + e).powi(2),
                max_relative = 1e-13
            );
        }
        assert!(p.compactifiable());
    }

    #[test]
    fn fubini_study_shift_translates() {
        let mut params = BTreeMap::new();
        params.insert("shift".to_string(), 0.7);
        let shifted = make_builtin_potential(&PotentialDescriptor {
            kind: "fubini_study".into(),
            n: 1,
            params,
        })
        .unwrap();
        let plain = build("fubini_study", 1);
        assert_relative_eq!(
            shifted.eval(&[0.7]).unwrap(),
            plain.eval(&[0.0]).unwrap(),
            max_relative = 1e-15
        );
        assert!(shifted.compactifiable());
    }

    #[test]
    fn cosh_neg_is_hyperbolic_cosine() {
        let p = build("cosh_neg", 1);
        for &x in &[-0.9, 0.0, 1.3] {
            assert_relative_eq!(p.eval(&[x]).unwrap(), (2.0 * x).cosh(), max_relative = 1e-14);
            assert_relative_eq!(
                p.partial(&[0, 0], &[x]).unwrap(),
                4.0 * (2.0 * x).cosh(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn sum_exp_defaults_and_custom_terms() {
        let p = build("sum_exp", 1);
        // default: e^{2x} + e^{-x}
        assert_relative_eq!(p.eval(&[0.0]).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(p.partial(&[0], &[0.0]).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.partial(&[0, 0], &[0.0]).unwrap(), 5.0, max_relative = 1e-14);

        let mut params = BTreeMap::new();
        params.insert("c1".to_string(), 2.0);
        params.insert("a1_1".to_string(), 1.5);
        params.insert("c2".to_string(), 0.5);
        params.insert("a2_1".to_string(), -1.0);
        let q = make_builtin_potential(&PotentialDescriptor {
            kind: "sum_exp".into(),
            n: 1,
            params,
        })
        .unwrap();
        let x = 0.3;
        assert_relative_eq!(
            q.eval(&[x]).unwrap(),
            2.0 * (1.5 * x).exp() + 0.5 * (-x).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn sum_exp_rejects_bad_params() {
        let mut params = BTreeMap::new();
        params.insert("c1".to_string(), -1.0);
        let err = make_builtin_potential(&PotentialDescriptor {
            kind: "sum_exp".into(),
            n: 1,
            params,
        });
        assert!(matches!(err, Err(FuncError::NonPositiveCoefficient(_))));

        let mut params = BTreeMap::new();
        params.insert("c2".to_string(), 1.0); // c1 missing: stray key
        let err = make_builtin_potential(&PotentialDescriptor {
            kind: "sum_exp".into(),
            n: 1,
            params,
        });
        assert!(matches!(err, Err(FuncError::BadParameter { .. })));
    }

    #[test]
    fn fs_cosh_is_block_diagonal() {
        let p = build("fs_cosh", 2);
        let x = [0.3, 0.7];
        assert_eq!(p.partial(&[0, 1], &x).unwrap(), 0.0);
        assert_relative_eq!(
            p.partial(&[1, 1], &x).unwrap(),
            4.0 * (2.0 * x[1]).cosh(),
            max_relative = 1e-14
        );
        let e = (2.0 * x[0]).exp();
        assert_relative_eq!(
            p.partial(&[0, 0], &x).unwrap(),
            4.0 * e / (1.0 + e).powi(2),
            max_relative = 1e-13
        );
        assert!(matches!(
            make_builtin_potential(&PotentialDescriptor::bare("fs_cosh", 1)),
            Err(FuncError::BadDimension { min: 2, got: 1 })
        ));
    }

    #[test]
    fn unknown_names_and_stray_params_are_rejected() {
        assert!(matches!(
            make_builtin_potential(&PotentialDescriptor::bare("plato", 2)),
            Err(FuncError::UnknownName(_))
        ));
        let mut params = BTreeMap::new();
        params.insert("bogus".to_string(), 1.0);
        assert!(matches!(
            make_builtin_potential(&PotentialDescriptor {
                kind: "flat".into(),
                n: 1,
                params,
            }),
            Err(FuncError::BadParameter { .. })
        ));
    }

    #[test]
    fn battery_covers_all_families() {
        let entries = default_battery_entries();
        let names: std::collections::BTreeSet<&str> =
            entries.iter().map(|e| e.name.as_str()).collect();
        for name in builtin_names() {
            assert!(names.contains(name), "battery is missing {name}");
        }
        // and carries a two-dimensional entry
        assert!(entries.iter().any(|e| e.n == 2));
    }

    #[test]
    fn descriptor_round_trips_through_json() {
        let mut params = BTreeMap::new();
        params.insert("shift".to_string(), -0.25);
        let desc = PotentialDescriptor { kind: "fubini_study".into(), n: 2, params };
        let text = serde_json::to_string(&desc).unwrap();
        let back: PotentialDescriptor = serde_json::from_str(&text).unwrap();
        let a = make_builtin_potential(&desc).unwrap();
        let b = make_builtin_potential(&back).unwrap();
        let x = [0.1, 0.9];
        assert_eq!(a.eval(&x).unwrap().to_bits(), b.eval(&x).unwrap().to_bits());
    }
}
