//! Cross-module properties: the translations, games, unravellings, and
//! characteristic forms must all tell the same story about the same models.

use std::collections::BTreeSet;

use mdlwb_core::fixtures;
use mdlwb_core::games::{bisim_relation, bisimilar_alt_n, check_bisimulation};
use mdlwb_core::generate;
use mdlwb_core::model::{neighborhood, partial_unravelling, ClassSpec, S5Interpretation};
use mdlwb_core::semantics::{check_concept, check_formula, Valuation};
use mdlwb_core::syntax::{
    concept_rank, formula_rank, free_variables, standard_translation, Signature,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sig() -> Signature {
    Signature::new(["A"], ["r"]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Translating a local concept to a one-variable formula preserves rank
    /// and truth at every point of the bundled models.
    #[test]
    fn standard_translation_matches_direct_evaluation(seed in any::<u64>()) {
        let sig = sig();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let concept = generate::concept(&mut rng, &sig, 3, true);
        let phi = standard_translation(&concept, "x").unwrap();
        prop_assert_eq!(formula_rank(&phi), concept_rank(&concept));
        prop_assert_eq!(free_variables(&phi), BTreeSet::from(["x".to_string()]));
        for model in [fixtures::fixture_mi(), fixtures::fixture_mj()] {
            for world in model.worlds() {
                for ind in model.domain() {
                    let valuation = Valuation::from([("x".to_string(), ind.clone())]);
                    prop_assert_eq!(
                        check_concept(&model, world, ind, &concept).unwrap(),
                        check_formula(&model, world, &valuation, &phi).unwrap(),
                        "{} at ({}, {})",
                        concept,
                        world,
                        ind
                    );
                }
            }
        }
    }

    /// Fully bisimilar points satisfy the same local concepts.
    #[test]
    fn bisimilar_points_agree_on_local_concepts(seed in any::<u64>()) {
        let sig = sig();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let concept = generate::concept(&mut rng, &sig, 2, true);
        let mi = fixtures::fixture_mi();
        let mj = fixtures::fixture_mj();
        for config in bisim_relation(&mi, &mj).unwrap() {
            let (w, d) = &config.left;
            let (v, e) = &config.right;
            prop_assert_eq!(
                check_concept(&mi, w, d, &concept).unwrap(),
                check_concept(&mj, v, e, &concept).unwrap(),
                "{} at ({},{}) ~ ({},{})",
                concept,
                w,
                d,
                v,
                e
            );
        }
    }
}

/// The map sending each node of a partial unravelling back to the original
/// individual induces a bisimulation between the original model and the
/// unravelled one.
#[test]
fn unravelling_quotients_are_bisimulations() {
    let class = ClassSpec::new(sig(), 2, 2).unwrap();
    let sampled: Vec<S5Interpretation> = class.models().step_by(400).collect();
    assert!(sampled.len() >= 10);
    for model in sampled {
        for start in model.domain() {
            let unravelled = partial_unravelling(&model, start, 2).unwrap();
            let mut pairs: Vec<((String, String), (String, String))> = Vec::new();
            for w in model.worlds() {
                for e in unravelled.interpretation.domain() {
                    pairs.push((
                        (w.clone(), unravelled.rho[e].clone()),
                        (w.clone(), e.clone()),
                    ));
                }
            }
            assert_eq!(
                check_bisimulation(&model, &unravelled.interpretation, &pairs).unwrap(),
                None,
                "unravelling of {start} in {}",
                mdlwb_core::model::save(&model)
            );
        }
    }
}

/// Restricting a model to the radius-n neighborhood of an individual
/// preserves alternating equivalence up to depth n at that individual.
#[test]
fn neighborhood_restrictions_preserve_bounded_equivalence() {
    for model in [fixtures::fixture_mi(), fixtures::fixture_mj()] {
        for radius in 0..=2 {
            for d in model.domain() {
                let members = neighborhood(&model, std::slice::from_ref(d), radius).unwrap();
                let restricted = model.restrict(&members).unwrap();
                for w in model.worlds() {
                    assert!(
                        bisimilar_alt_n(&model, w, d, &restricted, w, d, radius).unwrap(),
                        "radius {radius} at ({w}, {d})"
                    );
                }
            }
        }
    }
}
