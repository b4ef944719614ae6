//! The ten acceptance checks of the workbench, one test per criterion.
//!
//! Each test prints a single `acceptance NN (<label>): PASS/FAIL` line
//! (visible with `cargo test -- --nocapture`) and then asserts, so a
//! broken criterion is both readable and red.  Everything here runs over
//! the tiny class — all models with at most two worlds and two
//! individuals over concept `A` and role `r` — plus the two bundled
//! models and their six-pair relation.

use std::process::Command;

use mdlwb::suites::{bisimulation_invariance, run_suite, two_sorted_agreement, SuiteOptions};
use mdlwb::CliError;
use mdlwb_core::games::{bisimilar_alt_n, check_bisimulation};
use mdlwb_core::model::{gaifman, neighborhood, partial_unravelling, ClassSpec};
use mdlwb_core::syntax::Signature;
use serde_json::json;

fn tiny_class() -> ClassSpec {
    let sig = Signature::new(["A"], ["r"]).expect("the tiny signature is valid");
    ClassSpec::new(sig, 2, 2).expect("the tiny class is valid")
}

fn options() -> SuiteOptions {
    SuiteOptions::new(tiny_class())
}

/// Prints the one-line verdict for a criterion and returns whether it
/// passed, so the caller can assert right after.
fn announce(number: &str, label: &str, passed: bool, detail: &str) -> bool {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("acceptance {number} ({label}): {verdict} — {detail}");
    passed
}

fn suite_verdict(number: &str, label: &str, suite: &str, detail_of: impl FnOnce(&serde_json::Value) -> String) {
    let outcome = run_suite(suite, &options())
        .unwrap_or_else(|e: CliError| panic!("the {suite} suite should run: {e}"));
    let detail = if outcome.passed {
        format!("{}; {} checks", detail_of(&outcome.details), outcome.checks)
    } else {
        format!("{:?}", outcome.failure)
    };
    assert!(
        announce(number, label, outcome.passed, &detail),
        "the {suite} suite failed: {:?}",
        outcome.failure
    );
}

#[test]
fn c01_the_bundled_pair_shows_modalized_roles_break_invariance() {
    let bin = env!("CARGO_BIN_EXE_mdlwb");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .output()
            .expect("the binary should run")
            .status
            .code()
    };
    let relation = run(&["verify-bisim", "-m1", "MI.json", "-m2", "MJ.json", "-r", "R.json"]);
    let holds_left = run(&[
        "check-concept", "-m", "MI.json", "-w", "v1", "-d", "a", "-c", "exists dia r . A",
    ]);
    let fails_right = run(&[
        "check-concept", "-m", "MJ.json", "-w", "w1", "-d", "a", "-c", "exists dia r . A",
    ]);
    let game = run(&["bisim", "-m1", "MI.json", "-p1", "v1,a", "-m2", "MJ.json", "-p2", "w1,a"]);

    let passed = relation == Some(0)
        && holds_left == Some(0)
        && fails_right == Some(1)
        && game == Some(0);
    assert!(
        announce(
            "01",
            "bundled models",
            passed,
            "six-pair relation verified; exists dia r . A holds at (MI,v1,a), fails at (MJ,w1,a); the points are bisimilar",
        ),
        "exit codes were relation={relation:?} left={holds_left:?} right={fails_right:?} bisim={game:?}",
    );
}

#[test]
fn c02_concepts_agree_with_their_one_variable_translations() {
    suite_verdict("02", "standard translation", "st", |details| {
        format!(
            "{} random concepts of rank <= {} against {} models",
            details["concepts"], details["max_rank"], details["models"]
        )
    });
}

#[test]
fn c03_bisimilar_points_satisfy_the_same_concepts() {
    let outcome = bisimulation_invariance(&options()).expect("the suite should run");
    let detail = if outcome.passed {
        format!(
            "{} concepts per depth; {} models and {} cross-model pairs; {} checks",
            outcome.details["concepts_per_depth"],
            outcome.details["models"],
            outcome.details["cross_model_pairs"],
            outcome.checks
        )
    } else {
        format!("{:?}", outcome.failure)
    };
    assert!(
        announce("03", "bisimulation invariance", outcome.passed, &detail),
        "the invariance suite failed: {:?}",
        outcome.failure
    );
}

#[test]
fn c04_the_alternating_hierarchy_sandwiches_and_converges() {
    suite_verdict("04", "alternating hierarchy", "abisim", |details| {
        format!(
            "all point pairs of {} models plus {} cross-model pairs, depths 0..=2 and unbounded",
            details["models"], details["cross_model_pairs"]
        )
    });
}

#[test]
fn c05_characteristic_forms_match_depth_bounded_bisimilarity() {
    let outcome = run_suite("nf", &options()).expect("the suite should run");
    let atoms_ok = outcome.details["atoms_per_rank"] == json!(["1", "5", "65"]);
    let passed = outcome.passed && atoms_ok;
    let detail = if passed {
        format!(
            "ranks 0..=2 over {} models; atom counts per rank {}; {} checks",
            outcome.details["models"], outcome.details["atoms_per_rank"], outcome.checks
        )
    } else if !outcome.passed {
        format!("{:?}", outcome.failure)
    } else {
        format!("unexpected atom counts {}", outcome.details["atoms_per_rank"])
    };
    assert!(
        announce("05", "characteristic forms", passed, &detail),
        "the normal-form suite failed: atoms_ok={atoms_ok}, failure={:?}",
        outcome.failure
    );
}

#[test]
fn c06_game_equivalent_pairs_agree_on_the_formula_battery() {
    let outcome = run_suite("efinv", &options()).expect("the suite should run");
    let sampled = outcome.details["sampled_pairs"].as_u64().unwrap_or(0);
    let two_round = outcome.details["found"][2].as_u64().unwrap_or(0);
    let passed = outcome.passed && sampled >= 500 && two_round >= 1;
    let detail = if passed {
        format!(
            "{} sampled pairs plus {} within-model pairs; {} survive two rounds; one-round game separates the bundled bisimilar pair",
            sampled, outcome.details["within_model_pairs"], two_round
        )
    } else {
        format!("sampled={sampled}, two_round={two_round}, failure={:?}", outcome.failure)
    };
    assert!(
        announce("06", "game invariance", passed, &detail),
        "the game suite failed: sampled={sampled}, failure={:?}",
        outcome.failure
    );
}

#[test]
fn c07_translated_local_concepts_are_radius_bounded() {
    suite_verdict("07", "locality", "locality", |details| {
        format!(
            "{} random concepts of rank <= {} at radius 3^rank against {} models",
            details["concepts"], details["max_rank"], details["models"]
        )
    });
}

#[test]
fn c08_unravellings_project_home_and_neighborhoods_stay_bisimilar() {
    let class = tiny_class();
    let models: Vec<_> = class.models().collect();

    // A spread of radius-two partial unravellings: the projection must be
    // a bisimulation onto the original, and the radius-two ball around
    // the root must have a forest role graph.
    let stride = (models.len() / 50).max(1);
    let mut unravelled = 0usize;
    for m in models.iter().step_by(stride) {
        for d in m.domain().to_vec() {
            let u = partial_unravelling(m, &d, 2).expect("the unravelling should build");
            assert!(!u.interpretation.domain().is_empty(), "the unravelling keeps its root");
            let mut pairs = Vec::new();
            for w in u.interpretation.worlds() {
                for (node, original) in &u.rho {
                    pairs.push(((w.clone(), node.clone()), (w.clone(), original.clone())));
                }
            }
            let violation = check_bisimulation(&u.interpretation, m, &pairs)
                .expect("the projection relation should be well-formed");
            assert!(
                violation.is_none(),
                "the projection should be a bisimulation: {violation:?}"
            );
            let tuple = [u.root.clone()];
            let ball = neighborhood(&u.interpretation, &tuple, 2).expect("the ball should build");
            let restricted = u.interpretation.restrict(&ball).expect("the ball is nonempty");
            assert!(
                gaifman(&restricted).is_forest(),
                "the radius-2 ball around the root should be a forest"
            );
            unravelled += 1;
        }
    }

    // Exhaustively, every point of every model stays depth-bounded
    // bisimilar to its neighborhood restriction at the matching radius.
    let mut compared = 0usize;
    for m in &models {
        for w in m.worlds().to_vec() {
            for d in m.domain().to_vec() {
                let tuple = [d.clone()];
                for radius in 0..=2usize {
                    let ball =
                        neighborhood(m, &tuple, radius).expect("the ball should build");
                    let restricted = m.restrict(&ball).expect("the ball is nonempty");
                    let agrees = bisimilar_alt_n(m, &w, &d, &restricted, &w, &d, radius)
                        .expect("the game should run");
                    assert!(
                        agrees,
                        "a point should stay depth-{radius} bisimilar to its radius-{radius} ball"
                    );
                    compared += 1;
                }
            }
        }
    }

    assert!(announce(
        "08",
        "unravellings and neighborhoods",
        true,
        &format!(
            "{unravelled} projections verified as bisimulations with forest balls; {compared} neighborhood restrictions stay depth-bisimilar"
        ),
    ));
}

#[test]
fn c09_characterization_synthesizes_equivalent_concepts() {
    suite_verdict("09", "characterization", "mc3", |details| {
        let cases = details["cases"].as_array().map(Vec::len).unwrap_or(0);
        format!("{cases} pipeline cases, including the refuted non-invariant formula")
    });
}

#[test]
fn c10_the_two_sorted_reading_matches_direct_evaluation() {
    let outcome = two_sorted_agreement(&options()).expect("the suite should run");
    let detail = if outcome.passed {
        format!(
            "{} random formulas of rank <= {} against {} models each; {} checks",
            outcome.details["formulas"],
            outcome.details["max_rank"],
            outcome.details["models_per_formula"],
            outcome.checks
        )
    } else {
        format!("{:?}", outcome.failure)
    };
    assert!(
        announce("10", "two-sorted reference", outcome.passed, &detail),
        "the two-sorted suite failed: {:?}",
        outcome.failure
    );
}
