//! The verification suites behind `mdlwb verify`, plus two standalone
//! checks (bisimulation invariance and the two-sorted reference evaluator)
//! used by the acceptance tests.
//!
//! Each suite replays a body of checks over the enumerated class and stops
//! at the first failure, which it reports with a full witness.  All
//! randomness comes from a caller-supplied seed, so a suite run is a pure
//! function of its options.

use std::collections::BTreeMap;

use mdlwb_core::fixtures;
use mdlwb_core::games::{
    bisim_relation, bisimilar, bisimilar_alt, bisimilar_alt_n, bisimilar_n, ef_equivalent_n,
};
use mdlwb_core::generate;
use mdlwb_core::model::{ClassSpec, S5Interpretation};
use mdlwb_core::normalform::{
    characterize, compute_nf, count_atoms, nf_equal, nf_to_concept, AtomUniverse, NormalForm,
};
use mdlwb_core::semantics::{
    check_formula, is_l_local_at, ConceptEvaluator, Equivalence, Valuation,
};
use mdlwb_core::syntax::{
    concept_rank, formula_rank, free_variables, parse_concept, parse_formula,
    standard_translation, two_sorted_translation, ConceptAst, FormulaAst, RoleExpr, Signature,
    Sort, TwoSortedFormulaAst, TwoSortedVar,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{equivalence_doc, guard_states, model_doc, valuation_doc, CliError};

/// The suite names `mdlwb verify` accepts, in documentation order.
pub const SUITES: [&str; 6] = ["abisim", "nf", "locality", "st", "efinv", "mc3"];

/// Options shared by every suite.  `samples` scales the seeded random part
/// (its exact meaning is per-suite and echoed in the report details);
/// `rank` and `concept` are honored by the suites that take them.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: Option<usize>,
    pub class: ClassSpec,
    pub rank: Option<usize>,
    pub concept: Option<String>,
    pub force: bool,
}

impl SuiteOptions {
    pub fn new(class: ClassSpec) -> Self {
        SuiteOptions { seed: 0, samples: None, class, rank: None, concept: None, force: false }
    }
}

/// What a suite found: pass/fail, how many individual checks ran, suite
/// metadata, and the first failure witness if there was one.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub details: Value,
    pub failure: Option<Value>,
}

impl SuiteOutcome {
    fn pass(suite: &'static str, checks: usize, details: Value) -> Self {
        SuiteOutcome { suite, passed: true, checks, details, failure: None }
    }

    fn fail(suite: &'static str, checks: usize, details: Value, failure: Value) -> Self {
        SuiteOutcome { suite, passed: false, checks, details, failure: Some(failure) }
    }
}

/// Runs the named suite; unknown names are usage errors.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    match name {
        "abisim" => alternating_hierarchy_suite(opts),
        "nf" => normal_form_suite(opts),
        "locality" => locality_suite(opts),
        "st" => standard_translation_suite(opts),
        "efinv" => game_invariance_suite(opts),
        "mc3" => characterization_suite(opts),
        other => Err(CliError::Usage(format!(
            "unknown suite `{other}` (expected one of: {})",
            SUITES.join(", ")
        ))),
    }
}

fn suite_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Materializes the class once, guarded by the state cap.
fn class_models(opts: &SuiteOptions) -> Result<Vec<S5Interpretation>, CliError> {
    guard_states("enumerating the class", &opts.class.count(), opts.force)?;
    Ok(opts.class.models().collect())
}

fn sample_point<'a>(
    rng: &mut ChaCha8Rng,
    models: &'a [S5Interpretation],
) -> (usize, &'a S5Interpretation, &'a str, &'a str) {
    let index = rng.gen_range(0..models.len());
    let m = &models[index];
    let w = &m.worlds()[rng.gen_range(0..m.worlds().len())];
    let d = &m.domain()[rng.gen_range(0..m.domain().len())];
    (index, m, w, d)
}

fn point_doc(model_index: usize, m: &S5Interpretation, world: &str, ind: &str) -> Value {
    json!({
        "model_index": model_index,
        "model": model_doc(m),
        "world": world,
        "individual": ind,
    })
}

// ---------------------------------------------------------------------------
// st: concept evaluation against the one-variable translation
// ---------------------------------------------------------------------------

/// Draws random local concepts and checks, at every point of every class
/// model, that direct concept evaluation agrees with evaluating the
/// one-free-variable translation.  `samples` is the number of concepts
/// (default 200, rank at most 3).
fn standard_translation_suite(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let models = class_models(opts)?;
    let sig = opts.class.signature();
    let count = opts.samples.unwrap_or(200);
    let mut rng = suite_rng(opts.seed);
    let concepts: Vec<ConceptAst> =
        (0..count).map(|_| generate::concept(&mut rng, sig, 3, true)).collect();
    let translated: Vec<FormulaAst> = concepts
        .iter()
        .map(|c| standard_translation(c, "x"))
        .collect::<Result<_, _>>()?;

    let mut checks = 0usize;
    let details = json!({ "concepts": count, "max_rank": 3, "models": models.len() });
    for (model_index, m) in models.iter().enumerate() {
        let eval = ConceptEvaluator::new(m);
        for (c, f) in concepts.iter().zip(&translated) {
            for w in m.worlds() {
                let ext = eval.extension(w, c)?;
                for d in m.domain() {
                    let direct = ext.iter().any(|x| x == d);
                    let eta: Valuation = [("x".to_string(), d.clone())].into();
                    let via_formula = check_formula(m, w, &eta, f)?;
                    checks += 1;
                    if direct != via_formula {
                        return Ok(SuiteOutcome::fail(
                            "st",
                            checks,
                            details,
                            json!({
                                "concept": c.to_string(),
                                "formula": f.to_string(),
                                "point": point_doc(model_index, m, w, d),
                                "concept_holds": direct,
                            }),
                        ));
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::pass("st", checks, details))
}

// ---------------------------------------------------------------------------
// abisim: the alternating hierarchy against plain bounded depth
// ---------------------------------------------------------------------------

/// One configuration's worth of hierarchy checks: for `n` in `0..=2`,
/// depth-`2n+1` bisimilarity implies `n` alternating rounds implies
/// depth-`n` bisimilarity; and the unbounded relations coincide.  Returns
/// the discrepancy document on failure.
fn hierarchy_at(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    j: &S5Interpretation,
    v: &str,
    e: &str,
    checks: &mut usize,
) -> Result<Option<Value>, CliError> {
    for n in 0..=2usize {
        let deep = bisimilar_n(i, w, d, j, v, e, 2 * n + 1)?;
        let alternating = bisimilar_alt_n(i, w, d, j, v, e, n)?;
        let shallow = bisimilar_n(i, w, d, j, v, e, n)?;
        *checks += 1;
        if (deep && !alternating) || (alternating && !shallow) {
            return Ok(Some(json!({
                "rounds": n,
                "depth_bisimilar_at_2n_plus_1": deep,
                "alternating_at_n": alternating,
                "depth_bisimilar_at_n": shallow,
            })));
        }
    }
    let unbounded = bisimilar(i, w, d, j, v, e)?;
    let alternating = bisimilar_alt(i, w, d, j, v, e)?;
    *checks += 1;
    if unbounded != alternating {
        return Ok(Some(json!({
            "unbounded_bisimilar": unbounded,
            "unbounded_alternating": alternating,
        })));
    }
    Ok(None)
}

/// Exhausts every configuration within each class model, then a seeded
/// sample of cross-model pairs (default 300), checking the alternating
/// hierarchy at each.  `samples` is the number of cross-model pairs.
fn alternating_hierarchy_suite(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let models = class_models(opts)?;
    let cross = opts.samples.unwrap_or(300);
    let details = json!({ "models": models.len(), "cross_model_pairs": cross });
    let mut checks = 0usize;

    for (model_index, m) in models.iter().enumerate() {
        for w in m.worlds() {
            for d in m.domain() {
                for v in m.worlds() {
                    for e in m.domain() {
                        if let Some(found) = hierarchy_at(m, w, d, m, v, e, &mut checks)? {
                            return Ok(SuiteOutcome::fail(
                                "abisim",
                                checks,
                                details,
                                json!({
                                    "left": point_doc(model_index, m, w, d),
                                    "right": point_doc(model_index, m, v, e),
                                    "discrepancy": found,
                                }),
                            ));
                        }
                    }
                }
            }
        }
    }

    let mut rng = suite_rng(opts.seed);
    for _ in 0..cross {
        let left = rng.gen_range(0..models.len());
        let right = rng.gen_range(0..models.len());
        let (a, b) = (&models[left], &models[right]);
        for w in a.worlds() {
            for d in a.domain() {
                for v in b.worlds() {
                    for e in b.domain() {
                        if let Some(found) = hierarchy_at(a, w, d, b, v, e, &mut checks)? {
                            return Ok(SuiteOutcome::fail(
                                "abisim",
                                checks,
                                details,
                                json!({
                                    "left": point_doc(left, a, w, d),
                                    "right": point_doc(right, b, v, e),
                                    "discrepancy": found,
                                }),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::pass("abisim", checks, details))
}

// ---------------------------------------------------------------------------
// nf: characteristic forms — atoms, equality, satisfaction, uniqueness
// ---------------------------------------------------------------------------

/// Where an atom of the full universe sits: a concept name, an `exists`
/// over a role and a child form, or a `dia` over a child form.
enum AtomRef {
    Name(usize),
    Exists { role: usize, child: usize },
    Diamond { child: usize },
}

/// The atoms of a full universe, rendered as concepts, in the fixed order
/// names → per-role `exists` children → `dia` children.
fn universe_atoms(
    u: &AtomUniverse,
    sig: &Signature,
) -> Result<Vec<(ConceptAst, AtomRef)>, CliError> {
    let mut out = Vec::new();
    for (i, name) in sig.concepts().iter().enumerate() {
        out.push((ConceptAst::name(name.clone()), AtomRef::Name(i)));
    }
    if u.rank() > 0 {
        let child_universe = u.child().expect("positive rank comes with a child universe");
        let rendered: Vec<ConceptAst> = u
            .children()
            .iter()
            .map(|c| nf_to_concept(c, child_universe))
            .collect::<Result<_, _>>()?;
        for (role_index, role) in sig.roles().iter().enumerate() {
            for (child, concept) in rendered.iter().enumerate() {
                out.push((
                    ConceptAst::exists(RoleExpr::local(role.clone()), concept.clone()),
                    AtomRef::Exists { role: role_index, child },
                ));
            }
        }
        for (child, concept) in rendered.iter().enumerate() {
            out.push((ConceptAst::dia(concept.clone()), AtomRef::Diamond { child }));
        }
    }
    Ok(out)
}

fn atom_sign(nf: &NormalForm, atom: &AtomRef, u: &AtomUniverse) -> bool {
    match atom {
        AtomRef::Name(i) => nf.positive_concepts().contains(i),
        AtomRef::Exists { role, child } => {
            nf.exists_positive()[*role].contains(&u.children()[*child])
        }
        AtomRef::Diamond { child } => nf.diamond_positive().contains(&u.children()[*child]),
    }
}

/// The conjunction of all atoms with the given signs, in atom order.
fn signed_conjunction(atoms: &[(ConceptAst, AtomRef)], signs: &[bool]) -> ConceptAst {
    let mut acc: Option<ConceptAst> = None;
    for ((concept, _), sign) in atoms.iter().zip(signs) {
        let literal =
            if *sign { concept.clone() } else { ConceptAst::not(concept.clone()) };
        acc = Some(match acc {
            None => literal,
            Some(prev) => ConceptAst::and(prev, literal),
        });
    }
    acc.unwrap_or(ConceptAst::Top)
}

/// Checks the characteristic forms up to `rank` (default 2): the closed-form
/// atom count matches the materialized universe; each atom's truth at a
/// point matches its sign in the point's form; form equality coincides with
/// depth-bounded bisimilarity (exhaustively within each model, plus a
/// seeded cross-model sample — `samples`, default 400); and at strided
/// points the rendered form is satisfied while every single-atom flip of it
/// is not.
fn normal_form_suite(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let sig = opts.class.signature();
    let max_rank = opts.rank.unwrap_or(2);
    let models = class_models(opts)?;
    let cross = opts.samples.unwrap_or(400);
    let mut checks = 0usize;

    let mut universes = Vec::new();
    let mut atom_counts = Vec::new();
    for k in 0..=max_rank {
        let u = AtomUniverse::full(sig, k)?;
        let closed_form = count_atoms(sig, k)?;
        atom_counts.push(closed_form.to_string());
        checks += 1;
        if BigUint::from(u.atom_count()) != closed_form {
            return Ok(SuiteOutcome::fail(
                "nf",
                checks,
                json!({ "max_rank": max_rank }),
                json!({
                    "rank": k,
                    "materialized_atoms": u.atom_count(),
                    "closed_form": closed_form.to_string(),
                }),
            ));
        }
        universes.push(u);
    }
    let atoms: Vec<Vec<(ConceptAst, AtomRef)>> =
        universes.iter().map(|u| universe_atoms(u, sig)).collect::<Result<_, _>>()?;

    let details = json!({
        "max_rank": max_rank,
        "atoms_per_rank": atom_counts,
        "models": models.len(),
        "cross_model_pairs": cross,
    });

    let mut strided = 0usize;
    let mut point_counter = 0usize;
    for (model_index, m) in models.iter().enumerate() {
        let eval = ConceptEvaluator::new(m);
        let points: Vec<(String, String)> = m
            .worlds()
            .iter()
            .flat_map(|w| m.domain().iter().map(move |d| (w.clone(), d.clone())))
            .collect();
        let mut forms: Vec<Vec<NormalForm>> = Vec::with_capacity(points.len());
        for (w, d) in &points {
            let per_rank: Vec<NormalForm> =
                (0..=max_rank).map(|k| compute_nf(m, w, d, k)).collect::<Result<_, _>>()?;
            forms.push(per_rank);
        }

        // Atom truth at the point == the atom's sign in the point's form.
        let domain_size = m.domain().len();
        for k in 0..=max_rank {
            for (concept, atom) in &atoms[k] {
                for (world_index, w) in m.worlds().iter().enumerate() {
                    let ext = eval.extension(w, concept)?;
                    for (dom_index, d) in m.domain().iter().enumerate() {
                        let point = world_index * domain_size + dom_index;
                        let holds = ext.iter().any(|x| x == d);
                        let positive = atom_sign(&forms[point][k], atom, &universes[k]);
                        checks += 1;
                        if holds != positive {
                            return Ok(SuiteOutcome::fail(
                                "nf",
                                checks,
                                details,
                                json!({
                                    "rank": k,
                                    "atom": concept.to_string(),
                                    "point": point_doc(model_index, m, w, d),
                                    "satisfied": holds,
                                    "sign_in_form": positive,
                                }),
                            ));
                        }
                    }
                }
            }
        }

        // Form equality decides depth-bounded bisimilarity within the model.
        for (pi, (w1, d1)) in points.iter().enumerate() {
            for (pj, (w2, d2)) in points.iter().enumerate() {
                for (k, (left_form, right_form)) in
                    forms[pi].iter().zip(&forms[pj]).enumerate()
                {
                    let same_form = nf_equal(left_form, right_form)?;
                    let game = bisimilar_n(m, w1, d1, m, w2, d2, k)?;
                    checks += 1;
                    if same_form != game {
                        return Ok(SuiteOutcome::fail(
                            "nf",
                            checks,
                            details,
                            json!({
                                "rank": k,
                                "left": point_doc(model_index, m, w1, d1),
                                "right": point_doc(model_index, m, w2, d2),
                                "equal_forms": same_form,
                                "depth_bisimilar": game,
                            }),
                        ));
                    }
                }
            }
        }

        // At strided points: the rendered top-rank form holds, and flipping
        // any single atom of it yields an unsatisfied conjunction.
        for (pi, (w, d)) in points.iter().enumerate() {
            point_counter += 1;
            if !(point_counter - 1).is_multiple_of(97) {
                continue;
            }
            strided += 1;
            let top = &forms[pi][max_rank];
            let rendered = nf_to_concept(top, &universes[max_rank])?;
            checks += 1;
            if !eval.check(w, d, &rendered)? {
                return Ok(SuiteOutcome::fail(
                    "nf",
                    checks,
                    details,
                    json!({
                        "point": point_doc(model_index, m, w, d),
                        "rendered": rendered.to_string(),
                        "problem": "the point does not satisfy its own rendered form",
                    }),
                ));
            }
            let signs: Vec<bool> = atoms[max_rank]
                .iter()
                .map(|(_, atom)| atom_sign(top, atom, &universes[max_rank]))
                .collect();
            for flip in 0..signs.len() {
                let mut flipped = signs.clone();
                flipped[flip] = !flipped[flip];
                let variant = signed_conjunction(&atoms[max_rank], &flipped);
                checks += 1;
                if eval.check(w, d, &variant)? {
                    return Ok(SuiteOutcome::fail(
                        "nf",
                        checks,
                        details,
                        json!({
                            "point": point_doc(model_index, m, w, d),
                            "flipped_atom": atoms[max_rank][flip].0.to_string(),
                            "problem": "a single flipped atom left the conjunction satisfied",
                        }),
                    ));
                }
            }
        }
    }

    // Cross-model sample of the equality/bisimilarity correspondence.
    let mut rng = suite_rng(opts.seed);
    for _ in 0..cross {
        let (left, a, w1, d1) = sample_point(&mut rng, &models);
        let (right, b, w2, d2) = sample_point(&mut rng, &models);
        for k in 0..=max_rank {
            let fa = compute_nf(a, w1, d1, k)?;
            let fb = compute_nf(b, w2, d2, k)?;
            let same_form = nf_equal(&fa, &fb)?;
            let game = bisimilar_n(a, w1, d1, b, w2, d2, k)?;
            checks += 1;
            if same_form != game {
                return Ok(SuiteOutcome::fail(
                    "nf",
                    checks,
                    details,
                    json!({
                        "rank": k,
                        "left": point_doc(left, a, w1, d1),
                        "right": point_doc(right, b, w2, d2),
                        "equal_forms": same_form,
                        "depth_bisimilar": game,
                    }),
                ));
            }
        }
    }

    let mut details = details;
    if let Value::Object(map) = &mut details {
        map.insert("strided_points".to_string(), json!(strided));
    }
    Ok(SuiteOutcome::pass("nf", checks, details))
}

// ---------------------------------------------------------------------------
// locality: translated concepts only see an exponential-radius ball
// ---------------------------------------------------------------------------

/// Draws random local concepts (default 20, rank at most 1 unless `--rank`
/// raises it) and checks that each one's translation is `3^rank`-local at
/// every point of every class model.
fn locality_suite(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let models = class_models(opts)?;
    let sig = opts.class.signature();
    let count = opts.samples.unwrap_or(20);
    let rank_cap = opts.rank.unwrap_or(1);
    let mut rng = suite_rng(opts.seed);
    let concepts: Vec<ConceptAst> =
        (0..count).map(|_| generate::concept(&mut rng, sig, rank_cap, true)).collect();
    let details =
        json!({ "concepts": count, "max_rank": rank_cap, "models": models.len() });

    let mut checks = 0usize;
    for c in &concepts {
        let rank = concept_rank(c);
        let radius = 3usize.pow(rank as u32);
        let phi = standard_translation(c, "x")?;
        for (model_index, m) in models.iter().enumerate() {
            for w in m.worlds() {
                for d in m.domain() {
                    let tuple = [d.clone()];
                    checks += 1;
                    if !is_l_local_at(&phi, m, w, &tuple, radius)? {
                        return Ok(SuiteOutcome::fail(
                            "locality",
                            checks,
                            details,
                            json!({
                                "concept": c.to_string(),
                                "radius": radius,
                                "point": point_doc(model_index, m, w, d),
                            }),
                        ));
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::pass("locality", checks, details))
}

// ---------------------------------------------------------------------------
// efinv: round-bounded game equivalence preserves rank-bounded formulas
// ---------------------------------------------------------------------------

/// The fixed formula battery: one free variable `x`, ranks 0 through 2.
const INVARIANCE_FORMULAS: [&str; 12] = [
    "A(x)",
    "~A(x)",
    "r(x,x)",
    "exists y . r(x,y)",
    "exists y . (r(x,y) & A(y))",
    "box A(x)",
    "forall y . (r(x,y) -> A(y))",
    "exists y . ~(y = x)",
    "dia box A(x)",
    "exists y . (r(x,y) & dia A(y))",
    "box exists y . r(x,y)",
    "dia exists y . r(y,x)",
];

/// For each `n` in `0..=2`, samples single-individual configurations until
/// `samples` (default 500) game-equivalent pairs are found, and checks that
/// each pair agrees on every battery formula of rank at most `n`.  Also
/// checks strictness on the bundled models: a bisimilar pair that loses the
/// one-round game.
/// Largest round count `n <= 2` at which the tuple game equates the two
/// points, if any.  A duplicator strategy for `n + 1` rounds wins the
/// `n`-round game by playing the same replies, so testing stops at the
/// first loss.
fn game_depth(
    a: &S5Interpretation,
    w: &str,
    d: &str,
    b: &S5Interpretation,
    v: &str,
    e: &str,
) -> Result<Option<usize>, CliError> {
    let dbar = [d.to_string()];
    let ebar = [e.to_string()];
    let mut depth = None;
    for n in 0..=2usize {
        if !ef_equivalent_n(a, w, &dbar, b, v, &ebar, n)? {
            break;
        }
        depth = Some(n);
    }
    Ok(depth)
}

/// Both points of a game-equivalent pair must satisfy the same battery
/// formulas up to the surviving round count; returns the failure document
/// on the first disagreement.
#[allow(clippy::too_many_arguments)]
fn battery_agreement(
    battery: &[(String, FormulaAst, usize)],
    max_n: usize,
    left: (usize, &S5Interpretation, &str, &str),
    right: (usize, &S5Interpretation, &str, &str),
    checks: &mut usize,
) -> Result<Option<Value>, CliError> {
    let (left_index, a, w, d) = left;
    let (right_index, b, v, e) = right;
    let eta_left: Valuation = [("x".to_string(), d.to_string())].into();
    let eta_right: Valuation = [("x".to_string(), e.to_string())].into();
    for (text, f, rank) in battery {
        if *rank > max_n {
            continue;
        }
        let left_holds = check_formula(a, w, &eta_left, f)?;
        let right_holds = check_formula(b, v, &eta_right, f)?;
        *checks += 1;
        if left_holds != right_holds {
            return Ok(Some(json!({
                "rounds": max_n,
                "formula": text,
                "formula_rank": rank,
                "left": point_doc(left_index, a, w, d),
                "right": point_doc(right_index, b, v, e),
                "left_holds": left_holds,
            })));
        }
    }
    Ok(None)
}

fn game_invariance_suite(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let models = class_models(opts)?;
    let sig = opts.class.signature();
    let battery: Vec<(String, FormulaAst, usize)> = INVARIANCE_FORMULAS
        .iter()
        .map(|text| {
            parse_formula(text, sig).map(|f| {
                let rank = formula_rank(&f);
                (text.to_string(), f, rank)
            })
        })
        .collect::<Result<_, _>>()
        .map_err(|e| {
            CliError::Semantic(format!(
                "the efinv battery needs a signature declaring concept A and role r: {e}"
            ))
        })?;

    let needed = opts.samples.unwrap_or(500);
    let mut rng = suite_rng(opts.seed);
    let mut checks = 0usize;
    let mut found_per_round = [0usize; 3];
    let mut within_pairs = 0usize;

    // First pass, exhaustive: every ordered pair of distinct points inside
    // each model.  Points of the same model are game-equivalent far more
    // often than random cross-model picks, so this is where the two-round
    // pairs come from.  The identical pair is skipped — it cannot disagree.
    for (index, m) in models.iter().enumerate() {
        let mut configs = Vec::new();
        for w in m.worlds() {
            for d in m.domain() {
                configs.push((w.as_str(), d.as_str()));
            }
        }
        for &(w, d) in &configs {
            for &(v, e) in &configs {
                if w == v && d == e {
                    continue;
                }
                within_pairs += 1;
                let Some(max_n) = game_depth(m, w, d, m, v, e)? else {
                    continue;
                };
                for slot in &mut found_per_round[..=max_n] {
                    *slot += 1;
                }
                if let Some(failure) = battery_agreement(
                    &battery,
                    max_n,
                    (index, m, w, d),
                    (index, m, v, e),
                    &mut checks,
                )? {
                    return Ok(SuiteOutcome::fail(
                        "efinv",
                        checks,
                        json!({ "formulas": battery.len() }),
                        failure,
                    ));
                }
            }
        }
    }

    // Second pass, seeded: pairs drawn from the whole class, each checked
    // at the deepest round its equivalence survives.
    let budget = needed.saturating_mul(200).max(1000);
    let mut attempts = 0usize;
    let mut sampled_found = 0usize;
    while sampled_found < needed && attempts < budget {
        attempts += 1;
        let (left, a, w, d) = sample_point(&mut rng, &models);
        let (right, b, v, e) = sample_point(&mut rng, &models);
        if left == right && w == v && d == e {
            continue;
        }
        let Some(max_n) = game_depth(a, w, d, b, v, e)? else {
            continue;
        };
        sampled_found += 1;
        for slot in &mut found_per_round[..=max_n] {
            *slot += 1;
        }
        if let Some(failure) = battery_agreement(
            &battery,
            max_n,
            (left, a, w, d),
            (right, b, v, e),
            &mut checks,
        )? {
            return Ok(SuiteOutcome::fail(
                "efinv",
                checks,
                json!({ "formulas": battery.len() }),
                failure,
            ));
        }
    }
    if sampled_found < needed {
        return Ok(SuiteOutcome::fail(
            "efinv",
            checks,
            json!({ "formulas": battery.len() }),
            json!({
                "requested_pairs": needed,
                "found_pairs": sampled_found,
                "attempts": attempts,
                "problem": "not enough game-equivalent pairs in the sampling budget",
            }),
        ));
    }

    // Strictness: the bundled pair is bisimilar, yet the one-round game
    // already separates it.
    let mi = fixtures::fixture_mi();
    let mj = fixtures::fixture_mj();
    let tuple_a = ["a".to_string()];
    let one_round = ef_equivalent_n(&mi, "v1", &tuple_a, &mj, "w1", &tuple_a, 1)?;
    let unbounded = bisimilar(&mi, "v1", "a", &mj, "w1", "a")?;
    checks += 2;
    let details = json!({
        "formulas": battery.len(),
        "within_model_pairs": within_pairs,
        "sampled_pairs": sampled_found,
        "sampling_attempts": attempts,
        "found": found_per_round.to_vec(),
    });
    if one_round || !unbounded {
        return Ok(SuiteOutcome::fail(
            "efinv",
            checks,
            details,
            json!({
                "problem": "the bundled pair should be bisimilar but lose the one-round game",
                "one_round_game": one_round,
                "bisimilar": unbounded,
            }),
        ));
    }
    Ok(SuiteOutcome::pass("efinv", checks, details))
}

// ---------------------------------------------------------------------------
// mc3: the characterization pipeline on known-invariant and known-bad inputs
// ---------------------------------------------------------------------------

fn characterization_case_doc(
    input: &str,
    rank: usize,
    result: &ConceptAst,
    satisfying_points: usize,
    distinct_forms: usize,
    verdict: &Equivalence,
) -> Value {
    let (verdict_doc, counterexample) = equivalence_doc(verdict);
    json!({
        "input": input,
        "rank": rank,
        "result": result.to_string(),
        "result_rank": concept_rank(result),
        "satisfying_points": satisfying_points,
        "distinct_forms": distinct_forms,
        "verdict": verdict_doc,
        "counterexample": counterexample,
    })
}

/// With `--concept C`, characterizes the translation of `C` at `--rank`
/// (default: the concept's own rank) and passes iff the result is equivalent
/// on the class.  Without it, runs a fixed battery: five local concepts that
/// must characterize exactly at their rank, then `r(x,x)`, which must fail
/// with a counterexample.
fn characterization_suite(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let class = &opts.class;
    guard_states("enumerating the class", &class.count(), opts.force)?;
    let mut checks = 0usize;
    let mut cases = Vec::new();

    if let Some(text) = &opts.concept {
        let c = parse_concept(text, class.signature())?;
        let rank = opts.rank.unwrap_or_else(|| concept_rank(&c));
        let phi = standard_translation(&c, "x")?;
        let (result, report) = characterize(&phi, rank, class)?;
        let equal = matches!(report.verdict, Equivalence::Equal);
        checks += 1;
        cases.push(characterization_case_doc(
            text,
            rank,
            &result,
            report.satisfying_points,
            report.distinct_forms,
            &report.verdict,
        ));
        let details = json!({ "cases": cases });
        if equal {
            return Ok(SuiteOutcome::pass("mc3", checks, details));
        }
        let failure = json!({
            "input": text,
            "rank": rank,
            "problem": "the translation is not rank-bounded invariant on the class",
        });
        return Ok(SuiteOutcome::fail("mc3", checks, details, failure));
    }

    let battery: [(&str, usize); 5] =
        [("A", 0), ("dia A", 1), ("exists r . A", 1), ("box ~A", 1), ("exists r . dia A", 2)];
    for (text, rank) in battery {
        let c = parse_concept(text, class.signature()).map_err(|e| {
            CliError::Semantic(format!(
                "the mc3 battery needs a signature declaring concept A and role r: {e}"
            ))
        })?;
        let phi = standard_translation(&c, "x")?;
        let (result, report) = characterize(&phi, rank, class)?;
        let equal = matches!(report.verdict, Equivalence::Equal);
        let exact = concept_rank(&result) == rank;
        checks += 1;
        cases.push(characterization_case_doc(
            text,
            rank,
            &result,
            report.satisfying_points,
            report.distinct_forms,
            &report.verdict,
        ));
        if !(equal && exact) {
            let failure = json!({
                "input": text,
                "rank": rank,
                "equivalent": equal,
                "result_rank": concept_rank(&result),
            });
            return Ok(SuiteOutcome::fail("mc3", checks, json!({ "cases": cases }), failure));
        }
    }

    // A genuine non-invariant: reflexivity is not preserved by bisimulation,
    // so no concept of any rank captures it and the scan must produce a
    // counterexample.
    let phi = parse_formula("r(x,x)", class.signature()).map_err(|e| {
        CliError::Semantic(format!(
            "the mc3 battery needs a signature declaring concept A and role r: {e}"
        ))
    })?;
    let (result, report) = characterize(&phi, 2, class)?;
    let refuted = matches!(report.verdict, Equivalence::Counterexample(_));
    checks += 1;
    cases.push(characterization_case_doc(
        "r(x,x)",
        2,
        &result,
        report.satisfying_points,
        report.distinct_forms,
        &report.verdict,
    ));
    let details = json!({ "cases": cases });
    if !refuted {
        let failure = json!({
            "input": "r(x,x)",
            "rank": 2,
            "problem": "a non-invariant formula characterized without a counterexample",
        });
        return Ok(SuiteOutcome::fail("mc3", checks, details, failure));
    }
    Ok(SuiteOutcome::pass("mc3", checks, details))
}

// ---------------------------------------------------------------------------
// Bisimulation invariance (standalone, used by the acceptance tests)
// ---------------------------------------------------------------------------

/// Per-concept membership bits: `[concept][world index][domain index]`.
type ExtensionTable = Vec<Vec<Vec<bool>>>;

fn extension_tables(
    m: &S5Interpretation,
    pools: &[Vec<ConceptAst>],
) -> Result<Vec<ExtensionTable>, CliError> {
    let eval = ConceptEvaluator::new(m);
    pools
        .iter()
        .map(|pool| {
            pool.iter()
                .map(|c| {
                    m.worlds()
                        .iter()
                        .map(|w| {
                            let ext = eval.extension(w, c)?;
                            Ok(m.domain()
                                .iter()
                                .map(|d| ext.iter().any(|x| x == d))
                                .collect::<Vec<bool>>())
                        })
                        .collect::<Result<Vec<_>, CliError>>()
                })
                .collect::<Result<ExtensionTable, CliError>>()
        })
        .collect()
}

fn position(names: &[String], name: &str) -> usize {
    names.iter().position(|x| x == name).expect("name returned by the solver is declared")
}

/// One model pair's worth of invariance checks; `pools[n]` holds concepts of
/// rank at most `n` for `n` in `0..=2`, `pools[3]` the rank-≤2 pool used for
/// the unbounded relation.
fn invariance_at(
    a: &S5Interpretation,
    left: usize,
    b: &S5Interpretation,
    right: usize,
    pools: &[Vec<ConceptAst>],
    checks: &mut usize,
) -> Result<Option<Value>, CliError> {
    let ext_a = extension_tables(a, pools)?;
    let ext_b = if std::ptr::eq(a, b) { ext_a.clone() } else { extension_tables(b, pools)? };

    // Unbounded: every configuration of the full bisimilarity relation
    // agrees on every pooled concept.
    for cfg in bisim_relation(a, b)? {
        let (w, d) = (&cfg.left.0, &cfg.left.1);
        let (v, e) = (&cfg.right.0, &cfg.right.1);
        let (wi, di) = (position(a.worlds(), w), position(a.domain(), d));
        let (vi, ei) = (position(b.worlds(), v), position(b.domain(), e));
        for (ci, c) in pools[3].iter().enumerate() {
            let on_left = ext_a[3][ci][wi][di];
            let on_right = ext_b[3][ci][vi][ei];
            *checks += 1;
            if on_left != on_right {
                return Ok(Some(json!({
                    "mode": "unbounded",
                    "concept": c.to_string(),
                    "left": point_doc(left, a, w, d),
                    "right": point_doc(right, b, v, e),
                    "left_holds": on_left,
                })));
            }
        }
    }

    // Bounded: depth-n bisimilar configurations agree on rank-≤n concepts.
    for n in 0..=2usize {
        for (wi, w) in a.worlds().iter().enumerate() {
            for (di, d) in a.domain().iter().enumerate() {
                for (vi, v) in b.worlds().iter().enumerate() {
                    for (ei, e) in b.domain().iter().enumerate() {
                        if !bisimilar_n(a, w, d, b, v, e, n)? {
                            continue;
                        }
                        for (ci, c) in pools[n].iter().enumerate() {
                            let on_left = ext_a[n][ci][wi][di];
                            let on_right = ext_b[n][ci][vi][ei];
                            *checks += 1;
                            if on_left != on_right {
                                return Ok(Some(json!({
                                    "mode": "depth",
                                    "rounds": n,
                                    "concept": c.to_string(),
                                    "left": point_doc(left, a, w, d),
                                    "right": point_doc(right, b, v, e),
                                    "left_holds": on_left,
                                })));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Bisimilar points satisfy the same local concepts — unbounded
/// bisimilarity against a rank-≤2 pool and depth-`n` bisimilarity against
/// rank-≤`n` pools, exhaustively within each class model plus a seeded
/// sample of cross-model pairs.  `samples` is the pool size per depth
/// (default 100).
pub fn bisimulation_invariance(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let models = class_models(opts)?;
    let sig = opts.class.signature();
    let pool_size = opts.samples.unwrap_or(100);
    let cross = 200usize;
    let mut rng = suite_rng(opts.seed);
    let pools: Vec<Vec<ConceptAst>> = (0..=3usize)
        .map(|i| {
            let cap = if i == 3 { 2 } else { i };
            (0..pool_size).map(|_| generate::concept(&mut rng, sig, cap, true)).collect()
        })
        .collect();
    let details = json!({
        "concepts_per_depth": pool_size,
        "models": models.len(),
        "cross_model_pairs": cross,
    });

    let mut checks = 0usize;
    for (model_index, m) in models.iter().enumerate() {
        if let Some(found) = invariance_at(m, model_index, m, model_index, &pools, &mut checks)?
        {
            return Ok(SuiteOutcome::fail("bisim-invariance", checks, details, found));
        }
    }
    for _ in 0..cross {
        let left = rng.gen_range(0..models.len());
        let right = rng.gen_range(0..models.len());
        if let Some(found) =
            invariance_at(&models[left], left, &models[right], right, &pools, &mut checks)?
        {
            return Ok(SuiteOutcome::fail("bisim-invariance", checks, details, found));
        }
    }
    Ok(SuiteOutcome::pass("bisim-invariance", checks, details))
}

// ---------------------------------------------------------------------------
// Two-sorted reference evaluation (standalone, used by the acceptance tests)
// ---------------------------------------------------------------------------

/// Evaluates a two-sorted formula directly: quantifiers loop over the sort's
/// carrier, predicates look their arguments up in `env` (one namespace for
/// both sorts — the translation keeps them disjoint).  This shares nothing
/// with the modal evaluator, which is the point: it is the independent side
/// of the agreement check below.
pub fn eval_two_sorted(
    m: &S5Interpretation,
    f: &TwoSortedFormulaAst,
    env: &mut BTreeMap<String, String>,
) -> Result<bool, CliError> {
    match f {
        TwoSortedFormulaAst::Pred { name, args } => {
            let values: Vec<String> = args
                .iter()
                .map(|a| {
                    env.get(&a.name).cloned().ok_or_else(|| {
                        CliError::Semantic(format!(
                            "unbound variable `{}` in a reference evaluation",
                            a.name
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
            if m.signature().is_concept(name) {
                match values.as_slice() {
                    [d, v] => Ok(m.has_concept(name, v, d)),
                    _ => Err(CliError::Semantic(format!(
                        "concept predicate `{name}` takes one individual and one world"
                    ))),
                }
            } else if m.signature().is_role(name) {
                match values.as_slice() {
                    [d, e, v] => Ok(m.has_role(name, v, d, e)),
                    _ => Err(CliError::Semantic(format!(
                        "role predicate `{name}` takes two individuals and one world"
                    ))),
                }
            } else {
                Err(CliError::Semantic(format!("undeclared predicate `{name}`")))
            }
        }
        TwoSortedFormulaAst::Eq(a, b) => {
            let lookup = |var: &TwoSortedVar| {
                env.get(&var.name).cloned().ok_or_else(|| {
                    CliError::Semantic(format!(
                        "unbound variable `{}` in a reference evaluation",
                        var.name
                    ))
                })
            };
            Ok(lookup(a)? == lookup(b)?)
        }
        TwoSortedFormulaAst::Not(g) => Ok(!eval_two_sorted(m, g, env)?),
        TwoSortedFormulaAst::And(g, h) => {
            Ok(eval_two_sorted(m, g, env)? && eval_two_sorted(m, h, env)?)
        }
        TwoSortedFormulaAst::Or(g, h) => {
            Ok(eval_two_sorted(m, g, env)? || eval_two_sorted(m, h, env)?)
        }
        TwoSortedFormulaAst::Implies(g, h) => {
            let premise = eval_two_sorted(m, g, env)?;
            let conclusion = eval_two_sorted(m, h, env)?;
            Ok(!premise || conclusion)
        }
        TwoSortedFormulaAst::Exists(var, body) => quantify(m, var, body, env, true),
        TwoSortedFormulaAst::Forall(var, body) => quantify(m, var, body, env, false),
    }
}

fn quantify(
    m: &S5Interpretation,
    var: &TwoSortedVar,
    body: &TwoSortedFormulaAst,
    env: &mut BTreeMap<String, String>,
    existential: bool,
) -> Result<bool, CliError> {
    let carrier: &[String] = match var.sort {
        Sort::Domain => m.domain(),
        Sort::World => m.worlds(),
    };
    let previous = env.get(&var.name).cloned();
    let mut result = !existential;
    for value in carrier {
        env.insert(var.name.clone(), value.clone());
        if eval_two_sorted(m, body, env)? == existential {
            result = existential;
            break;
        }
    }
    match previous {
        Some(p) => {
            env.insert(var.name.clone(), p);
        }
        None => {
            env.remove(&var.name);
        }
    }
    Ok(result)
}

/// All valuations of `vars` over `domain`, in odometer order.
fn assignments(vars: &[String], domain: &[String]) -> Vec<Valuation> {
    let mut out: Vec<Valuation> = vec![BTreeMap::new()];
    for var in vars {
        out = out
            .into_iter()
            .flat_map(|base| {
                domain.iter().map(move |d| {
                    let mut extended = base.clone();
                    extended.insert(var.clone(), d.clone());
                    extended
                })
            })
            .collect();
    }
    out
}

/// Random formulas against the reference evaluator: for `samples` (default
/// 100) random rank-≤2 formulas with free variables among `x, y`, the
/// two-sorted translation evaluated by [`eval_two_sorted`] agrees with the
/// modal evaluator at every world and valuation of a seeded model sample
/// (100 class models per formula).
pub fn two_sorted_agreement(opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    let models = class_models(opts)?;
    let sig = opts.class.signature();
    let formula_count = opts.samples.unwrap_or(100);
    let models_per_formula = 100.min(models.len());
    let scope = ["x".to_string(), "y".to_string()];
    let mut rng = suite_rng(opts.seed);
    let details = json!({
        "formulas": formula_count,
        "max_rank": 2,
        "models_per_formula": models_per_formula,
    });

    let mut checks = 0usize;
    for _ in 0..formula_count {
        let f = generate::formula(&mut rng, sig, &scope, 2);
        let translated = two_sorted_translation(&f, "v")?;
        let frees: Vec<String> = free_variables(&f).into_iter().collect();
        for _ in 0..models_per_formula {
            let model_index = rng.gen_range(0..models.len());
            let m = &models[model_index];
            for w in m.worlds() {
                for eta in assignments(&frees, m.domain()) {
                    let direct = check_formula(m, w, &eta, &f)?;
                    let mut env: BTreeMap<String, String> = eta.clone();
                    env.insert("v".to_string(), w.clone());
                    let reference = eval_two_sorted(m, &translated, &mut env)?;
                    checks += 1;
                    if direct != reference {
                        return Ok(SuiteOutcome::fail(
                            "two-sorted",
                            checks,
                            details,
                            json!({
                                "formula": f.to_string(),
                                "translated": translated.to_string(),
                                "model_index": model_index,
                                "model": model_doc(m),
                                "world": w,
                                "valuation": valuation_doc(&eta),
                                "direct": direct,
                            }),
                        ));
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::pass("two-sorted", checks, details))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_class() -> ClassSpec {
        let sig = Signature::new(["A"], ["r"]).unwrap();
        ClassSpec::new(sig, 2, 2).unwrap()
    }

    #[test]
    fn unknown_suites_are_usage_errors() {
        let opts = SuiteOptions::new(tiny_class());
        let err = run_suite("nope", &opts).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
        assert!(err.message().contains("abisim"));
    }

    #[test]
    fn the_reference_evaluator_handles_both_sorts() {
        let m = fixtures::fixture_mi();
        let f = parse_formula("exists y . (r(x,y) & dia A(y))", m.signature()).unwrap();
        let translated = two_sorted_translation(&f, "v").unwrap();
        for w in m.worlds() {
            for d in m.domain() {
                let eta: Valuation = [("x".to_string(), d.clone())].into();
                let direct = check_formula(&m, w, &eta, &f).unwrap();
                let mut env: BTreeMap<String, String> = eta.clone();
                env.insert("v".to_string(), w.clone());
                let reference = eval_two_sorted(&m, &translated, &mut env).unwrap();
                assert_eq!(direct, reference, "at ({w}, {d})");
                assert_eq!(env.len(), 2, "quantifier bindings must be restored");
            }
        }
    }

    #[test]
    fn assignments_enumerate_the_full_product() {
        let vars = ["x".to_string(), "y".to_string()];
        let domain = ["a".to_string(), "b".to_string()];
        let all = assignments(&vars, &domain);
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|eta| eta.len() == 2));
        let none = assignments(&[], &domain);
        assert_eq!(none.len(), 1);
        assert!(none[0].is_empty());
    }
}
