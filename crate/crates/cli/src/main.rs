//! `mdlwb`: model checking, bisimulation and round-based games, Gaifman
//! data, unravellings, characteristic normal forms, and verification suites
//! for S5 world/domain product models.
//!
//! Reports go to stdout as single-line JSON with a fixed key order (or as
//! indented text with `--human`); identical invocations print identical
//! bytes unless `--timing` is on.  Exit status: 0 for "yes"/ok, 1 for
//! "no"/violation/counterexample/failed suite, 2 for unusable input, 3 for
//! input the logic rejects.

use std::ffi::OsString;
use std::io::{self, Write};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use mdlwb::suites::{run_suite, SuiteOptions};
use mdlwb::{
    class_doc, class_from_flags, equivalence_doc, guard_states, human_text, load_model_arg,
    load_relation_arg, model_doc, parse_point, parse_pointed_tuple, signature_from_flags,
    valuation_doc, valuation_from_bindings, CliError, EXIT_FALSE, EXIT_TRUE, EXIT_USAGE,
};
use mdlwb_core::games::{
    bisimilar, bisimilar_alt, bisimilar_alt_n, bisimilar_n, check_bisimulation,
    ef_equivalent_n_with_caps, BisimClause, EfCaps,
};
use mdlwb_core::model::{
    gaifman, partial_unravelling, tree_unravelling, ClassSpec, S5Interpretation,
};
use mdlwb_core::normalform::{
    characterize, compute_nf, count_atoms, nf_to_concept, nf_to_json, AtomUniverse,
};
use mdlwb_core::semantics::{
    check_concept, check_formula, concept_extension, is_l_local_at, Equivalence,
};
use mdlwb_core::syntax::{
    concept_rank, formula_rank, free_variables, parse_concept, parse_formula,
    standard_translation, two_sorted_translation,
};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

/// Workbench for S5 description-logic models: checking, games, normal forms.
#[derive(Parser)]
#[command(name = "mdlwb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Render the report as indented text instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Append wall-clock timing to the report (off by default, so identical
    /// invocations print identical bytes).
    #[arg(long, global = true)]
    timing: bool,
    /// Bypass the MDLWB_MAX_STATES ceiling and the game caps.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a concept at a point of a model.
    CheckConcept(CheckConceptArgs),
    /// Evaluate a formula at a world under a valuation.
    CheckFormula(CheckFormulaArgs),
    /// List the extension of a concept at a world.
    Extension(ExtensionArgs),
    /// Decide bisimilarity of two pointed models.
    Bisim(BisimArgs),
    /// Check that a relation is a bisimulation between two models.
    VerifyBisim(VerifyBisimArgs),
    /// Play the round-bounded tuple game between two pointed models.
    Ef(EfArgs),
    /// Compute the characteristic form of a point at a rank.
    Nf(NfArgs),
    /// Search for a concept equivalent to a one-variable formula on a class.
    Characterize(CharacterizeArgs),
    /// Unravel a model from a start individual.
    Unravel(UnravelArgs),
    /// Report the role graph of a model: edges, forestness, distances.
    Gaifman(GaifmanArgs),
    /// Check a formula for radius-bounded locality over a class.
    Locality(LocalityArgs),
    /// Translate a concept to a formula, or a formula to two-sorted form.
    Translate(TranslateArgs),
    /// Stream every model of a class, or count them.
    Enumerate(EnumerateArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

/// The class flags shared by class-driven subcommands.
#[derive(Args)]
struct ClassFlags {
    /// Concept names of the class signature (comma-separated).
    #[arg(long, default_value = "A")]
    concepts: String,
    /// Role names of the class signature (comma-separated).
    #[arg(long, default_value = "r")]
    roles: String,
    /// Largest number of worlds enumerated.
    #[arg(long, default_value_t = 2)]
    max_worlds: usize,
    /// Largest domain size enumerated.
    #[arg(long, default_value_t = 2)]
    max_domain: usize,
}

impl ClassFlags {
    fn class(&self) -> Result<ClassSpec, CliError> {
        class_from_flags(&self.concepts, &self.roles, self.max_worlds, self.max_domain)
    }
}

#[derive(Args)]
struct CheckConceptArgs {
    /// Model file (or bundled MI.json / MJ.json).
    #[arg(short, long)]
    model: String,
    /// World to evaluate at.
    #[arg(short, long)]
    world: String,
    /// Individual to evaluate at.
    #[arg(short = 'd', long)]
    individual: String,
    /// Concept text, e.g. `exists dia r . A`.
    #[arg(short, long)]
    concept: String,
}

#[derive(Args)]
struct CheckFormulaArgs {
    /// Model file (or bundled MI.json / MJ.json).
    #[arg(short, long)]
    model: String,
    /// World to evaluate at.
    #[arg(short, long)]
    world: String,
    /// Formula text, e.g. `exists y . (r(x,y) & A(y))`.
    #[arg(short, long)]
    formula: String,
    /// Free-variable binding `var=individual` (repeatable).
    #[arg(short, long)]
    bind: Vec<String>,
}

#[derive(Args)]
struct ExtensionArgs {
    /// Model file (or bundled MI.json / MJ.json).
    #[arg(short, long)]
    model: String,
    /// World to evaluate at.
    #[arg(short, long)]
    world: String,
    /// Concept text.
    #[arg(short, long)]
    concept: String,
}

#[derive(Args)]
struct BisimArgs {
    /// Left model file.
    #[arg(long)]
    m1: String,
    /// Left point, `world,individual`.
    #[arg(long)]
    p1: String,
    /// Right model file.
    #[arg(long)]
    m2: String,
    /// Right point, `world,individual`.
    #[arg(long)]
    p2: String,
    /// Depth bound in rounds (unbounded without it).
    #[arg(long)]
    depth: Option<usize>,
    /// Use the alternating round structure.
    #[arg(long)]
    alt: bool,
}

#[derive(Args)]
struct VerifyBisimArgs {
    /// Left model file.
    #[arg(long)]
    m1: String,
    /// Right model file.
    #[arg(long)]
    m2: String,
    /// Relation file of `[[world,individual],[world,individual]]` pairs
    /// (or bundled R.json).
    #[arg(short, long)]
    relation: String,
}

#[derive(Args)]
struct EfArgs {
    /// Left model file.
    #[arg(long)]
    m1: String,
    /// Left position, `world,individual[,individual…]`.
    #[arg(long)]
    p1: String,
    /// Right model file.
    #[arg(long)]
    m2: String,
    /// Right position, `world,individual[,individual…]`.
    #[arg(long)]
    p2: String,
    /// Number of rounds.
    #[arg(long)]
    rounds: usize,
}

#[derive(Args)]
struct NfArgs {
    /// Model file (or bundled MI.json / MJ.json).
    #[arg(short, long)]
    model: String,
    /// World of the point.
    #[arg(short, long)]
    world: String,
    /// Individual of the point.
    #[arg(short = 'd', long)]
    individual: String,
    /// Rank of the form.
    #[arg(long)]
    rank: usize,
    /// Also render the form as a concept over the full atom universe.
    #[arg(long)]
    render: bool,
}

#[derive(Args)]
struct CharacterizeArgs {
    /// Formula with exactly one free variable.
    #[arg(short, long)]
    formula: String,
    /// Target rank of the characterizing concept.
    #[arg(long)]
    rank: usize,
    #[command(flatten)]
    class: ClassFlags,
}

#[derive(Args)]
struct UnravelArgs {
    /// Model file (or bundled MI.json / MJ.json).
    #[arg(short, long)]
    model: String,
    /// Start individual.
    #[arg(short = 'd', long)]
    individual: String,
    /// Tree-unravel to this depth.
    #[arg(long, conflicts_with_all = ["partial", "radius"])]
    depth: Option<usize>,
    /// Build the finite partial unravelling instead.
    #[arg(long, requires = "radius")]
    partial: bool,
    /// Radius of the partial unravelling.
    #[arg(long, requires = "partial")]
    radius: Option<usize>,
}

#[derive(Args)]
struct GaifmanArgs {
    /// Model file (or bundled MI.json / MJ.json).
    #[arg(short, long)]
    model: String,
    /// Also report distances from this individual.
    #[arg(long)]
    from: Option<String>,
}

#[derive(Args)]
struct LocalityArgs {
    /// Formula to test (free variables become the tuple, in sorted order).
    #[arg(short, long)]
    formula: String,
    /// Neighborhood radius.
    #[arg(long)]
    radius: usize,
    #[command(flatten)]
    class: ClassFlags,
}

#[derive(Args)]
struct TranslateArgs {
    /// Concept to translate (with --st).
    #[arg(short, long, conflicts_with = "formula")]
    concept: Option<String>,
    /// Formula to translate (with --two-sorted).
    #[arg(short, long)]
    formula: Option<String>,
    /// One-free-variable translation of a concept.
    #[arg(long, conflicts_with = "two_sorted", requires = "concept")]
    st: bool,
    /// Two-sorted translation of a formula.
    #[arg(long, requires = "formula")]
    two_sorted: bool,
    /// Take the signature from this model file instead of --concepts/--roles.
    #[arg(short, long)]
    model: Option<String>,
    /// Concept names when no model is given (comma-separated).
    #[arg(long, default_value = "A")]
    concepts: String,
    /// Role names when no model is given (comma-separated).
    #[arg(long, default_value = "r")]
    roles: String,
    /// Free variable of the one-variable translation.
    #[arg(long, default_value = "x")]
    var: String,
    /// World variable of the two-sorted translation.
    #[arg(long, default_value = "v")]
    world_var: String,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    class: ClassFlags,
    /// Print only the closed-form model count.
    #[arg(long)]
    count: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: abisim, nf, locality, st, efinv, or mc3.
    suite: String,
    /// Seed for the randomized parts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale of the seeded random part (per-suite meaning, echoed in the
    /// report).
    #[arg(long)]
    samples: Option<usize>,
    /// Rank bound for the suites that take one.
    #[arg(long)]
    rank: Option<usize>,
    /// Characterize this single concept instead of the mc3 battery.
    #[arg(long)]
    concept: Option<String>,
    #[command(flatten)]
    class: ClassFlags,
}

/// What a subcommand produced: a report (with its yes/no answer), or a
/// stream already written to stdout.
enum Outcome {
    Report { affirmative: bool, report: Value },
    Stream,
}

fn main() {
    let code = run(std::env::args_os());
    std::process::exit(code);
}

fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_TRUE
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    let started = Instant::now();
    match dispatch(&cli) {
        Ok(Outcome::Report { affirmative, mut report }) => {
            if cli.timing {
                if let Value::Object(map) = &mut report {
                    map.insert(
                        "timing_ms".to_string(),
                        json!(started.elapsed().as_millis() as u64),
                    );
                }
            }
            if cli.human {
                print!("{}", human_text(&report));
            } else {
                println!("{report}");
            }
            if affirmative {
                EXIT_TRUE
            } else {
                EXIT_FALSE
            }
        }
        Ok(Outcome::Stream) => EXIT_TRUE,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// clap has no multi-character short flags, so the doubled `-m1`/`-p1`
/// spellings are promoted to their long forms before parsing.
fn normalize_args<I: IntoIterator<Item = OsString>>(args: I) -> Vec<OsString> {
    args.into_iter()
        .map(|arg| match arg.to_str() {
            Some(s) => {
                let doubled = ["-m1", "-m2", "-p1", "-p2"].iter().any(|flag| {
                    s == *flag || s.strip_prefix(*flag).is_some_and(|rest| rest.starts_with('='))
                });
                if doubled {
                    OsString::from(format!("-{s}"))
                } else {
                    arg
                }
            }
            None => arg,
        })
        .collect()
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::CheckConcept(a) => cmd_check_concept(a),
        Command::CheckFormula(a) => cmd_check_formula(a),
        Command::Extension(a) => cmd_extension(a),
        Command::Bisim(a) => cmd_bisim(a, cli.force),
        Command::VerifyBisim(a) => cmd_verify_bisim(a, cli.force),
        Command::Ef(a) => cmd_ef(a, cli.force),
        Command::Nf(a) => cmd_nf(a),
        Command::Characterize(a) => cmd_characterize(a, cli.force),
        Command::Unravel(a) => cmd_unravel(a, cli.force),
        Command::Gaifman(a) => cmd_gaifman(a),
        Command::Locality(a) => cmd_locality(a, cli.force),
        Command::Translate(a) => cmd_translate(a),
        Command::Enumerate(a) => cmd_enumerate(a, cli.force),
        Command::Verify(a) => cmd_verify(a, cli.force),
    }
}

fn cmd_check_concept(a: &CheckConceptArgs) -> Result<Outcome, CliError> {
    let m = load_model_arg(&a.model)?;
    let c = parse_concept(&a.concept, m.signature())?;
    let result = check_concept(&m, &a.world, &a.individual, &c)?;
    let report = json!({
        "command": "check-concept",
        "model": a.model,
        "world": a.world,
        "individual": a.individual,
        "concept": c.to_string(),
        "rank": concept_rank(&c),
        "result": result,
    });
    Ok(Outcome::Report { affirmative: result, report })
}

fn cmd_check_formula(a: &CheckFormulaArgs) -> Result<Outcome, CliError> {
    let m = load_model_arg(&a.model)?;
    let f = parse_formula(&a.formula, m.signature())?;
    let eta = valuation_from_bindings(&a.bind)?;
    let result = check_formula(&m, &a.world, &eta, &f)?;
    let report = json!({
        "command": "check-formula",
        "model": a.model,
        "world": a.world,
        "formula": f.to_string(),
        "rank": formula_rank(&f),
        "valuation": valuation_doc(&eta),
        "result": result,
    });
    Ok(Outcome::Report { affirmative: result, report })
}

fn cmd_extension(a: &ExtensionArgs) -> Result<Outcome, CliError> {
    let m = load_model_arg(&a.model)?;
    let c = parse_concept(&a.concept, m.signature())?;
    let extension = concept_extension(&m, &a.world, &c)?;
    let report = json!({
        "command": "extension",
        "model": a.model,
        "world": a.world,
        "concept": c.to_string(),
        "extension": extension,
        "count": extension.len(),
    });
    Ok(Outcome::Report { affirmative: true, report })
}

/// Size of the product configuration space two models span.
fn game_states(m1: &S5Interpretation, m2: &S5Interpretation) -> BigUint {
    BigUint::from(m1.worlds().len())
        * BigUint::from(m1.domain().len())
        * BigUint::from(m2.worlds().len())
        * BigUint::from(m2.domain().len())
}

fn cmd_bisim(a: &BisimArgs, force: bool) -> Result<Outcome, CliError> {
    let m1 = load_model_arg(&a.m1)?;
    let m2 = load_model_arg(&a.m2)?;
    let (w, d) = parse_point(&a.p1)?;
    let (v, e) = parse_point(&a.p2)?;
    guard_states("the bisimulation game", &game_states(&m1, &m2), force)?;
    let (mode, depth_doc, result) = match (a.depth, a.alt) {
        (None, false) => ("unbounded", Value::Null, bisimilar(&m1, &w, &d, &m2, &v, &e)?),
        (Some(n), false) => ("depth", json!(n), bisimilar_n(&m1, &w, &d, &m2, &v, &e, n)?),
        (None, true) => {
            ("alternating", Value::Null, bisimilar_alt(&m1, &w, &d, &m2, &v, &e)?)
        }
        (Some(n), true) => {
            ("alternating-depth", json!(n), bisimilar_alt_n(&m1, &w, &d, &m2, &v, &e, n)?)
        }
    };
    let report = json!({
        "command": "bisim",
        "mode": mode,
        "depth": depth_doc,
        "left": {"model": a.m1, "world": w, "individual": d},
        "right": {"model": a.m2, "world": v, "individual": e},
        "result": result,
    });
    Ok(Outcome::Report { affirmative: result, report })
}

fn clause_doc(clause: &BisimClause) -> Value {
    match clause {
        BisimClause::Atomic { concept } => json!({"kind": "atomic", "concept": concept}),
        BisimClause::WorldForth { world } => json!({"kind": "world-forth", "world": world}),
        BisimClause::WorldBack { world } => json!({"kind": "world-back", "world": world}),
        BisimClause::DeltaForth { role, successor } => {
            json!({"kind": "delta-forth", "role": role, "successor": successor})
        }
        BisimClause::DeltaBack { role, successor } => {
            json!({"kind": "delta-back", "role": role, "successor": successor})
        }
    }
}

fn cmd_verify_bisim(a: &VerifyBisimArgs, force: bool) -> Result<Outcome, CliError> {
    let m1 = load_model_arg(&a.m1)?;
    let m2 = load_model_arg(&a.m2)?;
    let relation = load_relation_arg(&a.relation)?;
    guard_states("checking the relation", &game_states(&m1, &m2), force)?;
    let (result, violation, ok) = match check_bisimulation(&m1, &m2, &relation)? {
        None => (json!("bisimulation"), Value::Null, true),
        Some(found) => (
            json!("violation"),
            json!({
                "left": {"world": found.config.left.0, "individual": found.config.left.1},
                "right": {"world": found.config.right.0, "individual": found.config.right.1},
                "clause": clause_doc(&found.clause),
            }),
            false,
        ),
    };
    let report = json!({
        "command": "verify-bisim",
        "left_model": a.m1,
        "right_model": a.m2,
        "pairs": relation.len(),
        "result": result,
        "violation": violation,
    });
    Ok(Outcome::Report { affirmative: ok, report })
}

fn cmd_ef(a: &EfArgs, force: bool) -> Result<Outcome, CliError> {
    let m1 = load_model_arg(&a.m1)?;
    let m2 = load_model_arg(&a.m2)?;
    let (w, dbar) = parse_pointed_tuple(&a.p1)?;
    let (v, ebar) = parse_pointed_tuple(&a.p2)?;
    guard_states("the tuple game", &game_states(&m1, &m2), force)?;
    let caps = if force { EfCaps::unbounded() } else { EfCaps::default() };
    let result = ef_equivalent_n_with_caps(&m1, &w, &dbar, &m2, &v, &ebar, a.rounds, &caps)?;
    let report = json!({
        "command": "ef",
        "rounds": a.rounds,
        "left": {"model": a.m1, "world": w, "tuple": dbar},
        "right": {"model": a.m2, "world": v, "tuple": ebar},
        "result": result,
    });
    Ok(Outcome::Report { affirmative: result, report })
}

fn cmd_nf(a: &NfArgs) -> Result<Outcome, CliError> {
    let m = load_model_arg(&a.model)?;
    let nf = compute_nf(&m, &a.world, &a.individual, a.rank)?;
    let atom_count = count_atoms(m.signature(), a.rank)?.to_string();
    let form = nf_to_json(&nf, m.signature())?;
    let rendered = if a.render {
        let universe = AtomUniverse::full(m.signature(), a.rank)?;
        json!(nf_to_concept(&nf, &universe)?.to_string())
    } else {
        Value::Null
    };
    let report = json!({
        "command": "nf",
        "model": a.model,
        "world": a.world,
        "individual": a.individual,
        "rank": a.rank,
        "atom_count": atom_count,
        "form": form,
        "rendered": rendered,
    });
    Ok(Outcome::Report { affirmative: true, report })
}

fn cmd_characterize(a: &CharacterizeArgs, force: bool) -> Result<Outcome, CliError> {
    let class = a.class.class()?;
    guard_states("characterizing over the class", &class.count(), force)?;
    let phi = parse_formula(&a.formula, class.signature())?;
    let (concept, report) = characterize(&phi, a.rank, &class)?;
    let (verdict, counterexample) = equivalence_doc(&report.verdict);
    let affirmative = matches!(report.verdict, Equivalence::Equal);
    let report = json!({
        "command": "characterize",
        "formula": phi.to_string(),
        "rank": a.rank,
        "class": class_doc(&class),
        "concept": concept.to_string(),
        "concept_rank": concept_rank(&concept),
        "models_scanned": report.models_scanned,
        "points_scanned": report.points_scanned,
        "satisfying_points": report.satisfying_points,
        "distinct_forms": report.distinct_forms,
        "verdict": verdict,
        "counterexample": counterexample,
    });
    Ok(Outcome::Report { affirmative, report })
}

fn cmd_unravel(a: &UnravelArgs, force: bool) -> Result<Outcome, CliError> {
    let m = load_model_arg(&a.model)?;
    let domain_size = BigUint::from(m.domain().len());
    match (a.depth, a.partial) {
        (Some(depth), false) => {
            // Node count is bounded by the path count |Δ|^(depth+1).
            let bound = domain_size.pow(depth as u32 + 1);
            guard_states("the tree unravelling", &bound, force)?;
            let u = tree_unravelling(&m, &a.individual, depth)?;
            let mut paths = Map::new();
            for (node, path) in &u.node_paths {
                paths.insert(node.clone(), json!(path));
            }
            let report = json!({
                "command": "unravel",
                "mode": "tree",
                "model": a.model,
                "start": a.individual,
                "depth": depth,
                "truncated": u.truncated,
                "nodes": u.node_paths.len(),
                "result": model_doc(&u.interpretation),
                "node_paths": paths,
            });
            Ok(Outcome::Report { affirmative: true, report })
        }
        (None, true) => {
            let radius = a.radius.expect("--partial requires --radius");
            let bound = domain_size.pow(radius as u32 + 1) + &domain_size;
            guard_states("the partial unravelling", &bound, force)?;
            let u = partial_unravelling(&m, &a.individual, radius)?;
            let mut rho = Map::new();
            for (node, original) in &u.rho {
                rho.insert(node.clone(), json!(original));
            }
            let report = json!({
                "command": "unravel",
                "mode": "partial",
                "model": a.model,
                "start": a.individual,
                "radius": radius,
                "root": u.root,
                "nodes": u.interpretation.domain().len(),
                "result": model_doc(&u.interpretation),
                "rho": rho,
            });
            Ok(Outcome::Report { affirmative: true, report })
        }
        _ => Err(CliError::Usage(
            "choose a mode: --depth N for the tree, or --partial --radius N".to_string(),
        )),
    }
}

fn cmd_gaifman(a: &GaifmanArgs) -> Result<Outcome, CliError> {
    let m = load_model_arg(&a.model)?;
    let graph = gaifman(&m);
    let individuals = graph.individuals().to_vec();
    let mut edges = Vec::new();
    for (i, d) in individuals.iter().enumerate() {
        for e in &individuals[i + 1..] {
            if graph.adjacent(d, e)? {
                edges.push(json!([d, e]));
            }
        }
    }
    let distances = match &a.from {
        Some(from) => {
            let mut map = Map::new();
            for e in &individuals {
                let value = match graph.distance(from, e)? {
                    Some(n) => json!(n),
                    None => Value::Null,
                };
                map.insert(e.clone(), value);
            }
            Value::Object(map)
        }
        None => Value::Null,
    };
    let report = json!({
        "command": "gaifman",
        "model": a.model,
        "individuals": individuals,
        "edges": edges,
        "forest": graph.is_forest(),
        "from": a.from,
        "distances": distances,
    });
    Ok(Outcome::Report { affirmative: true, report })
}

/// All `k`-tuples over `domain`, in odometer order.
fn tuples(k: usize, domain: &[String]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|base| {
                domain.iter().map(move |d| {
                    let mut tuple = base.clone();
                    tuple.push(d.clone());
                    tuple
                })
            })
            .collect();
    }
    out
}

fn cmd_locality(a: &LocalityArgs, force: bool) -> Result<Outcome, CliError> {
    let class = a.class.class()?;
    guard_states("the locality scan", &class.count(), force)?;
    let phi = parse_formula(&a.formula, class.signature())?;
    let frees: Vec<String> = free_variables(&phi).into_iter().collect();
    if frees.is_empty() {
        return Err(CliError::Semantic(
            "locality checks need at least one free variable".to_string(),
        ));
    }
    let mut checked = 0usize;
    for (model_index, m) in class.models().enumerate() {
        for w in m.worlds() {
            for tuple in tuples(frees.len(), m.domain()) {
                checked += 1;
                if !is_l_local_at(&phi, &m, w, &tuple, a.radius)? {
                    let report = json!({
                        "command": "locality",
                        "formula": phi.to_string(),
                        "radius": a.radius,
                        "class": class_doc(&class),
                        "result": "violation",
                        "checked": checked,
                        "violation": {
                            "model_index": model_index,
                            "model": model_doc(&m),
                            "world": w,
                            "tuple": tuple,
                        },
                    });
                    return Ok(Outcome::Report { affirmative: false, report });
                }
            }
        }
    }
    let report = json!({
        "command": "locality",
        "formula": phi.to_string(),
        "radius": a.radius,
        "class": class_doc(&class),
        "result": "local",
        "checked": checked,
        "violation": Value::Null,
    });
    Ok(Outcome::Report { affirmative: true, report })
}

fn cmd_translate(a: &TranslateArgs) -> Result<Outcome, CliError> {
    let sig = match &a.model {
        Some(path) => load_model_arg(path)?.signature().clone(),
        None => signature_from_flags(&a.concepts, &a.roles)?,
    };
    if a.st {
        let text = a.concept.as_ref().expect("--st requires --concept");
        let c = parse_concept(text, &sig)?;
        let f = standard_translation(&c, &a.var)?;
        let report = json!({
            "command": "translate",
            "mode": "standard",
            "input": c.to_string(),
            "variable": a.var,
            "rank": concept_rank(&c),
            "output": f.to_string(),
        });
        return Ok(Outcome::Report { affirmative: true, report });
    }
    if a.two_sorted {
        let text = a.formula.as_ref().expect("--two-sorted requires --formula");
        let f = parse_formula(text, &sig)?;
        let translated = two_sorted_translation(&f, &a.world_var)?;
        let report = json!({
            "command": "translate",
            "mode": "two-sorted",
            "input": f.to_string(),
            "world_variable": a.world_var,
            "rank": formula_rank(&f),
            "output": translated.to_string(),
        });
        return Ok(Outcome::Report { affirmative: true, report });
    }
    Err(CliError::Usage(
        "choose a mode: --st with --concept, or --two-sorted with --formula".to_string(),
    ))
}

fn cmd_enumerate(a: &EnumerateArgs, force: bool) -> Result<Outcome, CliError> {
    let class = a.class.class()?;
    let count = class.count();
    if a.count {
        let report = json!({
            "command": "enumerate",
            "class": class_doc(&class),
            "count": count.to_string(),
        });
        return Ok(Outcome::Report { affirmative: true, report });
    }
    guard_states("enumerating the class", &count, force)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for m in class.models() {
        if let Err(e) = writeln!(out, "{}", model_doc(&m)) {
            return stream_write_error(e);
        }
    }
    if let Err(e) = out.flush() {
        return stream_write_error(e);
    }
    Ok(Outcome::Stream)
}

/// A closed pipe ends the stream quietly; anything else is a real failure.
fn stream_write_error(e: io::Error) -> Result<Outcome, CliError> {
    if e.kind() == io::ErrorKind::BrokenPipe {
        Ok(Outcome::Stream)
    } else {
        Err(CliError::Semantic(format!("writing the model stream failed: {e}")))
    }
}

fn cmd_verify(a: &VerifyArgs, force: bool) -> Result<Outcome, CliError> {
    let class = a.class.class()?;
    let class_document = class_doc(&class);
    let opts = SuiteOptions {
        seed: a.seed,
        samples: a.samples,
        class,
        rank: a.rank,
        concept: a.concept.clone(),
        force,
    };
    let outcome = run_suite(&a.suite, &opts)?;
    let report = json!({
        "command": "verify",
        "suite": outcome.suite,
        "seed": a.seed,
        "samples": a.samples,
        "class": class_document,
        "passed": outcome.passed,
        "checks": outcome.checks,
        "details": outcome.details,
        "failure": outcome.failure,
    });
    Ok(Outcome::Report { affirmative: outcome.passed, report })
}
