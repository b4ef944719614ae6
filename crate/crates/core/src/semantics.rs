//! Model checking: concepts against a world and individual, formulas against
//! a world and valuation, locality of a formula instance, and first-point
//! equivalence scans of two formulas over finite classes of models.
//!
//! Evaluation is deliberately brute-force — quantifiers and modalities loop
//! over the full domain and world set — so that the checkers can serve as
//! oracles for everything built on top of them.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::dense::{Bits, DenseModel};
use crate::model::{neighborhood, ClassSpec, ModelError, S5Interpretation};
use crate::syntax::{free_variables, ConceptAst, FormulaAst, RoleExpr};

/// An assignment of individuals to variables.
pub type Valuation = std::collections::BTreeMap<String, String>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("undeclared concept name `{0}`")]
    UndeclaredConcept(String),
    #[error("undeclared role name `{0}`")]
    UndeclaredRole(String),
    #[error("undeclared predicate name `{0}`")]
    UndeclaredPredicate(String),
    #[error("predicate `{name}` takes {expected} argument(s), found {found}")]
    PredicateArity { name: String, expected: usize, found: usize },
    #[error("free variable `{0}` is not covered by the valuation")]
    UncoveredVariable(String),
    #[error("formula has {expected} free variable(s) but the tuple has {found} member(s)")]
    TupleLength { expected: usize, found: usize },
}

/// Checks that every concept and role name of `c` is declared.
fn validate_concept(interp: &S5Interpretation, c: &ConceptAst) -> Result<(), SemanticsError> {
    let sig = interp.signature();
    match c {
        ConceptAst::Top | ConceptAst::Bottom => Ok(()),
        ConceptAst::Name(name) => {
            if sig.is_concept(name) {
                Ok(())
            } else {
                Err(SemanticsError::UndeclaredConcept(name.clone()))
            }
        }
        ConceptAst::Not(inner) | ConceptAst::Box(inner) | ConceptAst::Dia(inner) => {
            validate_concept(interp, inner)
        }
        ConceptAst::And(lhs, rhs) | ConceptAst::Or(lhs, rhs) => {
            validate_concept(interp, lhs)?;
            validate_concept(interp, rhs)
        }
        ConceptAst::Exists(role, body) | ConceptAst::Forall(role, body) => {
            if !sig.is_role(&role.name) {
                return Err(SemanticsError::UndeclaredRole(role.name.clone()));
            }
            validate_concept(interp, body)
        }
    }
}

/// Checks that every predicate of `f` is a declared concept or role name,
/// applied at the right arity.
fn validate_formula(interp: &S5Interpretation, f: &FormulaAst) -> Result<(), SemanticsError> {
    let sig = interp.signature();
    match f {
        FormulaAst::Pred { name, args } => {
            let expected = if sig.is_concept(name) {
                1
            } else if sig.is_role(name) {
                2
            } else {
                return Err(SemanticsError::UndeclaredPredicate(name.clone()));
            };
            if args.len() != expected {
                return Err(SemanticsError::PredicateArity {
                    name: name.clone(),
                    expected,
                    found: args.len(),
                });
            }
            Ok(())
        }
        FormulaAst::Eq(_, _) => Ok(()),
        FormulaAst::Not(inner)
        | FormulaAst::Box(inner)
        | FormulaAst::Dia(inner)
        | FormulaAst::Exists(_, inner)
        | FormulaAst::Forall(_, inner) => validate_formula(interp, inner),
        FormulaAst::And(lhs, rhs) | FormulaAst::Or(lhs, rhs) | FormulaAst::Implies(lhs, rhs) => {
            validate_formula(interp, lhs)?;
            validate_formula(interp, rhs)
        }
    }
}

/// Reusable concept checker for one interpretation.
///
/// Building one instance and asking it many questions avoids re-indexing the
/// interpretation for every check; the free functions [`check_concept`] and
/// [`concept_extension`] are one-shot wrappers around it.
pub struct ConceptEvaluator<'a> {
    interp: &'a S5Interpretation,
    dense: DenseModel,
}

impl<'a> ConceptEvaluator<'a> {
    pub fn new(interp: &'a S5Interpretation) -> Self {
        ConceptEvaluator { interp, dense: DenseModel::new(interp) }
    }

    /// True iff the individual belongs to the concept's extension at `world`.
    pub fn check(&self, world: &str, ind: &str, c: &ConceptAst) -> Result<bool, SemanticsError> {
        validate_concept(self.interp, c)?;
        self.interp.check_world(world)?;
        self.interp.check_individual(ind)?;
        let bits = self.eval(c, self.dense.world_index[world], &mut HashMap::new());
        Ok(bits.get(self.dense.ind_index[ind]))
    }

    /// The concept's extension at `world`, in declared domain order.
    pub fn extension(&self, world: &str, c: &ConceptAst) -> Result<Vec<String>, SemanticsError> {
        validate_concept(self.interp, c)?;
        self.interp.check_world(world)?;
        let bits = self.eval(c, self.dense.world_index[world], &mut HashMap::new());
        Ok(bits.iter_ones().map(|i| self.dense.inds[i].clone()).collect())
    }

    /// Extension of a validated concept at world index `w`, as a bitset over
    /// the domain.  Shared subterms (by pointer) are evaluated once per world
    /// within a single top-level call, which keeps large rendered concepts
    /// with internal sharing cheap.
    fn eval(&self, c: &ConceptAst, w: usize, memo: &mut HashMap<(usize, usize), Bits>) -> Bits {
        let key = (c as *const ConceptAst as usize, w);
        if let Some(bits) = memo.get(&key) {
            return bits.clone();
        }
        let nd = self.dense.num_inds();
        let bits = match c {
            ConceptAst::Top => {
                let mut bits = Bits::new(nd);
                bits.fill();
                bits
            }
            ConceptAst::Bottom => Bits::new(nd),
            ConceptAst::Name(name) => {
                let ci = self.interp.signature().concept_index(name).expect("validated");
                self.dense.concept_bits[ci][w].clone()
            }
            ConceptAst::Not(inner) => {
                let mut bits = self.eval(inner, w, memo);
                bits.negate();
                bits
            }
            ConceptAst::And(lhs, rhs) => {
                let mut bits = self.eval(lhs, w, memo);
                bits.and_assign(&self.eval(rhs, w, memo));
                bits
            }
            ConceptAst::Or(lhs, rhs) => {
                let mut bits = self.eval(lhs, w, memo);
                bits.or_assign(&self.eval(rhs, w, memo));
                bits
            }
            ConceptAst::Exists(role, body) => {
                let targets = self.eval(body, w, memo);
                self.restriction(role, w, &targets, true)
            }
            ConceptAst::Forall(role, body) => {
                let mut complement = self.eval(body, w, memo);
                complement.negate();
                self.restriction(role, w, &complement, false)
            }
            ConceptAst::Box(inner) => {
                let mut bits = self.eval(inner, 0, memo);
                for v in 1..self.dense.num_worlds() {
                    bits.and_assign(&self.eval(inner, v, memo));
                }
                bits
            }
            ConceptAst::Dia(inner) => {
                let mut bits = self.eval(inner, 0, memo);
                for v in 1..self.dense.num_worlds() {
                    bits.or_assign(&self.eval(inner, v, memo));
                }
                bits
            }
        };
        memo.insert(key, bits.clone());
        bits
    }

    /// Individuals whose successor set under `role` meets `targets`
    /// (`want_hit`, the existential restriction) or avoids it entirely
    /// (the universal restriction with `targets` complemented).
    fn restriction(&self, role: &RoleExpr, w: usize, targets: &Bits, want_hit: bool) -> Bits {
        let ri = self.interp.signature().role_index(&role.name).expect("validated");
        let mut bits = Bits::new(self.dense.num_inds());
        for d in 0..self.dense.num_inds() {
            let succ = self.dense.successors(ri, role.kind, w, d);
            if succ.intersects(targets) == want_hit {
                bits.set(d);
            }
        }
        bits
    }
}

/// True iff `d` belongs to the extension of `c` at world `w` of `i`.
pub fn check_concept(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    c: &ConceptAst,
) -> Result<bool, SemanticsError> {
    ConceptEvaluator::new(i).check(w, d, c)
}

/// The extension of `c` at world `w` of `i`, in declared domain order.
pub fn concept_extension(
    i: &S5Interpretation,
    w: &str,
    c: &ConceptAst,
) -> Result<Vec<String>, SemanticsError> {
    ConceptEvaluator::new(i).extension(w, c)
}

/// True iff `f` holds at world `w` of `i` under the valuation `eta`, which
/// must cover the free variables of `f` with individuals of the domain.
/// Quantifiers range over the whole domain at every world.
pub fn check_formula(
    i: &S5Interpretation,
    w: &str,
    eta: &Valuation,
    f: &FormulaAst,
) -> Result<bool, SemanticsError> {
    validate_formula(i, f)?;
    i.check_world(w)?;
    for var in free_variables(f) {
        let value =
            eta.get(&var).ok_or_else(|| SemanticsError::UncoveredVariable(var.clone()))?;
        i.check_individual(value)?;
    }
    let mut env = eta.clone();
    Ok(eval_formula(i, w, &mut env, f))
}

fn eval_formula(i: &S5Interpretation, w: &str, env: &mut Valuation, f: &FormulaAst) -> bool {
    match f {
        FormulaAst::Pred { name, args } => {
            let value = |var: &String| env.get(var).expect("free variables covered").as_str();
            if i.signature().is_concept(name) {
                i.has_concept(name, w, value(&args[0]))
            } else {
                i.has_role(name, w, value(&args[0]), value(&args[1]))
            }
        }
        FormulaAst::Eq(x, y) => {
            env.get(x).expect("free variables covered") == env.get(y).expect("free variables covered")
        }
        FormulaAst::Not(inner) => !eval_formula(i, w, env, inner),
        FormulaAst::And(lhs, rhs) => {
            eval_formula(i, w, env, lhs) && eval_formula(i, w, env, rhs)
        }
        FormulaAst::Or(lhs, rhs) => eval_formula(i, w, env, lhs) || eval_formula(i, w, env, rhs),
        FormulaAst::Implies(lhs, rhs) => {
            !eval_formula(i, w, env, lhs) || eval_formula(i, w, env, rhs)
        }
        FormulaAst::Exists(var, body) => {
            any_individual(i, w, env, var, body, true)
        }
        FormulaAst::Forall(var, body) => {
            !any_individual(i, w, env, var, body, false)
        }
        FormulaAst::Box(inner) => i.worlds().iter().all(|v| eval_formula(i, v, env, inner)),
        FormulaAst::Dia(inner) => i.worlds().iter().any(|v| eval_formula(i, v, env, inner)),
    }
}

/// True iff some individual bound to `var` makes `body` evaluate to `want`.
fn any_individual(
    i: &S5Interpretation,
    w: &str,
    env: &mut Valuation,
    var: &str,
    body: &FormulaAst,
    want: bool,
) -> bool {
    let saved = env.get(var).cloned();
    let mut found = false;
    for d in i.domain() {
        env.insert(var.to_string(), d.clone());
        if eval_formula(i, w, env, body) == want {
            found = true;
            break;
        }
    }
    match saved {
        Some(value) => env.insert(var.to_string(), value),
        None => env.remove(var),
    };
    found
}

/// True iff `f` cannot tell `i` apart from the restriction of `i` to the
/// radius-`radius` neighborhood of `tuple` at this instance: satisfaction at
/// `(w, tuple)` is the same in both.
///
/// The leading tuple entries value the free variables of `f` in sorted
/// variable order; the tuple may be longer than that — like a formula whose
/// declared parameters do not all occur — and every entry, bound or not,
/// contributes to the neighborhood.
pub fn is_l_local_at(
    f: &FormulaAst,
    i: &S5Interpretation,
    w: &str,
    tuple: &[String],
    radius: usize,
) -> Result<bool, SemanticsError> {
    let free: Vec<String> = free_variables(f).into_iter().collect();
    if free.len() > tuple.len() {
        return Err(SemanticsError::TupleLength { expected: free.len(), found: tuple.len() });
    }
    let eta: Valuation = free.into_iter().zip(tuple.iter().cloned()).collect();
    let on_full = check_formula(i, w, &eta, f)?;
    let kept = neighborhood(i, tuple, radius)?;
    let restricted = i.restrict(&kept)?;
    let on_restriction = check_formula(&restricted, w, &eta, f)?;
    Ok(on_full == on_restriction)
}

/// Outcome of an equivalence scan: either no disagreement anywhere, or the
/// first pointed disagreement in scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    Counterexample(Box<ClassCounterexample>),
}

/// A pointed disagreement between two formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounterexample {
    /// Position of the model in the scanned stream.
    pub model_index: usize,
    pub model: S5Interpretation,
    pub world: String,
    pub valuation: Valuation,
    /// Truth value of the left formula at the disagreement (the right one has
    /// the opposite value).
    pub lhs_holds: bool,
}

/// Compares two formulas on every model of the slice, in order.  Worlds are
/// scanned in declared order, and valuations of the shared free variables in
/// lexicographic order over the declared domain order, so the reported
/// counterexample is canonical.
pub fn equivalent_on_models(
    lhs: &FormulaAst,
    rhs: &FormulaAst,
    models: &[S5Interpretation],
) -> Result<Equivalence, SemanticsError> {
    for (model_index, model) in models.iter().enumerate() {
        if let Some(counterexample) = first_disagreement(lhs, rhs, model, model_index)? {
            return Ok(Equivalence::Counterexample(Box::new(counterexample)));
        }
    }
    Ok(Equivalence::Equal)
}

/// [`equivalent_on_models`] over the full enumerated class.
pub fn equivalent_on_class(
    lhs: &FormulaAst,
    rhs: &FormulaAst,
    class: &ClassSpec,
) -> Result<Equivalence, SemanticsError> {
    for (model_index, model) in class.models().enumerate() {
        if let Some(counterexample) = first_disagreement(lhs, rhs, &model, model_index)? {
            return Ok(Equivalence::Counterexample(Box::new(counterexample)));
        }
    }
    Ok(Equivalence::Equal)
}

fn first_disagreement(
    lhs: &FormulaAst,
    rhs: &FormulaAst,
    model: &S5Interpretation,
    model_index: usize,
) -> Result<Option<ClassCounterexample>, SemanticsError> {
    let mut vars: BTreeSet<String> = free_variables(lhs);
    vars.extend(free_variables(rhs));
    let vars: Vec<String> = vars.into_iter().collect();
    for world in model.worlds() {
        for valuation in valuations(&vars, model.domain()) {
            let on_lhs = check_formula(model, world, &valuation, lhs)?;
            let on_rhs = check_formula(model, world, &valuation, rhs)?;
            if on_lhs != on_rhs {
                return Ok(Some(ClassCounterexample {
                    model_index,
                    model: model.clone(),
                    world: world.clone(),
                    valuation,
                    lhs_holds: on_lhs,
                }));
            }
        }
    }
    Ok(None)
}

/// All assignments of `domain` members to `vars`, in lexicographic order
/// (the last variable varies fastest).  A variable-free formula pair gets the
/// single empty valuation.
fn valuations(vars: &[String], domain: &[String]) -> Vec<Valuation> {
    let mut out = Vec::new();
    let mut indices = vec![0usize; vars.len()];
    loop {
        out.push(
            vars.iter().cloned().zip(indices.iter().map(|&i| domain[i].clone())).collect(),
        );
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < domain.len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}
