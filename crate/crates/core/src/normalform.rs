//! Characteristic concepts of bounded rank.
//!
//! Every pointed model has, for each rank `k`, a single characteristic
//! concept: the conjunction that records, for each rank-`k` atom (a concept
//! name, an `exists r . C`, or a `dia C` with `C` of rank `k − 1`), whether
//! the point satisfies it.  Two points get the same characteristic concept
//! exactly when they are depth-`k` bisimilar, which makes these concepts both
//! a decision procedure for depth-bounded bisimilarity and the building
//! blocks of [`characterize`], which expresses a one-variable formula as a
//! concept, up to rank-`k` distinctions over a bounded class of models.
//!
//! The full conjunction is astronomically wide already at rank 2, so a
//! [`NormalForm`] stores only the positive atoms, structurally: the concept
//! names that hold, the characteristic forms of the role successors, and the
//! characteristic forms of the same individual at the other worlds.  Atoms
//! absent from those sets are implicitly negative.  Rendering to a concrete
//! [`ConceptAst`] is always relative to an explicit [`AtomUniverse`].

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::dense::DenseModel;
use crate::model::{ClassSpec, ModelError, S5Interpretation};
use crate::semantics::{
    check_concept, check_formula, ClassCounterexample, ConceptEvaluator, Equivalence,
    SemanticsError, Valuation,
};
use crate::syntax::{free_variables, ConceptAst, FormulaAst, RoleExpr, Signature};

/// Largest atom set a universe may enumerate in full, and largest exponent
/// [`count_atoms`] is willing to expand.
const MAX_FULL_BITS: usize = 16;
const MAX_COUNT_BITS: u64 = 1 << 20;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NormalFormError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("a positive atom of the form lies outside the rendering universe")]
    AtomOutsideUniverse,
    #[error("the set of rank-{rank} forms is too large to enumerate")]
    UniverseTooLarge { rank: usize },
    #[error("the atom count at rank {rank} is too large to represent")]
    CountOverflow { rank: usize },
    #[error("expected exactly one free variable, found {found:?}")]
    FreeVariables { found: Vec<String> },
}

/// Characteristic form of a pointed model at some rank: the set of positive
/// rank-`k` atoms, stored structurally.
///
/// Concept names are kept as indices into the signature's declared order.
/// `exists_positive` has one entry per declared role; entry `i` holds the
/// rank-`k − 1` forms of the role-`i` successors at the current world, and
/// `diamond_positive` the forms of the same individual at each world.  At
/// rank 0 the child sets are empty.
///
/// The derived equality is structural; the order ([`Ord`]) is the canonical
/// one used everywhere a form or an atom must be ranked: lower rank first,
/// then the component sets compared by their first membership difference,
/// where the set containing the differing element sorts first.  On atoms
/// this puts the declared concept names first, then `exists r . C` per
/// declared role, then `dia C`, with child forms in the same canonical
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    rank: usize,
    positive_concepts: BTreeSet<usize>,
    exists_positive: Vec<BTreeSet<NormalForm>>,
    diamond_positive: BTreeSet<NormalForm>,
}

/// Compares two sets by their first membership difference: the set
/// containing the smallest element not shared by both sorts first.  Equal
/// exactly when the sets are equal.
fn set_cmp<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Ordering {
    let mut left = a.iter().peekable();
    let mut right = b.iter().peekable();
    loop {
        match (left.peek(), right.peek()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Equal => {
                    left.next();
                    right.next();
                }
                Ordering::Less => return Ordering::Less,
                Ordering::Greater => return Ordering::Greater,
            },
        }
    }
}

impl Ord for NormalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| set_cmp(&self.positive_concepts, &other.positive_concepts))
            .then_with(|| {
                for (mine, theirs) in self.exists_positive.iter().zip(&other.exists_positive) {
                    match set_cmp(mine, theirs) {
                        Ordering::Equal => continue,
                        unequal => return unequal,
                    }
                }
                self.exists_positive.len().cmp(&other.exists_positive.len())
            })
            .then_with(|| set_cmp(&self.diamond_positive, &other.diamond_positive))
    }
}

impl PartialOrd for NormalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl NormalForm {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Indices (into the signature's declared order) of the concept names
    /// the point satisfies.
    pub fn positive_concepts(&self) -> &BTreeSet<usize> {
        &self.positive_concepts
    }

    /// Per declared role, the rank-`k − 1` forms of the role successors at
    /// the current world.
    pub fn exists_positive(&self) -> &[BTreeSet<NormalForm>] {
        &self.exists_positive
    }

    /// Rank-`k − 1` forms of the same individual across all worlds.
    pub fn diamond_positive(&self) -> &BTreeSet<NormalForm> {
        &self.diamond_positive
    }
}

/// The rank-`k` characteristic form of the pointed model `(i, w, d)`.
pub fn compute_nf(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    k: usize,
) -> Result<NormalForm, NormalFormError> {
    i.check_world(w)?;
    i.check_individual(d)?;
    let dense = DenseModel::new(i);
    let mut memo = HashMap::new();
    Ok(nf_point(&dense, dense.world_index[w], dense.ind_index[d], k, &mut memo))
}

/// Recursive worker shared by [`compute_nf`] and the class scans; memoized
/// per (world, individual, rank) so scanning every point of a model at every
/// rank up to `k` stays linear.
fn nf_point(
    dense: &DenseModel,
    w: usize,
    d: usize,
    k: usize,
    memo: &mut HashMap<(usize, usize, usize), NormalForm>,
) -> NormalForm {
    if let Some(known) = memo.get(&(w, d, k)) {
        return known.clone();
    }
    let positive_concepts = dense.profile[w][d].iter_ones().collect();
    let roles = dense.succ.len();
    let (exists_positive, diamond_positive) = if k == 0 {
        (vec![BTreeSet::new(); roles], BTreeSet::new())
    } else {
        let exists = (0..roles)
            .map(|r| {
                dense.succ[r][w][d]
                    .iter_ones()
                    .collect::<Vec<_>>()
                    .into_iter()
                    .map(|d2| nf_point(dense, w, d2, k - 1, memo))
                    .collect()
            })
            .collect();
        let diamond =
            (0..dense.num_worlds()).map(|v| nf_point(dense, v, d, k - 1, memo)).collect();
        (exists, diamond)
    };
    let form = NormalForm { rank: k, positive_concepts, exists_positive, diamond_positive };
    memo.insert((w, d, k), form.clone());
    form
}

/// Equality of characteristic forms; comparing forms of different ranks is
/// an error rather than `false`.
pub fn nf_equal(n1: &NormalForm, n2: &NormalForm) -> Result<bool, NormalFormError> {
    if n1.rank != n2.rank {
        return Err(NormalFormError::RankMismatch { left: n1.rank, right: n2.rank });
    }
    Ok(n1 == n2)
}

/// The atom set a [`NormalForm`] is rendered against: all concept names of a
/// signature plus, for rank > 0, the atoms `exists r . C` (per declared
/// role) and `dia C` for `C` ranging over a fixed list of rank-`k − 1`
/// forms.  The list is closed downwards: every child of a listed form is
/// listed in the child universe, so listed forms can always be rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomUniverse {
    rank: usize,
    concepts: Vec<String>,
    roles: Vec<String>,
    /// Canonically sorted; empty exactly at rank 0.
    children: Vec<NormalForm>,
    child: Option<Box<AtomUniverse>>,
}

impl AtomUniverse {
    /// The universe of *all* rank-`rank` atoms over the signature.  The
    /// child form sets double in the exponent with each rank, so this is
    /// refused (rather than attempted) once a level would exceed
    /// 2^16 forms — over one concept name and one role that limits full
    /// universes to rank ≤ 2.
    pub fn full(sig: &Signature, rank: usize) -> Result<AtomUniverse, NormalFormError> {
        let mut universe = AtomUniverse {
            rank: 0,
            concepts: sig.concepts().to_vec(),
            roles: sig.roles().to_vec(),
            children: Vec::new(),
            child: None,
        };
        let mut level_forms: Vec<NormalForm> = Vec::new();
        for level in 1..=rank {
            // Enumerating the rank-(level − 1) forms takes one bit per atom
            // of that rank.
            let bits =
                sig.concepts().len() + (sig.roles().len() + 1) * level_forms.len();
            if bits > MAX_FULL_BITS {
                return Err(NormalFormError::UniverseTooLarge { rank: level });
            }
            level_forms = all_forms(sig, &level_forms, level - 1);
            universe = AtomUniverse {
                rank: level,
                concepts: sig.concepts().to_vec(),
                roles: sig.roles().to_vec(),
                children: level_forms.clone(),
                child: Some(Box::new(universe)),
            };
        }
        Ok(universe)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of atoms: one per concept name plus one `exists` atom per
    /// role per child form plus one `dia` atom per child form.
    pub fn atom_count(&self) -> usize {
        self.concepts.len() + (self.roles.len() + 1) * self.children.len()
    }

    /// The rank-`k − 1` forms the `exists` and `dia` atoms range over.
    pub fn children(&self) -> &[NormalForm] {
        &self.children
    }

    /// The universe the child forms are rendered against; `None` exactly at
    /// rank 0.
    pub fn child(&self) -> Option<&AtomUniverse> {
        self.child.as_deref()
    }

    fn contains_child(&self, form: &NormalForm) -> bool {
        self.children.binary_search(form).is_ok()
    }
}

/// Every rank-`rank` form over the signature whose children come from
/// `prev` (the complete list of rank-`rank − 1` forms), canonically sorted.
/// The caller bounds the combinatorics.
fn all_forms(sig: &Signature, prev: &[NormalForm], rank: usize) -> Vec<NormalForm> {
    let s = sig.concepts().len();
    let t = sig.roles().len();
    let child_bits = prev.len();
    let total_bits = s + (t + 1) * child_bits;
    let subset = |bits: u128, offset: usize| -> BTreeSet<NormalForm> {
        (0..child_bits)
            .filter(|i| bits >> (offset + i) & 1 == 1)
            .map(|i| prev[i].clone())
            .collect()
    };
    let mut forms: Vec<NormalForm> = (0..1u128 << total_bits)
        .map(|bits| NormalForm {
            rank,
            positive_concepts: (0..s).filter(|i| bits >> i & 1 == 1).collect(),
            exists_positive: (0..t).map(|r| subset(bits, s + r * child_bits)).collect(),
            diamond_positive: subset(bits, s + t * child_bits),
        })
        .collect();
    forms.sort();
    forms
}

/// Renders a form as the explicit conjunction over every atom of the
/// universe, in canonical atom order: the atom itself when positive in the
/// form, its negation otherwise.  An empty universe renders as `true`.
/// Fails if the form's rank differs from the universe's or a positive atom
/// is not in the universe.
pub fn nf_to_concept(
    n: &NormalForm,
    universe: &AtomUniverse,
) -> Result<ConceptAst, NormalFormError> {
    if n.rank != universe.rank {
        return Err(NormalFormError::RankMismatch { left: n.rank, right: universe.rank });
    }
    if n.positive_concepts.iter().any(|&i| i >= universe.concepts.len())
        || n.exists_positive.len() != universe.roles.len()
    {
        return Err(NormalFormError::AtomOutsideUniverse);
    }
    for positive in n.exists_positive.iter().chain([&n.diamond_positive]) {
        if positive.iter().any(|child| !universe.contains_child(child)) {
            return Err(NormalFormError::AtomOutsideUniverse);
        }
    }
    let rendered_children: Vec<ConceptAst> = match &universe.child {
        Some(child_universe) => universe
            .children
            .iter()
            .map(|child| nf_to_concept(child, child_universe))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let mut atoms: Vec<(ConceptAst, bool)> = Vec::with_capacity(universe.atom_count());
    for (index, name) in universe.concepts.iter().enumerate() {
        atoms.push((ConceptAst::name(name.clone()), n.positive_concepts.contains(&index)));
    }
    for (ri, role) in universe.roles.iter().enumerate() {
        for (ci, child) in universe.children.iter().enumerate() {
            atoms.push((
                ConceptAst::exists(RoleExpr::local(role.clone()), rendered_children[ci].clone()),
                n.exists_positive[ri].contains(child),
            ));
        }
    }
    for (ci, child) in universe.children.iter().enumerate() {
        atoms.push((
            ConceptAst::dia(rendered_children[ci].clone()),
            n.diamond_positive.contains(child),
        ));
    }
    let mut conjunction: Option<ConceptAst> = None;
    for (atom, positive) in atoms {
        let signed = if positive { atom } else { ConceptAst::not(atom) };
        conjunction = Some(match conjunction {
            None => signed,
            Some(acc) => ConceptAst::and(acc, signed),
        });
    }
    Ok(conjunction.unwrap_or(ConceptAst::Top))
}

/// Number of rank-`k` atoms over a signature with `s` concept names and `t`
/// roles: `s` at rank 0, then `s + (t + 1) · 2^previous` at each following
/// rank.  The count grows as a tower of exponentials, so ranks whose count
/// no longer fits in memory are an error.
pub fn count_atoms(sig: &Signature, k: usize) -> Result<BigUint, NormalFormError> {
    let s = sig.concepts().len();
    let t = sig.roles().len();
    let mut count = BigUint::from(s);
    for rank in 1..=k {
        let exponent = u64::try_from(&count)
            .ok()
            .filter(|&bits| bits <= MAX_COUNT_BITS)
            .ok_or(NormalFormError::CountOverflow { rank })?;
        count = BigUint::from(s) + BigUint::from(t + 1) * (BigUint::from(1u8) << exponent);
    }
    Ok(count)
}

/// Canonical nested JSON document for a form: rank, positive concept names
/// in declared order, per-role child documents, and the diamond child
/// documents, with child arrays in canonical form order.
pub fn nf_to_json(n: &NormalForm, sig: &Signature) -> Result<Value, NormalFormError> {
    if n.positive_concepts.iter().any(|&i| i >= sig.concepts().len())
        || n.exists_positive.len() != sig.roles().len()
    {
        return Err(NormalFormError::AtomOutsideUniverse);
    }
    let concepts: Vec<Value> = n
        .positive_concepts
        .iter()
        .map(|&i| Value::String(sig.concepts()[i].clone()))
        .collect();
    let mut exists = Map::new();
    for (ri, role) in sig.roles().iter().enumerate() {
        let children: Vec<Value> = n.exists_positive[ri]
            .iter()
            .map(|child| nf_to_json(child, sig))
            .collect::<Result<_, _>>()?;
        exists.insert(role.clone(), Value::Array(children));
    }
    let diamond: Vec<Value> = n
        .diamond_positive
        .iter()
        .map(|child| nf_to_json(child, sig))
        .collect::<Result<_, _>>()?;
    Ok(json!({
        "rank": n.rank,
        "concepts": concepts,
        "exists": exists,
        "diamond": diamond,
    }))
}

/// What [`characterize`] did and how it went.  The scan bounds are recorded
/// because the verdict is only ever relative to the scanned class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterizeReport {
    pub rank: usize,
    pub max_worlds: usize,
    pub max_domain: usize,
    pub models_scanned: usize,
    pub points_scanned: usize,
    pub satisfying_points: usize,
    /// Distinct characteristic forms among the satisfying points — the
    /// number of disjuncts of the result.
    pub distinct_forms: usize,
    /// `Equal` when the result concept agrees with the formula everywhere
    /// on the class; otherwise the first disagreement in scan order, which
    /// certifies that the formula is not rank-`rank` invariant on the
    /// class.
    pub verdict: Equivalence,
}

/// Expresses a one-free-variable formula as a concept, up to rank-`k`
/// distinctions, over every model of the class.
///
/// The scan collects the rank-`k` characteristic forms of the satisfying
/// points; the result is the disjunction of those forms (in canonical
/// order), rendered against the atoms realized in the class, or `false`
/// when nothing satisfies the formula.  A second scan compares the formula
/// against the result at every point and reports the first disagreement, if
/// any — which exists exactly when the formula distinguishes some
/// depth-`k`-bisimilar pair of the class and hence has no such concept.
///
/// Rendering against the realized atoms only (rather than all rank-`k`
/// atoms, which are astronomically many) is sound on the class: every
/// positive atom of the form of a class point is realized in the class, so
/// two class points agreeing on all realized atoms have structurally equal
/// forms.  Satisfying the rendered form is therefore, on class points, the
/// same as having exactly that characteristic form, which the second scan
/// double-checks on a sample of models through the concept evaluator.
pub fn characterize(
    phi: &FormulaAst,
    k: usize,
    class: &ClassSpec,
) -> Result<(ConceptAst, CharacterizeReport), NormalFormError> {
    let free: Vec<String> = free_variables(phi).into_iter().collect();
    let [x] = free.as_slice() else {
        return Err(NormalFormError::FreeVariables { found: free });
    };
    let sig = class.signature();

    // First scan: characteristic forms of the satisfying points, plus every
    // realized form of each lower rank for the rendering universe.
    let mut satisfied: BTreeSet<NormalForm> = BTreeSet::new();
    let mut realized: Vec<BTreeSet<NormalForm>> = vec![BTreeSet::new(); k];
    let mut models_scanned = 0usize;
    let mut points_scanned = 0usize;
    let mut satisfying_points = 0usize;
    for model in class.models() {
        models_scanned += 1;
        let dense = DenseModel::new(&model);
        let mut memo = HashMap::new();
        for w in 0..dense.num_worlds() {
            for d in 0..dense.num_inds() {
                points_scanned += 1;
                for (rank, forms) in realized.iter_mut().enumerate() {
                    forms.insert(nf_point(&dense, w, d, rank, &mut memo));
                }
                let valuation =
                    Valuation::from([(x.clone(), dense.inds[d].clone())]);
                if check_formula(&model, &dense.worlds[w], &valuation, phi)? {
                    satisfying_points += 1;
                    satisfied.insert(nf_point(&dense, w, d, k, &mut memo));
                }
            }
        }
    }

    let mut universe = AtomUniverse {
        rank: 0,
        concepts: sig.concepts().to_vec(),
        roles: sig.roles().to_vec(),
        children: Vec::new(),
        child: None,
    };
    for (level, forms) in realized.iter().enumerate() {
        universe = AtomUniverse {
            rank: level + 1,
            concepts: sig.concepts().to_vec(),
            roles: sig.roles().to_vec(),
            children: forms.iter().cloned().collect(),
            child: Some(Box::new(universe)),
        };
    }

    let concept = match satisfied.len() {
        0 => ConceptAst::Bottom,
        _ => {
            let mut disjuncts = satisfied.iter();
            let first = nf_to_concept(disjuncts.next().unwrap(), &universe)?;
            disjuncts.try_fold(first, |acc, form| {
                Ok::<_, NormalFormError>(ConceptAst::or(acc, nf_to_concept(form, &universe)?))
            })?
        }
    };

    // Second scan: the formula against the result.  Membership of the
    // point's characteristic form among the collected ones decides the
    // result's truth value; on sampled models (and at any disagreement)
    // that shortcut is double-checked against the rendered concept itself.
    let mut verdict = Equivalence::Equal;
    'scan: for (model_index, model) in class.models().enumerate() {
        let dense = DenseModel::new(&model);
        let mut memo = HashMap::new();
        let evaluator =
            if model_index % 197 == 0 { Some(ConceptEvaluator::new(&model)) } else { None };
        for w in 0..dense.num_worlds() {
            for d in 0..dense.num_inds() {
                let form = nf_point(&dense, w, d, k, &mut memo);
                let on_concept = satisfied.contains(&form);
                let world = &dense.worlds[w];
                let ind = &dense.inds[d];
                if let Some(evaluator) = &evaluator {
                    assert_eq!(
                        evaluator.check(world, ind, &concept).map_err(NormalFormError::from)?,
                        on_concept,
                        "rendered characterization diverged from its forms at \
                         ({world}, {ind}) of model {model_index}"
                    );
                }
                let valuation = Valuation::from([(x.clone(), ind.clone())]);
                let on_formula = check_formula(&model, world, &valuation, phi)?;
                if on_formula != on_concept {
                    assert_eq!(
                        check_concept(&model, world, ind, &concept)
                            .map_err(NormalFormError::from)?,
                        on_concept,
                        "rendered characterization diverged from its forms at \
                         ({world}, {ind}) of model {model_index}"
                    );
                    verdict = Equivalence::Counterexample(Box::new(ClassCounterexample {
                        model_index,
                        model: model.clone(),
                        world: world.clone(),
                        valuation,
                        lhs_holds: on_formula,
                    }));
                    break 'scan;
                }
            }
        }
    }

    let report = CharacterizeReport {
        rank: k,
        max_worlds: class.max_worlds(),
        max_domain: class.max_domain(),
        models_scanned,
        points_scanned,
        satisfying_points,
        distinct_forms: satisfied.len(),
        verdict,
    };
    Ok((concept, report))
}
