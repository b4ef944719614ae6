use std::collections::BTreeSet;
use std::sync::Arc;

/// How a role occurs inside a restriction: plainly, or under a modality.
///
/// A boxed role relates `d` to `e` iff `(d,e)` is in the role's extension at
/// *every* world; a diamond role iff at *some* world.  Concepts whose
/// restrictions all use [`RoleKind::Local`] form the local fragment, the part
/// of the language that the standard translation covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoleKind {
    /// The role evaluated at the current world.
    Local,
    /// Intersection of the role's extensions over all worlds (`box r`).
    Boxed,
    /// Union of the role's extensions over all worlds (`dia r`).
    Diamond,
}

/// A role occurrence: a role name together with its [`RoleKind`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoleExpr {
    pub kind: RoleKind,
    pub name: String,
}

impl RoleExpr {
    pub fn local(name: impl Into<String>) -> Self {
        RoleExpr { kind: RoleKind::Local, name: name.into() }
    }

    pub fn boxed(name: impl Into<String>) -> Self {
        RoleExpr { kind: RoleKind::Boxed, name: name.into() }
    }

    pub fn diamond(name: impl Into<String>) -> Self {
        RoleExpr { kind: RoleKind::Diamond, name: name.into() }
    }
}

impl std::fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            RoleKind::Local => write!(f, "{}", self.name),
            RoleKind::Boxed => write!(f, "box {}", self.name),
            RoleKind::Diamond => write!(f, "dia {}", self.name),
        }
    }
}

/// Concept syntax tree.
///
/// `Or` and `Forall` are kept as first-class nodes rather than desugared, so
/// printed output stays readable; rank computation and evaluation treat them
/// exactly as the equivalent `~`/`&`/`exists` combinations.  Children are
/// reference-counted so large generated concepts can share subtrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptAst {
    /// `true`, satisfied everywhere.
    Top,
    /// `false`, satisfied nowhere.
    Bottom,
    /// A declared concept name.
    Name(String),
    Not(Arc<ConceptAst>),
    And(Arc<ConceptAst>, Arc<ConceptAst>),
    Or(Arc<ConceptAst>, Arc<ConceptAst>),
    /// `exists R . C`: some `R`-successor satisfies `C`.
    Exists(RoleExpr, Arc<ConceptAst>),
    /// `forall R . C`: every `R`-successor satisfies `C`.
    Forall(RoleExpr, Arc<ConceptAst>),
    /// `box C`: `C` holds at every world (for the same individual).
    Box(Arc<ConceptAst>),
    /// `dia C`: `C` holds at some world.
    Dia(Arc<ConceptAst>),
}

impl ConceptAst {
    pub fn name(n: impl Into<String>) -> Self {
        ConceptAst::Name(n.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: ConceptAst) -> Self {
        ConceptAst::Not(Arc::new(c))
    }

    pub fn and(lhs: ConceptAst, rhs: ConceptAst) -> Self {
        ConceptAst::And(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn or(lhs: ConceptAst, rhs: ConceptAst) -> Self {
        ConceptAst::Or(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn exists(role: RoleExpr, body: ConceptAst) -> Self {
        ConceptAst::Exists(role, Arc::new(body))
    }

    pub fn forall(role: RoleExpr, body: ConceptAst) -> Self {
        ConceptAst::Forall(role, Arc::new(body))
    }

    pub fn boxed(c: ConceptAst) -> Self {
        ConceptAst::Box(Arc::new(c))
    }

    pub fn dia(c: ConceptAst) -> Self {
        ConceptAst::Dia(Arc::new(c))
    }
}

/// Formula syntax tree over the correspondence language: a unary predicate per
/// concept name, a binary predicate per role name, and equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FormulaAst {
    /// `P(x)` or `r(x,y)`; arity is checked against the signature at parse
    /// and evaluation time.
    Pred { name: String, args: Vec<String> },
    /// `x = y`.
    Eq(String, String),
    Not(Arc<FormulaAst>),
    And(Arc<FormulaAst>, Arc<FormulaAst>),
    Or(Arc<FormulaAst>, Arc<FormulaAst>),
    Implies(Arc<FormulaAst>, Arc<FormulaAst>),
    Exists(String, Arc<FormulaAst>),
    Forall(String, Arc<FormulaAst>),
    /// `box F`: `F` holds at every world (same variable assignment).
    Box(Arc<FormulaAst>),
    /// `dia F`: `F` holds at some world.
    Dia(Arc<FormulaAst>),
}

impl FormulaAst {
    pub fn pred(name: impl Into<String>, args: Vec<String>) -> Self {
        FormulaAst::Pred { name: name.into(), args }
    }

    pub fn eq(lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        FormulaAst::Eq(lhs.into(), rhs.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: FormulaAst) -> Self {
        FormulaAst::Not(Arc::new(f))
    }

    pub fn and(lhs: FormulaAst, rhs: FormulaAst) -> Self {
        FormulaAst::And(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn or(lhs: FormulaAst, rhs: FormulaAst) -> Self {
        FormulaAst::Or(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn implies(lhs: FormulaAst, rhs: FormulaAst) -> Self {
        FormulaAst::Implies(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn exists(var: impl Into<String>, body: FormulaAst) -> Self {
        FormulaAst::Exists(var.into(), Arc::new(body))
    }

    pub fn forall(var: impl Into<String>, body: FormulaAst) -> Self {
        FormulaAst::Forall(var.into(), Arc::new(body))
    }

    pub fn boxed(f: FormulaAst) -> Self {
        FormulaAst::Box(Arc::new(f))
    }

    pub fn dia(f: FormulaAst) -> Self {
        FormulaAst::Dia(Arc::new(f))
    }
}

/// Variable sorts of the two-sorted first-order language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    /// Ranges over individuals.
    Domain,
    /// Ranges over worlds.
    World,
}

/// A sorted variable of the two-sorted language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoSortedVar {
    pub name: String,
    pub sort: Sort,
}

impl TwoSortedVar {
    pub fn domain(name: impl Into<String>) -> Self {
        TwoSortedVar { name: name.into(), sort: Sort::Domain }
    }

    pub fn world(name: impl Into<String>) -> Self {
        TwoSortedVar { name: name.into(), sort: Sort::World }
    }
}

/// Formula of the two-sorted first-order language: modalities are gone, every
/// predicate takes an extra world-sorted final argument, and quantifiers may
/// bind either sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TwoSortedFormulaAst {
    /// `P(x,v)` or `r(x,y,v)`: domain arguments followed by one world
    /// argument.
    Pred { name: String, args: Vec<TwoSortedVar> },
    /// Equality between two domain variables.
    Eq(TwoSortedVar, TwoSortedVar),
    Not(Arc<TwoSortedFormulaAst>),
    And(Arc<TwoSortedFormulaAst>, Arc<TwoSortedFormulaAst>),
    Or(Arc<TwoSortedFormulaAst>, Arc<TwoSortedFormulaAst>),
    Implies(Arc<TwoSortedFormulaAst>, Arc<TwoSortedFormulaAst>),
    Exists(TwoSortedVar, Arc<TwoSortedFormulaAst>),
    Forall(TwoSortedVar, Arc<TwoSortedFormulaAst>),
}

impl TwoSortedFormulaAst {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: TwoSortedFormulaAst) -> Self {
        TwoSortedFormulaAst::Not(Arc::new(f))
    }

    pub fn and(lhs: TwoSortedFormulaAst, rhs: TwoSortedFormulaAst) -> Self {
        TwoSortedFormulaAst::And(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn or(lhs: TwoSortedFormulaAst, rhs: TwoSortedFormulaAst) -> Self {
        TwoSortedFormulaAst::Or(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn implies(lhs: TwoSortedFormulaAst, rhs: TwoSortedFormulaAst) -> Self {
        TwoSortedFormulaAst::Implies(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn exists(var: TwoSortedVar, body: TwoSortedFormulaAst) -> Self {
        TwoSortedFormulaAst::Exists(var, Arc::new(body))
    }

    pub fn forall(var: TwoSortedVar, body: TwoSortedFormulaAst) -> Self {
        TwoSortedFormulaAst::Forall(var, Arc::new(body))
    }
}

/// Modal rank of a concept: the maximal nesting depth of modalities and
/// restrictions.  `exists`/`forall`/`box`/`dia` each contribute one level;
/// the propositional connectives contribute nothing.
pub fn concept_rank(c: &ConceptAst) -> usize {
    match c {
        ConceptAst::Top | ConceptAst::Bottom | ConceptAst::Name(_) => 0,
        ConceptAst::Not(inner) => concept_rank(inner),
        ConceptAst::And(lhs, rhs) | ConceptAst::Or(lhs, rhs) => {
            concept_rank(lhs).max(concept_rank(rhs))
        }
        ConceptAst::Exists(_, body)
        | ConceptAst::Forall(_, body)
        | ConceptAst::Box(body)
        | ConceptAst::Dia(body) => 1 + concept_rank(body),
    }
}

/// Rank of a formula: the maximal nesting depth of modalities and
/// quantifiers, each contributing one level.
pub fn formula_rank(f: &FormulaAst) -> usize {
    match f {
        FormulaAst::Pred { .. } | FormulaAst::Eq(_, _) => 0,
        FormulaAst::Not(inner) => formula_rank(inner),
        FormulaAst::And(lhs, rhs) | FormulaAst::Or(lhs, rhs) | FormulaAst::Implies(lhs, rhs) => {
            formula_rank(lhs).max(formula_rank(rhs))
        }
        FormulaAst::Exists(_, body)
        | FormulaAst::Forall(_, body)
        | FormulaAst::Box(body)
        | FormulaAst::Dia(body) => 1 + formula_rank(body),
    }
}

/// The free variables of a formula, in name order.
pub fn free_variables(f: &FormulaAst) -> BTreeSet<String> {
    fn go(f: &FormulaAst, out: &mut BTreeSet<String>) {
        match f {
            FormulaAst::Pred { args, .. } => out.extend(args.iter().cloned()),
            FormulaAst::Eq(lhs, rhs) => {
                out.insert(lhs.clone());
                out.insert(rhs.clone());
            }
            FormulaAst::Not(inner) | FormulaAst::Box(inner) | FormulaAst::Dia(inner) => {
                go(inner, out)
            }
            FormulaAst::And(lhs, rhs)
            | FormulaAst::Or(lhs, rhs)
            | FormulaAst::Implies(lhs, rhs) => {
                go(lhs, out);
                go(rhs, out);
            }
            FormulaAst::Exists(var, body) | FormulaAst::Forall(var, body) => {
                let mut inner = BTreeSet::new();
                go(body, &mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut out);
    out
}

/// True iff every restriction in the concept uses a plain (unmodalized) role,
/// i.e. the concept lies in the local fragment the standard translation
/// accepts.
pub fn is_local_fragment(c: &ConceptAst) -> bool {
    match c {
        ConceptAst::Top | ConceptAst::Bottom | ConceptAst::Name(_) => true,
        ConceptAst::Not(inner) | ConceptAst::Box(inner) | ConceptAst::Dia(inner) => {
            is_local_fragment(inner)
        }
        ConceptAst::And(lhs, rhs) | ConceptAst::Or(lhs, rhs) => {
            is_local_fragment(lhs) && is_local_fragment(rhs)
        }
        ConceptAst::Exists(role, body) | ConceptAst::Forall(role, body) => {
            role.kind == RoleKind::Local && is_local_fragment(body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_counts_nested_modalities_and_restrictions() {
        let a = ConceptAst::name("A");
        assert_eq!(concept_rank(&a), 0);
        let c = ConceptAst::exists(RoleExpr::local("r"), ConceptAst::boxed(a.clone()));
        assert_eq!(concept_rank(&c), 2);
        let c = ConceptAst::boxed(ConceptAst::and(a.clone(), ConceptAst::dia(a.clone())));
        assert_eq!(concept_rank(&c), 2);
        let c = ConceptAst::forall(RoleExpr::diamond("r"), a);
        assert_eq!(concept_rank(&c), 1);
    }

    #[test]
    fn formula_rank_counts_quantifiers_and_modalities() {
        let atom = FormulaAst::pred("A", vec!["x".into()]);
        assert_eq!(formula_rank(&atom), 0);
        let f = FormulaAst::exists(
            "x",
            FormulaAst::boxed(FormulaAst::forall(
                "y",
                FormulaAst::pred("r", vec!["x".into(), "y".into()]),
            )),
        );
        assert_eq!(formula_rank(&f), 3);
        let f = FormulaAst::dia(FormulaAst::exists(
            "y",
            FormulaAst::pred("r", vec!["x".into(), "y".into()]),
        ));
        assert_eq!(formula_rank(&f), 2);
    }

    #[test]
    fn free_variables_respect_binding() {
        let f = FormulaAst::exists(
            "y",
            FormulaAst::and(
                FormulaAst::pred("r", vec!["x".into(), "y".into()]),
                FormulaAst::eq("y", "z"),
            ),
        );
        let free: Vec<_> = free_variables(&f).into_iter().collect();
        assert_eq!(free, ["x", "z"]);
        assert!(free_variables(&FormulaAst::eq("x", "x")).contains("x"));
    }

    #[test]
    fn local_fragment_excludes_modalized_roles() {
        let a = ConceptAst::name("A");
        assert!(is_local_fragment(&a));
        assert!(!is_local_fragment(&ConceptAst::exists(RoleExpr::diamond("r"), a.clone())));
        assert!(is_local_fragment(&ConceptAst::boxed(ConceptAst::exists(
            RoleExpr::local("r"),
            a
        ))));
    }
}
