use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{ConceptAst, FormulaAst, RoleKind, TwoSortedFormulaAst, TwoSortedVar};
use super::signature::{is_identifier, RESERVED_WORDS};

/// Rejection reasons for the two translations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TranslateError {
    /// The standard translation only covers the local fragment.
    #[error("the standard translation is undefined for the modalized role `{0}`")]
    ModalizedRole(String),
    /// The supplied variable cannot be used without breaking round-tripping
    /// of the output.
    #[error("`{name}` cannot be used as a variable here: {reason}")]
    InvalidVariable { name: String, reason: String },
    /// The designated world variable already occurs as a domain variable.
    #[error("world variable `{0}` already occurs as a domain variable")]
    SortClash(String),
}

/// Deterministic fresh-name supply: `prefix1`, `prefix2`, … skipping any name
/// already taken by the input.
struct FreshVars {
    prefix: &'static str,
    taken: BTreeSet<String>,
    next: usize,
}

impl FreshVars {
    fn new(prefix: &'static str, taken: BTreeSet<String>) -> Self {
        FreshVars { prefix, taken, next: 0 }
    }

    fn next_var(&mut self) -> String {
        loop {
            self.next += 1;
            let name = format!("{}{}", self.prefix, self.next);
            if !self.taken.contains(&name) {
                return name;
            }
        }
    }
}

fn check_variable(name: &str) -> Result<(), TranslateError> {
    if !is_identifier(name) {
        return Err(TranslateError::InvalidVariable {
            name: name.to_string(),
            reason: "not a well-formed identifier".to_string(),
        });
    }
    if RESERVED_WORDS.contains(&name) {
        return Err(TranslateError::InvalidVariable {
            name: name.to_string(),
            reason: "a reserved word".to_string(),
        });
    }
    Ok(())
}

fn collect_concept_names(c: &ConceptAst, out: &mut BTreeSet<String>) {
    match c {
        ConceptAst::Top | ConceptAst::Bottom => {}
        ConceptAst::Name(name) => {
            out.insert(name.clone());
        }
        ConceptAst::Not(inner) | ConceptAst::Box(inner) | ConceptAst::Dia(inner) => {
            collect_concept_names(inner, out)
        }
        ConceptAst::And(lhs, rhs) | ConceptAst::Or(lhs, rhs) => {
            collect_concept_names(lhs, out);
            collect_concept_names(rhs, out);
        }
        ConceptAst::Exists(role, body) | ConceptAst::Forall(role, body) => {
            out.insert(role.name.clone());
            collect_concept_names(body, out);
        }
    }
}

fn collect_formula_names(f: &FormulaAst, vars: &mut BTreeSet<String>, preds: &mut BTreeSet<String>) {
    match f {
        FormulaAst::Pred { name, args } => {
            preds.insert(name.clone());
            vars.extend(args.iter().cloned());
        }
        FormulaAst::Eq(lhs, rhs) => {
            vars.insert(lhs.clone());
            vars.insert(rhs.clone());
        }
        FormulaAst::Not(inner) | FormulaAst::Box(inner) | FormulaAst::Dia(inner) => {
            collect_formula_names(inner, vars, preds)
        }
        FormulaAst::And(lhs, rhs) | FormulaAst::Or(lhs, rhs) | FormulaAst::Implies(lhs, rhs) => {
            collect_formula_names(lhs, vars, preds);
            collect_formula_names(rhs, vars, preds);
        }
        FormulaAst::Exists(var, body) | FormulaAst::Forall(var, body) => {
            vars.insert(var.clone());
            collect_formula_names(body, vars, preds);
        }
    }
}

/// Standard translation of a local-fragment concept into a formula with the
/// single free variable `x`.
///
/// `true` becomes `x = x` (and `false` its negation), restrictions introduce
/// fresh variables `y1, y2, …` in left-to-right order, `forall R . C` is
/// rendered through its `~exists`-encoding so that the result's rank equals
/// the concept's rank, and the modalities commute with the translation.
pub fn standard_translation(c: &ConceptAst, x: &str) -> Result<FormulaAst, TranslateError> {
    check_variable(x)?;
    let mut taken = BTreeSet::new();
    collect_concept_names(c, &mut taken);
    if taken.contains(x) {
        return Err(TranslateError::InvalidVariable {
            name: x.to_string(),
            reason: "collides with a name occurring in the concept".to_string(),
        });
    }
    taken.insert(x.to_string());
    let mut fresh = FreshVars::new("y", taken);
    st(c, x, &mut fresh)
}

fn st(c: &ConceptAst, x: &str, fresh: &mut FreshVars) -> Result<FormulaAst, TranslateError> {
    match c {
        ConceptAst::Top => Ok(FormulaAst::eq(x, x)),
        ConceptAst::Bottom => Ok(FormulaAst::not(FormulaAst::eq(x, x))),
        ConceptAst::Name(name) => Ok(FormulaAst::pred(name.clone(), vec![x.to_string()])),
        ConceptAst::Not(inner) => Ok(FormulaAst::not(st(inner, x, fresh)?)),
        ConceptAst::And(lhs, rhs) => Ok(FormulaAst::and(st(lhs, x, fresh)?, st(rhs, x, fresh)?)),
        ConceptAst::Or(lhs, rhs) => Ok(FormulaAst::or(st(lhs, x, fresh)?, st(rhs, x, fresh)?)),
        ConceptAst::Box(inner) => Ok(FormulaAst::boxed(st(inner, x, fresh)?)),
        ConceptAst::Dia(inner) => Ok(FormulaAst::dia(st(inner, x, fresh)?)),
        ConceptAst::Exists(role, body) => {
            let role_name = local_role_name(role)?;
            let y = fresh.next_var();
            let edge = FormulaAst::pred(role_name, vec![x.to_string(), y.clone()]);
            let body = st(body, &y, fresh)?;
            Ok(FormulaAst::exists(y, FormulaAst::and(edge, body)))
        }
        ConceptAst::Forall(role, body) => {
            let role_name = local_role_name(role)?;
            let y = fresh.next_var();
            let edge = FormulaAst::pred(role_name, vec![x.to_string(), y.clone()]);
            let body = st(body, &y, fresh)?;
            Ok(FormulaAst::not(FormulaAst::exists(
                y,
                FormulaAst::and(edge, FormulaAst::not(body)),
            )))
        }
    }
}

fn local_role_name(role: &super::ast::RoleExpr) -> Result<String, TranslateError> {
    if role.kind == RoleKind::Local {
        Ok(role.name.clone())
    } else {
        Err(TranslateError::ModalizedRole(role.to_string()))
    }
}

/// Translation into the two-sorted first-order language, relative to the
/// world variable `v`.
///
/// Every predicate gains `v` (or the nearest enclosing world binder) as an
/// extra final argument, equality passes through unchanged, `box` becomes a
/// universal quantifier over a fresh world variable `v1, v2, …`, and `dia`
/// its existential dual.
pub fn two_sorted_translation(
    f: &FormulaAst,
    v: &str,
) -> Result<TwoSortedFormulaAst, TranslateError> {
    check_variable(v)?;
    let mut vars = BTreeSet::new();
    let mut preds = BTreeSet::new();
    collect_formula_names(f, &mut vars, &mut preds);
    if vars.contains(v) {
        return Err(TranslateError::SortClash(v.to_string()));
    }
    if preds.contains(v) {
        return Err(TranslateError::InvalidVariable {
            name: v.to_string(),
            reason: "collides with a predicate name occurring in the formula".to_string(),
        });
    }
    let mut taken: BTreeSet<String> = vars.union(&preds).cloned().collect();
    taken.insert(v.to_string());
    let mut fresh = FreshVars::new("v", taken);
    Ok(ts(f, v, &mut fresh))
}

fn ts(f: &FormulaAst, world: &str, fresh: &mut FreshVars) -> TwoSortedFormulaAst {
    match f {
        FormulaAst::Pred { name, args } => {
            let mut args: Vec<TwoSortedVar> =
                args.iter().map(|a| TwoSortedVar::domain(a.clone())).collect();
            args.push(TwoSortedVar::world(world));
            TwoSortedFormulaAst::Pred { name: name.clone(), args }
        }
        FormulaAst::Eq(lhs, rhs) => TwoSortedFormulaAst::Eq(
            TwoSortedVar::domain(lhs.clone()),
            TwoSortedVar::domain(rhs.clone()),
        ),
        FormulaAst::Not(inner) => TwoSortedFormulaAst::not(ts(inner, world, fresh)),
        FormulaAst::And(lhs, rhs) => {
            TwoSortedFormulaAst::and(ts(lhs, world, fresh), ts(rhs, world, fresh))
        }
        FormulaAst::Or(lhs, rhs) => {
            TwoSortedFormulaAst::or(ts(lhs, world, fresh), ts(rhs, world, fresh))
        }
        FormulaAst::Implies(lhs, rhs) => {
            TwoSortedFormulaAst::implies(ts(lhs, world, fresh), ts(rhs, world, fresh))
        }
        FormulaAst::Exists(var, body) => TwoSortedFormulaAst::exists(
            TwoSortedVar::domain(var.clone()),
            ts(body, world, fresh),
        ),
        FormulaAst::Forall(var, body) => TwoSortedFormulaAst::forall(
            TwoSortedVar::domain(var.clone()),
            ts(body, world, fresh),
        ),
        FormulaAst::Box(body) => {
            let w = fresh.next_var();
            let body = ts(body, &w, fresh);
            TwoSortedFormulaAst::forall(TwoSortedVar::world(w), body)
        }
        FormulaAst::Dia(body) => {
            let w = fresh.next_var();
            let body = ts(body, &w, fresh);
            TwoSortedFormulaAst::exists(TwoSortedVar::world(w), body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{
        concept_rank, formula_rank, free_variables, parse_concept, parse_formula, Signature, Sort,
    };

    fn sig() -> Signature {
        Signature::new(["A", "B"], ["r"]).unwrap()
    }

    fn st_text(concept: &str, x: &str) -> String {
        let c = parse_concept(concept, &sig()).unwrap();
        standard_translation(&c, x).unwrap().to_string()
    }

    #[test]
    fn atomic_clauses() {
        assert_eq!(st_text("A", "x"), "A(x)");
        assert_eq!(st_text("true", "x"), "x = x");
        assert_eq!(st_text("false", "x"), "~x = x");
    }

    #[test]
    fn restrictions_introduce_fresh_variables_left_to_right() {
        assert_eq!(st_text("exists r . A", "x"), "exists y1 . r(x,y1) & A(y1)");
        assert_eq!(
            st_text("(exists r . exists r . A) & exists r . B", "x"),
            "(exists y1 . r(x,y1) & exists y2 . r(y1,y2) & A(y2)) & exists y3 . r(x,y3) & B(y3)"
        );
        assert_eq!(
            st_text("forall r . A", "x"),
            "~exists y1 . r(x,y1) & ~A(y1)"
        );
    }

    #[test]
    fn modalities_commute() {
        assert_eq!(st_text("box A", "x"), "box A(x)");
        assert_eq!(st_text("dia ~A | B", "x"), "dia ~A(x) | B(x)");
    }

    #[test]
    fn fresh_variables_avoid_the_free_variable() {
        assert_eq!(st_text("exists r . A", "y1"), "exists y2 . r(y1,y2) & A(y2)");
    }

    #[test]
    fn translation_has_exactly_one_free_variable_and_preserves_rank() {
        let sig = sig();
        for concept in ["A", "exists r . box A", "forall r . (A | dia B)", "box exists r . dia A"]
        {
            let c = parse_concept(concept, &sig).unwrap();
            let f = standard_translation(&c, "x").unwrap();
            let free: Vec<_> = free_variables(&f).into_iter().collect();
            assert_eq!(free, ["x"], "free variables of the translation of `{concept}`");
            assert_eq!(
                formula_rank(&f),
                concept_rank(&c),
                "rank mismatch for `{concept}`"
            );
        }
    }

    #[test]
    fn modalized_roles_are_rejected() {
        let sig = sig();
        let c = parse_concept("box (A & exists dia r . A)", &sig).unwrap();
        assert_eq!(
            standard_translation(&c, "x").unwrap_err(),
            TranslateError::ModalizedRole("dia r".to_string())
        );
    }

    #[test]
    fn bad_free_variables_are_rejected() {
        let c = parse_concept("A", &sig()).unwrap();
        assert!(matches!(
            standard_translation(&c, "box"),
            Err(TranslateError::InvalidVariable { .. })
        ));
        assert!(matches!(
            standard_translation(&c, "1x"),
            Err(TranslateError::InvalidVariable { .. })
        ));
        assert!(matches!(
            standard_translation(&c, "A"),
            Err(TranslateError::InvalidVariable { .. })
        ));
    }

    fn ts_text(formula: &str, v: &str) -> String {
        let f = parse_formula(formula, &sig()).unwrap();
        two_sorted_translation(&f, v).unwrap().to_string()
    }

    #[test]
    fn predicates_gain_a_world_argument() {
        assert_eq!(ts_text("A(x)", "v"), "A(x,v)");
        assert_eq!(ts_text("x = y", "v"), "x = y");
        assert_eq!(ts_text("exists x . r(x,y)", "v"), "exists x . r(x,y,v)");
    }

    #[test]
    fn modalities_become_world_quantifiers() {
        assert_eq!(ts_text("box A(x)", "v"), "forall v1 . A(x,v1)");
        assert_eq!(ts_text("dia r(x,y)", "v"), "exists v1 . r(x,y,v1)");
        assert_eq!(ts_text("box box A(x)", "v"), "forall v1 . forall v2 . A(x,v2)");
        assert_eq!(
            ts_text("box (A(x) & dia B(y))", "v"),
            "forall v1 . A(x,v1) & exists v2 . B(y,v2)"
        );
    }

    #[test]
    fn world_variables_are_capture_avoiding() {
        assert_eq!(ts_text("box A(v1)", "v"), "forall v2 . A(v1,v2)");
        assert_eq!(
            two_sorted_translation(&parse_formula("A(v)", &sig()).unwrap(), "v").unwrap_err(),
            TranslateError::SortClash("v".to_string())
        );
    }

    #[test]
    fn sorts_are_assigned_correctly() {
        let f = parse_formula("box r(x,y)", &sig()).unwrap();
        let t = two_sorted_translation(&f, "v").unwrap();
        let TwoSortedFormulaAst::Forall(w, body) = &t else { panic!("expected forall") };
        assert_eq!((w.name.as_str(), w.sort), ("v1", Sort::World));
        let TwoSortedFormulaAst::Pred { args, .. } = body.as_ref() else { panic!("expected atom") };
        let sorts: Vec<Sort> = args.iter().map(|a| a.sort).collect();
        assert_eq!(sorts, [Sort::Domain, Sort::Domain, Sort::World]);
        assert_eq!(args[2].name, "v1");
    }
}
