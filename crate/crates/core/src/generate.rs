//! Seeded random concepts and formulas for the verification suites.
//!
//! The generators draw from any [`Rng`]; the suites seed a ChaCha stream so
//! every run over the same seed produces the same terms.  Terms are built
//! top-down against a signature, with a size budget to keep them small and a
//! rank budget that modal operators, restrictions, and quantifiers consume,
//! so `max_rank` is an upper bound on the rank of the result.

use rand::Rng;

use crate::syntax::{ConceptAst, FormulaAst, RoleExpr, Signature};

/// A random concept over the signature of rank at most `max_rank`.  With
/// `local_only` the result stays in the local fragment (no boxed or diamond
/// roles under restrictions).
pub fn concept(rng: &mut impl Rng, sig: &Signature, max_rank: usize, local_only: bool) -> ConceptAst {
    let mut size = rng.gen_range(3..=14);
    concept_node(rng, sig, max_rank, local_only, &mut size)
}

fn concept_node(
    rng: &mut impl Rng,
    sig: &Signature,
    rank: usize,
    local_only: bool,
    size: &mut usize,
) -> ConceptAst {
    #[derive(Clone, Copy)]
    enum Node {
        Name,
        Top,
        Bottom,
        Not,
        And,
        Or,
        Exists,
        Forall,
        Boxed,
        Dia,
    }
    let mut choices = vec![Node::Top, Node::Bottom];
    if !sig.concepts().is_empty() {
        // Twice, so atomic names show up more often than constants.
        choices.extend([Node::Name, Node::Name]);
    }
    if *size > 1 {
        choices.extend([Node::Not, Node::And, Node::Or]);
        if rank > 0 {
            choices.extend([Node::Boxed, Node::Dia]);
            if !sig.roles().is_empty() {
                choices.extend([Node::Exists, Node::Forall]);
            }
        }
    }
    *size = size.saturating_sub(1);
    match choices[rng.gen_range(0..choices.len())] {
        Node::Name => ConceptAst::name(pick(rng, sig.concepts())),
        Node::Top => ConceptAst::Top,
        Node::Bottom => ConceptAst::Bottom,
        Node::Not => ConceptAst::not(concept_node(rng, sig, rank, local_only, size)),
        Node::And => ConceptAst::and(
            concept_node(rng, sig, rank, local_only, size),
            concept_node(rng, sig, rank, local_only, size),
        ),
        Node::Or => ConceptAst::or(
            concept_node(rng, sig, rank, local_only, size),
            concept_node(rng, sig, rank, local_only, size),
        ),
        Node::Exists => ConceptAst::exists(
            role(rng, sig, local_only),
            concept_node(rng, sig, rank - 1, local_only, size),
        ),
        Node::Forall => ConceptAst::forall(
            role(rng, sig, local_only),
            concept_node(rng, sig, rank - 1, local_only, size),
        ),
        Node::Boxed => ConceptAst::boxed(concept_node(rng, sig, rank - 1, local_only, size)),
        Node::Dia => ConceptAst::dia(concept_node(rng, sig, rank - 1, local_only, size)),
    }
}

fn role(rng: &mut impl Rng, sig: &Signature, local_only: bool) -> RoleExpr {
    let name = pick(rng, sig.roles());
    if local_only {
        return RoleExpr::local(name);
    }
    match rng.gen_range(0..4u8) {
        0 | 1 => RoleExpr::local(name),
        2 => RoleExpr::boxed(name),
        _ => RoleExpr::diamond(name),
    }
}

/// A random formula over the signature with free variables among `scope`
/// (which must be nonempty) and rank at most `max_rank`.  Quantifiers bind
/// fresh variables, so the free variables of the result are always a subset
/// of `scope`.
pub fn formula(
    rng: &mut impl Rng,
    sig: &Signature,
    scope: &[String],
    max_rank: usize,
) -> FormulaAst {
    assert!(!scope.is_empty(), "the variable scope must not be empty");
    let mut size = rng.gen_range(3..=14);
    let mut scope = scope.to_vec();
    let mut fresh = 0;
    formula_node(rng, sig, &mut scope, max_rank, &mut size, &mut fresh)
}

fn formula_node(
    rng: &mut impl Rng,
    sig: &Signature,
    scope: &mut Vec<String>,
    rank: usize,
    size: &mut usize,
    fresh: &mut usize,
) -> FormulaAst {
    #[derive(Clone, Copy)]
    enum Node {
        Concept,
        Role,
        Eq,
        Not,
        And,
        Or,
        Implies,
        Exists,
        Forall,
        Boxed,
        Dia,
    }
    let mut choices = vec![Node::Eq];
    if !sig.concepts().is_empty() {
        choices.extend([Node::Concept, Node::Concept]);
    }
    if !sig.roles().is_empty() {
        choices.extend([Node::Role, Node::Role]);
    }
    if *size > 1 {
        choices.extend([Node::Not, Node::And, Node::Or, Node::Implies]);
        if rank > 0 {
            choices.extend([Node::Exists, Node::Forall, Node::Boxed, Node::Dia]);
        }
    }
    *size = size.saturating_sub(1);
    match choices[rng.gen_range(0..choices.len())] {
        Node::Concept => {
            FormulaAst::pred(pick(rng, sig.concepts()), vec![pick(rng, scope)])
        }
        Node::Role => {
            let args = vec![pick(rng, scope), pick(rng, scope)];
            FormulaAst::pred(pick(rng, sig.roles()), args)
        }
        Node::Eq => {
            let left = pick(rng, scope);
            FormulaAst::eq(left, pick(rng, scope))
        }
        Node::Not => FormulaAst::not(formula_node(rng, sig, scope, rank, size, fresh)),
        Node::And => FormulaAst::and(
            formula_node(rng, sig, scope, rank, size, fresh),
            formula_node(rng, sig, scope, rank, size, fresh),
        ),
        Node::Or => FormulaAst::or(
            formula_node(rng, sig, scope, rank, size, fresh),
            formula_node(rng, sig, scope, rank, size, fresh),
        ),
        Node::Implies => FormulaAst::implies(
            formula_node(rng, sig, scope, rank, size, fresh),
            formula_node(rng, sig, scope, rank, size, fresh),
        ),
        Node::Exists => {
            let bound = fresh_var(scope, fresh);
            scope.push(bound.clone());
            let body = formula_node(rng, sig, scope, rank - 1, size, fresh);
            scope.pop();
            FormulaAst::exists(bound, body)
        }
        Node::Forall => {
            let bound = fresh_var(scope, fresh);
            scope.push(bound.clone());
            let body = formula_node(rng, sig, scope, rank - 1, size, fresh);
            scope.pop();
            FormulaAst::forall(bound, body)
        }
        Node::Boxed => FormulaAst::boxed(formula_node(rng, sig, scope, rank - 1, size, fresh)),
        Node::Dia => FormulaAst::dia(formula_node(rng, sig, scope, rank - 1, size, fresh)),
    }
}

/// The next `q0`, `q1`, … not colliding with anything in scope.
fn fresh_var(scope: &[String], fresh: &mut usize) -> String {
    loop {
        let candidate = format!("q{fresh}");
        *fresh += 1;
        if !scope.iter().any(|v| v == &candidate) {
            return candidate;
        }
    }
}

fn pick(rng: &mut impl Rng, names: &[String]) -> String {
    names[rng.gen_range(0..names.len())].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{
        concept_rank, formula_rank, free_variables, is_local_fragment, parse_concept,
        parse_formula,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig() -> Signature {
        Signature::new(["A", "B"], ["r", "s"]).unwrap()
    }

    #[test]
    fn same_seed_same_terms() {
        let sig = sig();
        let scope = ["x".to_string()];
        let mut one = ChaCha8Rng::seed_from_u64(7);
        let mut two = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert_eq!(concept(&mut one, &sig, 3, false), concept(&mut two, &sig, 3, false));
            assert_eq!(
                formula(&mut one, &sig, &scope, 2),
                formula(&mut two, &sig, &scope, 2)
            );
        }
    }

    #[test]
    fn concepts_respect_rank_and_fragment_bounds() {
        let sig = sig();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut modal_seen = false;
        for _ in 0..300 {
            let local = concept(&mut rng, &sig, 3, true);
            assert!(concept_rank(&local) <= 3);
            assert!(is_local_fragment(&local));
            modal_seen |= concept_rank(&local) > 0;

            let any = concept(&mut rng, &sig, 2, false);
            assert!(concept_rank(&any) <= 2);
        }
        assert!(modal_seen, "the generator never produced a modal operator");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let modalized = (0..300)
            .map(|_| concept(&mut rng, &sig, 2, false))
            .any(|c| !is_local_fragment(&c));
        assert!(modalized, "unrestricted generation never left the local fragment");
    }

    #[test]
    fn formulas_stay_within_scope_and_rank() {
        let sig = sig();
        let scope = ["x".to_string(), "y".to_string()];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let f = formula(&mut rng, &sig, &scope, 2);
            assert!(formula_rank(&f) <= 2);
            assert!(free_variables(&f)
                .iter()
                .all(|v| scope.contains(v)));
        }
    }

    #[test]
    fn generated_terms_round_trip_through_the_printer() {
        let sig = sig();
        let scope = ["x".to_string()];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = concept(&mut rng, &sig, 3, false);
            assert_eq!(parse_concept(&c.to_string(), &sig).unwrap(), c, "{c}");
            let f = formula(&mut rng, &sig, &scope, 2);
            assert_eq!(parse_formula(&f.to_string(), &sig).unwrap(), f, "{f}");
        }
    }
}
