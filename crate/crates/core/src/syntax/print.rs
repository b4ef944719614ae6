//! Canonical printers.  `Display` output is the unique rendering that
//! re-parses to an equal tree: parentheses appear exactly where precedence,
//! associativity, or a non-final restriction/quantifier require them.

use std::fmt::{self, Display, Formatter};

use super::ast::{ConceptAst, FormulaAst, TwoSortedFormulaAst, TwoSortedVar};

const LVL_IMPLIES: u8 = 1;
const LVL_OR: u8 = 2;
const LVL_AND: u8 = 3;
const LVL_UNARY: u8 = 4;

/// Prints `c` in a context that accepts operators of level `min` or tighter.
/// `rightmost` records whether the printed text ends the enclosing
/// parenthesized unit — only then may a restriction stay bare, since its body
/// extends maximally right when re-parsed.
fn fmt_concept(c: &ConceptAst, min: u8, rightmost: bool, f: &mut Formatter<'_>) -> fmt::Result {
    match c {
        ConceptAst::Top => f.write_str("true"),
        ConceptAst::Bottom => f.write_str("false"),
        ConceptAst::Name(name) => f.write_str(name),
        ConceptAst::Not(inner) => {
            f.write_str("~")?;
            fmt_concept(inner, LVL_UNARY, rightmost, f)
        }
        ConceptAst::Box(inner) => {
            f.write_str("box ")?;
            fmt_concept(inner, LVL_UNARY, rightmost, f)
        }
        ConceptAst::Dia(inner) => {
            f.write_str("dia ")?;
            fmt_concept(inner, LVL_UNARY, rightmost, f)
        }
        ConceptAst::And(lhs, rhs) => {
            if LVL_AND < min {
                f.write_str("(")?;
                fmt_concept(c, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_concept(lhs, LVL_AND, false, f)?;
                f.write_str(" & ")?;
                fmt_concept(rhs, LVL_UNARY, rightmost, f)
            }
        }
        ConceptAst::Or(lhs, rhs) => {
            if LVL_OR < min {
                f.write_str("(")?;
                fmt_concept(c, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_concept(lhs, LVL_OR, false, f)?;
                f.write_str(" | ")?;
                fmt_concept(rhs, LVL_AND, rightmost, f)
            }
        }
        ConceptAst::Exists(role, body) | ConceptAst::Forall(role, body) => {
            if !rightmost {
                f.write_str("(")?;
                fmt_concept(c, 0, true, f)?;
                return f.write_str(")");
            }
            let keyword = if matches!(c, ConceptAst::Exists(..)) { "exists" } else { "forall" };
            write!(f, "{keyword} {role} . ")?;
            fmt_concept(body, 0, true, f)
        }
    }
}

fn fmt_formula(ff: &FormulaAst, min: u8, rightmost: bool, f: &mut Formatter<'_>) -> fmt::Result {
    match ff {
        FormulaAst::Pred { name, args } => write!(f, "{name}({})", args.join(",")),
        FormulaAst::Eq(lhs, rhs) => write!(f, "{lhs} = {rhs}"),
        FormulaAst::Not(inner) => {
            f.write_str("~")?;
            fmt_formula(inner, LVL_UNARY, rightmost, f)
        }
        FormulaAst::Box(inner) => {
            f.write_str("box ")?;
            fmt_formula(inner, LVL_UNARY, rightmost, f)
        }
        FormulaAst::Dia(inner) => {
            f.write_str("dia ")?;
            fmt_formula(inner, LVL_UNARY, rightmost, f)
        }
        FormulaAst::And(lhs, rhs) => {
            if LVL_AND < min {
                f.write_str("(")?;
                fmt_formula(ff, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_formula(lhs, LVL_AND, false, f)?;
                f.write_str(" & ")?;
                fmt_formula(rhs, LVL_UNARY, rightmost, f)
            }
        }
        FormulaAst::Or(lhs, rhs) => {
            if LVL_OR < min {
                f.write_str("(")?;
                fmt_formula(ff, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_formula(lhs, LVL_OR, false, f)?;
                f.write_str(" | ")?;
                fmt_formula(rhs, LVL_AND, rightmost, f)
            }
        }
        FormulaAst::Implies(lhs, rhs) => {
            if LVL_IMPLIES < min {
                f.write_str("(")?;
                fmt_formula(ff, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_formula(lhs, LVL_OR, false, f)?;
                f.write_str(" -> ")?;
                fmt_formula(rhs, LVL_IMPLIES, rightmost, f)
            }
        }
        FormulaAst::Exists(var, body) | FormulaAst::Forall(var, body) => {
            if !rightmost {
                f.write_str("(")?;
                fmt_formula(ff, 0, true, f)?;
                return f.write_str(")");
            }
            let keyword = if matches!(ff, FormulaAst::Exists(..)) { "exists" } else { "forall" };
            write!(f, "{keyword} {var} . ")?;
            fmt_formula(body, 0, true, f)
        }
    }
}

fn fmt_two_sorted(
    ff: &TwoSortedFormulaAst,
    min: u8,
    rightmost: bool,
    f: &mut Formatter<'_>,
) -> fmt::Result {
    match ff {
        TwoSortedFormulaAst::Pred { name, args } => {
            let names: Vec<&str> = args.iter().map(|v| v.name.as_str()).collect();
            write!(f, "{name}({})", names.join(","))
        }
        TwoSortedFormulaAst::Eq(lhs, rhs) => write!(f, "{} = {}", lhs.name, rhs.name),
        TwoSortedFormulaAst::Not(inner) => {
            f.write_str("~")?;
            fmt_two_sorted(inner, LVL_UNARY, rightmost, f)
        }
        TwoSortedFormulaAst::And(lhs, rhs) => {
            if LVL_AND < min {
                f.write_str("(")?;
                fmt_two_sorted(ff, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_two_sorted(lhs, LVL_AND, false, f)?;
                f.write_str(" & ")?;
                fmt_two_sorted(rhs, LVL_UNARY, rightmost, f)
            }
        }
        TwoSortedFormulaAst::Or(lhs, rhs) => {
            if LVL_OR < min {
                f.write_str("(")?;
                fmt_two_sorted(ff, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_two_sorted(lhs, LVL_OR, false, f)?;
                f.write_str(" | ")?;
                fmt_two_sorted(rhs, LVL_AND, rightmost, f)
            }
        }
        TwoSortedFormulaAst::Implies(lhs, rhs) => {
            if LVL_IMPLIES < min {
                f.write_str("(")?;
                fmt_two_sorted(ff, 0, true, f)?;
                f.write_str(")")
            } else {
                fmt_two_sorted(lhs, LVL_OR, false, f)?;
                f.write_str(" -> ")?;
                fmt_two_sorted(rhs, LVL_IMPLIES, rightmost, f)
            }
        }
        TwoSortedFormulaAst::Exists(var, body) | TwoSortedFormulaAst::Forall(var, body) => {
            if !rightmost {
                f.write_str("(")?;
                fmt_two_sorted(ff, 0, true, f)?;
                return f.write_str(")");
            }
            let keyword =
                if matches!(ff, TwoSortedFormulaAst::Exists(..)) { "exists" } else { "forall" };
            write!(f, "{keyword} {} . ", var.name)?;
            fmt_two_sorted(body, 0, true, f)
        }
    }
}

impl Display for ConceptAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        fmt_concept(self, 0, true, f)
    }
}

impl Display for FormulaAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, true, f)
    }
}

impl Display for TwoSortedFormulaAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        fmt_two_sorted(self, 0, true, f)
    }
}

impl Display for TwoSortedVar {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
