use thiserror::Error;

use super::ast::{ConceptAst, FormulaAst, RoleExpr, RoleKind};
use super::signature::Signature;

/// Parse failure, carrying the 1-based source position it was detected at.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message} (line {line}, column {column})")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    fn new(message: impl Into<String>, line: usize, column: usize) -> Self {
        ParseError { message: message.into(), line, column }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    True,
    False,
    Box,
    Dia,
    Exists,
    Forall,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Dot,
    Comma,
    Equals,
    LParen,
    RParen,
    End,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("`{name}`"),
            TokenKind::True => "`true`".into(),
            TokenKind::False => "`false`".into(),
            TokenKind::Box => "`box`".into(),
            TokenKind::Dia => "`dia`".into(),
            TokenKind::Exists => "`exists`".into(),
            TokenKind::Forall => "`forall`".into(),
            TokenKind::Tilde => "`~`".into(),
            TokenKind::Amp => "`&`".into(),
            TokenKind::Pipe => "`|`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let start_col = column;
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let kind = match word.as_str() {
                "true" => TokenKind::True,
                "false" => TokenKind::False,
                "box" => TokenKind::Box,
                "dia" => TokenKind::Dia,
                "exists" => TokenKind::Exists,
                "forall" => TokenKind::Forall,
                _ => TokenKind::Ident(word),
            };
            tokens.push(Token { kind, line, column: start_col });
            continue;
        }
        let kind = match c {
            '~' => TokenKind::Tilde,
            '&' => TokenKind::Amp,
            '|' => TokenKind::Pipe,
            '.' => TokenKind::Dot,
            ',' => TokenKind::Comma,
            '=' => TokenKind::Equals,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '-' => {
                chars.next();
                column += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    column += 1;
                    tokens.push(Token { kind: TokenKind::Arrow, line, column: start_col });
                    continue;
                }
                return Err(ParseError::new("expected `>` after `-`", line, column));
            }
            other => {
                return Err(ParseError::new(
                    format!("unexpected character `{other}`"),
                    line,
                    start_col,
                ))
            }
        };
        chars.next();
        column += 1;
        tokens.push(Token { kind, line, column: start_col });
    }
    tokens.push(Token { kind: TokenKind::End, line, column });
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature) -> Result<Self, ParseError> {
        Ok(Parser { tokens: tokenize(text)?, pos: 0, sig })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> ParseError {
        ParseError::new(message, token.line, token.column)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let token = self.peek();
        self.error_at(token, format!("expected {expected}, found {}", token.kind.describe()))
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.peek().kind == TokenKind::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// Consumes an identifier token and returns its name and position.
    fn expect_ident(&mut self, expected: &str) -> Result<(String, Token), ParseError> {
        match self.peek().kind.clone() {
            TokenKind::Ident(name) => {
                let token = self.advance();
                Ok((name, token))
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    // ---- concepts -------------------------------------------------------

    /// `C ::= C_and ("|" C_and)*`, left-associative.
    fn concept(&mut self) -> Result<ConceptAst, ParseError> {
        let mut lhs = self.concept_and()?;
        while self.peek().kind == TokenKind::Pipe {
            self.advance();
            let rhs = self.concept_and()?;
            lhs = ConceptAst::or(lhs, rhs);
        }
        Ok(lhs)
    }

    /// `C_and ::= C_unary ("&" C_unary)*`, left-associative.
    fn concept_and(&mut self) -> Result<ConceptAst, ParseError> {
        let mut lhs = self.concept_unary()?;
        while self.peek().kind == TokenKind::Amp {
            self.advance();
            let rhs = self.concept_unary()?;
            lhs = ConceptAst::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn concept_unary(&mut self) -> Result<ConceptAst, ParseError> {
        match self.peek().kind {
            TokenKind::Tilde => {
                self.advance();
                Ok(ConceptAst::not(self.concept_unary()?))
            }
            TokenKind::Box => {
                self.advance();
                Ok(ConceptAst::boxed(self.concept_unary()?))
            }
            TokenKind::Dia => {
                self.advance();
                Ok(ConceptAst::dia(self.concept_unary()?))
            }
            TokenKind::Exists | TokenKind::Forall => self.concept_restriction(),
            _ => self.concept_atom(),
        }
    }

    /// `("exists" | "forall") Role "." C` — the body extends maximally right.
    fn concept_restriction(&mut self) -> Result<ConceptAst, ParseError> {
        let existential = self.advance().kind == TokenKind::Exists;
        let role = self.role_expr()?;
        self.expect(TokenKind::Dot, "`.` after the role")?;
        let body = self.concept()?;
        Ok(if existential {
            ConceptAst::exists(role, body)
        } else {
            ConceptAst::forall(role, body)
        })
    }

    /// `Role ::= ident | "box" ident | "dia" ident`, checked against the
    /// signature's role names.
    fn role_expr(&mut self) -> Result<RoleExpr, ParseError> {
        let kind = match self.peek().kind {
            TokenKind::Box => {
                self.advance();
                RoleKind::Boxed
            }
            TokenKind::Dia => {
                self.advance();
                RoleKind::Diamond
            }
            _ => RoleKind::Local,
        };
        let (name, token) = self.expect_ident("a role name")?;
        if !self.sig.is_role(&name) {
            return Err(self.error_at(&token, format!("undeclared role name `{name}`")));
        }
        Ok(RoleExpr { kind, name })
    }

    fn concept_atom(&mut self) -> Result<ConceptAst, ParseError> {
        match self.peek().kind.clone() {
            TokenKind::True => {
                self.advance();
                Ok(ConceptAst::Top)
            }
            TokenKind::False => {
                self.advance();
                Ok(ConceptAst::Bottom)
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.concept()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                let token = self.advance();
                if self.sig.is_concept(&name) {
                    Ok(ConceptAst::Name(name))
                } else if self.sig.is_role(&name) {
                    Err(self.error_at(&token, format!("`{name}` is a role name, not a concept")))
                } else {
                    Err(self.error_at(&token, format!("undeclared concept name `{name}`")))
                }
            }
            _ => Err(self.unexpected("a concept")),
        }
    }

    // ---- formulas -------------------------------------------------------

    /// `F ::= F_or ("->" F)?`, right-associative.
    fn formula(&mut self) -> Result<FormulaAst, ParseError> {
        let lhs = self.formula_or()?;
        if self.peek().kind == TokenKind::Arrow {
            self.advance();
            let rhs = self.formula()?;
            return Ok(FormulaAst::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> Result<FormulaAst, ParseError> {
        let mut lhs = self.formula_and()?;
        while self.peek().kind == TokenKind::Pipe {
            self.advance();
            let rhs = self.formula_and()?;
            lhs = FormulaAst::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn formula_and(&mut self) -> Result<FormulaAst, ParseError> {
        let mut lhs = self.formula_unary()?;
        while self.peek().kind == TokenKind::Amp {
            self.advance();
            let rhs = self.formula_unary()?;
            lhs = FormulaAst::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn formula_unary(&mut self) -> Result<FormulaAst, ParseError> {
        match self.peek().kind {
            TokenKind::Tilde => {
                self.advance();
                Ok(FormulaAst::not(self.formula_unary()?))
            }
            TokenKind::Box => {
                self.advance();
                Ok(FormulaAst::boxed(self.formula_unary()?))
            }
            TokenKind::Dia => {
                self.advance();
                Ok(FormulaAst::dia(self.formula_unary()?))
            }
            TokenKind::Exists | TokenKind::Forall => self.formula_quantifier(),
            _ => self.formula_atom(),
        }
    }

    /// `("exists" | "forall") var "." F` — the body extends maximally right.
    fn formula_quantifier(&mut self) -> Result<FormulaAst, ParseError> {
        let existential = self.advance().kind == TokenKind::Exists;
        let var = self.variable("a variable to bind")?;
        self.expect(TokenKind::Dot, "`.` after the bound variable")?;
        let body = self.formula()?;
        Ok(if existential {
            FormulaAst::exists(var, body)
        } else {
            FormulaAst::forall(var, body)
        })
    }

    /// Consumes a variable: an identifier distinct from all declared names
    /// (so variables and predicates can never be confused).
    fn variable(&mut self, expected: &str) -> Result<String, ParseError> {
        let (name, token) = self.expect_ident(expected)?;
        if self.sig.is_concept(&name) || self.sig.is_role(&name) {
            return Err(
                self.error_at(&token, format!("variable `{name}` collides with a declared name"))
            );
        }
        Ok(name)
    }

    fn formula_atom(&mut self) -> Result<FormulaAst, ParseError> {
        match self.peek().kind.clone() {
            TokenKind::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                let token = self.advance();
                match self.peek().kind {
                    TokenKind::LParen => {
                        self.advance();
                        let mut args = vec![self.variable("a variable")?];
                        while self.peek().kind == TokenKind::Comma {
                            self.advance();
                            args.push(self.variable("a variable")?);
                        }
                        self.expect(TokenKind::RParen, "`)`")?;
                        let arity = if self.sig.is_concept(&name) {
                            1
                        } else if self.sig.is_role(&name) {
                            2
                        } else {
                            return Err(self
                                .error_at(&token, format!("undeclared predicate name `{name}`")));
                        };
                        if args.len() != arity {
                            let wants = if arity == 1 { "one argument" } else { "two arguments" };
                            return Err(self.error_at(
                                &token,
                                format!("`{name}` takes {wants}, found {}", args.len()),
                            ));
                        }
                        Ok(FormulaAst::Pred { name, args })
                    }
                    TokenKind::Equals => {
                        if self.sig.is_concept(&name) || self.sig.is_role(&name) {
                            return Err(self.error_at(
                                &token,
                                format!("variable `{name}` collides with a declared name"),
                            ));
                        }
                        self.advance();
                        let rhs = self.variable("a variable")?;
                        Ok(FormulaAst::Eq(name, rhs))
                    }
                    _ => Err(self.unexpected("`(` or `=` after the identifier")),
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

/// Parses the concrete concept syntax; all names must be declared in `sig`.
pub fn parse_concept(text: &str, sig: &Signature) -> Result<ConceptAst, ParseError> {
    let mut parser = Parser::new(text, sig)?;
    let concept = parser.concept()?;
    parser.expect_end()?;
    Ok(concept)
}

/// Parses the concrete formula syntax; predicate names must be declared in
/// `sig` with matching arity, and variables must not collide with declared
/// names.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<FormulaAst, ParseError> {
    let mut parser = Parser::new(text, sig)?;
    let formula = parser.formula()?;
    parser.expect_end()?;
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["A", "B"], ["r", "s"]).unwrap()
    }

    #[test]
    fn parses_atomic_and_nested_concepts() {
        let sig = sig();
        assert_eq!(parse_concept("A", &sig).unwrap(), ConceptAst::name("A"));
        assert_eq!(
            parse_concept("exists r . box A", &sig).unwrap(),
            ConceptAst::exists(RoleExpr::local("r"), ConceptAst::boxed(ConceptAst::name("A")))
        );
        assert_eq!(
            parse_concept("exists dia r . A", &sig).unwrap(),
            ConceptAst::exists(RoleExpr::diamond("r"), ConceptAst::name("A"))
        );
        assert_eq!(
            parse_concept("exists box r . A", &sig).unwrap(),
            ConceptAst::exists(RoleExpr::boxed("r"), ConceptAst::name("A"))
        );
    }

    #[test]
    fn connectives_follow_precedence_and_associativity() {
        let sig = sig();
        let a = || ConceptAst::name("A");
        let b = || ConceptAst::name("B");
        assert_eq!(
            parse_concept("A & B | A", &sig).unwrap(),
            ConceptAst::or(ConceptAst::and(a(), b()), a())
        );
        assert_eq!(
            parse_concept("A & B & A", &sig).unwrap(),
            ConceptAst::and(ConceptAst::and(a(), b()), a())
        );
        assert_eq!(parse_concept("~A & B", &sig).unwrap(), ConceptAst::and(ConceptAst::not(a()), b()));
        assert_eq!(
            parse_concept("box A | B", &sig).unwrap(),
            ConceptAst::or(ConceptAst::boxed(a()), b())
        );
    }

    #[test]
    fn restrictions_extend_maximally_right() {
        let sig = sig();
        let a = || ConceptAst::name("A");
        let b = || ConceptAst::name("B");
        assert_eq!(
            parse_concept("exists r . A & B", &sig).unwrap(),
            ConceptAst::exists(RoleExpr::local("r"), ConceptAst::and(a(), b()))
        );
        assert_eq!(
            parse_concept("(exists r . A) & B", &sig).unwrap(),
            ConceptAst::and(ConceptAst::exists(RoleExpr::local("r"), a()), b())
        );
        assert_eq!(
            parse_concept("B & exists r . A | B", &sig).unwrap(),
            ConceptAst::and(
                b(),
                ConceptAst::exists(RoleExpr::local("r"), ConceptAst::or(a(), b()))
            )
        );
    }

    #[test]
    fn parses_formulas_with_quantifiers_and_equality() {
        let sig = sig();
        assert_eq!(
            parse_formula("A(x)", &sig).unwrap(),
            FormulaAst::pred("A", vec!["x".into()])
        );
        assert_eq!(parse_formula("x = x", &sig).unwrap(), FormulaAst::eq("x", "x"));
        assert_eq!(
            parse_formula("exists x . box (forall y . r(x,y))", &sig).unwrap(),
            FormulaAst::exists(
                "x",
                FormulaAst::boxed(FormulaAst::forall(
                    "y",
                    FormulaAst::pred("r", vec!["x".into(), "y".into()])
                ))
            )
        );
        assert_eq!(
            parse_formula("A(x) -> B(x) -> x = y", &sig).unwrap(),
            FormulaAst::implies(
                FormulaAst::pred("A", vec!["x".into()]),
                FormulaAst::implies(FormulaAst::pred("B", vec!["x".into()]), FormulaAst::eq("x", "y"))
            )
        );
    }

    #[test]
    fn rejects_undeclared_names_and_arity_misuse() {
        let sig = sig();
        let err = parse_concept("C", &sig).unwrap_err();
        assert!(err.message.contains("undeclared concept name `C`"), "{err}");
        let err = parse_concept("exists q . A", &sig).unwrap_err();
        assert!(err.message.contains("undeclared role name `q`"), "{err}");
        let err = parse_formula("A(x,y)", &sig).unwrap_err();
        assert!(err.message.contains("takes one argument"), "{err}");
        let err = parse_formula("r(x)", &sig).unwrap_err();
        assert!(err.message.contains("takes two arguments"), "{err}");
        let err = parse_formula("P(x)", &sig).unwrap_err();
        assert!(err.message.contains("undeclared predicate name `P`"), "{err}");
        let err = parse_formula("exists A . r(A,x)", &sig).unwrap_err();
        assert!(err.message.contains("collides with a declared name"), "{err}");
    }

    #[test]
    fn reports_positions_for_syntax_errors() {
        let sig = sig();
        let err = parse_concept("A &", &sig).unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
        let err = parse_concept("A @", &sig).unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        let err = parse_concept("A\n& & B", &sig).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        let err = parse_formula("true", &sig).unwrap_err();
        assert!(err.message.contains("expected a formula"), "{err}");
    }

    #[test]
    fn rejects_trailing_input() {
        let sig = sig();
        let err = parse_concept("A B", &sig).unwrap_err();
        assert!(err.message.contains("expected end of input"), "{err}");
    }
}
