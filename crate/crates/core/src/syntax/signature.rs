use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Words with a fixed meaning in the concrete syntax; they cannot be used as
/// concept or role names.
pub(crate) const RESERVED_WORDS: [&str; 6] = ["true", "false", "box", "dia", "exists", "forall"];

/// Returns true if `s` is a well-formed identifier: `[A-Za-z_][A-Za-z0-9_]*`.
pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite vocabulary: ordered concept names (unary) and role names (binary).
///
/// The declaration order is significant — it fixes the canonical order of
/// atoms in normal forms, of keys in saved documents, and of extension bits in
/// model enumeration.  Names live in disjoint namespaces, must be well-formed
/// identifiers, and must avoid the reserved words of the concrete syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    concepts: Vec<String>,
    roles: Vec<String>,
    concept_index: HashMap<String, usize>,
    role_index: HashMap<String, usize>,
}

/// Rejection reasons for [`Signature::new`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    /// A name is not of the shape `[A-Za-z_][A-Za-z0-9_]*`.
    #[error("`{0}` is not a well-formed identifier")]
    MalformedName(String),
    /// A name collides with a keyword of the concrete syntax.
    #[error("`{0}` is a reserved word and cannot be declared")]
    ReservedWord(String),
    /// The same name was declared twice (within or across namespaces).
    #[error("`{0}` is declared more than once")]
    DuplicateName(String),
}

impl Signature {
    /// Builds a signature from concept and role names, in declaration order.
    pub fn new<S: Into<String>>(
        concepts: impl IntoIterator<Item = S>,
        roles: impl IntoIterator<Item = S>,
    ) -> Result<Self, SignatureError> {
        let concepts: Vec<String> = concepts.into_iter().map(Into::into).collect();
        let roles: Vec<String> = roles.into_iter().map(Into::into).collect();
        let mut concept_index = HashMap::new();
        let mut role_index = HashMap::new();
        for (pos, name) in concepts.iter().enumerate() {
            check_name(name)?;
            if concept_index.insert(name.clone(), pos).is_some() {
                return Err(SignatureError::DuplicateName(name.clone()));
            }
        }
        for (pos, name) in roles.iter().enumerate() {
            check_name(name)?;
            if concept_index.contains_key(name) || role_index.insert(name.clone(), pos).is_some() {
                return Err(SignatureError::DuplicateName(name.clone()));
            }
        }
        Ok(Signature { concepts, roles, concept_index, role_index })
    }

    /// Concept names in declaration order.
    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    /// Role names in declaration order.
    pub fn roles(&self) -> &[String] {
        &self.roles
    }

    /// Position of a concept name, if declared.
    pub fn concept_index(&self, name: &str) -> Option<usize> {
        self.concept_index.get(name).copied()
    }

    /// Position of a role name, if declared.
    pub fn role_index(&self, name: &str) -> Option<usize> {
        self.role_index.get(name).copied()
    }

    /// True if `name` is a declared concept name.
    pub fn is_concept(&self, name: &str) -> bool {
        self.concept_index.contains_key(name)
    }

    /// True if `name` is a declared role name.
    pub fn is_role(&self, name: &str) -> bool {
        self.role_index.contains_key(name)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "concepts {{{}}}, roles {{{}}}",
            self.concepts.join(", "),
            self.roles.join(", ")
        )
    }
}

fn check_name(name: &str) -> Result<(), SignatureError> {
    if !is_identifier(name) {
        return Err(SignatureError::MalformedName(name.to_string()));
    }
    if RESERVED_WORDS.contains(&name) {
        return Err(SignatureError::ReservedWord(name.to_string()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_disjoint_identifier_names() {
        let sig = Signature::new(["A", "B"], ["r"]).unwrap();
        assert_eq!(sig.concepts(), ["A", "B"]);
        assert_eq!(sig.roles(), ["r"]);
        assert_eq!(sig.concept_index("B"), Some(1));
        assert_eq!(sig.role_index("r"), Some(0));
        assert!(!sig.is_role("A"));
    }

    #[test]
    fn rejects_duplicates_across_namespaces() {
        assert_eq!(
            Signature::new(["A"], ["A"]).unwrap_err(),
            SignatureError::DuplicateName("A".into())
        );
        assert_eq!(
            Signature::new(["A", "A"], ["r"]).unwrap_err(),
            SignatureError::DuplicateName("A".into())
        );
    }

    #[test]
    fn rejects_reserved_and_malformed_names() {
        assert_eq!(
            Signature::new(["box"], ["r"]).unwrap_err(),
            SignatureError::ReservedWord("box".into())
        );
        assert_eq!(
            Signature::new(["A"], ["r-1"]).unwrap_err(),
            SignatureError::MalformedName("r-1".into())
        );
        assert_eq!(
            Signature::new(["1A"], []).unwrap_err(),
            SignatureError::MalformedName("1A".into())
        );
    }

    #[test]
    fn empty_signature_is_allowed() {
        let sig = Signature::new(Vec::<String>::new(), Vec::<String>::new()).unwrap();
        assert!(sig.concepts().is_empty() && sig.roles().is_empty());
    }
}
