use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::syntax::Signature;

/// Errors raised by model construction and lookup.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    /// The parts do not form a valid interpretation; all violations are
    /// listed.
    #[error("invalid interpretation: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("restriction set is not a subset of the domain: `{0}` is not an individual")]
    RestrictionOutsideDomain(String),
    #[error("restriction set is empty; the domain of an interpretation must be nonempty")]
    EmptyRestriction,
    #[error("enumeration bounds must be at least 1")]
    ZeroBound,
    #[error("the two interpretations have different signatures")]
    SignatureMismatch,
    #[error("the two interpretations have different world sets")]
    WorldMismatch,
}

/// A finite interpretation: a nonempty set of worlds, a nonempty domain of
/// individuals shared by all worlds, and per-world extensions for every
/// concept and role name of the signature.
///
/// Worlds and individuals are identified by strings; the declaration order of
/// both is preserved and canonical (serialization, enumeration of
/// counterexamples, and rendering all follow it).  Extensions are stored
/// totally: every declared name has an entry for every world, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S5Interpretation {
    sig: Signature,
    worlds: Vec<String>,
    domain: Vec<String>,
    concept_ext: HashMap<String, HashMap<String, HashSet<String>>>,
    role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>>,
}

impl S5Interpretation {
    /// Builds an interpretation, checking every invariant: worlds and domain
    /// nonempty and duplicate-free, and extensions referencing only declared
    /// names, worlds, and individuals.  Extensions may omit entries (missing
    /// entries are empty); unknown names or worlds in them are violations.
    pub fn from_parts(
        sig: Signature,
        worlds: Vec<String>,
        domain: Vec<String>,
        concept_ext: HashMap<String, HashMap<String, HashSet<String>>>,
        role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>>,
    ) -> Result<Self, ModelError> {
        let mut violations = Vec::new();
        if worlds.is_empty() {
            violations.push("worlds empty".to_string());
        }
        if domain.is_empty() {
            violations.push("domain empty".to_string());
        }
        check_identifier_list(&worlds, "world", &mut violations);
        check_identifier_list(&domain, "individual", &mut violations);

        let world_set: HashSet<&str> = worlds.iter().map(String::as_str).collect();
        let ind_set: HashSet<&str> = domain.iter().map(String::as_str).collect();

        for (concept, per_world) in sorted_by_key(&concept_ext) {
            if !sig.is_concept(concept) {
                violations.push(format!("extension for undeclared concept name `{concept}`"));
                continue;
            }
            for (world, members) in sorted_by_key(per_world) {
                if !world_set.contains(world.as_str()) {
                    violations
                        .push(format!("concept `{concept}` has extension at unknown world `{world}`"));
                    continue;
                }
                for member in sorted(members) {
                    if !ind_set.contains(member.as_str()) {
                        violations.push(format!(
                            "concept `{concept}` at world `{world}` contains unknown individual `{member}`"
                        ));
                    }
                }
            }
        }
        for (role, per_world) in sorted_by_key(&role_ext) {
            if !sig.is_role(role) {
                violations.push(format!("extension for undeclared role name `{role}`"));
                continue;
            }
            for (world, pairs) in sorted_by_key(per_world) {
                if !world_set.contains(world.as_str()) {
                    violations
                        .push(format!("role `{role}` has extension at unknown world `{world}`"));
                    continue;
                }
                let mut pairs: Vec<_> = pairs.iter().collect();
                pairs.sort();
                for (from, to) in pairs {
                    for end in [from, to] {
                        if !ind_set.contains(end.as_str()) {
                            violations.push(format!(
                                "role `{role}` at world `{world}` references unknown individual `{end}`"
                            ));
                        }
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }

        // Normalize to total extensions so that structural equality is
        // insensitive to omitted-versus-empty entries.
        let mut interp = S5Interpretation {
            sig,
            worlds,
            domain,
            concept_ext: HashMap::new(),
            role_ext: HashMap::new(),
        };
        for concept in interp.sig.concepts() {
            let source = concept_ext.get(concept);
            let mut per_world = HashMap::new();
            for world in &interp.worlds {
                let members =
                    source.and_then(|m| m.get(world)).cloned().unwrap_or_default();
                per_world.insert(world.clone(), members);
            }
            interp.concept_ext.insert(concept.clone(), per_world);
        }
        for role in interp.sig.roles() {
            let source = role_ext.get(role);
            let mut per_world = HashMap::new();
            for world in &interp.worlds {
                let pairs = source.and_then(|m| m.get(world)).cloned().unwrap_or_default();
                per_world.insert(world.clone(), pairs);
            }
            interp.role_ext.insert(role.clone(), per_world);
        }
        Ok(interp)
    }

    /// Re-checks the construction invariants, returning all violations (empty
    /// for every value built through [`S5Interpretation::from_parts`]).
    pub fn validate(&self) -> Vec<String> {
        match Self::from_parts(
            self.sig.clone(),
            self.worlds.clone(),
            self.domain.clone(),
            self.concept_ext.clone(),
            self.role_ext.clone(),
        ) {
            Ok(_) => Vec::new(),
            Err(ModelError::Invalid(violations)) => violations,
            Err(other) => vec![other.to_string()],
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Worlds in declaration order.
    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    /// Individuals in declaration order.
    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn has_world(&self, world: &str) -> bool {
        self.worlds.iter().any(|w| w == world)
    }

    pub fn has_individual(&self, ind: &str) -> bool {
        self.domain.iter().any(|d| d == ind)
    }

    /// Errors unless `world` is declared.
    pub fn check_world(&self, world: &str) -> Result<(), ModelError> {
        if self.has_world(world) {
            Ok(())
        } else {
            Err(ModelError::UnknownWorld(world.to_string()))
        }
    }

    /// Errors unless `ind` is declared.
    pub fn check_individual(&self, ind: &str) -> Result<(), ModelError> {
        if self.has_individual(ind) {
            Ok(())
        } else {
            Err(ModelError::UnknownIndividual(ind.to_string()))
        }
    }

    /// True iff `ind` belongs to the concept's extension at `world`.
    /// Undeclared names or worlds simply answer `false`; callers that need a
    /// diagnosis validate first.
    pub fn has_concept(&self, concept: &str, world: &str, ind: &str) -> bool {
        self.concept_ext
            .get(concept)
            .and_then(|m| m.get(world))
            .is_some_and(|members| members.contains(ind))
    }

    /// True iff `(from,to)` belongs to the role's extension at `world`.
    pub fn has_role(&self, role: &str, world: &str, from: &str, to: &str) -> bool {
        self.role_ext
            .get(role)
            .and_then(|m| m.get(world))
            .is_some_and(|pairs| pairs.contains(&(from.to_string(), to.to_string())))
    }

    /// Members of the concept's extension at `world`, in declared domain
    /// order.
    pub fn concept_members(&self, concept: &str, world: &str) -> Vec<&str> {
        let Some(members) = self.concept_ext.get(concept).and_then(|m| m.get(world)) else {
            return Vec::new();
        };
        self.domain
            .iter()
            .filter(|d| members.contains(*d))
            .map(String::as_str)
            .collect()
    }

    /// Pairs of the role's extension at `world`, ordered by declared domain
    /// order of the first and then the second component.
    pub fn role_pairs(&self, role: &str, world: &str) -> Vec<(&str, &str)> {
        let Some(pairs) = self.role_ext.get(role).and_then(|m| m.get(world)) else {
            return Vec::new();
        };
        let position: HashMap<&str, usize> =
            self.domain.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
        let mut out: Vec<(&str, &str)> =
            pairs.iter().map(|(from, to)| (from.as_str(), to.as_str())).collect();
        out.sort_by_key(|(from, to)| (position[from], position[to]));
        out
    }

    /// Restriction to a subset of the domain: worlds are unchanged, the
    /// domain keeps exactly the listed individuals (in declared order), and
    /// every extension is intersected pointwise.
    pub fn restrict(&self, keep: &[String]) -> Result<S5Interpretation, ModelError> {
        if keep.is_empty() {
            return Err(ModelError::EmptyRestriction);
        }
        let keep_set: HashSet<&str> = keep.iter().map(String::as_str).collect();
        if let Some(stranger) = keep.iter().find(|d| !self.has_individual(d)) {
            return Err(ModelError::RestrictionOutsideDomain(stranger.clone()));
        }
        let domain: Vec<String> =
            self.domain.iter().filter(|d| keep_set.contains(d.as_str())).cloned().collect();
        let mut concept_ext = HashMap::new();
        for (concept, per_world) in &self.concept_ext {
            let mut restricted = HashMap::new();
            for (world, members) in per_world {
                restricted.insert(
                    world.clone(),
                    members.iter().filter(|d| keep_set.contains(d.as_str())).cloned().collect(),
                );
            }
            concept_ext.insert(concept.clone(), restricted);
        }
        let mut role_ext = HashMap::new();
        for (role, per_world) in &self.role_ext {
            let mut restricted = HashMap::new();
            for (world, pairs) in per_world {
                restricted.insert(
                    world.clone(),
                    pairs
                        .iter()
                        .filter(|(from, to)| {
                            keep_set.contains(from.as_str()) && keep_set.contains(to.as_str())
                        })
                        .cloned()
                        .collect(),
                );
            }
            role_ext.insert(role.clone(), restricted);
        }
        S5Interpretation::from_parts(self.sig.clone(), self.worlds.clone(), domain, concept_ext, role_ext)
    }

    /// Disjoint union over a shared world set: the domains are tagged apart
    /// (`d` becomes `d#l` on the left, `d#r` on the right), extensions are
    /// the unions of the tagged extensions, and no edges cross the two
    /// halves.  Requires identical signatures and identical world lists.
    pub fn disjoint_union_shared_worlds(
        &self,
        other: &S5Interpretation,
    ) -> Result<S5Interpretation, ModelError> {
        self.check_compatible(other)?;
        let tag = |side: &'static str| move |d: &String| format!("{d}#{side}");
        let mut domain: Vec<String> = self.domain.iter().map(tag("l")).collect();
        domain.extend(other.domain.iter().map(tag("r")));

        let mut concept_ext: HashMap<String, HashMap<String, HashSet<String>>> = HashMap::new();
        let mut role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>> =
            HashMap::new();
        for (side, source) in [("l", self), ("r", other)] {
            for (concept, per_world) in &source.concept_ext {
                let entry = concept_ext.entry(concept.clone()).or_default();
                for (world, members) in per_world {
                    entry
                        .entry(world.clone())
                        .or_default()
                        .extend(members.iter().map(tag(side)));
                }
            }
            for (role, per_world) in &source.role_ext {
                let entry = role_ext.entry(role.clone()).or_default();
                for (world, pairs) in per_world {
                    entry.entry(world.clone()).or_default().extend(
                        pairs.iter().map(|(from, to)| {
                            (tag(side)(from), tag(side)(to))
                        }),
                    );
                }
            }
        }
        S5Interpretation::from_parts(
            self.sig.clone(),
            self.worlds.clone(),
            domain,
            concept_ext,
            role_ext,
        )
    }

    /// Extends `self` with `n` fresh copies of itself and `n` fresh copies
    /// of `other`: the original individuals keep their names, the copies are
    /// tagged `d#copyI1…`, `d#copyJ1…`.  No edges connect distinct
    /// components.  Requires identical signatures and world lists.
    pub fn add_copies(
        &self,
        other: &S5Interpretation,
        n: usize,
    ) -> Result<S5Interpretation, ModelError> {
        self.check_compatible(other)?;
        let mut domain = self.domain.clone();
        let mut concept_ext = self.concept_ext.clone();
        let mut role_ext = self.role_ext.clone();
        let mut absorb = |source: &S5Interpretation, tag: String| {
            let rename = |d: &String| format!("{d}#{tag}");
            domain.extend(source.domain.iter().map(rename));
            for (concept, per_world) in &source.concept_ext {
                let entry = concept_ext.entry(concept.clone()).or_default();
                for (world, members) in per_world {
                    entry.entry(world.clone()).or_default().extend(members.iter().map(rename));
                }
            }
            for (role, per_world) in &source.role_ext {
                let entry = role_ext.entry(role.clone()).or_default();
                for (world, pairs) in per_world {
                    entry
                        .entry(world.clone())
                        .or_default()
                        .extend(pairs.iter().map(|(from, to)| (rename(from), rename(to))));
                }
            }
        };
        for k in 1..=n {
            absorb(self, format!("copyI{k}"));
        }
        for k in 1..=n {
            absorb(other, format!("copyJ{k}"));
        }
        S5Interpretation::from_parts(
            self.sig.clone(),
            self.worlds.clone(),
            domain,
            concept_ext,
            role_ext,
        )
    }

    fn check_compatible(&self, other: &S5Interpretation) -> Result<(), ModelError> {
        if self.sig != other.sig {
            return Err(ModelError::SignatureMismatch);
        }
        if self.worlds != other.worlds {
            return Err(ModelError::WorldMismatch);
        }
        Ok(())
    }
}

fn check_identifier_list(names: &[String], what: &str, violations: &mut Vec<String>) {
    let mut seen = HashSet::new();
    for name in names {
        if name.is_empty() {
            violations.push(format!("empty {what} identifier"));
        }
        if !seen.insert(name) {
            violations.push(format!("duplicate {what} `{name}`"));
        }
    }
}

/// Iterates a map with keys in sorted order, for deterministic violation
/// listings.
fn sorted_by_key<K: Ord, V>(map: &HashMap<K, V>) -> Vec<(&K, &V)> {
    let mut entries: Vec<_> = map.iter().collect();
    entries.sort_by(|a, b| a.0.cmp(b.0));
    entries
}

fn sorted<T: Ord>(set: &HashSet<T>) -> Vec<&T> {
    let mut items: Vec<_> = set.iter().collect();
    items.sort();
    items
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_models_validate() {
        let mi = fixtures::fixture_mi();
        assert!(mi.validate().is_empty());
        assert_eq!(mi.worlds(), ["v1", "v2"]);
        assert_eq!(mi.domain(), ["a", "b"]);
        assert!(mi.has_concept("A", "v1", "b"));
        assert!(!mi.has_concept("A", "v2", "b"));
        assert!(mi.has_role("r", "v2", "a", "b"));
        assert_eq!(mi.concept_members("A", "v1"), ["b"]);
        assert_eq!(mi.role_pairs("r", "v2"), [("a", "b")]);
    }

    #[test]
    fn construction_rejects_empty_and_dangling_parts() {
        let sig = Signature::new(["A"], ["r"]).unwrap();
        let err = S5Interpretation::from_parts(
            sig.clone(),
            vec![],
            vec!["a".into()],
            HashMap::new(),
            HashMap::new(),
        )
        .unwrap_err();
        let ModelError::Invalid(violations) = err else { panic!("expected Invalid") };
        assert!(violations.iter().any(|v| v == "worlds empty"), "{violations:?}");

        let mut role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>> =
            HashMap::new();
        role_ext
            .entry("r".into())
            .or_default()
            .entry("w1".into())
            .or_default()
            .insert(("a".into(), "c".into()));
        let err = S5Interpretation::from_parts(
            sig,
            vec!["w1".into()],
            vec!["a".into()],
            HashMap::new(),
            role_ext,
        )
        .unwrap_err();
        let ModelError::Invalid(violations) = err else { panic!("expected Invalid") };
        assert!(
            violations.iter().any(|v| v.contains("unknown individual `c`")),
            "{violations:?}"
        );
    }

    #[test]
    fn missing_extension_entries_are_empty_and_equal_to_explicit_ones() {
        let sig = Signature::new(["A"], ["r"]).unwrap();
        let implicit = S5Interpretation::from_parts(
            sig.clone(),
            vec!["w1".into()],
            vec!["a".into()],
            HashMap::new(),
            HashMap::new(),
        )
        .unwrap();
        let mut concept_ext: HashMap<String, HashMap<String, HashSet<String>>> = HashMap::new();
        concept_ext.entry("A".into()).or_default().insert("w1".into(), HashSet::new());
        let explicit = S5Interpretation::from_parts(
            sig,
            vec!["w1".into()],
            vec!["a".into()],
            concept_ext,
            HashMap::new(),
        )
        .unwrap();
        assert_eq!(implicit, explicit);
    }

    #[test]
    fn restriction_intersects_extensions_pointwise() {
        let mi = fixtures::fixture_mi();
        assert_eq!(mi.restrict(&["a".into(), "b".into()]).unwrap(), mi);
        let only_a = mi.restrict(&["a".into()]).unwrap();
        assert_eq!(only_a.domain(), ["a"]);
        assert!(only_a.concept_members("A", "v1").is_empty());
        assert!(only_a.role_pairs("r", "v2").is_empty());
        assert_eq!(mi.restrict(&[]).unwrap_err(), ModelError::EmptyRestriction);
        assert_eq!(
            mi.restrict(&["z".into()]).unwrap_err(),
            ModelError::RestrictionOutsideDomain("z".into())
        );
        // Restricting twice equals restricting to the intersection.
        let nested = mi.restrict(&["a".into(), "b".into()]).unwrap().restrict(&["b".into()]).unwrap();
        assert_eq!(nested, mi.restrict(&["b".into()]).unwrap());
    }

    #[test]
    fn disjoint_union_tags_both_sides() {
        let mi = fixtures::fixture_mi();
        let both = mi.disjoint_union_shared_worlds(&mi).unwrap();
        assert_eq!(both.domain(), ["a#l", "b#l", "a#r", "b#r"]);
        assert_eq!(both.worlds(), ["v1", "v2"]);
        assert!(both.has_role("r", "v2", "a#l", "b#l"));
        assert!(both.has_role("r", "v2", "a#r", "b#r"));
        assert!(!both.has_role("r", "v2", "a#l", "b#r"));
        assert!(both.has_concept("A", "v1", "b#l") && both.has_concept("A", "v1", "b#r"));
        assert!(both.validate().is_empty());

        let mj = fixtures::fixture_mj();
        assert_eq!(
            mi.disjoint_union_shared_worlds(&mj).unwrap_err(),
            ModelError::WorldMismatch
        );
    }

    #[test]
    fn add_copies_keeps_base_names_and_tags_copies() {
        let mi = fixtures::fixture_mi();
        let zero = mi.add_copies(&mi, 0).unwrap();
        assert_eq!(zero, mi);
        let one = mi.add_copies(&mi, 1).unwrap();
        assert_eq!(one.domain(), ["a", "b", "a#copyI1", "b#copyI1", "a#copyJ1", "b#copyJ1"]);
        assert!(one.has_role("r", "v2", "a#copyJ1", "b#copyJ1"));
        assert!(!one.has_role("r", "v2", "a", "b#copyI1"));
        assert!(one.validate().is_empty());
    }
}
