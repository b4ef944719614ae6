use std::collections::{HashMap, HashSet};

use serde_json::{Map, Value};
use thiserror::Error;

use super::interp::{ModelError, S5Interpretation};
use crate::syntax::{Signature, SignatureError};

/// Errors raised when reading model or relation documents.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    /// The JSON parses but does not have the document shape.
    #[error("malformed document: {0}")]
    Document(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn doc_err(message: impl Into<String>) -> LoadError {
    LoadError::Document(message.into())
}

/// Renders an interpretation as its canonical JSON document: fixed key
/// order, every declared name and world present explicitly, members in
/// declared domain order, no whitespace.  `load` of the result is the
/// identity, and `save` of a loaded canonical document reproduces it byte
/// for byte.
pub fn save(interp: &S5Interpretation) -> String {
    let sig = interp.signature();
    let mut doc = Map::new();

    let mut signature = Map::new();
    signature.insert("concepts".into(), string_list(sig.concepts()));
    signature.insert("roles".into(), string_list(sig.roles()));
    doc.insert("signature".into(), Value::Object(signature));

    doc.insert("worlds".into(), string_list(interp.worlds()));
    doc.insert("domain".into(), string_list(interp.domain()));

    let mut concept_ext = Map::new();
    for concept in sig.concepts() {
        let mut per_world = Map::new();
        for world in interp.worlds() {
            let members: Vec<Value> = interp
                .concept_members(concept, world)
                .into_iter()
                .map(|d| Value::String(d.to_string()))
                .collect();
            per_world.insert(world.clone(), Value::Array(members));
        }
        concept_ext.insert(concept.clone(), Value::Object(per_world));
    }
    doc.insert("concept_ext".into(), Value::Object(concept_ext));

    let mut role_ext = Map::new();
    for role in sig.roles() {
        let mut per_world = Map::new();
        for world in interp.worlds() {
            let pairs: Vec<Value> = interp
                .role_pairs(role, world)
                .into_iter()
                .map(|(from, to)| {
                    Value::Array(vec![
                        Value::String(from.to_string()),
                        Value::String(to.to_string()),
                    ])
                })
                .collect();
            per_world.insert(world.clone(), Value::Array(pairs));
        }
        role_ext.insert(role.clone(), Value::Object(per_world));
    }
    doc.insert("role_ext".into(), Value::Object(role_ext));

    Value::Object(doc).to_string()
}

/// Parses a model document.  The shape is strict — unknown keys anywhere are
/// errors — but extension maps are lenient: a missing concept, role, or
/// world entry means an empty extension.  The resulting interpretation is
/// fully validated.
pub fn load(text: &str) -> Result<S5Interpretation, LoadError> {
    let value: Value = serde_json::from_str(text)?;
    let doc = as_object(&value, "document")?;
    check_keys(doc, &["signature", "worlds", "domain", "concept_ext", "role_ext"], "document")?;

    let sig_value = require(doc, "signature", "document")?;
    let sig_obj = as_object(sig_value, "\"signature\"")?;
    check_keys(sig_obj, &["concepts", "roles"], "\"signature\"")?;
    let concepts = string_vec(require(sig_obj, "concepts", "\"signature\"")?, "\"concepts\"")?;
    let roles = string_vec(require(sig_obj, "roles", "\"signature\"")?, "\"roles\"")?;
    let sig = Signature::new(concepts, roles)?;

    let worlds = string_vec(require(doc, "worlds", "document")?, "\"worlds\"")?;
    let domain = string_vec(require(doc, "domain", "document")?, "\"domain\"")?;

    let mut concept_ext: HashMap<String, HashMap<String, HashSet<String>>> = HashMap::new();
    let concept_ext_obj = as_object(require(doc, "concept_ext", "document")?, "\"concept_ext\"")?;
    for (concept, per_world) in concept_ext_obj {
        let per_world_obj =
            as_object(per_world, &format!("extension of concept `{concept}`"))?;
        let mut worlds_map = HashMap::new();
        for (world, members) in per_world_obj {
            let members = string_vec(members, &format!("`{concept}` at `{world}`"))?;
            worlds_map.insert(world.clone(), members.into_iter().collect());
        }
        concept_ext.insert(concept.clone(), worlds_map);
    }

    let mut role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>> = HashMap::new();
    let role_ext_obj = as_object(require(doc, "role_ext", "document")?, "\"role_ext\"")?;
    for (role, per_world) in role_ext_obj {
        let per_world_obj = as_object(per_world, &format!("extension of role `{role}`"))?;
        let mut worlds_map = HashMap::new();
        for (world, pairs) in per_world_obj {
            let context = format!("`{role}` at `{world}`");
            let pairs_array = as_array(pairs, &context)?;
            let mut set = HashSet::new();
            for pair in pairs_array {
                let ends = string_vec(pair, &context)?;
                let [from, to]: [String; 2] = ends
                    .try_into()
                    .map_err(|_| doc_err(format!("{context}: each pair must have two members")))?;
                set.insert((from, to));
            }
            worlds_map.insert(world.clone(), set);
        }
        role_ext.insert(role.clone(), worlds_map);
    }

    Ok(S5Interpretation::from_parts(sig, worlds, domain, concept_ext, role_ext)?)
}

/// One candidate-relation entry: a point of the left interpretation paired
/// with a point of the right, each as `(world, individual)`.
pub type PointPair = ((String, String), (String, String));

/// Renders a candidate relation as its canonical JSON document: an array of
/// `[[world,individual],[world,individual]]` pairs in the given order.
pub fn save_relation(pairs: &[PointPair]) -> String {
    let entries: Vec<Value> = pairs
        .iter()
        .map(|((w, d), (v, e))| {
            Value::Array(vec![
                Value::Array(vec![Value::String(w.clone()), Value::String(d.clone())]),
                Value::Array(vec![Value::String(v.clone()), Value::String(e.clone())]),
            ])
        })
        .collect();
    Value::Array(entries).to_string()
}

/// Parses a candidate relation document (see [`save_relation`]); membership
/// in the two interpretations is checked later by the relation checker.
pub fn load_relation(text: &str) -> Result<Vec<PointPair>, LoadError> {
    let value: Value = serde_json::from_str(text)?;
    let entries = as_array(&value, "relation document")?;
    let mut pairs = Vec::new();
    for entry in entries {
        let sides = as_array(entry, "relation entry")?;
        if sides.len() != 2 {
            return Err(doc_err("each relation entry must pair two points"));
        }
        let mut points = Vec::new();
        for side in sides {
            let point = string_vec(side, "relation point")?;
            let [world, ind]: [String; 2] = point.try_into().map_err(|_| {
                doc_err("each relation point must be a [world, individual] pair")
            })?;
            points.push((world, ind));
        }
        let right = points.pop().expect("two points");
        let left = points.pop().expect("two points");
        pairs.push((left, right));
    }
    Ok(pairs)
}

fn as_object<'v>(value: &'v Value, what: &str) -> Result<&'v Map<String, Value>, LoadError> {
    value.as_object().ok_or_else(|| doc_err(format!("{what} must be a JSON object")))
}

fn as_array<'v>(value: &'v Value, what: &str) -> Result<&'v Vec<Value>, LoadError> {
    value.as_array().ok_or_else(|| doc_err(format!("{what} must be a JSON array")))
}

fn require<'v>(
    map: &'v Map<String, Value>,
    key: &str,
    what: &str,
) -> Result<&'v Value, LoadError> {
    map.get(key).ok_or_else(|| doc_err(format!("{what} is missing the \"{key}\" key")))
}

fn check_keys(map: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<(), LoadError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(doc_err(format!("{what} has unknown key \"{key}\"")));
        }
    }
    Ok(())
}

fn string_vec(value: &Value, what: &str) -> Result<Vec<String>, LoadError> {
    let array = as_array(value, what)?;
    array
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| doc_err(format!("{what} must contain only strings")))
        })
        .collect()
}

fn string_list(names: &[String]) -> Value {
    Value::Array(names.iter().map(|n| Value::String(n.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn canonical_documents_round_trip_byte_for_byte() {
        for doc in [fixtures::MI_JSON, fixtures::MJ_JSON] {
            let interp = load(doc).unwrap();
            assert_eq!(save(&interp), doc.trim_end());
        }
    }

    #[test]
    fn loaded_fixture_matches_expected_extensions() {
        let mi = load(fixtures::MI_JSON).unwrap();
        assert_eq!(mi.worlds(), ["v1", "v2"]);
        assert_eq!(mi.concept_members("A", "v1"), ["b"]);
        assert!(mi.concept_members("A", "v2").is_empty());
        assert_eq!(mi.role_pairs("r", "v2"), [("a", "b")]);
        assert!(mi.role_pairs("r", "v1").is_empty());
    }

    #[test]
    fn missing_world_entries_mean_empty_extensions() {
        let sparse = r#"{"signature":{"concepts":["A"],"roles":["r"]},"worlds":["v1","v2"],"domain":["a","b"],"concept_ext":{"A":{"v1":["b"]}},"role_ext":{}}"#;
        let full = load(fixtures::MI_JSON).unwrap();
        let loaded = load(sparse).unwrap();
        assert_ne!(loaded, full, "the sparse document has no role pairs at all");
        assert_eq!(loaded.concept_members("A", "v1"), ["b"]);
        assert!(loaded.role_pairs("r", "v2").is_empty());
        // Saving normalizes to the fully explicit document.
        let resaved = save(&loaded);
        assert!(resaved.contains(r#""r":{"v1":[],"v2":[]}"#), "{resaved}");
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(matches!(load("not json"), Err(LoadError::Json(_))));
        let missing_domain = r#"{"signature":{"concepts":[],"roles":[]},"worlds":["w"],"concept_ext":{},"role_ext":{}}"#;
        let err = load(missing_domain).unwrap_err();
        assert!(err.to_string().contains("missing the \"domain\" key"), "{err}");
        let unknown_key = r#"{"signature":{"concepts":[],"roles":[]},"worlds":["w"],"domain":["d"],"concept_ext":{},"role_ext":{},"extra":1}"#;
        let err = load(unknown_key).unwrap_err();
        assert!(err.to_string().contains("unknown key \"extra\""), "{err}");
        let dangling = r#"{"signature":{"concepts":["A"],"roles":[]},"worlds":["w"],"domain":["d"],"concept_ext":{"A":{"w":["z"]}},"role_ext":{}}"#;
        let err = load(dangling).unwrap_err();
        assert!(err.to_string().contains("unknown individual `z`"), "{err}");
    }

    #[test]
    fn relation_documents_round_trip() {
        let pairs = load_relation(fixtures::R_JSON).unwrap();
        assert_eq!(pairs.len(), 6);
        assert_eq!(pairs[0], (("v1".into(), "a".into()), ("w1".into(), "a".into())));
        assert_eq!(save_relation(&pairs), fixtures::R_JSON.trim_end());
        assert!(load_relation("[[[\"v1\",\"a\"]]]").is_err());
    }
}
