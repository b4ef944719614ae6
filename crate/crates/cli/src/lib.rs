//! Support library for the `mdlwb` binary: exit-code policy, argument
//! parsing helpers, report plumbing, and the seeded verification suites
//! behind `mdlwb verify`.
//!
//! Everything here is deterministic: given the same arguments (and the same
//! `--seed` for the randomized suites), reports come out byte-identical.

pub mod suites;

use std::collections::BTreeMap;
use std::fmt;

use mdlwb_core::games::GamesError;
use mdlwb_core::model::{self, ClassSpec, LoadError, ModelError, PointPair, S5Interpretation};
use mdlwb_core::normalform::NormalFormError;
use mdlwb_core::semantics::{Equivalence, SemanticsError, Valuation};
use mdlwb_core::syntax::{ParseError, Signature, SignatureError, TranslateError};
use mdlwb_core::fixtures;
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

/// Exit status when the answer to the question asked is "yes" (or the
/// command has no yes/no answer).
pub const EXIT_TRUE: i32 = 0;
/// Exit status when the answer is "no": a false check, a violated relation,
/// a counterexample, a failed suite.
pub const EXIT_FALSE: i32 = 1;
/// Exit status for unusable input: bad flags, unreadable files, parse errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for well-formed input the logic rejects: unknown worlds or
/// individuals, signature mismatches, exceeded caps.
pub const EXIT_SEMANTIC: i32 = 3;

/// Default ceiling on enumerated or explored state counts, overridable via
/// the `MDLWB_MAX_STATES` environment variable and bypassed by `--force`.
pub const DEFAULT_MAX_STATES: u128 = 1_000_000;

/// A failure already classified by the exit status it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Input that could not be used at all: exits [`EXIT_USAGE`].
    Usage(String),
    /// Input that parsed but was rejected by the logic: exits
    /// [`EXIT_SEMANTIC`].
    Semantic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Semantic(_) => EXIT_SEMANTIC,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Semantic(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SignatureError> for CliError {
    fn from(e: SignatureError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

impl From<SemanticsError> for CliError {
    fn from(e: SemanticsError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

impl From<GamesError> for CliError {
    fn from(e: GamesError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

impl From<NormalFormError> for CliError {
    fn from(e: NormalFormError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

impl From<TranslateError> for CliError {
    fn from(e: TranslateError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

/// Reads a model argument: the path of a JSON file, or — when no such file
/// exists — one of the bundled names `MI.json` / `MJ.json` (any directory
/// prefix is ignored for the bundled lookup).
pub fn load_model_arg(arg: &str) -> Result<S5Interpretation, CliError> {
    match std::fs::read_to_string(arg) {
        Ok(text) => {
            model::load(&text).map_err(|e| CliError::Usage(format!("{arg}: {e}")))
        }
        Err(io) if io.kind() == std::io::ErrorKind::NotFound => match basename(arg) {
            "MI.json" => Ok(fixtures::fixture_mi()),
            "MJ.json" => Ok(fixtures::fixture_mj()),
            _ => Err(CliError::Usage(format!("{arg}: {io}"))),
        },
        Err(io) => Err(CliError::Usage(format!("{arg}: {io}"))),
    }
}

/// Reads a relation argument the same way [`load_model_arg`] reads models;
/// the bundled name is `R.json`.
pub fn load_relation_arg(arg: &str) -> Result<Vec<PointPair>, CliError> {
    match std::fs::read_to_string(arg) {
        Ok(text) => {
            model::load_relation(&text).map_err(|e| CliError::Usage(format!("{arg}: {e}")))
        }
        Err(io) if io.kind() == std::io::ErrorKind::NotFound => match basename(arg) {
            "R.json" => Ok(fixtures::fixture_relation()),
            _ => Err(CliError::Usage(format!("{arg}: {io}"))),
        },
        Err(io) => Err(CliError::Usage(format!("{arg}: {io}"))),
    }
}

fn basename(path: &str) -> &str {
    path.rsplit(['/', '\\']).next().unwrap_or(path)
}

/// Splits a comma-separated name list; surrounding whitespace is dropped,
/// empty entries are ignored (so `--roles ""` declares no roles).
pub fn parse_name_list(arg: &str) -> Vec<String> {
    arg.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Builds a signature from the `--concepts` / `--roles` flag values.
pub fn signature_from_flags(concepts: &str, roles: &str) -> Result<Signature, CliError> {
    Ok(Signature::new(parse_name_list(concepts), parse_name_list(roles))?)
}

/// Builds the enumeration class from its four flag values.
pub fn class_from_flags(
    concepts: &str,
    roles: &str,
    max_worlds: usize,
    max_domain: usize,
) -> Result<ClassSpec, CliError> {
    let sig = signature_from_flags(concepts, roles)?;
    ClassSpec::new(sig, max_worlds, max_domain).map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses a `world,individual` point argument.
pub fn parse_point(arg: &str) -> Result<(String, String), CliError> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [w, d] if !w.is_empty() && !d.is_empty() => Ok((w.to_string(), d.to_string())),
        _ => Err(CliError::Usage(format!(
            "expected a point of the form `world,individual`, found `{arg}`"
        ))),
    }
}

/// Parses a `world,d1[,d2…]` pointed-tuple argument (ef games take tuples).
pub fn parse_pointed_tuple(arg: &str) -> Result<(String, Vec<String>), CliError> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!(
            "expected `world,individual[,individual…]`, found `{arg}`"
        )));
    }
    Ok((parts[0].to_string(), parts[1..].iter().map(|s| s.to_string()).collect()))
}

/// Parses one `var=individual` binding of `--bind`.
pub fn parse_binding(arg: &str) -> Result<(String, String), CliError> {
    match arg.split_once('=') {
        Some((var, value)) if !var.trim().is_empty() && !value.trim().is_empty() => {
            Ok((var.trim().to_string(), value.trim().to_string()))
        }
        _ => Err(CliError::Usage(format!(
            "expected a binding of the form `var=individual`, found `{arg}`"
        ))),
    }
}

/// The state ceiling currently in force: `MDLWB_MAX_STATES` when set (and a
/// valid integer), [`DEFAULT_MAX_STATES`] otherwise.
pub fn max_states() -> Result<u128, CliError> {
    match std::env::var("MDLWB_MAX_STATES") {
        Ok(text) => text.trim().parse::<u128>().map_err(|_| {
            CliError::Usage(format!(
                "MDLWB_MAX_STATES must be a nonnegative integer, found `{text}`"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_STATES),
        Err(e) => Err(CliError::Usage(format!("MDLWB_MAX_STATES: {e}"))),
    }
}

/// Refuses counts above the state ceiling unless `force` is set.  `label`
/// names the quantity in the refusal message.
pub fn guard_states(label: &str, count: &BigUint, force: bool) -> Result<(), CliError> {
    if force {
        return Ok(());
    }
    let cap = max_states()?;
    match u128::try_from(count) {
        Ok(n) if n <= cap => Ok(()),
        _ => Err(CliError::Semantic(format!(
            "{label} needs {count} states, above the cap of {cap}; \
             rerun with --force or raise MDLWB_MAX_STATES"
        ))),
    }
}

/// A model as a JSON document, in the same shape `save`/`load` use.
pub fn model_doc(m: &S5Interpretation) -> Value {
    serde_json::from_str(&model::save(m)).expect("saved models are valid JSON")
}

/// A valuation as a JSON object (variables in sorted order).
pub fn valuation_doc(eta: &Valuation) -> Value {
    let mut map = Map::new();
    for (var, value) in eta {
        map.insert(var.clone(), Value::String(value.clone()));
    }
    Value::Object(map)
}

/// An equivalence verdict as a pair of report fields: a `verdict` string and
/// a `counterexample` document (`null` when equivalent).
pub fn equivalence_doc(e: &Equivalence) -> (Value, Value) {
    match e {
        Equivalence::Equal => (json!("equivalent"), Value::Null),
        Equivalence::Counterexample(c) => (
            json!("counterexample"),
            json!({
                "model_index": c.model_index,
                "model": model_doc(&c.model),
                "world": c.world,
                "valuation": valuation_doc(&c.valuation),
                "lhs_holds": c.lhs_holds,
            }),
        ),
    }
}

/// The class a command ran over, as a report field.
pub fn class_doc(class: &ClassSpec) -> Value {
    json!({
        "concepts": class.signature().concepts(),
        "roles": class.signature().roles(),
        "max_worlds": class.max_worlds(),
        "max_domain": class.max_domain(),
    })
}

/// Renders a report as indented `key: value` text for `--human`.
pub fn human_text(value: &Value) -> String {
    let mut out = String::new();
    human_into(&mut out, value, 0);
    out
}

fn human_into(out: &mut String, value: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, item) in map {
                match scalar_text(item) {
                    Some(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        human_into(out, item, indent + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar_text(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        human_into(out, item, indent + 1);
                    }
                }
            }
        }
        other => {
            let s = scalar_text(other).unwrap_or_default();
            out.push_str(&format!("{pad}{s}\n"));
        }
    }
}

fn scalar_text(value: &Value) -> Option<String> {
    match value {
        Value::Null => Some("null".to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| matches!(i, Value::String(_))) => {
            let words: Vec<&str> = items.iter().filter_map(Value::as_str).collect();
            Some(format!("[{}]", words.join(", ")))
        }
        _ => None,
    }
}

/// Builds a valuation from `--bind` arguments.
pub fn valuation_from_bindings(bindings: &[String]) -> Result<Valuation, CliError> {
    let mut eta: BTreeMap<String, String> = BTreeMap::new();
    for binding in bindings {
        let (var, value) = parse_binding(binding)?;
        eta.insert(var, value);
    }
    Ok(eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_arguments_fall_back_to_the_bundled_fixtures() {
        let mi = load_model_arg("MI.json").unwrap();
        assert_eq!(mi.worlds(), ["v1", "v2"]);
        let mj = load_model_arg("some/dir/MJ.json").unwrap();
        assert_eq!(mj.worlds(), ["w1", "w2", "w3"]);
        let rel = load_relation_arg("R.json").unwrap();
        assert_eq!(rel.len(), 6);
        let missing = load_model_arg("nothing-here.json");
        assert!(matches!(missing, Err(CliError::Usage(_))));
    }

    #[test]
    fn point_and_binding_arguments_parse_strictly() {
        assert_eq!(parse_point("v1,a").unwrap(), ("v1".to_string(), "a".to_string()));
        assert!(parse_point("v1").is_err());
        assert!(parse_point("v1,a,b").is_err());
        let (w, tuple) = parse_pointed_tuple("v1, a, b").unwrap();
        assert_eq!((w.as_str(), tuple.len()), ("v1", 2));
        assert!(parse_pointed_tuple("v1").is_err());
        assert_eq!(parse_binding("x=a").unwrap(), ("x".to_string(), "a".to_string()));
        assert!(parse_binding("x").is_err());
    }

    #[test]
    fn the_state_guard_reads_the_environment_cap() {
        // The suite does not set MDLWB_MAX_STATES, so the default applies.
        guard_states("test", &BigUint::from(10u32), false).unwrap();
        let blocked = guard_states("test", &BigUint::from(2_000_000u64), false);
        assert!(matches!(blocked, Err(CliError::Semantic(_))));
        guard_states("test", &BigUint::from(2_000_000u64), true).unwrap();
    }

    #[test]
    fn human_rendering_indents_nested_documents() {
        let report = serde_json::json!({
            "command": "demo",
            "result": true,
            "inner": {"count": 2, "names": ["a", "b"]},
        });
        let text = human_text(&report);
        assert_eq!(text, "command: demo\nresult: true\ninner:\n  count: 2\n  names: [a, b]\n");
    }
}
