use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::interp::{ModelError, S5Interpretation};

/// A depth-bounded tree unravelling.
///
/// Nodes are the role paths out of the start individual, named by joining
/// their entries with `/` (the path `a, b` becomes the individual `a/b`).
/// Concept membership of a node is that of its last entry; a role edge
/// connects a path to its one-step extensions, at exactly the worlds where
/// the original edge exists.
#[derive(Debug, Clone)]
pub struct Unravelling {
    pub interpretation: S5Interpretation,
    /// Node id → the path of original individuals it stands for.
    pub node_paths: BTreeMap<String, Vec<String>>,
    /// True iff the depth limit cut off at least one longer path, in which
    /// case the unravelling is not bisimilar to the original via the
    /// last-entry projection.
    pub truncated: bool,
}

/// A partial unravelling: tree-unravelled out to the given radius, finite by
/// grafting.
///
/// Paths of length `radius+1` are not kept as tree nodes; the edges that
/// would reach them are redirected to a single fresh copy of the original
/// interpretation (individual `x` of the copy is named `x#copy`).  The
/// projection `rho` — last entry for tree nodes, the original for copy
/// elements — always induces a bisimulation back to the original model.
#[derive(Debug, Clone)]
pub struct PartialUnravelling {
    pub interpretation: S5Interpretation,
    /// New individual → the original individual it projects to.
    pub rho: BTreeMap<String, String>,
    /// Id of the root node (the one-entry path at the start individual).
    pub root: String,
}

/// `d` → the individuals reachable from `d` by some role at some world, in
/// declared domain order.
fn direct_successors(interp: &S5Interpretation) -> HashMap<String, Vec<String>> {
    let mut reachable: HashMap<String, HashSet<String>> = HashMap::new();
    for role in interp.signature().roles() {
        for world in interp.worlds() {
            for (from, to) in interp.role_pairs(role, world) {
                reachable.entry(from.to_string()).or_default().insert(to.to_string());
            }
        }
    }
    interp
        .domain()
        .iter()
        .map(|d| {
            let set = reachable.get(d);
            let ordered: Vec<String> = interp
                .domain()
                .iter()
                .filter(|e| set.is_some_and(|s| s.contains(*e)))
                .cloned()
                .collect();
            (d.clone(), ordered)
        })
        .collect()
}

fn path_id(path: &[String]) -> String {
    path.join("/")
}

/// Breadth-first enumeration of the role paths out of `d0` with at most
/// `max_len` entries; also reports whether longer paths were cut off.
fn collect_paths(
    interp: &S5Interpretation,
    d0: &str,
    max_len: usize,
) -> (Vec<Vec<String>>, bool) {
    let successors = direct_successors(interp);
    let mut paths: Vec<Vec<String>> = Vec::new();
    let mut truncated = false;
    let mut queue = VecDeque::from([vec![d0.to_string()]]);
    while let Some(path) = queue.pop_front() {
        let last = path.last().expect("paths are nonempty").clone();
        let extensions = &successors[&last];
        if path.len() == max_len && !extensions.is_empty() {
            truncated = true;
        }
        if path.len() < max_len {
            for next in extensions {
                let mut longer = path.clone();
                longer.push(next.clone());
                queue.push_back(longer);
            }
        }
        paths.push(path);
    }
    (paths, truncated)
}

/// Unravels `interp` from `d0` into a tree of role paths, keeping paths of
/// at most `depth_limit+1` entries.
pub fn tree_unravelling(
    interp: &S5Interpretation,
    d0: &str,
    depth_limit: usize,
) -> Result<Unravelling, ModelError> {
    interp.check_individual(d0)?;
    let (paths, truncated) = collect_paths(interp, d0, depth_limit + 1);
    let ids: Vec<String> = paths.iter().map(|p| path_id(p)).collect();
    let included: HashSet<&str> = ids.iter().map(String::as_str).collect();

    let mut concept_ext: HashMap<String, HashMap<String, HashSet<String>>> = HashMap::new();
    for concept in interp.signature().concepts() {
        let entry = concept_ext.entry(concept.clone()).or_default();
        for world in interp.worlds() {
            let members = entry.entry(world.clone()).or_default();
            for (path, id) in paths.iter().zip(&ids) {
                let last = path.last().expect("paths are nonempty");
                if interp.has_concept(concept, world, last) {
                    members.insert(id.clone());
                }
            }
        }
    }
    let mut role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>> = HashMap::new();
    for role in interp.signature().roles() {
        let entry = role_ext.entry(role.clone()).or_default();
        for world in interp.worlds() {
            let pairs = entry.entry(world.clone()).or_default();
            for (path, id) in paths.iter().zip(&ids) {
                let last = path.last().expect("paths are nonempty");
                for (from, to) in interp.role_pairs(role, world) {
                    if from == last {
                        let child = format!("{id}/{to}");
                        if included.contains(child.as_str()) {
                            pairs.insert((id.clone(), child));
                        }
                    }
                }
            }
        }
    }

    let interpretation = S5Interpretation::from_parts(
        interp.signature().clone(),
        interp.worlds().to_vec(),
        ids.clone(),
        concept_ext,
        role_ext,
    )?;
    let node_paths = ids.into_iter().zip(paths).collect();
    Ok(Unravelling { interpretation, node_paths, truncated })
}

/// Partially unravels `interp` from `d0`: tree nodes out to depth `radius`,
/// with the edges that would leave the tree grafted onto one fresh copy of
/// the whole interpretation.
pub fn partial_unravelling(
    interp: &S5Interpretation,
    d0: &str,
    radius: usize,
) -> Result<PartialUnravelling, ModelError> {
    interp.check_individual(d0)?;
    // Tree nodes are the paths out to depth `radius`; one-step extensions of
    // the deepest ones are not materialized but grafted onto the copy below.
    let (interior, _) = collect_paths(interp, d0, radius + 1);
    let interior_ids: Vec<String> = interior.iter().map(|p| path_id(p)).collect();
    let copy = |d: &str| format!("{d}#copy");

    let mut domain = interior_ids.clone();
    domain.extend(interp.domain().iter().map(|d| copy(d)));

    let mut rho = BTreeMap::new();
    for (path, id) in interior.iter().zip(&interior_ids) {
        rho.insert(id.clone(), path.last().expect("paths are nonempty").clone());
    }
    for d in interp.domain() {
        rho.insert(copy(d), d.clone());
    }

    let mut concept_ext: HashMap<String, HashMap<String, HashSet<String>>> = HashMap::new();
    for concept in interp.signature().concepts() {
        let entry = concept_ext.entry(concept.clone()).or_default();
        for world in interp.worlds() {
            let members = entry.entry(world.clone()).or_default();
            for (node, original) in &rho {
                if interp.has_concept(concept, world, original) {
                    members.insert(node.clone());
                }
            }
        }
    }

    let interior_set: HashSet<&str> = interior_ids.iter().map(String::as_str).collect();
    let mut role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>> = HashMap::new();
    for role in interp.signature().roles() {
        let entry = role_ext.entry(role.clone()).or_default();
        for world in interp.worlds() {
            let pairs = entry.entry(world.clone()).or_default();
            // Tree edges, grafted to the copy when they would leave the tree.
            for (path, id) in interior.iter().zip(&interior_ids) {
                let last = path.last().expect("paths are nonempty");
                for (from, to) in interp.role_pairs(role, world) {
                    if from == last {
                        let child = format!("{id}/{to}");
                        if interior_set.contains(child.as_str()) {
                            pairs.insert((id.clone(), child));
                        } else {
                            pairs.insert((id.clone(), copy(to)));
                        }
                    }
                }
            }
            // The copy carries the original edge structure unchanged.
            for (from, to) in interp.role_pairs(role, world) {
                pairs.insert((copy(from), copy(to)));
            }
        }
    }

    let interpretation = S5Interpretation::from_parts(
        interp.signature().clone(),
        interp.worlds().to_vec(),
        domain,
        concept_ext,
        role_ext,
    )?;
    Ok(PartialUnravelling { interpretation, rho, root: path_id(&[d0.to_string()]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::load;

    #[test]
    fn unravelling_of_the_bundled_model_is_a_two_node_tree() {
        let mi = fixtures::fixture_mi();
        let unravelled = tree_unravelling(&mi, "a", 2).unwrap();
        let interp = &unravelled.interpretation;
        assert_eq!(interp.domain(), ["a", "a/b"]);
        assert_eq!(interp.worlds(), ["v1", "v2"]);
        assert_eq!(interp.role_pairs("r", "v2"), [("a", "a/b")]);
        assert!(interp.role_pairs("r", "v1").is_empty());
        assert!(interp.has_concept("A", "v1", "a/b"));
        assert!(!interp.has_concept("A", "v2", "a/b"));
        assert!(!unravelled.truncated);
        assert_eq!(unravelled.node_paths["a/b"], ["a", "b"]);
    }

    #[test]
    fn unravelling_from_a_sink_is_a_single_node() {
        let mi = fixtures::fixture_mi();
        let unravelled = tree_unravelling(&mi, "b", 5).unwrap();
        assert_eq!(unravelled.interpretation.domain(), ["b"]);
        assert!(!unravelled.truncated);
    }

    #[test]
    fn cycles_are_cut_at_the_depth_limit_and_reported() {
        let doc = r#"{"signature":{"concepts":[],"roles":["r"]},"worlds":["w"],"domain":["a"],"concept_ext":{},"role_ext":{"r":{"w":[["a","a"]]}}}"#;
        let loop_model = load(doc).unwrap();
        let unravelled = tree_unravelling(&loop_model, "a", 2).unwrap();
        assert_eq!(unravelled.interpretation.domain(), ["a", "a/a", "a/a/a"]);
        assert!(unravelled.truncated);
        assert_eq!(
            unravelled.interpretation.role_pairs("r", "w"),
            [("a", "a/a"), ("a/a", "a/a/a")]
        );
    }

    #[test]
    fn partial_unravelling_grafts_leaf_edges_onto_the_copy() {
        let doc = r#"{"signature":{"concepts":[],"roles":["r"]},"worlds":["w"],"domain":["a"],"concept_ext":{},"role_ext":{"r":{"w":[["a","a"]]}}}"#;
        let loop_model = load(doc).unwrap();
        let partial = partial_unravelling(&loop_model, "a", 1).unwrap();
        let interp = &partial.interpretation;
        // Tree nodes a, a/a; the edge out of a/a lands on the copy.
        assert_eq!(interp.domain(), ["a", "a/a", "a#copy"]);
        assert_eq!(
            interp.role_pairs("r", "w"),
            [("a", "a/a"), ("a/a", "a#copy"), ("a#copy", "a#copy")]
        );
        assert_eq!(partial.root, "a");
        assert_eq!(partial.rho["a/a"], "a");
        assert_eq!(partial.rho["a#copy"], "a");
    }

    #[test]
    fn partial_unravelling_of_a_role_free_model_keeps_the_copy() {
        let doc = r#"{"signature":{"concepts":["A"],"roles":[]},"worlds":["w"],"domain":["a"],"concept_ext":{"A":{"w":["a"]}},"role_ext":{}}"#;
        let single = load(doc).unwrap();
        let partial = partial_unravelling(&single, "a", 3).unwrap();
        assert_eq!(partial.interpretation.domain(), ["a", "a#copy"]);
        assert!(partial.interpretation.has_concept("A", "w", "a"));
        assert!(partial.interpretation.has_concept("A", "w", "a#copy"));
    }
}
