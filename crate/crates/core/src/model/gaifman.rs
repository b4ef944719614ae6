use std::collections::{HashMap, VecDeque};

use super::interp::{ModelError, S5Interpretation};

/// The Gaifman graph of an interpretation and its distance metric.
///
/// Two distinct individuals are adjacent iff some role relates them (in
/// either direction) at some world; world changes contribute nothing.
/// Distances are shortest-path lengths in that undirected graph, `None`
/// standing for unreachable.
#[derive(Debug, Clone)]
pub struct GaifmanData {
    inds: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<bool>>,
    distance: Vec<Vec<Option<usize>>>,
}

impl GaifmanData {
    /// Builds the graph and all pairwise distances (breadth-first search
    /// from every individual).
    pub fn new(interp: &S5Interpretation) -> Self {
        let inds: Vec<String> = interp.domain().to_vec();
        let index: HashMap<String, usize> =
            inds.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        let n = inds.len();
        let mut adjacency = vec![vec![false; n]; n];
        for role in interp.signature().roles() {
            for world in interp.worlds() {
                for (from, to) in interp.role_pairs(role, world) {
                    if from != to {
                        let (f, t) = (index[from], index[to]);
                        adjacency[f][t] = true;
                        adjacency[t][f] = true;
                    }
                }
            }
        }
        let mut distance = vec![vec![None; n]; n];
        for (start, row) in distance.iter_mut().enumerate() {
            row[start] = Some(0);
            let mut queue = VecDeque::from([start]);
            while let Some(node) = queue.pop_front() {
                let next = row[node].expect("reached nodes have a distance") + 1;
                for (other, adjacent) in adjacency[node].iter().enumerate() {
                    if *adjacent && row[other].is_none() {
                        row[other] = Some(next);
                        queue.push_back(other);
                    }
                }
            }
        }
        GaifmanData { inds, index, adjacency, distance }
    }

    /// The individuals the graph is over, in declared domain order.
    pub fn individuals(&self) -> &[String] {
        &self.inds
    }

    pub fn adjacent(&self, d: &str, e: &str) -> Result<bool, ModelError> {
        Ok(self.adjacency[self.index_of(d)?][self.index_of(e)?])
    }

    /// Graph distance; `None` means the two individuals are not connected.
    pub fn distance(&self, d: &str, e: &str) -> Result<Option<usize>, ModelError> {
        Ok(self.distance[self.index_of(d)?][self.index_of(e)?])
    }

    /// True iff the graph is acyclic (counting each undirected edge once).
    pub fn is_forest(&self) -> bool {
        let n = self.inds.len();
        let mut edges = 0usize;
        for d in 0..n {
            for e in d + 1..n {
                if self.adjacency[d][e] {
                    edges += 1;
                }
            }
        }
        let mut components = 0usize;
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(node) = stack.pop() {
                for (other, adjacent) in self.adjacency[node].iter().enumerate() {
                    if *adjacent && !seen[other] {
                        seen[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
        // A forest has exactly |V| − #components edges; any extra edge closes
        // a cycle.
        edges == n - components
    }

    fn index_of(&self, d: &str) -> Result<usize, ModelError> {
        self.index.get(d).copied().ok_or_else(|| ModelError::UnknownIndividual(d.to_string()))
    }
}

/// Builds the Gaifman data of an interpretation.
pub fn gaifman(interp: &S5Interpretation) -> GaifmanData {
    GaifmanData::new(interp)
}

/// The radius-`radius` neighborhood of a tuple: every individual whose
/// Gaifman distance to some tuple entry is at most `radius`, in declared
/// domain order.  The tuple must be nonempty and within the domain.
pub fn neighborhood(
    interp: &S5Interpretation,
    tuple: &[String],
    radius: usize,
) -> Result<Vec<String>, ModelError> {
    if tuple.is_empty() {
        return Err(ModelError::EmptyRestriction);
    }
    for d in tuple {
        interp.check_individual(d)?;
    }
    let data = GaifmanData::new(interp);
    let mut members = Vec::new();
    for e in interp.domain() {
        let reachable = tuple.iter().any(|d| {
            data.distance(d, e)
                .expect("tuple and domain members are declared")
                .is_some_and(|dist| dist <= radius)
        });
        if reachable {
            members.push(e.clone());
        }
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::load;

    #[test]
    fn edges_come_from_roles_at_any_world() {
        let mi = fixtures::fixture_mi();
        let data = gaifman(&mi);
        assert!(data.adjacent("a", "b").unwrap(), "edge via the role pair at v2");
        assert_eq!(data.distance("a", "b").unwrap(), Some(1));
        assert_eq!(data.distance("a", "a").unwrap(), Some(0));
    }

    #[test]
    fn role_free_models_have_no_edges() {
        let doc = r#"{"signature":{"concepts":["A"],"roles":["r"]},"worlds":["w"],"domain":["a","b"],"concept_ext":{},"role_ext":{}}"#;
        let interp = load(doc).unwrap();
        let data = gaifman(&interp);
        assert!(!data.adjacent("a", "b").unwrap());
        assert_eq!(data.distance("a", "b").unwrap(), None);
        assert!(data.is_forest());
    }

    #[test]
    fn self_loops_do_not_create_edges() {
        let doc = r#"{"signature":{"concepts":[],"roles":["r"]},"worlds":["w"],"domain":["a"],"concept_ext":{},"role_ext":{"r":{"w":[["a","a"]]}}}"#;
        let interp = load(doc).unwrap();
        assert!(!gaifman(&interp).adjacent("a", "a").unwrap());
    }

    #[test]
    fn triangles_are_not_forests() {
        let doc = r#"{"signature":{"concepts":[],"roles":["r"]},"worlds":["w"],"domain":["a","b","c"],"concept_ext":{},"role_ext":{"r":{"w":[["a","b"],["b","c"],["c","a"]]}}}"#;
        let interp = load(doc).unwrap();
        let data = gaifman(&interp);
        assert!(!data.is_forest());
        assert_eq!(data.distance("a", "c").unwrap(), Some(1));
    }

    #[test]
    fn neighborhoods_grow_with_radius_and_tuple() {
        let mi = fixtures::fixture_mi();
        assert_eq!(neighborhood(&mi, &["a".into()], 0).unwrap(), ["a"]);
        assert_eq!(neighborhood(&mi, &["a".into()], 1).unwrap(), ["a", "b"]);
        assert_eq!(neighborhood(&mi, &["a".into(), "b".into()], 0).unwrap(), ["a", "b"]);
        assert!(neighborhood(&mi, &[], 1).is_err());
        assert!(matches!(
            neighborhood(&mi, &["z".into()], 1),
            Err(ModelError::UnknownIndividual(_))
        ));
    }

    #[test]
    fn chain_distances_follow_shortest_paths() {
        let doc = r#"{"signature":{"concepts":[],"roles":["r"]},"worlds":["w"],"domain":["a","b","c","d"],"concept_ext":{},"role_ext":{"r":{"w":[["a","b"],["b","c"],["c","d"]]}}}"#;
        let interp = load(doc).unwrap();
        let data = gaifman(&interp);
        assert_eq!(data.distance("a", "d").unwrap(), Some(3));
        assert_eq!(data.distance("d", "a").unwrap(), Some(3));
        assert!(data.is_forest());
        assert_eq!(neighborhood(&interp, &["b".into()], 1).unwrap(), ["a", "b", "c"]);
    }
}
