use std::collections::{BTreeSet, HashMap};

use super::GamesError;
use crate::dense::DenseModel;
use crate::model::S5Interpretation;

/// Size caps for the tuple game, which is exponential in the worst case.
/// [`EfCaps::default`] allows up to 4 rounds over domains of up to 6
/// individuals; [`EfCaps::unbounded`] disables both limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EfCaps {
    pub max_rounds: usize,
    pub max_domain: usize,
}

impl Default for EfCaps {
    fn default() -> Self {
        EfCaps { max_rounds: 4, max_domain: 6 }
    }
}

impl EfCaps {
    pub const fn unbounded() -> Self {
        EfCaps { max_rounds: usize::MAX, max_domain: usize::MAX }
    }
}

/// A position of the tuple game: a world and a tuple of individuals on each
/// side, the tuples of equal, nonzero length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfConfig {
    pub left: (String, Vec<String>),
    pub right: (String, Vec<String>),
}

fn validate_side(
    m: &S5Interpretation,
    world: &str,
    tuple: &[String],
) -> Result<(), GamesError> {
    m.check_world(world)?;
    for ind in tuple {
        m.check_individual(ind)?;
    }
    Ok(())
}

fn validate_config(
    i: &S5Interpretation,
    j: &S5Interpretation,
    cfg: &EfConfig,
) -> Result<(), GamesError> {
    if i.signature() != j.signature() {
        return Err(crate::model::ModelError::SignatureMismatch.into());
    }
    validate_side(i, &cfg.left.0, &cfg.left.1)?;
    validate_side(j, &cfg.right.0, &cfg.right.1)?;
    let (left, right) = (cfg.left.1.len(), cfg.right.1.len());
    if left != right || left == 0 {
        return Err(GamesError::TupleShape { left, right });
    }
    Ok(())
}

/// True iff matching tuple positions have the same equality pattern, the
/// same concept memberships at the current worlds, and the same role edges
/// at the current worlds.
pub fn is_partial_isomorphism(
    i: &S5Interpretation,
    j: &S5Interpretation,
    cfg: &EfConfig,
) -> Result<bool, GamesError> {
    validate_config(i, j, cfg)?;
    let solver = Solver::new(i, j);
    let pairs = solver.quotient(cfg);
    Ok(solver.partial_iso(
        solver.left.world_index[&cfg.left.0],
        solver.right.world_index[&cfg.right.0],
        &pairs,
    ))
}

/// True iff the matched tuples survive `n` rounds of world moves and
/// unrestricted tuple extensions, staying a partial isomorphism throughout.
/// Runs with the default [`EfCaps`].
pub fn ef_equivalent_n(
    i: &S5Interpretation,
    w: &str,
    dbar: &[String],
    j: &S5Interpretation,
    v: &str,
    ebar: &[String],
    n: usize,
) -> Result<bool, GamesError> {
    ef_equivalent_n_with_caps(i, w, dbar, j, v, ebar, n, &EfCaps::default())
}

/// [`ef_equivalent_n`] with explicit caps.
#[allow(clippy::too_many_arguments)]
pub fn ef_equivalent_n_with_caps(
    i: &S5Interpretation,
    w: &str,
    dbar: &[String],
    j: &S5Interpretation,
    v: &str,
    ebar: &[String],
    n: usize,
    caps: &EfCaps,
) -> Result<bool, GamesError> {
    let cfg = EfConfig {
        left: (w.to_string(), dbar.to_vec()),
        right: (v.to_string(), ebar.to_vec()),
    };
    validate_config(i, j, &cfg)?;
    if n > caps.max_rounds {
        return Err(GamesError::RoundsCap { requested: n, cap: caps.max_rounds });
    }
    let size = i.domain().len().max(j.domain().len());
    if size > caps.max_domain {
        return Err(GamesError::DomainCap { size, cap: caps.max_domain });
    }
    let mut solver = Solver::new(i, j);
    let pairs = solver.quotient(&cfg);
    let w = solver.left.world_index[&cfg.left.0];
    let v = solver.right.world_index[&cfg.right.0];
    Ok(solver.win(w, v, pairs, n))
}

/// Memoizing game solver.
///
/// Positions are quotiented to (left world, right world, set of matched
/// individual pairs, rounds left): the outcome depends on the tuples only
/// through that set, because both the partial-isomorphism condition and the
/// legal moves are invariant under reordering and duplication of matched
/// positions.  The set stays sorted for use as a map key.
/// Quotiented position: left world, right world, the sorted deduplicated
/// matched index pairs, and the rounds left.
type PositionKey = (usize, usize, Vec<(usize, usize)>, usize);

struct Solver {
    left: DenseModel,
    right: DenseModel,
    memo: HashMap<PositionKey, bool>,
}

impl Solver {
    fn new(i: &S5Interpretation, j: &S5Interpretation) -> Solver {
        Solver { left: DenseModel::new(i), right: DenseModel::new(j), memo: HashMap::new() }
    }

    fn quotient(&self, cfg: &EfConfig) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = cfg
            .left
            .1
            .iter()
            .zip(&cfg.right.1)
            .map(|(d, e)| (self.left.ind_index[d], self.right.ind_index[e]))
            .collect();
        set.into_iter().collect()
    }

    fn partial_iso(&self, w: usize, v: usize, pairs: &[(usize, usize)]) -> bool {
        // The equality patterns coincide exactly when the matching is a
        // partial bijection: no individual matched with two on the other
        // side.
        for (index, &(d1, e1)) in pairs.iter().enumerate() {
            for &(d2, e2) in &pairs[index + 1..] {
                if (d1 == d2) != (e1 == e2) {
                    return false;
                }
            }
        }
        for &(d, e) in pairs {
            if self.left.profile[w][d] != self.right.profile[v][e] {
                return false;
            }
        }
        for role in 0..self.left.succ.len() {
            for &(d1, e1) in pairs {
                for &(d2, e2) in pairs {
                    if self.left.succ[role][w][d1].get(d2)
                        != self.right.succ[role][v][e1].get(e2)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn win(&mut self, w: usize, v: usize, pairs: Vec<(usize, usize)>, rounds: usize) -> bool {
        if !self.partial_iso(w, v, &pairs) {
            return false;
        }
        if rounds == 0 {
            return true;
        }
        let key = (w, v, pairs, rounds);
        if let Some(&known) = self.memo.get(&key) {
            return known;
        }
        let pairs = key.2.clone();
        let mut result = true;

        // World moves on either side.
        for w2 in 0..self.left.num_worlds() {
            if !(0..self.right.num_worlds())
                .any(|v2| self.win(w2, v2, pairs.clone(), rounds - 1))
            {
                result = false;
            }
        }
        if result {
            for v2 in 0..self.right.num_worlds() {
                if !(0..self.left.num_worlds())
                    .any(|w2| self.win(w2, v2, pairs.clone(), rounds - 1))
                {
                    result = false;
                }
            }
        }
        // Tuple extensions on either side.
        if result {
            for d in 0..self.left.num_inds() {
                if !(0..self.right.num_inds())
                    .any(|e| self.win(w, v, with_pair(&pairs, (d, e)), rounds - 1))
                {
                    result = false;
                }
            }
        }
        if result {
            for e in 0..self.right.num_inds() {
                if !(0..self.left.num_inds())
                    .any(|d| self.win(w, v, with_pair(&pairs, (d, e)), rounds - 1))
                {
                    result = false;
                }
            }
        }

        self.memo.insert(key, result);
        result
    }
}

/// The sorted pair set extended by one pair.
fn with_pair(pairs: &[(usize, usize)], pair: (usize, usize)) -> Vec<(usize, usize)> {
    match pairs.binary_search(&pair) {
        Ok(_) => pairs.to_vec(),
        Err(position) => {
            let mut extended = pairs.to_vec();
            extended.insert(position, pair);
            extended
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::load;

    fn cfg(w: &str, dbar: &[&str], v: &str, ebar: &[&str]) -> EfConfig {
        EfConfig {
            left: (w.to_string(), dbar.iter().map(|s| s.to_string()).collect()),
            right: (v.to_string(), ebar.iter().map(|s| s.to_string()).collect()),
        }
    }

    /// Unquotiented, unmemoized recursion straight from the game rules,
    /// used as an oracle.
    fn naive_win(
        i: &S5Interpretation,
        j: &S5Interpretation,
        w: &str,
        dbar: &[String],
        v: &str,
        ebar: &[String],
        rounds: usize,
    ) -> bool {
        let iso = {
            let equalities = dbar.iter().enumerate().all(|(x, dx)| {
                dbar.iter().enumerate().all(|(y, dy)| (dx == dy) == (ebar[x] == ebar[y]))
            });
            let concepts = i.signature().concepts().iter().all(|c| {
                dbar.iter()
                    .zip(ebar)
                    .all(|(d, e)| i.has_concept(c, w, d) == j.has_concept(c, v, e))
            });
            let roles = i.signature().roles().iter().all(|r| {
                dbar.iter().zip(ebar).all(|(d1, e1)| {
                    dbar.iter().zip(ebar).all(|(d2, e2)| {
                        i.has_role(r, w, d1, d2) == j.has_role(r, v, e1, e2)
                    })
                })
            });
            equalities && concepts && roles
        };
        if !iso || rounds == 0 {
            return iso;
        }
        let extend = |tuple: &[String], ind: &String| {
            let mut longer = tuple.to_vec();
            longer.push(ind.clone());
            longer
        };
        i.worlds().iter().all(|w2| {
            j.worlds().iter().any(|v2| naive_win(i, j, w2, dbar, v2, ebar, rounds - 1))
        }) && j.worlds().iter().all(|v2| {
            i.worlds().iter().any(|w2| naive_win(i, j, w2, dbar, v2, ebar, rounds - 1))
        }) && i.domain().iter().all(|d| {
            j.domain()
                .iter()
                .any(|e| naive_win(i, j, w, &extend(dbar, d), v, &extend(ebar, e), rounds - 1))
        }) && j.domain().iter().all(|e| {
            i.domain()
                .iter()
                .any(|d| naive_win(i, j, w, &extend(dbar, d), v, &extend(ebar, e), rounds - 1))
        })
    }

    #[test]
    fn partial_isomorphism_examples() {
        let mi = fixtures::fixture_mi();
        let mj = fixtures::fixture_mj();
        assert!(is_partial_isomorphism(&mi, &mj, &cfg("v1", &["a"], "w1", &["a"])).unwrap());
        // b satisfies A at v1 but not at w1.
        assert!(!is_partial_isomorphism(&mi, &mj, &cfg("v1", &["a", "b"], "w1", &["a", "b"]))
            .unwrap());
        // Broken equality pattern.
        assert!(!is_partial_isomorphism(&mi, &mj, &cfg("v1", &["a", "a"], "w1", &["a", "b"]))
            .unwrap());
        assert_eq!(
            is_partial_isomorphism(&mi, &mj, &cfg("v1", &["a"], "w1", &[])).unwrap_err(),
            GamesError::TupleShape { left: 1, right: 0 }
        );
    }

    #[test]
    fn game_on_the_bundled_models() {
        let mi = fixtures::fixture_mi();
        let mj = fixtures::fixture_mj();
        let a = ["a".to_string()];
        assert!(ef_equivalent_n(&mi, "v1", &a, &mj, "w1", &a, 0).unwrap());
        // One round suffices to tell the two apart even though they are
        // bisimilar: the challenger extends with b and every reply breaks
        // either the equality pattern or concept agreement.
        assert!(!ef_equivalent_n(&mi, "v1", &a, &mj, "w1", &a, 1).unwrap());
        for n in 0..=3 {
            assert!(ef_equivalent_n(&mi, "v1", &a, &mi, "v1", &a, n).unwrap());
        }
    }

    #[test]
    fn solver_matches_the_naive_recursion() {
        let mi = fixtures::fixture_mi();
        let mj = fixtures::fixture_mj();
        for n in 0..3 {
            for w in mi.worlds() {
                for d in mi.domain() {
                    for v in mj.worlds() {
                        for e in mj.domain() {
                            let dbar = [d.clone()];
                            let ebar = [e.clone()];
                            assert_eq!(
                                ef_equivalent_n(&mi, w, &dbar, &mj, v, &ebar, n).unwrap(),
                                naive_win(&mi, &mj, w, &dbar, v, &ebar, n),
                                "rounds {n} at ({w},{d})~({v},{e})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn caps_bound_rounds_and_domain_sizes() {
        let mi = fixtures::fixture_mi();
        let a = ["a".to_string()];
        assert_eq!(
            ef_equivalent_n(&mi, "v1", &a, &mi, "v1", &a, 5).unwrap_err(),
            GamesError::RoundsCap { requested: 5, cap: 4 }
        );
        assert!(ef_equivalent_n_with_caps(
            &mi,
            "v1",
            &a,
            &mi,
            "v1",
            &a,
            5,
            &EfCaps::unbounded()
        )
        .unwrap());

        let wide = load(
            r#"{"signature":{"concepts":[],"roles":[]},"worlds":["w"],"domain":["d1","d2","d3","d4","d5","d6","d7"],"concept_ext":{},"role_ext":{}}"#,
        )
        .unwrap();
        let d1 = ["d1".to_string()];
        assert_eq!(
            ef_equivalent_n(&wide, "w", &d1, &wide, "w", &d1, 1).unwrap_err(),
            GamesError::DomainCap { size: 7, cap: 6 }
        );
        assert!(ef_equivalent_n_with_caps(
            &wide,
            "w",
            &d1,
            &wide,
            "w",
            &d1,
            1,
            &EfCaps::unbounded()
        )
        .unwrap());
    }
}
