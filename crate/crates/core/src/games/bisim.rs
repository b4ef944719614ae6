use std::collections::HashSet;

use super::GamesError;
use crate::dense::DenseModel;
use crate::model::{ModelError, PointPair, S5Interpretation};

/// One position of a two-sided game: a world–individual pair on each side.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameConfig {
    pub left: (String, String),
    pub right: (String, String),
}

/// The condition a configuration of a candidate relation fails, together
/// with the unanswered move where applicable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimClause {
    /// The two points disagree on this concept name.
    Atomic { concept: String },
    /// No world on the right answers this left world.
    WorldForth { world: String },
    /// No world on the left answers this right world.
    WorldBack { world: String },
    /// No role successor on the right matches this left successor.
    DeltaForth { role: String, successor: String },
    /// No role successor on the left matches this right successor.
    DeltaBack { role: String, successor: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimViolation {
    pub config: GameConfig,
    pub clause: BisimClause,
}

fn check_point(m: &S5Interpretation, world: &str, ind: &str) -> Result<(), GamesError> {
    m.check_world(world)?;
    m.check_individual(ind)?;
    Ok(())
}

fn check_signatures(i: &S5Interpretation, j: &S5Interpretation) -> Result<(), GamesError> {
    if i.signature() != j.signature() {
        return Err(ModelError::SignatureMismatch.into());
    }
    Ok(())
}

/// True iff the two points of `cfg` satisfy exactly the same concept names.
pub fn atomic_agreement(
    i: &S5Interpretation,
    j: &S5Interpretation,
    cfg: &GameConfig,
) -> Result<bool, GamesError> {
    check_signatures(i, j)?;
    let (w, d) = (&cfg.left.0, &cfg.left.1);
    let (v, e) = (&cfg.right.0, &cfg.right.1);
    check_point(i, w, d)?;
    check_point(j, v, e)?;
    Ok(i.signature()
        .concepts()
        .iter()
        .all(|concept| i.has_concept(concept, w, d) == j.has_concept(concept, v, e)))
}

/// Verifies a candidate relation clause by clause, returning `None` when it
/// is a bisimulation and otherwise the first violation: pairs are scanned in
/// the order supplied, clauses in the order atomic, world-forth, world-back,
/// delta-forth, delta-back, and moves in declared world/role/domain order —
/// so the reported witness is canonical.
///
/// Deliberately implemented by direct string lookups, independent of the
/// fixpoint solvers below, so each side can audit the other.
pub fn check_bisimulation(
    i: &S5Interpretation,
    j: &S5Interpretation,
    relation: &[PointPair],
) -> Result<Option<BisimViolation>, GamesError> {
    check_signatures(i, j)?;
    for ((w, d), (v, e)) in relation {
        check_point(i, w, d)?;
        check_point(j, v, e)?;
    }
    let members: HashSet<(&str, &str, &str, &str)> = relation
        .iter()
        .map(|((w, d), (v, e))| (w.as_str(), d.as_str(), v.as_str(), e.as_str()))
        .collect();
    let sig = i.signature();

    for ((w, d), (v, e)) in relation {
        let violation = |clause: BisimClause| {
            Some(BisimViolation {
                config: GameConfig {
                    left: (w.clone(), d.clone()),
                    right: (v.clone(), e.clone()),
                },
                clause,
            })
        };
        for concept in sig.concepts() {
            if i.has_concept(concept, w, d) != j.has_concept(concept, v, e) {
                return Ok(violation(BisimClause::Atomic { concept: concept.clone() }));
            }
        }
        for w2 in i.worlds() {
            if !j.worlds().iter().any(|v2| members.contains(&(w2, d, v2, e))) {
                return Ok(violation(BisimClause::WorldForth { world: w2.clone() }));
            }
        }
        for v2 in j.worlds() {
            if !i.worlds().iter().any(|w2| members.contains(&(w2, d, v2, e))) {
                return Ok(violation(BisimClause::WorldBack { world: v2.clone() }));
            }
        }
        for role in sig.roles() {
            for (from, d2) in i.role_pairs(role, w) {
                if from != d {
                    continue;
                }
                let answered = j
                    .role_pairs(role, v)
                    .iter()
                    .any(|(f, e2)| f == e && members.contains(&(w, d2, v, e2)));
                if !answered {
                    return Ok(violation(BisimClause::DeltaForth {
                        role: role.clone(),
                        successor: d2.to_string(),
                    }));
                }
            }
            for (from, e2) in j.role_pairs(role, v) {
                if from != e {
                    continue;
                }
                let answered = i
                    .role_pairs(role, w)
                    .iter()
                    .any(|(f, d2)| f == d && members.contains(&(w, d2, v, e2)));
                if !answered {
                    return Ok(violation(BisimClause::DeltaBack {
                        role: role.clone(),
                        successor: e2.to_string(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// The product space of two interpretations, with all solver tables indexed
/// by `((w·|Δ_left| + d)·|W_right| + v)·|Δ_right| + e`.
struct Space {
    left: DenseModel,
    right: DenseModel,
}

impl Space {
    fn new(i: &S5Interpretation, j: &S5Interpretation) -> Result<Space, GamesError> {
        check_signatures(i, j)?;
        Ok(Space { left: DenseModel::new(i), right: DenseModel::new(j) })
    }

    fn size(&self) -> usize {
        self.left.num_worlds()
            * self.left.num_inds()
            * self.right.num_worlds()
            * self.right.num_inds()
    }

    fn index(&self, w: usize, d: usize, v: usize, e: usize) -> usize {
        ((w * self.left.num_inds() + d) * self.right.num_worlds() + v) * self.right.num_inds()
            + e
    }

    /// Runs `body` over every configuration, in index order.
    fn for_each(&self, mut body: impl FnMut(usize, usize, usize, usize)) {
        for w in 0..self.left.num_worlds() {
            for d in 0..self.left.num_inds() {
                for v in 0..self.right.num_worlds() {
                    for e in 0..self.right.num_inds() {
                        body(w, d, v, e);
                    }
                }
            }
        }
    }

    fn atomic_table(&self) -> Vec<bool> {
        let mut table = vec![false; self.size()];
        self.for_each(|w, d, v, e| {
            table[self.index(w, d, v, e)] = self.left.profile[w][d] == self.right.profile[v][e];
        });
        table
    }

    /// World clauses: every world change on either side (keeping the
    /// individuals) has an answer inside `target`.
    fn world_clauses(&self, target: &[bool], d: usize, e: usize) -> bool {
        (0..self.left.num_worlds()).all(|w2| {
            (0..self.right.num_worlds()).any(|v2| target[self.index(w2, d, v2, e)])
        }) && (0..self.right.num_worlds()).all(|v2| {
            (0..self.left.num_worlds()).any(|w2| target[self.index(w2, d, v2, e)])
        })
    }

    /// Successor clauses: every role successor at the current worlds on
    /// either side has an answer inside `target`.
    fn delta_clauses(&self, target: &[bool], w: usize, d: usize, v: usize, e: usize) -> bool {
        for role in 0..self.left.succ.len() {
            let out_left = &self.left.succ[role][w][d];
            let out_right = &self.right.succ[role][v][e];
            let forth = out_left.iter_ones().all(|d2| {
                out_right.iter_ones().any(|e2| target[self.index(w, d2, v, e2)])
            });
            if !forth {
                return false;
            }
            let back = out_right.iter_ones().all(|e2| {
                out_left.iter_ones().any(|d2| target[self.index(w, d2, v, e2)])
            });
            if !back {
                return false;
            }
        }
        true
    }

    /// Greatest fixpoint of the one-step clauses: start from the
    /// atomic-agreeing configurations and delete violating ones until stable.
    fn unbounded(&self) -> Vec<bool> {
        let mut alive = self.atomic_table();
        loop {
            let mut changed = false;
            self.for_each(|w, d, v, e| {
                let idx = self.index(w, d, v, e);
                if alive[idx]
                    && !(self.world_clauses(&alive, d, e)
                        && self.delta_clauses(&alive, w, d, v, e))
                {
                    alive[idx] = false;
                    changed = true;
                }
            });
            if !changed {
                return alive;
            }
        }
    }

    /// The depth-`n` relation: atomic agreement refined `n` times by the
    /// four clauses into the previous level.
    fn bounded(&self, n: usize) -> Vec<bool> {
        let atomic = self.atomic_table();
        let mut current = atomic.clone();
        for _ in 0..n {
            let mut next = vec![false; self.size()];
            self.for_each(|w, d, v, e| {
                let idx = self.index(w, d, v, e);
                next[idx] = atomic[idx]
                    && self.world_clauses(&current, d, e)
                    && self.delta_clauses(&current, w, d, v, e);
            });
            current = next;
        }
        current
    }

    /// Base of the alternating hierarchy: atomic agreement that survives one
    /// optional world phase — every world change on either side can be
    /// answered while preserving atomic agreement.
    fn alternating_base(&self) -> Vec<bool> {
        let atomic = self.atomic_table();
        let mut base = vec![false; self.size()];
        self.for_each(|w, d, v, e| {
            let idx = self.index(w, d, v, e);
            base[idx] = atomic[idx] && self.world_clauses(&atomic, d, e);
        });
        base
    }

    /// One alternating round into `target`: atomic agreement, successor
    /// clauses into `target` directly, and for every world change an answer
    /// from which the successor clauses into `target` still hold.
    fn alternating_step(&self, target: &[bool]) -> Vec<bool> {
        let atomic = self.atomic_table();
        let mut round_ok = vec![false; self.size()];
        self.for_each(|w, d, v, e| {
            let idx = self.index(w, d, v, e);
            round_ok[idx] = atomic[idx] && self.delta_clauses(target, w, d, v, e);
        });
        let mut next = vec![false; self.size()];
        self.for_each(|w, d, v, e| {
            let idx = self.index(w, d, v, e);
            next[idx] = round_ok[idx] && self.world_clauses(&round_ok, d, e);
        });
        next
    }

    fn alternating_bounded(&self, n: usize) -> Vec<bool> {
        let mut current = self.alternating_base();
        for _ in 0..n {
            current = self.alternating_step(&current);
        }
        current
    }

    /// Greatest fixpoint of the alternating round operator.
    fn alternating_unbounded(&self) -> Vec<bool> {
        let mut current = vec![true; self.size()];
        loop {
            let next = self.alternating_step(&current);
            if next == current {
                return current;
            }
            current = next;
        }
    }

    fn resolve(
        &self,
        w: &str,
        d: &str,
        v: &str,
        e: &str,
    ) -> (usize, usize, usize, usize) {
        (
            self.left.world_index[w],
            self.left.ind_index[d],
            self.right.world_index[v],
            self.right.ind_index[e],
        )
    }

    fn configs_of(&self, table: &[bool]) -> Vec<GameConfig> {
        let mut configs = Vec::new();
        self.for_each(|w, d, v, e| {
            if table[self.index(w, d, v, e)] {
                configs.push(GameConfig {
                    left: (self.left.worlds[w].clone(), self.left.inds[d].clone()),
                    right: (self.right.worlds[v].clone(), self.right.inds[e].clone()),
                });
            }
        });
        configs
    }
}

fn solve_pair(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    j: &S5Interpretation,
    v: &str,
    e: &str,
    table_of: impl FnOnce(&Space) -> Vec<bool>,
) -> Result<bool, GamesError> {
    check_point(i, w, d)?;
    check_point(j, v, e)?;
    let space = Space::new(i, j)?;
    let table = table_of(&space);
    let (w, d, v, e) = space.resolve(w, d, v, e);
    Ok(table[space.index(w, d, v, e)])
}

/// True iff some bisimulation contains the configuration — equivalently,
/// iff it survives deleting clause violations from the atomic-agreeing
/// product space until stable.
pub fn bisimilar(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    j: &S5Interpretation,
    v: &str,
    e: &str,
) -> Result<bool, GamesError> {
    solve_pair(i, w, d, j, v, e, Space::unbounded)
}

/// All bisimilar configurations between the two interpretations, in
/// declared-order scan order; the result always passes
/// [`check_bisimulation`] and is the largest relation that does.
pub fn bisim_relation(
    i: &S5Interpretation,
    j: &S5Interpretation,
) -> Result<Vec<GameConfig>, GamesError> {
    let space = Space::new(i, j)?;
    let table = space.unbounded();
    Ok(space.configs_of(&table))
}

/// Depth-bounded bisimilarity: the configuration survives `n` rounds of the
/// clauses (depth 0 is atomic agreement alone).
pub fn bisimilar_n(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    j: &S5Interpretation,
    v: &str,
    e: &str,
    n: usize,
) -> Result<bool, GamesError> {
    solve_pair(i, w, d, j, v, e, |space| space.bounded(n))
}

/// Bounded alternating bisimilarity: `n` rounds each made of an optional
/// world phase followed by a successor phase, with one optional world phase
/// allowed at the very end (encoded in the base of the hierarchy).
pub fn bisimilar_alt_n(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    j: &S5Interpretation,
    v: &str,
    e: &str,
    n: usize,
) -> Result<bool, GamesError> {
    solve_pair(i, w, d, j, v, e, |space| space.alternating_bounded(n))
}

/// Unbounded alternating bisimilarity (the greatest fixpoint of the
/// alternating round); coincides with [`bisimilar`] on finite models.
pub fn bisimilar_alt(
    i: &S5Interpretation,
    w: &str,
    d: &str,
    j: &S5Interpretation,
    v: &str,
    e: &str,
) -> Result<bool, GamesError> {
    solve_pair(i, w, d, j, v, e, Space::alternating_unbounded)
}
