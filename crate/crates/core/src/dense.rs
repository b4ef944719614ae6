//! Internal index of an interpretation: names resolved to dense indices and
//! extensions packed into bitsets, so the evaluators and game solvers can
//! work with integer loops instead of string lookups.

use std::collections::HashMap;

use crate::model::S5Interpretation;
use crate::syntax::RoleKind;

/// Fixed-length bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    /// True iff the two sets share an element.
    pub fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn negate(&mut self) {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        self.trim();
    }

    pub fn fill(&mut self) {
        for w in self.words.iter_mut() {
            *w = u64::MAX;
        }
        self.trim();
    }

    /// Indices of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Zeroes the padding bits beyond `len`.
    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }
}

/// Index-resolved form of an [`S5Interpretation`].
#[derive(Debug)]
pub(crate) struct DenseModel {
    pub worlds: Vec<String>,
    pub inds: Vec<String>,
    pub world_index: HashMap<String, usize>,
    pub ind_index: HashMap<String, usize>,
    /// `concept_bits[c][w]`: the individuals in concept `c` at world `w`.
    pub concept_bits: Vec<Vec<Bits>>,
    /// `succ[r][w][d]`: the `r`-successors of individual `d` at world `w`.
    pub succ: Vec<Vec<Vec<Bits>>>,
    /// `profile[w][d]`: the concept memberships of `d` at `w`, one bit per
    /// concept name — two configurations agree atomically iff their profiles
    /// are equal.
    pub profile: Vec<Vec<Bits>>,
}

impl DenseModel {
    pub fn new(interp: &S5Interpretation) -> Self {
        let sig = interp.signature();
        let worlds: Vec<String> = interp.worlds().to_vec();
        let inds: Vec<String> = interp.domain().to_vec();
        let world_index: HashMap<String, usize> =
            worlds.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let ind_index: HashMap<String, usize> =
            inds.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        let nw = worlds.len();
        let nd = inds.len();

        let mut concept_bits =
            vec![vec![Bits::new(nd); nw]; sig.concepts().len()];
        for (ci, concept) in sig.concepts().iter().enumerate() {
            for (wi, world) in worlds.iter().enumerate() {
                for member in interp.concept_members(concept, world) {
                    concept_bits[ci][wi].set(ind_index[member]);
                }
            }
        }

        let mut succ = vec![vec![vec![Bits::new(nd); nd]; nw]; sig.roles().len()];
        for (ri, role) in sig.roles().iter().enumerate() {
            for (wi, world) in worlds.iter().enumerate() {
                for (from, to) in interp.role_pairs(role, world) {
                    succ[ri][wi][ind_index[from]].set(ind_index[to]);
                }
            }
        }

        let mut profile = vec![vec![Bits::new(sig.concepts().len()); nd]; nw];
        for (wi, row) in profile.iter_mut().enumerate() {
            for (di, bits) in row.iter_mut().enumerate() {
                for (ci, concept) in concept_bits.iter().enumerate() {
                    if concept[wi].get(di) {
                        bits.set(ci);
                    }
                }
            }
        }

        DenseModel { worlds, inds, world_index, ind_index, concept_bits, succ, profile }
    }

    pub fn num_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn num_inds(&self) -> usize {
        self.inds.len()
    }

    /// Successor set of `d` under the role `r` with the given occurrence
    /// kind: the extension at `w` for a plain role, the intersection over all
    /// worlds for a boxed role, the union for a diamond role.
    pub fn successors(&self, role: usize, kind: RoleKind, w: usize, d: usize) -> Bits {
        match kind {
            RoleKind::Local => self.succ[role][w][d].clone(),
            RoleKind::Boxed => {
                let mut acc = self.succ[role][0][d].clone();
                for wi in 1..self.num_worlds() {
                    acc.and_assign(&self.succ[role][wi][d]);
                }
                acc
            }
            RoleKind::Diamond => {
                let mut acc = self.succ[role][0][d].clone();
                for wi in 1..self.num_worlds() {
                    acc.or_assign(&self.succ[role][wi][d]);
                }
                acc
            }
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_basic_operations() {
        let mut bits = Bits::new(130);
        assert_eq!(bits.iter_ones().count(), 0);
        bits.set(0);
        bits.set(64);
        bits.set(129);
        assert!(bits.get(64) && !bits.get(63));
        assert_eq!(bits.iter_ones().collect::<Vec<_>>(), [0, 64, 129]);

        let mut other = Bits::new(130);
        other.set(129);
        assert!(bits.intersects(&other));
        other.negate();
        assert!(!other.get(129) && other.get(0));
        assert_eq!(other.iter_ones().count(), 129);

        let mut full = Bits::new(70);
        full.fill();
        assert_eq!(full.iter_ones().count(), 70);
    }
}
