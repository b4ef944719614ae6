use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;

use super::interp::{ModelError, S5Interpretation};
use crate::syntax::Signature;

/// A finite class of interpretations: everything over `sig` with at most
/// `max_worlds` worlds and at most `max_domain` individuals.
///
/// The class is of labeled models — isomorphic interpretations with
/// different identifiers count separately — which keeps streaming cheap and
/// is all that universally quantified checks need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSpec {
    sig: Signature,
    max_worlds: usize,
    max_domain: usize,
}

impl ClassSpec {
    pub fn new(sig: Signature, max_worlds: usize, max_domain: usize) -> Result<Self, ModelError> {
        if max_worlds == 0 || max_domain == 0 {
            return Err(ModelError::ZeroBound);
        }
        Ok(ClassSpec { sig, max_worlds, max_domain })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn max_worlds(&self) -> usize {
        self.max_worlds
    }

    pub fn max_domain(&self) -> usize {
        self.max_domain
    }

    /// Streams every model of the class exactly once, in a fixed order.
    pub fn models(&self) -> ModelEnumeration {
        ModelEnumeration::new(self.clone())
    }

    /// How many models [`ClassSpec::models`] yields, computed in closed form.
    pub fn count(&self) -> BigUint {
        let s = self.sig.concepts().len();
        let t = self.sig.roles().len();
        let mut total = BigUint::from(0u8);
        for nw in 1..=self.max_worlds {
            for nd in 1..=self.max_domain {
                total += BigUint::from(1u8) << (s * nw * nd + t * nw * nd * nd);
            }
        }
        total
    }
}

/// Streams every labeled interpretation over `sig` with `1..=max_worlds`
/// worlds and `1..=max_domain` individuals, each exactly once.
pub fn enumerate_models(
    sig: &Signature,
    max_worlds: usize,
    max_domain: usize,
) -> Result<ModelEnumeration, ModelError> {
    Ok(ClassSpec::new(sig.clone(), max_worlds, max_domain)?.models())
}

/// Closed-form size of the stream [`enumerate_models`] yields.
pub fn count_models(
    sig: &Signature,
    max_worlds: usize,
    max_domain: usize,
) -> Result<BigUint, ModelError> {
    Ok(ClassSpec::new(sig.clone(), max_worlds, max_domain)?.count())
}

/// Iterator over all models of a [`ClassSpec`].
///
/// Shapes (number of worlds, number of individuals) are visited in
/// lexicographic order, with canonical identifiers `w1, w2, …` and
/// `d1, d2, …`.  Within a shape, one bit per potential concept membership
/// and role edge is run through all combinations like an odometer: the
/// first model of each shape has every extension empty, and the earliest
/// bit — membership of `d1` in the first concept at `w1` — varies fastest,
/// with role edges after all concept memberships.
#[derive(Debug, Clone)]
pub struct ModelEnumeration {
    spec: ClassSpec,
    num_worlds: usize,
    num_inds: usize,
    bits: Vec<bool>,
    exhausted: bool,
}

impl ModelEnumeration {
    fn new(spec: ClassSpec) -> Self {
        let mut stream =
            ModelEnumeration { spec, num_worlds: 1, num_inds: 1, bits: Vec::new(), exhausted: false };
        stream.reset_bits();
        stream
    }

    fn reset_bits(&mut self) {
        let s = self.spec.sig.concepts().len();
        let t = self.spec.sig.roles().len();
        let len = s * self.num_worlds * self.num_inds
            + t * self.num_worlds * self.num_inds * self.num_inds;
        self.bits = vec![false; len];
    }

    /// Binary increment of the current bits; on wrap-around, the next shape.
    fn advance(&mut self) {
        for bit in &mut self.bits {
            *bit = !*bit;
            if *bit {
                return;
            }
        }
        if self.num_inds < self.spec.max_domain {
            self.num_inds += 1;
        } else if self.num_worlds < self.spec.max_worlds {
            self.num_inds = 1;
            self.num_worlds += 1;
        } else {
            self.exhausted = true;
            return;
        }
        self.reset_bits();
    }

    fn build(&self) -> S5Interpretation {
        let worlds: Vec<String> = (1..=self.num_worlds).map(|i| format!("w{i}")).collect();
        let domain: Vec<String> = (1..=self.num_inds).map(|i| format!("d{i}")).collect();
        let nw = self.num_worlds;
        let nd = self.num_inds;

        let mut concept_ext: HashMap<String, HashMap<String, HashSet<String>>> = HashMap::new();
        for (ci, concept) in self.spec.sig.concepts().iter().enumerate() {
            let entry = concept_ext.entry(concept.clone()).or_default();
            for (wi, world) in worlds.iter().enumerate() {
                let members = entry.entry(world.clone()).or_default();
                for (di, ind) in domain.iter().enumerate() {
                    if self.bits[(ci * nw + wi) * nd + di] {
                        members.insert(ind.clone());
                    }
                }
            }
        }
        let offset = self.spec.sig.concepts().len() * nw * nd;
        let mut role_ext: HashMap<String, HashMap<String, HashSet<(String, String)>>> =
            HashMap::new();
        for (ri, role) in self.spec.sig.roles().iter().enumerate() {
            let entry = role_ext.entry(role.clone()).or_default();
            for (wi, world) in worlds.iter().enumerate() {
                let pairs = entry.entry(world.clone()).or_default();
                for (fi, from) in domain.iter().enumerate() {
                    for (ti, to) in domain.iter().enumerate() {
                        if self.bits[offset + (ri * nw + wi) * nd * nd + fi * nd + ti] {
                            pairs.insert((from.clone(), to.clone()));
                        }
                    }
                }
            }
        }

        S5Interpretation::from_parts(self.spec.sig.clone(), worlds, domain, concept_ext, role_ext)
            .expect("enumerated parts are valid by construction")
    }
}

impl Iterator for ModelEnumeration {
    type Item = S5Interpretation;

    fn next(&mut self) -> Option<S5Interpretation> {
        if self.exhausted {
            return None;
        }
        let model = self.build();
        self.advance();
        Some(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_sig() -> Signature {
        Signature::new(["A"], ["r"]).unwrap()
    }

    #[test]
    fn one_world_one_individual_yields_the_four_expected_models() {
        let models: Vec<_> = enumerate_models(&small_sig(), 1, 1).unwrap().collect();
        assert_eq!(models.len(), 4);
        for model in &models {
            assert_eq!(model.worlds(), ["w1"]);
            assert_eq!(model.domain(), ["d1"]);
        }
        // The odometer starts empty and flips the concept bit first.
        assert!(!models[0].has_concept("A", "w1", "d1"));
        assert!(!models[0].has_role("r", "w1", "d1", "d1"));
        assert!(models[1].has_concept("A", "w1", "d1"));
        assert!(!models[1].has_role("r", "w1", "d1", "d1"));
        assert!(!models[2].has_concept("A", "w1", "d1"));
        assert!(models[2].has_role("r", "w1", "d1", "d1"));
        assert!(models[3].has_concept("A", "w1", "d1"));
        assert!(models[3].has_role("r", "w1", "d1", "d1"));
    }

    #[test]
    fn empty_signature_yields_one_model_per_shape() {
        let sig = Signature::new::<&str>([], []).unwrap();
        assert_eq!(enumerate_models(&sig, 1, 1).unwrap().count(), 1);
        assert_eq!(enumerate_models(&sig, 2, 3).unwrap().count(), 6);
    }

    #[test]
    fn stream_length_matches_the_closed_form_count() {
        let spec = ClassSpec::new(small_sig(), 2, 2).unwrap();
        assert_eq!(spec.count(), BigUint::from(4180u32));
        assert_eq!(spec.models().count(), 4180);
        // Canonical serialization is injective, so distinct documents mean
        // no model is produced twice.
        let mut seen = std::collections::HashSet::new();
        for model in spec.models() {
            assert!(seen.insert(crate::model::save(&model)));
        }
    }

    #[test]
    fn zero_bounds_are_rejected() {
        assert_eq!(enumerate_models(&small_sig(), 0, 1).unwrap_err(), ModelError::ZeroBound);
        assert_eq!(count_models(&small_sig(), 1, 0).unwrap_err(), ModelError::ZeroBound);
    }
}
