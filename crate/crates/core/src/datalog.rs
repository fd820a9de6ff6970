//! Ground disjunctive datalog with negation as failure, under the stable
//! model semantics.
//!
//! An interpretation `I` satisfies a ground rule when, if every positive
//! body atom is in `I` and no negated one is, some head atom is in `I`;
//! denials (empty heads) must therefore never fire. The reduct of a program
//! with respect to `I` drops every rule with a negated body atom inside `I`
//! and erases the remaining negated literals. `I` is a stable model when it
//! satisfies the program and is a minimal model of its own reduct.
//!
//! Programs are small here by construction (the hybrid reasoner grounds
//! only relevant rule instances and caps the Herbrand base), so
//! interpretations are bit masks over at most 64 atoms, minimality is a
//! bounded subset scan, and model search is a propagation-pruned
//! depth-first enumeration that visits interpretations in a fixed
//! lexicographic order. Everything is deterministic.

use std::collections::BTreeMap;

use crate::syntax::{Atom, PredKind, Rule};

/// Hard ceiling on the atom universe of one ground program.
pub const MAX_ATOMS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DatalogError {
    #[error("ground program exceeds {MAX_ATOMS} distinct atoms ({0})")]
    TooManyAtoms(usize),
    #[error("rule {0} is not ground datalog")]
    NotGroundDatalog(String),
    #[error("model search exceeded its step budget")]
    WorkLimit,
}

/// One ground rule, atoms referred to by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRule {
    pub head: Vec<usize>,
    pub pos: Vec<usize>,
    pub naf: Vec<usize>,
}

/// A ground program over an indexed atom universe. Atom order is the sorted
/// order of the atoms themselves, which fixes the lexicographic order used
/// everywhere below: interpretations are compared atom 0 first, absent
/// before present.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    pub atoms: Vec<Atom>,
    pub rules: Vec<GroundRule>,
}

/// Interpretation as a bit mask; bit `i` set means atom `i` holds.
pub type Interp = u64;

fn mask_of(indices: &[usize]) -> Interp {
    indices.iter().fold(0, |m, i| m | (1u64 << i))
}

impl GroundProgram {
    /// Index the atoms of `rules` and translate them. Every rule must be
    /// ground, datalog-only, with an empty ontology section.
    pub fn new(rules: &[Rule]) -> Result<GroundProgram, DatalogError> {
        let mut ids: BTreeMap<&Atom, usize> = BTreeMap::new();
        for r in rules {
            if !r.onto.is_empty() || !r.is_ground() {
                return Err(DatalogError::NotGroundDatalog(r.to_string()));
            }
            for a in r.sections() {
                if a.kind != PredKind::Data {
                    return Err(DatalogError::NotGroundDatalog(r.to_string()));
                }
                let next = ids.len();
                ids.entry(a).or_insert(next);
            }
        }
        if ids.len() > MAX_ATOMS {
            return Err(DatalogError::TooManyAtoms(ids.len()));
        }
        // Re-number in sorted atom order so the index order is canonical.
        let mut atoms: Vec<Atom> = ids.keys().map(|a| (*a).clone()).collect();
        atoms.sort();
        let index: BTreeMap<&Atom, usize> =
            atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let ground = rules
            .iter()
            .map(|r| GroundRule {
                head: r.head.iter().map(|a| index[a]).collect(),
                pos: r.pos.iter().map(|a| index[a]).collect(),
                naf: r.naf.iter().map(|a| index[a]).collect(),
            })
            .collect();
        Ok(GroundProgram { atoms: atoms.clone(), rules: ground })
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Decode a mask into the atoms it contains, in canonical order.
    pub fn decode(&self, interp: Interp) -> Vec<Atom> {
        (0..self.atoms.len())
            .filter(|i| interp & (1 << i) != 0)
            .map(|i| self.atoms[i].clone())
            .collect()
    }

    fn rule_fires(&self, rule: &GroundRule, interp: Interp) -> bool {
        let pos = mask_of(&rule.pos);
        let naf = mask_of(&rule.naf);
        pos & interp == pos && naf & interp == 0
    }

    /// Classical satisfaction of every rule.
    pub fn is_model(&self, interp: Interp) -> bool {
        self.rules.iter().all(|r| {
            !self.rule_fires(r, interp) || mask_of(&r.head) & interp != 0
        })
    }

    /// The reduct: rules surviving `interp`, negation erased.
    fn reduct(&self, interp: Interp) -> Vec<(Interp, Interp)> {
        self.rules
            .iter()
            .filter(|r| mask_of(&r.naf) & interp == 0)
            .map(|r| (mask_of(&r.head), mask_of(&r.pos)))
            .collect()
    }

    fn models_reduct(reduct: &[(Interp, Interp)], interp: Interp) -> bool {
        reduct.iter().all(|(head, pos)| pos & interp != *pos || head & interp != 0)
    }

    /// Least fixpoint of the single-headed reduct rules: a lower bound
    /// contained in every model of the reduct, used to shrink the
    /// minimality scan.
    fn definite_floor(reduct: &[(Interp, Interp)]) -> Interp {
        let mut floor: Interp = 0;
        loop {
            let mut grown = floor;
            for (head, pos) in reduct {
                if head.count_ones() == 1 && pos & floor == *pos {
                    grown |= head;
                }
            }
            if grown == floor {
                return floor;
            }
            floor = grown;
        }
    }

    /// Stable model check straight from the definition: model of the
    /// program, and no proper submodel of the reduct.
    pub fn is_stable_model(&self, interp: Interp) -> bool {
        if !self.is_model(interp) {
            return false;
        }
        let reduct = self.reduct(interp);
        let floor = Self::definite_floor(&reduct);
        if floor & interp != floor {
            // The floor is contained in every model; interp missing part of
            // it means interp is not even a model of the reduct.
            return false;
        }
        let free: Vec<usize> =
            (0..self.atoms.len()).filter(|i| interp & (1 << i) != 0 && floor & (1 << i) == 0).collect();
        let n = free.len();
        // Scan proper subsets of interp that still contain the floor.
        for choice in 0..(1u64 << n) {
            if choice == (1u64 << n) - 1 {
                continue;
            }
            let mut sub = floor;
            for (bit, atom) in free.iter().enumerate() {
                if choice & (1 << bit) != 0 {
                    sub |= 1 << atom;
                }
            }
            if Self::models_reduct(&reduct, sub) {
                return false;
            }
        }
        true
    }

    /// The lexicographically least stable model, if any: interpretations
    /// are ordered atom 0 first with absent below present, and the first
    /// stable one in that order is returned. `budget` bounds the number of
    /// search nodes.
    pub fn first_stable_model(&self, budget: u64) -> Result<Option<Interp>, DatalogError> {
        let n = self.atoms.len();
        let mut steps = 0u64;
        let mut stack: Vec<(Interp, Interp)> = vec![(0, 0)]; // (in, out) masks
        while let Some((mut inn, mut out)) = stack.pop() {
            steps += 1;
            if steps > budget {
                return Err(DatalogError::WorkLimit);
            }
            if !self.propagate(&mut inn, &mut out) {
                continue;
            }
            let decided = inn | out;
            match (0..n).find(|i| decided & (1 << i) == 0) {
                None => {
                    if self.is_stable_model(inn) {
                        return Ok(Some(inn));
                    }
                }
                Some(i) => {
                    // Depth-first, absent branch explored first: push the
                    // present branch below it.
                    stack.push((inn | (1 << i), out));
                    stack.push((inn, out | (1 << i)));
                }
            }
        }
        Ok(None)
    }

    pub fn has_stable_model(&self, budget: u64) -> Result<bool, DatalogError> {
        Ok(self.first_stable_model(budget)?.is_some())
    }

    /// All stable models in lexicographic order. Only meant for small
    /// universes; guarded by `budget` on the full enumeration size.
    pub fn stable_models(&self, budget: u64) -> Result<Vec<Interp>, DatalogError> {
        let n = self.atoms.len();
        if n >= 63 || (1u64 << n) > budget {
            return Err(DatalogError::WorkLimit);
        }
        // Enumerate in the canonical order: interpretations compared atom
        // by atom in sorted-atom order with absent before present, so the
        // first entry coincides with the model the search returns first.
        let lex = |c: u64| -> Interp {
            let mut m = 0u64;
            for i in 0..n {
                if c >> (n - 1 - i) & 1 == 1 {
                    m |= 1 << i;
                }
            }
            m
        };
        Ok((0..(1u64 << n)).map(lex).filter(|m| self.is_stable_model(*m)).collect())
    }

    /// Unit propagation over the classical clause form of every rule.
    /// Returns false on conflict. Sound for pruning only: complete leaves
    /// still undergo the full stable-model check.
    fn propagate(&self, inn: &mut Interp, out: &mut Interp) -> bool {
        loop {
            let mut changed = false;
            for r in &self.rules {
                // Clause: some pos atom false, some naf atom true, or some
                // head atom true.
                let mut satisfied = false;
                let mut unassigned: Option<(usize, bool)> = None; // (atom, sign: true = must hold)
                let mut count = 0;
                for &p in &r.pos {
                    if *out & (1 << p) != 0 {
                        satisfied = true;
                    } else if *inn & (1 << p) == 0 {
                        count += 1;
                        unassigned = Some((p, false));
                    }
                }
                for &u in &r.naf {
                    if *inn & (1 << u) != 0 {
                        satisfied = true;
                    } else if *out & (1 << u) == 0 {
                        count += 1;
                        unassigned = Some((u, true));
                    }
                }
                for &h in &r.head {
                    if *inn & (1 << h) != 0 {
                        satisfied = true;
                    } else if *out & (1 << h) == 0 {
                        count += 1;
                        unassigned = Some((h, true));
                    }
                }
                if satisfied {
                    continue;
                }
                match (count, unassigned) {
                    (0, _) => return false,
                    (1, Some((atom, sign))) => {
                        if sign {
                            *inn |= 1 << atom;
                        } else {
                            *out |= 1 << atom;
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }
}
