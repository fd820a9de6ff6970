//! The ontology kernel: a bounded restricted chase, consistency checking,
//! and containment between boolean conjunctive queries.
//!
//! The fragment handled here keeps reasoning polynomial per chase step:
//! concept inclusions have a conjunction of atomic concepts on the left and
//! an atomic concept, negated atomic concept, or qualified existential on
//! the right; role inclusions relate possibly-inverse roles. Negated
//! atomics are the only source of inconsistency: a clash is an individual
//! asserted into both a concept and a concept its axioms forbid.
//!
//! The chase saturates a set of ground assertions: role edges are closed
//! under the role hierarchy, atomic inclusions fire whenever their left
//! side is satisfied, and existential inclusions invent a fresh labeled
//! null only when no existing witness serves (the restricted chase). Nulls
//! carry a depth, one more than the individual that required them, and
//! nulls beyond the depth bound are not created: the resulting instance is
//! therefore an under-approximation of the full canonical model, complete
//! for the bundled ontologies at the default bound and documented as
//! bounded elsewhere.
//!
//! Containment of a conjunctive query in a union of conjunctive queries is
//! decided the classical way: freeze the left query's variables into fresh
//! individuals, chase the frozen atoms, and look for a homomorphism from
//! some right disjunct into the chase; an inconsistent left side is
//! contained in anything, including the empty union.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kb::{Abox, ConceptRhs, RoleRef, Tbox};
use crate::syntax::{Atom, PredKind, Rule, Term};

/// A named individual or a labeled null invented by the chase.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ind {
    Named(String),
    Anon(u32),
}

impl fmt::Display for Ind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ind::Named(n) => write!(f, "{n}"),
            Ind::Anon(i) => write!(f, "_n{i}"),
        }
    }
}

/// Ground assertions to start a chase from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Seed {
    pub concepts: Vec<(String, Ind)>,
    pub roles: Vec<(String, Ind, Ind)>,
}

impl Seed {
    pub fn from_abox(abox: &Abox) -> Seed {
        Seed {
            concepts: abox
                .concepts
                .iter()
                .map(|(c, i)| (c.clone(), Ind::Named(i.clone())))
                .collect(),
            roles: abox
                .roles
                .iter()
                .map(|(r, s, o)| (r.clone(), Ind::Named(s.clone()), Ind::Named(o.clone())))
                .collect(),
        }
    }
}

/// A saturated instance: the output of the chase.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    concepts: BTreeMap<Ind, BTreeSet<String>>,
    roles: BTreeSet<(String, Ind, Ind)>,
    depth: BTreeMap<Ind, usize>,
    next_null: u32,
}

impl Instance {
    pub fn has_concept(&self, name: &str, ind: &Ind) -> bool {
        self.concepts.get(ind).is_some_and(|s| s.contains(name))
    }

    pub fn has_role(&self, name: &str, a: &Ind, b: &Ind) -> bool {
        self.roles.contains(&(name.to_string(), a.clone(), b.clone()))
    }

    pub fn individuals(&self) -> BTreeSet<Ind> {
        let mut out: BTreeSet<Ind> = self.concepts.keys().cloned().collect();
        for (_, a, b) in &self.roles {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out
    }

    pub fn concept_assertions(&self) -> impl Iterator<Item = (&str, &Ind)> {
        self.concepts
            .iter()
            .flat_map(|(i, cs)| cs.iter().map(move |c| (c.as_str(), i)))
    }

    pub fn role_assertions(&self) -> impl Iterator<Item = &(String, Ind, Ind)> {
        self.roles.iter()
    }

    fn add_concept(&mut self, name: &str, ind: &Ind) -> bool {
        self.concepts.entry(ind.clone()).or_default().insert(name.to_string())
    }

    fn add_role(&mut self, name: &str, a: &Ind, b: &Ind) -> bool {
        self.roles.insert((name.to_string(), a.clone(), b.clone()))
    }

    fn depth_of(&self, ind: &Ind) -> usize {
        self.depth.get(ind).copied().unwrap_or(0)
    }

    /// Whether the individual has an `edge`-successor satisfying `filler`.
    fn witness_exists(&self, ind: &Ind, edge: &RoleRef, filler: &Option<String>) -> bool {
        self.roles.iter().any(|(r, a, b)| {
            if r != &edge.name {
                return false;
            }
            let target = if edge.inverse {
                if b != ind {
                    return false;
                }
                a
            } else {
                if a != ind {
                    return false;
                }
                b
            };
            match filler {
                None => true,
                Some(c) => self.has_concept(c, target),
            }
        })
    }

    /// An individual asserted into a concept that one of its axioms
    /// forbids.
    pub fn clash(&self, tbox: &Tbox) -> bool {
        for ci in &tbox.concept_incls {
            if let ConceptRhs::NegAtomic(banned) = &ci.rhs {
                for (ind, types) in &self.concepts {
                    let _ = ind;
                    if ci.lhs.iter().all(|c| types.contains(c)) && types.contains(banned) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Saturate the seed under the ontology. Nulls are created only for
/// individuals whose depth is below `depth_bound`; the bound limits
/// invention, never the closure of asserted facts.
pub fn chase(seed: &Seed, tbox: &Tbox, depth_bound: usize) -> Instance {
    let mut inst = Instance::default();
    for (c, i) in &seed.concepts {
        inst.add_concept(c, i);
    }
    for (r, a, b) in &seed.roles {
        inst.add_role(r, a, b);
    }
    loop {
        let mut changed = false;
        // Role hierarchy closure.
        loop {
            let mut additions: Vec<(String, Ind, Ind)> = Vec::new();
            for ri in &tbox.role_incls {
                for (r, a, b) in &inst.roles {
                    if r != &ri.lhs.name {
                        continue;
                    }
                    let (x, y) = if ri.lhs.inverse { (b, a) } else { (a, b) };
                    let (s, t) = if ri.rhs.inverse { (y, x) } else { (x, y) };
                    if !inst.has_role(&ri.rhs.name, s, t) {
                        additions.push((ri.rhs.name.clone(), s.clone(), t.clone()));
                    }
                }
            }
            if additions.is_empty() {
                break;
            }
            for (r, a, b) in additions {
                inst.add_role(&r, &a, &b);
            }
            changed = true;
        }
        // Atomic concept closure.
        loop {
            let mut additions: Vec<(String, Ind)> = Vec::new();
            for ci in &tbox.concept_incls {
                if let ConceptRhs::Atomic(rhs) = &ci.rhs {
                    for ind in inst.individuals() {
                        let satisfied = ci
                            .lhs
                            .iter()
                            .all(|c| inst.has_concept(c, &ind));
                        if satisfied && !inst.has_concept(rhs, &ind) {
                            additions.push((rhs.clone(), ind));
                        }
                    }
                }
            }
            if additions.is_empty() {
                break;
            }
            for (c, i) in additions {
                inst.add_concept(&c, &i);
            }
            changed = true;
        }
        // Existential inclusions: one sweep of null invention, restricted
        // to individuals without an existing witness.
        let mut invented = false;
        for ci in tbox.concept_incls.clone() {
            if let ConceptRhs::Exists(edge, filler) = &ci.rhs {
                for ind in inst.individuals() {
                    let satisfied = ci.lhs.iter().all(|c| inst.has_concept(c, &ind));
                    if !satisfied || inst.witness_exists(&ind, edge, filler) {
                        continue;
                    }
                    if inst.depth_of(&ind) >= depth_bound {
                        continue;
                    }
                    let null = Ind::Anon(inst.next_null);
                    inst.next_null += 1;
                    inst.depth.insert(null.clone(), inst.depth_of(&ind) + 1);
                    if edge.inverse {
                        inst.add_role(&edge.name, &null, &ind);
                    } else {
                        inst.add_role(&edge.name, &ind, &null);
                    }
                    if let Some(c) = filler {
                        inst.add_concept(c, &null);
                    }
                    invented = true;
                }
            }
        }
        if !(changed || invented) {
            return inst;
        }
    }
}

/// A boolean conjunctive query: ontology atoms whose variables are
/// existential and whose constants are named individuals. Kept canonical
/// (sorted atoms, variables renamed) so queries compare structurally.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cq {
    atoms: Vec<Atom>,
}

impl Cq {
    /// Canonicalize ontology atoms into a query. Panics on datalog atoms;
    /// callers separate vocabularies first.
    pub fn new(atoms: Vec<Atom>) -> Cq {
        assert!(
            atoms.iter().all(|a| a.kind != PredKind::Data),
            "conjunctive queries hold ontology atoms only"
        );
        // Reuse rule canonicalization on the ontology section.
        let canon = Rule::new(Vec::new(), Vec::new(), atoms, Vec::new());
        Cq { atoms: canon.onto }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_ground(&self) -> bool {
        self.atoms.iter().all(Atom::is_ground)
    }

    /// Replace every variable by a fresh frozen individual, offsetting
    /// names by `start` so several queries can be frozen apart. Returns the
    /// resulting assertions and the number of variables consumed.
    pub fn freeze(&self, start: usize) -> (Seed, usize) {
        let mut map: BTreeMap<String, Ind> = BTreeMap::new();
        let mut seed = Seed::default();
        let mut used = 0;
        let ind_of = |t: &Term, map: &mut BTreeMap<String, Ind>, used: &mut usize| match t {
            Term::Const(c) => Ind::Named(c.clone()),
            Term::Var(v) => map
                .entry(v.clone())
                .or_insert_with(|| {
                    let ind = Ind::Named(format!("_f{}", start + *used));
                    *used += 1;
                    ind
                })
                .clone(),
        };
        for a in &self.atoms {
            match a.kind {
                PredKind::Concept => {
                    let i = ind_of(&a.args[0], &mut map, &mut used);
                    seed.concepts.push((a.name.clone(), i));
                }
                PredKind::Role => {
                    let s = ind_of(&a.args[0], &mut map, &mut used);
                    let o = ind_of(&a.args[1], &mut map, &mut used);
                    seed.roles.push((a.name.clone(), s, o));
                }
                PredKind::Data => unreachable!("checked at construction"),
            }
        }
        (seed, used)
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A union (disjunction) of conjunctive queries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ucq {
    pub disjuncts: Vec<Cq>,
}

/// Depth bound matched to the right side of a containment question: deep
/// enough to expose any witness a disjunct could map into, never below 2.
pub fn depth_for(q2: &Ucq) -> usize {
    q2.disjuncts.iter().map(|d| d.atoms.len()).max().unwrap_or(0).max(2)
}

/// Whether the instance satisfies the query: a homomorphism mapping
/// variables to individuals and constants to themselves.
pub fn instance_satisfies_cq(inst: &Instance, cq: &Cq) -> bool {
    fn assign(
        inst: &Instance,
        atoms: &[Atom],
        binding: &mut BTreeMap<String, Ind>,
    ) -> bool {
        let Some(atom) = atoms.first() else {
            return true;
        };
        let rest = &atoms[1..];
        match atom.kind {
            PredKind::Concept => {
                match term_binding(&atom.args[0], binding) {
                    Some(i) => {
                        inst.has_concept(&atom.name, &i) && assign(inst, rest, binding)
                    }
                    None => {
                        let v = atom.args[0].as_var().unwrap().to_string();
                        for (c, i) in inst.concept_assertions() {
                            if c == atom.name {
                                binding.insert(v.clone(), i.clone());
                                if assign(inst, rest, binding) {
                                    return true;
                                }
                                binding.remove(&v);
                            }
                        }
                        false
                    }
                }
            }
            PredKind::Role => {
                for (r, a, b) in inst.role_assertions() {
                    if *r != atom.name {
                        continue;
                    }
                    let mut local = binding.clone();
                    if match_term(&atom.args[0], a, &mut local)
                        && match_term(&atom.args[1], b, &mut local)
                    {
                        if assign(inst, rest, &mut local) {
                            *binding = local;
                            return true;
                        }
                    }
                }
                false
            }
            PredKind::Data => unreachable!("checked at construction"),
        }
    }

    fn term_binding(t: &Term, binding: &BTreeMap<String, Ind>) -> Option<Ind> {
        match t {
            Term::Const(c) => Some(Ind::Named(c.clone())),
            Term::Var(v) => binding.get(v).cloned(),
        }
    }

    fn match_term(t: &Term, target: &Ind, binding: &mut BTreeMap<String, Ind>) -> bool {
        match term_binding(t, binding) {
            Some(i) => i == *target,
            None => {
                binding.insert(t.as_var().unwrap().to_string(), target.clone());
                true
            }
        }
    }

    assign(inst, cq.atoms(), &mut BTreeMap::new())
}

/// `q1 ⊑ q2` under the ontology: freeze, chase, and map some disjunct in.
/// An inconsistent frozen side is contained in anything; the empty union
/// contains only inconsistent queries.
pub fn cq_ucq_containment(tbox: &Tbox, q1: &Cq, q2: &Ucq, depth_bound: usize) -> bool {
    let (seed, _) = q1.freeze(0);
    let inst = chase(&seed, tbox, depth_bound);
    if inst.clash(tbox) {
        return true;
    }
    q2.disjuncts.iter().any(|d| instance_satisfies_cq(&inst, d))
}

/// Consistency of the assertional part under the ontology.
pub fn is_abox_consistent(tbox: &Tbox, abox: &Abox) -> bool {
    let inst = chase(&Seed::from_abox(abox), tbox, 2);
    !inst.clash(tbox)
}
