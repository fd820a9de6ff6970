//! Hybrid knowledge bases: an ontology part paired with a datalog program.
//!
//! The ontology part is a lightweight description logic: concept inclusions
//! whose left side is a conjunction of atomic concepts and whose right side
//! is an atomic concept, a negated atomic concept, or a qualified existential
//! over a role or inverse role; plus role inclusions between (possibly
//! inverse) roles. The assertional part holds ground concept and role
//! memberships.
//!
//! The datalog part is a disjunctive program with negation as failure,
//! split into proper rules and ground facts.
//!
//! Both parts share one constant pool. Every constant mentioned anywhere in
//! the ontology is automatically part of the pool, so rule grounding ranges
//! over the full signature.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::syntax::{validate_rule, Atom, PredKind, Rule, SafenessViolation};

/// A role or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleRef {
    pub name: String,
    pub inverse: bool,
}

impl RoleRef {
    pub fn plain(name: impl Into<String>) -> RoleRef {
        RoleRef { name: name.into(), inverse: false }
    }

    pub fn inv(name: impl Into<String>) -> RoleRef {
        RoleRef { name: name.into(), inverse: true }
    }
}

impl fmt::Display for RoleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "inv({})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// Right side of a concept inclusion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptRhs {
    /// An atomic concept.
    Atomic(String),
    /// The complement of an atomic concept; the only source of clashes.
    NegAtomic(String),
    /// `some R C` / `some inv(R) C`; filler `None` is the top concept.
    Exists(RoleRef, Option<String>),
}

/// `C1 and ... and Cn subClassOf rhs` with atomic conjuncts on the left.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptIncl {
    pub lhs: BTreeSet<String>,
    pub rhs: ConceptRhs,
}

/// `R subRoleOf S`, either side possibly inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleIncl {
    pub lhs: RoleRef,
    pub rhs: RoleRef,
}

/// Terminological part of the ontology.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tbox {
    pub concept_incls: Vec<ConceptIncl>,
    pub role_incls: Vec<RoleIncl>,
}

impl Tbox {
    /// Direct told-subsumption edges between concept names: asserted
    /// inclusions with a single atomic concept on each side.
    pub fn concept_edges(&self) -> Vec<(&str, &str)> {
        self.concept_incls
            .iter()
            .filter_map(|ci| match (&ci.rhs, ci.lhs.len()) {
                (ConceptRhs::Atomic(rhs), 1) => {
                    Some((ci.lhs.iter().next().unwrap().as_str(), rhs.as_str()))
                }
                _ => None,
            })
            .collect()
    }

    /// Direct told-subsumption edges between role names: inclusions whose
    /// sides are both plain or both inverse.
    pub fn role_edges(&self) -> Vec<(&str, &str)> {
        self.role_incls
            .iter()
            .filter(|ri| ri.lhs.inverse == ri.rhs.inverse)
            .map(|ri| (ri.lhs.name.as_str(), ri.rhs.name.as_str()))
            .collect()
    }
}

/// Assertional part of the ontology.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Abox {
    /// `(concept, individual)` memberships.
    pub concepts: Vec<(String, String)>,
    /// `(role, subject, object)` memberships.
    pub roles: Vec<(String, String, String)>,
}

impl Abox {
    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.roles.is_empty()
    }
}

/// Ontology plus datalog program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HybridKb {
    pub tbox: Tbox,
    pub abox: Abox,
    pub rules: Vec<Rule>,
    pub facts: Vec<Atom>,
}

/// Why a knowledge base fails validation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("rule {rule}: {violation}")]
    UnsafeRule { rule: String, violation: SafenessViolation },
    #[error("fact {0} is not a ground datalog atom")]
    BadFact(String),
    #[error("name {0} is used as more than one predicate kind")]
    KindClash(String),
}

impl HybridKb {
    /// The shared constant pool: every constant of the program and of the
    /// ontology. Ontology constants are registered here so that grounding
    /// covers them even when no rule mentions them.
    pub fn constant_pool(&self) -> BTreeSet<String> {
        let mut pool = BTreeSet::new();
        for r in &self.rules {
            for c in r.constants() {
                pool.insert(c.to_string());
            }
        }
        for f in &self.facts {
            let mut cs = BTreeSet::new();
            f.constants(&mut cs);
            for c in cs {
                pool.insert(c.to_string());
            }
        }
        for (_, ind) in &self.abox.concepts {
            pool.insert(ind.clone());
        }
        for (_, s, o) in &self.abox.roles {
            pool.insert(s.clone());
            pool.insert(o.clone());
        }
        pool
    }

    /// Check rule safeness, fact groundness, and kind-consistency of every
    /// predicate name across the whole knowledge base.
    pub fn validate(&self) -> Result<(), KbError> {
        for r in &self.rules {
            validate_rule(r).map_err(|violation| KbError::UnsafeRule {
                rule: r.to_string(),
                violation,
            })?;
        }
        for f in &self.facts {
            if f.kind != PredKind::Data || !f.is_ground() {
                return Err(KbError::BadFact(f.to_string()));
            }
        }
        let mut kinds: BTreeMap<&str, PredKind> = BTreeMap::new();
        let mut seen: Vec<(&str, PredKind)> = Vec::new();
        for r in &self.rules {
            for a in r.sections() {
                seen.push((a.name.as_str(), a.kind));
            }
        }
        for f in &self.facts {
            seen.push((f.name.as_str(), f.kind));
        }
        for ci in &self.tbox.concept_incls {
            for l in &ci.lhs {
                seen.push((l, PredKind::Concept));
            }
            match &ci.rhs {
                ConceptRhs::Atomic(c) | ConceptRhs::NegAtomic(c) => {
                    seen.push((c, PredKind::Concept))
                }
                ConceptRhs::Exists(r, filler) => {
                    seen.push((r.name.as_str(), PredKind::Role));
                    if let Some(fc) = filler {
                        seen.push((fc, PredKind::Concept));
                    }
                }
            }
        }
        for ri in &self.tbox.role_incls {
            seen.push((ri.lhs.name.as_str(), PredKind::Role));
            seen.push((ri.rhs.name.as_str(), PredKind::Role));
        }
        for (c, _) in &self.abox.concepts {
            seen.push((c, PredKind::Concept));
        }
        for (r, _, _) in &self.abox.roles {
            seen.push((r, PredKind::Role));
        }
        // Datalog predicates of different arities are distinct, so kind
        // consistency is tracked by name only across vocabularies.
        for (name, kind) in seen {
            match kinds.get(name) {
                Some(k) if *k != kind => return Err(KbError::KindClash(name.to_string())),
                _ => {}
            }
            kinds.insert(name, kind);
        }
        Ok(())
    }
}

/// Reflexive-transitive told subsumption between two concept names or two
/// role names, read off the asserted atomic-to-atomic inclusion edges. This
/// is the cheap syntactic order used by the refinement side conditions; it
/// under-approximates entailed subsumption.
pub fn told_subsumption(sub: &str, sup: &str, kind: PredKind, tbox: &Tbox) -> bool {
    if sub == sup {
        return true;
    }
    let edges = match kind {
        PredKind::Concept => tbox.concept_edges(),
        PredKind::Role => tbox.role_edges(),
        PredKind::Data => return false,
    };
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([sub]);
    seen.insert(sub);
    while let Some(cur) = queue.pop_front() {
        for (a, b) in &edges {
            if *a == cur && seen.insert(b) {
                if *b == sup {
                    return true;
                }
                queue.push_back(b);
            }
        }
    }
    false
}

/// Length of the shortest told-subsumption path between two predicates, if
/// any: 0 for equal names, 1 for a direct edge, and so on.
pub fn told_distance(sub: &str, sup: &str, kind: PredKind, tbox: &Tbox) -> Option<usize> {
    if sub == sup {
        return Some(0);
    }
    let edges = match kind {
        PredKind::Concept => tbox.concept_edges(),
        PredKind::Role => tbox.role_edges(),
        PredKind::Data => return None,
    };
    let mut dist: BTreeMap<&str, usize> = BTreeMap::from([(sub, 0)]);
    let mut queue = VecDeque::from([sub]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[cur];
        for (a, b) in &edges {
            if *a == cur && !dist.contains_key(b) {
                if *b == sup {
                    return Some(d + 1);
                }
                dist.insert(b, d + 1);
                queue.push_back(b);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    fn tbox_chain() -> Tbox {
        // WANTS_TO_MARRY subRoleOf LOVES; MALE subClassOf PERSON;
        // FEMALE subClassOf PERSON; FEMALE subClassOf not MALE.
        Tbox {
            concept_incls: vec![
                ConceptIncl {
                    lhs: BTreeSet::from(["MALE".to_string()]),
                    rhs: ConceptRhs::Atomic("PERSON".into()),
                },
                ConceptIncl {
                    lhs: BTreeSet::from(["FEMALE".to_string()]),
                    rhs: ConceptRhs::Atomic("PERSON".into()),
                },
                ConceptIncl {
                    lhs: BTreeSet::from(["FEMALE".to_string()]),
                    rhs: ConceptRhs::NegAtomic("MALE".into()),
                },
            ],
            role_incls: vec![RoleIncl {
                lhs: RoleRef::plain("WANTS_TO_MARRY"),
                rhs: RoleRef::plain("LOVES"),
            }],
        }
    }

    #[test]
    fn told_subsumption_is_reflexive_and_follows_edges() {
        let t = tbox_chain();
        assert!(told_subsumption("MALE", "MALE", PredKind::Concept, &t));
        assert!(told_subsumption("MALE", "PERSON", PredKind::Concept, &t));
        assert!(!told_subsumption("PERSON", "MALE", PredKind::Concept, &t));
        assert!(told_subsumption("WANTS_TO_MARRY", "LOVES", PredKind::Role, &t));
        assert!(!told_subsumption("LOVES", "WANTS_TO_MARRY", PredKind::Role, &t));
    }

    #[test]
    fn negative_inclusions_are_not_told_edges() {
        let t = tbox_chain();
        assert!(!told_subsumption("FEMALE", "MALE", PredKind::Concept, &t));
    }

    #[test]
    fn told_distance_counts_direct_edges() {
        let mut t = tbox_chain();
        t.concept_incls.push(ConceptIncl {
            lhs: BTreeSet::from(["BOY".to_string()]),
            rhs: ConceptRhs::Atomic("MALE".into()),
        });
        assert_eq!(told_distance("BOY", "BOY", PredKind::Concept, &t), Some(0));
        assert_eq!(told_distance("BOY", "MALE", PredKind::Concept, &t), Some(1));
        assert_eq!(told_distance("BOY", "PERSON", PredKind::Concept, &t), Some(2));
        assert_eq!(told_distance("PERSON", "BOY", PredKind::Concept, &t), None);
    }

    #[test]
    fn ontology_constants_join_the_pool() {
        let kb = HybridKb {
            abox: Abox {
                concepts: vec![("MALE".into(), "bob".into())],
                roles: vec![("FATHER".into(), "john".into(), "paul".into())],
            },
            facts: vec![Atom::data("enrolled", vec![Term::Const("paul".into()), Term::Const("c1".into())])],
            ..Default::default()
        };
        let pool = kb.constant_pool();
        for c in ["bob", "john", "paul", "c1"] {
            assert!(pool.contains(c), "missing {c}");
        }
    }

    #[test]
    fn kind_clash_is_reported() {
        let kb = HybridKb {
            abox: Abox { concepts: vec![("Boy".into(), "bob".into())], ..Default::default() },
            facts: vec![Atom { kind: PredKind::Data, name: "Boy".into(), args: vec![Term::Const("a".into())] }],
            ..Default::default()
        };
        assert_eq!(kb.validate(), Err(KbError::KindClash("Boy".into())));
    }
}
