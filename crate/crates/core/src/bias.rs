//! The language bias that delimits a hypothesis space, and the labeled
//! examples that score it.
//!
//! A bias names the datalog atom templates admitted positively and under
//! negation as failure, the concept and role names admitted from the
//! ontology side, an optional target predicate for example-driven
//! induction, and three size bounds. Templates fix some argument slots to
//! constants and leave the rest open, so `enrolled(_,c1)` admits exactly
//! the atoms over that predicate whose second argument is the constant
//! `c1`.

use std::collections::BTreeSet;
use std::fmt;

use crate::kb::HybridKb;
use crate::syntax::{Atom, PredKind};

/// A datalog atom shape: open slots are `None`, fixed slots carry the
/// constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Template {
    pub name: String,
    pub slots: Vec<Option<String>>,
}

impl Template {
    pub fn free(name: &str, arity: usize) -> Template {
        Template { name: name.to_string(), slots: vec![None; arity] }
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    /// Whether a datalog atom fits this shape: same predicate, same arity,
    /// and every fixed slot filled by exactly its constant.
    pub fn admits(&self, atom: &Atom) -> bool {
        atom.kind == PredKind::Data
            && atom.name == self.name
            && atom.args.len() == self.slots.len()
            && self.slots.iter().zip(&atom.args).all(|(slot, arg)| match slot {
                None => true,
                Some(c) => arg.as_const() == Some(c.as_str()),
            })
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slots.is_empty() {
            return write!(f, "{}/0", self.name);
        }
        write!(f, "{}(", self.name)?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                None => write!(f, "_")?,
                Some(c) => write!(f, "{c}")?,
            }
        }
        write!(f, ")")
    }
}

/// The hypothesis language: admitted atom shapes and search bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bias {
    pub target: Option<Template>,
    pub datalog_pos: Vec<Template>,
    pub datalog_neg: Vec<Template>,
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
    pub max_body_literals: usize,
    pub max_literal_size: usize,
    pub max_onto_steps: usize,
}

impl Default for Bias {
    fn default() -> Bias {
        Bias {
            target: None,
            datalog_pos: Vec::new(),
            datalog_neg: Vec::new(),
            concepts: Vec::new(),
            roles: Vec::new(),
            max_body_literals: 4,
            max_literal_size: 4,
            max_onto_steps: 2,
        }
    }
}

impl Bias {
    /// Internal consistency: the target may not also be admitted under
    /// negation as failure.
    pub fn check(&self) -> Result<(), String> {
        if let Some(t) = &self.target {
            for n in &self.datalog_neg {
                if n.name == t.name && n.arity() == t.arity() {
                    return Err(format!(
                        "target predicate {}/{} also listed under datalog_neg",
                        t.name,
                        t.arity()
                    ));
                }
            }
        }
        Ok(())
    }

    /// Every non-target template must name a predicate the knowledge base
    /// actually uses; the target is exempt because it is the predicate
    /// being invented.
    pub fn validate_against(&self, kb: &HybridKb) -> Result<(), String> {
        let mut data: BTreeSet<(String, usize)> = BTreeSet::new();
        let mut concepts: BTreeSet<String> = BTreeSet::new();
        let mut roles: BTreeSet<String> = BTreeSet::new();
        let mut note = |a: &Atom| match a.kind {
            PredKind::Data => {
                data.insert((a.name.clone(), a.args.len()));
            }
            PredKind::Concept => {
                concepts.insert(a.name.clone());
            }
            PredKind::Role => {
                roles.insert(a.name.clone());
            }
        };
        for r in &kb.rules {
            for a in r.sections() {
                note(a);
            }
        }
        for f in &kb.facts {
            note(f);
        }
        for ci in &kb.tbox.concept_incls {
            for l in &ci.lhs {
                concepts.insert(l.clone());
            }
            match &ci.rhs {
                crate::kb::ConceptRhs::Atomic(c) | crate::kb::ConceptRhs::NegAtomic(c) => {
                    concepts.insert(c.clone());
                }
                crate::kb::ConceptRhs::Exists(r, filler) => {
                    roles.insert(r.name.clone());
                    if let Some(c) = filler {
                        concepts.insert(c.clone());
                    }
                }
            }
        }
        for ri in &kb.tbox.role_incls {
            roles.insert(ri.lhs.name.clone());
            roles.insert(ri.rhs.name.clone());
        }
        for (c, _) in &kb.abox.concepts {
            concepts.insert(c.clone());
        }
        for (r, _, _) in &kb.abox.roles {
            roles.insert(r.clone());
        }
        for t in self.datalog_pos.iter().chain(&self.datalog_neg) {
            if !data.contains(&(t.name.clone(), t.arity())) {
                return Err(format!("template {t} names a predicate absent from the knowledge base"));
            }
        }
        for c in &self.concepts {
            if !concepts.contains(c) {
                return Err(format!("concept {c} absent from the knowledge base"));
            }
        }
        for r in &self.roles {
            if !roles.contains(r) {
                return Err(format!("role {r} absent from the knowledge base"));
            }
        }
        Ok(())
    }
}

/// Ground target atoms labeled positive or negative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Examples {
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    #[test]
    fn template_admits_matching_atoms_only() {
        let t = Template { name: "enrolled".into(), slots: vec![None, Some("c1".into())] };
        let yes = Atom::data("enrolled", vec![Term::Var("X".into()), Term::Const("c1".into())]);
        let wrong_const =
            Atom::data("enrolled", vec![Term::Var("X".into()), Term::Const("c2".into())]);
        let wrong_arity = Atom::data(
            "enrolled",
            vec![
                Term::Var("X".into()),
                Term::Const("c1".into()),
                Term::Const("ft".into()),
            ],
        );
        assert!(t.admits(&yes));
        assert!(!t.admits(&wrong_const));
        assert!(!t.admits(&wrong_arity));
    }

    #[test]
    fn target_clashing_with_negated_alphabet_is_rejected() {
        let bias = Bias {
            target: Some(Template::free("boy", 1)),
            datalog_neg: vec![Template::free("boy", 1)],
            ..Bias::default()
        };
        assert!(bias.check().is_err());
        let ok = Bias { target: Some(Template::free("boy", 1)), ..Bias::default() };
        assert!(ok.check().is_ok());
    }

    #[test]
    fn display_shapes_round_trip_visually() {
        let t = Template { name: "enrolled".into(), slots: vec![None, Some("c1".into())] };
        assert_eq!(t.to_string(), "enrolled(_,c1)");
        assert_eq!(Template::free("flag", 0).to_string(), "flag/0");
    }
}
