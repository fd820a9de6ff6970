//! Generality orders between rules, relative to a knowledge base.
//!
//! Two orders are provided, matching the two hypothesis languages. For
//! single-head view rules the order is generalized subsumption: R1 is
//! more general than R2 when, after freezing R2 by replacing its
//! variables with fresh constants, R1's head matches R2's frozen head and
//! the background knowledge together with R2's frozen body entails R1's
//! body. For disjunctive rules with possible ontology heads the order is
//! relative entailment: R1 is more general than R2 when the background
//! knowledge plus R1 entails the universal closure of R2, tested by
//! refutation on R2's frozen body and denied head atoms.
//!
//! Both reductions keep only the schema of the background: its ontology
//! axioms and its rules read classically (negation-as-failure literals
//! lifted into the head as extra disjuncts), with no assertions and no
//! facts. Negation-as-failure literals of the compared rules are treated
//! as opaque: matched by name against each other through a reserved
//! predicate renaming, never interpreted. Freezing uses reserved `_sk`
//! constants, so frozen rules cannot collide with user vocabulary.
//!
//! Satisfiability of each reduction is decided by the hybrid engine,
//! whose grounding already enumerates candidate bindings over the
//! reduction's constants, frozen constants included.

use std::collections::BTreeMap;

use crate::kb::HybridKb;
use crate::reason::{nm_satisfiable, Limits, ReasonError};
use crate::syntax::{Atom, PredKind, Rule, Subst, Term};

/// Replace every variable by a reserved `_sk{i}` constant, numbered by
/// first occurrence across head, positive body, ontology body, and
/// negated body in that order.
pub fn skolemize(rule: &Rule) -> Rule {
    let mut map: Subst = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for a in rule.head.iter().chain(&rule.pos).chain(&rule.onto).chain(&rule.naf) {
        for t in &a.args {
            if let Term::Var(v) = t {
                if !map.contains_key(v) {
                    map.insert(v.clone(), Term::Const(format!("_sk{}", order.len())));
                    order.push(v.clone());
                }
            }
        }
    }
    rule.apply(&map)
}

/// The classical reading of a rule set: each negation-as-failure literal
/// becomes an extra head disjunct.
pub fn classical_rewrite(rules: &[Rule]) -> Vec<Rule> {
    rules
        .iter()
        .map(|r| {
            let mut head = r.head.clone();
            head.extend(r.naf.iter().cloned());
            Rule::new(head, r.pos.clone(), r.onto.clone(), Vec::new())
        })
        .collect()
}

fn naf_marker(a: &Atom) -> Atom {
    Atom { kind: PredKind::Data, name: format!("_naf_{}", a.name), args: a.args.clone() }
}

/// The schema of the background: ontology axioms and classically read
/// rules, with assertions and facts left out.
fn reduction_base(k: &HybridKb) -> HybridKb {
    HybridKb {
        tbox: k.tbox.clone(),
        abox: Default::default(),
        rules: classical_rewrite(&k.rules),
        facts: Vec::new(),
    }
}

/// Assert the frozen body of a rule into the reduction: datalog atoms as
/// facts, negated atoms as marker facts, ontology atoms as assertions.
fn assert_frozen_body(reduction: &mut HybridKb, frozen: &Rule) {
    for a in &frozen.pos {
        reduction.facts.push(a.clone());
    }
    for a in &frozen.naf {
        reduction.facts.push(naf_marker(a));
    }
    for a in &frozen.onto {
        match a.kind {
            PredKind::Concept => reduction
                .abox
                .concepts
                .push((a.name.clone(), a.args[0].as_const().unwrap().to_string())),
            PredKind::Role => reduction.abox.roles.push((
                a.name.clone(),
                a.args[0].as_const().unwrap().to_string(),
                a.args[1].as_const().unwrap().to_string(),
            )),
            PredKind::Data => unreachable!("body sections keep their kinds"),
        }
    }
}

/// Match an atom with variables against a ground atom of the same
/// predicate, extending the substitution.
fn match_atom(pattern: &Atom, ground: &Atom, subst: &mut Subst) -> bool {
    if pattern.kind != ground.kind
        || pattern.name != ground.name
        || pattern.args.len() != ground.args.len()
    {
        return false;
    }
    for (p, g) in pattern.args.iter().zip(&ground.args) {
        match p {
            Term::Const(c) => {
                if ground_const(g) != Some(c.as_str()) {
                    return false;
                }
            }
            Term::Var(v) => match subst.get(v) {
                Some(bound) => {
                    if bound != g {
                        return false;
                    }
                }
                None => {
                    subst.insert(v.clone(), g.clone());
                }
            },
        }
    }
    true
}

fn ground_const(t: &Term) -> Option<&str> {
    match t {
        Term::Const(c) => Some(c),
        Term::Var(_) => None,
    }
}

/// Generalized subsumption for single-head view rules: does `general`
/// cover everything `specific` covers, relative to the background schema?
pub fn more_general_view(
    k: &HybridKb,
    general: &Rule,
    specific: &Rule,
    limits: &Limits,
) -> Result<bool, ReasonError> {
    debug_assert!(general.head.len() <= 1 && specific.head.len() <= 1);
    let frozen = skolemize(specific);
    // Heads must match: both denials, or the general head pattern against
    // the frozen specific head.
    let mut theta: Subst = BTreeMap::new();
    match (general.head.first(), frozen.head.first()) {
        (None, None) => {}
        (Some(gh), Some(sh)) => {
            if !match_atom(gh, sh, &mut theta) {
                return Ok(false);
            }
        }
        _ => return Ok(false),
    }
    let mut reduction = reduction_base(k);
    assert_frozen_body(&mut reduction, &frozen);
    // The general rule's body, under the head-matching bindings, becomes a
    // denial; its remaining variables are bound by the engine's grounding
    // over the reduction's constants.
    let body = general.apply(&theta);
    let mut pos: Vec<Atom> = body.pos.clone();
    pos.extend(body.naf.iter().map(naf_marker));
    reduction.rules.push(Rule::denial(pos, body.onto.clone(), Vec::new()));
    Ok(!nm_satisfiable(&reduction, limits)?.satisfiable())
}

/// Relative entailment for disjunctive rules: does the background schema
/// plus `general` entail the universal closure of `specific`?
pub fn more_general_rule(
    k: &HybridKb,
    general: &Rule,
    specific: &Rule,
    limits: &Limits,
) -> Result<bool, ReasonError> {
    let frozen = skolemize(specific);
    let mut reduction = reduction_base(k);
    assert_frozen_body(&mut reduction, &frozen);
    // Deny each frozen head atom.
    for h in &frozen.head {
        match h.kind {
            PredKind::Data => reduction.rules.push(Rule::denial(vec![h.clone()], Vec::new(), Vec::new())),
            _ => reduction.rules.push(Rule::denial(Vec::new(), vec![h.clone()], Vec::new())),
        }
    }
    // Add the general rule itself, negation-as-failure literals read as
    // their opaque markers.
    let mut pos = general.pos.clone();
    pos.extend(general.naf.iter().map(naf_marker));
    reduction.rules.push(Rule::new(
        general.head.clone(),
        pos,
        general.onto.clone(),
        Vec::new(),
    ));
    Ok(!nm_satisfiable(&reduction, limits)?.satisfiable())
}

pub fn equivalent_view(
    k: &HybridKb,
    a: &Rule,
    b: &Rule,
    limits: &Limits,
) -> Result<bool, ReasonError> {
    Ok(more_general_view(k, a, b, limits)? && more_general_view(k, b, a, limits)?)
}

pub fn strictly_more_general_view(
    k: &HybridKb,
    general: &Rule,
    specific: &Rule,
    limits: &Limits,
) -> Result<bool, ReasonError> {
    Ok(more_general_view(k, general, specific, limits)?
        && !more_general_view(k, specific, general, limits)?)
}

pub fn equivalent_rule(
    k: &HybridKb,
    a: &Rule,
    b: &Rule,
    limits: &Limits,
) -> Result<bool, ReasonError> {
    Ok(more_general_rule(k, a, b, limits)? && more_general_rule(k, b, a, limits)?)
}

pub fn strictly_more_general_rule(
    k: &HybridKb,
    general: &Rule,
    specific: &Rule,
    limits: &Limits,
) -> Result<bool, ReasonError> {
    Ok(more_general_rule(k, general, specific, limits)?
        && !more_general_rule(k, specific, general, limits)?)
}
