//! Downward refinement of hybrid rules under a declarative language bias.
//!
//! Searching a space of rules needs a way to take one admissible rule and
//! produce the admissible rules one step below it. Two operators live here.
//! [`rho_view`] refines view-defining rules, whose single datalog head is
//! the induction target: it only ever strengthens the body, by adding a
//! positive datalog literal, a negated datalog literal, or an ontology
//! literal, or by replacing an ontology literal with a direct told
//! subconcept or subrole. [`rho_constraint`] refines disjunctive rules and
//! denials for integrity-theory discovery: it applies the same four body
//! moves and may additionally weaken the head, by adding a datalog or
//! ontology disjunct over body variables or by replacing a head ontology
//! literal with a direct told superpredicate.
//!
//! New body literals draw their arguments from the rule's variables plus at
//! most one fresh variable and must share a variable with the rule unless
//! the rule has none; new head literals draw only on variables of positive
//! datalog body atoms, which keeps every head weakly safe. Results that
//! break safeness or leave the bias are dropped, and the returned set is
//! canonical: rules are deduplicated up to variable renaming and iterate
//! in a fixed order.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bias::{Bias, Template};
use crate::kb::{told_distance, told_subsumption, Tbox};
use crate::syntax::{validate_rule, Atom, PredKind, Rule, Term};

/// Why refinement refused a rule. The operators refine only rules that lie
/// inside the language the bias declares.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RefineError {
    /// View refinement needs a target template to pin the head shape.
    #[error("the bias declares no target predicate, so there is no view language to search")]
    NoTarget,
    /// Constraint discovery has no distinguished predicate; a target in the
    /// bias signals the wrong mode.
    #[error("constraint refinement takes a bias without a target predicate")]
    UnexpectedTarget,
    /// View rules carry exactly one datalog head atom matching the target.
    #[error("rule `{0}` is not a view rule: {1}")]
    NotAView(String, String),
    /// The rule to refine already falls outside the bias.
    #[error("rule `{0}` falls outside the bias: {1}")]
    OutsideBias(String, String),
}

/// The first reason a rule falls outside the bias, or None if it fits.
/// Checks body length, per-literal size, alphabet membership, and the told
/// distance of each ontology literal from the bias alphabets.
pub fn bias_gap(rule: &Rule, bias: &Bias, tbox: &Tbox) -> Option<String> {
    if rule.body_len() > bias.max_body_literals {
        return Some(format!(
            "body has {} literals, the bias allows {}",
            rule.body_len(),
            bias.max_body_literals
        ));
    }
    for atom in rule.sections() {
        if atom.literal_size() > bias.max_literal_size {
            return Some(format!(
                "literal {atom} has size {}, the bias allows {}",
                atom.literal_size(),
                bias.max_literal_size
            ));
        }
    }
    for atom in &rule.head {
        match atom.kind {
            PredKind::Data => match &bias.target {
                Some(t) => {
                    if !t.admits(atom) {
                        return Some(format!(
                            "head atom {atom} does not match the target template {t}"
                        ));
                    }
                }
                None => {
                    if !bias.datalog_pos.iter().any(|t| t.admits(atom)) {
                        return Some(format!(
                            "head atom {atom} matches no admitted datalog template"
                        ));
                    }
                }
            },
            PredKind::Concept | PredKind::Role => {
                if let Some(gap) = onto_gap(atom, bias, tbox) {
                    return Some(gap);
                }
            }
        }
    }
    for atom in &rule.pos {
        if !bias.datalog_pos.iter().any(|t| t.admits(atom)) {
            return Some(format!("body atom {atom} matches no admitted datalog template"));
        }
    }
    for atom in &rule.naf {
        if !bias.datalog_neg.iter().any(|t| t.admits(atom)) {
            return Some(format!(
                "negated atom {atom} matches no datalog template admitted under negation"
            ));
        }
    }
    for atom in &rule.onto {
        if let Some(gap) = onto_gap(atom, bias, tbox) {
            return Some(gap);
        }
    }
    None
}

/// Whether a rule lies inside the language the bias declares.
pub fn within_bias(rule: &Rule, bias: &Bias, tbox: &Tbox) -> bool {
    bias_gap(rule, bias, tbox).is_none()
}

/// Membership and told-distance check for one ontology atom.
fn onto_gap(atom: &Atom, bias: &Bias, tbox: &Tbox) -> Option<String> {
    let (listed, what) = match atom.kind {
        PredKind::Concept => (&bias.concepts, "concept"),
        PredKind::Role => (&bias.roles, "role"),
        PredKind::Data => unreachable!("datalog atoms are checked against templates"),
    };
    if !listed.iter().any(|n| *n == atom.name) {
        return Some(format!("{what} {} is not listed in the bias", atom.name));
    }
    let steps = listed
        .iter()
        .filter_map(|n| {
            let down = told_distance(&atom.name, n, atom.kind, tbox);
            let up = told_distance(n, &atom.name, atom.kind, tbox);
            match (down, up) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) => Some(a),
                (None, Some(b)) => Some(b),
                (None, None) => None,
            }
        })
        .min();
    match steps {
        Some(s) if s <= bias.max_onto_steps => None,
        Some(s) => Some(format!(
            "{what} {} sits {s} told steps from the bias alphabet, the bias allows {}",
            atom.name, bias.max_onto_steps
        )),
        None => Some(format!(
            "{what} {} is unreachable from the bias alphabet by told steps",
            atom.name
        )),
    }
}

/// One-step specializations of a view rule: the four body moves. The head
/// stays fixed. The input must carry exactly one datalog head atom matching
/// the bias target and must itself lie within the bias; the seed rule with
/// an empty body is admissible even though it is unsafe.
pub fn rho_view(rule: &Rule, bias: &Bias, tbox: &Tbox) -> Result<BTreeSet<Rule>, RefineError> {
    let target = bias.target.as_ref().ok_or(RefineError::NoTarget)?;
    let shape = match rule.head.as_slice() {
        [atom] if atom.kind == PredKind::Data => {
            if target.admits(atom) {
                None
            } else {
                Some(format!("head atom {atom} does not match the target template {target}"))
            }
        }
        [atom] => Some(format!("head atom {atom} is not a datalog atom")),
        [] => Some("the head is empty".to_string()),
        _ => Some("the head is disjunctive".to_string()),
    };
    if let Some(why) = shape {
        return Err(RefineError::NotAView(rule.to_string(), why));
    }
    if let Some(gap) = bias_gap(rule, bias, tbox) {
        return Err(RefineError::OutsideBias(rule.to_string(), gap));
    }
    let mut out = BTreeSet::new();
    add_body_refinements(rule, bias, tbox, &mut out);
    Ok(out)
}

/// One-step refinements of a disjunctive rule or denial: the four body
/// moves plus the three head moves. The bias must not declare a target.
pub fn rho_constraint(
    rule: &Rule,
    bias: &Bias,
    tbox: &Tbox,
) -> Result<BTreeSet<Rule>, RefineError> {
    if bias.target.is_some() {
        return Err(RefineError::UnexpectedTarget);
    }
    if let Some(gap) = bias_gap(rule, bias, tbox) {
        return Err(RefineError::OutsideBias(rule.to_string(), gap));
    }
    let mut out = BTreeSet::new();
    add_body_refinements(rule, bias, tbox, &mut out);
    add_head_refinements(rule, bias, tbox, &mut out);
    Ok(out)
}

/// Push a candidate if it survives safeness and the bias bounds.
fn keep(candidate: Rule, rule: &Rule, bias: &Bias, tbox: &Tbox, out: &mut BTreeSet<Rule>) {
    if candidate != *rule
        && validate_rule(&candidate).is_ok()
        && within_bias(&candidate, bias, tbox)
    {
        out.insert(candidate);
    }
}

/// A variable name not used by the rule, for the one fresh slot candidates
/// may introduce. Canonicalization renames it on construction.
fn fresh_var(rule: &Rule) -> String {
    let taken = rule.vars();
    (0..)
        .map(|i| format!("F{i}"))
        .find(|name| !taken.contains(name.as_str()))
        .expect("some candidate name is unused")
}

/// Whether a new body literal is linked to the rule: it shares a variable,
/// or the rule has no variables to share.
fn linked(atom: &Atom, rule_vars: &BTreeSet<&str>) -> bool {
    if rule_vars.is_empty() {
        return true;
    }
    let mut vs = BTreeSet::new();
    atom.vars(&mut vs);
    vs.iter().any(|v| rule_vars.contains(v))
}

/// Every filling of a template: fixed slots take their constant, open slots
/// range over the given variables. At most one fresh variable may be drawn,
/// though it may fill several slots.
fn template_atoms(t: &Template, vars: &BTreeSet<&str>, fresh: Option<&str>) -> Vec<Atom> {
    let mut fills: Vec<Vec<Term>> = vec![Vec::new()];
    for slot in &t.slots {
        let choices: Vec<Term> = match slot {
            Some(c) => vec![Term::Const(c.clone())],
            None => vars
                .iter()
                .map(|v| Term::Var((*v).to_string()))
                .chain(fresh.iter().map(|f| Term::Var((*f).to_string())))
                .collect(),
        };
        let mut next = Vec::with_capacity(fills.len() * choices.len());
        for partial in &fills {
            for choice in &choices {
                let mut f = partial.clone();
                f.push(choice.clone());
                next.push(f);
            }
        }
        fills = next;
    }
    fills.into_iter().map(|args| Atom::data(t.name.clone(), args)).collect()
}

/// Every filling of an ontology predicate's argument slots.
fn onto_atoms(name: &str, kind: PredKind, vars: &BTreeSet<&str>, fresh: Option<&str>) -> Vec<Atom> {
    let terms: Vec<Term> = vars
        .iter()
        .map(|v| Term::Var((*v).to_string()))
        .chain(fresh.iter().map(|f| Term::Var((*f).to_string())))
        .collect();
    match kind {
        PredKind::Concept => terms.iter().map(|t| Atom::concept(name, t.clone())).collect(),
        PredKind::Role => terms
            .iter()
            .flat_map(|a| terms.iter().map(move |b| Atom::role(name, a.clone(), b.clone())))
            .collect(),
        PredKind::Data => unreachable!("datalog atoms come from templates"),
    }
}

/// Direct told edges incident to `name`: subpredicates if `down`, else
/// superpredicates.
fn direct_told(name: &str, kind: PredKind, tbox: &Tbox, down: bool) -> Vec<String> {
    let edges = match kind {
        PredKind::Concept => tbox.concept_edges(),
        PredKind::Role => tbox.role_edges(),
        PredKind::Data => return Vec::new(),
    };
    let mut out: Vec<String> = edges
        .into_iter()
        .filter_map(|(sub, sup)| {
            if down && sup == name && sub != name {
                Some(sub.to_string())
            } else if !down && sub == name && sup != name {
                Some(sup.to_string())
            } else {
                None
            }
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The bias's ontology alphabet as (name, kind) pairs.
fn onto_alphabet(bias: &Bias) -> Vec<(&str, PredKind)> {
    bias.concepts
        .iter()
        .map(|n| (n.as_str(), PredKind::Concept))
        .chain(bias.roles.iter().map(|n| (n.as_str(), PredKind::Role)))
        .collect()
}

fn add_body_refinements(rule: &Rule, bias: &Bias, tbox: &Tbox, out: &mut BTreeSet<Rule>) {
    let rule_vars = rule.vars();
    let fresh = fresh_var(rule);

    // Add a positive datalog literal.
    for t in &bias.datalog_pos {
        for atom in template_atoms(t, &rule_vars, Some(&fresh)) {
            if !rule.pos.contains(&atom) && linked(&atom, &rule_vars) {
                let mut pos = rule.pos.clone();
                pos.push(atom);
                keep(
                    Rule::new(rule.head.clone(), pos, rule.onto.clone(), rule.naf.clone()),
                    rule,
                    bias,
                    tbox,
                    out,
                );
            }
        }
    }

    // Add a negated datalog literal.
    for t in &bias.datalog_neg {
        for atom in template_atoms(t, &rule_vars, Some(&fresh)) {
            if !rule.naf.contains(&atom) && linked(&atom, &rule_vars) {
                let mut naf = rule.naf.clone();
                naf.push(atom);
                keep(
                    Rule::new(rule.head.clone(), rule.pos.clone(), rule.onto.clone(), naf),
                    rule,
                    bias,
                    tbox,
                    out,
                );
            }
        }
    }

    // Add an ontology literal, unless an ontology literal already in the
    // body told-subsumes it; that rule is reached by replacement instead.
    for (name, kind) in onto_alphabet(bias) {
        let redundant = rule
            .onto
            .iter()
            .any(|s| s.kind == kind && told_subsumption(name, &s.name, kind, tbox));
        if redundant {
            continue;
        }
        for atom in onto_atoms(name, kind, &rule_vars, Some(&fresh)) {
            if linked(&atom, &rule_vars) {
                let mut onto = rule.onto.clone();
                onto.push(atom);
                keep(
                    Rule::new(rule.head.clone(), rule.pos.clone(), onto, rule.naf.clone()),
                    rule,
                    bias,
                    tbox,
                    out,
                );
            }
        }
    }

    // Replace an ontology literal with a direct told subpredicate, keeping
    // its arguments.
    for (i, atom) in rule.onto.iter().enumerate() {
        for sub in direct_told(&atom.name, atom.kind, tbox, true) {
            let admitted = match atom.kind {
                PredKind::Concept => bias.concepts.contains(&sub),
                PredKind::Role => bias.roles.contains(&sub),
                PredKind::Data => false,
            };
            if !admitted {
                continue;
            }
            let mut onto = rule.onto.clone();
            onto[i] = Atom { kind: atom.kind, name: sub, args: atom.args.clone() };
            keep(
                Rule::new(rule.head.clone(), rule.pos.clone(), onto, rule.naf.clone()),
                rule,
                bias,
                tbox,
                out,
            );
        }
    }
}

fn add_head_refinements(rule: &Rule, bias: &Bias, tbox: &Tbox, out: &mut BTreeSet<Rule>) {
    // Head arguments come from positive datalog body atoms only, so every
    // new head literal is weakly safe by construction.
    let mut pos_vars = BTreeSet::new();
    for a in &rule.pos {
        a.vars(&mut pos_vars);
    }

    // Add a datalog disjunct, skipping atoms already in the head and atoms
    // in the positive body, which would make the rule a tautology.
    for t in &bias.datalog_pos {
        for atom in template_atoms(t, &pos_vars, None) {
            if !rule.head.contains(&atom) && !rule.pos.contains(&atom) {
                let mut head = rule.head.clone();
                head.push(atom);
                keep(
                    Rule::new(head, rule.pos.clone(), rule.onto.clone(), rule.naf.clone()),
                    rule,
                    bias,
                    tbox,
                    out,
                );
            }
        }
    }

    // Add an ontology disjunct, unless one already in the head
    // told-subsumes it, and skipping atoms in the ontology body.
    for (name, kind) in onto_alphabet(bias) {
        let redundant = rule
            .head
            .iter()
            .any(|p| p.kind == kind && told_subsumption(name, &p.name, kind, tbox));
        if redundant {
            continue;
        }
        for atom in onto_atoms(name, kind, &pos_vars, None) {
            if !rule.head.contains(&atom) && !rule.onto.contains(&atom) {
                let mut head = rule.head.clone();
                head.push(atom);
                keep(
                    Rule::new(head, rule.pos.clone(), rule.onto.clone(), rule.naf.clone()),
                    rule,
                    bias,
                    tbox,
                    out,
                );
            }
        }
    }

    // Replace a head ontology literal with a direct told superpredicate,
    // keeping its arguments.
    for (i, atom) in rule.head.iter().enumerate() {
        if atom.kind == PredKind::Data {
            continue;
        }
        for sup in direct_told(&atom.name, atom.kind, tbox, false) {
            let admitted = match atom.kind {
                PredKind::Concept => bias.concepts.contains(&sup),
                PredKind::Role => bias.roles.contains(&sup),
                PredKind::Data => false,
            };
            if !admitted {
                continue;
            }
            let mut head = rule.head.clone();
            head[i] = Atom { kind: atom.kind, name: sup, args: atom.args.clone() };
            keep(
                Rule::new(head, rule.pos.clone(), rule.onto.clone(), rule.naf.clone()),
                rule,
                bias,
                tbox,
                out,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_bias, parse_kb, parse_rule};

    fn celebrities_bias() -> Bias {
        parse_bias(
            "bias {\n\
             target: happy/1.\n\
             datalog_pos: famous/1.\n\
             concepts: RICH.\n\
             roles: LOVES, WANTS_TO_MARRY.\n\
             }",
        )
        .unwrap()
    }

    fn celebrities_tbox() -> Tbox {
        parse_kb(
            "tbox {\n\
             RICH and UNMARRIED subClassOf some inv(WANTS_TO_MARRY) top.\n\
             WANTS_TO_MARRY subRoleOf LOVES.\n\
             }",
        )
        .unwrap()
        .tbox
    }

    fn students_bias() -> Bias {
        parse_bias(
            "bias {\n\
             datalog_pos: boy/1, girl/1, enrolled(_,c1), enrolled(_,c2), enrolled(_,c3).\n\
             datalog_neg: boy/1, girl/1.\n\
             concepts: FEMALE, MALE, PERSON.\n\
             }",
        )
        .unwrap()
    }

    fn students_tbox() -> Tbox {
        parse_kb(
            "tbox {\n\
             PERSON subClassOf some inv(FATHER) MALE.\n\
             MALE subClassOf PERSON.\n\
             FEMALE subClassOf PERSON.\n\
             FEMALE subClassOf not MALE.\n\
             }",
        )
        .unwrap()
        .tbox
    }

    fn rules(texts: &[&str]) -> BTreeSet<Rule> {
        texts.iter().map(|t| parse_rule(t).unwrap()).collect()
    }

    /// The seed of view induction: target head, empty body. Unsafe by
    /// design, so it cannot come through the parser.
    fn seed() -> Rule {
        Rule::new(
            vec![Atom::data("happy", vec![Term::Var("X".into())])],
            Vec::new(),
            Vec::new(),
            Vec::new(),
        )
    }

    #[test]
    fn view_seed_refines_to_single_body_literal() {
        let bias = celebrities_bias();
        let tbox = celebrities_tbox();
        let set = rho_view(&seed(), &bias, &tbox).unwrap();
        assert!(set.contains(&parse_rule("happy(X) :- famous(X).").unwrap()));
        for r in &set {
            assert!(validate_rule(r).is_ok(), "unsafe refinement {r}");
        }
    }

    #[test]
    fn view_body_ontology_additions_reach_the_three_specializations() {
        let bias = celebrities_bias();
        let tbox = celebrities_tbox();
        let r1 = parse_rule("happy(X) :- famous(X).").unwrap();
        let set = rho_view(&r1, &bias, &tbox).unwrap();
        for expected in [
            "happy(X) :- famous(X), RICH(X).",
            "happy(X) :- famous(X), LOVES(Y,X).",
            "happy(X) :- famous(X), WANTS_TO_MARRY(Y,X).",
        ] {
            assert!(set.contains(&parse_rule(expected).unwrap()), "missing {expected}");
        }
        // The only datalog template is already in the body, and nothing is
        // admitted under negation, so every refinement adds ontology atoms.
        for r in &set {
            assert_eq!(r.pos.len(), 1, "unexpected datalog growth in {r}");
            assert!(r.naf.is_empty());
        }
    }

    #[test]
    fn view_replacement_specializes_a_role_one_told_edge_down() {
        let bias = celebrities_bias();
        let tbox = celebrities_tbox();
        let r3 = parse_rule("happy(X) :- famous(X), LOVES(Y,X).").unwrap();
        let set = rho_view(&r3, &bias, &tbox).unwrap();
        assert!(set.contains(&parse_rule("happy(X) :- famous(X), WANTS_TO_MARRY(Y,X).").unwrap()));
        // Adding a second LOVES atom subsumed by the one already present is
        // blocked; replacement is the only route to the subrole with the
        // same arguments.
        assert!(!set.iter().any(|r| r.onto.len() == 2
            && r.onto.iter().any(|a| a.name == "WANTS_TO_MARRY")
            && r.onto.iter().any(|a| a.name == "LOVES")));
    }

    #[test]
    fn view_rejects_rules_outside_the_view_language() {
        let bias = celebrities_bias();
        let tbox = celebrities_tbox();
        let denial = parse_rule(":- famous(X).").unwrap();
        assert!(matches!(rho_view(&denial, &bias, &tbox), Err(RefineError::NotAView(_, _))));
        let wrong_head = parse_rule("famous(X) :- famous(X), RICH(X).").unwrap();
        assert!(matches!(rho_view(&wrong_head, &bias, &tbox), Err(RefineError::NotAView(_, _))));
        let mut no_target = bias.clone();
        no_target.target = None;
        assert_eq!(rho_view(&seed(), &no_target, &tbox), Err(RefineError::NoTarget));
    }

    #[test]
    fn constraint_refinements_of_one_body_denial_match_the_worked_listing() {
        let bias = students_bias();
        let tbox = students_tbox();
        let start = parse_rule(":- enrolled(X,c1).").unwrap();
        let set = rho_constraint(&start, &bias, &tbox).unwrap();
        let expected = rules(&[
            // Positive datalog additions.
            ":- enrolled(X,c1), boy(X).",
            ":- enrolled(X,c1), girl(X).",
            ":- enrolled(X,c1), enrolled(X,c2).",
            ":- enrolled(X,c1), enrolled(X,c3).",
            // Negated datalog additions.
            ":- enrolled(X,c1), not boy(X).",
            ":- enrolled(X,c1), not girl(X).",
            // Ontology additions.
            ":- enrolled(X,c1), PERSON(X).",
            ":- enrolled(X,c1), FEMALE(X).",
            ":- enrolled(X,c1), MALE(X).",
            // Datalog head additions.
            "boy(X) :- enrolled(X,c1).",
            "girl(X) :- enrolled(X,c1).",
            "enrolled(X,c2) :- enrolled(X,c1).",
            "enrolled(X,c3) :- enrolled(X,c1).",
            // Ontology head additions.
            "PERSON(X) :- enrolled(X,c1).",
            "FEMALE(X) :- enrolled(X,c1).",
            "MALE(X) :- enrolled(X,c1).",
        ]);
        assert_eq!(set, expected);
    }

    #[test]
    fn constraint_refinements_of_the_empty_clause_are_single_literal_denials() {
        let bias = students_bias();
        let tbox = students_tbox();
        let set = rho_constraint(&Rule::empty_clause(), &bias, &tbox).unwrap();
        let expected = rules(&[
            ":- boy(X).",
            ":- girl(X).",
            ":- enrolled(X,c1).",
            ":- enrolled(X,c2).",
            ":- enrolled(X,c3).",
            ":- FEMALE(X).",
            ":- MALE(X).",
            ":- PERSON(X).",
        ]);
        assert_eq!(set, expected);
    }

    #[test]
    fn constraint_head_replacement_generalizes_one_told_edge_up() {
        let bias = students_bias();
        let tbox = students_tbox();
        let r = parse_rule("MALE(X) :- enrolled(X,c1).").unwrap();
        let set = rho_constraint(&r, &bias, &tbox).unwrap();
        assert!(set.contains(&parse_rule("PERSON(X) :- enrolled(X,c1).").unwrap()));
        // FEMALE is not a told superconcept of MALE, so it arrives only as
        // an extra disjunct, never as a replacement.
        assert!(set.contains(&parse_rule("MALE(X) v FEMALE(X) :- enrolled(X,c1).").unwrap()));
        assert!(!set.contains(&parse_rule("FEMALE(X) :- enrolled(X,c1).").unwrap()));
        // MALE told-subsumes itself, so it cannot be added as a disjunct.
        assert!(!set
            .iter()
            .any(|c| c.head.iter().filter(|a| a.name == "MALE").count() > 1));
    }

    #[test]
    fn constraint_mode_rejects_a_bias_with_a_target() {
        let bias = celebrities_bias();
        let tbox = celebrities_tbox();
        let r = Rule::empty_clause();
        assert_eq!(rho_constraint(&r, &bias, &tbox), Err(RefineError::UnexpectedTarget));
    }

    #[test]
    fn body_additions_stop_at_the_literal_bound() {
        let mut bias = students_bias();
        bias.max_body_literals = 2;
        let tbox = students_tbox();
        let r = parse_rule(":- enrolled(X,c1), PERSON(X).").unwrap();
        let set = rho_constraint(&r, &bias, &tbox).unwrap();
        for c in &set {
            assert!(c.body_len() <= 2, "{c} exceeds the body bound");
        }
        // Replacement and head addition still apply at the bound.
        assert!(set.contains(&parse_rule(":- enrolled(X,c1), MALE(X).").unwrap()));
        assert!(set.contains(&parse_rule(":- enrolled(X,c1), FEMALE(X).").unwrap()));
        assert!(set.contains(&parse_rule("boy(X) :- enrolled(X,c1), PERSON(X).").unwrap()));
        assert!(!set.iter().any(|c| c.body_len() > r.body_len()));
    }

    #[test]
    fn literal_size_bound_filters_wide_templates() {
        let mut bias = students_bias();
        bias.max_literal_size = 1;
        let tbox = students_tbox();
        let set = rho_constraint(&Rule::empty_clause(), &bias, &tbox).unwrap();
        // enrolled(X,c1) has size 2: three symbol occurrences, one distinct
        // variable. Only the unary templates and concepts survive.
        let expected =
            rules(&[":- boy(X).", ":- girl(X).", ":- FEMALE(X).", ":- MALE(X).", ":- PERSON(X)."]);
        assert_eq!(set, expected);
    }

    #[test]
    fn out_of_bias_input_is_refused_with_a_diagnostic() {
        let bias = students_bias();
        let tbox = students_tbox();
        let r = parse_rule(":- man(X).").unwrap();
        match rho_constraint(&r, &bias, &tbox) {
            Err(RefineError::OutsideBias(_, why)) => {
                assert!(why.contains("man"), "diagnostic should name the predicate: {why}")
            }
            other => panic!("expected an out-of-bias error, got {other:?}"),
        }
    }

    #[test]
    fn within_bias_checks_bounds_and_alphabets() {
        let bias = students_bias();
        let tbox = students_tbox();
        let fits = parse_rule(":- enrolled(X,c1), not girl(X), MALE(X).").unwrap();
        assert!(within_bias(&fits, &bias, &tbox));
        let long =
            parse_rule(":- boy(X), girl(X), enrolled(X,c1), enrolled(X,c2), enrolled(X,c3).")
                .unwrap();
        assert!(!within_bias(&long, &bias, &tbox));
        let foreign = parse_rule(":- enrolled(X,c1), FATHER(X,Y).").unwrap();
        assert!(!within_bias(&foreign, &bias, &tbox));
        // enrolled may appear only with its listed second arguments.
        let off_template = parse_rule(":- enrolled(X,c4).").unwrap();
        assert!(!within_bias(&off_template, &bias, &tbox));
        // not enrolled(...) is not admitted: negation lists only boy, girl.
        let neg = parse_rule(":- boy(X), not enrolled(X,c1).").unwrap();
        assert!(!within_bias(&neg, &bias, &tbox));
    }

    #[test]
    fn every_view_refinement_is_strictly_below_its_parent() {
        use crate::generality::strictly_more_general_view;
        use crate::reason::Limits;

        let limits = Limits::default();
        let k = parse_kb(
            "tbox {\n\
             RICH and UNMARRIED subClassOf some inv(WANTS_TO_MARRY) top.\n\
             WANTS_TO_MARRY subRoleOf LOVES.\n\
             }\n\
             rules { RICH(X) :- famous(X), not scientist(X). }",
        )
        .unwrap();
        let bias = celebrities_bias();
        let r1 = parse_rule("happy(X) :- famous(X).").unwrap();
        for r in rho_view(&r1, &bias, &k.tbox).unwrap() {
            assert!(
                strictly_more_general_view(&k, &r1, &r, &limits).unwrap(),
                "{r1} should be strictly above {r}"
            );
        }
    }

    #[test]
    fn constraint_refinements_sit_below_their_parent_but_not_always_strictly() {
        use crate::generality::{equivalent_rule, more_general_rule, strictly_more_general_rule};
        use crate::reason::Limits;

        let limits = Limits::default();
        let students = parse_kb(
            "tbox {\n\
             PERSON subClassOf some inv(FATHER) MALE.\n\
             MALE subClassOf PERSON.\n\
             FEMALE subClassOf PERSON.\n\
             FEMALE subClassOf not MALE.\n\
             }\n\
             abox { MALE(bob). PERSON(mary). PERSON(paul). }\n\
             rules { FEMALE(X) :- girl(X). MALE(X) :- boy(X). }",
        )
        .unwrap();
        let bias = students_bias();
        let parent = parse_rule("MALE(X) :- enrolled(X,c1).").unwrap();
        for r in rho_constraint(&parent, &bias, &students.tbox).unwrap() {
            assert!(
                more_general_rule(&students, &parent, &r, &limits).unwrap(),
                "{parent} should be above {r}"
            );
        }
        // Head weakening is usually strict, and replacement by a told
        // superconcept always is here.
        let person = parse_rule("PERSON(X) :- enrolled(X,c1).").unwrap();
        assert!(strictly_more_general_rule(&students, &parent, &person, &limits).unwrap());
        let girl = parse_rule("MALE(X) v girl(X) :- enrolled(X,c1).").unwrap();
        assert!(strictly_more_general_rule(&students, &parent, &girl, &limits).unwrap());
        // But adding the boy disjunct is closed back up by the knowledge
        // base's own rule MALE(X) :- boy(X): the refinement is equivalent
        // to its parent, a counterexample to strictness in general.
        let boy = parse_rule("MALE(X) v boy(X) :- enrolled(X,c1).").unwrap();
        assert!(equivalent_rule(&students, &parent, &boy, &limits).unwrap());
    }
}
