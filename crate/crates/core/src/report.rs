//! Deterministic renderings of reasoning and induction results.
//!
//! Each command has a text form for terminals and a JSON form for
//! machines. Identical inputs render byte-identically: JSON objects keep
//! their keys sorted, lists keep the order the engine produced, and no
//! timestamps or environment details leak in. The two forms always agree
//! on the verdict.
//!
//! Text output for the induction commands is itself a rules block in the
//! surface syntax, so a learned theory can be fed straight back in as a
//! knowledge base fragment; everything beyond the rules rides in trailing
//! `%` comment lines.

use serde_json::{json, Value};

use crate::learn::{DiscOutcome, LearnOutcome, Score, Theory};
use crate::parse::serialize_theory;
use crate::reason::SatReport;
use crate::syntax::Atom;

/// Final serialization: pretty-printed with sorted keys, one trailing
/// newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values built here always serialize");
    s.push('\n');
    s
}

pub fn check_sat_text(report: &SatReport, trace: bool) -> String {
    let verdict = if report.satisfiable() { "SAT" } else { "UNSAT" };
    let mut out = format!(
        "{verdict} ({} units, {} partitions tested)\n",
        report.units, report.partitions_tested
    );
    if trace {
        if let Some(w) = &report.witness {
            out.push_str("assumed true:\n");
            for cq in &w.assumed_true {
                out.push_str(&format!("  {cq}\n"));
            }
            out.push_str("assumed false:\n");
            for cq in &w.assumed_false {
                out.push_str(&format!("  {cq}\n"));
            }
            out.push_str("stable model:\n");
            for a in &w.model {
                out.push_str(&format!("  {a}\n"));
            }
        }
    }
    out
}

pub fn check_sat_json(report: &SatReport) -> Value {
    let witness = match &report.witness {
        None => Value::Null,
        Some(w) => json!({
            "assumed_true": w.assumed_true.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "assumed_false": w.assumed_false.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "model": w.model.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        }),
    };
    json!({
        "command": "check-sat",
        "satisfiable": report.satisfiable(),
        "units": report.units,
        "partitions_tested": report.partitions_tested,
        "witness": witness,
    })
}

pub fn query_text(entailed: bool) -> String {
    if entailed { "entailed\n".into() } else { "not entailed\n".into() }
}

pub fn query_json(query: &[Atom], entailed: bool) -> Value {
    json!({
        "command": "query",
        "query": query.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "entailed": entailed,
    })
}

fn theory_json(t: &Theory) -> Value {
    json!({
        "rules": t.rules.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "provenance": t.provenance.clone(),
    })
}

fn theory_text(t: &Theory, warnings: &[String]) -> String {
    let mut out = serialize_theory(&t.rules);
    for (i, why) in t.provenance.iter().enumerate() {
        out.push_str(&format!("% rule {}: {why}\n", i + 1));
    }
    for w in warnings {
        out.push_str(&format!("% warning: {w}\n"));
    }
    out
}

fn score_suffix(s: &Score) -> String {
    format!("[pos {}, neg {}, body {}]", s.pos_covered, s.neg_covered, s.body_len)
}

pub fn learn_text(out: &LearnOutcome, trace: bool) -> String {
    let mut text = theory_text(&out.theory, &out.warnings);
    if trace {
        for (i, step) in out.steps.iter().enumerate() {
            text.push_str(&format!("% step {} candidates:\n", i + 1));
            for (rule, score) in &step.scored {
                let marker = if *rule == step.chosen { "  <- chosen" } else { "" };
                text.push_str(&format!("%   {rule}  {}{marker}\n", score_suffix(score)));
            }
        }
    }
    text
}

pub fn learn_json(out: &LearnOutcome, trace: bool) -> Value {
    let mut v = json!({
        "command": "learn-view",
        "theory": theory_json(&out.theory),
        "warnings": out.warnings.clone(),
    });
    if trace {
        let steps: Vec<Value> = out
            .steps
            .iter()
            .map(|step| {
                json!({
                    "candidates": step
                        .scored
                        .iter()
                        .map(|(rule, s)| json!({
                            "rule": rule.to_string(),
                            "pos_covered": s.pos_covered,
                            "neg_covered": s.neg_covered,
                            "body_len": s.body_len,
                        }))
                        .collect::<Vec<_>>(),
                    "chosen": step.chosen.to_string(),
                })
            })
            .collect();
        v["steps"] = Value::Array(steps);
    }
    v
}

pub fn discover_text(out: &DiscOutcome, trace: bool) -> String {
    let mut text = theory_text(&out.theory, &out.warnings);
    if trace {
        text.push_str(&format!("% tested {} candidates:\n", out.tested.len()));
        for (rule, ok) in &out.tested {
            let verdict = if *ok { "accepted" } else { "violated" };
            text.push_str(&format!("%   {rule}  [{verdict}]\n"));
        }
    }
    text
}

pub fn discover_json(out: &DiscOutcome, trace: bool) -> Value {
    let mut v = json!({
        "command": "discover",
        "theory": theory_json(&out.theory),
        "warnings": out.warnings.clone(),
    });
    if trace {
        let tested: Vec<Value> = out
            .tested
            .iter()
            .map(|(rule, ok)| json!({ "rule": rule.to_string(), "accepted": ok }))
            .collect();
        v["tested"] = Value::Array(tested);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{LearnStep, Theory};
    use crate::parse::parse_rule;
    use crate::reason::{SatReport, SatWitness};

    #[test]
    fn satisfiability_text_carries_the_verdict_up_front() {
        let sat = SatReport {
            witness: Some(SatWitness {
                assumed_true: Vec::new(),
                assumed_false: Vec::new(),
                model: vec![crate::syntax::Atom::data(
                    "p",
                    vec![crate::syntax::Term::Const("a".into())],
                )],
            }),
            partitions_tested: 1,
            units: 0,
        };
        let text = check_sat_text(&sat, true);
        assert!(text.starts_with("SAT "));
        assert!(text.contains("stable model:\n  p(a)\n"));
        let unsat = SatReport { witness: None, partitions_tested: 4, units: 2 };
        assert!(check_sat_text(&unsat, false).starts_with("UNSAT "));
    }

    #[test]
    fn json_and_text_verdicts_agree() {
        let unsat = SatReport { witness: None, partitions_tested: 4, units: 2 };
        let v = check_sat_json(&unsat);
        assert_eq!(v["satisfiable"], serde_json::Value::Bool(false));
        assert!(v["witness"].is_null());
        assert_eq!(query_text(true), "entailed\n");
        assert_eq!(query_json(&[], true)["entailed"], serde_json::Value::Bool(true));
    }

    #[test]
    fn theory_text_is_a_loadable_rules_block() {
        let rule = parse_rule("PERSON(X) :- enrolled(X,c1).").unwrap();
        let out = DiscOutcome {
            theory: Theory { rules: vec![rule.clone()], provenance: vec!["kept".into()] },
            tested: vec![(rule.clone(), true)],
            warnings: vec!["take care".into()],
        };
        let text = discover_text(&out, true);
        let kb = crate::parse::parse_kb(&text).unwrap();
        assert_eq!(kb.rules, vec![rule]);
        assert!(text.contains("% warning: take care"));
        assert!(text.contains("[accepted]"));
    }

    #[test]
    fn learn_trace_marks_the_chosen_candidate() {
        let chosen = parse_rule("happy(X) :- famous(X).").unwrap();
        let out = LearnOutcome {
            theory: Theory::default(),
            steps: vec![LearnStep {
                scored: vec![(
                    chosen.clone(),
                    Score { pos_covered: 2, neg_covered: 1, body_len: 1 },
                )],
                chosen: chosen.clone(),
            }],
            warnings: Vec::new(),
        };
        let text = learn_text(&out, true);
        assert!(text.contains("<- chosen"));
        let v = learn_json(&out, true);
        assert_eq!(v["steps"][0]["chosen"], serde_json::Value::String(chosen.to_string()));
        let quiet = learn_json(&out, false);
        assert!(quiet.get("steps").is_none());
    }
}
