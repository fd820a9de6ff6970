//! Terms, atoms, and rules.
//!
//! The object language mixes two vocabularies over one shared pool of
//! constants:
//!
//! * ontology predicates: concept names (unary) and role names (binary),
//!   written capitalized (`PERSON`, `FATHER`), interpreted under the open
//!   world assumption;
//! * datalog predicates: any arity, written lowercase (`enrolled`),
//!   interpreted under the closed world assumption.
//!
//! A rule has the shape
//!
//! ```text
//! h1 v ... v hn :- r1, ..., rm, S1, ..., Sk, not u1, ..., not uh.
//! ```
//!
//! where the head disjuncts `hi` are datalog or ontology atoms, the `rj` are
//! positive datalog atoms, the `Sl` are ontology atoms, and the `uk` are
//! datalog atoms under negation as failure. `n = 0` gives a denial. Two
//! safeness conditions keep the semantics decidable:
//!
//! * datalog-safeness: every variable of the rule occurs in some `rj` or
//!   some `Sl`;
//! * weak safeness: every head variable occurs in some `rj`. Variables that
//!   occur only in ontology body atoms stay existentially quantified.
//!
//! Rules are kept in a canonical form: each section sorted and duplicate
//! free, variables renamed by a fixed scheme chosen to minimize the printed
//! form. Two rules are equal iff they are variants of each other.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A variable or constant. Variables are capitalized identifiers, constants
/// lowercase ones; the parser enforces the convention, the core types just
/// carry it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Which vocabulary a predicate belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredKind {
    Concept,
    Role,
    Data,
}

/// A predicate applied to terms. Concept atoms are unary, role atoms binary;
/// datalog atoms may have any arity including zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub kind: PredKind,
    pub name: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn concept(name: impl Into<String>, arg: Term) -> Atom {
        Atom { kind: PredKind::Concept, name: name.into(), args: vec![arg] }
    }

    pub fn role(name: impl Into<String>, a: Term, b: Term) -> Atom {
        Atom { kind: PredKind::Role, name: name.into(), args: vec![a, b] }
    }

    pub fn data(name: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom { kind: PredKind::Data, name: name.into(), args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        for t in &self.args {
            if let Term::Var(v) = t {
                out.insert(v);
            }
        }
    }

    pub fn constants<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        for t in &self.args {
            if let Term::Const(c) = t {
                out.insert(c);
            }
        }
    }

    pub fn apply(&self, subst: &Subst) -> Atom {
        Atom {
            kind: self.kind,
            name: self.name.clone(),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| t.clone()),
                    Term::Const(_) => t.clone(),
                })
                .collect(),
        }
    }

    /// Symbol occurrences minus distinct variables: the size measure used by
    /// the hypothesis-language bounds. `p(X,c)` has three symbols and one
    /// distinct variable, so size 2.
    pub fn literal_size(&self) -> usize {
        let mut vars = BTreeSet::new();
        self.vars(&mut vars);
        1 + self.args.len() - vars.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.name);
        }
        write!(f, "{}(", self.name)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// Variable-to-term substitution.
pub type Subst = BTreeMap<String, Term>;

/// A rule in canonical form. Construct through [`Rule::new`], which sorts and
/// deduplicates each section and renames variables canonically; thereafter
/// structural equality coincides with equality up to variable renaming.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    /// Head disjuncts: datalog or ontology atoms. Empty for denials.
    pub head: Vec<Atom>,
    /// Positive datalog body atoms.
    pub pos: Vec<Atom>,
    /// Ontology body atoms.
    pub onto: Vec<Atom>,
    /// Datalog body atoms under negation as failure.
    pub naf: Vec<Atom>,
}

/// Canonical variable names, in the order they are assigned.
fn canonical_var(i: usize) -> String {
    const NAMES: [&str; 8] = ["X", "Y", "Z", "W", "V", "U", "T", "S"];
    if i < NAMES.len() {
        NAMES[i].to_string()
    } else {
        format!("V{i}")
    }
}

/// Above this many variables, canonicalization falls back from exact
/// minimization (factorial in the variable count) to a deterministic
/// first-occurrence scheme.
const EXACT_CANON_LIMIT: usize = 6;

impl Rule {
    pub fn new(head: Vec<Atom>, pos: Vec<Atom>, onto: Vec<Atom>, naf: Vec<Atom>) -> Rule {
        let mut r = Rule { head, pos, onto, naf };
        r.canonicalize();
        r
    }

    pub fn denial(pos: Vec<Atom>, onto: Vec<Atom>, naf: Vec<Atom>) -> Rule {
        Rule::new(Vec::new(), pos, onto, naf)
    }

    pub fn fact(atom: Atom) -> Rule {
        Rule::new(vec![atom], Vec::new(), Vec::new(), Vec::new())
    }

    pub fn is_denial(&self) -> bool {
        self.head.is_empty()
    }

    /// The empty clause: no head, no body. Unsatisfiable on its own; the
    /// seed of constraint discovery.
    pub fn empty_clause() -> Rule {
        Rule { head: Vec::new(), pos: Vec::new(), onto: Vec::new(), naf: Vec::new() }
    }

    pub fn is_empty_clause(&self) -> bool {
        self.head.is_empty() && self.body_len() == 0
    }

    pub fn body_len(&self) -> usize {
        self.pos.len() + self.onto.len() + self.naf.len()
    }

    pub fn sections(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().chain(&self.pos).chain(&self.onto).chain(&self.naf)
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for a in self.sections() {
            a.vars(&mut out);
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for a in self.sections() {
            a.constants(&mut out);
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.sections().all(Atom::is_ground)
    }

    /// Apply a substitution and re-canonicalize.
    pub fn apply(&self, subst: &Subst) -> Rule {
        Rule::new(
            self.head.iter().map(|a| a.apply(subst)).collect(),
            self.pos.iter().map(|a| a.apply(subst)).collect(),
            self.onto.iter().map(|a| a.apply(subst)).collect(),
            self.naf.iter().map(|a| a.apply(subst)).collect(),
        )
    }

    fn rename(&self, map: &BTreeMap<&str, String>) -> Rule {
        let ren = |atoms: &[Atom]| {
            atoms
                .iter()
                .map(|a| Atom {
                    kind: a.kind,
                    name: a.name.clone(),
                    args: a
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Var(v) => Term::Var(map[v.as_str()].clone()),
                            Term::Const(_) => t.clone(),
                        })
                        .collect(),
                })
                .collect::<Vec<_>>()
        };
        let mut head = ren(&self.head);
        let mut pos = ren(&self.pos);
        let mut onto = ren(&self.onto);
        let mut naf = ren(&self.naf);
        for sec in [&mut head, &mut pos, &mut onto, &mut naf] {
            sec.sort();
            sec.dedup();
        }
        Rule { head, pos, onto, naf }
    }

    fn canonicalize(&mut self) {
        for sec in [&mut self.head, &mut self.pos, &mut self.onto, &mut self.naf] {
            sec.sort();
            sec.dedup();
        }
        let vars: Vec<&str> = self.vars().into_iter().collect();
        if vars.is_empty() {
            return;
        }
        let renamed = if vars.len() <= EXACT_CANON_LIMIT {
            // Try every assignment of canonical names to the variables and
            // keep the smallest resulting rule. Exact: variants always map
            // to the same representative.
            permutations(vars.len())
                .map(|perm| {
                    let map: BTreeMap<&str, String> =
                        vars.iter().zip(&perm).map(|(v, i)| (*v, canonical_var(*i))).collect();
                    self.rename(&map)
                })
                .min()
                .expect("at least one permutation")
        } else {
            // First-occurrence naming over the sorted sections. Deterministic
            // but may distinguish some variants; only reachable for rules
            // with more variables than any bundled language produces.
            let mut order: Vec<&str> = Vec::new();
            for a in self.sections() {
                for t in &a.args {
                    if let Term::Var(v) = t {
                        if !order.contains(&v.as_str()) {
                            order.push(v);
                        }
                    }
                }
            }
            let map: BTreeMap<&str, String> =
                order.iter().enumerate().map(|(i, v)| (*v, canonical_var(i))).collect();
            self.rename(&map)
        };
        *self = renamed;
    }
}

/// All permutations of `0..n`, generated in lexicographic order.
fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = Some((0..n).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        // Advance to the next permutation in place.
        let next = {
            let mut p = out.clone();
            let mut i = n.saturating_sub(1);
            while i > 0 && p[i - 1] >= p[i] {
                i -= 1;
            }
            if i == 0 {
                None
            } else {
                let mut j = n - 1;
                while p[j] <= p[i - 1] {
                    j -= 1;
                }
                p.swap(i - 1, j);
                p[i..].reverse();
                Some(p)
            }
        };
        current = next;
        Some(out)
    })
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for h in &self.head {
            if !first {
                write!(f, " v ")?;
            }
            write!(f, "{h}")?;
            first = false;
        }
        if self.body_len() == 0 {
            if self.head.is_empty() {
                return write!(f, ":- .");
            }
            return write!(f, "{}", ".");
        }
        if self.head.is_empty() {
            write!(f, ":- ")?;
        } else {
            write!(f, " :- ")?;
        }
        let mut first = true;
        for a in self.pos.iter().chain(&self.onto) {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
            first = false;
        }
        for a in &self.naf {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "not {a}")?;
            first = false;
        }
        write!(f, ".")
    }
}

/// Why a rule fails the shape conditions.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SafenessViolation {
    #[error("variable {0} occurs in no positive body atom")]
    DatalogUnsafe(String),
    #[error("head variable {0} occurs in no positive datalog body atom")]
    WeaklyUnsafe(String),
    #[error("atom {0} has the wrong arity for its predicate kind")]
    ArityMismatch(String),
    #[error("{0} (atom {1})")]
    KindMisplaced(String, String),
}

/// Check the two safeness conditions and the per-section kind and arity
/// constraints. The empty clause passes: it only ever exists as a search
/// seed.
pub fn validate_rule(rule: &Rule) -> Result<(), SafenessViolation> {
    for a in &rule.head {
        check_arity(a)?;
    }
    for a in &rule.pos {
        check_arity(a)?;
        if a.kind != PredKind::Data {
            return Err(SafenessViolation::KindMisplaced(
                "the positive datalog body takes datalog atoms only".into(),
                a.to_string(),
            ));
        }
    }
    for a in &rule.onto {
        check_arity(a)?;
        if a.kind == PredKind::Data {
            return Err(SafenessViolation::KindMisplaced(
                "the ontology body takes concept and role atoms only".into(),
                a.to_string(),
            ));
        }
    }
    for a in &rule.naf {
        check_arity(a)?;
        if a.kind != PredKind::Data {
            return Err(SafenessViolation::KindMisplaced(
                "negation as failure applies to datalog atoms only".into(),
                a.to_string(),
            ));
        }
    }
    let mut pos_vars = BTreeSet::new();
    for a in &rule.pos {
        a.vars(&mut pos_vars);
    }
    let mut safe_vars = pos_vars.clone();
    for a in &rule.onto {
        a.vars(&mut safe_vars);
    }
    for v in rule.vars() {
        if !safe_vars.contains(v) {
            return Err(SafenessViolation::DatalogUnsafe(v.to_string()));
        }
    }
    let mut head_vars = BTreeSet::new();
    for a in &rule.head {
        a.vars(&mut head_vars);
    }
    for v in head_vars {
        if !pos_vars.contains(v) {
            return Err(SafenessViolation::WeaklyUnsafe(v.to_string()));
        }
    }
    Ok(())
}

fn check_arity(a: &Atom) -> Result<(), SafenessViolation> {
    let ok = match a.kind {
        PredKind::Concept => a.args.len() == 1,
        PredKind::Role => a.args.len() == 2,
        PredKind::Data => true,
    };
    if ok {
        Ok(())
    } else {
        Err(SafenessViolation::ArityMismatch(a.to_string()))
    }
}
