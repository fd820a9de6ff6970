//! The textual surface language: knowledge bases (`.hkb`), language bias
//! (`.bias`), and example sets (`.ex`), with round-trip serialization.
//!
//! A file is a sequence of named blocks, at most one of each kind:
//!
//! ```text
//! % persons and their enrollments
//! tbox {
//!   PERSON subClassOf some inv(FATHER) MALE.
//!   FEMALE subClassOf not MALE.
//!   MALE and PERSON subClassOf PERSON.
//!   WANTS_TO_MARRY subRoleOf LOVES.
//! }
//! abox { MALE(bob). FATHER(john,paul). }
//! rules { boy(X) v girl(X) :- enrolled(X,c1), not absent(X), PERSON(X). }
//! facts { enrolled(paul,c1). }
//! ```
//!
//! Capitalization declares vocabulary: concept and role names begin with
//! an uppercase letter, datalog predicates and constants with a lowercase
//! one, and an uppercase identifier in argument position is a variable.
//! Ontology predicates take one argument (concepts) or two (roles).
//! Comments run from `%` to end of line. Identifiers may not begin with an
//! underscore; that namespace is reserved for internally invented names,
//! which therefore never collide with user input.
//!
//! Bias blocks list atom templates (`enrolled(_,c1)` fixes a slot,
//! `boy/1` leaves all slots open), ontology alphabets, and bounds;
//! examples blocks list ground target atoms under `pos:` and `neg:`.
//!
//! Every error carries the line and column it was detected at, and no
//! input, however malformed, makes the parser panic. Serialization is the
//! inverse of parsing up to canonical variable renaming, which parsing
//! applies to every rule anyway.

use std::fmt;

use crate::bias::{Bias, Examples, Template};
use crate::kb::{Abox, ConceptIncl, ConceptRhs, HybridKb, RoleIncl, RoleRef, Tbox};
use crate::syntax::{validate_rule, Atom, PredKind, Rule, Term};

/// A parse failure at a specific point of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Wild,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Slash,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Wild => write!(f, "`_`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Arrow => write!(f, "`:-`"),
        }
    }
}

const RESERVED: &[&str] =
    &["v", "not", "and", "some", "top", "inv", "subClassOf", "subRoleOf"];

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>,
                        line: &mut usize,
                        col: &mut usize| {
            let c = chars.next();
            if c == Some('\n') {
                *line += 1;
                *col = 1;
            } else if c.is_some() {
                *col += 1;
            }
            c
        };
        match c {
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars, &mut line, &mut col);
                }
            }
            c if c.is_whitespace() => {
                bump(&mut chars, &mut line, &mut col);
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump(&mut chars, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                toks.push(Spanned { tok: Tok::Ident(s), line: tl, col: tc });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        bump(&mut chars, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let n = s.parse::<u64>().map_err(|_| ParseError {
                    line: tl,
                    col: tc,
                    msg: format!("number {s} is too large"),
                })?;
                toks.push(Spanned { tok: Tok::Int(n), line: tl, col: tc });
            }
            '_' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek().is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    return Err(ParseError {
                        line: tl,
                        col: tc,
                        msg: "identifiers may not begin with an underscore; that namespace is reserved".into(),
                    });
                }
                toks.push(Spanned { tok: Tok::Wild, line: tl, col: tc });
            }
            ':' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'-') {
                    bump(&mut chars, &mut line, &mut col);
                    toks.push(Spanned { tok: Tok::Arrow, line: tl, col: tc });
                } else {
                    toks.push(Spanned { tok: Tok::Colon, line: tl, col: tc });
                }
            }
            '{' | '}' | '(' | ')' | ',' | '.' | '/' => {
                bump(&mut chars, &mut line, &mut col);
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    _ => Tok::Slash,
                };
                toks.push(Spanned { tok, line: tl, col: tc });
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => self
                .toks
                .last()
                .map(|s| (s.line, s.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn err_at<T>(&self, span: (usize, usize), msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: span.0, col: span.1, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|s| &s.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let msg = format!("expected {want}, found {t}");
                self.err(msg)
            }
            None => self.err(format!("expected {want}, found end of input")),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn take_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// An identifier that is not a reserved word.
    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                if RESERVED.contains(&s.as_str()) {
                    let msg = format!("`{s}` is a reserved word and cannot name a {what}");
                    return self.err(msg);
                }
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => {
                let msg = format!("expected a {what} name, found {t}");
                self.err(msg)
            }
            None => self.err(format!("expected a {what} name, found end of input")),
        }
    }

    fn ont_name(&mut self, what: &str) -> Result<String, ParseError> {
        let span = self.here();
        let n = self.name(what)?;
        if !n.starts_with(|c: char| c.is_ascii_uppercase()) {
            return self.err_at(span, format!("{what} names begin with an uppercase letter, found `{n}`"));
        }
        Ok(n)
    }

    fn data_name(&mut self, what: &str) -> Result<String, ParseError> {
        let span = self.here();
        let n = self.name(what)?;
        if !n.starts_with(|c: char| c.is_ascii_lowercase()) {
            return self.err_at(span, format!("{what} names begin with a lowercase letter, found `{n}`"));
        }
        Ok(n)
    }

    fn role_ref(&mut self) -> Result<RoleRef, ParseError> {
        if self.take_keyword("inv") {
            self.expect(&Tok::LParen)?;
            let n = self.ont_name("role")?;
            self.expect(&Tok::RParen)?;
            Ok(RoleRef::inv(&n))
        } else {
            Ok(RoleRef::plain(&self.ont_name("role")?))
        }
    }

    /// `pred` or `pred(t1,...,tn)`; kind read off capitalization and arity.
    fn atom(&mut self) -> Result<(Atom, (usize, usize)), ParseError> {
        let span = self.here();
        let name = self.name("predicate")?;
        let upper = name.starts_with(|c: char| c.is_ascii_uppercase());
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            loop {
                let t = self.name("term")?;
                if t.starts_with(|c: char| c.is_ascii_uppercase()) {
                    args.push(Term::Var(t));
                } else {
                    args.push(Term::Const(t));
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        let atom = if upper {
            match args.len() {
                1 => Atom { kind: PredKind::Concept, name, args },
                2 => Atom { kind: PredKind::Role, name, args },
                n => {
                    return self.err_at(
                        span,
                        format!("ontology predicate `{name}` takes one or two arguments, found {n}"),
                    )
                }
            }
        } else {
            Atom { kind: PredKind::Data, name, args }
        };
        Ok((atom, span))
    }
}

/// Kind bookkeeping with spans so a clash points at the offending use.
#[derive(Default)]
struct Kinds {
    map: std::collections::BTreeMap<String, PredKind>,
}

impl Kinds {
    fn note(&mut self, name: &str, kind: PredKind, span: (usize, usize)) -> Result<(), ParseError> {
        match self.map.get(name) {
            Some(k) if *k != kind => Err(ParseError {
                line: span.0,
                col: span.1,
                msg: format!(
                    "predicate `{name}` used both as {} and as {}",
                    kind_word(*k),
                    kind_word(kind)
                ),
            }),
            _ => {
                self.map.insert(name.to_string(), kind);
                Ok(())
            }
        }
    }

    fn note_atom(&mut self, a: &Atom, span: (usize, usize)) -> Result<(), ParseError> {
        self.note(&a.name, a.kind, span)
    }
}

fn kind_word(k: PredKind) -> &'static str {
    match k {
        PredKind::Concept => "a concept",
        PredKind::Role => "a role",
        PredKind::Data => "a datalog predicate",
    }
}

/// Parse a knowledge base file: `tbox`, `abox`, `rules`, and `facts`
/// blocks, each at most once, in any order.
pub fn parse_kb(text: &str) -> Result<HybridKb, ParseError> {
    let mut p = Parser::new(text)?;
    let mut kb = HybridKb::default();
    let mut kinds = Kinds::default();
    let mut seen: Vec<String> = Vec::new();
    while p.peek().is_some() {
        let span = p.here();
        let block = p.name("block")?;
        if seen.contains(&block) {
            return p.err_at(span, format!("duplicate `{block}` block"));
        }
        seen.push(block.clone());
        p.expect(&Tok::LBrace)?;
        match block.as_str() {
            "tbox" => parse_tbox_block(&mut p, &mut kb.tbox, &mut kinds)?,
            "abox" => parse_abox_block(&mut p, &mut kb.abox, &mut kinds)?,
            "rules" => parse_rules_block(&mut p, &mut kb.rules, &mut kinds)?,
            "facts" => parse_facts_block(&mut p, &mut kb.facts, &mut kinds)?,
            "bias" | "examples" => {
                return p.err_at(span, format!("`{block}` block does not belong in a knowledge base file"))
            }
            other => return p.err_at(span, format!("unknown block `{other}`")),
        }
        p.expect(&Tok::RBrace)?;
    }
    Ok(kb)
}

fn parse_tbox_block(p: &mut Parser, tbox: &mut Tbox, kinds: &mut Kinds) -> Result<(), ParseError> {
    while p.peek() != Some(&Tok::RBrace) {
        let span = p.here();
        if p.peek().is_none() {
            return p.err("unclosed `tbox` block");
        }
        // Role inclusion when the statement starts with `inv(` or with a
        // name directly followed by `subRoleOf`.
        let role_incl = p.at_keyword("inv")
            || matches!((p.peek(), p.peek2()), (Some(Tok::Ident(_)), Some(Tok::Ident(k))) if k == "subRoleOf");
        if role_incl {
            let lhs = p.role_ref()?;
            if !p.take_keyword("subRoleOf") {
                return p.err("expected `subRoleOf`");
            }
            let rhs = p.role_ref()?;
            p.expect(&Tok::Dot)?;
            kinds.note(&lhs.name, PredKind::Role, span)?;
            kinds.note(&rhs.name, PredKind::Role, span)?;
            tbox.role_incls.push(RoleIncl { lhs, rhs });
            continue;
        }
        let mut lhs = std::collections::BTreeSet::new();
        lhs.insert(p.ont_name("concept")?);
        while p.take_keyword("and") {
            lhs.insert(p.ont_name("concept")?);
        }
        if !p.take_keyword("subClassOf") {
            return p.err("expected `subClassOf` or `and`");
        }
        let rhs = if p.take_keyword("not") {
            ConceptRhs::NegAtomic(p.ont_name("concept")?)
        } else if p.take_keyword("some") {
            let role = p.role_ref()?;
            kinds.note(&role.name, PredKind::Role, span)?;
            let filler = if p.take_keyword("top") { None } else { Some(p.ont_name("concept")?) };
            ConceptRhs::Exists(role, filler)
        } else {
            ConceptRhs::Atomic(p.ont_name("concept")?)
        };
        p.expect(&Tok::Dot)?;
        for c in &lhs {
            kinds.note(c, PredKind::Concept, span)?;
        }
        match &rhs {
            ConceptRhs::Atomic(c) | ConceptRhs::NegAtomic(c) => {
                kinds.note(c, PredKind::Concept, span)?
            }
            ConceptRhs::Exists(_, Some(c)) => kinds.note(c, PredKind::Concept, span)?,
            ConceptRhs::Exists(_, None) => {}
        }
        tbox.concept_incls.push(ConceptIncl { lhs, rhs });
    }
    Ok(())
}

fn parse_abox_block(p: &mut Parser, abox: &mut Abox, kinds: &mut Kinds) -> Result<(), ParseError> {
    while p.peek() != Some(&Tok::RBrace) {
        if p.peek().is_none() {
            return p.err("unclosed `abox` block");
        }
        let (atom, span) = p.atom()?;
        p.expect(&Tok::Dot)?;
        if atom.kind == PredKind::Data {
            return p.err_at(span, "assertions use concept or role predicates; datalog facts go in a `facts` block");
        }
        if !atom.is_ground() {
            return p.err_at(span, "assertions are about named individuals; variables are not allowed");
        }
        kinds.note_atom(&atom, span)?;
        match atom.kind {
            PredKind::Concept => abox
                .concepts
                .push((atom.name, atom.args[0].as_const().unwrap().to_string())),
            PredKind::Role => abox.roles.push((
                atom.name,
                atom.args[0].as_const().unwrap().to_string(),
                atom.args[1].as_const().unwrap().to_string(),
            )),
            PredKind::Data => unreachable!("rejected above"),
        }
    }
    Ok(())
}

fn parse_rules_block(
    p: &mut Parser,
    rules: &mut Vec<Rule>,
    kinds: &mut Kinds,
) -> Result<(), ParseError> {
    while p.peek() != Some(&Tok::RBrace) {
        if p.peek().is_none() {
            return p.err("unclosed `rules` block");
        }
        let span = p.here();
        let rule = parse_rule_stmt(p)?;
        for a in rule.sections() {
            kinds.note_atom(a, span)?;
        }
        validate_rule(&rule)
            .map_err(|v| ParseError { line: span.0, col: span.1, msg: v.to_string() })?;
        rules.push(rule);
    }
    Ok(())
}

/// One rule statement: `head :- body.`, `head.`, `:- body.`, or `:- .`.
fn parse_rule_stmt(p: &mut Parser) -> Result<Rule, ParseError> {
    let mut head = Vec::new();
    if p.peek() != Some(&Tok::Arrow) {
        loop {
            let (a, _) = p.atom()?;
            head.push(a);
            if !p.take_keyword("v") {
                break;
            }
        }
        if p.peek() == Some(&Tok::Dot) {
            p.pos += 1;
            return Ok(Rule::new(head, Vec::new(), Vec::new(), Vec::new()));
        }
    }
    p.expect(&Tok::Arrow)?;
    let mut pos = Vec::new();
    let mut onto = Vec::new();
    let mut naf = Vec::new();
    if p.peek() != Some(&Tok::Dot) {
        loop {
            if p.take_keyword("not") {
                let (a, _) = p.atom()?;
                naf.push(a);
            } else {
                let (a, _) = p.atom()?;
                match a.kind {
                    PredKind::Data => pos.push(a),
                    _ => onto.push(a),
                }
            }
            if p.peek() == Some(&Tok::Comma) {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.expect(&Tok::Dot)?;
    Ok(Rule::new(head, pos, onto, naf))
}

fn parse_facts_block(
    p: &mut Parser,
    facts: &mut Vec<Atom>,
    kinds: &mut Kinds,
) -> Result<(), ParseError> {
    while p.peek() != Some(&Tok::RBrace) {
        if p.peek().is_none() {
            return p.err("unclosed `facts` block");
        }
        let (atom, span) = p.atom()?;
        p.expect(&Tok::Dot)?;
        if atom.kind != PredKind::Data {
            return p.err_at(span, "facts use datalog predicates; assertions go in an `abox` block");
        }
        if !atom.is_ground() {
            return p.err_at(span, "facts must be ground");
        }
        kinds.note_atom(&atom, span)?;
        facts.push(atom);
    }
    Ok(())
}

/// Parse a language bias file: a single `bias` block. An empty file is the
/// default bias.
pub fn parse_bias(text: &str) -> Result<Bias, ParseError> {
    let mut p = Parser::new(text)?;
    let mut bias = Bias::default();
    if p.peek().is_none() {
        return Ok(bias);
    }
    let span = p.here();
    let block = p.name("block")?;
    if block != "bias" {
        return p.err_at(span, format!("expected a `bias` block, found `{block}`"));
    }
    p.expect(&Tok::LBrace)?;
    let mut seen: Vec<String> = Vec::new();
    while p.peek() != Some(&Tok::RBrace) {
        if p.peek().is_none() {
            return p.err("unclosed `bias` block");
        }
        let fspan = p.here();
        let field = p.name("field")?;
        if seen.contains(&field) {
            return p.err_at(fspan, format!("duplicate `{field}` field"));
        }
        seen.push(field.clone());
        p.expect(&Tok::Colon)?;
        match field.as_str() {
            "target" => bias.target = Some(parse_template(&mut p)?),
            "datalog_pos" => bias.datalog_pos = parse_template_list(&mut p)?,
            "datalog_neg" => bias.datalog_neg = parse_template_list(&mut p)?,
            "concepts" => bias.concepts = parse_name_list(&mut p, "concept")?,
            "roles" => bias.roles = parse_name_list(&mut p, "role")?,
            "max_body_literals" => bias.max_body_literals = parse_bound(&mut p)?,
            "max_literal_size" => bias.max_literal_size = parse_bound(&mut p)?,
            "max_onto_steps" => bias.max_onto_steps = parse_bound(&mut p)?,
            other => return p.err_at(fspan, format!("unknown bias field `{other}`")),
        }
        p.expect(&Tok::Dot)?;
    }
    p.expect(&Tok::RBrace)?;
    if p.peek().is_some() {
        return p.err("a bias file holds a single `bias` block");
    }
    bias.check().map_err(|msg| ParseError { line: span.0, col: span.1, msg })?;
    Ok(bias)
}

fn parse_template(p: &mut Parser) -> Result<Template, ParseError> {
    let name = p.data_name("datalog predicate")?;
    match p.peek() {
        Some(Tok::Slash) => {
            p.pos += 1;
            match p.next() {
                Some(Tok::Int(n)) => {
                    let n = *n;
                    if n > 16 {
                        return p.err("template arity beyond 16 is not supported");
                    }
                    Ok(Template::free(&name, n as usize))
                }
                _ => p.err("expected an arity after `/`"),
            }
        }
        Some(Tok::LParen) => {
            p.pos += 1;
            let mut slots = Vec::new();
            loop {
                match p.peek() {
                    Some(Tok::Wild) => {
                        p.pos += 1;
                        slots.push(None);
                    }
                    _ => slots.push(Some(p.data_name("constant")?)),
                }
                if p.peek() == Some(&Tok::Comma) {
                    p.pos += 1;
                } else {
                    break;
                }
            }
            p.expect(&Tok::RParen)?;
            Ok(Template { name, slots })
        }
        _ => p.err("expected `(` or `/arity` after the template name"),
    }
}

fn parse_template_list(p: &mut Parser) -> Result<Vec<Template>, ParseError> {
    let mut out = vec![parse_template(p)?];
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        out.push(parse_template(p)?);
    }
    Ok(out)
}

fn parse_name_list(p: &mut Parser, what: &str) -> Result<Vec<String>, ParseError> {
    let mut out = vec![p.ont_name(what)?];
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        out.push(p.ont_name(what)?);
    }
    Ok(out)
}

fn parse_bound(p: &mut Parser) -> Result<usize, ParseError> {
    match p.next() {
        Some(Tok::Int(n)) => {
            let n = *n;
            if n == 0 || n > 64 {
                return p.err("bounds must lie between 1 and 64");
            }
            Ok(n as usize)
        }
        _ => p.err("expected a number"),
    }
}

/// Parse an examples file: a single `examples` block with `pos:` and
/// `neg:` atom lists. An empty file means no examples.
pub fn parse_examples(text: &str) -> Result<Examples, ParseError> {
    let mut p = Parser::new(text)?;
    let mut ex = Examples::default();
    if p.peek().is_none() {
        return Ok(ex);
    }
    let span = p.here();
    let block = p.name("block")?;
    if block != "examples" {
        return p.err_at(span, format!("expected an `examples` block, found `{block}`"));
    }
    p.expect(&Tok::LBrace)?;
    while p.peek() != Some(&Tok::RBrace) {
        if p.peek().is_none() {
            return p.err("unclosed `examples` block");
        }
        let fspan = p.here();
        let field = p.name("label")?;
        p.expect(&Tok::Colon)?;
        let list = match field.as_str() {
            "pos" => &mut ex.pos,
            "neg" => &mut ex.neg,
            other => return p.err_at(fspan, format!("expected `pos` or `neg`, found `{other}`")),
        };
        loop {
            let (atom, aspan) = p.atom()?;
            if atom.kind != PredKind::Data || !atom.is_ground() {
                return p.err_at(aspan, "examples are ground datalog atoms");
            }
            list.push(atom);
            if p.peek() == Some(&Tok::Comma) {
                p.pos += 1;
            } else {
                break;
            }
        }
        p.expect(&Tok::Dot)?;
    }
    p.expect(&Tok::RBrace)?;
    if p.peek().is_some() {
        return p.err("an examples file holds a single `examples` block");
    }
    Ok(ex)
}

/// Parse one rule given as bare text, e.g. `boy(X) :- enrolled(X,c1,ft).`
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let mut p = Parser::new(text)?;
    let span = p.here();
    let rule = parse_rule_stmt(&mut p)?;
    if p.peek().is_some() {
        return p.err("trailing input after the rule");
    }
    validate_rule(&rule).map_err(|v| ParseError { line: span.0, col: span.1, msg: v.to_string() })?;
    Ok(rule)
}

/// Parse a ground conjunction `a1, ..., an` (trailing `.` optional), as
/// accepted by the query interface.
pub fn parse_ground_conjunction(text: &str) -> Result<Vec<Atom>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    if p.peek().is_none() {
        return p.err("expected a query atom");
    }
    loop {
        let (atom, span) = p.atom()?;
        if !atom.is_ground() {
            return p.err_at(span, "queries are ground; variables are not allowed");
        }
        out.push(atom);
        if p.peek() == Some(&Tok::Comma) {
            p.pos += 1;
        } else {
            break;
        }
    }
    if p.peek() == Some(&Tok::Dot) {
        p.pos += 1;
    }
    if p.peek().is_some() {
        return p.err("trailing input after the query");
    }
    Ok(out)
}

fn rhs_text(rhs: &ConceptRhs) -> String {
    match rhs {
        ConceptRhs::Atomic(c) => c.clone(),
        ConceptRhs::NegAtomic(c) => format!("not {c}"),
        ConceptRhs::Exists(r, Some(c)) => format!("some {r} {c}"),
        ConceptRhs::Exists(r, None) => format!("some {r} top"),
    }
}

/// Render a knowledge base in the surface syntax; empty blocks are
/// omitted, so the empty knowledge base serializes to the empty string.
pub fn serialize_kb(kb: &HybridKb) -> String {
    let mut out = String::new();
    if !(kb.tbox.concept_incls.is_empty() && kb.tbox.role_incls.is_empty()) {
        out.push_str("tbox {\n");
        for ci in &kb.tbox.concept_incls {
            let lhs = ci.lhs.iter().cloned().collect::<Vec<_>>().join(" and ");
            out.push_str(&format!("  {lhs} subClassOf {}.\n", rhs_text(&ci.rhs)));
        }
        for ri in &kb.tbox.role_incls {
            out.push_str(&format!("  {} subRoleOf {}.\n", ri.lhs, ri.rhs));
        }
        out.push_str("}\n");
    }
    if !(kb.abox.concepts.is_empty() && kb.abox.roles.is_empty()) {
        out.push_str("abox {\n");
        for (c, i) in &kb.abox.concepts {
            out.push_str(&format!("  {c}({i}).\n"));
        }
        for (r, s, o) in &kb.abox.roles {
            out.push_str(&format!("  {r}({s},{o}).\n"));
        }
        out.push_str("}\n");
    }
    if !kb.rules.is_empty() {
        out.push_str("rules {\n");
        for r in &kb.rules {
            out.push_str(&format!("  {r}\n"));
        }
        out.push_str("}\n");
    }
    if !kb.facts.is_empty() {
        out.push_str("facts {\n");
        for f in &kb.facts {
            out.push_str(&format!("  {f}.\n"));
        }
        out.push_str("}\n");
    }
    out
}

/// Render a bias block with every field explicit.
pub fn serialize_bias(b: &Bias) -> String {
    let mut out = String::from("bias {\n");
    if let Some(t) = &b.target {
        out.push_str(&format!("  target: {t}.\n"));
    }
    let list = |ts: &[Template]| ts.iter().map(Template::to_string).collect::<Vec<_>>().join(", ");
    if !b.datalog_pos.is_empty() {
        out.push_str(&format!("  datalog_pos: {}.\n", list(&b.datalog_pos)));
    }
    if !b.datalog_neg.is_empty() {
        out.push_str(&format!("  datalog_neg: {}.\n", list(&b.datalog_neg)));
    }
    if !b.concepts.is_empty() {
        out.push_str(&format!("  concepts: {}.\n", b.concepts.join(", ")));
    }
    if !b.roles.is_empty() {
        out.push_str(&format!("  roles: {}.\n", b.roles.join(", ")));
    }
    out.push_str(&format!("  max_body_literals: {}.\n", b.max_body_literals));
    out.push_str(&format!("  max_literal_size: {}.\n", b.max_literal_size));
    out.push_str(&format!("  max_onto_steps: {}.\n", b.max_onto_steps));
    out.push_str("}\n");
    out
}

/// Render an examples block.
pub fn serialize_examples(e: &Examples) -> String {
    let mut out = String::from("examples {\n");
    let list = |atoms: &[Atom]| atoms.iter().map(Atom::to_string).collect::<Vec<_>>().join(", ");
    if !e.pos.is_empty() {
        out.push_str(&format!("  pos: {}.\n", list(&e.pos)));
    }
    if !e.neg.is_empty() {
        out.push_str(&format!("  neg: {}.\n", list(&e.neg)));
    }
    out.push_str("}\n");
    out
}

/// Render a set of rules as a `rules` block; the empty theory is the empty
/// block.
pub fn serialize_theory(rules: &[Rule]) -> String {
    let mut out = String::from("rules {\n");
    for r in rules {
        out.push_str(&format!("  {r}\n"));
    }
    out.push_str("}\n");
    out
}
