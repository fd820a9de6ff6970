//! Satisfiability and ground query answering for hybrid knowledge bases.
//!
//! The two halves of a knowledge base are read under different
//! assumptions: the rule layer is closed-world, the ontology open-world.
//! The decision procedure reconciles them by guessing, for every ontology
//! query a ground rule instance can ask, whether the ontology answers yes
//! or no. Concretely, each rule instance contributes its ontology body as
//! one boolean conjunctive query (variables appearing only there stay
//! existential), and each ground ontology head atom contributes a
//! singleton query; structurally equal queries are one unit. A partition
//! of the units into an assumed-true part and an assumed-false part
//! reduces the rule layer to a ground disjunctive datalog program, the
//! residual: instances whose body unit is assumed false disappear,
//! instances with an assumed-true head unit are already satisfied, and
//! the surviving instances keep only their datalog parts.
//!
//! The knowledge base is satisfiable if some partition passes two checks:
//! the residual has a stable model, and the ontology extended by the
//! assumed-true queries neither becomes inconsistent nor entails any
//! assumed-false query. The second check runs on the chase of the
//! assertions plus the frozen assumed-true queries, looking for a
//! homomorphism from each assumed-false query.
//!
//! A ground conjunction is entailed exactly when adding its denial makes
//! the knowledge base unsatisfiable, so query answering reuses the same
//! search.
//!
//! Before any partitions are tried, rule instances whose positive datalog
//! body is underivable even under the most generous reading (negation as
//! failure ignored, ontology bodies granted, every datalog head disjunct
//! derived) are deleted: no residual of any partition can ever fire them,
//! and dropping them shrinks the unit set dramatically. The search visits
//! partitions assumed-false-first in canonical unit order, so the first
//! witness found is the canonically least assumed-true set; a naive
//! enumerator with the same visiting order serves as the test oracle.

use std::collections::BTreeSet;
use std::fmt;

use crate::datalog::{DatalogError, GroundProgram};
use crate::dl::{chase, depth_for, instance_satisfies_cq, Cq, Seed, Ucq};
use crate::kb::HybridKb;
use crate::syntax::{Atom, PredKind, Rule, Subst, Term};

/// Resource ceilings for one satisfiability question.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Partitions tested before giving up.
    pub max_partitions: u64,
    /// Distinct ground datalog atoms the residual programs may mention.
    pub max_herbrand: usize,
    /// Search nodes per stable-model question.
    pub datalog_budget: u64,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_partitions: 1 << 16, max_herbrand: 24, datalog_budget: 1 << 20 }
    }
}

/// A resource ceiling was hit; the question remains undecided.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReasonError {
    #[error("ground rule layer mentions {atoms} datalog atoms, above the ceiling of {limit}")]
    Herbrand { atoms: usize, limit: usize },
    #[error("grounding produced {count} rule instances, too many to reason over")]
    InstanceBlowup { count: usize },
    #[error("{count} ontology query units, above the representable 63")]
    UnitBlowup { count: usize },
    #[error("partition budget of {limit} exhausted")]
    PartitionBudget { limit: u64 },
    #[error("stable-model search budget exhausted")]
    DatalogBudget,
}

const MAX_INSTANCES: usize = 1 << 20;

/// One ground rule instance: datalog parts ground, the ontology body kept
/// as a unit index (variables occurring only there stayed existential).
#[derive(Clone, Debug)]
struct Instance {
    head_data: Vec<Atom>,
    head_units: Vec<usize>,
    pos: Vec<Atom>,
    naf: Vec<Atom>,
    body_unit: Option<usize>,
}

/// The grounded, simplified rule layer with its ontology query units.
pub struct Grounding {
    instances: Vec<Instance>,
    /// Canonically ordered, deduplicated ontology queries.
    pub units: Vec<Cq>,
    facts: Vec<Atom>,
}

impl Grounding {
    /// The residual ground datalog program for one assumed-true mask.
    fn residual(&self, gp: u64) -> Vec<Rule> {
        let mut rules = Vec::new();
        for inst in &self.instances {
            if let Some(u) = inst.body_unit {
                if gp >> u & 1 == 0 {
                    continue;
                }
            }
            if inst.head_units.iter().any(|&u| gp >> u & 1 == 1) {
                continue;
            }
            rules.push(Rule::new(
                inst.head_data.clone(),
                inst.pos.clone(),
                Vec::new(),
                inst.naf.clone(),
            ));
        }
        for f in &self.facts {
            rules.push(Rule::fact(f.clone()));
        }
        rules
    }

    fn datalog_atom_count(&self) -> usize {
        let mut atoms: BTreeSet<&Atom> = self.facts.iter().collect();
        for inst in &self.instances {
            atoms.extend(inst.head_data.iter());
            atoms.extend(inst.pos.iter());
            atoms.extend(inst.naf.iter());
        }
        atoms.len()
    }
}

/// A rule instance before unit extraction: ground datalog head, ground
/// ontology head, positive body, ontology body, negated body.
type RawInstance = (Vec<Atom>, Vec<Atom>, Vec<Atom>, Vec<Atom>, Vec<Atom>);

/// Ground one rule over the pool, leaving variables that occur only in
/// the ontology body existential, appending the instances to `raw`.
fn ground_rule_into(
    rule: &Rule,
    pool: &[String],
    raw: &mut Vec<RawInstance>,
) -> Result<(), ReasonError> {
    // Variables to ground: everything except those confined to the
    // ontology body.
    let mut ground_vars: BTreeSet<&str> = BTreeSet::new();
    for a in rule.head.iter().chain(&rule.pos).chain(&rule.naf) {
        a.vars(&mut ground_vars);
    }
    let shared: Vec<&str> = ground_vars.iter().copied().collect();
    if !shared.is_empty() && pool.is_empty() {
        // No constants to ground over: the rule has no instances.
        return Ok(());
    }
    let k = shared.len();
    let mut counters = vec![0usize; k];
    loop {
        let subst: Subst = shared
            .iter()
            .zip(&counters)
            .map(|(v, &c)| (v.to_string(), Term::Const(pool[c].clone())))
            .collect();
        let inst_head: Vec<Atom> = rule.head.iter().map(|a| a.apply(&subst)).collect();
        let head_data: Vec<Atom> =
            inst_head.iter().filter(|a| a.kind == PredKind::Data).cloned().collect();
        let head_onto: Vec<Atom> =
            inst_head.iter().filter(|a| a.kind != PredKind::Data).cloned().collect();
        raw.push((
            head_data,
            head_onto,
            rule.pos.iter().map(|a| a.apply(&subst)).collect(),
            rule.onto.iter().map(|a| a.apply(&subst)).collect(),
            rule.naf.iter().map(|a| a.apply(&subst)).collect(),
        ));
        if raw.len() > MAX_INSTANCES {
            return Err(ReasonError::InstanceBlowup { count: raw.len() });
        }
        // Next assignment.
        let mut i = 0;
        loop {
            if i == k {
                break;
            }
            counters[i] += 1;
            if counters[i] < pool.len() {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
        if k == 0 || i == k {
            break;
        }
    }
    Ok(())
}

/// Ground every rule over the constant pool, leaving variables that occur
/// only in ontology atoms existential, then drop instances whose positive
/// datalog body is underivable under the most generous reading.
pub fn ground(kb: &HybridKb, limits: &Limits) -> Result<Grounding, ReasonError> {
    let pool: Vec<String> = kb.constant_pool().into_iter().collect();
    let mut raw: Vec<RawInstance> = Vec::new();
    for rule in &kb.rules {
        ground_rule_into(rule, &pool, &mut raw)?;
    }
    // Relevance: iterate the datalog consequences under the most generous
    // reading and delete instances whose positive body cannot be covered.
    let mut derivable: BTreeSet<Atom> = kb.facts.iter().cloned().collect();
    loop {
        let mut changed = false;
        for (head_data, _, pos, _, _) in &raw {
            if pos.iter().all(|a| derivable.contains(a)) {
                for h in head_data {
                    if derivable.insert(h.clone()) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    raw.retain(|(_, _, pos, _, _)| pos.iter().all(|a| derivable.contains(a)));

    // Extract units: one per distinct ontology body query, one per
    // distinct ground ontology head atom.
    let mut unit_set: BTreeSet<Cq> = BTreeSet::new();
    for (_, head_onto, _, onto, _) in &raw {
        if !onto.is_empty() {
            unit_set.insert(Cq::new(onto.clone()));
        }
        for h in head_onto {
            unit_set.insert(Cq::new(vec![h.clone()]));
        }
    }
    let units: Vec<Cq> = unit_set.into_iter().collect();
    if units.len() > 63 {
        return Err(ReasonError::UnitBlowup { count: units.len() });
    }
    let index = |cq: &Cq| units.binary_search(cq).expect("unit was just inserted");
    let instances: Vec<Instance> = raw
        .into_iter()
        .map(|(head_data, head_onto, pos, onto, naf)| Instance {
            head_data,
            head_units: head_onto.iter().map(|h| index(&Cq::new(vec![h.clone()]))).collect(),
            pos,
            naf,
            body_unit: if onto.is_empty() { None } else { Some(index(&Cq::new(onto))) },
        })
        .collect();
    let grounding = Grounding { instances, units, facts: kb.facts.clone() };
    let atoms = grounding.datalog_atom_count();
    if atoms > limits.max_herbrand {
        return Err(ReasonError::Herbrand { atoms, limit: limits.max_herbrand });
    }
    Ok(grounding)
}

/// A satisfying partition with one stable model of its residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatWitness {
    /// Ontology queries assumed answered yes, in canonical order.
    pub assumed_true: Vec<Cq>,
    /// Ontology queries assumed answered no, in canonical order.
    pub assumed_false: Vec<Cq>,
    /// The canonically least stable model of the residual program.
    pub model: Vec<Atom>,
}

/// The outcome of a satisfiability question, with search statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatReport {
    pub witness: Option<SatWitness>,
    pub partitions_tested: u64,
    pub units: usize,
}

impl SatReport {
    pub fn satisfiable(&self) -> bool {
        self.witness.is_some()
    }
}

impl fmt::Display for SatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(
                f,
                "unsatisfiable ({} units, {} partitions tested)",
                self.units, self.partitions_tested
            ),
            Some(_) => write!(
                f,
                "satisfiable ({} units, {} partitions tested)",
                self.units, self.partitions_tested
            ),
        }
    }
}

/// Shared leaf test: does this partition satisfy both sides?
fn partition_works(
    kb: &HybridKb,
    grounding: &Grounding,
    gp: u64,
    limits: &Limits,
) -> Result<Option<Vec<Atom>>, ReasonError> {
    let residual = grounding.residual(gp);
    let program = GroundProgram::new(&residual).map_err(|e| match e {
        DatalogError::TooManyAtoms(atoms) => {
            ReasonError::Herbrand { atoms, limit: limits.max_herbrand }
        }
        _ => ReasonError::DatalogBudget,
    })?;
    let model = match program.first_stable_model(limits.datalog_budget) {
        Ok(Some(m)) => program.decode(m),
        Ok(None) => return Ok(None),
        Err(_) => return Err(ReasonError::DatalogBudget),
    };
    if ontology_accepts(kb, &grounding.units, gp) {
        Ok(Some(model))
    } else {
        Ok(None)
    }
}

/// Ontology side of one partition: the assumed-true queries frozen into
/// the assertions must stay consistent and must not entail any
/// assumed-false query.
fn ontology_accepts(kb: &HybridKb, units: &[Cq], gp: u64) -> bool {
    let mut seed = Seed::from_abox(&kb.abox);
    let mut frozen = 0usize;
    for (i, u) in units.iter().enumerate() {
        if gp >> i & 1 == 1 {
            let (s, used) = u.freeze(frozen);
            frozen += used;
            seed.concepts.extend(s.concepts);
            seed.roles.extend(s.roles);
        }
    }
    let assumed_false: Vec<Cq> = units
        .iter()
        .enumerate()
        .filter(|(i, _)| gp >> i & 1 == 0)
        .map(|(_, u)| u.clone())
        .collect();
    let ucq = Ucq { disjuncts: assumed_false.clone() };
    let inst = chase(&seed, &kb.tbox, depth_for(&ucq));
    if inst.clash(&kb.tbox) {
        return false;
    }
    !assumed_false.iter().any(|u| instance_satisfies_cq(&inst, u))
}

fn witness_for(grounding: &Grounding, gp: u64, model: Vec<Atom>) -> SatWitness {
    let (mut at, mut af) = (Vec::new(), Vec::new());
    for (i, u) in grounding.units.iter().enumerate() {
        if gp >> i & 1 == 1 {
            at.push(u.clone());
        } else {
            af.push(u.clone());
        }
    }
    SatWitness { assumed_true: at, assumed_false: af, model }
}

/// Decide satisfiability by depth-first search over partitions,
/// assumed-false branch first in canonical unit order. To anchor the
/// search, units already entailed by the assertions alone are pinned
/// assumed-true: putting them in the assumed-false part always fails the
/// ontology check.
pub fn nm_satisfiable(kb: &HybridKb, limits: &Limits) -> Result<SatReport, ReasonError> {
    let grounding = ground(kb, limits)?;
    let n = grounding.units.len();
    let base = chase(&Seed::from_abox(&kb.abox), &kb.tbox, {
        let all = Ucq { disjuncts: grounding.units.clone() };
        depth_for(&all)
    });
    let mut forced: u64 = 0;
    if !base.clash(&kb.tbox) {
        for (i, u) in grounding.units.iter().enumerate() {
            if instance_satisfies_cq(&base, u) {
                forced |= 1 << i;
            }
        }
    }
    let mut tested: u64 = 0;
    let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
    while let Some((i, gp)) = stack.pop() {
        if i == n {
            tested += 1;
            if tested > limits.max_partitions {
                return Err(ReasonError::PartitionBudget { limit: limits.max_partitions });
            }
            if let Some(model) = partition_works(kb, &grounding, gp, limits)? {
                return Ok(SatReport {
                    witness: Some(witness_for(&grounding, gp, model)),
                    partitions_tested: tested,
                    units: n,
                });
            }
            continue;
        }
        // Pushed second so it is tried first: the assumed-false branch.
        stack.push((i + 1, gp | 1 << i));
        if forced >> i & 1 == 0 {
            stack.push((i + 1, gp));
        }
    }
    Ok(SatReport { witness: None, partitions_tested: tested, units: n })
}

/// The brute-force twin of [`nm_satisfiable`]: enumerate every partition
/// by a binary counter whose most significant bit is the first unit, the
/// same visiting order the search uses, with no pinning and no pruning.
/// Kept as the oracle the search is tested against.
pub fn naive_nm_satisfiable(kb: &HybridKb, limits: &Limits) -> Result<SatReport, ReasonError> {
    let grounding = ground(kb, limits)?;
    let n = grounding.units.len();
    if (n as u64) >= 63 || 1u64 << n > limits.max_partitions {
        return Err(ReasonError::PartitionBudget { limit: limits.max_partitions });
    }
    let mut tested = 0;
    for c in 0..(1u64 << n) {
        let mut gp = 0u64;
        for i in 0..n {
            if c >> (n - 1 - i) & 1 == 1 {
                gp |= 1 << i;
            }
        }
        tested += 1;
        if let Some(model) = partition_works(kb, &grounding, gp, limits)? {
            return Ok(SatReport {
                witness: Some(witness_for(&grounding, gp, model)),
                partitions_tested: tested,
                units: n,
            });
        }
    }
    Ok(SatReport { witness: None, partitions_tested: tested, units: n })
}

/// Whether the knowledge base entails a ground conjunction of datalog and
/// ontology atoms: add its denial and test unsatisfiability.
pub fn entails_ground(kb: &HybridKb, query: &[Atom], limits: &Limits) -> Result<bool, ReasonError> {
    assert!(query.iter().all(Atom::is_ground), "queries are ground");
    let mut extended = kb.clone();
    let pos: Vec<Atom> = query.iter().filter(|a| a.kind == PredKind::Data).cloned().collect();
    let onto: Vec<Atom> = query.iter().filter(|a| a.kind != PredKind::Data).cloned().collect();
    extended.rules.push(Rule::denial(pos, onto, Vec::new()));
    Ok(!nm_satisfiable(&extended, limits)?.satisfiable())
}

/// One cached rule instance inside a [`SatContext`]: only its ontology
/// query indices remain; the datalog parts are already evaluated against
/// the fixed model, and instances they defeat are never stored.
#[derive(Clone, Debug)]
struct CtxInstance {
    head_units: Vec<usize>,
    body_unit: Option<usize>,
}

/// A candidate rule prepared for one satisfiability question: its fresh
/// ontology queries, its live instances over the combined unit indexing,
/// the unit assignments it forces, and the datalog atoms it adds.
struct Staged {
    fresh_units: Vec<Cq>,
    instances: Vec<CtxInstance>,
    pin_true: u64,
    pin_false: u64,
    violated: bool,
    new_atoms: usize,
}

/// A fixed background for a stream of joint satisfiability questions.
///
/// Discovery asks, thousands of times, whether the background, the
/// observed facts, every constraint accepted so far, and one fresh
/// candidate hold together. Re-grounding that ever-growing knowledge base
/// for each candidate repeats nearly all of the work, so this context
/// grounds the fixed part once and each accepted rule once.
///
/// The fast path applies when no rule anywhere derives a datalog atom,
/// which is the shape discovery produces: candidate heads over database
/// predicates are tested in body-moved form, and background rules with
/// ontology heads derive nothing on the database side. The facts are then
/// the only candidate stable model, so each ground instance collapses to
/// its ontology query indices, evaluated once against the facts; an
/// instance that forces a query one way pins it for every later question,
/// and the search runs only over the unpinned queries. A background rule
/// with a database head atom disables the fast path, and the context
/// falls back to assembling a full knowledge base per question, which
/// stays correct but no longer scales.
pub struct SatContext {
    base: HybridKb,
    accepted: Vec<Rule>,
    limits: Limits,
    pool: Vec<String>,
    flat: bool,
    /// The facts, closed under nothing: on the fast path no rule derives.
    model: BTreeSet<Atom>,
    units: Vec<Cq>,
    unit_ix: std::collections::BTreeMap<Cq, usize>,
    instances: Vec<CtxInstance>,
    pin_true: u64,
    pin_false: u64,
    /// A background constraint already fails on the facts alone.
    violated: bool,
    /// Distinct ground datalog atoms mentioned so far, for the ceiling.
    atoms: BTreeSet<Atom>,
}

impl SatContext {
    /// Build the context over a complete knowledge base. Constants that
    /// only candidate rules will mention, such as those fixed by bias
    /// templates, must be declared up front so every question grounds
    /// over the same pool.
    pub fn new(
        base: &HybridKb,
        extra_constants: &[String],
        limits: &Limits,
    ) -> Result<SatContext, ReasonError> {
        let mut pool: BTreeSet<String> = base.constant_pool();
        pool.extend(extra_constants.iter().cloned());
        let flat = base
            .rules
            .iter()
            .all(|r| r.head.iter().all(|a| a.kind != PredKind::Data));
        let mut ctx = SatContext {
            base: base.clone(),
            accepted: Vec::new(),
            limits: *limits,
            pool: pool.into_iter().collect(),
            flat,
            model: base.facts.iter().cloned().collect(),
            units: Vec::new(),
            unit_ix: std::collections::BTreeMap::new(),
            instances: Vec::new(),
            pin_true: 0,
            pin_false: 0,
            violated: false,
            atoms: BTreeSet::new(),
        };
        if ctx.flat {
            ctx.atoms.extend(ctx.model.iter().cloned());
            for rule in &base.rules.clone() {
                ctx.absorb(rule)?;
            }
        }
        Ok(ctx)
    }

    fn intern(&mut self, cq: Cq) -> Result<usize, ReasonError> {
        if let Some(&i) = self.unit_ix.get(&cq) {
            return Ok(i);
        }
        let i = self.units.len();
        if i + 1 > 63 {
            return Err(ReasonError::UnitBlowup { count: i + 1 });
        }
        self.units.push(cq.clone());
        self.unit_ix.insert(cq, i);
        Ok(i)
    }

    /// Ground one rule against the fixed model, keeping only instances
    /// the datalog side leaves undecided.
    fn ground_live(&self, rule: &Rule) -> Result<Vec<RawInstance>, ReasonError> {
        let mut raw = Vec::new();
        ground_rule_into(rule, &self.pool, &mut raw)?;
        raw.retain(|(_, _, pos, _, naf)| {
            pos.iter().all(|a| self.model.contains(a))
                && !naf.iter().any(|a| self.model.contains(a))
        });
        Ok(raw)
    }

    /// Fold a rule into the cached state. Fast path only.
    fn absorb(&mut self, rule: &Rule) -> Result<(), ReasonError> {
        for (head_data, head_onto, pos, onto, naf) in self.ground_live(rule)? {
            debug_assert!(head_data.is_empty(), "fast path admits no datalog heads");
            self.atoms.extend(pos);
            self.atoms.extend(naf);
            if self.atoms.len() > self.limits.max_herbrand {
                return Err(ReasonError::Herbrand {
                    atoms: self.atoms.len(),
                    limit: self.limits.max_herbrand,
                });
            }
            let body_unit =
                if onto.is_empty() { None } else { Some(self.intern(Cq::new(onto))?) };
            let mut head_units = Vec::new();
            for h in head_onto {
                head_units.push(self.intern(Cq::new(vec![h]))?);
            }
            match (body_unit, head_units.as_slice()) {
                (None, []) => self.violated = true,
                (None, [u]) => self.pin_true |= 1 << u,
                (Some(u), []) => self.pin_false |= 1 << u,
                _ => {}
            }
            self.instances.push(CtxInstance { head_units, body_unit });
        }
        Ok(())
    }

    /// Prepare a candidate without touching the cache: fresh queries get
    /// indices past the cached ones.
    fn stage(&self, rule: &Rule) -> Result<Staged, ReasonError> {
        let mut staged = Staged {
            fresh_units: Vec::new(),
            instances: Vec::new(),
            pin_true: 0,
            pin_false: 0,
            violated: false,
            new_atoms: 0,
        };
        let mut fresh_ix: std::collections::BTreeMap<Cq, usize> =
            std::collections::BTreeMap::new();
        let mut seen_atoms: BTreeSet<Atom> = BTreeSet::new();
        let mut index = |cq: Cq, staged: &mut Staged| -> Result<usize, ReasonError> {
            if let Some(&i) = self.unit_ix.get(&cq) {
                return Ok(i);
            }
            if let Some(&i) = fresh_ix.get(&cq) {
                return Ok(i);
            }
            let i = self.units.len() + staged.fresh_units.len();
            if i + 1 > 63 {
                return Err(ReasonError::UnitBlowup { count: i + 1 });
            }
            staged.fresh_units.push(cq.clone());
            fresh_ix.insert(cq, i);
            Ok(i)
        };
        for (_, head_onto, pos, onto, naf) in self.ground_live(rule)? {
            for a in pos.into_iter().chain(naf) {
                if !self.atoms.contains(&a) && seen_atoms.insert(a) {
                    staged.new_atoms += 1;
                }
            }
            let body_unit = if onto.is_empty() {
                None
            } else {
                Some(index(Cq::new(onto), &mut staged)?)
            };
            let mut head_units = Vec::new();
            for h in head_onto {
                head_units.push(index(Cq::new(vec![h]), &mut staged)?);
            }
            match (body_unit, head_units.as_slice()) {
                (None, []) => staged.violated = true,
                (None, [u]) => staged.pin_true |= 1 << u,
                (Some(u), []) => staged.pin_false |= 1 << u,
                _ => {}
            }
            staged.instances.push(CtxInstance { head_units, body_unit });
        }
        Ok(staged)
    }

    /// Whether the background, the facts, the accepted rules, and this
    /// one candidate are jointly satisfiable. The candidate must carry no
    /// datalog head atom; discovery tests rules in body-moved form.
    pub fn satisfiable_with(&self, rule: &Rule) -> Result<bool, ReasonError> {
        let candidate_flat = rule.head.iter().all(|a| a.kind != PredKind::Data);
        if !self.flat || !candidate_flat {
            let mut kb = self.base.clone();
            kb.rules.extend(self.accepted.iter().cloned());
            kb.rules.push(rule.clone());
            return Ok(nm_satisfiable(&kb, &self.limits)?.satisfiable());
        }
        if self.violated {
            return Ok(false);
        }
        let staged = self.stage(rule)?;
        if staged.violated {
            return Ok(false);
        }
        if self.atoms.len() + staged.new_atoms > self.limits.max_herbrand {
            return Err(ReasonError::Herbrand {
                atoms: self.atoms.len() + staged.new_atoms,
                limit: self.limits.max_herbrand,
            });
        }
        let mut units = self.units.clone();
        units.extend(staged.fresh_units.iter().cloned());
        let n = units.len();
        let mut pin_true = self.pin_true | staged.pin_true;
        let pin_false = self.pin_false | staged.pin_false;
        if pin_true & pin_false != 0 {
            return Ok(false);
        }
        // Queries the assertions already entail can only be assumed true.
        let all = Ucq { disjuncts: units.clone() };
        let entailed = chase(&Seed::from_abox(&self.base.abox), &self.base.tbox, depth_for(&all));
        if !entailed.clash(&self.base.tbox) {
            for (i, u) in units.iter().enumerate() {
                if instance_satisfies_cq(&entailed, u) {
                    pin_true |= 1 << i;
                }
            }
        }
        if pin_true & pin_false != 0 {
            return Ok(false);
        }
        let free: Vec<usize> =
            (0..n).filter(|i| (pin_true | pin_false) >> i & 1 == 0).collect();
        let mut tested = 0u64;
        for choice in 0u64..1 << free.len() {
            tested += 1;
            if tested > self.limits.max_partitions {
                return Err(ReasonError::PartitionBudget { limit: self.limits.max_partitions });
            }
            let mut gp = pin_true;
            for (j, &i) in free.iter().enumerate() {
                if choice >> j & 1 == 1 {
                    gp |= 1 << i;
                }
            }
            let broken = self
                .instances
                .iter()
                .chain(&staged.instances)
                .any(|inst| {
                    if let Some(u) = inst.body_unit {
                        if gp >> u & 1 == 0 {
                            return false;
                        }
                    }
                    !inst.head_units.iter().any(|&u| gp >> u & 1 == 1)
                });
            if !broken && ontology_accepts(&self.base, &units, gp) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Fold an accepted rule into the cache so later questions test
    /// against it. The caller only accepts rules that just passed.
    pub fn accept(&mut self, rule: &Rule) -> Result<(), ReasonError> {
        self.accepted.push(rule.clone());
        if self.flat && rule.head.iter().any(|a| a.kind == PredKind::Data) {
            self.flat = false;
        }
        if self.flat {
            self.absorb(rule)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_ground_conjunction, parse_kb};

    fn kb(text: &str) -> HybridKb {
        let kb = parse_kb(text).unwrap();
        kb.validate().unwrap();
        kb
    }

    fn entails(kb: &HybridKb, q: &str) -> bool {
        entails_ground(kb, &parse_ground_conjunction(q).unwrap(), &Limits::default()).unwrap()
    }

    #[test]
    fn plain_datalog_closure_is_entailed() {
        let b = kb("rules { q(X) :- p(X). } facts { p(a). }");
        assert!(entails(&b, "q(a)"));
        assert!(entails(&b, "p(a), q(a)"));
        assert!(!entails(&b, "q(b)"));
    }

    #[test]
    fn negation_as_failure_is_closed_world() {
        let b = kb("rules { r(X) :- p(X), not q(X). } facts { p(a). }");
        assert!(entails(&b, "r(a)"));
        let b2 = kb("rules { r(X) :- p(X), not q(X). } facts { p(a). q(a). }");
        assert!(!entails(&b2, "r(a)"));
    }

    #[test]
    fn disjunctive_heads_entail_neither_disjunct() {
        let b = kb("rules { boy(a) v girl(a) :- reg(a). } facts { reg(a). }");
        assert!(nm_satisfiable(&b, &Limits::default()).unwrap().satisfiable());
        assert!(!entails(&b, "boy(a)"));
        assert!(!entails(&b, "girl(a)"));
    }

    #[test]
    fn ontology_body_gates_rule_firing() {
        let b = kb(
            "abox { MALE(john). } rules { man(X) :- grad(X), MALE(X). } facts { grad(john). grad(mary). }",
        );
        assert!(entails(&b, "man(john)"));
        assert!(!entails(&b, "man(mary)"));
    }

    #[test]
    fn existential_ontology_knowledge_fires_rules() {
        // Everyone has a father; the body variable Y stays existential.
        let b = kb("tbox { PERSON subClassOf some inv(FATHER) top. }
            abox { PERSON(c). }
            rules { fathered(X) :- reg(X), FATHER(Y,X). }
            facts { reg(c). reg(d). }");
        assert!(entails(&b, "fathered(c)"));
        assert!(!entails(&b, "fathered(d)"));
    }

    #[test]
    fn ontology_heads_flow_into_the_ontology() {
        let b = kb("tbox { FEMALE subClassOf not MALE. }
            rules { MALE(X) :- reg_m(X). }
            facts { reg_m(a). }");
        assert!(nm_satisfiable(&b, &Limits::default()).unwrap().satisfiable());
        assert!(entails(&b, "MALE(a)"));
        let clash = kb("tbox { FEMALE subClassOf not MALE. }
            abox { FEMALE(a). }
            rules { MALE(X) :- reg_m(X). }
            facts { reg_m(a). }");
        assert!(!nm_satisfiable(&clash, &Limits::default()).unwrap().satisfiable());
    }

    #[test]
    fn assertions_are_entailed_and_others_are_not() {
        let b = kb("abox { MALE(a). }");
        assert!(entails(&b, "MALE(a)"));
        assert!(!entails(&b, "MALE(b)"));
    }

    #[test]
    fn first_witness_prefers_assumed_false() {
        // One unit, deniable: the witness must put it in the false part.
        let b = kb("abox { PERSON(a). } rules { p(a) :- reg(a), MALE(a). } facts { reg(a). }");
        let report = nm_satisfiable(&b, &Limits::default()).unwrap();
        let w = report.witness.unwrap();
        assert_eq!(w.assumed_true.len(), 0);
        assert_eq!(w.assumed_false.len(), 1);
        assert!(!w.model.iter().any(|a| a.name == "p"));
    }

    #[test]
    fn relevance_deletes_unfireable_instances() {
        let b = kb("abox { PERSON(p). } rules { boy(X) :- e(X,c1), PERSON(X). } facts { e(p,c1). }");
        let g = ground(&b, &Limits::default()).unwrap();
        // Only the instance with a derivable body survives: one unit.
        assert_eq!(g.units.len(), 1);
    }

    #[test]
    fn search_and_enumeration_agree_with_identical_witnesses() {
        let texts = [
            "rules { q(X) :- p(X). } facts { p(a). }",
            "abox { MALE(john). } rules { man(X) :- grad(X), MALE(X). :- man(X), woman(X). } facts { grad(john). }",
            "tbox { FEMALE subClassOf not MALE. } abox { FEMALE(a). } rules { MALE(X) :- reg(X). } facts { reg(a). }",
            "tbox { PERSON subClassOf some inv(FATHER) MALE. } abox { PERSON(c). }
             rules { s(X) :- r(X), FATHER(Y,X). t(X) v u(X) :- s(X), not w(X). } facts { r(c). }",
        ];
        for t in texts {
            let b = kb(t);
            let fast = nm_satisfiable(&b, &Limits::default()).unwrap();
            let slow = naive_nm_satisfiable(&b, &Limits::default()).unwrap();
            assert_eq!(fast.witness, slow.witness, "on {t}");
        }
    }

    #[test]
    fn budgets_surface_as_errors() {
        // Unsatisfiable with two units, so all four partitions get tested.
        let b = kb("tbox { FEMALE subClassOf not MALE. }
            rules { MALE(X) :- m(X). FEMALE(X) :- f(X). } facts { m(a). f(a). }");
        assert!(!nm_satisfiable(&b, &Limits::default()).unwrap().satisfiable());
        let tiny = Limits { max_partitions: 2, ..Limits::default() };
        assert!(matches!(
            nm_satisfiable(&b, &tiny),
            Err(ReasonError::PartitionBudget { .. })
        ));
        let cramped = Limits { max_herbrand: 1, ..Limits::default() };
        assert!(matches!(nm_satisfiable(&b, &cramped), Err(ReasonError::Herbrand { .. })));
    }

    #[test]
    fn theorem_style_coherence_between_queries_and_satisfiability() {
        // Entailment of q is exactly unsatisfiability with the denial.
        let b = kb("rules { q(X) :- p(X), not r(X). } facts { p(a). }");
        let mut with_denial = b.clone();
        with_denial.rules.push(Rule::denial(
            vec![Atom::data("q", vec![Term::Const("a".into())])],
            Vec::new(),
            Vec::new(),
        ));
        let entailed = entails(&b, "q(a)");
        let unsat = !nm_satisfiable(&with_denial, &Limits::default()).unwrap().satisfiable();
        assert!(entailed && unsat);
    }
}
