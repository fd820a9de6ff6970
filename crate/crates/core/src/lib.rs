//! Hybrid knowledge bases pairing an ontology with disjunctive Datalog
//! rules under negation as failure, with decision procedures built on top:
//! satisfiability and ground query answering, a generality order on rules,
//! downward refinement operators, and two induction loops driven by them.
//!
//! The two components keep disjoint predicate alphabets: concepts and
//! roles live in the ontology, everything else in the rule layer. Rules may
//! consult the ontology in their bodies and, in the unrestricted variant,
//! conclude into it in their heads. The rule layer is read under the closed
//! world assumption, the ontology under the open one; the satisfiability
//! procedure in [`reason`] combines the two by splitting ground ontology
//! queries into an assumed-true and an assumed-false part and checking each
//! side with its native semantics.

pub mod bias;
pub mod datalog;
pub mod dl;
pub mod generality;
pub mod kb;
pub mod learn;
pub mod parse;
pub mod reason;
pub mod refine;
pub mod report;
pub mod syntax;
