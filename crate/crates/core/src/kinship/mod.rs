//! Kinship puzzles: a family graph with saturation axioms, a relation-word
//! vocabulary, chain parsing ("sister-in-law's husband of B"), branching
//! resolution over partial knowledge, and the substitution tables used to
//! obfuscate puzzle statements.

mod chain;
mod graph;
mod resolve;
mod tables;
mod words;

pub use chain::{parse_chain, parse_statement, AnchorRef, ChainStep, RelationChain};
pub use graph::{FamilyGraph, Gender, KinshipError, PersonId};
pub use resolve::{resolve, resolve_chain, Resolution, ResolveOptions, ResolvedBranch};
pub use tables::{
    substitute_once, tables, verify_entry, verify_kinship, AssumptionAtom, Level, Substitution,
    SubstitutionTables, TableEntry, Verdict,
};
pub use words::{name_relation, CanonicalRelation, PrimitiveStep, Reading};
