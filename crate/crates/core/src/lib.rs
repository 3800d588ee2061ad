//! Deterministic generation and verification of logically obfuscated
//! reasoning problems across four task families: first-order-logic
//! entailment, kinship puzzles, number series, and direction paths.
//!
//! Every transformation is seeded and reproducible, and every obfuscated
//! output can be machine-checked against its base form: FOL rewrites are
//! verified by finite-model enumeration, kinship substitutions by a
//! family-graph resolver, series encodings by exact decoding, and
//! direction paths by rational net-displacement comparison.

pub mod eval;
pub mod fol;
pub mod kinship;
pub mod records;
pub mod rewrite;
pub mod sample;
pub mod semantics;
pub mod series;
pub mod spatial;
pub mod verify;

pub use fol::{Formula, Label, Problem, Term};
