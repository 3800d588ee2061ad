//! First-order logic AST (function-free fragment), parser, and renderers.

mod parse;
mod render;

pub use parse::{parse_formula, ParseError};
pub use render::{export_prover9, render_formula, Style};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// A term is either a quantifier-bound variable or a constant symbol.
/// Function symbols are not represented.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Variable(n) | Term::Constant(n) => n,
        }
    }
}

/// A first-order formula over predicates, connectives, and quantifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Predicate(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Bottom,
    Top,
}

/// Predicate name to arity. A name may appear with only one arity per problem.
pub type Signature = BTreeMap<String, usize>;

/// Reported when a predicate name occurs with two different arities.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("predicate `{name}` used with arity {first} and arity {second}")]
pub struct ArityConflict {
    pub name: String,
    pub first: usize,
    pub second: usize,
}

impl Formula {
    // `not` takes the operand by value like its siblings, so the name does
    // not collide with `std::ops::Not::not` in practice.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::ForAll(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Predicate(name.into(), args)
    }

    /// Immediate subformulas, in child-index order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Predicate(..) | Formula::Bottom | Formula::Top => vec![],
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => vec![f],
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => vec![l, r],
        }
    }

    /// Subformula at a child-index path from the root; `None` if the path
    /// leaves the tree.
    pub fn at_path(&self, path: &[usize]) -> Option<&Formula> {
        let mut node = self;
        for &i in path {
            node = *node.children().get(i)?;
        }
        Some(node)
    }

    /// Copy of `self` with the subformula at `path` replaced; `None` if the
    /// path leaves the tree.
    pub fn replace_at(&self, path: &[usize], replacement: Formula) -> Option<Formula> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(replacement);
        };
        let child = |f: &Formula| f.replace_at(rest, replacement.clone());
        match (self, i) {
            (Formula::Not(f), 0) => Some(Formula::not(child(f)?)),
            (Formula::ForAll(v, f), 0) => Some(Formula::forall(v.clone(), child(f)?)),
            (Formula::Exists(v, f), 0) => Some(Formula::exists(v.clone(), child(f)?)),
            (Formula::And(l, r), 0) => Some(Formula::and(child(l)?, (**r).clone())),
            (Formula::And(l, r), 1) => Some(Formula::and((**l).clone(), child(r)?)),
            (Formula::Or(l, r), 0) => Some(Formula::or(child(l)?, (**r).clone())),
            (Formula::Or(l, r), 1) => Some(Formula::or((**l).clone(), child(r)?)),
            (Formula::Implies(l, r), 0) => Some(Formula::implies(child(l)?, (**r).clone())),
            (Formula::Implies(l, r), 1) => Some(Formula::implies((**l).clone(), child(r)?)),
            (Formula::Iff(l, r), 0) => Some(Formula::iff(child(l)?, (**r).clone())),
            (Formula::Iff(l, r), 1) => Some(Formula::iff((**l).clone(), child(r)?)),
            _ => None,
        }
    }

    /// Total number of formula nodes (terms not counted).
    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }

    /// Variables occurring in predicate arguments without an enclosing binder.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Predicate(_, args) => {
                    for t in args {
                        if let Term::Variable(v) = t {
                            if !bound.iter().any(|b| b == v) {
                                out.insert(v.clone());
                            }
                        }
                    }
                }
                Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in f.children() {
                        walk(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Predicate name to arity map, or the first arity conflict found.
    pub fn signature(&self) -> Result<Signature, ArityConflict> {
        fn walk(f: &Formula, sig: &mut Signature) -> Result<(), ArityConflict> {
            if let Formula::Predicate(name, args) = f {
                match sig.get(name) {
                    Some(&a) if a != args.len() => {
                        return Err(ArityConflict {
                            name: name.clone(),
                            first: a,
                            second: args.len(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        sig.insert(name.clone(), args.len());
                    }
                }
            }
            for c in f.children() {
                walk(c, sig)?;
            }
            Ok(())
        }
        let mut sig = Signature::new();
        walk(self, &mut sig)?;
        Ok(sig)
    }

    /// Constant symbols occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            if let Formula::Predicate(_, args) = f {
                for t in args {
                    if let Term::Constant(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    /// All `Predicate` subformulas in pre-order, with duplicates.
    pub fn atoms(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if matches!(f, Formula::Predicate(..)) {
                out.push(f);
            }
            for c in f.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// True when the formula contains no quantifiers.
    pub fn is_quantifier_free(&self) -> bool {
        !matches!(self, Formula::ForAll(..) | Formula::Exists(..))
            && self.children().iter().all(|c| c.is_quantifier_free())
    }
}

/// Entailment label carried through obfuscation unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    True,
    False,
}

/// An entailment problem: premises, a conclusion, and its gold label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub label: Label,
}

/// Raised by [`Problem::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("problem has no premises")]
    NoPremises,
    #[error(transparent)]
    Arity(#[from] ArityConflict),
}

impl Problem {
    pub fn new(premises: Vec<Formula>, conclusion: Formula, label: Label) -> Self {
        Problem {
            premises,
            conclusion,
            label,
        }
    }

    /// Predicate signature across premises and conclusion combined.
    pub fn signature(&self) -> Result<Signature, ArityConflict> {
        let mut sig = Signature::new();
        for f in self
            .premises
            .iter()
            .chain(std::iter::once(&self.conclusion))
        {
            for (name, arity) in f.signature()? {
                match sig.get(&name) {
                    Some(&a) if a != arity => {
                        return Err(ArityConflict {
                            name,
                            first: a,
                            second: arity,
                        })
                    }
                    Some(_) => {}
                    None => {
                        sig.insert(name, arity);
                    }
                }
            }
        }
        Ok(sig)
    }

    /// Checks the structural invariants: at least one premise and a
    /// conflict-free signature.
    pub fn validate(&self) -> Result<(), ProblemError> {
        if self.premises.is_empty() {
            return Err(ProblemError::NoPremises);
        }
        self.signature()?;
        Ok(())
    }
}
