//! Equivalence-preserving rewrite rules, seeded obfuscation chains, and
//! replayable traces.
//!
//! Each rule is a local schema applied at one tree position. The forward
//! direction follows the catalog's arrow; the backward direction inverts
//! it. `Distribute`, `Absorb`, `QuantifierCommute`, and `TautologyInject`
//! apply forward only (commutation is self-inverse, the others' inverses
//! are covered by different rules).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fol::{Formula, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    Contraposition,
    DoubleNegation,
    DeMorganAnd,
    DeMorganOr,
    ImplToDisj,
    QuantifierDuality,
    BiconditionalExpand,
    Distribute,
    Absorb,
    ImplAsConj,
    NnfNegatedImpl,
    QuantifierCommute,
    TautologyInject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// A rewrite rule instance. `atom` parameterizes `TautologyInject` (the
/// reused atomic formula) and is `None` for every other rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteRule {
    pub id: RuleId,
    pub direction: Direction,
    pub atom: Option<Formula>,
}

impl RewriteRule {
    pub fn forward(id: RuleId) -> Self {
        RewriteRule {
            id,
            direction: Direction::Forward,
            atom: None,
        }
    }

    pub fn backward(id: RuleId) -> Self {
        RewriteRule {
            id,
            direction: Direction::Backward,
            atom: None,
        }
    }

    pub fn tautology_inject(atom: Formula) -> Self {
        RewriteRule {
            id: RuleId::TautologyInject,
            direction: Direction::Forward,
            atom: Some(atom),
        }
    }
}

/// The full rule catalog in a fixed order.
pub fn catalog() -> Vec<RewriteRule> {
    use RuleId::*;
    let mut rules = Vec::new();
    for id in [
        Contraposition,
        DoubleNegation,
        DeMorganAnd,
        DeMorganOr,
        ImplToDisj,
        QuantifierDuality,
        BiconditionalExpand,
        ImplAsConj,
        NnfNegatedImpl,
    ] {
        rules.push(RewriteRule::forward(id));
        rules.push(RewriteRule::backward(id));
    }
    rules.push(RewriteRule::forward(Distribute));
    rules.push(RewriteRule::forward(Absorb));
    rules.push(RewriteRule::forward(QuantifierCommute));
    rules.push(RewriteRule::forward(TautologyInject));
    rules
}

/// Applies `rule` to a subformula, returning `None` when the pattern does
/// not match.
fn rewrite_at(rule: &RewriteRule, f: &Formula) -> Option<Formula> {
    use Direction::*;
    use RuleId::*;
    match (rule.id, rule.direction) {
        (Contraposition, Forward) => match f {
            Formula::Implies(a, b) => Some(Formula::implies(
                Formula::not((**b).clone()),
                Formula::not((**a).clone()),
            )),
            _ => None,
        },
        (Contraposition, Backward) => match f {
            Formula::Implies(a, b) => match (&**a, &**b) {
                (Formula::Not(q), Formula::Not(p)) => {
                    Some(Formula::implies((**p).clone(), (**q).clone()))
                }
                _ => None,
            },
            _ => None,
        },
        (DoubleNegation, Forward) => match f {
            Formula::Not(g) => match &**g {
                Formula::Not(inner) => Some((**inner).clone()),
                _ => None,
            },
            _ => None,
        },
        (DoubleNegation, Backward) => Some(Formula::not(Formula::not(f.clone()))),
        (DeMorganAnd, Forward) => match f {
            Formula::Not(g) => match &**g {
                Formula::And(a, b) => Some(Formula::or(
                    Formula::not((**a).clone()),
                    Formula::not((**b).clone()),
                )),
                _ => None,
            },
            _ => None,
        },
        (DeMorganAnd, Backward) => match f {
            Formula::Or(a, b) => match (&**a, &**b) {
                (Formula::Not(p), Formula::Not(q)) => {
                    Some(Formula::not(Formula::and((**p).clone(), (**q).clone())))
                }
                _ => None,
            },
            _ => None,
        },
        (DeMorganOr, Forward) => match f {
            Formula::Or(a, b) => Some(Formula::not(Formula::and(
                Formula::not((**a).clone()),
                Formula::not((**b).clone()),
            ))),
            _ => None,
        },
        (DeMorganOr, Backward) => match f {
            Formula::Not(g) => match &**g {
                Formula::And(a, b) => match (&**a, &**b) {
                    (Formula::Not(p), Formula::Not(q)) => {
                        Some(Formula::or((**p).clone(), (**q).clone()))
                    }
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        },
        (ImplToDisj, Forward) => match f {
            Formula::Implies(a, b) => Some(Formula::or(Formula::not((**a).clone()), (**b).clone())),
            _ => None,
        },
        (ImplToDisj, Backward) => match f {
            Formula::Or(a, b) => match &**a {
                Formula::Not(p) => Some(Formula::implies((**p).clone(), (**b).clone())),
                _ => None,
            },
            _ => None,
        },
        (QuantifierDuality, Forward) => match f {
            Formula::ForAll(v, body) => Some(Formula::not(Formula::exists(
                v.clone(),
                Formula::not((**body).clone()),
            ))),
            Formula::Exists(v, body) => Some(Formula::not(Formula::forall(
                v.clone(),
                Formula::not((**body).clone()),
            ))),
            _ => None,
        },
        (QuantifierDuality, Backward) => match f {
            Formula::Not(g) => match &**g {
                Formula::Exists(v, body) => match &**body {
                    Formula::Not(inner) => Some(Formula::forall(v.clone(), (**inner).clone())),
                    _ => None,
                },
                Formula::ForAll(v, body) => match &**body {
                    Formula::Not(inner) => Some(Formula::exists(v.clone(), (**inner).clone())),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        },
        (BiconditionalExpand, Forward) => match f {
            Formula::Iff(a, b) => Some(Formula::and(
                Formula::implies((**a).clone(), (**b).clone()),
                Formula::implies((**b).clone(), (**a).clone()),
            )),
            _ => None,
        },
        (BiconditionalExpand, Backward) => match f {
            Formula::And(l, r) => match (&**l, &**r) {
                (Formula::Implies(a, b), Formula::Implies(c, d)) if a == d && b == c => {
                    Some(Formula::iff((**a).clone(), (**b).clone()))
                }
                _ => None,
            },
            _ => None,
        },
        (Distribute, Forward) => match f {
            Formula::And(p, qr) => match &**qr {
                Formula::Or(q, r) => Some(Formula::or(
                    Formula::and((**p).clone(), (**q).clone()),
                    Formula::and((**p).clone(), (**r).clone()),
                )),
                _ => None,
            },
            _ => None,
        },
        (Distribute, Backward) => None,
        (Absorb, Forward) => match f {
            Formula::Or(p, pq) => match &**pq {
                Formula::And(p2, _) if p == p2 => Some((**p).clone()),
                _ => None,
            },
            _ => None,
        },
        (Absorb, Backward) => None,
        (ImplAsConj, Forward) => match f {
            Formula::Implies(a, b) => Some(Formula::not(Formula::and(
                (**a).clone(),
                Formula::not((**b).clone()),
            ))),
            _ => None,
        },
        (ImplAsConj, Backward) => match f {
            Formula::Not(g) => match &**g {
                Formula::And(a, nb) => match &**nb {
                    Formula::Not(b) => Some(Formula::implies((**a).clone(), (**b).clone())),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        },
        (NnfNegatedImpl, Forward) => match f {
            Formula::Not(g) => match &**g {
                Formula::Implies(a, b) => {
                    Some(Formula::and((**a).clone(), Formula::not((**b).clone())))
                }
                _ => None,
            },
            _ => None,
        },
        (NnfNegatedImpl, Backward) => match f {
            Formula::And(a, nb) => match &**nb {
                Formula::Not(b) => {
                    Some(Formula::not(Formula::implies((**a).clone(), (**b).clone())))
                }
                _ => None,
            },
            _ => None,
        },
        (QuantifierCommute, _) => match f {
            Formula::ForAll(x, body) => match &**body {
                Formula::ForAll(y, inner) if x != y => Some(Formula::forall(
                    y.clone(),
                    Formula::forall(x.clone(), (**inner).clone()),
                )),
                _ => None,
            },
            Formula::Exists(x, body) => match &**body {
                Formula::Exists(y, inner) if x != y => Some(Formula::exists(
                    y.clone(),
                    Formula::exists(x.clone(), (**inner).clone()),
                )),
                _ => None,
            },
            _ => None,
        },
        (TautologyInject, _) => {
            let q = rule.atom.as_ref()?;
            Some(Formula::and(
                f.clone(),
                Formula::or(q.clone(), Formula::not(q.clone())),
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("rule {rule:?} ({direction:?}) does not match at position {position:?}")]
    RuleNotApplicable {
        rule: RuleId,
        direction: Direction,
        position: Vec<usize>,
    },
    #[error("position {position:?} leaves the formula tree")]
    InvalidPosition { position: Vec<usize> },
    #[error("no applicable rule at step {step} (size cap {cap} nodes)")]
    ObfuscationStalled { step: usize, cap: usize },
}

/// Applies `rule` at `position`, leaving the rest of the formula intact.
pub fn apply_rewrite(
    rule: &RewriteRule,
    f: &Formula,
    position: &[usize],
) -> Result<Formula, RewriteError> {
    let sub = f
        .at_path(position)
        .ok_or_else(|| RewriteError::InvalidPosition {
            position: position.to_vec(),
        })?;
    let replacement = rewrite_at(rule, sub).ok_or_else(|| RewriteError::RuleNotApplicable {
        rule: rule.id,
        direction: rule.direction,
        position: position.to_vec(),
    })?;
    Ok(f.replace_at(position, replacement)
        .expect("position already validated"))
}

/// Variables bound by quantifiers strictly above `position`.
fn bound_above(f: &Formula, position: &[usize]) -> Vec<String> {
    let mut bound = Vec::new();
    let mut node = f;
    for &i in position {
        if let Formula::ForAll(v, _) | Formula::Exists(v, _) = node {
            bound.push(v.clone());
        }
        node = match node.children().get(i) {
            Some(c) => c,
            None => return bound,
        };
    }
    bound
}

/// Lists every sound application site as (rule, position), walking
/// positions in pre-order and the catalog in order. `TautologyInject`
/// expands to one site per capture-safe atom in `atom_pool`; pool atoms
/// whose name carries a different arity in `f` are skipped so the result
/// keeps a consistent signature.
pub fn enumerate_applicable_with_pool(
    f: &Formula,
    rules: &[RewriteRule],
    atom_pool: &[Formula],
) -> Vec<(RewriteRule, Vec<usize>)> {
    let host_sig = f.signature().ok();
    let fits_signature = |atom: &Formula| match (&host_sig, atom) {
        (Some(sig), Formula::Predicate(name, args)) => {
            sig.get(name).map_or(true, |&arity| arity == args.len())
        }
        _ => true,
    };
    let mut sites = Vec::new();
    let mut stack = vec![Vec::new()];
    let mut positions = Vec::new();
    while let Some(path) = stack.pop() {
        positions.push(path.clone());
        let node = f.at_path(&path).expect("walk stays inside the tree");
        for (i, _) in node.children().iter().enumerate().rev() {
            let mut child = path.clone();
            child.push(i);
            stack.push(child);
        }
    }
    for path in positions {
        let node = f.at_path(&path).expect("walk stays inside the tree");
        for rule in rules {
            if rule.id == RuleId::TautologyInject {
                let bound = bound_above(f, &path);
                for atom in atom_pool {
                    if fits_signature(atom) && atom.free_vars().iter().all(|v| bound.contains(v)) {
                        sites.push((RewriteRule::tautology_inject(atom.clone()), path.clone()));
                    }
                }
            } else if rewrite_at(rule, node).is_some() {
                sites.push((rule.clone(), path.clone()));
            }
        }
    }
    sites
}

/// [`enumerate_applicable_with_pool`] drawing injectable atoms from `f`
/// itself.
pub fn enumerate_applicable(f: &Formula, rules: &[RewriteRule]) -> Vec<(RewriteRule, Vec<usize>)> {
    enumerate_applicable_with_pool(f, rules, &dedup_atoms(std::iter::once(f)))
}

/// Distinct atomic subformulas across `formulas`, first-seen order.
fn dedup_atoms<'a>(formulas: impl Iterator<Item = &'a Formula>) -> Vec<Formula> {
    let mut pool: Vec<Formula> = Vec::new();
    for f in formulas {
        for atom in f.atoms() {
            if !pool.iter().any(|p| p == atom) {
                pool.push(atom.clone());
            }
        }
    }
    pool
}

/// One replayable obfuscation step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: RewriteRule,
    pub position: Vec<usize>,
    pub before: Formula,
    pub after: Formula,
}

/// The full step log for one premise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct RewriteTrace {
    pub steps: Vec<TraceStep>,
}

impl RewriteTrace {
    /// Reapplies every step to `base`, checking each recorded fragment.
    pub fn replay(&self, base: &Formula) -> Result<Formula, RewriteError> {
        let mut current = base.clone();
        for step in &self.steps {
            let sub =
                current
                    .at_path(&step.position)
                    .ok_or_else(|| RewriteError::InvalidPosition {
                        position: step.position.clone(),
                    })?;
            if *sub != step.before {
                return Err(RewriteError::RuleNotApplicable {
                    rule: step.rule.id,
                    direction: step.rule.direction,
                    position: step.position.clone(),
                });
            }
            current = apply_rewrite(&step.rule, &current, &step.position)?;
            if current.at_path(&step.position) != Some(&step.after) {
                return Err(RewriteError::RuleNotApplicable {
                    rule: step.rule.id,
                    direction: step.rule.direction,
                    position: step.position.clone(),
                });
            }
        }
        Ok(current)
    }
}

/// Default growth cap: an obfuscated premise may not exceed this multiple
/// of its base node count.
pub const SIZE_CAP_FACTOR: usize = 12;

/// Rewrites every premise with at least `min_rules` seeded rule
/// applications; the conclusion and label are returned untouched.
pub fn obfuscate_premises(
    p: &Problem,
    seed: u64,
    min_rules: usize,
) -> Result<(Problem, Vec<RewriteTrace>), RewriteError> {
    obfuscate_premises_capped(p, seed, min_rules, SIZE_CAP_FACTOR)
}

/// [`obfuscate_premises`] with an explicit growth cap factor.
pub fn obfuscate_premises_capped(
    p: &Problem,
    seed: u64,
    min_rules: usize,
    cap_factor: usize,
) -> Result<(Problem, Vec<RewriteTrace>), RewriteError> {
    assert!(min_rules >= 1, "min_rules must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rules = catalog();
    let pool = dedup_atoms(p.premises.iter().chain(std::iter::once(&p.conclusion)));

    let mut premises = Vec::with_capacity(p.premises.len());
    let mut traces = Vec::with_capacity(p.premises.len());
    for base in &p.premises {
        let cap = base.node_count() * cap_factor;
        let mut current = base.clone();
        let mut trace = RewriteTrace::default();
        for step in 0..min_rules {
            let sites = enumerate_applicable_with_pool(&current, &rules, &pool);
            let feasible: Vec<(RewriteRule, Vec<usize>, Formula)> = sites
                .into_iter()
                .filter_map(|(rule, pos)| {
                    let next = apply_rewrite(&rule, &current, &pos).ok()?;
                    (next.node_count() <= cap).then_some((rule, pos, next))
                })
                .collect();
            if feasible.is_empty() {
                return Err(RewriteError::ObfuscationStalled { step, cap });
            }
            let (rule, position, next) = feasible[rng.gen_range(0..feasible.len())].clone();
            trace.steps.push(TraceStep {
                rule,
                position: position.clone(),
                before: current.at_path(&position).expect("validated site").clone(),
                after: next.at_path(&position).expect("validated site").clone(),
            });
            current = next;
        }
        premises.push(current);
        traces.push(trace);
    }
    Ok((
        Problem {
            premises,
            conclusion: p.conclusion.clone(),
            label: p.label,
        },
        traces,
    ))
}
