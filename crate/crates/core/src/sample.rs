//! Seeded random problem generation for stress tests and benchmarks.
//!
//! Formulas are closed, use at most three predicates (at most one of them
//! binary, which keeps domain-3 interpretation spaces within the default
//! equivalence budget) and at most two quantified variables.

use rand::Rng;

use crate::fol::{Formula, Label, Problem, Term};

/// Maximum connective-tree depth of generated formulas.
pub const MAX_DEPTH: usize = 5;

const VARS: [&str; 2] = ["x", "y"];

/// Draws a predicate alphabet: names P/Q/R with seeded arities, at most
/// one binary.
fn draw_predicates(rng: &mut impl Rng) -> Vec<(String, usize)> {
    let count = rng.gen_range(1..=3usize);
    let binary_slot = if rng.gen_bool(0.4) {
        Some(rng.gen_range(0..count))
    } else {
        None
    };
    ["P", "Q", "R"]
        .iter()
        .take(count)
        .enumerate()
        .map(|(i, name)| {
            let arity = if binary_slot == Some(i) {
                2
            } else if rng.gen_bool(0.25) {
                0
            } else {
                1
            };
            (name.to_string(), arity)
        })
        .collect()
}

fn atom(rng: &mut impl Rng, preds: &[(String, usize)], bound: &[&'static str]) -> Formula {
    let usable: Vec<&(String, usize)> = preds
        .iter()
        .filter(|(_, a)| *a == 0 || !bound.is_empty())
        .collect();
    if usable.is_empty() {
        // No variable is in scope and every predicate needs one: bind one.
        let (name, arity) = &preds[rng.gen_range(0..preds.len())];
        let args = (0..*arity)
            .map(|_| Term::Variable(VARS[0].into()))
            .collect();
        return Formula::forall(VARS[0], Formula::pred(name.clone(), args));
    }
    let (name, arity) = usable[rng.gen_range(0..usable.len())];
    let args = (0..*arity)
        .map(|_| Term::Variable(bound[rng.gen_range(0..bound.len())].into()))
        .collect();
    Formula::pred(name.clone(), args)
}

fn build(
    rng: &mut impl Rng,
    preds: &[(String, usize)],
    bound: &mut Vec<&'static str>,
    depth: usize,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return atom(rng, preds, bound);
    }
    let can_quantify = bound.len() < VARS.len();
    let choice = rng.gen_range(0..if can_quantify { 7 } else { 5 });
    match choice {
        0 => Formula::not(build(rng, preds, bound, depth - 1)),
        1 => Formula::and(
            build(rng, preds, bound, depth - 1),
            build(rng, preds, bound, depth - 1),
        ),
        2 => Formula::or(
            build(rng, preds, bound, depth - 1),
            build(rng, preds, bound, depth - 1),
        ),
        3 => Formula::implies(
            build(rng, preds, bound, depth - 1),
            build(rng, preds, bound, depth - 1),
        ),
        4 => Formula::iff(
            build(rng, preds, bound, depth - 1),
            build(rng, preds, bound, depth - 1),
        ),
        _ => {
            let var = VARS[bound.len()];
            bound.push(var);
            let body = build(rng, preds, bound, depth - 1);
            bound.pop();
            if choice == 5 {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            }
        }
    }
}

/// One seeded closed formula with at least three nodes.
pub fn random_formula(rng: &mut impl Rng) -> Formula {
    let preds = draw_predicates(rng);
    let mut f = build(rng, &preds, &mut Vec::new(), MAX_DEPTH);
    while f.node_count() < 3 {
        f = Formula::not(f);
    }
    f
}

/// One seeded single-premise problem (conclusion repeats the premise, so
/// entailment trivially holds and the label is `True`).
pub fn random_problem(rng: &mut impl Rng) -> Problem {
    let premise = random_formula(rng);
    Problem::new(vec![premise.clone()], premise, Label::True)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn formulas_are_closed_and_within_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..500 {
            let f = random_formula(&mut rng);
            assert!(f.free_vars().is_empty());
            assert!(f.node_count() >= 3);
            let sig = f.signature().unwrap();
            assert!(sig.len() <= 3);
            assert!(sig.values().filter(|&&a| a == 2).count() <= 1);
            assert!(sig.values().all(|&a| a <= 2));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            assert_eq!(random_formula(&mut a), random_formula(&mut b));
        }
    }
}
