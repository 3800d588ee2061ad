//! Equivalence checking by exhaustive interpretation enumeration.
//!
//! Quantifier-free, constant-free formula pairs get a propositional
//! truth-table check, which is sound and complete. Everything else is
//! checked over every interpretation with domain sizes 1 through
//! `max_domain`: every predicate extension and every constant assignment
//! is evaluated under both formulas, and the first disagreement is
//! returned as a counter-model. Free variables are treated like constants
//! (enumerated over the domain), so agreement means equivalence under
//! every assignment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fol::{Formula, Signature, Term};

/// Default cap on the number of interpretations examined per call.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// One finite interpretation: a domain `{0, .., domain_size-1}`, an
/// extension table per predicate, and a domain element per symbol
/// (constants and free variables).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub domain_size: usize,
    /// Predicate name to (arity, extension). The extension table is indexed
    /// mixed-radix: the cell for args `(a1, .., ak)` is `a1*n^(k-1) + .. + ak`.
    pub predicates: BTreeMap<String, (usize, Vec<bool>)>,
    /// Constant or free-variable name to domain element.
    pub symbols: BTreeMap<String, usize>,
}

impl Interpretation {
    /// Evaluates a formula under this interpretation. Quantified variables
    /// shadow symbol assignments.
    pub fn eval(&self, f: &Formula) -> bool {
        self.eval_env(f, &mut Vec::new())
    }

    fn resolve(&self, t: &Term, env: &[(String, usize)]) -> usize {
        let name = t.name();
        if let Term::Variable(_) = t {
            if let Some((_, d)) = env.iter().rev().find(|(v, _)| v == name) {
                return *d;
            }
        }
        self.symbols[name]
    }

    fn eval_env(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Predicate(name, args) => {
                let (_, table) = &self.predicates[name];
                let mut idx = 0;
                for a in args {
                    idx = idx * self.domain_size + self.resolve(a, env);
                }
                table[idx]
            }
            Formula::Not(g) => !self.eval_env(g, env),
            Formula::And(l, r) => self.eval_env(l, env) && self.eval_env(r, env),
            Formula::Or(l, r) => self.eval_env(l, env) || self.eval_env(r, env),
            Formula::Implies(l, r) => !self.eval_env(l, env) || self.eval_env(r, env),
            Formula::Iff(l, r) => self.eval_env(l, env) == self.eval_env(r, env),
            Formula::ForAll(v, body) => (0..self.domain_size).all(|d| {
                env.push((v.clone(), d));
                let res = self.eval_env(body, env);
                env.pop();
                res
            }),
            Formula::Exists(v, body) => (0..self.domain_size).any(|d| {
                env.push((v.clone(), d));
                let res = self.eval_env(body, env);
                env.pop();
                res
            }),
            Formula::Top => true,
            Formula::Bottom => false,
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain size {}", self.domain_size)?;
        for (name, (arity, table)) in &self.predicates {
            write!(f, "{name}:")?;
            for (idx, value) in table.iter().enumerate() {
                let mut tuple = Vec::new();
                let mut rest = idx;
                for _ in 0..*arity {
                    tuple.push(rest % self.domain_size);
                    rest /= self.domain_size;
                }
                tuple.reverse();
                let args = tuple
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                write!(f, " ({args})={}", if *value { "T" } else { "F" })?;
            }
            writeln!(f)?;
        }
        for (name, d) in &self.symbols {
            writeln!(f, "{name} -> {d}")?;
        }
        Ok(())
    }
}

/// Result of a successful equivalence check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquivVerdict {
    /// Agreement under every interpretation with domain sizes 1..=max.
    EquivalentUpTo(usize),
    /// Agreement on the full propositional truth table (complete).
    PropositionallyEquivalent,
    /// A distinguishing interpretation.
    CounterModel(Interpretation),
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        !matches!(self, EquivVerdict::CounterModel(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error("predicate `{name}` has arity {left} on one side and {right} on the other")]
    SignatureMismatch {
        name: String,
        left: usize,
        right: usize,
    },
    #[error(
        "interpretation budget exhausted; largest fully checked domain size is {largest_completed}"
    )]
    BudgetExceeded { largest_completed: usize },
}

fn merged_signature(f: &Formula, g: &Formula) -> Result<Signature, EquivError> {
    let conflict = |c: crate::fol::ArityConflict| EquivError::SignatureMismatch {
        name: c.name,
        left: c.first,
        right: c.second,
    };
    let mut sig = f.signature().map_err(conflict)?;
    for (name, arity) in g.signature().map_err(conflict)? {
        match sig.get(&name) {
            Some(&a) if a != arity => {
                return Err(EquivError::SignatureMismatch {
                    name,
                    left: a,
                    right: arity,
                })
            }
            Some(_) => {}
            None => {
                sig.insert(name, arity);
            }
        }
    }
    Ok(sig)
}

/// Number of interpretations over `size` elements, saturating.
fn interpretation_count(sig: &Signature, symbols: &BTreeSet<String>, size: usize) -> u128 {
    let mut total: u128 = 1;
    for &arity in sig.values() {
        let cells = (size as u128).saturating_pow(arity as u32);
        if cells >= 96 {
            return u128::MAX;
        }
        total = total.saturating_mul(1u128 << cells.min(95));
    }
    for _ in symbols {
        total = total.saturating_mul(size as u128);
    }
    total
}

/// A formula grounded over a fixed domain: quantifiers expanded to
/// conjunctions/disjunctions over domain elements, atoms mapped to
/// extension-table cells (as global bit indices into the row id).
enum Ground {
    Cell(usize),
    Not(Box<Ground>),
    And(Box<Ground>, Box<Ground>),
    Or(Box<Ground>, Box<Ground>),
    Xor(Box<Ground>, Box<Ground>),
    True,
    False,
}

fn ground(
    f: &Formula,
    size: usize,
    offsets: &BTreeMap<String, usize>,
    env: &mut Vec<(String, usize)>,
) -> Ground {
    match f {
        Formula::Predicate(name, args) => {
            let mut cell = 0;
            for a in args {
                let Term::Variable(v) = a else {
                    unreachable!("grounding requires symbol-free formulas");
                };
                let d = env
                    .iter()
                    .rev()
                    .find(|(b, _)| b == v)
                    .expect("closed formula")
                    .1;
                cell = cell * size + d;
            }
            Ground::Cell(offsets[name] + cell)
        }
        Formula::Not(g) => Ground::Not(Box::new(ground(g, size, offsets, env))),
        Formula::And(l, r) => Ground::And(
            Box::new(ground(l, size, offsets, env)),
            Box::new(ground(r, size, offsets, env)),
        ),
        Formula::Or(l, r) => Ground::Or(
            Box::new(ground(l, size, offsets, env)),
            Box::new(ground(r, size, offsets, env)),
        ),
        Formula::Implies(l, r) => Ground::Or(
            Box::new(Ground::Not(Box::new(ground(l, size, offsets, env)))),
            Box::new(ground(r, size, offsets, env)),
        ),
        Formula::Iff(l, r) => {
            let a = ground(l, size, offsets, env);
            let b = ground(r, size, offsets, env);
            // a <-> b as (a & b) | (~a & ~b) would duplicate subtrees; use a
            // dedicated xor at column level instead.
            Ground::Not(Box::new(Ground::Xor(Box::new(a), Box::new(b))))
        }
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let folds_and = matches!(f, Formula::ForAll(..));
            let mut parts = Vec::with_capacity(size);
            for d in 0..size {
                env.push((v.clone(), d));
                parts.push(ground(body, size, offsets, env));
                env.pop();
            }
            let mut acc = parts.pop().expect("domain size is at least 1");
            while let Some(p) = parts.pop() {
                acc = if folds_and {
                    Ground::And(Box::new(p), Box::new(acc))
                } else {
                    Ground::Or(Box::new(p), Box::new(acc))
                };
            }
            acc
        }
        Formula::Top => Ground::True,
        Formula::Bottom => Ground::False,
    }
}

/// Truth column of a grounded formula across all `rows` interpretations,
/// 64 interpretations per word. Bit `r` of the column is the formula's
/// value under the interpretation whose extension bits spell `r`.
fn column(g: &Ground, words: usize, rows: u128) -> Vec<u64> {
    match g {
        Ground::Cell(i) => {
            let mut col = vec![0u64; words];
            if *i < 6 {
                let pattern = match i {
                    0 => 0xAAAA_AAAA_AAAA_AAAA,
                    1 => 0xCCCC_CCCC_CCCC_CCCC,
                    2 => 0xF0F0_F0F0_F0F0_F0F0,
                    3 => 0xFF00_FF00_FF00_FF00,
                    4 => 0xFFFF_0000_FFFF_0000,
                    _ => 0xFFFF_FFFF_0000_0000,
                };
                col.fill(pattern);
            } else {
                let run = 1usize << (i - 6);
                for (w, slot) in col.iter_mut().enumerate() {
                    if (w / run) % 2 == 1 {
                        *slot = u64::MAX;
                    }
                }
            }
            mask_tail(&mut col, rows);
            col
        }
        Ground::Not(a) => {
            let mut col = column(a, words, rows);
            for w in col.iter_mut() {
                *w = !*w;
            }
            mask_tail(&mut col, rows);
            col
        }
        Ground::And(a, b) => {
            let mut col = column(a, words, rows);
            for (w, v) in col.iter_mut().zip(column(b, words, rows)) {
                *w &= v;
            }
            col
        }
        Ground::Or(a, b) => {
            let mut col = column(a, words, rows);
            for (w, v) in col.iter_mut().zip(column(b, words, rows)) {
                *w |= v;
            }
            col
        }
        Ground::Xor(a, b) => {
            let mut col = column(a, words, rows);
            for (w, v) in col.iter_mut().zip(column(b, words, rows)) {
                *w ^= v;
            }
            col
        }
        Ground::True => {
            let mut col = vec![u64::MAX; words];
            mask_tail(&mut col, rows);
            col
        }
        Ground::False => vec![0u64; words],
    }
}

/// Zeroes bits at or beyond `rows` in the final word.
fn mask_tail(col: &mut [u64], rows: u128) {
    let rem = (rows % 64) as u32;
    if rem != 0 {
        if let Some(last) = col.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

/// Symbol-free check over one domain size by grounding both formulas and
/// comparing truth columns. Returns the first disagreeing interpretation.
fn check_grounded(
    f: &Formula,
    g: &Formula,
    sig: &Signature,
    size: usize,
) -> Option<Interpretation> {
    let mut offsets = BTreeMap::new();
    let mut total_bits = 0usize;
    for (name, &arity) in sig {
        offsets.insert(name.clone(), total_bits);
        total_bits += size.pow(arity as u32);
    }
    let rows: u128 = 1u128 << total_bits;
    let words = rows.div_ceil(64) as usize;
    let col_f = column(&ground(f, size, &offsets, &mut Vec::new()), words, rows);
    let col_g = column(&ground(g, size, &offsets, &mut Vec::new()), words, rows);
    for (w, (a, b)) in col_f.iter().zip(&col_g).enumerate() {
        if a != b {
            let row = w as u128 * 64 + (a ^ b).trailing_zeros() as u128;
            let predicates = sig
                .iter()
                .map(|(name, &arity)| {
                    let off = offsets[name];
                    let cells = size.pow(arity as u32);
                    let table = (0..cells).map(|c| (row >> (off + c)) & 1 == 1).collect();
                    (name.clone(), (arity, table))
                })
                .collect();
            return Some(Interpretation {
                domain_size: size,
                predicates,
                symbols: BTreeMap::new(),
            });
        }
    }
    None
}

/// Enumerates interpretations in a fixed order, calling `visit` on each;
/// stops early when `visit` returns false.
fn enumerate(
    sig: &Signature,
    symbols: &BTreeSet<String>,
    size: usize,
    mut visit: impl FnMut(&Interpretation) -> bool,
) {
    let mut interp = Interpretation {
        domain_size: size,
        predicates: sig
            .iter()
            .map(|(n, &a)| (n.clone(), (a, vec![false; size.pow(a as u32)])))
            .collect(),
        symbols: symbols.iter().map(|s| (s.clone(), 0)).collect(),
    };
    loop {
        if !visit(&interp) {
            return;
        }
        // Advance the mixed-radix counter: symbol assignments first, then
        // predicate extension bits.
        let mut carried = true;
        for d in interp.symbols.values_mut() {
            *d += 1;
            if *d < size {
                carried = false;
                break;
            }
            *d = 0;
        }
        if !carried {
            continue;
        }
        'preds: for (_, table) in interp.predicates.values_mut() {
            for cell in table.iter_mut() {
                *cell = !*cell;
                if *cell {
                    carried = false;
                    break 'preds;
                }
            }
        }
        if carried {
            return;
        }
    }
}

/// Checks logical equivalence of two closed formulas with the default
/// interpretation budget.
pub fn check_equivalence(
    f: &Formula,
    g: &Formula,
    max_domain: usize,
) -> Result<EquivVerdict, EquivError> {
    check_equivalence_with_budget(f, g, max_domain, DEFAULT_BUDGET)
}

/// Checks logical equivalence, examining at most `budget` interpretations.
pub fn check_equivalence_with_budget(
    f: &Formula,
    g: &Formula,
    max_domain: usize,
    budget: u128,
) -> Result<EquivVerdict, EquivError> {
    let sig = merged_signature(f, g)?;
    let mut symbols: BTreeSet<String> = f.constants();
    symbols.extend(g.constants());
    symbols.extend(f.free_vars());
    symbols.extend(g.free_vars());

    let propositional = symbols.is_empty()
        && f.is_quantifier_free()
        && g.is_quantifier_free()
        && sig.values().all(|&a| a == 0);

    let sizes: Vec<usize> = if propositional {
        // A truth table over the 0-ary atoms is exactly the domain-1
        // interpretation space.
        vec![1]
    } else {
        (1..=max_domain).collect()
    };

    let mut used: u128 = 0;
    for &size in &sizes {
        let cost = interpretation_count(&sig, &symbols, size);
        if used.saturating_add(cost) > budget {
            return Err(EquivError::BudgetExceeded {
                largest_completed: size - 1,
            });
        }
        used += cost;
        if symbols.is_empty() {
            if let Some(cm) = check_grounded(f, g, &sig, size) {
                return Ok(EquivVerdict::CounterModel(cm));
            }
        } else {
            let mut counter: Option<Interpretation> = None;
            enumerate(&sig, &symbols, size, |interp| {
                if interp.eval(f) != interp.eval(g) {
                    counter = Some(interp.clone());
                    false
                } else {
                    true
                }
            });
            if let Some(cm) = counter {
                return Ok(EquivVerdict::CounterModel(cm));
            }
        }
    }
    Ok(if propositional {
        EquivVerdict::PropositionallyEquivalent
    } else {
        EquivVerdict::EquivalentUpTo(max_domain)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;

    fn check(f: &str, g: &str) -> EquivVerdict {
        check_equivalence(&parse_formula(f).unwrap(), &parse_formula(g).unwrap(), 3).unwrap()
    }

    #[test]
    fn material_implication_is_propositional() {
        assert_eq!(
            check("P() -> Q()", "~P() | Q()"),
            EquivVerdict::PropositionallyEquivalent
        );
    }

    #[test]
    fn converse_yields_a_counter_model() {
        let v = check("P() -> Q()", "Q() -> P()");
        match v {
            EquivVerdict::CounterModel(m) => {
                let f = parse_formula("P() -> Q()").unwrap();
                let g = parse_formula("Q() -> P()").unwrap();
                assert_ne!(m.eval(&f), m.eval(&g));
            }
            other => panic!("expected counter-model, got {other:?}"),
        }
    }

    #[test]
    fn quantifier_duality_holds_up_to_domain_three() {
        assert_eq!(
            check("forall x. P(x)", "~exists x. ~P(x)"),
            EquivVerdict::EquivalentUpTo(3)
        );
    }

    #[test]
    fn forall_vs_exists_is_refuted() {
        let v = check("forall x. P(x)", "exists x. P(x)");
        match v {
            EquivVerdict::CounterModel(m) => {
                assert!(m.domain_size >= 2);
                let f = parse_formula("forall x. P(x)").unwrap();
                let g = parse_formula("exists x. P(x)").unwrap();
                assert_ne!(m.eval(&f), m.eval(&g));
            }
            other => panic!("expected counter-model, got {other:?}"),
        }
    }

    #[test]
    fn constants_are_enumerated() {
        assert_eq!(check("P(a)", "~~P(a)"), EquivVerdict::EquivalentUpTo(3));
        let v = check("P(a)", "P(b)");
        assert!(matches!(v, EquivVerdict::CounterModel(_)));
    }

    #[test]
    fn verdict_category_is_symmetric() {
        let cases = [
            ("P() -> Q()", "~P() | Q()"),
            ("forall x. P(x)", "~exists x. ~P(x)"),
            ("forall x. P(x)", "exists x. P(x)"),
        ];
        for (a, b) in cases {
            let ab = std::mem::discriminant(&check(a, b));
            let ba = std::mem::discriminant(&check(b, a));
            assert_eq!(ab, ba, "asymmetric verdict for {a} vs {b}");
        }
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let f = parse_formula("forall x. P(x)").unwrap();
        let g = parse_formula("P() | P()").unwrap();
        let err = check_equivalence(&f, &g, 2).unwrap_err();
        assert!(matches!(err, EquivError::SignatureMismatch { .. }));
    }

    #[test]
    fn budget_exhaustion_reports_completed_domain() {
        let f = parse_formula("forall x. (P(x) -> Q(x))").unwrap();
        let g = parse_formula("forall x. (~Q(x) -> ~P(x))").unwrap();
        // Domain 1 costs 4 interpretations, domain 2 costs 16.
        let err = check_equivalence_with_budget(&f, &g, 3, 10).unwrap_err();
        assert_eq!(
            err,
            EquivError::BudgetExceeded {
                largest_completed: 1
            }
        );
    }

    #[test]
    fn top_and_bottom_evaluate_as_constants() {
        assert_eq!(
            check("P() | ~P()", "$T"),
            EquivVerdict::PropositionallyEquivalent
        );
        assert_eq!(
            check("P() & ~P()", "$F"),
            EquivVerdict::PropositionallyEquivalent
        );
    }

    #[test]
    fn grounded_path_agrees_with_direct_enumeration() {
        let pairs = [
            ("forall x. (P(x) -> Q(x))", "forall x. (~Q(x) -> ~P(x))"),
            ("forall x. P(x)", "exists x. P(x)"),
            ("exists x. forall y. R(x,y)", "forall y. exists x. R(x,y)"),
            ("forall x. (P(x) <-> Q(x))", "forall x. (Q(x) <-> P(x))"),
            ("exists x. (P(x) & Q(x))", "exists x. P(x) & exists x. Q(x)"),
        ];
        for (a, b) in pairs {
            let f = parse_formula(a).unwrap();
            let g = parse_formula(b).unwrap();
            let sig = merged_signature(&f, &g).unwrap();
            for size in 1..=3 {
                let fast = check_grounded(&f, &g, &sig, size);
                let mut slow_cm: Option<Interpretation> = None;
                enumerate(&sig, &BTreeSet::new(), size, |interp| {
                    if interp.eval(&f) != interp.eval(&g) {
                        slow_cm = Some(interp.clone());
                        false
                    } else {
                        true
                    }
                });
                assert_eq!(
                    fast.is_some(),
                    slow_cm.is_some(),
                    "path disagreement for {a} vs {b} at domain {size}"
                );
                if let Some(cm) = fast {
                    assert_ne!(cm.eval(&f), cm.eval(&g));
                }
            }
        }
    }

    #[test]
    fn interpretation_display_is_readable() {
        let v = check("forall x. P(x)", "exists x. P(x)");
        let EquivVerdict::CounterModel(m) = v else {
            panic!("expected counter-model")
        };
        let shown = m.to_string();
        assert!(shown.contains("domain size 2"));
        assert!(shown.contains("P:"));
    }
}
