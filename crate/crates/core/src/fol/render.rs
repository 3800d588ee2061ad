//! Formula renderers: ASCII (round-trips through the parser), Unicode,
//! Prover9 input syntax, and deterministic template English.

use super::{Formula, Problem, Term};

/// Output syntax for [`render_formula`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Style {
    Ascii,
    Unicode,
    Prover9,
    NlTemplate,
}

/// Precedence level used to decide parenthesization. Higher binds tighter.
fn level(f: &Formula, ops: &Ops) -> u8 {
    match f {
        Formula::Iff(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::ForAll(..) | Formula::Exists(..) => ops.quantifier_level,
        _ => 4,
    }
}

struct Ops {
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    iff: &'static str,
    forall: &'static str,
    exists: &'static str,
    top: &'static str,
    bottom: &'static str,
    quantifier_dot: bool,
    quantifier_level: u8,
}

const ASCII: Ops = Ops {
    not: "~",
    and: "&",
    or: "|",
    implies: "->",
    iff: "<->",
    forall: "forall",
    exists: "exists",
    top: "$T",
    bottom: "$F",
    quantifier_dot: true,
    quantifier_level: 4,
};

const UNICODE: Ops = Ops {
    not: "\u{00ac}",
    and: "\u{2227}",
    or: "\u{2228}",
    implies: "\u{2192}",
    iff: "\u{2194}",
    forall: "\u{2200}",
    exists: "\u{2203}",
    top: "\u{22a4}",
    bottom: "\u{22a5}",
    quantifier_dot: true,
    quantifier_level: 4,
};

const PROVER9: Ops = Ops {
    not: "-",
    and: "&",
    or: "|",
    implies: "->",
    iff: "<->",
    forall: "all",
    exists: "exists",
    top: "$T",
    bottom: "$F",
    quantifier_dot: false,
    quantifier_level: 0,
};

fn symbolic(f: &Formula, ops: &Ops, min: u8, out: &mut String) {
    if level(f, ops) < min {
        out.push('(');
        symbolic(f, ops, 0, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Predicate(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(a.name());
            }
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str(ops.not);
            symbolic(g, ops, 4, out);
        }
        Formula::And(l, r) => {
            symbolic(l, ops, 3, out);
            out.push(' ');
            out.push_str(ops.and);
            out.push(' ');
            symbolic(r, ops, 4, out);
        }
        Formula::Or(l, r) => {
            symbolic(l, ops, 2, out);
            out.push(' ');
            out.push_str(ops.or);
            out.push(' ');
            symbolic(r, ops, 3, out);
        }
        Formula::Implies(l, r) => {
            symbolic(l, ops, 2, out);
            out.push(' ');
            out.push_str(ops.implies);
            out.push(' ');
            symbolic(r, ops, 1, out);
        }
        Formula::Iff(l, r) => {
            symbolic(l, ops, 1, out);
            out.push(' ');
            out.push_str(ops.iff);
            out.push(' ');
            symbolic(r, ops, 0, out);
        }
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let kw = if matches!(f, Formula::ForAll(..)) {
                ops.forall
            } else {
                ops.exists
            };
            out.push_str(kw);
            out.push(' ');
            out.push_str(v);
            if ops.quantifier_dot {
                out.push('.');
            }
            out.push(' ');
            symbolic(body, ops, 4, out);
        }
        Formula::Top => out.push_str(ops.top),
        Formula::Bottom => out.push_str(ops.bottom),
    }
}

fn term_phrase(t: &Term) -> &str {
    t.name()
}

fn nl(f: &Formula, out: &mut String) {
    // Operands at binary level get literal parentheses so that distinct
    // trees never collapse to one sentence.
    fn operand(f: &Formula, out: &mut String) {
        let composite = matches!(
            f,
            Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..)
        );
        if composite {
            out.push('(');
            nl(f, out);
            out.push(')');
        } else {
            nl(f, out);
        }
    }
    match f {
        Formula::Predicate(name, args) => {
            out.push_str(name);
            out.push_str(" holds");
            if !args.is_empty() {
                out.push_str(" of ");
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(if i + 1 == args.len() { " and " } else { ", " });
                    }
                    out.push_str(term_phrase(a));
                }
            }
        }
        Formula::Not(g) => {
            out.push_str("it is not the case that ");
            operand(g, out);
        }
        Formula::And(l, r) => {
            operand(l, out);
            out.push_str(" and ");
            operand(r, out);
        }
        Formula::Or(l, r) => {
            operand(l, out);
            out.push_str(" or ");
            operand(r, out);
        }
        Formula::Implies(l, r) => {
            out.push_str("if ");
            operand(l, out);
            out.push_str(" then ");
            operand(r, out);
        }
        Formula::Iff(l, r) => {
            operand(l, out);
            out.push_str(" if and only if ");
            operand(r, out);
        }
        Formula::ForAll(v, body) => {
            out.push_str("for every entity ");
            out.push_str(v);
            out.push_str(", ");
            operand(body, out);
        }
        Formula::Exists(v, body) => {
            out.push_str("there exists an entity ");
            out.push_str(v);
            out.push_str(" such that ");
            operand(body, out);
        }
        Formula::Top => out.push_str("a tautology holds"),
        Formula::Bottom => out.push_str("a contradiction arises"),
    }
}

/// Renders a formula in the requested style. Identical ASTs produce
/// byte-identical strings; the ASCII style re-parses to the same AST.
pub fn render_formula(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    match style {
        Style::Ascii => symbolic(f, &ASCII, 0, &mut out),
        Style::Unicode => symbolic(f, &UNICODE, 0, &mut out),
        Style::Prover9 => {
            symbolic(f, &PROVER9, 0, &mut out);
            out.push('.');
        }
        Style::NlTemplate => nl(f, &mut out),
    }
    out
}

/// Renders a problem as a Prover9 input file: an assumptions block holding
/// the premises and a goals block holding the conclusion.
pub fn export_prover9(p: &Problem) -> String {
    let mut out = String::from("formulas(assumptions).\n");
    for prem in &p.premises {
        out.push_str(&render_formula(prem, Style::Prover9));
        out.push('\n');
    }
    out.push_str("end_of_list.\n\nformulas(goals).\n");
    out.push_str(&render_formula(&p.conclusion, Style::Prover9));
    out.push_str("\nend_of_list.\n");
    out
}
