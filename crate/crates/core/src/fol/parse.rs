//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, loosest to tightest: `<->`, `->` (both right-associative),
//! `|`, `&` (left-associative), then `~`, quantifiers, and atoms.
//! Quantifiers bind tightly: `forall x. P(x) -> Q(x)` is an implication
//! whose antecedent is the quantified formula; write
//! `forall x. (P(x) -> Q(x))` for the wide-scope reading.
//!
//! An argument identifier is a variable when an enclosing quantifier binds
//! it and a constant otherwise.

use super::{ArityConflict, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error(transparent)]
    Arity(#[from] ArityConflict),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Top,
    Bottom,
    Forall,
    Exists,
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Tilde => "'~'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::DArrow => "'<->'".into(),
            Tok::Top => "'$T'".into(),
            Tok::Bottom => "'$F'".into(),
            Tok::Forall => "'forall'".into(),
            Tok::Exists => "'exists'".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            b'.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            b'~' => {
                toks.push((Tok::Tilde, i));
                i += 1;
            }
            b'&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            b'|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                toks.push((Tok::Arrow, i));
                i += 2;
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                toks.push((Tok::DArrow, i));
                i += 3;
            }
            b'$' if bytes.get(i + 1) == Some(&b'T') => {
                toks.push((Tok::Top, i));
                i += 2;
            }
            b'$' if bytes.get(i + 1) == Some(&b'F') => {
                toks.push((Tok::Bottom, i));
                i += 2;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i], b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: vec!["a formula token".into()],
                    found: format!("`{}`", text[i..].chars().next().unwrap()),
                })
            }
        }
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, t: Tok, show: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.fail(&[show])
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(&[what]),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let l = self.implication()?;
        if self.eat(&Tok::DArrow) {
            let r = self.iff()?;
            Ok(Formula::iff(l, r))
        } else {
            Ok(l)
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let l = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let r = self.implication()?;
            Ok(Formula::implies(l, r))
        } else {
            Ok(l)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let r = self.conjunction()?;
            l = Formula::or(l, r);
        }
        Ok(l)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.unary()?;
        while self.eat(&Tok::Amp) {
            let r = self.unary()?;
            l = Formula::and(l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let is_forall = self.bump() == Tok::Forall;
                let var = self.ident("a variable name")?;
                self.expect(Tok::Dot, "'.'")?;
                self.bound.push(var.clone());
                let body = self.unary();
                self.bound.pop();
                let body = body?;
                Ok(if is_forall {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bottom => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(name) => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let mut args = Vec::new();
                if !self.eat(&Tok::RParen) {
                    loop {
                        let id = self.ident("an argument identifier")?;
                        args.push(if self.bound.contains(&id) {
                            Term::Variable(id)
                        } else {
                            Term::Constant(id)
                        });
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma, "','")?;
                    }
                }
                Ok(Formula::Predicate(name, args))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => self.fail(&[
                "'~'",
                "'forall'",
                "'exists'",
                "a predicate",
                "'('",
                "'$T'",
                "'$F'",
            ]),
        }
    }
}

/// Parses an ASCII formula string into its unique AST.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        bound: Vec::new(),
    };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["end of input", "a connective"]);
    }
    f.signature()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(name: &str, var: &str) -> Formula {
        Formula::pred(name, vec![Term::Variable(var.into())])
    }

    #[test]
    fn parses_quantified_implication() {
        let f = parse_formula("forall x. (Human(x) -> Mammal(x))").unwrap();
        assert_eq!(
            f,
            Formula::forall("x", Formula::implies(pv("Human", "x"), pv("Mammal", "x")))
        );
    }

    #[test]
    fn parses_zero_arity_conjunction() {
        let f = parse_formula("P() & ~P()").unwrap();
        let p = Formula::pred("P", vec![]);
        assert_eq!(f, Formula::and(p.clone(), Formula::not(p)));
    }

    #[test]
    fn parses_nested_quantifiers_as_written() {
        let f = parse_formula("forall x. forall y. P(x,y)").unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::forall(
                    "y",
                    Formula::pred(
                        "P",
                        vec![Term::Variable("x".into()), Term::Variable("y".into())]
                    )
                )
            )
        );
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula("P() -> Q() -> R()").unwrap();
        let atom = |n: &str| Formula::pred(n, vec![]);
        assert_eq!(
            f,
            Formula::implies(atom("P"), Formula::implies(atom("Q"), atom("R")))
        );
    }

    #[test]
    fn conjunction_binds_tighter_than_disjunction() {
        let f = parse_formula("P() | Q() & R()").unwrap();
        let atom = |n: &str| Formula::pred(n, vec![]);
        assert_eq!(
            f,
            Formula::or(atom("P"), Formula::and(atom("Q"), atom("R")))
        );
    }

    #[test]
    fn unbound_argument_is_a_constant() {
        let f = parse_formula("Dog(bonnie)").unwrap();
        assert_eq!(
            f,
            Formula::pred("Dog", vec![Term::Constant("bonnie".into())])
        );
    }

    #[test]
    fn syntax_error_reports_offset_and_expectations() {
        let err = parse_formula("P() &").unwrap_err();
        match err {
            ParseError::Syntax {
                offset, expected, ..
            } => {
                assert_eq!(offset, 5);
                assert!(expected.iter().any(|e| e.contains("predicate")));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn trailing_input_is_rejected() {
        let err = parse_formula("P() Q()").unwrap_err();
        match err {
            ParseError::Syntax { offset, .. } => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn arity_conflict_is_reported() {
        let err = parse_formula("P(a) & P(a,b)").unwrap_err();
        match err {
            ParseError::Arity(c) => {
                assert_eq!(c.name, "P");
                assert_eq!((c.first, c.second), (1, 2));
            }
            other => panic!("expected arity error, got {other:?}"),
        }
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_formula("forall x. (Human(x) -> Mammal(x))").unwrap();
        let b = parse_formula("forall x.(Human(x)->Mammal(x))").unwrap();
        assert_eq!(a, b);
    }
}
