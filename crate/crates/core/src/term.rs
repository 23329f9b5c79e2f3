//! Terms in the signature `∧, →, 1, j` (and `0` for bounded varieties).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::Variety;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    /// A variable `x_i`, `i >= 1`.
    Var(u32),
    Meet(Box<Term>, Box<Term>),
    Imp(Box<Term>, Box<Term>),
    Top,
    J(Box<Term>),
    Bot,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Unexpected { pos: usize, found: String, expected: &'static str },
    #[error("variable index at position {pos} must be at least 1")]
    ZeroVariable { pos: usize },
    #[error("variable index at position {pos} is too large")]
    VariableOverflow { pos: usize },
    #[error("`{symbol}` at position {pos} needs a bounded variety, not {variety}")]
    Unbounded { pos: usize, symbol: char, variety: Variety },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match *self {
            ParseError::Unexpected { pos, .. }
            | ParseError::ZeroVariable { pos }
            | ParseError::VariableOverflow { pos }
            | ParseError::Unbounded { pos, .. } => pos,
        }
    }
}

impl Term {
    pub fn var(i: u32) -> Term {
        assert!(i >= 1, "variables are numbered from 1");
        Term::Var(i)
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Term, b: Term) -> Term {
        Term::Imp(Box::new(a), Box::new(b))
    }

    pub fn j(a: Term) -> Term {
        Term::J(Box::new(a))
    }

    pub fn neg(a: Term) -> Term {
        Term::imp(a, Term::Bot)
    }

    /// Distinct variable indices, ascending.
    pub fn variables(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::Meet(a, b) | Term::Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::J(a) => a.collect_vars(out),
            Term::Top | Term::Bot => {}
        }
    }

    pub fn max_var(&self) -> u32 {
        self.variables().last().copied().unwrap_or(0)
    }

    pub fn uses_bot(&self) -> bool {
        match self {
            Term::Bot => true,
            Term::Meet(a, b) | Term::Imp(a, b) => a.uses_bot() || b.uses_bot(),
            Term::J(a) => a.uses_bot(),
            Term::Var(_) | Term::Top => false,
        }
    }

    pub fn uses_j(&self) -> bool {
        match self {
            Term::J(_) => true,
            Term::Meet(a, b) | Term::Imp(a, b) => a.uses_j() || b.uses_j(),
            Term::Var(_) | Term::Top | Term::Bot => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Meet(a, b) | Term::Imp(a, b) => 1 + a.size() + b.size(),
            Term::J(a) => 1 + a.size(),
            Term::Var(_) | Term::Top | Term::Bot => 1,
        }
    }

    /// Renames variables by `f`.
    pub fn map_vars(&self, f: &impl Fn(u32) -> u32) -> Term {
        match self {
            Term::Var(i) => Term::Var(f(*i)),
            Term::Meet(a, b) => Term::meet(a.map_vars(f), b.map_vars(f)),
            Term::Imp(a, b) => Term::imp(a.map_vars(f), b.map_vars(f)),
            Term::J(a) => Term::j(a.map_vars(f)),
            Term::Top => Term::Top,
            Term::Bot => Term::Bot,
        }
    }

    /// Renumbers the variables that occur as `1..k`, keeping their order.
    /// Returns the renamed term and the original index of each new variable.
    pub fn compact(&self) -> (Term, Vec<u32>) {
        let vars: Vec<u32> = self.variables().into_iter().collect();
        let t = self.map_vars(&|i| vars.binary_search(&i).expect("collected") as u32 + 1);
        (t, vars)
    }
}

fn needs_parens_in_meet(t: &Term) -> bool {
    matches!(t, Term::Imp(..))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Top => write!(f, "1"),
            Term::Bot => write!(f, "0"),
            Term::J(a) => write!(f, "j({a})"),
            Term::Meet(a, b) => {
                if needs_parens_in_meet(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " & ")?;
                // & is left associative, so a right-hand meet keeps its parentheses
                if needs_parens_in_meet(b) || matches!(**b, Term::Meet(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Term::Imp(a, b) => {
                if matches!(**a, Term::Imp(..)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

impl std::str::FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Term, ParseError> {
        parse_term(s)
    }
}

/// Parses a term. `~a` is read as `a -> 0`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    Parser::new(text, None).parse()
}

/// Parses a term for a variety, rejecting `0` and `~` when the variety has
/// no bottom.
pub fn parse_term_for(text: &str, variety: Variety) -> Result<Term, ParseError> {
    Parser::new(text, Some(variety)).parse()
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    variety: Option<Variety>,
}

impl<'s> Parser<'s> {
    fn new(text: &'s str, variety: Option<Variety>) -> Self {
        Parser { src: text.as_bytes(), pos: 0, variety }
    }

    fn parse(mut self) -> Result<Term, ParseError> {
        let t = self.imp()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(self.unexpected("end of input"));
        }
        Ok(t)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let found = match self.src.get(self.pos) {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = std::str::from_utf8(&self.src[self.pos..]).unwrap_or("?");
                format!("`{}`", rest.chars().next().unwrap_or('?'))
            }
        };
        ParseError::Unexpected { pos: self.pos, found, expected }
    }

    fn expect(&mut self, byte: u8, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn check_bounded(&self, symbol: char) -> Result<(), ParseError> {
        match self.variety {
            Some(v) if !v.is_bounded() => Err(ParseError::Unbounded { pos: self.pos, symbol, variety: v }),
            _ => Ok(()),
        }
    }

    fn imp(&mut self) -> Result<Term, ParseError> {
        let lhs = self.conj()?;
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"->") {
            self.pos += 2;
            let rhs = self.imp()?;
            return Ok(Term::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Term, ParseError> {
        let mut t = self.unary()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.unary()?;
            t = Term::meet(t, rhs);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        const EXPECTED: &str = "a variable, `1`, `0`, `~`, `j(` or `(`";
        match self.peek() {
            Some(b'j') => {
                self.pos += 1;
                self.expect(b'(', "`(` after `j`")?;
                let t = self.imp()?;
                self.expect(b')', "`)`")?;
                Ok(Term::j(t))
            }
            Some(b'~') => {
                self.check_bounded('~')?;
                self.pos += 1;
                Ok(Term::neg(self.unary()?))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Term::Top)
            }
            Some(b'0') => {
                self.check_bounded('0')?;
                self.pos += 1;
                Ok(Term::Bot)
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if digits_start == self.pos {
                    return Err(self.unexpected("digits after `x`"));
                }
                let digits = std::str::from_utf8(&self.src[digits_start..self.pos]).expect("ascii digits");
                let i: u32 = digits.parse().map_err(|_| ParseError::VariableOverflow { pos: start })?;
                if i == 0 {
                    return Err(ParseError::ZeroVariable { pos: start });
                }
                Ok(Term::Var(i))
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.imp()?;
                self.expect(b')', "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected(EXPECTED)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        let v = |i| Term::var(i);
        assert_eq!(parse_term("x1 -> j(x1)").unwrap(), Term::imp(v(1), Term::j(v(1))));
        assert_eq!(
            parse_term("j(x1 & x2) -> j(x1) & j(x2)").unwrap(),
            Term::imp(Term::j(Term::meet(v(1), v(2))), Term::meet(Term::j(v(1)), Term::j(v(2))))
        );
        assert_eq!(parse_term("x1 -> x2 -> x1").unwrap(), Term::imp(v(1), Term::imp(v(2), v(1))));
        assert_eq!(parse_term("~x1 & 1").unwrap(), Term::meet(Term::neg(v(1)), Term::Top));
    }

    #[test]
    fn reports_positions() {
        assert_eq!(parse_term("x1 -> ").unwrap_err().position(), 6);
        assert_eq!(parse_term("x1 x2").unwrap_err().position(), 3);
        assert!(matches!(parse_term("x0"), Err(ParseError::ZeroVariable { pos: 0 })));
        assert!(matches!(parse_term("j x1"), Err(ParseError::Unexpected { pos: 2, .. })));
    }

    #[test]
    fn bottom_needs_bounded_variety() {
        assert!(parse_term_for("~x1", Variety::Nis).is_err());
        assert!(parse_term_for("j(0) -> 0", Variety::Is).is_err());
        assert!(parse_term_for("j(0) -> 0", Variety::Dense).is_ok());
        assert!(parse_term_for("~x1", Variety::IsBot).is_ok());
    }

    #[test]
    fn compact_renumbers() {
        let t = parse_term("x3 -> x7 & x3").unwrap();
        let (c, orig) = t.compact();
        assert_eq!(c.to_string(), "x1 -> x2 & x1");
        assert_eq!(orig, vec![3, 7]);
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![(1u32..4).prop_map(Term::Var), Just(Term::Top), Just(Term::Bot)];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::meet(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::imp(a, b)),
                inner.prop_map(Term::j),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(t in arb_term()) {
            prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
    }
}
