//! Modal propositional formulas: AST, concrete syntax and measures.
//!
//! Concrete syntax, loosest to tightest binding:
//!
//! ```text
//! fml := or ("->" fml)?
//! or  := and ("|" and)*
//! and := un ("&" un)*
//! un  := ("box" | "[]" | "dia" | "<>" | "~") un | atom | "true" | "false" | "(" fml ")"
//! ```
//!
//! `~A` is sugar for `A -> false`; there is no negation node.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Arc<str>),
    Bottom,
    Top,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
    Dia(Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Arc::new(l), Arc::new(r))
    }

    /// `A -> false`.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bottom)
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Arc::new(f))
    }

    pub fn dia(f: Formula) -> Formula {
        Formula::Dia(Arc::new(f))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Maximal nesting of modalities.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom | Formula::Top => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.modal_depth().max(r.modal_depth())
            }
            Formula::Box(a) | Formula::Dia(a) => a.modal_depth() + 1,
        }
    }

    /// Number of connectives (atoms and constants count zero).
    pub fn connectives(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom | Formula::Top => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                1 + l.connectives() + r.connectives()
            }
            Formula::Box(a) | Formula::Dia(a) => 1 + a.connectives(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Bottom | Formula::Top => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Formula::Box(a) | Formula::Dia(a) => a.collect_atoms(out),
        }
    }

    /// All subformulas, including `self`.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            match &f {
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                    stack.push((**l).clone());
                    stack.push((**r).clone());
                }
                Formula::Box(a) | Formula::Dia(a) => stack.push((**a).clone()),
                _ => {}
            }
            out.insert(f);
        }
        out
    }
}

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn write_prec(f: &Formula, ctx: u8, out: &mut String) {
    let paren_needed = match f {
        Formula::And(..) => ctx > PREC_AND,
        Formula::Or(..) => ctx > PREC_OR,
        Formula::Imp(_, r) if **r != Formula::Bottom => ctx > PREC_IMP,
        _ => false,
    };
    if paren_needed {
        out.push('(');
    }
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Bottom => out.push_str("false"),
        Formula::Top => out.push_str("true"),
        Formula::And(l, r) => {
            write_prec(l, PREC_AND, out);
            out.push_str(" & ");
            write_prec(r, PREC_AND + 1, out);
        }
        Formula::Or(l, r) => {
            write_prec(l, PREC_OR, out);
            out.push_str(" | ");
            write_prec(r, PREC_OR + 1, out);
        }
        Formula::Imp(l, r) if **r == Formula::Bottom => {
            out.push('~');
            write_prec(l, PREC_UNARY, out);
        }
        Formula::Imp(l, r) => {
            write_prec(l, PREC_IMP + 1, out);
            out.push_str(" -> ");
            write_prec(r, PREC_IMP, out);
        }
        Formula::Box(a) => {
            out.push_str("box ");
            write_prec(a, PREC_UNARY, out);
        }
        Formula::Dia(a) => {
            out.push_str("dia ");
            write_prec(a, PREC_UNARY, out);
        }
    }
    if paren_needed {
        out.push(')');
    }
}

/// Renders `f` in the concrete syntax; `parse(&print(f)) == f`.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_prec(f, 0, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", print(self))
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&print(self))
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    True,
    False,
    Box,
    Dia,
    Not,
    And,
    Or,
    Imp,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    /// `=>`, optionally annotated as `=>{n}`.
    Arrow(Option<u32>),
    Comma,
    LBrace,
    RBrace,
    Plus,
    /// A lone `-`, not part of `->`.
    Minus,
    Colon,
    Semi,
    /// `<=`
    Le,
    /// `|-`
    Turnstile,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::True => f.write_str("`true`"),
            Tok::False => f.write_str("`false`"),
            Tok::Box => f.write_str("`box`"),
            Tok::Dia => f.write_str("`dia`"),
            Tok::Not => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Imp => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LAngle => f.write_str("`<`"),
            Tok::RAngle => f.write_str("`>`"),
            Tok::Arrow(_) => f.write_str("`=>`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Turnstile => f.write_str("`|-`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let next = bytes.get(i + 1).copied();
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'&' => Tok::And,
            b'|' if next == Some(b'-') => {
                i += 1;
                Tok::Turnstile
            }
            b'|' => Tok::Or,
            b'+' => Tok::Plus,
            b':' => Tok::Colon,
            b';' => Tok::Semi,
            b'~' => Tok::Not,
            b',' => Tok::Comma,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b']' => Tok::RBracket,
            b'>' => Tok::RAngle,
            b'[' if next == Some(b']') => {
                i += 1;
                Tok::Box
            }
            b'[' => Tok::LBracket,
            b'<' if next == Some(b'>') => {
                i += 1;
                Tok::Dia
            }
            b'<' if next == Some(b'=') && bytes.get(i + 2) != Some(&b'>') => {
                i += 1;
                Tok::Le
            }
            b'<' => Tok::LAngle,
            b'-' if next == Some(b'>') => {
                i += 1;
                Tok::Imp
            }
            b'-' => Tok::Minus,
            b'=' if next == Some(b'>') => {
                i += 2;
                let mut ann = None;
                if bytes.get(i) == Some(&b'{') {
                    let close = text[i..]
                        .find('}')
                        .ok_or_else(|| ParseError::new(i, "unterminated annotation"))?;
                    let digits = text[i + 1..i + close].trim();
                    let n = digits.parse::<u32>().map_err(|_| {
                        ParseError::new(i + 1, "annotation must be a natural number")
                    })?;
                    ann = Some(n);
                    i += close + 1;
                }
                out.push((start, Tok::Arrow(ann)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i + 1;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
                {
                    j += 1;
                }
                let word = &text[i..j];
                i = j;
                let tok = match word {
                    "box" => Tok::Box,
                    "dia" => Tok::Dia,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((start, tok));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(i, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

/// Recursive-descent cursor over a token stream; shared with the sequent reader.
pub(crate) struct Cursor {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    pub(crate) fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {tok}")))
        }
    }

    pub(crate) fn unexpected(&self, what: &str) -> ParseError {
        ParseError::new(self.pos(), format!("{what}, found {}", self.peek()))
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("expected end of input")),
        }
    }

    /// True if the next token can begin a formula.
    pub(crate) fn at_formula_start(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::True | Tok::False | Tok::Box | Tok::Dia | Tok::Not | Tok::LParen
        )
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Imp) {
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Box => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::Dia => {
                self.bump();
                Ok(Formula::dia(self.unary()?))
            }
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            _ => Err(self.unexpected("expected a formula")),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = cur.formula()?;
    cur.finish()?;
    Ok(f)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn parses_implication() {
        assert_eq!(parse("p -> p").unwrap(), Formula::imp(p(), p()));
    }

    #[test]
    fn negation_is_sugar() {
        assert_eq!(
            parse("~dia false").unwrap(),
            Formula::imp(Formula::dia(Formula::Bottom), Formula::Bottom)
        );
    }

    #[test]
    fn implication_associates_right() {
        let expected = Formula::imp(
            Formula::dia(p()),
            Formula::imp(Formula::boxed(q()), Formula::boxed(Formula::imp(p(), q()))),
        );
        assert_eq!(parse("dia p -> box q -> box (p -> q)").unwrap(), expected);
    }

    #[test]
    fn symbolic_modalities() {
        assert_eq!(parse("[]p & <>q").unwrap(), parse("box p & dia q").unwrap());
    }

    #[test]
    fn precedence_and_over_or_over_imp() {
        let f = parse("p & q | r -> p").unwrap();
        let expected = Formula::imp(Formula::or(Formula::and(p(), q()), Formula::atom("r")), p());
        assert_eq!(f, expected);
    }

    #[test]
    fn prints() {
        assert_eq!(print(&Formula::imp(p(), p())), "p -> p");
        assert_eq!(print(&Formula::dia(Formula::or(p(), q()))), "dia (p | q)");
        assert_eq!(print(&Formula::Bottom), "false");
        assert_eq!(
            print(&Formula::imp(Formula::imp(p(), q()), p())),
            "(p -> q) -> p"
        );
        assert_eq!(
            print(&Formula::not(Formula::dia(Formula::not(p())))),
            "~dia ~p"
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("p -> ").unwrap_err();
        assert_eq!(err.pos, 5);
        let err = parse("p $ q").unwrap_err();
        assert_eq!(err.pos, 2);
        assert!(parse("(p & q").is_err());
        assert!(parse("p q").is_err());
    }

    #[test]
    fn modal_depth_examples() {
        assert_eq!(p().modal_depth(), 0);
        assert_eq!(parse("box (p -> dia q)").unwrap().modal_depth(), 2);
        assert_eq!(parse("dia p & box q").unwrap().modal_depth(), 1);
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb::formula(5)) {
            prop_assert_eq!(parse(&print(&f)).unwrap(), f);
        }

        #[test]
        fn modal_depth_is_compositional(f in arb::formula(4)) {
            prop_assert_eq!(Formula::boxed(f.clone()).modal_depth(), f.modal_depth() + 1);
            prop_assert_eq!(Formula::dia(f.clone()).modal_depth(), f.modal_depth() + 1);
            let g = Formula::and(f.clone(), Formula::atom("p"));
            prop_assert_eq!(g.modal_depth(), f.modal_depth());
        }
    }
}
