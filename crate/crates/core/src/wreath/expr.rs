//! Element expressions: `expr := term ("*" term)*`, `term := NAME ("^" INT)?`.
//! The name `1` is the identity.

use thiserror::Error;

use super::{AutomatonGroup, Element, Generator};
use crate::automaton::IDENTITY_NAME;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("unknown state {0:?} in expression")]
    UnknownName(String),
    #[error("bad exponent {0:?}")]
    BadExponent(String),
    #[error("syntax error in expression near {0:?}")]
    Syntax(String),
}

const MAX_EXPONENT: u64 = 1_000_000;

pub(super) fn parse(group: &AutomatonGroup, text: &str) -> Result<Element, ExprError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut letters: Vec<Generator> = Vec::new();
    for term in text.split('*') {
        let term = term.trim();
        if term.is_empty() {
            return Err(ExprError::Syntax(text.to_string()));
        }
        let (name, exp) = match term.split_once('^') {
            Some((n, e)) => {
                let e = e.trim();
                let k: i64 = e
                    .parse()
                    .ok()
                    .filter(|k: &i64| k.unsigned_abs() <= MAX_EXPONENT)
                    .ok_or_else(|| ExprError::BadExponent(e.to_string()))?;
                (n.trim(), k)
            }
            None => (term, 1),
        };
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(ExprError::Syntax(term.to_string()));
        }
        if name == IDENTITY_NAME {
            continue;
        }
        let id = group.automaton().id_of(name).ok_or_else(|| ExprError::UnknownName(name.to_string()))?;
        let g = Generator::new(id, exp < 0);
        letters.extend(std::iter::repeat_n(g, exp.unsigned_abs() as usize));
    }
    Ok(group.reduce(letters))
}

pub(super) fn display(group: &AutomatonGroup, g: &Element) -> String {
    if g.is_empty() {
        return IDENTITY_NAME.to_string();
    }
    let mut parts = Vec::new();
    let letters = g.letters();
    let mut i = 0;
    while i < letters.len() {
        let s = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == s {
            j += 1;
        }
        let run = (j - i) as i64;
        let exp = if s.inverse { -run } else { run };
        let name = group.automaton().name_of(s.state as usize);
        parts.push(if exp == 1 { name.to_string() } else { format!("{name}^{exp}") });
        i = j;
    }
    parts.join("*")
}
