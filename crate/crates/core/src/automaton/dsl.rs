//! Line-based automaton syntax:
//!
//! ```text
//! # comment
//! alphabet = 2
//! a : (0 1) [1, b]
//! b : () [1, a]
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{valid_name, AutomatonSpec, State, StateId, IDENTITY_NAME};
use crate::perm::{Perm, PermError};
use crate::words::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    MissingAlphabet,
    UnknownState(String),
    NonBijective(String),
    DuplicateState(String),
    AlphabetMismatch(String),
    ReservedName(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::MissingAlphabet => write!(f, "missing `alphabet = d` header"),
            ParseErrorKind::UnknownState(n) => write!(f, "unknown state {n}"),
            ParseErrorKind::NonBijective(m) => write!(f, "permutation is not a bijection: {m}"),
            ParseErrorKind::DuplicateState(n) => write!(f, "duplicate state name {n}"),
            ParseErrorKind::AlphabetMismatch(m) => write!(f, "alphabet mismatch: {m}"),
            ParseErrorKind::ReservedName(n) => write!(f, "state name {n} is reserved"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, col, kind }
}

struct Row<'a> {
    line: usize,
    name: &'a str,
    name_col: usize,
    perm: Perm,
    restrictions: Vec<(&'a str, usize)>,
}

/// Strips a trailing `#` comment.
fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("")
}

fn col_of(line: &str, sub: &str) -> usize {
    // sub is always a subslice of line
    (sub.as_ptr() as usize - line.as_ptr() as usize) + 1
}

pub(super) fn parse(text: &str) -> Result<AutomatonSpec, ParseError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut rows: Vec<Row> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = content(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let start = col_of(raw, trimmed);
        if alphabet.is_none() {
            let rest =
                trimmed.strip_prefix("alphabet").ok_or_else(|| err(line_no, start, ParseErrorKind::MissingAlphabet))?;
            let rest = rest
                .trim_start()
                .strip_prefix('=')
                .ok_or_else(|| err(line_no, start, ParseErrorKind::Syntax("expected `=`".into())))?;
            let value = rest.trim();
            let d: usize = value.parse().map_err(|_| {
                err(line_no, col_of(raw, value), ParseErrorKind::Syntax(format!("bad alphabet size {value:?}")))
            })?;
            let a = Alphabet::new(d)
                .map_err(|e| err(line_no, col_of(raw, value), ParseErrorKind::AlphabetMismatch(e.to_string())))?;
            alphabet = Some(a);
            continue;
        }
        let d = alphabet.expect("set above").size();
        rows.push(parse_row(raw, trimmed, line_no, d)?);
    }

    let alphabet = alphabet.ok_or_else(|| err(1, 1, ParseErrorKind::MissingAlphabet))?;

    let mut ids: HashMap<&str, StateId> = HashMap::new();
    for (i, r) in rows.iter().enumerate() {
        if ids.insert(r.name, i).is_some() {
            return Err(err(r.line, r.name_col, ParseErrorKind::DuplicateState(r.name.to_string())));
        }
    }
    let mut states = Vec::with_capacity(rows.len());
    for r in &rows {
        let mut restrictions = Vec::with_capacity(r.restrictions.len());
        for &(t, col) in &r.restrictions {
            if t == IDENTITY_NAME {
                restrictions.push(None);
            } else {
                let id = ids.get(t).ok_or_else(|| err(r.line, col, ParseErrorKind::UnknownState(t.to_string())))?;
                restrictions.push(Some(*id));
            }
        }
        states.push(State { name: r.name.to_string(), perm: r.perm.clone(), restrictions });
    }
    Ok(AutomatonSpec::new(alphabet, states).expect("rows validated during parsing"))
}

fn parse_row<'a>(raw: &'a str, trimmed: &'a str, line: usize, d: usize) -> Result<Row<'a>, ParseError> {
    let colon = trimmed.find(':').ok_or_else(|| {
        err(line, col_of(raw, trimmed), ParseErrorKind::Syntax("expected `NAME : PERM [...]`".into()))
    })?;
    let name = trimmed[..colon].trim();
    let name_col = col_of(raw, trimmed);
    if name == IDENTITY_NAME {
        return Err(err(line, name_col, ParseErrorKind::ReservedName(name.to_string())));
    }
    if !valid_name(name) {
        return Err(err(line, name_col, ParseErrorKind::Syntax(format!("bad state name {name:?}"))));
    }
    let rest = &trimmed[colon + 1..];
    let open =
        rest.find('[').ok_or_else(|| err(line, col_of(raw, rest), ParseErrorKind::Syntax("expected `[`".into())))?;
    let perm_text = rest[..open].trim();
    let perm_col = if perm_text.is_empty() { col_of(raw, rest) } else { col_of(raw, perm_text) };
    let perm = Perm::parse_cycles(perm_text, d).map_err(|e| {
        let kind = match e {
            PermError::Repeated(p) => ParseErrorKind::NonBijective(format!("point {p} repeated")),
            PermError::PointOutOfRange { point, d } => {
                ParseErrorKind::AlphabetMismatch(format!("point {point} outside alphabet of size {d}"))
            }
            PermError::Syntax(m) => ParseErrorKind::Syntax(m),
        };
        err(line, perm_col, kind)
    })?;
    let list = &rest[open + 1..];
    let close =
        list.find(']').ok_or_else(|| err(line, col_of(raw, list), ParseErrorKind::Syntax("expected `]`".into())))?;
    let trailing = list[close + 1..].trim();
    if !trailing.is_empty() {
        return Err(err(line, col_of(raw, trailing), ParseErrorKind::Syntax(format!("unexpected {trailing:?}"))));
    }
    let inner = &list[..close];
    let mut restrictions = Vec::new();
    for piece in inner.split(',') {
        let t = piece.trim();
        let col = if t.is_empty() { col_of(raw, piece) } else { col_of(raw, t) };
        if t != IDENTITY_NAME && !valid_name(t) {
            return Err(err(line, col, ParseErrorKind::Syntax(format!("bad restriction {t:?}"))));
        }
        restrictions.push((t, col));
    }
    if restrictions.len() != d {
        return Err(err(
            line,
            col_of(raw, inner),
            ParseErrorKind::AlphabetMismatch(format!("{} restrictions given for {} letters", restrictions.len(), d)),
        ));
    }
    Ok(Row { line, name, name_col, perm, restrictions })
}
