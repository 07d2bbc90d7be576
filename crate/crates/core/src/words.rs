//! Alphabets, finite words and the canonical enumeration of tree levels.
//!
//! Words are read root-first: the leftmost letter is the vertex nearest the
//! root. Levels are enumerated big-endian, so the root letter is the most
//! significant digit and truncating a word to its length-`k` prefix is integer
//! division by `d^(n-k)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("malformed word: letter {letter} is not in the alphabet of size {d}")]
    MalformedWord { letter: usize, d: usize },
    #[error("index {index} out of range for words of length {n} over {d} letters")]
    IndexOutOfRange { index: u64, n: usize, d: usize },
    #[error("level {n} over {d} letters does not fit in a 64-bit index")]
    LevelTooLarge { n: usize, d: usize },
    #[error("cannot parse word literal {0:?}")]
    Syntax(String),
}

/// The letters `0..d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(d: usize) -> Result<Self, WordError> {
        if d < 2 {
            return Err(WordError::AlphabetTooSmall(d));
        }
        Ok(Alphabet(d))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    /// `d^n`, or `None` on overflow.
    pub fn level_size(self, n: usize) -> Option<u64> {
        (self.0 as u64).checked_pow(u32::try_from(n).ok()?)
    }

    pub fn letters(self) -> std::ops::Range<usize> {
        0..self.0
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite word over some alphabet. The empty word is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    /// Builds a word, checking every letter against the alphabet.
    pub fn checked(letters: Vec<usize>, d: Alphabet) -> Result<Self, WordError> {
        let w = Word(letters);
        w.validate(d)?;
        Ok(w)
    }

    pub fn validate(&self, d: Alphabet) -> Result<(), WordError> {
        match self.0.iter().find(|&&x| x >= d.size()) {
            Some(&letter) => Err(WordError::MalformedWord { letter, d: d.size() }),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, x: usize) {
        self.0.push(x);
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// The first `n` letters of `self` repeated forever.
    pub fn periodic_prefix(&self, n: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        Word(self.0.iter().copied().cycle().take(n).collect())
    }

    /// Renders with bare digits for `d <= 10` and dot-separated numbers above.
    pub fn render(&self, d: Alphabet) -> String {
        if d.size() <= 10 {
            self.0.iter().map(|x| char::from(b'0' + *x as u8)).collect()
        } else {
            self.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    /// Parses a literal in the format produced by [`Word::render`]. The
    /// literal `ε` or an empty string is the empty word.
    pub fn parse(s: &str, d: Alphabet) -> Result<Self, WordError> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(Word::empty());
        }
        let letters: Result<Vec<usize>, _> = if d.size() <= 10 && !s.contains('.') {
            s.chars().map(|c| c.to_digit(10).map(|x| x as usize).ok_or(())).collect()
        } else {
            s.split('.').map(|t| usize::from_str(t).map_err(|_| ())).collect()
        };
        let letters = letters.map_err(|_| WordError::Syntax(s.to_string()))?;
        Word::checked(letters, d)
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

/// Big-endian mixed-radix index of `w` in `X^|w|`.
pub fn word_index(w: &Word, d: Alphabet) -> Result<u64, WordError> {
    w.validate(d)?;
    d.level_size(w.len()).ok_or(WordError::LevelTooLarge { n: w.len(), d: d.size() })?;
    Ok(w.0.iter().fold(0u64, |acc, &x| acc * d.size() as u64 + x as u64))
}

/// Inverse of [`word_index`] on words of length `n`.
pub fn index_word(i: u64, n: usize, d: Alphabet) -> Result<Word, WordError> {
    let size = d.level_size(n).ok_or(WordError::LevelTooLarge { n, d: d.size() })?;
    if i >= size {
        return Err(WordError::IndexOutOfRange { index: i, n, d: d.size() });
    }
    let mut letters = vec![0; n];
    let mut rest = i;
    for slot in letters.iter_mut().rev() {
        *slot = (rest % d.size() as u64) as usize;
        rest /= d.size() as u64;
    }
    Ok(Word(letters))
}
