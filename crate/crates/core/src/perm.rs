//! Permutations of a small finite set `0..d`, in image-array form.
//!
//! Composition follows left actions: `(p * q)(x) = p(q(x))`.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("point {point} is outside 0..{d}")]
    PointOutOfRange { point: usize, d: usize },
    #[error("point {0} appears more than once")]
    Repeated(usize),
    #[error("cycle notation syntax error: {0}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm((0..d).collect())
    }

    /// Builds a permutation from its image array, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &y in &images {
            if y >= d {
                return Err(PermError::PointOutOfRange { point: y, d });
            }
            if std::mem::replace(&mut seen[y], true) {
                return Err(PermError::Repeated(y));
            }
        }
        Ok(Perm(images))
    }

    /// Builds a permutation of `0..d` from disjoint cycles.
    pub fn from_cycles(d: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut seen = vec![false; d];
        for cycle in cycles {
            for &x in cycle {
                if x >= d {
                    return Err(PermError::PointOutOfRange { point: x, d });
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(PermError::Repeated(x));
                }
            }
            for (i, &x) in cycle.iter().enumerate() {
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Perm(images))
    }

    /// Parses cycle notation such as `(0 1)(2 3 4)`; `()` is the identity.
    pub fn parse_cycles(s: &str, d: usize) -> Result<Self, PermError> {
        let s = s.trim();
        if s == "()" {
            return Ok(Perm::identity(d));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| PermError::Syntax(format!("expected '(' in {s:?}")))?;
            let close = body.find(')').ok_or_else(|| PermError::Syntax(format!("unclosed cycle in {s:?}")))?;
            let points: Result<Vec<usize>, _> = body[..close].split_whitespace().map(str::parse).collect();
            let points = points.map_err(|_| PermError::Syntax(format!("bad point in {s:?}")))?;
            if points.len() < 2 {
                return Err(PermError::Syntax(format!("cycles must have at least two points in {s:?}")));
            }
            cycles.push(points);
            rest = body[close + 1..].trim_start();
        }
        Perm::from_cycles(d, &cycles)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &y)| i == y)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Perm(inv)
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&x| self.0[x] == x).collect()
    }

    pub fn fixed_count(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &y)| *i == y).count()
    }

    /// All cycles including fixed points, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.0[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.0[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycles of length at least two.
    pub fn nontrivial_cycles(&self) -> Vec<Vec<usize>> {
        self.cycles().into_iter().filter(|c| c.len() > 1).collect()
    }

    /// True iff this is a single cycle through every point.
    pub fn is_full_cycle(&self) -> bool {
        let d = self.0.len();
        let mut x = 0;
        for step in 1..=d {
            x = self.0[x];
            if x == 0 {
                return step == d;
            }
        }
        false
    }

    /// True iff every cycle has length at most two.
    pub fn is_involution(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| self.0[y] == x)
    }
}

impl Mul for &Perm {
    type Output = Perm;

    fn mul(self, rhs: &Perm) -> Perm {
        Perm(rhs.0.iter().map(|&y| self.0[y]).collect())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.nontrivial_cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}
