//! Letter assignment for portrait generators by lexicographic backtracking.
//!
//! Conditions (1) and (2) hold by construction: every post-critical point
//! lies in exactly one fiber and each cycle carries at most one restriction.
//! Condition (3) is enforced while searching: each new cycle must join
//! letters from distinct components of the cycles placed so far, and the
//! critical count makes the final hypergraph connected.

use super::{validate_portrait, FiberEntry, ImgError, Portrait};
use crate::automaton::{AutomatonSpec, State, StateId};
use crate::kneading::validate_kneading;
use crate::perm::Perm;
use crate::words::Alphabet;
use crate::wreath::AutomatonGroup;

fn state_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("g{i}")
    }
}

struct Search {
    d: usize,
    entries: Vec<Vec<FiberEntry>>,
    /// Restriction target for each entry, when post-critical.
    targets: Vec<Vec<Option<StateId>>>,
    images: Vec<Vec<usize>>,
    restrictions: Vec<Vec<Option<StateId>>>,
    used: Vec<bool>,
    component: Vec<usize>,
}

impl Search {
    fn interchangeable(a: &FiberEntry, b: &FiberEntry) -> bool {
        a.point.is_none() && b.point.is_none() && a.multiplicity == b.multiplicity && !a.postcritical && !b.postcritical
    }

    fn finish(&self) -> Option<AutomatonSpec> {
        let states = (0..self.images.len())
            .map(|i| State {
                name: state_name(i),
                perm: Perm::from_images(self.images[i].clone()).expect("cycles partition the alphabet"),
                restrictions: self.restrictions[i].clone(),
            })
            .collect();
        let spec = AutomatonSpec::new(Alphabet::new(self.d).expect("d >= 2"), states).expect("well-formed states");
        validate_kneading(&AutomatonGroup::new(spec.clone())).is_kneading().then_some(spec)
    }

    /// Places entry `j` of generator `g`; `prev_first` is the first letter
    /// of the previous entry, used to skip reorderings of interchangeable
    /// anonymous entries.
    fn place(&mut self, g: usize, j: usize, prev_first: Option<usize>) -> Option<AutomatonSpec> {
        if g == self.entries.len() {
            return self.finish();
        }
        if j == self.entries[g].len() {
            let used = std::mem::replace(&mut self.used, vec![false; self.d]);
            let found = self.place(g + 1, 0, None);
            self.used = used;
            return found;
        }
        let min_first = match prev_first {
            Some(p) if Self::interchangeable(&self.entries[g][j - 1], &self.entries[g][j]) => p + 1,
            _ => 0,
        };
        for first in min_first..self.d {
            if self.used[first] {
                continue;
            }
            let mut tuple = vec![first];
            if let Some(spec) = self.extend(g, j, &mut tuple) {
                return Some(spec);
            }
        }
        None
    }

    fn extend(&mut self, g: usize, j: usize, tuple: &mut Vec<usize>) -> Option<AutomatonSpec> {
        let m = self.entries[g][j].multiplicity;
        if tuple.len() < m {
            for x in tuple[0] + 1..self.d {
                if self.used[x] || tuple.contains(&x) || tuple.iter().any(|&y| self.component[y] == self.component[x]) {
                    continue;
                }
                tuple.push(x);
                let found = self.extend(g, j, tuple);
                tuple.pop();
                if found.is_some() {
                    return found;
                }
            }
            return None;
        }

        let saved = self.component.clone();
        let root = self.component[tuple[0]];
        for &x in tuple.iter() {
            let c = self.component[x];
            for label in self.component.iter_mut().filter(|l| **l == c) {
                *label = root;
            }
            self.used[x] = true;
        }
        for (k, &x) in tuple.iter().enumerate() {
            self.images[g][x] = tuple[(k + 1) % m];
        }
        let positions: Vec<usize> = if self.targets[g][j].is_some() { (0..m).collect() } else { vec![usize::MAX] };
        let mut found = None;
        for p in positions {
            if p != usize::MAX {
                self.restrictions[g][tuple[p]] = self.targets[g][j];
            }
            found = self.place(g, j + 1, Some(tuple[0]));
            if p != usize::MAX {
                self.restrictions[g][tuple[p]] = None;
            }
            if found.is_some() {
                break;
            }
        }
        for &x in tuple.iter() {
            self.images[g][x] = x;
            self.used[x] = false;
        }
        self.component = saved;
        found
    }
}

/// Automaton of the standard action described by a portrait. States are
/// named `a, b, c, …` in fiber order. Among all letter assignments, taken in
/// lexicographic order (generators in fiber order, entries in listed order,
/// each cycle as a tuple starting at its least letter, then the position of
/// its restriction), the first satisfying conditions (1)–(3) is returned.
pub fn portrait_to_automaton(p: &Portrait) -> Result<AutomatonSpec, ImgError> {
    let p = validate_portrait(p).map_err(ImgError::Invalid)?;
    let d = p.degree;
    let index = |name: &str| p.fibers.iter().position(|f| f.point == name);
    let entries: Vec<Vec<FiberEntry>> = p.fibers.iter().map(|f| f.entries.clone()).collect();
    let targets = entries
        .iter()
        .map(|es| es.iter().map(|e| if e.postcritical { e.point.as_deref().and_then(index) } else { None }).collect())
        .collect();
    let n = entries.len();
    let mut search = Search {
        d,
        entries,
        targets,
        images: vec![(0..d).collect(); n],
        restrictions: vec![vec![None; d]; n],
        used: vec![false; d],
        component: (0..d).collect(),
    };
    search.place(0, 0, None).ok_or(ImgError::NoRealization)
}
