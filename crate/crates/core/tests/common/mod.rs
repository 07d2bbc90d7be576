//! Brute-force oracles that act on words straight from the automaton table,
//! sharing no code with the library's recursion, closure or chain routines.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use selfsim::automaton::AutomatonSpec;
use selfsim::imgbuild::{builtin_portrait, portrait_to_automaton, Builtin, Sign};
use selfsim::wreath::{AutomatonGroup, Element};

/// A word over states: `(state, inverse)`, leftmost acting last.
pub type Gens = Vec<(usize, bool)>;

pub struct Table {
    pub d: usize,
    perm: Vec<Vec<usize>>,
    inv_perm: Vec<Vec<usize>>,
    restr: Vec<Vec<Option<usize>>>,
    pub nontrivial: Vec<usize>,
}

impl Table {
    pub fn new(a: &AutomatonSpec, group: &AutomatonGroup) -> Table {
        let d = a.degree();
        let perm: Vec<Vec<usize>> = a.states().iter().map(|s| (0..d).map(|x| s.perm.apply(x)).collect()).collect();
        let inv_perm = perm
            .iter()
            .map(|p| {
                let mut q = vec![0; d];
                for (x, &y) in p.iter().enumerate() {
                    q[y] = x;
                }
                q
            })
            .collect();
        let restr = a.states().iter().map(|s| s.restrictions.clone()).collect();
        let nontrivial = (0..a.len()).filter(|&s| !group.is_trivial_state(s)).collect();
        Table { d, perm, inv_perm, restr, nontrivial }
    }

    /// One generator on a letter: the image and the restriction there.
    fn step(&self, s: usize, inv: bool, x: usize) -> (usize, Option<usize>) {
        if inv {
            let y = self.inv_perm[s][x];
            (y, self.restr[s][y])
        } else {
            (self.perm[s][x], self.restr[s][x])
        }
    }

    pub fn act(&self, gens: &[(usize, bool)], word: &[usize]) -> Vec<usize> {
        let mut w = word.to_vec();
        for &(s, inv) in gens.iter().rev() {
            let mut cur = Some(s);
            for x in w.iter_mut() {
                let Some(q) = cur else { break };
                let (y, next) = self.step(q, inv, *x);
                *x = y;
                cur = next;
            }
        }
        w
    }

    /// Images of all words of length `n`, indexed with the first letter most
    /// significant.
    pub fn level_images(&self, gens: &[(usize, bool)], n: usize) -> Vec<u16> {
        let size = self.d.pow(n as u32);
        let mut word = vec![0; n];
        (0..size)
            .map(|mut idx| {
                for i in (0..n).rev() {
                    word[i] = idx % self.d;
                    idx /= self.d;
                }
                self.act(gens, &word).iter().fold(0, |acc, &x| acc * self.d + x) as u16
            })
            .collect()
    }

    pub fn count_fixed(&self, gens: &[(usize, bool)], n: usize) -> u64 {
        self.level_images(gens, n).iter().enumerate().filter(|&(i, &y)| i == y as usize).count() as u64
    }

    /// `|G_n|` by closing the generators' level actions, or `None` past `cap`.
    pub fn order(&self, n: usize, cap: usize) -> Option<usize> {
        let gens: Vec<Vec<u16>> = self.nontrivial.iter().map(|&s| self.level_images(&[(s, false)], n)).collect();
        let identity: Vec<u16> = (0..self.d.pow(n as u32) as u16).collect();
        let mut seen = HashSet::from([identity.clone()]);
        let mut queue = VecDeque::from([identity]);
        while let Some(p) = queue.pop_front() {
            for g in &gens {
                let q: Vec<u16> = p.iter().map(|&y| g[y as usize]).collect();
                if seen.insert(q.clone()) {
                    if seen.len() > cap {
                        return None;
                    }
                    queue.push_back(q);
                }
            }
        }
        Some(seen.len())
    }

    /// Restriction of a word to a letter, freely reduced.
    pub fn restrict(&self, gens: &[(usize, bool)], x: usize) -> Gens {
        let mut out = Vec::new();
        let mut y = x;
        for &(s, inv) in gens.iter().rev() {
            let (img, r) = self.step(s, inv, y);
            if let Some(r) = r.filter(|r| self.nontrivial.contains(r)) {
                out.push((r, inv));
            }
            y = img;
        }
        out.reverse();
        free_reduce(out)
    }

    /// Whether `g` equals one of its restrictions `g|v` with `v` non-empty,
    /// comparing elements by their action on level `k`.
    pub fn in_n0(&self, g: &[(usize, bool)], k: usize, cap: usize) -> bool {
        let key = self.level_images(g, k);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        for x in 0..self.d {
            let r = self.restrict(g, x);
            if seen.insert(self.level_images(&r, k)) {
                queue.push_back(r);
            }
        }
        while let Some(h) = queue.pop_front() {
            if self.level_images(&h, k) == key {
                return true;
            }
            assert!(seen.len() <= cap, "restriction closure exceeds {cap}");
            for x in 0..self.d {
                let r = self.restrict(&h, x);
                if seen.insert(self.level_images(&r, k)) {
                    queue.push_back(r);
                }
            }
        }
        false
    }

    /// Fixed words of length `n`, found by extending fixed prefixes only;
    /// `None` once some level holds more than `cap` of them.
    pub fn fixed_words(&self, g: &[(usize, bool)], n: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
        let mut level = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &level {
                for x in 0..self.d {
                    let mut v: Vec<usize> = w.clone();
                    v.push(x);
                    if self.act(g, &v) == v {
                        next.push(v);
                    }
                }
            }
            if next.len() > cap {
                return None;
            }
            level = next;
        }
        Some(level)
    }

    /// For `i = 1..=n/2`, the fixed vertices of level `i` lying below a
    /// fixed vertex of level `n`; these count the fixed ends once stable.
    /// `None` when the fixed vertices outgrow `cap` on some level.
    pub fn live_profile(&self, g: &[(usize, bool)], n: usize, cap: usize) -> Option<Vec<u64>> {
        let deep = self.fixed_words(g, n, cap)?;
        Some((1..=n / 2).map(|i| deep.iter().map(|w| &w[..i]).collect::<HashSet<_>>().len() as u64).collect())
    }

    /// Reduced words of length at most `len` over the non-trivial states.
    pub fn words(&self, len: usize) -> Vec<Gens> {
        let letters: Vec<(usize, bool)> = self.nontrivial.iter().flat_map(|&s| [(s, false), (s, true)]).collect();
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<Gens> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &letters {
                    if w.last().is_some_and(|&(s, i)| s == l.0 && i != l.1) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

pub fn free_reduce(gens: Gens) -> Gens {
    let mut out: Gens = Vec::new();
    for g in gens {
        if out.last().is_some_and(|&(s, i)| s == g.0 && i != g.1) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

/// The library element spelled by an oracle word.
pub fn element(group: &AutomatonGroup, gens: &[(usize, bool)]) -> Element {
    gens.iter().fold(Element::identity(), |acc, &(s, inv)| {
        let g = group.generator(s);
        group.multiply(&acc, &if inv { group.inverse(&g) } else { g })
    })
}

pub fn parse(text: &str) -> AutomatonSpec {
    AutomatonSpec::parse(text).expect("fixture parses")
}

/// Every built-in kneading automaton: `z^d` and `T_d` for `d = 2..=5`,
/// `-T_d` for odd `d`, and the Basilica.
pub fn builtins() -> Vec<(String, AutomatonSpec)> {
    let mut kinds = vec![("basilica".to_string(), Builtin::Basilica)];
    for d in 2..=5 {
        kinds.push((format!("z^{d}"), Builtin::Power(d)));
        kinds.push((format!("T_{d}"), Builtin::Chebyshev(d, Sign::Plus)));
        if d % 2 == 1 {
            kinds.push((format!("-T_{d}"), Builtin::Chebyshev(d, Sign::Minus)));
        }
    }
    kinds
        .into_iter()
        .map(|(name, k)| {
            (name, portrait_to_automaton(&builtin_portrait(k).expect("valid built-in")).expect("realizable"))
        })
        .collect()
}
