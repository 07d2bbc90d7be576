//! Truncation of elements to a finite level of the tree.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::closure::Closure;
use super::{AutomatonGroup, Element, Generator, WreathError};
use crate::config::BudgetExceeded;
use crate::words::WordError;

/// Action of an element on `X^n`, as images of word indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LevelPermutation {
    pub n: usize,
    pub d: usize,
    images: Vec<u32>,
}

impl LevelPermutation {
    pub fn identity(d: usize, n: usize) -> Self {
        let size = d.pow(n as u32);
        LevelPermutation { n, d, images: (0..size as u32).collect() }
    }

    pub fn from_images(d: usize, n: usize, images: Vec<u32>) -> Self {
        debug_assert_eq!(images.len(), d.pow(n as u32));
        LevelPermutation { n, d, images }
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }

    #[inline]
    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize]
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn fixed_count(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &y)| *i as u32 == y).count()
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.images.len()];
        self.images.iter().all(|&y| (y as usize) < seen.len() && !std::mem::replace(&mut seen[y as usize], true))
    }

    /// Induced action on `X^k` for `k <= n`, or `None` if it is not well defined.
    pub fn truncate(&self, k: usize) -> Option<LevelPermutation> {
        let shift = self.d.pow((self.n - k) as u32) as u32;
        let mut images = vec![u32::MAX; self.d.pow(k as u32)];
        for (i, &y) in self.images.iter().enumerate() {
            let (p, q) = (i as u32 / shift, y / shift);
            let slot = &mut images[p as usize];
            if *slot == u32::MAX {
                *slot = q;
            } else if *slot != q {
                return None;
            }
        }
        let t = LevelPermutation { n: k, d: self.d, images };
        t.is_bijection().then_some(t)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LevelPermutation) -> LevelPermutation {
        let images = other.images.iter().map(|&y| self.images[y as usize]).collect();
        LevelPermutation { n: self.n, d: self.d, images }
    }

    pub fn orbit_count(&self) -> usize {
        let mut seen = vec![false; self.images.len()];
        let mut orbits = 0;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            orbits += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
            }
        }
        orbits
    }
}

impl AutomatonGroup {
    fn check_level(&self, n: usize) -> Result<usize, WreathError> {
        let d = self.degree();
        let size = self.automaton().alphabet().level_size(n).ok_or(WordError::LevelTooLarge { n, d })?;
        let limit = self.budget().max_points;
        if size > limit || size > u32::MAX as u64 {
            return Err(BudgetExceeded::new("points on a level", limit).into());
        }
        Ok(size as usize)
    }

    /// Cached action of a single generator on `X^n`.
    pub(crate) fn generator_level(&self, g: Generator, n: usize) -> Arc<Vec<u32>> {
        let key = (g.code(), n);
        if let Some(v) = self.level_memo.read().get(&key) {
            return v.clone();
        }
        let d = self.degree();
        let block = d.pow(n.saturating_sub(1) as u32);
        let mut images = vec![0u32; block * d];
        if n == 0 {
            images = vec![0];
        } else {
            let root = self.generator_root(g);
            for x in 0..d {
                let base = (root.apply(x) * block) as u32;
                let src = x * block;
                match self.generator_restriction(g, x) {
                    None => {
                        for r in 0..block {
                            images[src + r] = base + r as u32;
                        }
                    }
                    Some(c) => {
                        let child = self.generator_level(c, n - 1);
                        for r in 0..block {
                            images[src + r] = base + child[r];
                        }
                    }
                }
            }
        }
        let images = Arc::new(images);
        self.level_memo.write().insert(key, images.clone());
        images
    }

    /// Materializes the action of `g` on `X^n` in word-index order.
    pub fn level_permutation(&self, g: &Element, n: usize) -> Result<LevelPermutation, WreathError> {
        let size = self.check_level(n)?;
        let mut images: Vec<u32> = (0..size as u32).collect();
        for s in g.letters().iter().rev() {
            let table = self.generator_level(*s, n);
            for y in images.iter_mut() {
                *y = table[*y as usize];
            }
        }
        Ok(LevelPermutation { n, d: self.degree(), images })
    }

    /// Number of words of length `n` fixed by `g`, by descending only below
    /// fixed letters.
    pub fn count_fixed(&self, g: &Element, n: usize) -> Result<u64, WreathError> {
        let d = self.degree();
        self.automaton().alphabet().level_size(n).ok_or(WordError::LevelTooLarge { n, d })?;
        let mut closure = Closure::new(self);
        let start = closure.intern(g.clone())?;
        let mut memo: HashMap<(u32, usize), u64> = HashMap::new();
        count_fixed_rec(&mut closure, &mut memo, start, n)
    }
}

fn count_fixed_rec(
    closure: &mut Closure<'_>,
    memo: &mut HashMap<(u32, usize), u64>,
    u: u32,
    k: usize,
) -> Result<u64, WreathError> {
    if k == 0 {
        return Ok(1);
    }
    let d = closure.degree();
    if closure.element(u).is_empty() {
        return Ok((d as u64).pow(k as u32));
    }
    if let Some(&c) = memo.get(&(u, k)) {
        return Ok(c);
    }
    let root = closure.root(u).clone();
    let children = closure.children(u)?.to_vec();
    let mut total = 0;
    for (x, &c) in children.iter().enumerate() {
        if root.apply(x) == x {
            total += count_fixed_rec(closure, memo, c, k - 1)?;
        }
    }
    memo.insert((u, k), total);
    Ok(total)
}
