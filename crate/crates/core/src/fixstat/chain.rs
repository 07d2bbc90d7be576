//! Stabilizer chains for the action of an automaton group on one level.
//!
//! The base is every point `0, 1, 2, …` in word-index order; only levels
//! whose basic orbit is larger than one point store data. A strong generator
//! belongs to the stabilizer of `0..b` exactly when its least moved point is
//! at least `b`, so generator sets per level are never stored. Coset
//! representatives are kept inverted: stripping needs only the inverses, and
//! every element is a unique product `u_k⁻¹ ∘ … ∘ u_0⁻¹` of one inverse per
//! level, which is what enumeration and sampling walk.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::config::BudgetExceeded;
use crate::wreath::{AutomatonGroup, LevelPermutation, WreathError};

type Images = Vec<u32>;

fn compose(p: &[u32], q: &[u32]) -> Images {
    q.iter().map(|&y| p[y as usize]).collect()
}

fn invert(p: &[u32]) -> Images {
    let mut out = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        out[y as usize] = x as u32;
    }
    out
}

fn first_moved(p: &[u32], from: usize) -> Option<usize> {
    (from..p.len()).find(|&x| p[x] as usize != x)
}

struct ChainLevel {
    orbit: Vec<u32>,
    slot: HashMap<u32, usize>,
    /// `u_β⁻¹` for each orbit point `β`, where `u_β` maps the base point to `β`.
    inv_reps: Vec<Images>,
    /// Schreier generators already stripped: (orbit slot, strong generator).
    checked: HashSet<(usize, usize)>,
}

/// The image `G_n` of an automaton group on `X^n`, with a stabilizer chain.
pub struct LevelGroup {
    n: usize,
    d: usize,
    generators: Vec<LevelPermutation>,
    strong: Vec<Images>,
    strong_inv: Vec<Images>,
    strong_first: Vec<usize>,
    levels: BTreeMap<usize, ChainLevel>,
    cells_limit: u64,
    cells: u64,
    order: BigUint,
}

impl LevelGroup {
    /// Builds `G_n` from the level-`n` actions of the non-trivial states.
    pub fn build(group: &AutomatonGroup, n: usize) -> Result<LevelGroup, WreathError> {
        let generators = group
            .nontrivial_states()
            .into_iter()
            .map(|s| group.level_permutation(&group.generator(s), n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut lg = LevelGroup {
            n,
            d: group.degree(),
            generators,
            strong: Vec::new(),
            strong_inv: Vec::new(),
            strong_first: Vec::new(),
            levels: BTreeMap::new(),
            cells_limit: group.budget().chain_cells,
            cells: 0,
            order: BigUint::from(1u32),
        };
        for i in 0..lg.generators.len() {
            let g = lg.generators[i].images().to_vec();
            let residue = lg.strip(g, 0);
            if first_moved(&residue, 0).is_some() {
                lg.add_strong(residue)?;
            }
        }
        lg.complete()?;
        lg.order = lg.levels.values().map(|l| BigUint::from(l.orbit.len())).product();
        Ok(lg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn generators(&self) -> &[LevelPermutation] {
        &self.generators
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Order as a `u64`, when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }

    /// Base points with orbits larger than one point, and the orbit sizes.
    pub fn transversal_sizes(&self) -> Vec<(usize, usize)> {
        self.levels.iter().map(|(&b, l)| (b, l.orbit.len())).collect()
    }

    pub fn strong_generator_count(&self) -> usize {
        self.strong.len()
    }

    /// Residue of `g` after stripping through the levels with base point at
    /// least `from`; the identity exactly when `g` lies in the subgroup those
    /// levels describe.
    fn strip(&self, mut g: Images, from: usize) -> Images {
        let mut start = from;
        while let Some(b) = first_moved(&g, start) {
            let Some(level) = self.levels.get(&b) else {
                return g;
            };
            let Some(&k) = level.slot.get(&g[b]) else {
                return g;
            };
            g = compose(&level.inv_reps[k], &g);
            start = b + 1;
        }
        g
    }

    pub fn contains(&self, g: &LevelPermutation) -> bool {
        g.images().len() == self.points() && first_moved(&self.strip(g.images().to_vec(), 0), 0).is_none()
    }

    fn add_strong(&mut self, h: Images) -> Result<(), WreathError> {
        let first = first_moved(&h, 0).expect("strong generators are not the identity");
        self.strong_inv.push(invert(&h));
        self.strong.push(h);
        self.strong_first.push(first);
        let new = self.strong.len() - 1;
        let points = self.points();
        if !self.levels.contains_key(&first) {
            self.cells += points as u64;
        }
        self.levels.entry(first).or_insert_with(|| ChainLevel {
            orbit: vec![first as u32],
            slot: HashMap::from([(first as u32, 0)]),
            inv_reps: vec![(0..points as u32).collect()],
            checked: HashSet::new(),
        });
        let bases: Vec<usize> = self.levels.range(..=first).map(|(&b, _)| b).collect();
        for b in bases {
            self.extend_orbit(b, new)?;
        }
        Ok(())
    }

    /// Grows the orbit of level `b` after strong generator `new` joined its
    /// generating set. Existing representatives are kept.
    fn extend_orbit(&mut self, b: usize, new: usize) -> Result<(), WreathError> {
        let gens: Vec<usize> = (0..self.strong.len()).filter(|&i| self.strong_first[i] >= b).collect();
        let points = self.points() as u64;
        let mut level = self.levels.remove(&b).expect("level exists");
        let mut queue: VecDeque<(usize, usize)> = (0..level.orbit.len()).map(|k| (k, new)).collect();
        let mut result = Ok(());
        while let Some((k, gi)) = queue.pop_front() {
            let gamma = self.strong[gi][level.orbit[k] as usize];
            if level.slot.contains_key(&gamma) {
                continue;
            }
            self.cells += points;
            if self.cells > self.cells_limit {
                result = Err(BudgetExceeded::new("stabilizer chain entries", self.cells_limit).into());
                break;
            }
            let inv = compose(&level.inv_reps[k], &self.strong_inv[gi]);
            let slot = level.orbit.len();
            level.orbit.push(gamma);
            level.slot.insert(gamma, slot);
            level.inv_reps.push(inv);
            queue.extend(gens.iter().map(|&g| (slot, g)));
        }
        self.levels.insert(b, level);
        result
    }

    /// Strips Schreier generators, deepest level first, until every one
    /// strips to the identity.
    fn complete(&mut self) -> Result<(), WreathError> {
        'restart: loop {
            let bases: Vec<usize> = self.levels.keys().rev().copied().collect();
            for b in bases {
                let gens: Vec<usize> = (0..self.strong.len()).filter(|&i| self.strong_first[i] >= b).collect();
                let mut k = 0;
                while k < self.levels[&b].orbit.len() {
                    for &gi in &gens {
                        let level = self.levels.get_mut(&b).expect("level exists");
                        if !level.checked.insert((k, gi)) {
                            continue;
                        }
                        let beta = level.orbit[k];
                        let gamma = self.strong[gi][beta as usize];
                        let u_beta = invert(&level.inv_reps[k]);
                        let h = compose(&level.inv_reps[level.slot[&gamma]], &compose(&self.strong[gi], &u_beta));
                        let residue = self.strip(h, b + 1);
                        if first_moved(&residue, 0).is_some() {
                            self.add_strong(residue)?;
                            continue 'restart;
                        }
                    }
                    k += 1;
                }
            }
            return Ok(());
        }
    }

    fn chain(&self) -> Vec<&ChainLevel> {
        self.levels.values().collect()
    }

    /// One uniformly random element of `G_n`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> LevelPermutation {
        let mut acc: Images = (0..self.points() as u32).collect();
        for level in self.chain() {
            let k = rng.random_range(0..level.orbit.len());
            if k != 0 {
                let inv = &level.inv_reps[k];
                for y in acc.iter_mut() {
                    *y = inv[*y as usize];
                }
            }
        }
        LevelPermutation::from_images(self.d, self.n, acc)
    }

    /// Folds `f` over every element of `G_n`, each visited exactly once.
    /// Work is split over the representatives of the first level and the
    /// partial results merged with `merge`.
    pub fn fold_elements<T, I, F, M>(&self, init: I, f: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(&mut T, &[u32]) + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        let chain = self.chain();
        let identity: Images = (0..self.points() as u32).collect();
        let Some((first, rest)) = chain.split_first() else {
            let mut t = init();
            f(&mut t, &identity);
            return t;
        };
        first
            .inv_reps
            .par_iter()
            .map(|inv| {
                let mut t = init();
                walk(rest, inv.clone(), &mut |g| f(&mut t, g));
                t
            })
            .reduce(&init, &merge)
    }
}

fn walk(levels: &[&ChainLevel], acc: Images, f: &mut impl FnMut(&[u32])) {
    let Some((level, rest)) = levels.split_first() else {
        f(&acc);
        return;
    };
    for (k, inv) in level.inv_reps.iter().enumerate() {
        if k == 0 {
            walk(rest, acc.clone(), f);
        } else {
            walk(rest, acc.iter().map(|&y| inv[y as usize]).collect(), f);
        }
    }
}
