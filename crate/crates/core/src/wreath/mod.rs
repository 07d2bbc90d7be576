//! Exact arithmetic in the group generated by an automaton.
//!
//! Elements are words in the states and their formal inverses. The leftmost
//! factor acts last, so `(g h)(v) = g(h(v))` and
//! `(g h)|v = g|h(v) · h|v`. Everything below is computed from these two
//! rules and the automaton's transition tables.

mod closure;
mod ends;
mod expr;
mod level;
mod set;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::Serialize;
use thiserror::Error;

use crate::automaton::{AutomatonSpec, StateId};
use crate::config::{Budget, BudgetExceeded};
use crate::perm::Perm;
use crate::words::{Word, WordError};

pub use closure::Closure;
pub use ends::FixedEnds;
pub use expr::ExprError;
pub use level::LevelPermutation;
pub use set::ElementSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WreathError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("undecided within budget after exploring {explored} restrictions")]
    Undecided { explored: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl WreathError {
    pub fn is_budget(&self) -> bool {
        matches!(self, WreathError::Budget(_) | WreathError::Undecided { .. })
    }
}

/// A state or the formal inverse of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Generator {
    pub state: u32,
    pub inverse: bool,
}

impl Generator {
    pub fn new(state: StateId, inverse: bool) -> Self {
        Generator { state: state as u32, inverse }
    }

    pub fn inv(self) -> Self {
        Generator { state: self.state, inverse: !self.inverse }
    }

    #[inline]
    fn code(self) -> usize {
        2 * self.state as usize + usize::from(self.inverse)
    }
}

/// A word over states and inverses; the empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Vec<Generator>);

impl Element {
    pub fn identity() -> Self {
        Element(Vec::new())
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    /// Number of letters in this (freely reduced) word.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The group generated by an automaton, together with its caches.
/// Level actions of single generators, keyed by (generator code, level).
type LevelMemo = HashMap<(usize, usize), Arc<Vec<u32>>>;

pub struct AutomatonGroup {
    automaton: AutomatonSpec,
    budget: Budget,
    trivial: Vec<bool>,
    root: Vec<Perm>,
    restr: Vec<Vec<Option<Generator>>>,
    trivial_memo: RwLock<HashMap<Element, bool>>,
    level_memo: RwLock<LevelMemo>,
}

impl fmt::Debug for AutomatonGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AutomatonGroup")
            .field("automaton", &self.automaton)
            .field("budget", &self.budget)
            .finish_non_exhaustive()
    }
}

impl AutomatonGroup {
    pub fn new(automaton: AutomatonSpec) -> Self {
        Self::with_budget(automaton, Budget::default())
    }

    pub fn with_budget(automaton: AutomatonSpec, budget: Budget) -> Self {
        let trivial = automaton.trivial_states();
        let d = automaton.degree();
        let mut root = Vec::with_capacity(2 * automaton.len());
        let mut restr = Vec::with_capacity(2 * automaton.len());
        for s in automaton.states() {
            let lift =
                |r: Option<StateId>, inverse: bool| r.filter(|&t| !trivial[t]).map(|t| Generator::new(t, inverse));
            root.push(s.perm.clone());
            restr.push(s.restrictions.iter().map(|&r| lift(r, false)).collect());
            let inv = s.perm.inverse();
            restr.push((0..d).map(|x| lift(s.restrictions[inv.apply(x)], true)).collect());
            root.push(inv);
        }
        AutomatonGroup {
            automaton,
            budget,
            trivial,
            root,
            restr,
            trivial_memo: RwLock::new(HashMap::new()),
            level_memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn automaton(&self) -> &AutomatonSpec {
        &self.automaton
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn degree(&self) -> usize {
        self.automaton.degree()
    }

    pub fn is_trivial_state(&self, s: StateId) -> bool {
        self.trivial[s]
    }

    /// Non-trivial states in declaration order.
    pub fn nontrivial_states(&self) -> Vec<StateId> {
        (0..self.automaton.len()).filter(|&s| !self.trivial[s]).collect()
    }

    #[inline]
    pub fn generator_root(&self, g: Generator) -> &Perm {
        &self.root[g.code()]
    }

    #[inline]
    pub fn generator_restriction(&self, g: Generator, x: usize) -> Option<Generator> {
        self.restr[g.code()][x]
    }

    /// Drops trivial states and cancels adjacent `s s^-1` pairs.
    pub fn reduce(&self, letters: impl IntoIterator<Item = Generator>) -> Element {
        let mut out: Vec<Generator> = Vec::new();
        for g in letters {
            if self.trivial[g.state as usize] {
                continue;
            }
            if out.last() == Some(&g.inv()) {
                out.pop();
            } else {
                out.push(g);
            }
        }
        Element(out)
    }

    pub fn generator(&self, s: StateId) -> Element {
        self.reduce([Generator::new(s, false)])
    }

    pub fn element_by_name(&self, name: &str) -> Option<Element> {
        self.automaton.id_of(name).map(|s| self.generator(s))
    }

    /// Parses `a*b^-1*c^2`; `1` denotes the identity.
    pub fn parse_expr(&self, text: &str) -> Result<Element, ExprError> {
        expr::parse(self, text)
    }

    pub fn display(&self, g: &Element) -> String {
        expr::display(self, g)
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        self.reduce(g.0.iter().chain(h.0.iter()).copied())
    }

    pub fn inverse(&self, g: &Element) -> Element {
        Element(g.0.iter().rev().map(|x| x.inv()).collect())
    }

    pub fn power(&self, g: &Element, k: i64) -> Element {
        let base = if k < 0 { self.inverse(g) } else { g.clone() };
        let reps = k.unsigned_abs() as usize;
        self.reduce(std::iter::repeat_n(base.0.iter().copied(), reps).flatten())
    }

    /// `h^-1 g h`.
    pub fn conjugate(&self, g: &Element, h: &Element) -> Element {
        self.multiply(&self.multiply(&self.inverse(h), g), h)
    }

    /// Action of `g` on the first level.
    pub fn root_action(&self, g: &Element) -> Perm {
        let d = self.degree();
        let images = (0..d).map(|x| g.0.iter().rev().fold(x, |y, s| self.generator_root(*s).apply(y))).collect();
        Perm::from_images(images).expect("composition of permutations")
    }

    /// `(g(x), g|x)`.
    pub fn restrict_letter(&self, g: &Element, x: usize) -> (usize, Element) {
        let mut y = x;
        let mut parts = Vec::with_capacity(g.len());
        for s in g.0.iter().rev() {
            if let Some(r) = self.generator_restriction(*s, y) {
                parts.push(r);
            }
            y = self.generator_root(*s).apply(y);
        }
        parts.reverse();
        (y, self.reduce(parts))
    }

    /// Root permutation and all first-level restrictions of `g`.
    pub fn wreath_recursion(&self, g: &Element) -> (Perm, Vec<Element>) {
        let d = self.degree();
        let mut images = vec![0; d];
        let mut children = Vec::with_capacity(d);
        for (x, slot) in images.iter_mut().enumerate() {
            let (y, c) = self.restrict_letter(g, x);
            *slot = y;
            children.push(c);
        }
        (Perm::from_images(images).expect("composition of permutations"), children)
    }

    pub fn restrict(&self, g: &Element, v: &Word) -> Result<Element, WreathError> {
        v.validate(self.automaton.alphabet())?;
        Ok(v.letters().iter().fold(g.clone(), |h, &x| self.restrict_letter(&h, x).1))
    }

    /// `g(w)`, applying the rightmost factor first.
    pub fn act(&self, g: &Element, w: &Word) -> Result<Word, WreathError> {
        w.validate(self.automaton.alphabet())?;
        let mut cur = w.letters().to_vec();
        for s in g.0.iter().rev() {
            let mut state = Some(*s);
            for slot in cur.iter_mut() {
                let Some(q) = state else { break };
                let x = *slot;
                *slot = self.generator_root(q).apply(x);
                state = self.generator_restriction(q, x);
            }
        }
        Ok(Word::new(cur))
    }

    /// Decides whether `g` acts trivially by exploring its restriction closure.
    pub fn is_trivial(&self, g: &Element) -> Result<bool, WreathError> {
        if g.is_empty() {
            return Ok(true);
        }
        if let Some(&v) = self.trivial_memo.read().get(g) {
            return Ok(v);
        }
        let mut closure = Closure::new(self);
        let start = closure.intern(g.clone()).map_err(|_| WreathError::Undecided { explored: 0 })?;
        let mut stack = vec![start];
        let mut visited = vec![false; 1];
        visited[start as usize] = true;
        let mut answer = true;
        while let Some(u) = stack.pop() {
            if !closure.root(u).is_identity() {
                answer = false;
                break;
            }
            let children = match closure.children(u) {
                Ok(c) => c.to_vec(),
                Err(_) => return Err(WreathError::Undecided { explored: closure.len() }),
            };
            for c in children {
                if visited.len() <= c as usize {
                    visited.resize(c as usize + 1, false);
                }
                if !std::mem::replace(&mut visited[c as usize], true) {
                    stack.push(c);
                }
            }
        }
        self.trivial_memo.write().insert(g.clone(), answer);
        Ok(answer)
    }

    pub fn equal(&self, g: &Element, h: &Element) -> Result<bool, WreathError> {
        if g == h {
            return Ok(true);
        }
        self.is_trivial(&self.multiply(g, &self.inverse(h)))
    }

    /// Order of `g` if it is at most `max`.
    pub fn order_up_to(&self, g: &Element, max: usize) -> Result<Option<usize>, WreathError> {
        let mut p = g.clone();
        for k in 1..=max {
            if self.is_trivial(&p)? {
                return Ok(Some(k));
            }
            p = self.multiply(&p, g);
        }
        Ok(None)
    }

    /// Product of the non-trivial states in declaration order.
    pub fn state_product(&self) -> Element {
        self.reduce(self.nontrivial_states().into_iter().map(|s| Generator::new(s, false)))
    }

    /// Checks that the ordered products `ρ_n` of first-level actions of the
    /// restrictions `g|v`, `v ∈ X^(n-1)` in index order, are `d`-cycles for
    /// `n = 1..=depth`.
    pub fn spherically_transitive_to_depth(&self, g: &Element, depth: usize) -> Result<Transitivity, WreathError> {
        let mut closure = Closure::new(self);
        let start = closure.intern(g.clone())?;
        // products[k][id] = ordered product of root actions over the subtree of
        // depth k below the restriction `id`
        let mut memo: Vec<HashMap<u32, Perm>> = vec![HashMap::new(); depth.max(1)];
        for n in 1..=depth {
            let rho = subtree_product(&mut closure, &mut memo, start, n - 1)?;
            if !rho.is_full_cycle() {
                return Ok(Transitivity { depth, transitive: false, first_failure: Some(n) });
            }
        }
        Ok(Transitivity { depth, transitive: depth >= 1, first_failure: None })
    }
}

fn subtree_product(
    closure: &mut Closure<'_>,
    memo: &mut [HashMap<u32, Perm>],
    id: u32,
    k: usize,
) -> Result<Perm, WreathError> {
    if k == 0 {
        return Ok(closure.root(id).clone());
    }
    if let Some(p) = memo[k].get(&id) {
        return Ok(p.clone());
    }
    let children = closure.children(id)?.to_vec();
    let mut acc = Perm::identity(closure.degree());
    for c in children {
        let p = subtree_product(closure, memo, c, k - 1)?;
        acc = &acc * &p;
    }
    memo[k].insert(id, acc.clone());
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transitivity {
    pub depth: usize,
    pub transitive: bool,
    pub first_failure: Option<usize>,
}

#[cfg(test)]
mod tests;
