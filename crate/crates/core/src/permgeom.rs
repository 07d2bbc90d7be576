//! Multisets of permutations and their cycle graphs.
//!
//! The cycle graph of a multiset `T` of permutations of `0..d` is bipartite:
//! one white vertex per point, one black vertex per non-trivial cycle of a
//! member, joined to the points of that cycle. `T` is tree-like when this
//! graph is a tree.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::AutomatonSpec;
use crate::perm::Perm;
use crate::wreath::{AutomatonGroup, WreathError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermGeomError {
    #[error("member {index} acts on {found} points, expected {d}")]
    DegreeMismatch { index: usize, found: usize, d: usize },
    #[error("multiset is not tree-like")]
    NotTreeLike,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermMultiset {
    d: usize,
    members: Vec<Perm>,
}

impl PermMultiset {
    pub fn new(d: usize, members: Vec<Perm>) -> Result<Self, PermGeomError> {
        for (index, p) in members.iter().enumerate() {
            if p.degree() != d {
                return Err(PermGeomError::DegreeMismatch { index, found: p.degree(), d });
            }
        }
        Ok(PermMultiset { d, members })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn members(&self) -> &[Perm] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlackVertex {
    pub member: usize,
    pub cycle: Vec<usize>,
}

/// Counts of the reduced cycle diagram: `F` includes the outer face and `c`
/// is the number of connected components of the diagram's 1-skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerData {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub c: usize,
}

impl EulerData {
    /// `V - E + F = 2 + (c - 1)`.
    pub fn formula_holds(&self) -> bool {
        self.v + self.f == self.e + 1 + self.c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleGraph {
    pub white: usize,
    pub black: Vec<BlackVertex>,
    pub euler: EulerData,
}

impl CycleGraph {
    pub fn edge_count(&self) -> usize {
        self.black.iter().map(|b| b.cycle.len()).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.white + self.black.len()
    }

    /// Connected components of the bipartite graph.
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count());
        for (k, b) in self.black.iter().enumerate() {
            for &x in &b.cycle {
                uf.union(self.white + k, x);
            }
        }
        uf.count()
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count() >= 1 && self.edge_count() + 1 == self.vertex_count() && self.components() == 1
    }

    /// Graphviz rendering: points as circles, cycles as filled squares.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph cycles {\n");
        for x in 0..self.white {
            let _ = writeln!(s, "  w{x} [label=\"{x}\", shape=circle];");
        }
        for (k, b) in self.black.iter().enumerate() {
            let _ = writeln!(
                s,
                "  b{k} [label=\"{}\", shape=square, style=filled, fillcolor=black, fontcolor=white];",
                b.member
            );
        }
        for (k, b) in self.black.iter().enumerate() {
            for &x in &b.cycle {
                let _ = writeln!(s, "  b{k} -- w{x};");
            }
        }
        s.push_str("}\n");
        s
    }
}

pub fn cycle_graph(t: &PermMultiset) -> CycleGraph {
    let d = t.degree();
    let black: Vec<BlackVertex> = t
        .members()
        .iter()
        .enumerate()
        .flat_map(|(member, p)| p.nontrivial_cycles().into_iter().map(move |cycle| BlackVertex { member, cycle }))
        .collect();
    let mut uf = UnionFind::new(d);
    for b in &black {
        for w in b.cycle.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let euler =
        EulerData { v: d, e: t.members().iter().map(|p| d - p.fixed_count()).sum(), f: black.len() + 1, c: uf.count() };
    CycleGraph { white: d, black, euler }
}

pub fn is_tree_like(t: &PermMultiset) -> bool {
    cycle_graph(t).is_tree()
}

/// Multiset of the actions of all states of `a` on `X^n`.
pub fn level_multiset(a: &AutomatonSpec, n: usize) -> Result<PermMultiset, WreathError> {
    let group = AutomatonGroup::new(a.clone());
    level_multiset_in(&group, n)
}

pub fn level_multiset_in(group: &AutomatonGroup, n: usize) -> Result<PermMultiset, WreathError> {
    let mut members = Vec::with_capacity(group.automaton().len());
    let mut size = 1;
    for s in 0..group.automaton().len() {
        let lp = group.level_permutation(&group.generator(s), n)?;
        size = lp.len();
        let images = lp.into_images().into_iter().map(|y| y as usize).collect();
        members.push(Perm::from_images(images).expect("level actions are bijections"));
    }
    if members.is_empty() {
        size = group.automaton().alphabet().level_size(n).unwrap_or(0) as usize;
    }
    Ok(PermMultiset::new(size, members).expect("all members act on X^n"))
}

pub fn treelike_level_check(a: &AutomatonSpec, n: usize) -> Result<bool, WreathError> {
    Ok(is_tree_like(&level_multiset(a, n)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub fix_i: usize,
    pub fix_j: usize,
    pub fix_sum: usize,
    pub euler: EulerData,
    /// `#Fix(π_i) + #Fix(π_j) >= 2` fails.
    pub fix_sum_violation: bool,
    /// Fixed-point sum at most 3 but some other member is not the identity.
    pub others_identity_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreePermsReport {
    pub d: usize,
    pub two_cells: usize,
    /// `two_cells <= d - 1` fails.
    pub two_cell_bound_violation: bool,
    /// Equality in the 2-cell bound should occur exactly when every member is
    /// a product of disjoint transpositions.
    pub two_cell_equality_violation: bool,
    pub pairs: Vec<PairReport>,
}

impl TreePermsReport {
    pub fn has_violation(&self) -> bool {
        self.two_cell_bound_violation
            || self.two_cell_equality_violation
            || self.pairs.iter().any(|p| p.fix_sum_violation || p.others_identity_violation || !p.euler.formula_holds())
    }
}

/// Fixed-point and Euler-characteristic data for every pair of members of a
/// tree-like multiset. Any flagged violation indicates a bug upstream.
pub fn treeperms_report(t: &PermMultiset) -> Result<TreePermsReport, PermGeomError> {
    let graph = cycle_graph(t);
    if !graph.is_tree() {
        return Err(PermGeomError::NotTreeLike);
    }
    let d = t.degree();
    let two_cells = graph.black.len();
    let transpositions = t.members().iter().all(Perm::is_involution);
    let mut pairs = Vec::new();
    let m = t.members();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let pair = PermMultiset { d, members: vec![m[i].clone(), m[j].clone()] };
            let (fix_i, fix_j) = (m[i].fixed_count(), m[j].fixed_count());
            let fix_sum = fix_i + fix_j;
            let others_identity = (0..m.len()).filter(|&k| k != i && k != j).all(|k| m[k].is_identity());
            pairs.push(PairReport {
                i,
                j,
                fix_i,
                fix_j,
                fix_sum,
                euler: cycle_graph(&pair).euler,
                fix_sum_violation: fix_sum < 2,
                others_identity_violation: fix_sum <= 3 && !others_identity,
            });
        }
    }
    Ok(TreePermsReport {
        d,
        two_cells,
        two_cell_bound_violation: two_cells + 1 > d,
        two_cell_equality_violation: (two_cells + 1 == d) != transpositions,
        pairs,
    })
}

/// Disjoint-set forest with path halving and a running component count.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), count: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `x` and `y` were already connected.
    pub(crate) fn union(&mut self, x: usize, y: usize) -> bool {
        let (a, b) = (self.find(x), self.find(y));
        if a == b {
            return false;
        }
        self.parent[a] = b;
        self.count -= 1;
        true
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }
}
