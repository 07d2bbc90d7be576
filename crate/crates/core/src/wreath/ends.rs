//! Counting the ends of the tree fixed by an element.
//!
//! The fixed-path graph has the restrictions of `g` as vertices and an edge
//! `u → u|x` whenever `u(x) = x`. Fixed ends are exactly the infinite paths
//! from `g`; a vertex is live when an infinite path leaves it, i.e. when it
//! reaches a cycle.

use std::fmt;

use serde::Serialize;

use super::closure::Closure;
use super::{AutomatonGroup, Element, WreathError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "count", rename_all = "lowercase")]
pub enum FixedEnds {
    Zero,
    Finite(u64),
    Infinite,
}

impl FixedEnds {
    pub fn is_zero(self) -> bool {
        self == FixedEnds::Zero
    }
}

impl fmt::Display for FixedEnds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedEnds::Zero => f.write_str("zero"),
            FixedEnds::Finite(k) => write!(f, "finite({k})"),
            FixedEnds::Infinite => f.write_str("infinite"),
        }
    }
}

impl AutomatonGroup {
    pub fn classify_fixed_ends(&self, g: &Element) -> Result<FixedEnds, WreathError> {
        let mut closure = Closure::new(self);
        let start = closure.intern(g.clone())?;
        let order = closure.explore(start)?;
        let n = closure.len();

        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &u in &order {
            let root = closure.root(u).clone();
            let children = closure.children(u)?;
            for (x, &c) in children.iter().enumerate() {
                if root.apply(x) == x {
                    succ[u as usize].push(c as usize);
                }
            }
        }

        let on_cycle = cycle_vertices(&succ);
        // live = reaches a cycle vertex; propagate backwards
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, vs) in succ.iter().enumerate() {
            for &v in vs {
                pred[v].push(u);
            }
        }
        let mut live = on_cycle.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&u| on_cycle[u]).collect();
        while let Some(v) = stack.pop() {
            for &u in &pred[v] {
                if !live[u] {
                    live[u] = true;
                    stack.push(u);
                }
            }
        }

        let s = start as usize;
        if !live[s] {
            return Ok(FixedEnds::Zero);
        }
        // only vertices reachable from g through fixed letters matter
        let mut reach = vec![false; n];
        reach[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &succ[u] {
                if live[v] && !reach[v] {
                    reach[v] = true;
                    stack.push(v);
                }
            }
        }
        let branching = (0..n).any(|u| reach[u] && on_cycle[u] && succ[u].iter().filter(|&&v| live[v]).count() >= 2);
        if branching {
            return Ok(FixedEnds::Infinite);
        }
        let mut memo: Vec<Option<u64>> = vec![None; n];
        Ok(FixedEnds::Finite(paths_into_cycles(s, &succ, &live, &on_cycle, &mut memo)))
    }
}

/// Paths from `u` through non-cycle live vertices ending at the first cycle
/// vertex met. The non-cycle part is acyclic, so the recursion terminates.
fn paths_into_cycles(u: usize, succ: &[Vec<usize>], live: &[bool], on_cycle: &[bool], memo: &mut [Option<u64>]) -> u64 {
    if on_cycle[u] {
        return 1;
    }
    if let Some(k) = memo[u] {
        return k;
    }
    let k = succ[u].iter().filter(|&&v| live[v]).map(|&v| paths_into_cycles(v, succ, live, on_cycle, memo)).sum();
    memo[u] = Some(k);
    k
}

/// Vertices lying on a directed cycle (including self-loops), via Tarjan.
fn cycle_vertices(succ: &[Vec<usize>]) -> Vec<bool> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (vertex, next successor position)
        let mut work = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = work.last_mut() {
            if *pos < succ[u].len() {
                let v = succ[u][*pos];
                *pos += 1;
                if index[v] == usize::MAX {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    work.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                work.pop();
                if let Some(&(p, _)) = work.last() {
                    low[p] = low[p].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == u {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    let mut size = vec![0usize; ncomp];
    for &c in &comp {
        size[c] += 1;
    }
    (0..n).map(|u| size[comp[u]] > 1 || succ[u].contains(&u)).collect()
}
