//! Stable elements read off the kneading graph.
//!
//! Every non-backtracking path in the kneading graph spells a stable element
//! `g` (one with `g|v = g` for some non-empty `v`), letters copied right to
//! left and edges walked backwards read as inverses. Circuits spell the
//! stable elements that also fix `v`. The nucleus is everything reachable
//! from these by restriction.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::{build_kneading_graph, validate_kneading, KneadingGraph};
use crate::wreath::{AutomatonGroup, Element, ElementSet, Generator, WreathError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StableError {
    #[error("automaton is not a kneading automaton (conditions 1-3)")]
    NotKneading,
    #[error("not confirmed contracting within budget: more than {cap} elements")]
    NotContracting { cap: usize },
    #[error(transparent)]
    Wreath(#[from] WreathError),
}

impl StableError {
    pub fn is_budget(&self) -> bool {
        match self {
            StableError::NotContracting { .. } => true,
            StableError::Wreath(e) => e.is_budget(),
            StableError::NotKneading => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableSets {
    pub graph: KneadingGraph,
    pub n0: Vec<Element>,
    pub n1: Vec<Element>,
    /// Start vertex of a circuit spelling the corresponding `n1` element.
    pub n1_start: Vec<usize>,
    pub nucleus: Vec<Element>,
}

#[derive(Serialize)]
struct Listing {
    n0: Vec<String>,
    n1: Vec<String>,
    nucleus: Vec<String>,
}

impl StableSets {
    /// JSON listing of the three sets as expression strings.
    pub fn to_json(&self, group: &AutomatonGroup) -> serde_json::Value {
        let show = |v: &[Element]| v.iter().map(|g| group.display(g)).collect();
        serde_json::to_value(Listing { n0: show(&self.n0), n1: show(&self.n1), nucleus: show(&self.nucleus) })
            .expect("plain strings serialize")
    }
}

/// One step of a walk: edge index and direction.
type Step = (usize, bool);

fn steps_from(graph: &KneadingGraph) -> Vec<Vec<(Step, usize, Generator)>> {
    let mut out = vec![Vec::new(); graph.vertices.len()];
    for (i, e) in graph.edges.iter().enumerate() {
        let g = Generator::new(e.state, false);
        out[e.from].push(((i, true), e.to, g));
        out[e.to].push(((i, false), e.from, g.inv()));
    }
    out
}

fn check_cap(set: &ElementSet<'_>, cap: usize) -> Result<(), StableError> {
    if set.len() > cap {
        return Err(StableError::NotContracting { cap });
    }
    Ok(())
}

pub fn stable_sets(group: &AutomatonGroup) -> Result<StableSets, StableError> {
    if !validate_kneading(group).is_kneading() {
        return Err(StableError::NotKneading);
    }
    let cap = group.budget().stable_cap;
    let graph = build_kneading_graph(group);
    let steps = steps_from(&graph);

    let mut n0 = ElementSet::new(group);
    let mut n1 = ElementSet::new(group);
    let mut n1_start = Vec::new();
    let (id, _) = n0.insert(Element::identity())?;
    n1.insert(Element::identity())?;
    n1_start.push(0);

    // (start, vertex, last step, element id in n0)
    type Key = (usize, usize, Option<Step>, usize);
    let mut seen: HashSet<Key> = HashSet::new();
    let mut queue: VecDeque<Key> = VecDeque::new();
    for v in 0..graph.vertices.len() {
        let key = (v, v, None, id);
        seen.insert(key);
        queue.push_back(key);
    }
    while let Some((start, v, last, gid)) = queue.pop_front() {
        let g = n0.get(gid).clone();
        for &((edge, fwd), to, gen) in &steps[v] {
            if last == Some((edge, !fwd)) {
                continue;
            }
            let h = group.reduce(std::iter::once(gen).chain(g.letters().iter().copied()));
            let (hid, _) = n0.insert(h.clone())?;
            check_cap(&n0, cap)?;
            if to == start {
                let (_, new) = n1.insert(h)?;
                if new {
                    n1_start.push(start);
                }
            }
            let key = (start, to, Some((edge, fwd)), hid);
            if seen.insert(key) {
                queue.push_back(key);
            }
        }
    }

    let n0 = n0.into_elements();
    let mut nucleus = ElementSet::new(group);
    let mut pending: VecDeque<Element> = n0.iter().cloned().collect();
    while let Some(g) = pending.pop_front() {
        let (_, new) = nucleus.insert(g.clone())?;
        check_cap(&nucleus, cap)?;
        if new {
            for x in 0..group.degree() {
                pending.push_back(group.restrict_letter(&g, x).1);
            }
        }
    }

    Ok(StableSets { graph, n0, n1: n1.into_elements(), n1_start, nucleus: nucleus.into_elements() })
}

/// `element = conjugator^-1 · loop_label^power · conjugator`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct N1Decomposition {
    pub element: String,
    pub conjugator: String,
    pub loop_label: String,
    pub power: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct N1Report {
    pub cycles_are_loops: bool,
    pub at_most_one_loop_per_component: bool,
    pub decompositions: Vec<N1Decomposition>,
    /// Internal inconsistencies; empty whenever the theory applies.
    pub inconsistencies: Vec<String>,
}

/// Element spelled by the walk from `s` to the nearest vertex carrying a
/// loop, avoiding loops, together with that loop's edge.
fn path_to_loop(group: &AutomatonGroup, graph: &KneadingGraph, s: usize) -> Option<(Element, usize)> {
    let steps = steps_from(graph);
    let loop_at = |v: usize| graph.edges.iter().position(|e| e.is_loop() && e.from == v);
    let mut prev: Vec<Option<(usize, Generator)>> = vec![None; graph.vertices.len()];
    let mut seen = vec![false; graph.vertices.len()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        if let Some(e) = loop_at(v) {
            let mut gens = Vec::new();
            let mut u = v;
            while let Some((p, g)) = prev[u] {
                gens.push(g);
                u = p;
            }
            // gens lists the last step first, which is the leftmost letter
            return Some((group.reduce(gens), e));
        }
        for &((edge, _), to, gen) in &steps[v] {
            if !graph.edges[edge].is_loop() && !seen[to] {
                seen[to] = true;
                prev[to] = Some((v, gen));
                queue.push_back(to);
            }
        }
    }
    None
}

/// Checks the loop structure of the kneading graph and writes each
/// non-trivial element of `N1` as a conjugate of a power of a loop label.
pub fn n1_structure(group: &AutomatonGroup, sets: &StableSets) -> Result<N1Report, StableError> {
    let graph = &sets.graph;
    let cycles_are_loops = graph.cycles_are_loops();
    let at_most_one_loop_per_component = graph.two_loops_in_component().is_none();
    let mut decompositions = Vec::new();
    let mut inconsistencies = Vec::new();
    if !cycles_are_loops {
        inconsistencies.push("kneading graph has a cycle of length greater than one".to_string());
    }
    if !at_most_one_loop_per_component {
        inconsistencies.push("a component of the kneading graph carries two loops".to_string());
    }
    let max_power = sets.n0.len() as i64 + 1;
    for (g, &s) in sets.n1.iter().zip(&sets.n1_start) {
        if group.is_trivial(g)? {
            continue;
        }
        let Some((h, e)) = path_to_loop(group, graph, s) else {
            inconsistencies.push(format!("{} lies in a component without loops", group.display(g)));
            continue;
        };
        let a = group.generator(graph.edges[e].state);
        let mut found = None;
        'search: for k in 1..=max_power {
            for power in [k, -k] {
                let candidate = group.conjugate(&group.power(&a, power), &h);
                if group.equal(&candidate, g)? {
                    found = Some(power);
                    break 'search;
                }
            }
        }
        match found {
            Some(power) => decompositions.push(N1Decomposition {
                element: group.display(g),
                conjugator: group.display(&h),
                loop_label: graph.edges[e].label.clone(),
                power,
            }),
            None => inconsistencies.push(format!(
                "{} is not a conjugate of a power of {}",
                group.display(g),
                graph.edges[e].label
            )),
        }
    }
    Ok(N1Report { cycles_are_loops, at_most_one_loop_per_component, decompositions, inconsistencies })
}
