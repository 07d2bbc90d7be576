//! Kneading automata: structural conditions, kneading sequences and the
//! kneading graph.
//!
//! A kneading automaton has (1) a unique arrow into every non-trivial state,
//! (2) at most one non-trivial restriction along each cycle of each root
//! permutation and (3) a tree-like multiset of root permutations. Condition
//! (4) is tested on the kneading graph: no component may carry two loops.

mod stable;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_integer::lcm;
use serde::Serialize;

use crate::automaton::StateId;
use crate::permgeom::{is_tree_like, PermMultiset, UnionFind};
use crate::words::Word;
use crate::wreath::{AutomatonGroup, Generator};

pub use stable::{n1_structure, stable_sets, N1Decomposition, N1Report, StableError, StableSets};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A non-trivial state with `count` arrows into it (must be exactly one).
    InArrows { state: String, count: usize },
    /// A root cycle of `state` along which more than one restriction is non-trivial.
    TwoRestrictions { state: String, cycle: Vec<usize>, restricted: Vec<usize> },
    /// Root permutations whose cycle graph is not a tree.
    NotTreeLike { perms: Vec<String> },
    /// Two loops of the kneading graph in one component.
    TwoLoops { first: String, first_vertex: String, second: String, second_vertex: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl ConditionCheck {
    fn from(witness: Option<Witness>) -> Self {
        ConditionCheck { holds: witness.is_none(), witness }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KneadingReport {
    pub condition1: ConditionCheck,
    pub condition2: ConditionCheck,
    pub condition3: ConditionCheck,
    /// Absent when conditions (1) or (2) fail, since the kneading graph is
    /// then undefined.
    pub condition4: Option<ConditionCheck>,
}

impl KneadingReport {
    /// Conditions (1)–(3).
    pub fn is_kneading(&self) -> bool {
        self.condition1.holds && self.condition2.holds && self.condition3.holds
    }

    /// Conditions (1)–(4).
    pub fn all_hold(&self) -> bool {
        self.is_kneading() && self.condition4.as_ref().is_some_and(|c| c.holds)
    }
}

pub fn validate_kneading(group: &AutomatonGroup) -> KneadingReport {
    let a = group.automaton();
    let n = a.len();
    let trivial: Vec<bool> = (0..n).map(|s| group.is_trivial_state(s)).collect();

    let mut in_arrows = vec![0usize; n];
    for s in a.states() {
        for t in s.restrictions.iter().flatten() {
            in_arrows[*t] += 1;
        }
    }
    let condition1 = ConditionCheck::from(
        (0..n)
            .find(|&s| !trivial[s] && in_arrows[s] != 1)
            .map(|s| Witness::InArrows { state: a.name_of(s).to_string(), count: in_arrows[s] }),
    );

    let mut w2 = None;
    'outer: for (s, st) in a.states().iter().enumerate() {
        for cycle in st.perm.cycles() {
            let restricted: Vec<usize> =
                cycle.iter().copied().filter(|&x| st.restrictions[x].is_some_and(|t| !trivial[t])).collect();
            if restricted.len() > 1 {
                w2 = Some(Witness::TwoRestrictions { state: a.name_of(s).to_string(), cycle, restricted });
                break 'outer;
            }
        }
    }
    let condition2 = ConditionCheck::from(w2);

    let roots = PermMultiset::new(a.degree(), a.states().iter().map(|s| s.perm.clone()).collect())
        .expect("root permutations act on the alphabet");
    let condition3 = ConditionCheck::from(
        (!is_tree_like(&roots))
            .then(|| Witness::NotTreeLike { perms: roots.members().iter().map(|p| p.to_string()).collect() }),
    );

    let condition4 = (condition1.holds && condition2.holds).then(|| {
        let graph = build_kneading_graph(group);
        ConditionCheck::from(graph.two_loops_in_component().map(|(e1, e2)| {
            let (l1, l2) = (&graph.edges[e1], &graph.edges[e2]);
            Witness::TwoLoops {
                first: l1.label.clone(),
                first_vertex: graph.render_vertex(l1.from),
                second: l2.label.clone(),
                second_vertex: graph.render_vertex(l2.from),
            }
        }))
    });

    KneadingReport { condition1, condition2, condition3, condition4 }
}

/// Purely periodic kneading sequence of a cycle state or its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KneadingSequence {
    pub generator: Generator,
    pub label: String,
    /// One minimal period.
    pub period_word: Word,
}

impl KneadingSequence {
    pub fn period(&self) -> usize {
        self.period_word.len()
    }

    pub fn prefix(&self, n: usize) -> Word {
        self.period_word.periodic_prefix(n)
    }
}

fn minimal_period(w: &[usize]) -> usize {
    (1..=w.len()).find(|&p| w.len().is_multiple_of(p) && (p..w.len()).all(|i| w[i] == w[i - p])).unwrap_or(w.len())
}

fn label(group: &AutomatonGroup, g: Generator) -> String {
    let name = group.automaton().name_of(g.state as usize);
    if g.inverse {
        format!("{name}^-1")
    } else {
        name.to_string()
    }
}

/// Kneading sequences of every state on a simple cycle of the reduced Moore
/// diagram, each followed by that of its inverse. States on no cycle are
/// absent.
pub fn kneading_sequences(group: &AutomatonGroup) -> Vec<KneadingSequence> {
    let mut out: Vec<(StateId, KneadingSequence, KneadingSequence)> = Vec::new();
    for (states, letters) in group.automaton().reduced_cycles() {
        let k = letters.len();
        for (i, &s) in states.iter().enumerate() {
            let word: Vec<usize> = (0..k).map(|j| letters[(i + j) % k]).collect();
            let g = Generator::new(s, false);
            let image =
                group.act(&group.generator(s), &Word::new(word.clone())).expect("cycle letters are in the alphabet");
            let p = minimal_period(&word);
            let q = minimal_period(image.letters());
            let fwd =
                KneadingSequence { generator: g, label: label(group, g), period_word: Word::new(word[..p].to_vec()) };
            let inv =
                KneadingSequence { generator: g.inv(), label: label(group, g.inv()), period_word: image.prefix(q) };
            out.push((s, fwd, inv));
        }
    }
    out.sort_by_key(|(s, _, _)| *s);
    out.into_iter().flat_map(|(_, a, b)| [a, b]).collect()
}

/// Edge `ks(a) → a(ks(a))` for a cycle state `a`. Traversing it backwards
/// reads `a^-1`, and doubles as the edge of `a^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KneadingEdge {
    pub state: StateId,
    pub label: String,
    pub from: usize,
    pub to: usize,
}

impl KneadingEdge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KneadingGraph {
    pub m: usize,
    pub d: usize,
    /// Length-`m` kneading sequences in lexicographic order.
    pub vertices: Vec<Word>,
    pub edges: Vec<KneadingEdge>,
}

pub fn build_kneading_graph(group: &AutomatonGroup) -> KneadingGraph {
    let seqs = kneading_sequences(group);
    let d = group.degree();
    let m = seqs.iter().map(KneadingSequence::period).fold(1, lcm);
    if seqs.is_empty() {
        return KneadingGraph { m: 0, d, vertices: Vec::new(), edges: Vec::new() };
    }
    let vertices: Vec<Word> = seqs.iter().map(|s| s.prefix(m)).collect::<BTreeSet<_>>().into_iter().collect();
    let index = |w: &Word| vertices.binary_search(w).expect("vertex present");
    let mut edges = Vec::new();
    for s in seqs.iter().filter(|s| !s.generator.inverse) {
        let state = s.generator.state as usize;
        let from = s.prefix(m);
        let to = group.act(&group.generator(state), &from).expect("valid word");
        edges.push(KneadingEdge { state, label: s.label.clone(), from: index(&from), to: index(&to) });
    }
    KneadingGraph { m, d, vertices, edges }
}

impl KneadingGraph {
    pub fn render_vertex(&self, v: usize) -> String {
        self.vertices[v].render(crate::words::Alphabet::new(self.d).expect("d >= 2"))
    }

    /// Every edge in both orientations: `(label, from, to)`, with `a^-1`
    /// running from `a(ks(a))` back to `ks(a)`.
    pub fn labeled_edges(&self) -> Vec<(String, usize, usize)> {
        self.edges
            .iter()
            .flat_map(|e| [(e.label.clone(), e.from, e.to), (format!("{}^-1", e.label), e.to, e.from)])
            .collect()
    }

    fn component_of(&self) -> (UnionFind, Vec<usize>) {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.from, e.to);
        }
        let comp = (0..self.vertices.len()).map(|v| uf.find(v)).collect();
        (uf, comp)
    }

    pub fn components(&self) -> usize {
        self.component_of().0.count()
    }

    /// All cycles are loops: the non-loop edges, taken undirected, form a
    /// forest (parallel edges count as a cycle of length two).
    pub fn cycles_are_loops(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        self.edges.iter().filter(|e| !e.is_loop()).all(|e| uf.union(e.from, e.to))
    }

    /// Two loops (edge indices) lying in the same component, if any.
    pub fn two_loops_in_component(&self) -> Option<(usize, usize)> {
        let (_, comp) = self.component_of();
        let loops: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].is_loop()).collect();
        for (k, &i) in loops.iter().enumerate() {
            for &j in &loops[k + 1..] {
                if comp[self.edges[i].from] == comp[self.edges[j].from] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Graphviz rendering with one arrow per state; the inverse label runs
    /// along the same arrow backwards.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph kneading {\n");
        for v in 0..self.vertices.len() {
            let _ = writeln!(s, "  v{v} [label=\"{}\"];", self.render_vertex(v));
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.from, e.to, e.label);
        }
        s.push_str("}\n");
        s
    }
}
