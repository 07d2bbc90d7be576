//! Finite invertible automata (Moore diagrams) and their structural analysis.
//!
//! A state is a root permutation together with one restriction per letter.
//! Restrictions either name a declared state or the implicit identity `1`,
//! which is never stored as a row.

mod dsl;

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::perm::Perm;
use crate::words::Alphabet;

pub use dsl::{ParseError, ParseErrorKind};

pub type StateId = usize;

/// The name under which the identity state is always available.
pub const IDENTITY_NAME: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("state {state:?}: {detail}")]
    AlphabetMismatch { state: String, detail: String },
    #[error("state {state:?} restricts to undeclared state index {target}")]
    UnknownTarget { state: String, target: usize },
    #[error("state name {0:?} is reserved or malformed")]
    BadName(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub perm: Perm,
    /// `None` is the identity.
    pub restrictions: Vec<Option<StateId>>,
}

/// A validated finite invertible automaton over `0..d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonSpec {
    alphabet: Alphabet,
    states: Vec<State>,
    by_name: HashMap<String, StateId>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl AutomatonSpec {
    pub fn new(alphabet: Alphabet, states: Vec<State>) -> Result<Self, AutomatonError> {
        let d = alphabet.size();
        let mut by_name = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if !valid_name(&s.name) {
                return Err(AutomatonError::BadName(s.name.clone()));
            }
            if by_name.insert(s.name.clone(), i).is_some() {
                return Err(AutomatonError::DuplicateState(s.name.clone()));
            }
        }
        for s in &states {
            if s.perm.degree() != d {
                return Err(AutomatonError::AlphabetMismatch {
                    state: s.name.clone(),
                    detail: format!("permutation acts on {} points", s.perm.degree()),
                });
            }
            if s.restrictions.len() != d {
                return Err(AutomatonError::AlphabetMismatch {
                    state: s.name.clone(),
                    detail: format!("{} restrictions for {} letters", s.restrictions.len(), d),
                });
            }
            if let Some(&Some(t)) = s.restrictions.iter().find(|r| matches!(r, Some(t) if *t >= states.len())) {
                return Err(AutomatonError::UnknownTarget { state: s.name.clone(), target: t });
            }
        }
        Ok(AutomatonSpec { alphabet, states, by_name })
    }

    /// Parses the line-based automaton DSL.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        dsl::parse(text)
    }

    /// Serializes back to the DSL; `parse(to_dsl())` reproduces `self`.
    pub fn to_dsl(&self) -> String {
        let mut out = format!("alphabet = {}\n", self.alphabet.size());
        for s in &self.states {
            let restr: Vec<&str> = s.restrictions.iter().map(|r| self.target_name(*r)).collect();
            let _ = writeln!(out, "{} : {} [{}]", s.name, s.perm, restr.join(", "));
        }
        out
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.alphabet.size()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id]
    }

    pub fn id_of(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    pub fn name_of(&self, id: StateId) -> &str {
        &self.states[id].name
    }

    pub fn target_name(&self, t: Option<StateId>) -> &str {
        t.map_or(IDENTITY_NAME, |i| self.states[i].name.as_str())
    }

    /// States that act trivially on the whole tree: the largest set of states
    /// with identity root action whose restrictions stay in the set.
    pub fn trivial_states(&self) -> Vec<bool> {
        let mut trivial: Vec<bool> = self.states.iter().map(|s| s.perm.is_identity()).collect();
        loop {
            let mut changed = false;
            for (i, s) in self.states.iter().enumerate() {
                if trivial[i] && s.restrictions.iter().any(|r| matches!(r, Some(t) if !trivial[*t])) {
                    trivial[i] = false;
                    changed = true;
                }
            }
            if !changed {
                return trivial;
            }
        }
    }

    /// Edges of the reduced Moore diagram: `(from, letter, to)` between
    /// non-trivial states, in declaration and letter order.
    pub fn reduced_edges(&self) -> Vec<(StateId, usize, StateId)> {
        let trivial = self.trivial_states();
        let mut edges = Vec::new();
        for (a, s) in self.states.iter().enumerate() {
            if trivial[a] {
                continue;
            }
            for (x, r) in s.restrictions.iter().enumerate() {
                if let Some(b) = *r {
                    if !trivial[b] {
                        edges.push((a, x, b));
                    }
                }
            }
        }
        edges
    }

    fn reduced_successors(&self) -> Vec<Vec<StateId>> {
        let mut succ = vec![Vec::new(); self.states.len()];
        for (a, _, b) in self.reduced_edges() {
            succ[a].push(b);
        }
        succ
    }

    fn reachability(&self) -> Vec<Vec<bool>> {
        let succ = self.reduced_successors();
        let n = self.states.len();
        (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                let mut queue: VecDeque<StateId> = succ[s].iter().copied().collect();
                while let Some(u) = queue.pop_front() {
                    if !std::mem::replace(&mut seen[u], true) {
                        queue.extend(succ[u].iter().copied());
                    }
                }
                seen
            })
            .collect()
    }

    /// Strongly connected components of the reduced Moore diagram that contain
    /// a cycle, each listed in declaration order of its states.
    pub fn cyclic_components(&self) -> Vec<Vec<StateId>> {
        let reach = self.reachability();
        let trivial = self.trivial_states();
        let n = self.states.len();
        let mut assigned = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if trivial[s] || assigned[s] || !reach[s][s] {
                continue;
            }
            let comp: Vec<StateId> = (0..n).filter(|&t| reach[s][t] && reach[t][s]).collect();
            for &t in &comp {
                assigned[t] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Simple cycles of the reduced Moore diagram, each starting at its first
    /// declared state and following the arrows: `(states, letters)` where
    /// `states[i]|letters[i] = states[i+1]`. Components that are not simple
    /// cycles are skipped.
    pub fn reduced_cycles(&self) -> Vec<(Vec<StateId>, Vec<usize>)> {
        let mut out = Vec::new();
        'comp: for comp in self.cyclic_components() {
            let in_comp = |t: StateId| comp.contains(&t);
            let mut states = vec![comp[0]];
            let mut letters = Vec::new();
            let mut cur = comp[0];
            loop {
                let next: Vec<(usize, StateId)> = self.states[cur]
                    .restrictions
                    .iter()
                    .enumerate()
                    .filter_map(|(x, r)| r.filter(|&t| in_comp(t)).map(|t| (x, t)))
                    .collect();
                if next.len() != 1 {
                    continue 'comp;
                }
                let (x, t) = next[0];
                letters.push(x);
                if t == comp[0] {
                    break;
                }
                if states.contains(&t) {
                    continue 'comp;
                }
                states.push(t);
                cur = t;
            }
            if states.len() == comp.len() {
                out.push((states, letters));
            }
        }
        out
    }

    /// The automaton of inverses: state `a^-1` acts by the inverse root
    /// permutation and `a^-1|x = (a|a^-1(x))^-1`.
    pub fn inverse_automaton(&self) -> AutomatonSpec {
        let states = self
            .states
            .iter()
            .map(|s| {
                let inv = s.perm.inverse();
                let restrictions = (0..self.degree()).map(|x| s.restrictions[inv.apply(x)]).collect();
                State { name: inverse_name(&s.name), perm: inv, restrictions }
            })
            .collect();
        AutomatonSpec::new(self.alphabet, states).expect("inverse of a valid automaton is valid")
    }

    /// Finite-state / bounded / finitary classification of every state.
    pub fn classify_states(&self, depth: usize) -> StateClassification {
        let trivial = self.trivial_states();
        let reach = self.reachability();
        let comps = self.cyclic_components();
        let n = self.states.len();
        let mut comp_of = vec![None; n];
        for (ci, c) in comps.iter().enumerate() {
            for &s in c {
                comp_of[s] = Some(ci);
            }
        }
        let simple: Vec<bool> = comps
            .iter()
            .map(|c| {
                c.iter().all(|&u| {
                    self.states[u].restrictions.iter().filter(|r| matches!(r, Some(t) if c.contains(t))).count() == 1
                })
            })
            .collect();
        // component ci reaches component cj (ci != cj)
        let comp_reaches = |ci: usize, cj: usize| reach[comps[ci][0]][comps[cj][0]];

        let q = self.q_profiles(depth, &trivial);
        let states = (0..n)
            .map(|s| {
                let reachable: Vec<usize> =
                    (0..comps.len()).filter(|&ci| comp_of[s] == Some(ci) || reach[s][comps[ci][0]]).collect();
                let finitary = trivial[s] || reachable.is_empty();
                let bounded = finitary
                    || (reachable.iter().all(|&ci| simple[ci])
                        && reachable.iter().all(|&ci| reachable.iter().all(|&cj| ci == cj || !comp_reaches(ci, cj))));
                StateClass {
                    name: self.states[s].name.clone(),
                    finite_state: true,
                    bounded,
                    finitary,
                    q_profile: q[s].clone(),
                }
            })
            .collect();
        StateClassification { depth, states }
    }

    /// `q_n(s) = #{v in X^n : s|v != 1}` for `n = 1..=depth`, saturating.
    fn q_profiles(&self, depth: usize, trivial: &[bool]) -> Vec<Vec<u128>> {
        let n = self.states.len();
        let mut cur: Vec<u128> = (0..n).map(|s| u128::from(!trivial[s])).collect();
        let mut out = vec![Vec::with_capacity(depth); n];
        for _ in 0..depth {
            let next: Vec<u128> = (0..n)
                .map(|s| {
                    self.states[s]
                        .restrictions
                        .iter()
                        .map(|r| r.map_or(0, |t| cur[t]))
                        .fold(0u128, u128::saturating_add)
                })
                .collect();
            for s in 0..n {
                out[s].push(next[s]);
            }
            cur = next;
        }
        out
    }

    /// Graphviz rendering of the Moore diagram. With `reduced`, the identity
    /// vertex and the arrows into it are left out.
    pub fn export_dot(&self, reduced: bool) -> String {
        let mut out = String::from("digraph moore {\n");
        for s in &self.states {
            let _ = writeln!(out, "  \"{}\";", s.name);
        }
        if !reduced {
            let _ = writeln!(out, "  \"{IDENTITY_NAME}\";");
        }
        for s in &self.states {
            for (x, r) in s.restrictions.iter().enumerate() {
                if reduced && r.is_none() {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"({},{})\"];",
                    s.name,
                    self.target_name(*r),
                    x,
                    s.perm.apply(x)
                );
            }
        }
        if !reduced {
            for x in 0..self.degree() {
                let _ = writeln!(out, "  \"{IDENTITY_NAME}\" -> \"{IDENTITY_NAME}\" [label=\"({x},{x})\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn inverse_name(name: &str) -> String {
    match name.strip_suffix("_inv") {
        Some(base) if !base.is_empty() => base.to_string(),
        _ => format!("{name}_inv"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateClass {
    pub name: String,
    pub finite_state: bool,
    pub bounded: bool,
    pub finitary: bool,
    pub q_profile: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateClassification {
    pub depth: usize,
    pub states: Vec<StateClass>,
}

impl StateClassification {
    pub fn get(&self, name: &str) -> Option<&StateClass> {
        self.states.iter().find(|s| s.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASILICA: &str = "alphabet = 2\na : (0 1) [1, b]\nb : () [1, a]";
    const CHEBYSHEV: &str = "alphabet = 2\na : () [a, b]\nb : (0 1) [1, 1]";

    fn aut(s: &str) -> AutomatonSpec {
        AutomatonSpec::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let b = aut(BASILICA);
        assert_eq!(b.len(), 2);
        assert_eq!(b.state(0).restrictions, vec![None, Some(1)]);
        let c = aut(CHEBYSHEV);
        assert_eq!(c.state(0).restrictions, vec![Some(0), Some(1)]);
        assert!(c.state(1).perm.apply(0) == 1);
        assert_eq!(AutomatonSpec::parse(&c.to_dsl()).unwrap(), c);
    }

    #[test]
    fn inverse_automaton_basilica() {
        let inv = aut(BASILICA).inverse_automaton();
        let a_inv = inv.state(inv.id_of("a_inv").unwrap());
        assert_eq!(a_inv.perm.images(), &[1, 0]);
        // a^-1 = sigma(b^-1, 1)
        assert_eq!(inv.target_name(a_inv.restrictions[0]), "b_inv");
        assert_eq!(a_inv.restrictions[1], None);
        assert_eq!(inv.inverse_automaton(), aut(BASILICA));
    }

    #[test]
    fn inverse_of_involution_and_identity() {
        let c = aut(CHEBYSHEV).inverse_automaton();
        let b = c.state(c.id_of("b_inv").unwrap());
        assert_eq!(b.perm.images(), &[1, 0]);
        assert_eq!(b.restrictions, vec![None, None]);
        let id = aut("alphabet = 3");
        assert!(id.inverse_automaton().is_empty());
    }

    #[test]
    fn classification() {
        let c = aut(CHEBYSHEV).classify_states(8);
        let b = c.get("b").unwrap();
        assert!(b.finitary && b.bounded);
        assert_eq!(b.q_profile[0], 0);
        let a = c.get("a").unwrap();
        assert!(a.bounded && !a.finitary);

        let bas = aut(BASILICA).classify_states(8);
        for s in &bas.states {
            assert!(s.bounded && !s.finitary, "{s:?}");
            assert!(s.q_profile.iter().all(|&q| q == 1));
        }

        let wild = aut("alphabet = 2\na : (0 1) [a, a]").classify_states(8);
        let a = wild.get("a").unwrap();
        assert!(!a.bounded && !a.finitary);
        assert_eq!(a.q_profile, (1..=8).map(|n| 1u128 << n).collect::<Vec<_>>());
    }

    #[test]
    fn trivial_states_detected() {
        // a = (a, 1) is the identity
        let t = aut("alphabet = 2\na : () [a, 1]\nb : (0 1) [a, 1]");
        assert_eq!(t.trivial_states(), vec![true, false]);
        assert!(t.reduced_edges().is_empty());
    }

    #[test]
    fn dot_export() {
        let full = aut(BASILICA).export_dot(false);
        assert_eq!(full.matches(" -> ").count(), 6);
        assert_eq!(full.lines().filter(|l| l.trim_end().ends_with("\";")).count(), 3);
        let empty = aut("alphabet = 2").export_dot(true);
        assert_eq!(empty, "digraph moore {\n}\n");
        let cheb = aut(CHEBYSHEV).export_dot(true);
        let edges: Vec<&str> = cheb.lines().filter(|l| l.contains("->")).collect();
        assert_eq!(edges, vec!["  \"a\" -> \"a\" [label=\"(0,0)\"];", "  \"a\" -> \"b\" [label=\"(1,1)\"];"]);
    }

    #[test]
    fn reduced_cycles_follow_arrows() {
        let b = aut(BASILICA);
        assert_eq!(b.reduced_cycles(), vec![(vec![0, 1], vec![1, 1])]);
        let c = aut(CHEBYSHEV);
        assert_eq!(c.reduced_cycles(), vec![(vec![0], vec![0])]);
    }
}
