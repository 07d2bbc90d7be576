//! Recognizing the automata of exceptional polynomials.
//!
//! Only cycles of the reduced Moore diagram containing a state that fixes a
//! finite, non-empty set of ends matter. The shapes are checked through
//! conjugation-invariant data (fixed letters, where the restrictions sit,
//! cycle types), so they match up to relabeling the alphabet.

use std::fmt;

use serde::Serialize;

use crate::automaton::StateId;
use crate::wreath::{AutomatonGroup, FixedEnds, WreathError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExceptionalShape {
    NotExceptionalShape,
    /// `c = σ(c, a, 1, …, 1)`, `a = τ(1, …, 1)`: conjugate to `T_d`, `d` even.
    ChebyshevEven,
    /// Conjugate to `±T_d`, `d` odd: either `a = σ(b, 1, …)`, `b = τ(…, 1, a)`
    /// on a two-cycle, or two one-cycles `a = σ(a, 1, …)`, `b = τ(…, 1, b)`.
    ChebyshevOdd,
    /// A one-cycle `c` fixing a single letter `x` with `c|x = c`.
    SinglePoint,
}

impl fmt::Display for ExceptionalShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExceptionalShape::NotExceptionalShape => "not-exceptional-shape",
            ExceptionalShape::ChebyshevEven => "chebyshev-even",
            ExceptionalShape::ChebyshevOdd => "chebyshev-odd",
            ExceptionalShape::SinglePoint => "single-point",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalReport {
    pub verdict: ExceptionalShape,
    /// States corresponding to the points of `Σ`, when found.
    pub witness: Vec<String>,
}

/// Shape of a state's wreath recursion, read off the automaton.
struct Recursion {
    fixed: Vec<usize>,
    involution: bool,
    /// Letters carrying a non-trivial restriction, with its target.
    restricted: Vec<(usize, StateId)>,
}

fn recursion(group: &AutomatonGroup, s: StateId) -> Recursion {
    let st = group.automaton().state(s);
    let restricted = st
        .restrictions
        .iter()
        .enumerate()
        .filter_map(|(x, t)| t.filter(|&t| !group.is_trivial_state(t)).map(|t| (x, t)))
        .collect();
    Recursion { fixed: st.perm.fixed_points(), involution: st.perm.is_involution(), restricted }
}

/// `a = σ(b, 1, …, 1)` with `σ` an involution fixing only the letter
/// carrying the restriction.
fn one_fixed_restricted_to(r: &Recursion, target: StateId) -> Option<usize> {
    (r.involution && r.fixed.len() == 1 && r.restricted == [(r.fixed[0], target)]).then_some(r.fixed[0])
}

fn two_cycle(group: &AutomatonGroup, nontrivial: &[StateId], a: StateId, b: StateId) -> bool {
    if nontrivial.len() != 2 {
        return false;
    }
    let (ra, rb) = (recursion(group, a), recursion(group, b));
    matches!(
        (one_fixed_restricted_to(&ra, b), one_fixed_restricted_to(&rb, a)),
        (Some(x), Some(y)) if x != y
    )
}

fn two_one_cycles(group: &AutomatonGroup, nontrivial: &[StateId], c: StateId) -> Option<StateId> {
    let [s, t] = nontrivial[..] else {
        return None;
    };
    let other = if s == c { t } else { s };
    let x = one_fixed_restricted_to(&recursion(group, c), c)?;
    let y = one_fixed_restricted_to(&recursion(group, other), other)?;
    (x != y).then_some(other)
}

fn even_shape(group: &AutomatonGroup, nontrivial: &[StateId], c: StateId) -> Option<StateId> {
    if nontrivial.len() != 2 {
        return None;
    }
    let rc = recursion(group, c);
    if !rc.involution || rc.fixed.len() != 2 || rc.restricted.len() != 2 {
        return None;
    }
    let self_at = rc.restricted.iter().find(|&&(_, t)| t == c)?.0;
    let &(other_at, a) = rc.restricted.iter().find(|&&(_, t)| t != c)?;
    if !rc.fixed.contains(&self_at) || !rc.fixed.contains(&other_at) {
        return None;
    }
    let ra = recursion(group, a);
    (ra.involution && ra.fixed.is_empty() && ra.restricted.is_empty()).then_some(a)
}

/// Classifies an automaton satisfying conditions (1)–(4) against the
/// exceptional shapes, in the order: Chebyshev odd, Chebyshev even, single
/// point.
pub fn detect_exceptional_shape(group: &AutomatonGroup) -> Result<ExceptionalReport, WreathError> {
    let a = group.automaton();
    let nontrivial = group.nontrivial_states();
    let mut candidates = Vec::new();
    for (states, _) in a.reduced_cycles() {
        let mut finite = false;
        for &s in &states {
            if matches!(group.classify_fixed_ends(&group.generator(s))?, FixedEnds::Finite(k) if k >= 1) {
                finite = true;
            }
        }
        if finite {
            candidates.push(states);
        }
    }
    let name = |s: StateId| a.name_of(s).to_string();
    let report = |verdict, witness: Vec<StateId>| ExceptionalReport {
        verdict,
        witness: witness.into_iter().map(name).collect(),
    };

    for c in &candidates {
        if let [x, y] = c[..] {
            if two_cycle(group, &nontrivial, x, y) {
                return Ok(report(ExceptionalShape::ChebyshevOdd, vec![x, y]));
            }
        }
        if let [x] = c[..] {
            if let Some(y) = two_one_cycles(group, &nontrivial, x) {
                return Ok(report(ExceptionalShape::ChebyshevOdd, vec![x.min(y), x.max(y)]));
            }
        }
    }
    for c in &candidates {
        if let [x] = c[..] {
            if let Some(y) = even_shape(group, &nontrivial, x) {
                return Ok(report(ExceptionalShape::ChebyshevEven, vec![x, y]));
            }
        }
    }
    for c in &candidates {
        if let [x] = c[..] {
            let r = recursion(group, x);
            if r.fixed.len() == 1 && r.restricted.contains(&(r.fixed[0], x)) {
                return Ok(report(ExceptionalShape::SinglePoint, vec![x]));
            }
        }
    }
    Ok(ExceptionalReport { verdict: ExceptionalShape::NotExceptionalShape, witness: Vec::new() })
}
