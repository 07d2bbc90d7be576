//! Theorem-gated verdicts on the limit `ℱ(G)` for kneading automata.
//!
//! A limit is only ever reported together with the structural fact that
//! proves it. Finite `F_n` data never yields a verdict.

use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::fixstat::{dihedral_f_exact, FixstatError};
use crate::imgbuild::{detect_exceptional_shape, ExceptionalShape};
use crate::kneading::validate_kneading;
use crate::wreath::{AutomatonGroup, FixedEnds};

/// Cited for the Chebyshev shapes.
pub const CITATION_DIHEDRAL: &str = "infinite dihedral group generated by two involutions with \
     spherically transitive product: ℱ = r/4, r = number of generators fixing an end";
/// Cited when every cycle state fixes no end or infinitely many.
pub const CITATION_NON_EXCEPTIONAL: &str = "iterated monodromy group of a non-exceptional polynomial: \
     every cycle state fixes no end or infinitely many ends, hence ℱ = 0";
/// Cited for the single-point exceptional shape.
pub const CITATION_OPEN: &str = "open case: exceptional polynomial with a single totally invariant point";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    /// `ℱ` is known exactly.
    Limit,
    /// The shape is recognized but `ℱ` is not known.
    Unknown,
    /// No theorem applies.
    NoVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    #[serde(serialize_with = "ratio_str", skip_serializing_if = "Option::is_none")]
    pub value: Option<Ratio<u64>>,
    pub shape: ExceptionalShape,
    /// The structural fact the verdict rests on; `None` only without a verdict.
    pub citation: Option<String>,
    /// Why no theorem applied, when none did.
    pub reason: Option<String>,
}

fn ratio_str<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl Verdict {
    fn limit(value: Ratio<u64>, shape: ExceptionalShape, citation: &str) -> Self {
        Verdict { kind: VerdictKind::Limit, value: Some(value), shape, citation: Some(citation.into()), reason: None }
    }

    fn none(shape: ExceptionalShape, reason: String) -> Self {
        Verdict { kind: VerdictKind::NoVerdict, value: None, shape, citation: None, reason: Some(reason) }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, &self.value, &self.citation) {
            (VerdictKind::Limit, Some(v), Some(c)) => write!(f, "ℱ = {v} [{c}]"),
            (VerdictKind::Unknown, _, Some(c)) => write!(f, "ℱ unknown [{c}]"),
            _ => write!(f, "no verdict ({})", self.reason.as_deref().unwrap_or("no theorem applies")),
        }
    }
}

/// Applies, in order: exceptional-shape detection, the zero-or-infinite test
/// on cycle states, and otherwise gives no verdict. `depth` bounds the
/// transitivity check behind the dihedral value.
pub fn report_verdict(group: &AutomatonGroup, depth: usize) -> Result<Verdict, FixstatError> {
    let kneading = validate_kneading(group);
    if !kneading.all_hold() {
        return Ok(Verdict::none(
            ExceptionalShape::NotExceptionalShape,
            "not a kneading automaton satisfying conditions (1)-(4)".into(),
        ));
    }
    let shape = detect_exceptional_shape(group)?.verdict;
    match shape {
        ExceptionalShape::ChebyshevEven | ExceptionalShape::ChebyshevOdd => {
            return match dihedral_f_exact(group, depth) {
                Ok(d) => Ok(Verdict::limit(d.f, shape, CITATION_DIHEDRAL)),
                Err(FixstatError::Shape(why)) => Ok(Verdict::none(shape, why)),
                Err(e) => Err(e),
            };
        }
        ExceptionalShape::SinglePoint => {
            return Ok(Verdict {
                kind: VerdictKind::Unknown,
                value: None,
                shape,
                citation: Some(CITATION_OPEN.into()),
                reason: None,
            });
        }
        ExceptionalShape::NotExceptionalShape => {}
    }
    for comp in group.automaton().cyclic_components() {
        for s in comp {
            if let FixedEnds::Finite(k) = group.classify_fixed_ends(&group.generator(s))? {
                let name = group.automaton().name_of(s);
                return Ok(Verdict::none(shape, format!("cycle state {name} fixes exactly {k} ends")));
            }
        }
    }
    Ok(Verdict::limit(Ratio::from_integer(0), shape, CITATION_NON_EXCEPTIONAL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonSpec;

    fn verdict(text: &str) -> Verdict {
        report_verdict(&AutomatonGroup::new(AutomatonSpec::parse(text).unwrap()), 12).unwrap()
    }

    #[test]
    fn examples() {
        let cheb = verdict("alphabet = 2\na : () [a, b]\nb : (0 1) [1, 1]\n");
        assert_eq!(cheb.value, Some(Ratio::new(1, 4)));
        assert!(cheb.to_string().starts_with("ℱ = 1/4 ["));

        let basilica = verdict("alphabet = 2\na : (0 1) [1, b]\nb : () [1, a]\n");
        assert_eq!(basilica.kind, VerdictKind::Limit);
        assert_eq!(basilica.value, Some(Ratio::from_integer(0)));
        assert_eq!(basilica.citation.as_deref(), Some(CITATION_NON_EXCEPTIONAL));

        let minus_t3 = verdict("alphabet = 3\na : (1 2) [b, 1, 1]\nb : (0 1) [1, 1, a]\n");
        assert_eq!(minus_t3.value, Some(Ratio::new(1, 2)));
        assert_eq!(minus_t3.shape, ExceptionalShape::ChebyshevOdd);
    }

    #[test]
    fn unknown_and_refusals() {
        let single = verdict("alphabet = 3\na : (1 2) [a, 1, 1]\nb : (0 1) [1, 1, 1]\nc : () [b, c, 1]\n");
        assert_eq!(single.kind, VerdictKind::Unknown);
        assert!(single.to_string().starts_with("ℱ unknown [open case"));

        // two self-loops at one kneading vertex: condition (4) fails
        let bad = verdict("alphabet = 3\na : (1 2) [a, 1, 1]\nb : (0 1) [1, 1, 1]\nc : () [c, b, 1]\n");
        assert_eq!(bad.kind, VerdictKind::NoVerdict);
        assert!(bad.citation.is_none());
        assert!(bad.to_string().starts_with("no verdict ("));
    }

    #[test]
    fn every_value_carries_a_citation() {
        for text in [
            "alphabet = 2\nc : (0 1) [c, 1]\n",
            "alphabet = 2\na : () [a, b]\nb : (0 1) [1, 1]\n",
            "alphabet = 3\na : (1 2) [a, 1, 1]\nb : (0 1) [1, 1, b]\n",
        ] {
            let v = verdict(text);
            assert!(v.value.is_none() || v.citation.is_some(), "{v:?}");
            assert_eq!(v.kind == VerdictKind::NoVerdict, v.citation.is_none());
        }
    }
}
