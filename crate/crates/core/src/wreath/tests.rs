use super::*;
use crate::words::{index_word, word_index, Alphabet};
use proptest::prelude::*;

const CHEB: &str = "alphabet = 2\na : () [a, b]\nb : (0 1) [1, 1]\n";
const BASILICA: &str = "alphabet = 2\na : (0 1) [1, b]\nb : () [1, a]\n";
const ODOMETER: &str = "alphabet = 2\nc : (0 1) [c, 1]\n";
const TRICHEB: &str = "alphabet = 3\na : (1 2) [a, 1, 1]\nb : (0 1) [1, 1, b]\n";

fn group(text: &str) -> AutomatonGroup {
    AutomatonGroup::new(AutomatonSpec::parse(text).unwrap())
}

fn w(letters: &[usize]) -> Word {
    Word::new(letters.to_vec())
}

fn all_words(d: usize, n: usize) -> Vec<Word> {
    let a = Alphabet::new(d).unwrap();
    (0..a.level_size(n).unwrap()).map(|i| index_word(i, n, a).unwrap()).collect()
}

/// Level action computed letter by letter through `act`.
fn brute_level(g: &AutomatonGroup, e: &Element, n: usize) -> Vec<u32> {
    let a = g.automaton().alphabet();
    all_words(a.size(), n).iter().map(|v| word_index(&g.act(e, v).unwrap(), a).unwrap() as u32).collect()
}

#[test]
fn act_examples() {
    let c = group(CHEB);
    let ab = c.parse_expr("a*b").unwrap();
    assert_eq!(c.act(&ab, &w(&[0])).unwrap(), w(&[1]));
    assert_eq!(c.act(&ab, &Word::empty()).unwrap(), Word::empty());
    let b = group(BASILICA);
    let a = b.parse_expr("a").unwrap();
    assert_eq!(b.act(&a, &w(&[1, 0])).unwrap(), w(&[0, 0]));
    assert!(b.act(&a, &w(&[2])).is_err());
}

#[test]
fn restrict_examples() {
    let c = group(CHEB);
    let a = c.parse_expr("a").unwrap();
    assert_eq!(c.restrict(&a, &w(&[0])).unwrap(), a);
    assert_eq!(c.restrict(&a, &w(&[1])).unwrap(), c.parse_expr("b").unwrap());
    assert_eq!(c.restrict(&Element::identity(), &w(&[1, 0, 1])).unwrap(), Element::identity());
    let b = group(BASILICA);
    let a2 = b.parse_expr("a^2").unwrap();
    let a = b.parse_expr("a").unwrap();
    assert_eq!(b.restrict(&a2, &w(&[0, 1])).unwrap(), a);
    let expect = [Element::identity(), a.clone(), Element::identity(), a];
    for (v, e) in all_words(2, 2).iter().zip(expect.iter()) {
        assert!(b.equal(&b.restrict(&a2, v).unwrap(), e).unwrap());
    }
}

#[test]
fn multiply_examples() {
    let c = group(CHEB);
    let ab = c.parse_expr("a*b").unwrap();
    let (root, children) = c.wreath_recursion(&ab);
    assert_eq!(root.images(), &[1, 0]);
    assert_eq!(children, vec![c.parse_expr("b").unwrap(), c.parse_expr("a").unwrap()]);
    // the other order swaps the restrictions
    let (_, children) = c.wreath_recursion(&c.parse_expr("b*a").unwrap());
    assert_eq!(children, vec![c.parse_expr("a").unwrap(), c.parse_expr("b").unwrap()]);

    let b = group(BASILICA);
    let (root, children) = b.wreath_recursion(&b.parse_expr("a*a").unwrap());
    assert!(root.is_identity());
    assert_eq!(children, vec![b.parse_expr("b").unwrap(), b.parse_expr("b").unwrap()]);
}

#[test]
fn triviality_examples() {
    let c = group(CHEB);
    assert!(c.is_trivial(&c.parse_expr("a*a").unwrap()).unwrap());
    assert!(c.is_trivial(&c.parse_expr("b*b").unwrap()).unwrap());
    assert!(!c.is_trivial(&c.parse_expr("a*b").unwrap()).unwrap());
    let b = group(BASILICA);
    for k in 1..=8 {
        assert!(!b.is_trivial(&b.power(&b.parse_expr("a").unwrap(), k)).unwrap(), "a^{k}");
    }
}

#[test]
fn triviality_budget_is_explicit() {
    let spec = AutomatonSpec::parse(BASILICA).unwrap();
    let budget = Budget { max_restrictions: 2, ..Budget::default() };
    let g = AutomatonGroup::with_budget(spec, budget);
    let e = g.parse_expr("a^5*b^-3*a").unwrap();
    let err = g.is_trivial(&e).unwrap_err();
    assert!(err.is_budget());
}

#[test]
fn level_permutation_examples() {
    let c = group(CHEB);
    let id = c.level_permutation(&Element::identity(), 3).unwrap();
    assert_eq!(id.images(), &[0, 1, 2, 3, 4, 5, 6, 7]);
    let ab = c.level_permutation(&c.parse_expr("a*b").unwrap(), 2).unwrap();
    assert_eq!(ab.fixed_count(), 0);
    assert_eq!(ab.orbit_count(), 1);
    let b = group(BASILICA);
    let a = b.level_permutation(&b.parse_expr("a").unwrap(), 2).unwrap();
    assert_eq!(a.images(), &[2, 3, 0, 1]);
}

#[test]
fn count_fixed_examples() {
    let c = group(CHEB);
    assert_eq!(c.count_fixed(&Element::identity(), 4).unwrap(), 16);
    let a = c.parse_expr("a").unwrap();
    for n in 1..=6 {
        assert_eq!(c.count_fixed(&a, n).unwrap(), 2);
    }
    assert_eq!(c.count_fixed(&c.parse_expr("b").unwrap(), 1).unwrap(), 0);
}

#[test]
fn fixed_end_examples() {
    let c = group(CHEB);
    assert_eq!(c.classify_fixed_ends(&c.parse_expr("a").unwrap()).unwrap(), FixedEnds::Finite(1));
    assert_eq!(c.classify_fixed_ends(&c.parse_expr("b").unwrap()).unwrap(), FixedEnds::Zero);
    assert_eq!(c.classify_fixed_ends(&Element::identity()).unwrap(), FixedEnds::Infinite);
    let b = group(BASILICA);
    assert_eq!(b.classify_fixed_ends(&b.parse_expr("b").unwrap()).unwrap(), FixedEnds::Infinite);
    assert_eq!(b.classify_fixed_ends(&b.parse_expr("a").unwrap()).unwrap(), FixedEnds::Zero);
    let t = group(TRICHEB);
    assert_eq!(t.classify_fixed_ends(&t.parse_expr("a").unwrap()).unwrap(), FixedEnds::Finite(1));
}

/// Fixed words of length `n` that extend to a fixed word of length `n + extra`.
fn surviving_prefixes(g: &AutomatonGroup, e: &Element, n: usize, extra: usize) -> usize {
    let lp = g.level_permutation(e, n + extra).unwrap();
    let shift = g.degree().pow(extra as u32);
    let mut alive = vec![false; g.degree().pow(n as u32)];
    for (i, &y) in lp.images().iter().enumerate() {
        if i as u32 == y {
            alive[i / shift] = true;
        }
    }
    alive.into_iter().filter(|&x| x).count()
}

#[test]
fn finite_ends_match_surviving_prefixes() {
    // Chebyshev a fixes one end: only the prefixes of 000... keep surviving
    let c = group(CHEB);
    let a = c.parse_expr("a").unwrap();
    for n in 1..=6 {
        assert_eq!(surviving_prefixes(&c, &a, n, 4), 1);
    }
    // Basilica b has unboundedly many fixed words
    let b = group(BASILICA);
    let bb = b.parse_expr("b").unwrap();
    let counts: Vec<u64> = (1..=10).map(|n| b.count_fixed(&bb, n).unwrap()).collect();
    assert!(counts.windows(2).all(|p| p[1] >= p[0]), "{counts:?}");
    assert_eq!(counts[9], 512);
}

#[test]
fn transitivity_examples() {
    let c = group(CHEB);
    let t = c.spherically_transitive_to_depth(&c.parse_expr("a*b").unwrap(), 10).unwrap();
    assert!(t.transitive);
    let t = c.spherically_transitive_to_depth(&Element::identity(), 1).unwrap();
    assert!(!t.transitive);
    assert_eq!(t.first_failure, Some(1));
    let o = group(ODOMETER);
    assert!(o.spherically_transitive_to_depth(&o.parse_expr("c").unwrap(), 12).unwrap().transitive);
    let b = group(BASILICA);
    let t = b.spherically_transitive_to_depth(&b.parse_expr("a").unwrap(), 5).unwrap();
    assert_eq!(t.first_failure, Some(2));
}

#[test]
fn transitivity_matches_orbits() {
    for text in [CHEB, BASILICA, ODOMETER, TRICHEB] {
        let g = group(text);
        for e in ["a*b", "a", "b^-1*a", "c", "a*b^2"] {
            let Ok(e) = g.parse_expr(e) else { continue };
            let depth = if g.degree() == 2 { 8 } else { 5 };
            let t = g.spherically_transitive_to_depth(&e, depth).unwrap();
            let first = (1..=depth).find(|&n| g.level_permutation(&e, n).unwrap().orbit_count() != 1);
            assert_eq!(t.first_failure, first, "{text} {}", g.display(&e));
        }
    }
}

#[test]
fn expressions() {
    let b = group(BASILICA);
    let e = b.parse_expr("a^2 * b^-1 * b * a^-1").unwrap();
    assert_eq!(b.display(&e), "a");
    assert_eq!(b.display(&b.parse_expr("1").unwrap()), "1");
    assert_eq!(b.display(&b.parse_expr("b*a^-2").unwrap()), "b*a^-2");
    assert!(matches!(b.parse_expr("a*z"), Err(ExprError::UnknownName(_))));
    assert!(matches!(b.parse_expr("a**b"), Err(ExprError::Syntax(_))));
    assert!(matches!(b.parse_expr("a^x"), Err(ExprError::BadExponent(_))));
    assert!(matches!(b.parse_expr(""), Err(ExprError::Empty)));
}

fn element_strategy(states: usize, max_len: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    proptest::collection::vec((0..states, any::<bool>()), 0..=max_len)
}

fn build(g: &AutomatonGroup, raw: &[(usize, bool)]) -> Element {
    g.reduce(raw.iter().map(|&(s, inv)| Generator::new(s, inv)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(which in 0usize..4, x in element_strategy(2, 4), y in element_strategy(2, 4), z in element_strategy(2, 4)) {
        let text = [CHEB, BASILICA, TRICHEB, ODOMETER][which];
        let g = group(text);
        let k = g.automaton().len();
        let clip = |v: &Vec<(usize, bool)>| v.iter().map(|&(s, i)| (s % k, i)).collect::<Vec<_>>();
        let (x, y, z) = (build(&g, &clip(&x)), build(&g, &clip(&y)), build(&g, &clip(&z)));
        let left = g.multiply(&g.multiply(&x, &y), &z);
        let right = g.multiply(&x, &g.multiply(&y, &z));
        prop_assert!(g.equal(&left, &right).unwrap());
        prop_assert!(g.is_trivial(&g.multiply(&x, &g.inverse(&x))).unwrap());
        prop_assert!(g.is_trivial(&g.multiply(&g.inverse(&x), &x)).unwrap());
    }

    #[test]
    fn level_actions_agree(which in 0usize..4, x in element_strategy(2, 5), n in 0usize..=5) {
        let text = [CHEB, BASILICA, TRICHEB, ODOMETER][which];
        let g = group(text);
        let k = g.automaton().len();
        let x: Vec<_> = x.into_iter().map(|(s, i)| (s % k, i)).collect();
        let e = build(&g, &x);
        let n = if g.degree() == 3 { n.min(4) } else { n };
        let lp = g.level_permutation(&e, n).unwrap();
        prop_assert!(lp.is_bijection());
        let brute = brute_level(&g, &e, n);
        prop_assert_eq!(lp.images(), brute.as_slice());
        prop_assert_eq!(g.count_fixed(&e, n).unwrap(), lp.fixed_count() as u64);
        for j in 0..=n {
            prop_assert!(lp.truncate(j).is_some());
        }
        // restriction never lengthens the word
        for v in all_words(g.degree(), n.min(3)) {
            prop_assert!(g.restrict(&e, &v).unwrap().len() <= e.len());
        }
    }
}

#[test]
fn lift_identities_exhaustive() {
    for text in [CHEB, BASILICA] {
        let g = group(text);
        for e in ["a", "b", "a*b", "a^-1*b^2", "b*a^-1"] {
            let e = g.parse_expr(e).unwrap();
            for n in 0..=5 {
                for v in all_words(2, n) {
                    let gv = g.restrict(&e, &v).unwrap();
                    for m in 0..=(5 - n) {
                        for u in all_words(2, m) {
                            let vu = v.concat(&u);
                            assert_eq!(g.restrict(&e, &vu).unwrap(), g.restrict(&gv, &u).unwrap());
                            let lhs = g.act(&e, &vu).unwrap();
                            let rhs = g.act(&e, &v).unwrap().concat(&g.act(&gv, &u).unwrap());
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn zero_ends_show_up_as_no_fixed_words() {
    for text in [CHEB, BASILICA, TRICHEB, ODOMETER] {
        let g = group(text);
        for s in 0..g.automaton().len() {
            let e = g.generator(s);
            if g.classify_fixed_ends(&e).unwrap() == FixedEnds::Zero {
                let bound = 8;
                assert!((1..=bound).any(|n| g.count_fixed(&e, n).unwrap() == 0));
            }
        }
    }
}
