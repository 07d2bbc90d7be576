use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::*;
use crate::automaton::AutomatonSpec;

const CHEB: &str = "alphabet = 2\na : () [a, b]\nb : (0 1) [1, 1]\n";
const BASILICA: &str = "alphabet = 2\na : (0 1) [1, b]\nb : () [1, a]\n";
const ODOMETER: &str = "alphabet = 2\nc : (0 1) [c, 1]\n";
const TRICHEB: &str = "alphabet = 3\na : (1 2) [a, 1, 1]\nb : (0 1) [1, 1, b]\n";
const DIHEDRAL3: &str = "alphabet = 3\na : (1 2) [b, 1, 1]\nb : (0 1) [1, 1, a]\n";
const SWAP: &str = "alphabet = 2\ns : (0 1) [1, 1]\n";
const IDENTITY: &str = "alphabet = 2\ne : () [e, e]\n";

fn group(text: &str) -> AutomatonGroup {
    AutomatonGroup::new(AutomatonSpec::parse(text).unwrap())
}

/// Every element of `G_n`, by closing the generator actions under
/// composition; `None` past `cap` elements.
fn brute_closure(group: &AutomatonGroup, n: usize, cap: usize) -> Option<Vec<Vec<u32>>> {
    let gens: Vec<Vec<u32>> = (0..group.automaton().len())
        .map(|s| group.level_permutation(&group.generator(s), n).unwrap().into_images())
        .collect();
    let size = group.degree().pow(n as u32);
    let id: Vec<u32> = (0..size as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h: Vec<u32> = g.iter().map(|&y| s[y as usize]).collect();
            if seen.insert(h.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(h);
            }
        }
    }
    Some(seen.into_iter().collect())
}

/// `Y_i` as the number of blocks `p·X^(n-i)` mapped into themselves.
fn block_fixed(images: &[u32], d: usize, n: usize) -> Vec<u64> {
    (1..=n)
        .map(|i| {
            let block = d.pow((n - i) as u32);
            (0..d.pow(i as u32))
                .filter(|&p| (p * block..(p + 1) * block).all(|w| images[w] as usize / block == p))
                .count() as u64
        })
        .collect()
}

#[test]
fn orders() {
    let c = group(CHEB);
    assert_eq!(LevelGroup::build(&c, 1).unwrap().order(), &BigUint::from(2u32));
    for n in 2..=8 {
        assert_eq!(LevelGroup::build(&c, n).unwrap().order(), &BigUint::from(2u64 << n), "n = {n}");
    }
    let o = group(ODOMETER);
    for n in 1..=8 {
        assert_eq!(LevelGroup::build(&o, n).unwrap().order(), &BigUint::from(1u64 << n));
    }
    let b = group(BASILICA);
    assert_eq!(LevelGroup::build(&b, 2).unwrap().order(), &BigUint::from(8u32));
    for text in [TRICHEB, DIHEDRAL3] {
        let g = group(text);
        for n in 1..=5 {
            assert_eq!(LevelGroup::build(&g, n).unwrap().order(), &BigUint::from(2 * 3u64.pow(n as u32)));
        }
    }
    let e = group(IDENTITY);
    assert_eq!(LevelGroup::build(&e, 3).unwrap().order(), &BigUint::from(1u32));
}

#[test]
fn orders_match_brute_force() {
    let cases = [(CHEB, 8), (BASILICA, 4), (ODOMETER, 6), (TRICHEB, 4), (DIHEDRAL3, 4), (SWAP, 3)];
    for (text, n_max) in cases {
        let g = group(text);
        for n in 1..=n_max {
            let lg = LevelGroup::build(&g, n).unwrap();
            let all = brute_closure(&g, n, 100_000).unwrap();
            assert_eq!(lg.order(), &BigUint::from(all.len()), "{text} n = {n}");
            for e in &all {
                assert!(lg.contains(&LevelPermutation::from_images(g.degree(), n, e.clone())));
            }
            for gen in lg.generators() {
                assert!(lg.contains(gen));
            }
        }
    }
}

#[test]
fn membership_rejects_outsiders() {
    let c = group(CHEB);
    let lg = LevelGroup::build(&c, 3).unwrap();
    // a transposition of two leaves is not in the dihedral group
    let mut images: Vec<u32> = (0..8).collect();
    images.swap(0, 1);
    assert!(!lg.contains(&LevelPermutation::from_images(2, 3, images)));
    assert!(lg.contains(&LevelPermutation::identity(2, 3)));
}

#[test]
fn enumeration_visits_each_element_once() {
    for (text, n) in [(BASILICA, 3), (CHEB, 5), (TRICHEB, 3)] {
        let g = group(text);
        let lg = LevelGroup::build(&g, n).unwrap();
        let all = lg.fold_elements(
            Vec::new,
            |acc, e| acc.push(e.to_vec()),
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        let distinct: HashSet<Vec<u32>> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), all.len());
        let brute: HashSet<Vec<u32>> = brute_closure(&g, n, 100_000).unwrap().into_iter().collect();
        assert_eq!(distinct, brute);
    }
}

fn exact_f(text: &str, n: usize) -> Ratio<u64> {
    let t = fstat(&group(text), n, Mode::Exact, 0, None).unwrap();
    t.rows[n - 1].f_exact.unwrap()
}

#[test]
fn fstat_examples() {
    assert_eq!(exact_f(CHEB, 3), Ratio::new(5, 16));
    assert_eq!(exact_f(ODOMETER, 3), Ratio::new(1, 8));
    let t = fstat(&group(IDENTITY), 4, Mode::Exact, 0, None).unwrap();
    assert!(t.rows.iter().all(|r| r.f_exact == Some(Ratio::from_integer(1))));
}

#[test]
fn fstat_matches_brute_force() {
    for (text, n_max) in [(CHEB, 7), (BASILICA, 4), (TRICHEB, 4), (DIHEDRAL3, 4), (ODOMETER, 5)] {
        let g = group(text);
        let t = fstat(&g, n_max, Mode::Exact, 0, None).unwrap();
        for row in &t.rows {
            let all = brute_closure(&g, row.n, 100_000).unwrap();
            let hits = all.iter().filter(|e| e.iter().enumerate().any(|(x, &y)| x as u32 == y)).count();
            assert_eq!(row.f_exact, Some(Ratio::new(hits as u64, all.len() as u64)), "{text} n = {}", row.n);
        }
        let fs: Vec<Ratio<u64>> = t.rows.iter().map(|r| r.f_exact.unwrap()).collect();
        assert!(fs.windows(2).all(|w| w[1] <= w[0]), "{text}: {fs:?}");
    }
}

#[test]
fn fstat_errors_and_modes() {
    let b = group(BASILICA);
    assert_eq!(fstat(&b, 2, Mode::Sample, 100, None).unwrap_err(), FixstatError::SeedRequired);
    let small = AutomatonGroup::with_budget(
        AutomatonSpec::parse(BASILICA).unwrap(),
        crate::config::Budget { enumeration: 100, ..Default::default() },
    );
    let err = fstat(&small, 4, Mode::Exact, 0, None).unwrap_err();
    assert!(err.is_budget(), "{err:?}");
    let auto = fstat(&small, 4, Mode::Auto, 500, Some(7)).unwrap();
    assert_eq!(auto.rows[0].mode, Mode::Exact);
    assert_eq!(auto.rows[3].mode, Mode::Sample);
    let row = serde_json::to_value(&auto.rows[0]).unwrap();
    assert_eq!(row["f_exact"], "1/2");
    assert!(row.get("f_est").is_none());
}

#[test]
fn fp_table_examples() {
    let t = fp_table(&group(CHEB), 2).unwrap();
    assert_eq!(t.order, 8);
    assert_eq!(t.rows.iter().map(|r| r.multiplicity).sum::<u64>(), 8);
    assert!(t.rows.contains(&FpRow { y: vec![2, 4], multiplicity: 1 }));
    // the four elements swapping the top letters fix nothing
    assert!(t.rows.contains(&FpRow { y: vec![0, 0], multiplicity: 4 }), "{t:?}");

    let e = fp_table(&group(IDENTITY), 3).unwrap();
    assert_eq!(e.rows, vec![FpRow { y: vec![2, 4, 8], multiplicity: 1 }]);

    let b = group(BASILICA);
    let t = fp_table(&b, 3).unwrap();
    assert_eq!(t.rows.iter().map(|r| r.multiplicity).sum::<u64>(), t.order);
}

#[test]
fn fp_table_matches_block_oracle() {
    for (text, n) in [(BASILICA, 4), (CHEB, 5), (TRICHEB, 3), (DIHEDRAL3, 3)] {
        let g = group(text);
        let t = fp_table(&g, n).unwrap();
        let mut want: HashMap<Vec<u64>, u64> = HashMap::new();
        for e in brute_closure(&g, n, 100_000).unwrap() {
            *want.entry(block_fixed(&e, g.degree(), n)).or_default() += 1;
        }
        let got: HashMap<Vec<u64>, u64> = t.rows.iter().map(|r| (r.y.clone(), r.multiplicity)).collect();
        assert_eq!(got, want, "{text}");
        for r in &t.rows {
            for i in 1..n {
                assert!(r.y[i] <= g.degree() as u64 * r.y[i - 1]);
            }
        }
    }
}

#[test]
fn martingale_examples() {
    let r = martingale_check(&group(CHEB), 4).unwrap();
    assert!(r.all_hold);
    assert_eq!(r.levels.len(), 3);
    let r = martingale_check(&group(BASILICA), 3).unwrap();
    assert!(r.all_hold);

    let s = group(SWAP);
    assert_eq!(martingale_check(&s, 2).unwrap_err(), FixstatError::NotTransitive { level: 2 });
    let means = conditional_means(&fp_table(&s, 2).unwrap());
    let fixed = means.iter().find(|m| m.history == vec![2]).unwrap();
    assert_eq!(fixed.mean, Ratio::from_integer(4));
    assert!(!fixed.holds);
    assert!(!martingale_means(&s, 2).unwrap().all_hold);
}

#[test]
fn dihedral_values() {
    let d = dihedral_f_exact(&group(CHEB), 12).unwrap();
    assert_eq!((d.r, d.f), (1, Ratio::new(1, 4)));
    assert_eq!(dihedral_f_exact(&group(DIHEDRAL3), 12).unwrap().f, Ratio::new(1, 2));
    assert_eq!(dihedral_f_exact(&group(TRICHEB), 12).unwrap().f, Ratio::new(1, 2));
    let t5 = "alphabet = 5\na : (1 2)(3 4) [a, 1, 1, 1, 1]\nb : (0 3)(2 4) [1, b, 1, 1, 1]\n";
    assert_eq!(dihedral_f_exact(&group(t5), 8).unwrap().f, Ratio::new(1, 2));
    assert!(matches!(dihedral_f_exact(&group(BASILICA), 8), Err(FixstatError::Shape(_))));
    assert!(matches!(dihedral_f_exact(&group(ODOMETER), 8), Err(FixstatError::Shape(_))));
}

#[test]
fn chebyshev_count_formula() {
    // 1 + r·d^n/2 elements fixing a point, out of 2·d^n
    let c = group(CHEB);
    for n in 2..=9 {
        let lg = LevelGroup::build(&c, n).unwrap();
        let (hits, order) = count_with_fixed_point(&lg, u64::MAX).unwrap();
        assert_eq!(order, 2 << n);
        assert_eq!(hits, 1 + (1 << n) / 2);
    }
}

#[test]
fn sampling_is_deterministic() {
    let b = group(BASILICA);
    let lg = LevelGroup::build(&b, 4).unwrap();
    let x = sample_uniform(&lg, 3000, 11);
    let y = sample_uniform(&lg, 3000, 11);
    assert_eq!(x, y);
    assert_ne!(x, sample_uniform(&lg, 3000, 12));
    assert!(x.iter().all(|e| lg.contains(e)));

    let e = LevelGroup::build(&group(IDENTITY), 3).unwrap();
    assert!(sample_uniform(&e, 50, 1).iter().all(|g| *g == LevelPermutation::identity(2, 3)));
}

#[test]
fn sampling_is_uniform() {
    let c = group(CHEB);
    let lg = LevelGroup::build(&c, 3).unwrap();
    let samples = sample_uniform(&lg, 10_000, 2024);
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for s in samples {
        *counts.entry(s.into_images()).or_default() += 1;
    }
    assert_eq!(counts.len(), 16);
    let expected = 10_000.0 / 16.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let bound = ChiSquared::new(15.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < bound, "chi2 {chi2} >= {bound}");
}

#[test]
fn sampled_y_matches_fp_table() {
    let b = group(BASILICA);
    let n = 4;
    let lg = LevelGroup::build(&b, n).unwrap();
    let t = fp_table_of(&lg, u64::MAX).unwrap();
    let mut marginal: HashMap<u64, u64> = HashMap::new();
    for r in &t.rows {
        *marginal.entry(r.y[n - 1]).or_default() += r.multiplicity;
    }
    let count = 20_000u64;
    let mut observed: HashMap<u64, u64> = HashMap::new();
    for y in sample_map(&lg, count, 5, |e| e.fixed_count() as u64) {
        *observed.entry(y).or_default() += 1;
    }
    let mut chi2 = 0.0;
    for (y, &m) in &marginal {
        let expected = count as f64 * m as f64 / t.order as f64;
        let o = *observed.get(y).unwrap_or(&0) as f64;
        chi2 += (o - expected).powi(2) / expected;
    }
    assert!(observed.keys().all(|y| marginal.contains_key(y)));
    let bound = ChiSquared::new((marginal.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(chi2 < bound, "chi2 {chi2} >= {bound}");
}

#[test]
fn wilson_coverage() {
    for (text, n) in [(CHEB, 4), (BASILICA, 4)] {
        let g = group(text);
        let lg = LevelGroup::build(&g, n).unwrap();
        let (hits, order) = count_with_fixed_point(&lg, u64::MAX).unwrap();
        let exact = hits as f64 / order as f64;
        let covered = (0..50u64)
            .filter(|&seed| {
                let t = fstat(&g, n, Mode::Sample, 400, Some(seed)).unwrap();
                let row = &t.rows[n - 1];
                row.ci_low.unwrap() <= exact && exact <= row.ci_high.unwrap()
            })
            .count();
        assert!(covered >= 45, "{text}: {covered}/50");
    }
}

#[test]
fn fixed_point_vector_by_truncation() {
    let images: Vec<u32> = vec![0, 1, 3, 2];
    assert_eq!(fixed_point_vector(&images, 2, 2), vec![2, 2]);
    assert_eq!(block_fixed(&images, 2, 2), vec![2, 2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_automata_orders(
        perms in proptest::collection::vec(0usize..2, 2..=3),
        targets in proptest::collection::vec(0usize..4, 6),
        n in 1usize..=4,
    ) {
        let k = perms.len();
        let names = ["a", "b", "c"];
        let mut text = String::from("alphabet = 2\n");
        for s in 0..k {
            let t = |x: usize| if targets[2 * s + x] >= k { "1" } else { names[targets[2 * s + x]] };
            let p = if perms[s] == 1 { "(0 1)" } else { "()" };
            text.push_str(&format!("{} : {p} [{}, {}]\n", names[s], t(0), t(1)));
        }
        let g = group(&text);
        if let Some(all) = brute_closure(&g, n, 100_000) {
            let lg = LevelGroup::build(&g, n).unwrap();
            prop_assert_eq!(lg.order(), &BigUint::from(all.len()));
            let (hits, _) = count_with_fixed_point(&lg, u64::MAX).unwrap();
            let want = all.iter().filter(|e| e.iter().enumerate().any(|(x, &y)| x as u32 == y)).count();
            prop_assert_eq!(hits as usize, want);
        }
    }
}
