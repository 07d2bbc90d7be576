//! Fixed points of random elements of the finite quotients `G_n`.
//!
//! `F_n` is the proportion of `G_n` fixing at least one word of length `n`.
//! The fixed-point process records `Y_i`, the number of fixed words of
//! length `i`, for a uniform element; with a spherically transitive element
//! in the group it is a martingale.

mod chain;

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::wreath::{AutomatonGroup, FixedEnds, LevelPermutation, WreathError};

pub use chain::LevelGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixstatError {
    #[error(transparent)]
    Wreath(#[from] WreathError),
    #[error("level {n}: |G_n| = {order} exceeds the enumeration budget {limit}")]
    EnumerationBudget { n: usize, order: String, limit: u64 },
    #[error("sampling requires a seed")]
    SeedRequired,
    #[error(
        "the product of the states is not transitive on level {level}, so the martingale property is not guaranteed"
    )]
    NotTransitive { level: usize },
    #[error("not a dihedral pair: {0}")]
    Shape(String),
}

impl FixstatError {
    pub fn is_budget(&self) -> bool {
        match self {
            FixstatError::Wreath(e) => e.is_budget(),
            FixstatError::EnumerationBudget { .. } => true,
            _ => false,
        }
    }
}

fn ratio_str<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

fn one_ratio_str<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sample,
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FStatRow {
    pub n: usize,
    /// `|G_n|` in decimal.
    pub order: String,
    pub mode: Mode,
    #[serde(serialize_with = "ratio_str", skip_serializing_if = "Option::is_none")]
    pub f_exact: Option<Ratio<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_est: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FStatTable {
    pub rows: Vec<FStatRow>,
}

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (n, p) = (n as f64, hits as f64 / n as f64);
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Samples per independently seeded chunk; fixed so that results do not
/// depend on the number of worker threads.
const CHUNK: u64 = 1024;

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Applies `f` to `count` uniform elements drawn with `seed`, returning the
/// results in draw order.
pub fn sample_map<T: Send>(
    g: &LevelGroup,
    count: u64,
    seed: u64,
    f: impl Fn(&LevelPermutation) -> T + Sync + Send,
) -> Vec<T> {
    use rayon::prelude::*;
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(|_| f(&g.random_element(&mut rng))).collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

/// `count` uniform elements of `G_n`; the same seed gives the same stream.
pub fn sample_uniform(g: &LevelGroup, count: u64, seed: u64) -> Vec<LevelPermutation> {
    sample_map(g, count, seed, Clone::clone)
}

fn enumerable(g: &LevelGroup, limit: u64) -> Result<u64, FixstatError> {
    match g.order_u64() {
        Some(o) if o <= limit => Ok(o),
        _ => Err(FixstatError::EnumerationBudget { n: g.n(), order: g.order().to_string(), limit }),
    }
}

/// Number of elements of `G_n` fixing at least one point, by enumeration.
pub fn count_with_fixed_point(g: &LevelGroup, limit: u64) -> Result<(u64, u64), FixstatError> {
    let order = enumerable(g, limit)?;
    let hits = g.fold_elements(
        || 0u64,
        |acc, images| {
            if images.iter().enumerate().any(|(x, &y)| x as u32 == y) {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    Ok((hits, order))
}

/// `F_n` for `n = 1..=n_max`.
pub fn fstat(
    group: &AutomatonGroup,
    n_max: usize,
    mode: Mode,
    samples: u64,
    seed: Option<u64>,
) -> Result<FStatTable, FixstatError> {
    let limit = group.budget().enumeration;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let g = LevelGroup::build(group, n)?;
        let exact = match mode {
            Mode::Exact => true,
            Mode::Sample => false,
            Mode::Auto => g.order_u64().is_some_and(|o| o <= limit),
        };
        let order = g.order().to_string();
        if exact {
            let (hits, total) = count_with_fixed_point(&g, limit)?;
            rows.push(FStatRow {
                n,
                order,
                mode: Mode::Exact,
                f_exact: Some(Ratio::new(hits, total)),
                f_est: None,
                ci_low: None,
                ci_high: None,
                samples: None,
            });
        } else {
            let seed = seed.ok_or(FixstatError::SeedRequired)?;
            let fixes = sample_map(&g, samples, seed, |e| e.images().iter().enumerate().any(|(x, &y)| x as u32 == y));
            let hits = fixes.iter().filter(|&&b| b).count() as u64;
            let (lo, hi) = wilson_interval(hits, samples);
            rows.push(FStatRow {
                n,
                order,
                mode: Mode::Sample,
                f_exact: None,
                f_est: Some(if samples == 0 { 0.0 } else { hits as f64 / samples as f64 }),
                ci_low: Some(lo),
                ci_high: Some(hi),
                samples: Some(samples),
            });
        }
    }
    Ok(FStatTable { rows })
}

/// `(Y_1, …, Y_n)` of a level-`n` permutation, each `Y_i` read off by
/// truncating word indices.
pub fn fixed_point_vector(images: &[u32], d: usize, n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let block = (d as u32).pow((n - i) as u32);
        let size = (d as u32).pow(i as u32);
        out.push((0..size).filter(|&p| images[(p * block) as usize] / block == p).count() as u64);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FpRow {
    pub y: Vec<u64>,
    pub multiplicity: u64,
}

/// Joint distribution of `(Y_1, …, Y_n)` over `G_n`, rows sorted by `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FpTable {
    pub n: usize,
    pub order: u64,
    pub rows: Vec<FpRow>,
}

pub fn fp_table(group: &AutomatonGroup, n: usize) -> Result<FpTable, FixstatError> {
    let g = LevelGroup::build(group, n)?;
    fp_table_of(&g, group.budget().enumeration)
}

pub fn fp_table_of(g: &LevelGroup, limit: u64) -> Result<FpTable, FixstatError> {
    let order = enumerable(g, limit)?;
    let (d, n) = (g.degree(), g.n());
    let counts = g.fold_elements(
        BTreeMap::<Vec<u64>, u64>::new,
        |acc, images| *acc.entry(fixed_point_vector(images, d, n)).or_default() += 1,
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        },
    );
    let rows = counts.into_iter().map(|(y, multiplicity)| FpRow { y, multiplicity }).collect();
    Ok(FpTable { n, order, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionalMean {
    pub history: Vec<u64>,
    /// Number of elements with this history.
    pub mass: u64,
    #[serde(serialize_with = "one_ratio_str")]
    pub mean: Ratio<u64>,
    pub expected: u64,
    pub holds: bool,
}

/// `E(Y_n | Y_1..Y_{n-1})` for every history of positive mass, compared
/// with `Y_{n-1}` in exact arithmetic.
pub fn conditional_means(table: &FpTable) -> Vec<ConditionalMean> {
    let n = table.n;
    if n < 2 {
        return Vec::new();
    }
    let mut groups: BTreeMap<Vec<u64>, (u64, u64)> = BTreeMap::new();
    for row in &table.rows {
        let e = groups.entry(row.y[..n - 1].to_vec()).or_default();
        e.0 += row.multiplicity;
        e.1 += row.multiplicity * row.y[n - 1];
    }
    groups
        .into_iter()
        .map(|(history, (mass, total))| {
            let expected = history[n - 2];
            ConditionalMean { mass, mean: Ratio::new(total, mass), expected, holds: total == expected * mass, history }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelMeans {
    pub n: usize,
    pub means: Vec<ConditionalMean>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MartingaleReport {
    pub levels: Vec<LevelMeans>,
    pub all_hold: bool,
}

/// Checks the martingale identity on levels `2..=n_max`. The state product
/// must be transitive on every level up to `n_max`.
pub fn martingale_check(group: &AutomatonGroup, n_max: usize) -> Result<MartingaleReport, FixstatError> {
    let t = group.spherically_transitive_to_depth(&group.state_product(), n_max)?;
    if let Some(level) = t.first_failure {
        return Err(FixstatError::NotTransitive { level });
    }
    martingale_means(group, n_max)
}

/// The conditional means of [`martingale_check`] without its transitivity
/// hypothesis, for exhibiting what fails when the hypothesis does.
pub fn martingale_means(group: &AutomatonGroup, n_max: usize) -> Result<MartingaleReport, FixstatError> {
    let mut levels = Vec::new();
    for n in 2..=n_max {
        levels.push(LevelMeans { n, means: conditional_means(&fp_table(group, n)?) });
    }
    let all_hold = levels.iter().all(|l| l.means.iter().all(|m| m.holds));
    Ok(MartingaleReport { levels, all_hold })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DihedralF {
    pub a: String,
    pub b: String,
    /// Members of `{a, b}` fixing at least one end.
    pub r: u64,
    #[serde(serialize_with = "one_ratio_str")]
    pub f: Ratio<u64>,
}

/// `ℱ = r/4` for a group generated by two distinct non-trivial involutions
/// whose product is spherically transitive (checked to `depth`).
pub fn dihedral_f_exact(group: &AutomatonGroup, depth: usize) -> Result<DihedralF, FixstatError> {
    let states = group.nontrivial_states();
    let [sa, sb] = states[..] else {
        return Err(FixstatError::Shape(format!("{} non-trivial generators, need exactly two", states.len())));
    };
    let (a, b) = (group.generator(sa), group.generator(sb));
    let name = |s| group.automaton().name_of(s).to_string();
    for (s, g) in [(sa, &a), (sb, &b)] {
        if !group.is_trivial(&group.power(g, 2))? {
            return Err(FixstatError::Shape(format!("{} is not an involution", name(s))));
        }
    }
    if group.equal(&a, &b)? {
        return Err(FixstatError::Shape("the two generators are equal".into()));
    }
    let t = group.spherically_transitive_to_depth(&group.multiply(&a, &b), depth)?;
    if let Some(level) = t.first_failure {
        return Err(FixstatError::Shape(format!("{}*{} is not transitive on level {level}", name(sa), name(sb))));
    }
    let mut r = 0;
    for g in [&a, &b] {
        if group.classify_fixed_ends(g)? != FixedEnds::Zero {
            r += 1;
        }
    }
    Ok(DihedralF { a: name(sa), b: name(sb), r, f: Ratio::new(r, 4) })
}

#[cfg(test)]
mod tests;
