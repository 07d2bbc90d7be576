//! Standard actions of iterated monodromy groups built from post-critical
//! portraits.
//!
//! A portrait records only combinatorics: the degree, a finite set of named
//! points with their images, and for each post-critical point `z` the list of
//! preimages of `z` with local degree and a post-critical flag. The generator
//! `g_z` acts on the alphabet with one `m`-cycle per preimage of local degree
//! `m`, and restricts to `g_c` at exactly one letter of that cycle when the
//! preimage `c` is itself post-critical.
//!
//! Text format:
//!
//! ```text
//! degree = 2
//! point -2 -> 2
//! point 2 -> 2
//! point 0 -> -2
//! fiber -2 : (0, 2, npc)
//! fiber 2 : (-2, 1, pc), (2, 1, pc)
//! ```

mod search;
mod shape;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

pub use search::portrait_to_automaton;
pub use shape::{detect_exceptional_shape, ExceptionalReport, ExceptionalShape};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberEntry {
    /// `None` for an anonymous preimage.
    pub point: Option<String>,
    pub multiplicity: usize,
    pub postcritical: bool,
}

impl FiberEntry {
    fn anonymous_simple() -> Self {
        FiberEntry { point: None, multiplicity: 1, postcritical: false }
    }

    fn is_critical(&self) -> bool {
        self.multiplicity > 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fiber {
    pub point: String,
    pub entries: Vec<FiberEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Portrait {
    pub degree: usize,
    /// `(name, image)` in declaration order.
    pub points: Vec<(String, String)>,
    /// One fiber per post-critical point, in the order that names the
    /// generators.
    pub fibers: Vec<Fiber>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct PortraitParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    #[error("degree {degree} is below 2")]
    DegreeTooSmall { degree: usize },
    #[error("point {point:?} declared twice")]
    DuplicatePoint { point: String },
    #[error("point {point:?} is used but never declared")]
    UndeclaredPoint { point: String },
    #[error("fiber over {point:?} given twice")]
    DuplicateFiber { point: String },
    #[error("entry {entry:?} listed more than once in the fibers")]
    DuplicateEntry { entry: String },
    #[error("fiber over {fiber:?} has an entry of multiplicity 0")]
    ZeroMultiplicity { fiber: String },
    #[error("fiber over {fiber:?} has multiplicities summing to {sum}, above the degree {degree}")]
    FiberSum { fiber: String, sum: usize, degree: usize },
    #[error("critical multiplicities add up to {total}, expected degree - 1 = {expected}")]
    CriticalCount { total: usize, expected: usize },
    #[error("entry {entry:?} of the fiber over {fiber:?} maps to {image:?}")]
    WrongImage { entry: String, fiber: String, image: String },
    #[error("entry {entry:?} over {fiber:?} is flagged {flag} but is {actual} post-critical")]
    PostcriticalFlag { entry: String, fiber: String, flag: &'static str, actual: &'static str },
    #[error("anonymous entry over {fiber:?} is flagged post-critical")]
    AnonymousPostcritical { fiber: String },
    #[error("post-critical point {point:?} maps to {image:?}, which has no fiber")]
    NotForwardClosed { point: String, image: String },
    #[error("post-critical point {point:?} is not on the forward orbit of a critical value")]
    NotOnCriticalOrbit { point: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImgError {
    #[error(transparent)]
    Parse(#[from] PortraitParseError),
    #[error("invalid portrait: {}", render_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("portrait admits no kneading realization")]
    NoRealization,
    #[error("invalid built-in portrait: {0}")]
    Builtin(String),
}

fn render_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Portrait {
    pub fn parse(text: &str) -> Result<Portrait, PortraitParseError> {
        let mut degree = None;
        let mut points = Vec::new();
        let mut fibers = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| PortraitParseError { line: i + 1, message };
            if let Some(rest) = line.strip_prefix("degree") {
                let value = rest.trim().strip_prefix('=').ok_or_else(|| err("expected `degree = d`".into()))?;
                degree = Some(value.trim().parse::<usize>().map_err(|e| err(format!("bad degree: {e}")))?);
            } else if let Some(rest) = line.strip_prefix("point ") {
                let (name, image) = rest.split_once("->").ok_or_else(|| err("expected `point NAME -> NAME`".into()))?;
                points.push((point_name(name).map_err(err)?, point_name(image).map_err(err)?));
            } else if let Some(rest) = line.strip_prefix("fiber ") {
                let (name, list) = rest.split_once(':').ok_or_else(|| err("expected `fiber NAME : entries`".into()))?;
                fibers
                    .push(Fiber { point: point_name(name).map_err(err)?, entries: parse_entries(list).map_err(err)? });
            } else {
                return Err(err(format!("unrecognized line {line:?}")));
            }
        }
        let degree = degree.ok_or(PortraitParseError { line: 0, message: "missing `degree = d`".into() })?;
        Ok(Portrait { degree, points, fibers })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("degree = {}\n", self.degree);
        for (p, q) in &self.points {
            let _ = writeln!(s, "point {p} -> {q}");
        }
        for f in &self.fibers {
            let entries: Vec<String> = f
                .entries
                .iter()
                .map(|e| {
                    let name = e.point.as_deref().unwrap_or("_");
                    let flag = if e.postcritical { "pc" } else { "npc" };
                    format!("({name}, {}, {flag})", e.multiplicity)
                })
                .collect();
            let _ = writeln!(s, "fiber {} : {}", f.point, entries.join(", "));
        }
        s
    }

    /// Names of the post-critical points, in generator order.
    pub fn postcritical(&self) -> Vec<&str> {
        self.fibers.iter().map(|f| f.point.as_str()).collect()
    }

    fn image_of(&self, name: &str) -> Option<&str> {
        self.points.iter().find(|(p, _)| p == name).map(|(_, q)| q.as_str())
    }
}

fn point_name(s: &str) -> Result<String, String> {
    let s = s.trim();
    let bad =
        s.is_empty() || s == "_" || s.chars().any(|c| c.is_whitespace() || "(),:#".contains(c)) || s.contains("->");
    if bad {
        Err(format!("bad point name {s:?}"))
    } else {
        Ok(s.to_string())
    }
}

fn parse_entries(list: &str) -> Result<Vec<FiberEntry>, String> {
    let mut out = Vec::new();
    let mut rest = list.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` at {rest:?}"))?;
        let close = body.find(')').ok_or("unclosed entry")?;
        let parts: Vec<&str> = body[..close].split(',').map(str::trim).collect();
        let [name, mult, flag] = parts[..] else {
            return Err(format!("entry {:?} needs three fields", &body[..close]));
        };
        let point = if name == "_" { None } else { Some(point_name(name)?) };
        let multiplicity = mult.parse::<usize>().map_err(|e| format!("bad multiplicity {mult:?}: {e}"))?;
        let postcritical = match flag {
            "pc" => true,
            "npc" => false,
            other => return Err(format!("flag must be pc or npc, got {other:?}")),
        };
        out.push(FiberEntry { point, multiplicity, postcritical });
        rest = body[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err("trailing comma".into());
            }
        } else if !rest.is_empty() {
            return Err(format!("expected `,` at {rest:?}"));
        }
    }
    if out.is_empty() {
        return Err("empty fiber".into());
    }
    Ok(out)
}

/// Checks every portrait invariant and returns the portrait with elided
/// anonymous simple preimages filled in, or every violation found.
pub fn validate_portrait(p: &Portrait) -> Result<Portrait, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let d = p.degree;
    if d < 2 {
        diags.push(Diagnostic::DegreeTooSmall { degree: d });
    }
    let mut images: HashMap<&str, &str> = HashMap::new();
    for (name, image) in &p.points {
        if images.insert(name, image).is_some() {
            diags.push(Diagnostic::DuplicatePoint { point: name.clone() });
        }
    }
    let mut undeclared = BTreeSet::new();
    for (_, image) in &p.points {
        if !images.contains_key(image.as_str()) {
            undeclared.insert(image.clone());
        }
    }
    let post: HashSet<&str> = p.fibers.iter().map(|f| f.point.as_str()).collect();
    let mut fiber_seen = HashSet::new();
    let mut entry_seen = HashSet::new();
    let mut out = p.clone();
    let mut critical_total = 0;
    for (fi, f) in p.fibers.iter().enumerate() {
        if !fiber_seen.insert(f.point.as_str()) {
            diags.push(Diagnostic::DuplicateFiber { point: f.point.clone() });
        }
        if !images.contains_key(f.point.as_str()) {
            undeclared.insert(f.point.clone());
        }
        let mut sum = 0;
        for e in &f.entries {
            if e.multiplicity == 0 {
                diags.push(Diagnostic::ZeroMultiplicity { fiber: f.point.clone() });
            }
            sum += e.multiplicity;
            critical_total += e.multiplicity.saturating_sub(1);
            let Some(name) = &e.point else {
                if e.postcritical {
                    diags.push(Diagnostic::AnonymousPostcritical { fiber: f.point.clone() });
                }
                continue;
            };
            if !entry_seen.insert(name.as_str()) {
                diags.push(Diagnostic::DuplicateEntry { entry: name.clone() });
            }
            match images.get(name.as_str()) {
                None => {
                    undeclared.insert(name.clone());
                }
                Some(&image) if image != f.point => diags.push(Diagnostic::WrongImage {
                    entry: name.clone(),
                    fiber: f.point.clone(),
                    image: image.to_string(),
                }),
                Some(_) => {}
            }
            let actual = post.contains(name.as_str());
            if actual != e.postcritical {
                diags.push(Diagnostic::PostcriticalFlag {
                    entry: name.clone(),
                    fiber: f.point.clone(),
                    flag: if e.postcritical { "pc" } else { "npc" },
                    actual: if actual { "" } else { "not" },
                });
            }
        }
        if sum > d {
            diags.push(Diagnostic::FiberSum { fiber: f.point.clone(), sum, degree: d });
        } else {
            out.fibers[fi].entries.extend((sum..d).map(|_| FiberEntry::anonymous_simple()));
        }
    }
    diags.extend(undeclared.into_iter().map(|point| Diagnostic::UndeclaredPoint { point }));
    if d >= 1 && critical_total != d - 1 {
        diags.push(Diagnostic::CriticalCount { total: critical_total, expected: d.saturating_sub(1) });
    }

    // P must be forward closed and consist of forward orbits of critical values.
    for f in &p.fibers {
        if let Some(&image) = images.get(f.point.as_str()) {
            if !post.contains(image) {
                diags.push(Diagnostic::NotForwardClosed { point: f.point.clone(), image: image.to_string() });
            }
        }
    }
    let mut on_orbit: HashSet<&str> = HashSet::new();
    for f in p.fibers.iter().filter(|f| f.entries.iter().any(FiberEntry::is_critical)) {
        let mut z = f.point.as_str();
        while post.contains(z) && on_orbit.insert(z) {
            match images.get(z) {
                Some(&next) => z = next,
                None => break,
            }
        }
    }
    for f in &p.fibers {
        if !on_orbit.contains(f.point.as_str()) {
            diags.push(Diagnostic::NotOnCriticalOrbit { point: f.point.clone() });
        }
    }

    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `±T_d`, normalized so that the post-critical set is `{-1, 1}`.
    Chebyshev(usize, Sign),
    /// `z^d`.
    Power(usize),
    /// `z^2 - 1`.
    Basilica,
}

fn critical_entries(names: &mut impl Iterator<Item = String>, count: usize) -> Vec<FiberEntry> {
    (0..count).map(|_| FiberEntry { point: names.next(), multiplicity: 2, postcritical: false }).collect()
}

fn simple_pc(name: &str) -> FiberEntry {
    FiberEntry { point: Some(name.to_string()), multiplicity: 1, postcritical: true }
}

pub fn builtin_portrait(kind: Builtin) -> Result<Portrait, ImgError> {
    let point = |a: &str, b: &str| (a.to_string(), b.to_string());
    let fiber = |z: &str, entries: Vec<FiberEntry>| Fiber { point: z.to_string(), entries };
    match kind {
        Builtin::Chebyshev(d, sign) => {
            if d < 2 {
                return Err(ImgError::Builtin(format!("Chebyshev degree {d} is below 2")));
            }
            if sign == Sign::Minus && d % 2 == 0 {
                return Err(ImgError::Builtin(format!("-T_{d} is conjugate to T_{d} for even degree; use the + sign")));
            }
            let mut crit = (1..d).map(|k| format!("c{k}"));
            let (fm, fp, mut points) = if d % 2 == 0 {
                // T_d(±1) = 1; d/2 critical points over -1, the rest over 1
                let over_minus = critical_entries(&mut crit, d / 2);
                let mut over_plus = vec![simple_pc("-1"), simple_pc("1")];
                over_plus.extend(critical_entries(&mut crit, (d - 2) / 2));
                (over_minus, over_plus, vec![point("-1", "1"), point("1", "1")])
            } else {
                // T_d fixes ±1, -T_d swaps them; (d-1)/2 critical points over each
                let (pre_minus, pre_plus, points) = match sign {
                    Sign::Plus => ("-1", "1", vec![point("-1", "-1"), point("1", "1")]),
                    Sign::Minus => ("1", "-1", vec![point("-1", "1"), point("1", "-1")]),
                };
                let mut over_minus = vec![simple_pc(pre_minus)];
                over_minus.extend(critical_entries(&mut crit, (d - 1) / 2));
                let mut over_plus = vec![simple_pc(pre_plus)];
                over_plus.extend(critical_entries(&mut crit, (d - 1) / 2));
                (over_minus, over_plus, points)
            };
            for (target, f) in [("-1", &fm), ("1", &fp)] {
                for e in f.iter().filter(|e| !e.postcritical) {
                    points.push(point(e.point.as_deref().expect("named critical points"), target));
                }
            }
            Ok(Portrait { degree: d, points, fibers: vec![fiber("-1", fm), fiber("1", fp)] })
        }
        Builtin::Power(d) => {
            if d < 2 {
                return Err(ImgError::Builtin(format!("power degree {d} is below 2")));
            }
            let entry = FiberEntry { point: Some("0".into()), multiplicity: d, postcritical: true };
            Ok(Portrait { degree: d, points: vec![point("0", "0")], fibers: vec![fiber("0", vec![entry])] })
        }
        Builtin::Basilica => Ok(Portrait {
            degree: 2,
            points: vec![point("-1", "0"), point("0", "-1")],
            fibers: vec![
                fiber("-1", vec![FiberEntry { point: Some("0".into()), multiplicity: 2, postcritical: true }]),
                fiber("0", vec![simple_pc("-1")]),
            ],
        }),
    }
}

/// Subsets `Σ` of the post-critical set with at most two points whose
/// non-critical preimages are exactly `Σ`. Best effort: only subsets of the
/// post-critical set are tried, since other fibers are not recorded.
pub fn sigma_candidates(p: &Portrait) -> Vec<Vec<String>> {
    let Ok(p) = validate_portrait(p) else {
        return Vec::new();
    };
    let names = p.postcritical();
    let noncritical = |z: &str| -> Vec<Option<&str>> {
        p.fibers
            .iter()
            .find(|f| f.point == z)
            .map(|f| f.entries.iter().filter(|e| !e.is_critical()).map(|e| e.point.as_deref()).collect())
            .unwrap_or_default()
    };
    let mut subsets: Vec<Vec<&str>> = names.iter().map(|&z| vec![z]).collect();
    for (i, &a) in names.iter().enumerate() {
        for &b in &names[i + 1..] {
            subsets.push(vec![a, b]);
        }
    }
    subsets
        .into_iter()
        .filter(|s| {
            let pre: Vec<Option<&str>> = s.iter().flat_map(|z| noncritical(z)).collect();
            let pre_set: BTreeSet<Option<&str>> = pre.iter().copied().collect();
            let want: BTreeSet<Option<&str>> = s.iter().map(|&z| Some(z)).collect();
            pre.len() == s.len() && pre_set == want && s.iter().all(|z| p.image_of(z).is_some_and(|q| s.contains(&q)))
        })
        .map(|s| s.into_iter().map(String::from).collect())
        .collect()
}
