//! `selfsim`: command-line access to automaton groups, kneading automata,
//! portrait realization and fixed-point statistics.
//!
//! Exit status is 0 on success, 1 on domain errors and 2 when a budget runs
//! out. Output depends only on the inputs and the seed.

mod settings;

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use selfsim::automaton::AutomatonSpec;
use selfsim::config::BudgetExceeded;
use selfsim::fixstat::{self, FixstatError, Mode};
use selfsim::imgbuild::{self, Builtin, Portrait, Sign};
use selfsim::kneading::{self, ConditionCheck, StableError};
use selfsim::permgeom;
use selfsim::verdict;
use selfsim::wreath::{AutomatonGroup, Element, WreathError};
use serde::Serialize;

use settings::{BudgetArgs, Settings};

#[derive(Parser)]
#[command(name = "selfsim", version, about = "Automaton groups acting on rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Exact,
    Sample,
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an automaton and print it in normal form
    Parse { file: PathBuf },
    /// Check an automaton, optionally against the kneading conditions (1)-(4)
    Validate {
        file: PathBuf,
        #[arg(long)]
        kneading: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Moore diagram in DOT
    Moore {
        file: PathBuf,
        /// Drop the identity state
        #[arg(long)]
        reduced: bool,
    },
    /// Kneading graph in DOT
    KneadingGraph { file: PathBuf },
    /// Stable set N0
    StableSet {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// N1 and its decomposition through kneading-graph loops
    N1 {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Nucleus of a contracting kneading automaton
    Nucleus {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Number of ends fixed by an element: zero, finite or infinite
    ClassifyEnds { file: PathBuf, expr: String },
    /// Spherical transitivity of an element up to a depth
    Transitive {
        file: PathBuf,
        expr: String,
        #[arg(long)]
        depth: usize,
    },
    /// Whether the level-n actions of the states form a tree-like multiset
    Treelike {
        file: PathBuf,
        #[arg(long)]
        level: usize,
    },
    /// Kneading automaton of a portrait or a built-in polynomial
    Img {
        #[arg(long, group = "source")]
        portrait: Option<PathBuf>,
        /// Chebyshev polynomial T_d
        #[arg(long, group = "source", value_name = "D")]
        chebyshev: Option<usize>,
        /// Use -T_d instead of T_d (odd d only)
        #[arg(long, requires = "chebyshev")]
        neg: bool,
        /// z^d
        #[arg(long, group = "source", value_name = "D")]
        power: Option<usize>,
        /// z^2 - 1
        #[arg(long, group = "source")]
        basilica: bool,
        /// Print the validated portrait instead of the automaton
        #[arg(long)]
        show_portrait: bool,
    },
    /// Exceptional-shape detection
    Exceptional {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// F_n, the proportion of G_n fixing a vertex of level n
    Fstat {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "auto")]
        mode: CliMode,
        /// Sample size per level [default: 100000]
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Joint distribution of the fixed-point counts (Y_1, ..., Y_n)
    FpTable {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact check that the fixed-point counts form a martingale
    Martingale {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Report the means even when no state product is transitive
        #[arg(long)]
        skip_hypothesis: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// ℱ = r/4 for a group generated by two involutions
    DihedralF {
        file: PathBuf,
        /// Depth of the transitivity check on the product
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Theorem-gated verdict on the limit ℱ
    Verdict {
        file: PathBuf,
        /// Depth of the transitivity check behind dihedral values
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

const DEFAULT_SAMPLES: u64 = 100_000;

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &PathBuf, settings: &Settings) -> anyhow::Result<AutomatonGroup> {
    let text = read_input(path)?;
    let spec = AutomatonSpec::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(AutomatonGroup::with_budget(spec, settings.budget))
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn set_text(group: &AutomatonGroup, name: &str, elements: &[Element]) -> String {
    let items: Vec<String> = elements.iter().map(|g| group.display(g)).collect();
    format!("{name} = {{{}}}\n", items.join(", "))
}

fn condition_line(out: &mut String, i: usize, check: &ConditionCheck) {
    let status = if check.holds { "pass" } else { "fail" };
    let _ = write!(out, "condition {i}: {status}");
    if let Some(w) = &check.witness {
        let _ = write!(out, " {}", serde_json::to_string(w).expect("witness serializes"));
    }
    out.push('\n');
}

fn csv_string(header: &[String], rows: Vec<Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Output and whether it reports a failed check (exit status 1).
struct Report {
    text: String,
    failed: bool,
}

impl From<String> for Report {
    fn from(text: String) -> Self {
        Report { text, failed: false }
    }
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let settings = cli.budget.resolve()?;
    let out = match cli.command {
        Command::Parse { file } => load(&file, &settings)?.automaton().to_dsl().into(),
        Command::Validate { file, kneading, format } => {
            let group = load(&file, &settings)?;
            let a = group.automaton();
            if !kneading {
                return Ok(match format {
                    Format::Json => json(&a.classify_states(group.budget().max_depth))?,
                    _ => format!("valid automaton: {} states over an alphabet of size {}\n", a.len(), a.degree()),
                }
                .into());
            }
            let report = kneading::validate_kneading(&group);
            let text = match format {
                Format::Json => json(&report)?,
                _ => {
                    let mut s = String::new();
                    condition_line(&mut s, 1, &report.condition1);
                    condition_line(&mut s, 2, &report.condition2);
                    condition_line(&mut s, 3, &report.condition3);
                    match &report.condition4 {
                        Some(c) => condition_line(&mut s, 4, c),
                        None => s.push_str("condition 4: undefined (conditions 1-2 fail)\n"),
                    }
                    s
                }
            };
            Report { text, failed: !report.all_hold() }
        }
        Command::Moore { file, reduced } => load(&file, &settings)?.automaton().export_dot(reduced).into(),
        Command::KneadingGraph { file } => {
            let group = load(&file, &settings)?;
            if !kneading::validate_kneading(&group).is_kneading() {
                bail!(StableError::NotKneading);
            }
            kneading::build_kneading_graph(&group).to_dot().into()
        }
        Command::StableSet { file, format } => {
            let group = load(&file, &settings)?;
            let sets = kneading::stable_sets(&group)?;
            match format {
                Format::Json => json(&sets.to_json(&group))?,
                _ => set_text(&group, "N0", &sets.n0),
            }
            .into()
        }
        Command::Nucleus { file, format } => {
            let group = load(&file, &settings)?;
            let sets = kneading::stable_sets(&group)?;
            match format {
                Format::Json => json(&sets.to_json(&group))?,
                _ => set_text(&group, "nucleus", &sets.nucleus),
            }
            .into()
        }
        Command::N1 { file, format } => {
            let group = load(&file, &settings)?;
            let sets = kneading::stable_sets(&group)?;
            let report = kneading::n1_structure(&group, &sets)?;
            match format {
                Format::Json => json(&report)?,
                _ => {
                    let mut s = set_text(&group, "N1", &sets.n1);
                    for d in &report.decompositions {
                        let _ = writeln!(
                            s,
                            "{} = ({})^-1 {}^{} ({})",
                            d.element, d.conjugator, d.loop_label, d.power, d.conjugator
                        );
                    }
                    for i in &report.inconsistencies {
                        let _ = writeln!(s, "inconsistency: {i}");
                    }
                    s
                }
            }
            .into()
        }
        Command::ClassifyEnds { file, expr } => {
            let group = load(&file, &settings)?;
            let g = group.parse_expr(&expr)?;
            format!("{}\n", group.classify_fixed_ends(&g)?).into()
        }
        Command::Transitive { file, expr, depth } => {
            let group = load(&file, &settings)?;
            let g = group.parse_expr(&expr)?;
            let t = group.spherically_transitive_to_depth(&g, depth)?;
            let text = match t.first_failure {
                None => format!("transitive on levels 1..={depth}\n"),
                Some(l) => format!("not transitive on level {l}\n"),
            };
            Report { text, failed: !t.transitive }
        }
        Command::Treelike { file, level } => {
            let group = load(&file, &settings)?;
            let multiset = permgeom::level_multiset_in(&group, level)?;
            let tree = permgeom::is_tree_like(&multiset);
            let text = format!("level {level}: {}\n", if tree { "tree-like" } else { "not tree-like" });
            Report { text, failed: !tree }
        }
        Command::Img { portrait, chebyshev, neg, power, basilica, show_portrait } => {
            let p = match (portrait, chebyshev, power, basilica) {
                (Some(path), ..) => Portrait::parse(&read_input(&path)?).map_err(imgbuild::ImgError::from)?,
                (_, Some(d), ..) => {
                    imgbuild::builtin_portrait(Builtin::Chebyshev(d, if neg { Sign::Minus } else { Sign::Plus }))?
                }
                (_, _, Some(d), _) => imgbuild::builtin_portrait(Builtin::Power(d))?,
                (_, _, _, true) => imgbuild::builtin_portrait(Builtin::Basilica)?,
                _ => bail!("one of --portrait, --chebyshev, --power, --basilica is required"),
            };
            if show_portrait {
                let valid = imgbuild::validate_portrait(&p).map_err(imgbuild::ImgError::Invalid)?;
                valid.to_text().into()
            } else {
                imgbuild::portrait_to_automaton(&p)?.to_dsl().into()
            }
        }
        Command::Exceptional { file, format } => {
            let group = load(&file, &settings)?;
            let r = imgbuild::detect_exceptional_shape(&group)?;
            match format {
                Format::Json => json(&r)?,
                _ if r.witness.is_empty() => format!("{}\n", r.verdict),
                _ => format!("{} (witness: {})\n", r.verdict, r.witness.join(", ")),
            }
            .into()
        }
        Command::Fstat { file, depth, mode, samples, seed, format } => {
            let group = load(&file, &settings)?;
            let seed = seed.or(settings.file.seed);
            let samples = samples.or(settings.file.samples).unwrap_or(DEFAULT_SAMPLES);
            let mode = match mode {
                CliMode::Exact => Mode::Exact,
                CliMode::Sample => Mode::Sample,
                CliMode::Auto => Mode::Auto,
            };
            if mode == Mode::Sample && seed.is_none() {
                bail!(FixstatError::SeedRequired);
            }
            let table = fixstat::fstat(&group, depth, mode, samples, seed)?;
            match format {
                Format::Json => json(&table)?,
                Format::Csv => {
                    let header = ["n", "order", "mode", "f_exact", "f_est", "ci_low", "ci_high", "samples"];
                    let rows = table
                        .rows
                        .iter()
                        .map(|r| {
                            let mode = serde_json::to_value(r.mode).expect("mode serializes");
                            vec![
                                r.n.to_string(),
                                r.order.clone(),
                                mode.as_str().unwrap_or_default().to_string(),
                                opt(&r.f_exact),
                                opt(&r.f_est),
                                opt(&r.ci_low),
                                opt(&r.ci_high),
                                opt(&r.samples),
                            ]
                        })
                        .collect();
                    csv_string(&header.map(String::from), rows)?
                }
                Format::Text => {
                    let mut s = String::new();
                    for r in &table.rows {
                        match (&r.f_exact, r.f_est, r.ci_low, r.ci_high) {
                            (Some(f), ..) => {
                                let _ = writeln!(s, "n={} |G_n|={} F_n={f}", r.n, r.order);
                            }
                            (None, Some(e), Some(lo), Some(hi)) => {
                                let _ = writeln!(s, "n={} |G_n|={} F_n~{e} [{lo}, {hi}]", r.n, r.order);
                            }
                            _ => {}
                        }
                    }
                    s
                }
            }
            .into()
        }
        Command::FpTable { file, depth, format } => {
            let group = load(&file, &settings)?;
            let table = fixstat::fp_table(&group, depth)?;
            match format {
                Format::Csv => {
                    let mut header: Vec<String> = (1..=depth).map(|i| format!("y{i}")).collect();
                    header.push("multiplicity".into());
                    let rows = table
                        .rows
                        .iter()
                        .map(|r| r.y.iter().map(u64::to_string).chain([r.multiplicity.to_string()]).collect())
                        .collect();
                    csv_string(&header, rows)?
                }
                Format::Json => json(&table)?,
                Format::Text => {
                    let mut s = format!("n={} |G_n|={}\n", table.n, table.order);
                    for r in &table.rows {
                        let y: Vec<String> = r.y.iter().map(u64::to_string).collect();
                        let _ = writeln!(s, "({}) x{}", y.join(", "), r.multiplicity);
                    }
                    s
                }
            }
            .into()
        }
        Command::Martingale { file, depth, skip_hypothesis, format } => {
            let group = load(&file, &settings)?;
            let report = if skip_hypothesis {
                fixstat::martingale_means(&group, depth)?
            } else {
                fixstat::martingale_check(&group, depth)?
            };
            let text = match format {
                Format::Json => json(&report)?,
                _ => {
                    let mut s = String::new();
                    for level in &report.levels {
                        for m in &level.means {
                            let h: Vec<String> = m.history.iter().map(u64::to_string).collect();
                            let mark = if m.holds { "=" } else { "!=" };
                            let _ = writeln!(
                                s,
                                "n={} E(Y_n | {}) = {} {mark} {}",
                                level.n,
                                h.join(", "),
                                m.mean,
                                m.expected
                            );
                        }
                    }
                    let _ = writeln!(s, "martingale: {}", if report.all_hold { "holds" } else { "fails" });
                    s
                }
            };
            Report { text, failed: !report.all_hold }
        }
        Command::DihedralF { file, depth, format } => {
            let group = load(&file, &settings)?;
            let d = fixstat::dihedral_f_exact(&group, depth)?;
            match format {
                Format::Json => json(&d)?,
                _ => format!("ℱ = {} (generators {} and {}, {} fixing an end)\n", d.f, d.a, d.b, d.r),
            }
            .into()
        }
        Command::Verdict { file, depth, format } => {
            let group = load(&file, &settings)?;
            let v = verdict::report_verdict(&group, depth)?;
            match format {
                Format::Json => json(&v)?,
                _ => format!("{v}\n"),
            }
            .into()
        }
    };
    Ok(out)
}

fn is_budget(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<BudgetExceeded>().is_some()
            || c.downcast_ref::<WreathError>().is_some_and(WreathError::is_budget)
            || c.downcast_ref::<StableError>().is_some_and(StableError::is_budget)
            || c.downcast_ref::<FixstatError>().is_some_and(FixstatError::is_budget)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(report.text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            if report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_budget(&e) { 2 } else { 1 })
        }
    }
}
