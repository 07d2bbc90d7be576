//! Budget and sampling settings merged from defaults, an optional TOML file,
//! environment variables and flags, later sources winning.

use std::path::Path;

use anyhow::Context;
use clap::Args;
use selfsim::config::Budget;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Args)]
pub struct BudgetArgs {
    /// TOML file with any of the budget keys, plus `samples` and `seed`
    #[arg(long, global = true, env = "SELFSIM_CONFIG")]
    pub config: Option<std::path::PathBuf>,
    /// Distinct restriction words explored by one decision or closure
    #[arg(long, global = true, env = "SELFSIM_MAX_RESTRICTIONS")]
    pub max_restrictions: Option<usize>,
    /// Deepest tree level materialized
    #[arg(long, global = true, env = "SELFSIM_MAX_DEPTH")]
    pub max_depth: Option<usize>,
    /// Largest level size d^n materialized as a permutation
    #[arg(long, global = true, env = "SELFSIM_MAX_POINTS")]
    pub max_points: Option<u64>,
    /// Largest group order enumerated element by element
    #[arg(long, global = true, env = "SELFSIM_ENUMERATION")]
    pub enumeration: Option<u64>,
    /// Elements kept by stable-set and nucleus searches
    #[arg(long, global = true, env = "SELFSIM_STABLE_CAP")]
    pub stable_cap: Option<usize>,
    /// Permutation entries stored by a stabilizer chain
    #[arg(long, global = true, env = "SELFSIM_CHAIN_CELLS")]
    pub chain_cells: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub max_restrictions: Option<usize>,
    pub max_depth: Option<usize>,
    pub max_points: Option<u64>,
    pub enumeration: Option<u64>,
    pub stable_cap: Option<usize>,
    pub chain_cells: Option<u64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub struct Settings {
    pub budget: Budget,
    pub file: FileConfig,
}

impl BudgetArgs {
    pub fn resolve(&self) -> anyhow::Result<Settings> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let d = Budget::default();
        let budget = Budget {
            max_restrictions: self.max_restrictions.or(file.max_restrictions).unwrap_or(d.max_restrictions),
            max_depth: self.max_depth.or(file.max_depth).unwrap_or(d.max_depth),
            max_points: self.max_points.or(file.max_points).unwrap_or(d.max_points),
            enumeration: self.enumeration.or(file.enumeration).unwrap_or(d.enumeration),
            stable_cap: self.stable_cap.or(file.stable_cap).unwrap_or(d.stable_cap),
            chain_cells: self.chain_cells.or(file.chain_cells).unwrap_or(d.chain_cells),
        };
        Ok(Settings { budget, file })
    }
}
