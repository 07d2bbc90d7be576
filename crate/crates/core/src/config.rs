//! Resource limits shared by the exploration and enumeration routines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Distinct restriction words explored by one decision or closure.
    pub max_restrictions: usize,
    /// Deepest tree level materialized.
    pub max_depth: usize,
    /// Largest level size `d^n` materialized as a permutation.
    pub max_points: u64,
    /// Largest group order enumerated element by element.
    pub enumeration: u64,
    /// Elements kept by stable-set and nucleus searches.
    pub stable_cap: usize,
    /// Permutation entries stored by a stabilizer chain (orbit sizes times
    /// level size, summed over the chain).
    pub chain_cells: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_restrictions: 100_000,
            max_depth: 20,
            max_points: 1 << 22,
            enumeration: 10_000_000,
            stable_cap: 10_000,
            chain_cells: 1 << 26,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("budget exceeded: {what} (limit {limit})")]
pub struct BudgetExceeded {
    pub what: &'static str,
    pub limit: u64,
}

impl BudgetExceeded {
    pub fn new(what: &'static str, limit: impl TryInto<u64>) -> Self {
        BudgetExceeded { what, limit: limit.try_into().unwrap_or(u64::MAX) }
    }
}
