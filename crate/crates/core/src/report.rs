//! Solver output: the coloring plus a machine-readable report.

use serde::{Deserialize, Serialize};

use crate::coloring::{Discrepancy, IntegralColoring};
use crate::instance::ThresholdSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Small,
    Big,
    All,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Small => "small",
            Algorithm::Big => "big",
            Algorithm::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallSetsStats {
    /// Rounding iterations of the zero-discrepancy phase.
    pub iterations: usize,
    /// Fractional rows left for randomized rounding.
    pub fractional_rows: usize,
    pub frac_cap: usize,
    /// Largest fractional discrepancy seen after any iteration.
    pub max_frac_discrepancy: f64,
    /// `√(2·|Z|·t²·(1 + ln 2mk))`, the per-attempt target.
    pub rounding_bound: f64,
    /// `√(2·m·t³·k·s·(1 + ln 2mk))`.
    pub worst_case_bound: f64,
    pub max_set_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigSetsStats {
    pub s_big: usize,
    pub resamples: usize,
    pub budget: usize,
    /// `Σ_P x(P)/(1 − x(P))` with `x(P) = 1/(t·s + 1)`.
    pub expected_resamples: f64,
    /// `n · Σ_P x(P)/(1 − x(P))`.
    pub expected_time: f64,
    pub all_sets_rainbow: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllSetsStats {
    pub s_split: usize,
    pub small_sets: usize,
    pub big_sets: usize,
    pub batches: usize,
    /// `6·√(t³·s·ln(ntk))`.
    pub azuma_radius: f64,
    /// Multiplier applied to the radius to get the certified bound.
    pub bound_factor: f64,
    pub small_discrepancy: usize,
    pub big_sets_rainbow: bool,
    /// Largest `|F^s_i(Y'_ℓ) − F^s_i(Y_ℓ)|` over all batches.
    pub max_batch_change: f64,
    pub drop_threshold: usize,
    /// Inner LP rounds over all batches.
    pub inner_rounds: usize,
    /// Constraints released because the walk stalled above the threshold.
    pub forced_drops: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub k: usize,
    pub seed: u64,
    /// Discrepancy of the returned coloring on the whole family.
    pub discrepancy: usize,
    pub witness: Discrepancy,
    /// The value the certificate is checked against.
    pub bound: f64,
    pub certified: bool,
    pub attempts: usize,
    pub retries: usize,
    pub thresholds: ThresholdSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_sets: Option<SmallSetsStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_sets: Option<BigSetsStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_sets: Option<AllSetsStats>,
}

impl SolveReport {
    /// `discrepancy / bound`, with `0/0 = 0`.
    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.discrepancy as f64 / self.bound
        } else if self.discrepancy == 0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub coloring: IntegralColoring,
    pub report: SolveReport,
}
