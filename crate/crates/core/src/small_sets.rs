//! Coloring families whose dual sets are all small.
//!
//! Phase one starts from the uniform coloring (zero fractional
//! discrepancy) and repeatedly picks an independent set `D` of fractional
//! items, i.e. one whose members never share a dual set. On `D` every
//! restricted extension is linear, so the equalities `F_i|_D(Y'_ℓ) =
//! F_i|_D(Y_ℓ)` plus one simplex row per item form a linear system, and a
//! vertex of it leaves at most `m·k` items of `D` fractional. Phase two rounds
//! the remaining rows independently and verifies the concentration bound,
//! retrying on failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::{
    discrepancy, frac_discrepancy, is_independent, restricted_form, ColoringError,
    FractionalColoring, IntegralColoring,
};
use crate::dependency::DependencyGraph;
use crate::instance::{CoverageInstance, ThresholdSet};
use crate::lp::{vertex_solution, LinearSystem, LpError};
use crate::report::{Algorithm, SmallSetsStats, Solution, SolveReport};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SmallSetsError {
    #[error("set {set} of function {function} has {size} items, more than s = {max}")]
    SetTooLarge {
        function: usize,
        set: usize,
        size: usize,
        max: usize,
    },
    #[error("independent set has {size} items; rounding needs more than m·k = {needed}")]
    BatchTooSmall { size: usize, needed: usize },
    #[error("k must be positive")]
    ZeroColors,
    #[error("retry limit must be at least 1")]
    ZeroRetries,
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("rounding LP failed: {0}")]
    Lp(#[from] LpError),
    #[error("value preservation violated by {0:e}")]
    ValueDrift(f64),
}

#[derive(Debug, Clone)]
pub struct SmallSetsConfig {
    pub k: usize,
    /// Largest allowed set size `s`; defaults to the instance maximum.
    pub max_set_size: Option<usize>,
    pub retry_limit: usize,
    pub seed: u64,
    /// Tolerance on preserved extension values; never tighter than the
    /// scalar type's own value tolerance.
    pub tolerance: f64,
    /// Upper bound on the independent set handed to one LP; `None` means
    /// `4·m·k`. Never below `m·k + 1`.
    pub max_batch: Option<usize>,
}

impl SmallSetsConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            max_set_size: None,
            retry_limit: 40,
            seed,
            tolerance: 1e-6,
            max_batch: None,
        }
    }
}

/// Phase-one summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColoringStats {
    pub iterations: usize,
    /// `|Z|` before each iteration, then the final count.
    pub fractional_trace: Vec<usize>,
    pub max_frac_discrepancy: f64,
}

/// Greedy independent set of `z` in the dependency graph of all sets of
/// `inst`. Has at least `⌈|Z|/(t·s)⌉` members.
pub fn greedy_independent_set(inst: &CoverageInstance, z: &[usize]) -> Vec<usize> {
    let mut active = vec![false; inst.n()];
    for &j in z {
        active[j] = true;
    }
    let graph = DependencyGraph::build(inst.n(), inst.all_sets().map(|(_, _, s)| s), &active);
    graph.greedy_independent_set(z)
}

fn check_independent(inst: &CoverageInstance, d: &[usize]) -> Result<(), ColoringError> {
    for func in inst.functions() {
        if !is_independent(func, inst.n(), d) {
            // restricted_form names the offending set
            let probe = FractionalColoring::<f64>::uniform(inst.n(), 1);
            restricted_form(func, &probe, 0, d)?;
        }
    }
    Ok(())
}

/// Rounds `y` on the independent set `d` to a vertex of the RoundingLP:
/// rows outside `d` are untouched, every `F_i(Y_ℓ)` is preserved and at
/// least `|D| − m·k` members of `d` become integral.
pub fn round_independent_set<T: Scalar>(
    inst: &CoverageInstance,
    y: &FractionalColoring<T>,
    d: &[usize],
) -> Result<FractionalColoring<T>, SmallSetsError> {
    let k = y.k();
    let needed = inst.m() * k;
    if d.len() <= needed {
        return Err(SmallSetsError::BatchTooSmall {
            size: d.len(),
            needed,
        });
    }
    y.check_len(inst.n())?;
    check_independent(inst, d)?;

    let vars = d.len() * k;
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut rhs = Vec::new();
    for func in inst.functions() {
        for color in 0..k {
            let form = restricted_form(func, y, color, d)?;
            if form.coefficients.iter().all(|&(_, c)| c == T::zero()) {
                continue;
            }
            let mut row = vec![T::zero(); vars];
            let mut value = T::zero();
            for (pos, &(item, c)) in form.coefficients.iter().enumerate() {
                row[pos * k + color] = c;
                value = value + c * y.get(item, color);
            }
            rows.push(row);
            rhs.push(value);
        }
    }
    for pos in 0..d.len() {
        let mut row = vec![T::zero(); vars];
        row[pos * k..(pos + 1) * k].fill(T::one());
        rows.push(row);
        rhs.push(T::one());
    }
    let sys = LinearSystem::from_rows(vars, rows, rhs)?;
    let x0: Vec<T> = d.iter().flat_map(|&item| y.row(item).to_vec()).collect();
    let x = vertex_solution(&sys, &x0)?;

    let mut out = y.clone();
    for (pos, &item) in d.iter().enumerate() {
        for color in 0..k {
            out.set(item, color, x[pos * k + color]);
        }
        out.clean_row(item);
    }
    Ok(out)
}

fn check_sizes(inst: &CoverageInstance, max: usize) -> Result<(), SmallSetsError> {
    match inst.all_sets().find(|(_, _, s)| s.len() > max) {
        Some((function, set, s)) => Err(SmallSetsError::SetTooLarge {
            function,
            set,
            size: s.len(),
            max,
        }),
        None => Ok(()),
    }
}

/// Phase one: a fractional coloring with zero fractional discrepancy and
/// at most `m·k·t·s` fractional rows.
pub fn sparse_fractional_coloring<T: Scalar>(
    inst: &CoverageInstance,
    cfg: &SmallSetsConfig,
) -> Result<(FractionalColoring<T>, SparseColoringStats), SmallSetsError> {
    if cfg.k == 0 {
        return Err(SmallSetsError::ZeroColors);
    }
    let s = cfg.max_set_size.unwrap_or_else(|| inst.max_set_size());
    check_sizes(inst, s)?;
    let k = cfg.k;
    let mk = inst.m() * k;
    let cap = cfg.max_batch.unwrap_or(4 * mk).max(mk + 1);

    let mut y = FractionalColoring::<T>::uniform(inst.n(), k);
    let mut stats = SparseColoringStats {
        iterations: 0,
        fractional_trace: Vec::new(),
        max_frac_discrepancy: frac_discrepancy(inst, &y).as_f64(),
    };
    loop {
        let z = y.fractional_items();
        stats.fractional_trace.push(z.len());
        if z.is_empty() {
            break;
        }
        let mut d = greedy_independent_set(inst, &z);
        if d.len() <= mk {
            break;
        }
        d.truncate(cap);
        let next = round_independent_set(inst, &y, &d)?;
        let drift = frac_discrepancy(inst, &next).as_f64();
        if drift > cfg.tolerance.max(T::value_tol().as_f64()) {
            return Err(SmallSetsError::ValueDrift(drift));
        }
        stats.max_frac_discrepancy = stats.max_frac_discrepancy.max(drift);
        debug_assert!(next.num_fractional() < z.len());
        y = next;
        stats.iterations += 1;
    }
    Ok((y, stats))
}

/// Samples color `ℓ` for each fractional row with probability `Y_{jℓ}`;
/// integral rows keep their color.
pub fn randomized_rounding<T: Scalar, R: Rng + ?Sized>(
    y: &FractionalColoring<T>,
    rng: &mut R,
) -> IntegralColoring {
    let k = y.k();
    let chi = (0..y.n())
        .map(|j| {
            let row = y.row(j);
            if !y.is_fractional(j) {
                return row.iter().position(|&v| v > T::lit(0.5)).unwrap_or(0);
            }
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (c, v) in row.iter().enumerate() {
                acc += v.as_f64();
                if u < acc {
                    return c;
                }
            }
            (0..k).rev().find(|&c| row[c] > T::zero()).unwrap_or(k - 1)
        })
        .collect();
    IntegralColoring::new(k, chi).expect("colors below k")
}

/// `√(2·|Z|·t²·(1 + ln 2mk))`.
pub fn rounding_bound(fractional: usize, t: usize, m: usize, k: usize) -> f64 {
    let t = t as f64;
    (2.0 * fractional as f64 * t * t * (1.0 + (2.0 * (m * k) as f64).ln())).sqrt()
}

/// `√(2·m·t³·k·s·(1 + ln 2mk))`.
pub fn worst_case_bound(m: usize, t: usize, k: usize, s: usize) -> f64 {
    let (mf, tf, kf, sf) = (m as f64, t as f64, k as f64, s as f64);
    (2.0 * mf * tf.powi(3) * kf * sf * (1.0 + (2.0 * mf * kf).ln())).sqrt()
}

/// Both phases, with verify-and-retry on the rounding step. The returned
/// report is `certified` when some attempt met the bound; otherwise it
/// carries the best attempt.
pub fn solve_small_sets<T: Scalar>(
    inst: &CoverageInstance,
    cfg: &SmallSetsConfig,
) -> Result<Solution, SmallSetsError> {
    if cfg.retry_limit == 0 {
        return Err(SmallSetsError::ZeroRetries);
    }
    let (y, stats) = sparse_fractional_coloring::<T>(inst, cfg)?;
    let k = cfg.k;
    let s = cfg.max_set_size.unwrap_or_else(|| inst.max_set_size());
    let t = inst.t();
    let z = y.num_fractional();
    let bound = rounding_bound(z, t, inst.m(), k);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(IntegralColoring, crate::coloring::Discrepancy)> = None;
    let mut attempts = 0;
    let mut certified = false;
    while attempts < cfg.retry_limit {
        attempts += 1;
        let chi = randomized_rounding(&y, &mut rng);
        let disc = discrepancy(inst, &chi);
        let ok = (disc.value as f64) < bound || (z == 0 && disc.value == 0);
        if best.as_ref().is_none_or(|(_, b)| disc.value < b.value) {
            best = Some((chi, disc));
        }
        if ok {
            certified = true;
            break;
        }
    }
    let (coloring, witness) = best.expect("at least one attempt");
    let report = SolveReport {
        algorithm: Algorithm::Small,
        n: inst.n(),
        m: inst.m(),
        t,
        k,
        seed: cfg.seed,
        discrepancy: witness.value,
        witness,
        bound,
        certified,
        attempts,
        retries: attempts - 1,
        thresholds: ThresholdSet::new(inst.n(), inst.m(), t, k, s),
        small_sets: Some(SmallSetsStats {
            iterations: stats.iterations,
            fractional_rows: z,
            frac_cap: inst.m() * k * t.max(1) * s.max(1),
            max_frac_discrepancy: stats.max_frac_discrepancy,
            rounding_bound: bound,
            worst_case_bound: worst_case_bound(inst.m(), t, k, s),
            max_set_size: s,
        }),
        big_sets: None,
        all_sets: None,
    };
    Ok(Solution { coloring, report })
}
