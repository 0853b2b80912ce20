//! Coloring families with dual sets of arbitrary size.
//!
//! Sets of size at most `s = ⌈24·k·ln(ntk)⌉` are *small*; larger sets are
//! *big* and are truncated to their first `s` items. The items are split into
//! independent batches (color classes of a greedy coloring of the dependency
//! graph of small and truncated big sets). Starting from the uniform
//! coloring, each batch is rounded to integral rows by repeated
//! expectation-preserving LP walks over the linear restricted extensions of
//! the small-set functions. Only functions with more than `3t` fractional
//! occurrences in the batch are kept as constraints, so each batch moves a
//! small-set value by at most `3t`, and the whole run is a martingale.
//! Items of a single set are rounded in different batches with fresh
//! randomness, which makes every truncated big set rainbow with high
//! probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::big_sets::is_rainbow;
use crate::coloring::{
    discrepancy, discrepancy_from_values, eval_F_column, function_class_values, restricted_form,
    ColoringError, FractionalColoring, IntegralColoring,
};
use crate::dependency::DependencyGraph;
use crate::instance::{split_threshold, CoverageFunction, CoverageInstance, ThresholdSet};
use crate::lp::{round_in_expectation_observed, LinearSystem, LpError};
use crate::report::{Algorithm, AllSetsStats, Solution, SolveReport};
use crate::scalar::Scalar;

/// Certified small-set bound as a multiple of the Azuma radius.
pub const BOUND_FACTOR: f64 = 2.0;

#[derive(Debug, Error)]
pub enum AllSetsError {
    #[error("k must be positive")]
    ZeroColors,
    #[error("retry limit must be at least 1")]
    ZeroRetries,
    #[error(
        "split size {s_split} is below k = {k}, so big sets cannot be made rainbow; \
         use the small-sets solver for this instance"
    )]
    SplitBelowColors { s_split: usize, k: usize },
    #[error("batch item {0} is not fractional")]
    NotFractional(usize),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("batch LP failed: {0}")]
    Lp(#[from] LpError),
}

/// The family split at size `s_split`.
#[derive(Debug, Clone)]
pub struct SplitFamily {
    pub n: usize,
    pub t: usize,
    pub s_split: usize,
    /// `𝒮ˢ_i` for each function.
    pub small: Vec<CoverageFunction>,
    /// `𝒮ᵇ_i` for each function, every set truncated to `s_split` items.
    pub big: Vec<CoverageFunction>,
}

impl SplitFamily {
    pub fn num_small(&self) -> usize {
        self.small.iter().map(CoverageFunction::num_sets).sum()
    }

    pub fn num_big(&self) -> usize {
        self.big.iter().map(CoverageFunction::num_sets).sum()
    }

    fn all_sets(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.small
            .iter()
            .chain(&self.big)
            .flat_map(|f| f.sets().iter().map(Vec::as_slice))
    }

    pub fn big_sets(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.big
            .iter()
            .flat_map(|f| f.sets().iter().map(Vec::as_slice))
    }
}

/// Splits at `⌈24·k·ln(n·t·k)⌉`.
pub fn split(inst: &CoverageInstance, k: usize) -> SplitFamily {
    split_at(inst, split_threshold(inst.n(), inst.t(), k))
}

/// Splits at an explicit size threshold.
pub fn split_at(inst: &CoverageInstance, s_split: usize) -> SplitFamily {
    let mut small = Vec::with_capacity(inst.m());
    let mut big = Vec::with_capacity(inst.m());
    for func in inst.functions() {
        let (s, b): (Vec<_>, Vec<_>) = func.sets().iter().partition(|s| s.len() <= s_split);
        small.push(CoverageFunction::new(s.into_iter().cloned().collect()));
        big.push(CoverageFunction::new(
            b.into_iter().map(|s| s[..s_split].to_vec()).collect(),
        ));
    }
    SplitFamily {
        n: inst.n(),
        t: inst.t(),
        s_split,
        small,
        big,
    }
}

/// Disjoint independent batches covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batches {
    pub classes: Vec<Vec<usize>>,
    /// Maximum degree of the dependency graph.
    pub max_degree: usize,
}

/// Greedy sequential coloring of the dependency graph of `𝒮ˢ ∪ 𝒮ᵇ`,
/// using at most `Δ + 1 ≤ t·s_split + 1` batches.
pub fn batch_partition(split: &SplitFamily) -> Batches {
    let active = vec![true; split.n];
    let graph = DependencyGraph::build(split.n, split.all_sets(), &active);
    Batches {
        classes: graph.greedy_classes(),
        max_degree: graph.max_degree(),
    }
}

/// Per-batch bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchStats {
    pub inner_rounds: usize,
    pub forced_drops: usize,
    /// `max_{i,ℓ} |F^s_i(Y'_ℓ) − F^s_i(Y_ℓ)|`.
    pub max_change: f64,
}

/// Per-batch log of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchTrace {
    pub size: usize,
    pub fractional_before: usize,
    pub fractional_after: usize,
    pub stats: BatchStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllSetsRun {
    pub coloring: IntegralColoring,
    pub batches: Vec<BatchTrace>,
}

fn check_independent<T: Scalar>(
    split: &SplitFamily,
    y: &FractionalColoring<T>,
    d: &[usize],
) -> Result<(), ColoringError> {
    for func in split.small.iter().chain(&split.big) {
        restricted_form(func, y, 0, d)?;
    }
    Ok(())
}

/// Makes every item of the independent batch `d` integral while keeping
/// `E[Y'] = Y` and moving each small-set value `F^s_i(Y_ℓ)` by at most `3t`.
pub fn round_batch<T: Scalar, R: Rng + ?Sized>(
    split: &SplitFamily,
    y: &FractionalColoring<T>,
    d: &[usize],
    rng: &mut R,
) -> Result<(FractionalColoring<T>, BatchStats), AllSetsError> {
    round_batch_observed(split, y, d, rng, |_, _| {})
}

/// [`round_batch`] with `hook(system, iterate)` called after every LP step.
pub fn round_batch_observed<T, R, H>(
    split: &SplitFamily,
    y: &FractionalColoring<T>,
    d: &[usize],
    rng: &mut R,
    mut hook: H,
) -> Result<(FractionalColoring<T>, BatchStats), AllSetsError>
where
    T: Scalar,
    R: Rng + ?Sized,
    H: FnMut(&LinearSystem<T>, &[T]),
{
    let k = y.k();
    let m = split.small.len();
    let threshold = 3 * split.t.max(1);
    y.check_len(split.n)?;
    if let Some(&j) = d.iter().find(|&&j| !y.is_fractional(j)) {
        return Err(AllSetsError::NotFractional(j));
    }
    check_independent(split, y, d)?;

    // coefs[i][ℓ][p]: coefficient of item d[p] in F^s_i|_D on column ℓ;
    // fixed for the whole batch since no set holds two batch items
    let mut coefs: Vec<Vec<Vec<T>>> = Vec::with_capacity(m);
    for func in &split.small {
        let mut per_color = Vec::with_capacity(k);
        for color in 0..k {
            let form = restricted_form(func, y, color, d)?;
            per_color.push(form.coefficients.into_iter().map(|(_, c)| c).collect());
        }
        coefs.push(per_color);
    }
    let mut pos_of = vec![usize::MAX; split.n];
    for (p, &j) in d.iter().enumerate() {
        pos_of[j] = p;
    }
    // one entry per small set that contains a batch item
    let occurrences: Vec<Vec<usize>> = split
        .small
        .iter()
        .map(|func| {
            func.sets()
                .iter()
                .filter_map(|s| s.iter().map(|&j| pos_of[j]).find(|&p| p != usize::MAX))
                .collect()
        })
        .collect();

    let mut out = y.clone();
    let mut released = vec![false; m];
    let mut stats = BatchStats::default();
    let mut local = vec![usize::MAX; d.len()];
    loop {
        let frac: Vec<usize> = (0..d.len()).filter(|&p| out.is_fractional(d[p])).collect();
        if frac.is_empty() {
            break;
        }
        local.fill(usize::MAX);
        for (q, &p) in frac.iter().enumerate() {
            local[p] = q;
        }
        let live = |i: usize| {
            occurrences[i]
                .iter()
                .filter(|&&p| local[p] != usize::MAX)
                .count()
        };
        let active: Vec<(usize, usize)> = (0..m)
            .filter(|&i| !released[i])
            .map(|i| (i, live(i)))
            .filter(|&(_, c)| c > threshold)
            .collect();

        let vars = frac.len() * k;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for &(i, _) in &active {
            for color in 0..k {
                let mut row = vec![T::zero(); vars];
                let mut value = T::zero();
                for (q, &p) in frac.iter().enumerate() {
                    let c = coefs[i][color][p];
                    row[q * k + color] = c;
                    value = value + c * out.get(d[p], color);
                }
                if row.iter().any(|&c| c != T::zero()) {
                    rows.push(row);
                    rhs.push(value);
                }
            }
        }
        for q in 0..frac.len() {
            let mut row = vec![T::zero(); vars];
            row[q * k..(q + 1) * k].fill(T::one());
            rows.push(row);
            rhs.push(T::one());
        }
        let sys = LinearSystem::from_rows(vars, rows, rhs)?;
        let x0: Vec<T> = frac.iter().flat_map(|&p| out.row(d[p]).to_vec()).collect();
        let x = round_in_expectation_observed(&sys, &x0, rng, |x| hook(&sys, x))?;
        stats.inner_rounds += 1;

        let before = crate::lp::fractional_support(&x0).len();
        for (q, &p) in frac.iter().enumerate() {
            for color in 0..k {
                out.set(d[p], color, x[q * k + color]);
            }
            out.clean_row(d[p]);
        }
        let after: usize = frac
            .iter()
            .map(|&p| crate::lp::fractional_support(out.row(d[p])).len())
            .sum();
        if after >= before {
            // The remaining support is independent for these constraints.
            // Release the active function with the fewest live occurrences.
            let Some(&(i, _)) = active.iter().min_by_key(|&&(i, c)| (c, i)) else {
                unreachable!("simplex rows alone always admit a step");
            };
            released[i] = true;
            stats.forced_drops += 1;
        }
    }

    for func in &split.small {
        for color in 0..k {
            let change = (eval_F_column(func, &out, color) - eval_F_column(func, y, color)).abs();
            stats.max_change = stats.max_change.max(change.as_f64());
        }
    }
    Ok((out, stats))
}

/// One pass over all batches from the uniform coloring.
pub fn run_all_sets_once<T: Scalar, R: Rng + ?Sized>(
    split: &SplitFamily,
    batches: &Batches,
    k: usize,
    rng: &mut R,
) -> Result<AllSetsRun, AllSetsError> {
    if k == 0 {
        return Err(AllSetsError::ZeroColors);
    }
    if k == 1 {
        return Ok(AllSetsRun {
            coloring: IntegralColoring::new(1, vec![0; split.n])?,
            batches: Vec::new(),
        });
    }
    let mut y = FractionalColoring::<T>::uniform(split.n, k);
    let mut traces = Vec::with_capacity(batches.classes.len());
    for batch in &batches.classes {
        let fractional_before = y.num_fractional();
        let (next, stats) = round_batch(split, &y, batch, rng)?;
        y = next;
        traces.push(BatchTrace {
            size: batch.len(),
            fractional_before,
            fractional_after: y.num_fractional(),
            stats,
        });
    }
    let coloring = y
        .to_integral()
        .expect("every item belongs to a batch and batches end integral");
    Ok(AllSetsRun {
        coloring,
        batches: traces,
    })
}

/// `6·√(t³·s·ln(ntk))`.
pub fn azuma_radius(n: usize, t: usize, k: usize, s_split: usize) -> f64 {
    let t = t.max(1) as f64;
    let ntk = n.max(1) as f64 * t * k.max(1) as f64;
    6.0 * (t.powi(3) * s_split as f64 * ntk.ln()).sqrt()
}

/// `BOUND_FACTOR · 6·√(t³·s·ln(ntk))`.
pub fn small_sets_bound(n: usize, t: usize, k: usize, s_split: usize) -> f64 {
    BOUND_FACTOR * azuma_radius(n, t, k, s_split)
}

/// Discrepancy of the small-set part only.
pub fn small_discrepancy(split: &SplitFamily, chi: &IntegralColoring) -> usize {
    discrepancy_from_values(&function_class_values(&split.small, chi)).value
}

struct Attempt {
    run: AllSetsRun,
    rainbow: bool,
    small_disc: usize,
    max_change: f64,
    certified: bool,
}

/// Split, batch and round; verify that every truncated big set is rainbow
/// and that the small-set discrepancy is within [`small_sets_bound`],
/// retrying up to `retry_limit` times.
pub fn solve_all_sets<T: Scalar>(
    inst: &CoverageInstance,
    k: usize,
    seed: u64,
    retry_limit: usize,
) -> Result<Solution, AllSetsError> {
    if k == 0 {
        return Err(AllSetsError::ZeroColors);
    }
    if retry_limit == 0 {
        return Err(AllSetsError::ZeroRetries);
    }
    let split = split(inst, k);
    if split.num_big() > 0 && split.s_split < k {
        return Err(AllSetsError::SplitBelowColors {
            s_split: split.s_split,
            k,
        });
    }
    let batches = batch_partition(&split);
    let t = inst.t().max(1);
    let threshold = 3 * t;
    let radius = azuma_radius(inst.n(), t, k, split.s_split);
    let bound = BOUND_FACTOR * radius;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Attempt> = None;
    let mut attempts = 0;
    let mut inner_rounds = 0;
    let mut forced_drops = 0;
    while attempts < retry_limit {
        attempts += 1;
        let run = run_all_sets_once::<T, _>(&split, &batches, k, &mut rng)?;
        let chi = run.coloring.colors();
        let rainbow = split.big_sets().all(|s| is_rainbow(s, chi, k));
        let small_disc = small_discrepancy(&split, &run.coloring);
        let max_change = run
            .batches
            .iter()
            .map(|b| b.stats.max_change)
            .fold(0.0, f64::max);
        inner_rounds += run
            .batches
            .iter()
            .map(|b| b.stats.inner_rounds)
            .sum::<usize>();
        forced_drops += run
            .batches
            .iter()
            .map(|b| b.stats.forced_drops)
            .sum::<usize>();
        let within_step = max_change <= threshold as f64 + T::value_tol().as_f64();
        let certified = rainbow && small_disc as f64 <= bound && within_step;
        let attempt = Attempt {
            run,
            rainbow,
            small_disc,
            max_change,
            certified,
        };
        let better = best.as_ref().is_none_or(|b| {
            (!attempt.certified, !attempt.rainbow, attempt.small_disc)
                < (!b.certified, !b.rainbow, b.small_disc)
        });
        if better {
            best = Some(attempt);
        }
        if best.as_ref().is_some_and(|b| b.certified) {
            break;
        }
    }
    let best = best.expect("at least one attempt");
    let witness = discrepancy(inst, &best.run.coloring);
    if best.rainbow {
        // supersets of rainbow sets are rainbow
        debug_assert!(inst
            .all_sets()
            .filter(|(_, _, s)| s.len() > split.s_split)
            .all(|(_, _, s)| is_rainbow(s, best.run.coloring.colors(), k)));
    }
    let report = SolveReport {
        algorithm: Algorithm::All,
        n: inst.n(),
        m: inst.m(),
        t: inst.t(),
        k,
        seed,
        discrepancy: witness.value,
        witness,
        bound,
        certified: best.certified,
        attempts,
        retries: attempts - 1,
        thresholds: ThresholdSet::for_instance(inst, k),
        small_sets: None,
        big_sets: None,
        all_sets: Some(AllSetsStats {
            s_split: split.s_split,
            small_sets: split.num_small(),
            big_sets: split.num_big(),
            batches: batches.classes.len(),
            azuma_radius: radius,
            bound_factor: BOUND_FACTOR,
            small_discrepancy: best.small_disc,
            big_sets_rainbow: best.rainbow,
            max_batch_change: best.max_change,
            drop_threshold: threshold,
            inner_rounds,
            forced_drops,
        }),
    };
    Ok(Solution {
        coloring: best.run.coloring,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_random;

    fn inst(n: usize, fns: &[&[&[usize]]]) -> CoverageInstance {
        CoverageInstance::new(
            n,
            fns.iter()
                .map(|f| CoverageFunction::new(f.iter().map(|s| s.to_vec()).collect()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn split_cases() {
        let i = inst(6, &[&[&[0, 1], &[2, 3, 4, 5]], &[&[1, 2, 3]]]);
        let all_small = split_at(&i, 4);
        assert_eq!(all_small.num_big(), 0);
        assert_eq!(all_small.num_small(), 3);
        let all_big = split_at(&i, 1);
        assert_eq!(all_big.num_small(), 0);
        assert!(all_big.big_sets().all(|s| s.len() == 1));
        let mixed = split_at(&i, 2);
        assert_eq!(mixed.num_small() + mixed.num_big(), i.num_sets());
        assert_eq!(mixed.big[0].sets(), &[vec![2, 3]]);
    }

    #[test]
    fn batch_examples() {
        let i = inst(3, &[&[&[0], &[1], &[2]]]);
        let b = batch_partition(&split_at(&i, 10));
        assert_eq!(b.classes, vec![vec![0, 1, 2]]);
        let i = inst(2, &[&[&[0, 1]]]);
        assert_eq!(batch_partition(&split_at(&i, 10)).classes.len(), 2);
    }

    #[test]
    fn batches_are_independent() {
        let i = gen_random(120, 3, 3, (2, 6), 5).unwrap();
        let sp = split_at(&i, 4);
        let b = batch_partition(&sp);
        assert!(b.classes.len() <= 3 * 4 + 1);
        let mut seen = vec![false; i.n()];
        for class in &b.classes {
            for &j in class {
                assert!(!seen[j]);
                seen[j] = true;
            }
            for s in sp.small.iter().chain(&sp.big).flat_map(|f| f.sets()) {
                assert!(s.iter().filter(|j| class.contains(j)).count() <= 1);
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn disjoint_batch_rounds_each_row() {
        let i = inst(3, &[&[&[0, 1, 2]]]);
        let sp = split_at(&i, 10);
        let y = FractionalColoring::<f64>::uniform(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (out, stats) = round_batch(&sp, &y, &[0], &mut rng).unwrap();
        assert!(!out.is_fractional(0));
        assert_eq!(out.row(1), y.row(1));
        assert!(stats.max_change <= 3.0);
    }

    #[test]
    fn non_fractional_batch_rejected() {
        let i = inst(2, &[&[&[0], &[1]]]);
        let sp = split_at(&i, 10);
        let y = FractionalColoring::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            round_batch(&sp, &y, &[0, 1], &mut rng),
            Err(AllSetsError::NotFractional(0))
        ));
    }

    #[test]
    fn batch_change_is_bounded() {
        let i = gen_random(150, 2, 2, (2, 4), 8).unwrap();
        let sp = split_at(&i, 4);
        let b = batch_partition(&sp);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let run = run_all_sets_once::<f64, _>(&sp, &b, 3, &mut rng).unwrap();
            for bt in &run.batches {
                assert!(bt.stats.max_change <= 6.0 + 1e-9);
                assert_eq!(bt.fractional_after, bt.fractional_before - bt.size);
                assert_eq!(bt.stats.forced_drops, 0);
            }
        }
    }

    #[test]
    fn one_color_is_trivial() {
        let i = inst(3, &[&[&[0, 1], &[2]]]);
        let sol = solve_all_sets::<f64>(&i, 1, 0, 1).unwrap();
        assert_eq!(sol.report.discrepancy, 0);
        assert!(sol.report.certified);
    }
}
