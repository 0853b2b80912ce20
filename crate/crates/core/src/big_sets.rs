//! Zero discrepancy for families whose dual sets are all large.
//!
//! If every dual set contains every color (a *rainbow* set), each function
//! takes the same value, its number of sets, on every color class. A uniformly
//! random coloring misses a color in a fixed `s`-subset with probability at
//! most `k·e^{−s/k}`, and each such event shares variables with at most
//! `t·s` others, so for `s ≥ s_big` the Moser–Tardos resampling algorithm
//! finds a coloring in which every representative subset is rainbow.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::{discrepancy, IntegralColoring};
use crate::instance::{CoverageInstance, ThresholdSet};
use crate::report::{Algorithm, BigSetsStats, Solution, SolveReport};

/// Scan limit for [`lll_threshold`].
pub const MAX_THRESHOLD: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BigSetsError {
    #[error("k must be positive")]
    ZeroColors,
    #[error(
        "set {set} of function {function} has {size} items, fewer than the required s_big = {s_big}"
    )]
    UndersizedSet {
        function: usize,
        set: usize,
        size: usize,
        s_big: usize,
    },
    #[error("no threshold up to {MAX_THRESHOLD} satisfies the local lemma condition")]
    ThresholdNotFound,
    #[error("resampling budget of {0} exhausted")]
    BudgetExhausted(usize),
}

/// Does `set` contain every color in `0..k`?
pub fn is_rainbow(set: &[usize], chi: &[usize], k: usize) -> bool {
    if set.len() < k {
        return false;
    }
    let mut seen = vec![false; k];
    let mut missing = k;
    for &j in set {
        let c = chi[j];
        if !seen[c] {
            seen[c] = true;
            missing -= 1;
            if missing == 0 {
                return true;
            }
        }
    }
    missing == 0
}

/// Smallest `s` with `k·e^{−s/k}·e·(t·s + 1) ≤ 1`, the symmetric local
/// lemma condition with `x(A) = 1/(t·s + 1)`. Returns 1 for `k = 1`.
pub fn lll_threshold(t: usize, k: usize) -> Result<usize, BigSetsError> {
    if k == 0 {
        return Err(BigSetsError::ZeroColors);
    }
    if k == 1 {
        return Ok(1);
    }
    let t = t.max(1) as f64;
    let kf = k as f64;
    // log form of the condition
    (1..=MAX_THRESHOLD)
        .find(|&s| {
            let s = s as f64;
            kf.ln() - s / kf + 1.0 + (t * s + 1.0).ln() <= 0.0
        })
        .ok_or(BigSetsError::ThresholdNotFound)
}

/// `(Σ_P x(P)/(1 − x(P)), |X|·Σ_P x(P)/(1 − x(P)))`.
pub fn lll_expectation(n: usize, num_events: usize, t: usize, s: usize) -> (f64, f64) {
    let ts = (t.max(1) * s) as f64;
    // x/(1 − x) with x = 1/(ts + 1)
    let per_event = 1.0 / ts;
    let resamples = num_events as f64 * per_event;
    (resamples, n as f64 * resamples)
}

/// One representative subset per dual set.
#[derive(Debug, Clone)]
pub struct RainbowProblem {
    pub n: usize,
    pub k: usize,
    pub representatives: Vec<Vec<usize>>,
}

/// Outcome of the resampling loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResampleRun {
    pub chi: Vec<usize>,
    /// Representative index resampled at each step.
    pub trace: Vec<usize>,
}

impl RainbowProblem {
    /// The first `s` items (in sorted order) of every set; fails on the
    /// first set smaller than `s`.
    pub fn from_instance(
        inst: &CoverageInstance,
        k: usize,
        s: usize,
    ) -> Result<Self, BigSetsError> {
        let mut representatives = Vec::with_capacity(inst.num_sets());
        for (function, set, items) in inst.all_sets() {
            if items.len() < s {
                return Err(BigSetsError::UndersizedSet {
                    function,
                    set,
                    size: items.len(),
                    s_big: s,
                });
            }
            representatives.push(items[..s].to_vec());
        }
        Ok(Self {
            n: inst.n(),
            k,
            representatives,
        })
    }

    /// Moser–Tardos: color uniformly, then while some representative is
    /// not rainbow, recolor all items of the lowest-indexed such one.
    pub fn resample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        budget: usize,
    ) -> Result<ResampleRun, BigSetsError> {
        let k = self.k;
        let mut chi: Vec<usize> = (0..self.n).map(|_| rng.gen_range(0..k)).collect();
        let mut touching = vec![Vec::new(); self.n];
        for (p, rep) in self.representatives.iter().enumerate() {
            for &j in rep {
                touching[j].push(p);
            }
        }
        let mut violated: BTreeSet<usize> = (0..self.representatives.len())
            .filter(|&p| !is_rainbow(&self.representatives[p], &chi, k))
            .collect();
        let mut trace = Vec::new();
        while let Some(p) = violated.pop_first() {
            if trace.len() >= budget {
                return Err(BigSetsError::BudgetExhausted(budget));
            }
            trace.push(p);
            for &j in &self.representatives[p] {
                chi[j] = rng.gen_range(0..k);
            }
            let mut affected: Vec<usize> = self.representatives[p]
                .iter()
                .flat_map(|&j| touching[j].iter().copied())
                .collect();
            affected.sort_unstable();
            affected.dedup();
            for q in affected {
                if is_rainbow(&self.representatives[q], &chi, k) {
                    violated.remove(&q);
                } else {
                    violated.insert(q);
                }
            }
        }
        Ok(ResampleRun { chi, trace })
    }
}

/// Resampling budget: `1000 ×` the expected running time, at least 1000.
pub fn resample_budget(expected_time: f64) -> usize {
    ((1000.0 * expected_time).ceil() as usize).max(1000)
}

/// A coloring in which every dual set is rainbow, hence of discrepancy 0.
/// Requires every set to have at least `s_big(t, k)` items.
pub fn solve_big_sets(
    inst: &CoverageInstance,
    k: usize,
    seed: u64,
) -> Result<Solution, BigSetsError> {
    if k == 0 {
        return Err(BigSetsError::ZeroColors);
    }
    let t = inst.t();
    let s_big = lll_threshold(t, k)?;
    let problem = RainbowProblem::from_instance(inst, k, s_big)?;
    let (expected_resamples, expected_time) =
        lll_expectation(inst.n(), problem.representatives.len(), t, s_big);
    let budget = resample_budget(expected_time);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let run = if k == 1 {
        ResampleRun {
            chi: vec![0; inst.n()],
            trace: Vec::new(),
        }
    } else {
        problem.resample(&mut rng, budget)?
    };
    let all_rainbow = inst.all_sets().all(|(_, _, s)| is_rainbow(s, &run.chi, k));
    let coloring = IntegralColoring::new(k, run.chi).expect("colors below k");
    let witness = discrepancy(inst, &coloring);
    debug_assert!(!all_rainbow || witness.value == 0);
    let report = SolveReport {
        algorithm: Algorithm::Big,
        n: inst.n(),
        m: inst.m(),
        t,
        k,
        seed,
        discrepancy: witness.value,
        witness,
        bound: 0.0,
        certified: all_rainbow && witness.value == 0,
        attempts: 1,
        retries: 0,
        thresholds: ThresholdSet::for_instance(inst, k),
        small_sets: None,
        big_sets: Some(BigSetsStats {
            s_big,
            resamples: run.trace.len(),
            budget,
            expected_resamples,
            expected_time,
            all_sets_rainbow: all_rainbow,
        }),
        all_sets: None,
    };
    Ok(Solution { coloring, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::CoverageFunction;

    #[test]
    fn rainbow_examples() {
        assert!(is_rainbow(&[0, 1], &[0, 1], 2));
        assert!(!is_rainbow(&[0, 1], &[0, 0], 2));
        assert!(!is_rainbow(&[0], &[0, 1], 2));
        assert!(is_rainbow(&[1], &[0, 0], 1));
    }

    fn product_form(t: usize, k: usize, s: usize) -> f64 {
        let (t, k, s) = (t as f64, k as f64, s as f64);
        k * (-s / k).exp() * std::f64::consts::E * (t * s + 1.0)
    }

    #[test]
    fn threshold_matches_direct_scan() {
        assert_eq!(lll_threshold(5, 1), Ok(1));
        // 2e·9·e^{-4} = 0.896 ≤ 1 < 2e·8·e^{-3.5} = 1.313
        assert_eq!(lll_threshold(1, 2), Ok(8));
        assert!(product_form(1, 2, 8) <= 1.0 && product_form(1, 2, 7) > 1.0);
        for t in 1..6 {
            for k in 2..6 {
                let s = lll_threshold(t, k).unwrap();
                assert!(product_form(t, k, s) <= 1.0);
                assert!(product_form(t, k, s - 1) > 1.0);
                assert!(lll_threshold(2 * t, k).unwrap() >= s);
                assert!(lll_threshold(t, k + 1).unwrap() >= s);
            }
        }
        assert_eq!(lll_threshold(1, 0), Err(BigSetsError::ZeroColors));
    }

    #[test]
    fn single_big_set() {
        let s = lll_threshold(1, 2).unwrap();
        let inst =
            CoverageInstance::new(s, vec![CoverageFunction::new(vec![(0..s).collect()])]).unwrap();
        let sol = solve_big_sets(&inst, 2, 4).unwrap();
        assert_eq!(sol.report.discrepancy, 0);
        assert!(sol.report.certified);
        assert!(is_rainbow(
            &(0..s).collect::<Vec<_>>(),
            sol.coloring.colors(),
            2
        ));
    }

    #[test]
    fn one_color() {
        let inst = CoverageInstance::new(3, vec![CoverageFunction::new(vec![vec![0, 1], vec![2]])])
            .unwrap();
        let sol = solve_big_sets(&inst, 1, 0).unwrap();
        assert_eq!(sol.coloring.colors(), &[0, 0, 0]);
        assert_eq!(sol.report.big_sets.as_ref().unwrap().resamples, 0);
        assert_eq!(sol.report.discrepancy, 0);
    }

    #[test]
    fn undersized_set_named() {
        let inst =
            CoverageInstance::new(10, vec![CoverageFunction::new(vec![vec![0, 1, 2]])]).unwrap();
        let err = solve_big_sets(&inst, 2, 0).unwrap_err();
        assert_eq!(
            err,
            BigSetsError::UndersizedSet {
                function: 0,
                set: 0,
                size: 3,
                s_big: 8
            }
        );
    }

    #[test]
    fn budget_is_enforced() {
        // representatives of size 1 can never be 2-rainbow
        let problem = RainbowProblem {
            n: 2,
            k: 2,
            representatives: vec![vec![0]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            problem.resample(&mut rng, 5),
            Err(BigSetsError::BudgetExhausted(5))
        );
    }
}
