//! Brute-force reference computations for small instances.

use thiserror::Error;

use crate::coloring::{class_values, discrepancy_from_values, Discrepancy, IntegralColoring};
use crate::instance::{CoverageFunction, CoverageInstance};
use crate::scalar::Scalar;

/// Default cap on `k^n` for [`min_discrepancy_exhaustive`].
pub const MAX_ENUMERATION: u128 = 10_000_000;
/// Largest support [`eval_F_enumeration`] will enumerate.
pub const MAX_SUPPORT: usize = 20;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("k must be positive")]
    ZeroColors,
    #[error("{k}^{n} colorings exceed the enumeration limit {limit}")]
    TooLarge { n: usize, k: usize, limit: u128 },
    #[error("support of {support} items exceeds the limit {MAX_SUPPORT}")]
    SupportTooLarge { support: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    Length { expected: usize, got: usize },
}

/// Minimum discrepancy over all `k^n` colorings with the smallest coloring
/// attaining it, in mixed-radix order with item 0 varying fastest.
pub fn min_discrepancy_exhaustive(
    inst: &CoverageInstance,
    k: usize,
) -> Result<(IntegralColoring, Discrepancy), OracleError> {
    min_discrepancy_exhaustive_with_limit(inst, k, MAX_ENUMERATION)
}

pub fn min_discrepancy_exhaustive_with_limit(
    inst: &CoverageInstance,
    k: usize,
    limit: u128,
) -> Result<(IntegralColoring, Discrepancy), OracleError> {
    if k == 0 {
        return Err(OracleError::ZeroColors);
    }
    let n = inst.n();
    let too_large = OracleError::TooLarge { n, k, limit };
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.checked_mul(k as u128).ok_or(too_large.clone())?;
        if total > limit {
            return Err(too_large);
        }
    }
    let mut chi = vec![0usize; n];
    let mut best: Option<(Vec<usize>, Discrepancy)> = None;
    loop {
        let coloring = IntegralColoring::new(k, chi.clone()).expect("colors below k");
        let d = discrepancy_from_values(&class_values(inst, &coloring));
        if best.as_ref().is_none_or(|(_, b)| d.value < b.value) {
            let done = d.value == 0;
            best = Some((chi.clone(), d));
            if done {
                break;
            }
        }
        // increment, smallest index fastest
        let mut pos = 0;
        while pos < n {
            chi[pos] += 1;
            if chi[pos] < k {
                break;
            }
            chi[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    let (chi, d) = best.expect("at least one coloring");
    Ok((IntegralColoring::new(k, chi).expect("colors below k"), d))
}

/// `F(x) = Σ_T f(T)·Π_{j∈T} x_j·Π_{j∉T}(1 − x_j)` by enumerating every
/// subset `T` of the items the function touches.
#[allow(non_snake_case)]
pub fn eval_F_enumeration<T: Scalar>(func: &CoverageFunction, x: &[T]) -> Result<T, OracleError> {
    let mut support: Vec<usize> = func.sets().iter().flatten().copied().collect();
    support.sort_unstable();
    support.dedup();
    if let Some(&max) = support.last() {
        if max >= x.len() {
            return Err(OracleError::Length {
                expected: max + 1,
                got: x.len(),
            });
        }
    }
    if support.len() > MAX_SUPPORT {
        return Err(OracleError::SupportTooLarge {
            support: support.len(),
        });
    }
    let local: std::collections::HashMap<usize, usize> =
        support.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let masks: Vec<u32> = func
        .sets()
        .iter()
        .map(|s| s.iter().fold(0u32, |m, j| m | (1 << local[j])))
        .collect();
    let mut total = T::zero();
    for subset in 0u32..(1u32 << support.len()) {
        let value = masks.iter().filter(|&&m| m & subset != 0).count();
        if value == 0 {
            continue;
        }
        let mut prob = T::one();
        for (p, &j) in support.iter().enumerate() {
            prob = prob
                * if subset >> p & 1 == 1 {
                    x[j]
                } else {
                    T::one() - x[j]
                };
        }
        total = total + T::lit(value as f64) * prob;
    }
    Ok(total)
}
