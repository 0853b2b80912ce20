//! Integral and fractional colorings, discrepancy, and the multilinear
//! extension of coverage functions.
//!
//! For a coverage function with dual sets `𝒮` the multilinear extension has
//! the closed form `F(x) = Σ_S (1 − Π_{j∈S} (1 − x_j))`. When a set of items
//! `D` meets every dual set at most once, fixing all coordinates outside `D`
//! leaves a function that is affine in the coordinates of `D`; see
//! [`restricted_form`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{CoverageFunction, CoverageInstance};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("coloring has {got} items, instance has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("item {item} has color {color}, which is not below k = {k}")]
    ColorOutOfRange { item: usize, color: usize, k: usize },
    #[error("row {row} is not a probability vector over {k} colors")]
    InvalidRow { row: usize, k: usize },
    #[error("k must be positive")]
    ZeroColors,
    #[error("set {set} meets the restriction set in more than one item ({first} and {second})")]
    NotIndependent {
        set: usize,
        first: usize,
        second: usize,
    },
}

/// An assignment of exactly one color in `0..k` to every item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralColoring {
    k: usize,
    chi: Vec<usize>,
}

impl IntegralColoring {
    pub fn new(k: usize, chi: Vec<usize>) -> Result<Self, ColoringError> {
        if k == 0 {
            return Err(ColoringError::ZeroColors);
        }
        if let Some((item, &color)) = chi.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(ColoringError::ColorOutOfRange { item, color, k });
        }
        Ok(Self { k, chi })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.chi.len()
    }

    pub fn colors(&self) -> &[usize] {
        &self.chi
    }

    pub fn color(&self, item: usize) -> usize {
        self.chi[item]
    }

    /// Indicator vector of the items with color `color`.
    pub fn class_mask(&self, color: usize) -> Vec<bool> {
        self.chi.iter().map(|&c| c == color).collect()
    }

    pub fn check_len(&self, n: usize) -> Result<(), ColoringError> {
        if self.chi.len() == n {
            Ok(())
        } else {
            Err(ColoringError::LengthMismatch {
                expected: n,
                got: self.chi.len(),
            })
        }
    }
}

/// An `n × k` row-stochastic matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalColoring<T> {
    n: usize,
    k: usize,
    y: Vec<T>,
}

impl<T: Scalar> FractionalColoring<T> {
    /// Every entry `1/k`.
    pub fn uniform(n: usize, k: usize) -> Self {
        let v = T::one() / T::from_usize(k.max(1)).expect("k fits");
        Self {
            n,
            k,
            y: vec![v; n * k],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ColoringError> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(ColoringError::ZeroColors);
        }
        let mut y = Vec::with_capacity(n * k);
        for (row, r) in rows.into_iter().enumerate() {
            let sum = r.iter().fold(T::zero(), |a, &b| a + b);
            let in_box = r
                .iter()
                .all(|&v| v >= -T::row_tol() && v <= T::one() + T::row_tol());
            if r.len() != k || !in_box || (sum - T::one()).abs() > T::row_tol() {
                return Err(ColoringError::InvalidRow { row, k });
            }
            y.extend(r);
        }
        Ok(Self { n, k, y })
    }

    pub fn from_integral(chi: &IntegralColoring) -> Self {
        let mut y = Self {
            n: chi.n(),
            k: chi.k(),
            y: vec![T::zero(); chi.n() * chi.k()],
        };
        for (j, &c) in chi.colors().iter().enumerate() {
            y.y[j * chi.k() + c] = T::one();
        }
        y
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, item: usize, color: usize) -> T {
        self.y[item * self.k + color]
    }

    pub fn set(&mut self, item: usize, color: usize, v: T) {
        self.y[item * self.k + color] = v;
    }

    pub fn row(&self, item: usize) -> &[T] {
        &self.y[item * self.k..(item + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.y.chunks(self.k.max(1))
    }

    /// Column `color` as a point in `[0,1]^n`.
    pub fn column(&self, color: usize) -> Vec<T> {
        (0..self.n).map(|j| self.get(j, color)).collect()
    }

    /// A row is fractional when some entry lies strictly inside
    /// `(τ, 1 − τ)`.
    pub fn is_fractional(&self, item: usize) -> bool {
        let tol = T::integral_tol();
        self.row(item)
            .iter()
            .any(|&v| v > tol && v < T::one() - tol)
    }

    /// `Z(Y)`, ascending.
    pub fn fractional_items(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.is_fractional(j)).collect()
    }

    pub fn num_fractional(&self) -> usize {
        (0..self.n).filter(|&j| self.is_fractional(j)).count()
    }

    /// Snaps entries within `τ` of 0 or 1 onto the bound and rescales the
    /// row if its sum drifted by more than `ε_row`. Integral rows become
    /// exact unit vectors.
    pub fn clean_row(&mut self, item: usize) {
        let tol = T::integral_tol();
        let k = self.k;
        let row = &mut self.y[item * k..(item + 1) * k];
        for v in row.iter_mut() {
            if *v <= tol {
                *v = T::zero();
            } else if *v >= T::one() - tol {
                *v = T::one();
            }
        }
        if let Some(hot) = row.iter().position(|&v| v == T::one()) {
            for (c, v) in row.iter_mut().enumerate() {
                *v = if c == hot { T::one() } else { T::zero() };
            }
            return;
        }
        let sum = row.iter().fold(T::zero(), |a, &b| a + b);
        if (sum - T::one()).abs() > T::row_tol() && sum > T::zero() {
            for v in row.iter_mut() {
                *v = *v / sum;
            }
        }
    }

    /// The integral coloring, if every row is integral.
    pub fn to_integral(&self) -> Option<IntegralColoring> {
        let half = T::lit(0.5);
        let mut chi = Vec::with_capacity(self.n);
        for j in 0..self.n {
            if self.is_fractional(j) {
                return None;
            }
            chi.push(self.row(j).iter().position(|&v| v > half)?);
        }
        IntegralColoring::new(self.k, chi).ok()
    }

    pub fn check_len(&self, n: usize) -> Result<(), ColoringError> {
        if self.n == n {
            Ok(())
        } else {
            Err(ColoringError::LengthMismatch {
                expected: n,
                got: self.n,
            })
        }
    }

    pub fn to_rows_f64(&self) -> Vec<Vec<f64>> {
        self.rows()
            .map(|r| r.iter().map(|v| v.as_f64()).collect())
            .collect()
    }
}

/// `f(T) = Σ_S min{|S ∩ T|, 1}` for the set `T` given as an indicator.
pub fn eval_f(func: &CoverageFunction, in_t: &[bool]) -> usize {
    func.sets()
        .iter()
        .filter(|s| s.iter().any(|&j| in_t[j]))
        .count()
}

/// Value of `func` on the color class `color` of `chi`.
pub fn eval_f_class(func: &CoverageFunction, chi: &IntegralColoring, color: usize) -> usize {
    func.sets()
        .iter()
        .filter(|s| s.iter().any(|&j| chi.color(j) == color))
        .count()
}

/// Probability that `set` is missed under independent inclusion
/// probabilities `x`: `Π_{j∈S} (1 − x_j)`, left to right.
fn miss_probability<T: Scalar>(set: &[usize], x: impl Fn(usize) -> T) -> T {
    set.iter().fold(T::one(), |p, &j| p * (T::one() - x(j)))
}

/// Multilinear extension in closed form.
#[allow(non_snake_case)]
pub fn eval_F<T: Scalar>(func: &CoverageFunction, x: &[T]) -> T {
    eval_F_with(func, |j| x[j])
}

/// Multilinear extension with coordinates supplied by a closure.
#[allow(non_snake_case)]
pub fn eval_F_with<T: Scalar>(func: &CoverageFunction, x: impl Fn(usize) -> T) -> T {
    func.sets().iter().fold(T::zero(), |acc, s| {
        acc + (T::one() - miss_probability(s, &x))
    })
}

/// `F_i(Y_ℓ)`.
#[allow(non_snake_case)]
pub fn eval_F_column<T: Scalar>(
    func: &CoverageFunction,
    y: &FractionalColoring<T>,
    color: usize,
) -> T {
    eval_F_with(func, |j| y.get(j, color))
}

/// The worst function and color pair of a coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub value: usize,
    pub function: usize,
    pub color_a: usize,
    pub color_b: usize,
}

/// `f_i(χ⁻¹(ℓ))` for every function `i` and color `ℓ`.
pub fn class_values(inst: &CoverageInstance, chi: &IntegralColoring) -> Vec<Vec<usize>> {
    function_class_values(inst.functions(), chi)
}

/// [`class_values`] for an arbitrary list of functions.
pub fn function_class_values(
    functions: &[CoverageFunction],
    chi: &IntegralColoring,
) -> Vec<Vec<usize>> {
    let k = chi.k();
    let mut present = vec![false; k];
    functions
        .iter()
        .map(|func| {
            let mut vals = vec![0usize; k];
            for s in func.sets() {
                present.iter_mut().for_each(|p| *p = false);
                for &j in s {
                    present[chi.color(j)] = true;
                }
                for (c, &p) in present.iter().enumerate() {
                    if p {
                        vals[c] += 1;
                    }
                }
            }
            vals
        })
        .collect()
}

/// `max_i max_{ℓ,ℓ'} |f_i(χ⁻¹(ℓ)) − f_i(χ⁻¹(ℓ'))|` with the
/// lexicographically smallest witness `(i, ℓ, ℓ')`.
pub fn discrepancy(inst: &CoverageInstance, chi: &IntegralColoring) -> Discrepancy {
    discrepancy_from_values(&class_values(inst, chi))
}

pub(crate) fn discrepancy_from_values(values: &[Vec<usize>]) -> Discrepancy {
    let spread = |v: &Vec<usize>| {
        let hi = v.iter().copied().max().unwrap_or(0);
        let lo = v.iter().copied().min().unwrap_or(0);
        hi - lo
    };
    let value = values.iter().map(spread).max().unwrap_or(0);
    for (i, v) in values.iter().enumerate() {
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                if v[a].abs_diff(v[b]) == value {
                    return Discrepancy {
                        value,
                        function: i,
                        color_a: a,
                        color_b: b,
                    };
                }
            }
        }
    }
    Discrepancy {
        value,
        function: 0,
        color_a: 0,
        color_b: 0,
    }
}

/// `max_{i,ℓ,ℓ'} |F_i(Y_ℓ) − F_i(Y_{ℓ'})|`.
pub fn frac_discrepancy<T: Scalar>(inst: &CoverageInstance, y: &FractionalColoring<T>) -> T {
    let mut worst = T::zero();
    for func in inst.functions() {
        let vals: Vec<T> = (0..y.k()).map(|c| eval_F_column(func, y, c)).collect();
        let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = vals.iter().copied().fold(T::infinity(), T::min);
        if hi - lo > worst {
            worst = hi - lo;
        }
    }
    worst
}

/// `F|_D` of one function on one color column, as `c₀ + Σ_d c_d·x_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedLinearForm<T> {
    pub constant: T,
    /// `(item, coefficient)` in the order of the restriction set.
    pub coefficients: Vec<(usize, T)>,
}

impl<T: Scalar> RestrictedLinearForm<T> {
    /// Evaluates the form with `x(d)` supplying the free coordinates.
    pub fn evaluate(&self, x: impl Fn(usize) -> T) -> T {
        self.coefficients
            .iter()
            .fold(self.constant, |acc, &(d, c)| acc + c * x(d))
    }

    pub fn coefficient(&self, item: usize) -> T {
        self.coefficients
            .iter()
            .find(|&&(d, _)| d == item)
            .map_or(T::zero(), |&(_, c)| c)
    }
}

/// Linear form of `F|_D` for column `color` of `y`, with all coordinates
/// outside `restrict` fixed. Each dual set may meet `restrict` at most once.
///
/// A set `S` with `S ∩ D = {d}` contributes `(1 − P_S) + P_S·x_d`, where
/// `P_S = Π_{j∈S∖{d}} (1 − Y_{jℓ})`; sets disjoint from `D` are constant.
pub fn restricted_form<T: Scalar>(
    func: &CoverageFunction,
    y: &FractionalColoring<T>,
    color: usize,
    restrict: &[usize],
) -> Result<RestrictedLinearForm<T>, ColoringError> {
    let mut slot = vec![usize::MAX; y.n()];
    for (pos, &d) in restrict.iter().enumerate() {
        slot[d] = pos;
    }
    let mut constant = T::zero();
    let mut coefs = vec![T::zero(); restrict.len()];
    for (si, s) in func.sets().iter().enumerate() {
        let mut hit: Option<usize> = None;
        let mut miss = T::one();
        for &j in s {
            if slot[j] != usize::MAX {
                if let Some(prev) = hit {
                    return Err(ColoringError::NotIndependent {
                        set: si,
                        first: prev,
                        second: j,
                    });
                }
                hit = Some(j);
            } else {
                miss = miss * (T::one() - y.get(j, color));
            }
        }
        constant = constant + (T::one() - miss);
        if let Some(d) = hit {
            coefs[slot[d]] = coefs[slot[d]] + miss;
        }
    }
    Ok(RestrictedLinearForm {
        constant,
        coefficients: restrict.iter().copied().zip(coefs).collect(),
    })
}

/// Does every dual set of `func` meet `restrict` at most once?
pub fn is_independent(func: &CoverageFunction, n: usize, restrict: &[usize]) -> bool {
    let mut mark = vec![false; n];
    for &d in restrict {
        mark[d] = true;
    }
    func.sets()
        .iter()
        .all(|s| s.iter().filter(|&&j| mark[j]).count() <= 1)
}
