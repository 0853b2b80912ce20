//! Vertex solutions and expectation-preserving rounding for box-constrained
//! equality systems `{x ∈ [0,1]^v : Ax = b}`.
//!
//! Both operations walk through the polytope from a feasible start. While
//! the columns of `A` on the strictly fractional coordinates are linearly
//! dependent there is a direction `λ ≠ 0` with `Aλ = 0` supported on those
//! coordinates. Moving along `±λ` to the first bound keeps `Ax = b` and makes
//! at least one more coordinate integral, so at most `v` steps are needed.
//! The randomized walk picks `+δ⁺λ` with probability `δ⁻/(δ⁺ + δ⁻)` and
//! `−δ⁻λ` otherwise, which makes every step a martingale increment.

use rand::Rng;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("matrix has {got} entries, expected {rows}×{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("vector has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("start point is infeasible (residual {residual:e}, worst bound violation {bound:e})")]
    InfeasibleStart { residual: f64, bound: f64 },
    #[error(
        "numerical failure after {step} steps: residual {residual:e} exceeds {tolerance:e} \
         (largest |A| entry {scale:e}, pivot threshold {pivot:e})"
    )]
    Numerical {
        step: usize,
        residual: f64,
        tolerance: f64,
        scale: f64,
        pivot: f64,
    },
}

/// Dense `A` (row-major) and right-hand side `b`; variables live in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T> {
    rows: usize,
    cols: usize,
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(rows: usize, cols: usize, a: Vec<T>, b: Vec<T>) -> Result<Self, LpError> {
        if a.len() != rows * cols {
            return Err(LpError::Shape {
                rows,
                cols,
                got: a.len(),
            });
        }
        if b.len() != rows {
            return Err(LpError::Length {
                expected: rows,
                got: b.len(),
            });
        }
        Ok(Self { rows, cols, a, b })
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>, b: Vec<T>) -> Result<Self, LpError> {
        let r = rows.len();
        let mut a = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LpError::Length {
                    expected: cols,
                    got: row.len(),
                });
            }
            a.extend(row);
        }
        Self::new(r, cols, a, b)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> T {
        self.a[row * self.cols + col]
    }

    pub fn rhs(&self) -> &[T] {
        &self.b
    }

    /// `‖Ax − b‖_∞`.
    pub fn residual(&self, x: &[T]) -> T {
        (0..self.rows)
            .map(|i| {
                let row = &self.a[i * self.cols..(i + 1) * self.cols];
                let ax = row
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&aij, &xj)| acc + aij * xj);
                (ax - self.b[i]).abs()
            })
            .fold(T::zero(), T::max)
    }

    fn scale(&self) -> T {
        self.a.iter().fold(T::one(), |m, v| m.max(v.abs()))
    }

    /// A kernel vector of `A` supported on `support`, or `None` when those
    /// columns are linearly independent.
    ///
    /// Columns are eliminated left to right with row pivoting; the first
    /// column without an acceptable pivot is free and yields the returned
    /// kernel basis vector (`λ_free = 1`).
    pub fn kernel_direction(&self, support: &[usize]) -> Option<Vec<T>> {
        let tol = T::pivot_tol() * self.scale();
        // Columns past position rank+1 never matter: one of the first
        // rows+1 columns is always free when any is.
        let width = support.len().min(self.rows + 1);
        let cols = &support[..width];
        let r = self.rows;
        let mut m: Vec<T> = Vec::with_capacity(r * width);
        for i in 0..r {
            for &c in cols {
                m.push(self.entry(i, c));
            }
        }
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, local column)
        let mut next_row = 0;
        for lc in 0..width {
            let best = (next_row..r).map(|i| (i, m[i * width + lc].abs())).fold(
                None,
                |acc: Option<(usize, T)>, (i, v)| match acc {
                    Some((_, bv)) if bv >= v => acc,
                    _ => Some((i, v)),
                },
            );
            match best {
                Some((pr, pv)) if pv > tol => {
                    if pr != next_row {
                        for c in 0..width {
                            m.swap(pr * width + c, next_row * width + c);
                        }
                    }
                    let p = next_row;
                    let inv = T::one() / m[p * width + lc];
                    for c in 0..width {
                        m[p * width + c] = m[p * width + c] * inv;
                    }
                    for i in 0..r {
                        if i == p {
                            continue;
                        }
                        let f = m[i * width + lc];
                        if f != T::zero() {
                            for c in 0..width {
                                m[i * width + c] = m[i * width + c] - f * m[p * width + c];
                            }
                        }
                    }
                    pivots.push((p, lc));
                    next_row += 1;
                }
                _ => {
                    let mut lambda = vec![T::zero(); self.cols];
                    lambda[cols[lc]] = T::one();
                    for &(pr, pc) in &pivots {
                        lambda[cols[pc]] = -m[pr * width + lc];
                    }
                    return Some(lambda);
                }
            }
        }
        None
    }
}

/// Strictly fractional coordinates of `x`.
pub fn fractional_support<T: Scalar>(x: &[T]) -> Vec<usize> {
    let tol = T::integral_tol();
    (0..x.len())
        .filter(|&i| x[i] > tol && x[i] < T::one() - tol)
        .collect()
}

/// Largest `δ ≥ 0` with `x + δ·dir ∈ [0,1]^v`, and the coordinates that
/// reach their bound at that step.
fn step_to_bound<T: Scalar>(x: &[T], dir: &[T], sign: T) -> (T, Vec<usize>) {
    let mut best = T::infinity();
    let mut hit = Vec::new();
    for (i, (&xi, &di)) in x.iter().zip(dir).enumerate() {
        let d = di * sign;
        let room = if d > T::zero() {
            (T::one() - xi) / d
        } else if d < T::zero() {
            xi / -d
        } else {
            continue;
        };
        if best.is_infinite() {
            best = room;
            hit.push(i);
            continue;
        }
        let close = T::lit(1e-12) * best.max(T::one());
        if room < best - close {
            best = room;
            hit.clear();
            hit.push(i);
        } else if (room - best).abs() <= close {
            hit.push(i);
        }
    }
    (best.max(T::zero()), hit)
}

fn apply_step<T: Scalar>(x: &mut [T], dir: &[T], delta: T, sign: T, hit: &[usize]) {
    for (xi, &di) in x.iter_mut().zip(dir) {
        *xi = *xi + sign * delta * di;
    }
    for &i in hit {
        x[i] = if sign * dir[i] > T::zero() {
            T::one()
        } else {
            T::zero()
        };
    }
}

fn check_start<T: Scalar>(sys: &LinearSystem<T>, x0: &[T]) -> Result<(), LpError> {
    if x0.len() != sys.cols {
        return Err(LpError::Length {
            expected: sys.cols,
            got: x0.len(),
        });
    }
    let bound = x0
        .iter()
        .map(|&v| (-v).max(v - T::one()).max(T::zero()))
        .fold(T::zero(), T::max);
    let residual = sys.residual(x0);
    if residual > T::residual_tol() || bound > T::residual_tol() {
        return Err(LpError::InfeasibleStart {
            residual: residual.as_f64(),
            bound: bound.as_f64(),
        });
    }
    Ok(())
}

fn walk<T, F, H>(
    sys: &LinearSystem<T>,
    x0: &[T],
    mut choose_sign: F,
    mut hook: H,
) -> Result<Vec<T>, LpError>
where
    T: Scalar,
    F: FnMut(T, T) -> bool,
    H: FnMut(&[T]),
{
    check_start(sys, x0)?;
    let mut x = x0.to_vec();
    let mut step = 0;
    loop {
        let support = fractional_support(&x);
        let Some(dir) = sys.kernel_direction(&support) else {
            return Ok(x);
        };
        let (up, up_hit) = step_to_bound(&x, &dir, T::one());
        let (down, down_hit) = step_to_bound(&x, &dir, -T::one());
        if choose_sign(up, down) {
            apply_step(&mut x, &dir, up, T::one(), &up_hit);
        } else {
            apply_step(&mut x, &dir, down, -T::one(), &down_hit);
        }
        step += 1;
        let residual = sys.residual(&x);
        if residual > T::residual_tol() || step > sys.cols + 1 {
            return Err(LpError::Numerical {
                step,
                residual: residual.as_f64(),
                tolerance: T::residual_tol().as_f64(),
                scale: sys.scale().as_f64(),
                pivot: T::pivot_tol().as_f64(),
            });
        }
        hook(&x);
    }
}

/// A basic feasible solution reached from `x0` by always stepping along
/// `+λ`: the fractional coordinates of the result index linearly
/// independent columns of `A`.
pub fn vertex_solution<T: Scalar>(sys: &LinearSystem<T>, x0: &[T]) -> Result<Vec<T>, LpError> {
    walk(sys, x0, |_, _| true, |_| {})
}

/// Random `X` with `E[X] = x0`, `AX = b`, and a fractional support of
/// linearly independent columns (hence at most `rows` fractional entries).
pub fn round_in_expectation<T: Scalar, R: Rng + ?Sized>(
    sys: &LinearSystem<T>,
    x0: &[T],
    rng: &mut R,
) -> Result<Vec<T>, LpError> {
    round_in_expectation_observed(sys, x0, rng, |_| {})
}

/// [`round_in_expectation`] with `hook` called on the iterate after every
/// step.
pub fn round_in_expectation_observed<T, R, H>(
    sys: &LinearSystem<T>,
    x0: &[T],
    rng: &mut R,
    hook: H,
) -> Result<Vec<T>, LpError>
where
    T: Scalar,
    R: Rng + ?Sized,
    H: FnMut(&[T]),
{
    walk(
        sys,
        x0,
        |up, down| {
            let p_up = (down / (up + down)).as_f64();
            rng.gen::<f64>() < p_up
        },
        hook,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn segment() -> LinearSystem<f64> {
        LinearSystem::from_rows(2, vec![vec![1.0, 1.0]], vec![1.0]).unwrap()
    }

    #[test]
    fn segment_vertex() {
        let x = vertex_solution(&segment(), &[0.5, 0.5]).unwrap();
        assert!(x == vec![1.0, 0.0] || x == vec![0.0, 1.0]);
    }

    #[test]
    fn vertex_is_fixpoint() {
        let x = vertex_solution(&segment(), &[1.0, 0.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = round_in_expectation(&segment(), &[0.0, 1.0], &mut rng).unwrap();
        assert_eq!(x, vec![0.0, 1.0]);
    }

    #[test]
    fn segment_sampling_is_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let mut ones = 0;
        for _ in 0..n {
            let x = round_in_expectation(&segment(), &[0.5, 0.5], &mut rng).unwrap();
            assert!(x == vec![1.0, 0.0] || x == vec![0.0, 1.0]);
            if x[0] == 1.0 {
                ones += 1;
            }
        }
        let freq = ones as f64 / n as f64;
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn infeasible_start_rejected() {
        assert!(matches!(
            vertex_solution(&segment(), &[0.5, 0.4]),
            Err(LpError::InfeasibleStart { .. })
        ));
        assert!(matches!(
            vertex_solution(&segment(), &[1.5, -0.5]),
            Err(LpError::InfeasibleStart { .. })
        ));
        assert!(matches!(
            vertex_solution(&segment(), &[0.5]),
            Err(LpError::Length { .. })
        ));
    }

    #[test]
    fn kernel_direction_is_first_free_column() {
        // columns: c0 = (1,0), c1 = (0,1), c2 = c0 + c1
        let sys = LinearSystem::from_rows(
            3,
            vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let lambda = sys.kernel_direction(&[0, 1, 2]).unwrap();
        assert_eq!(lambda, vec![-1.0, -1.0, 1.0]);
        assert!(sys.kernel_direction(&[0, 1]).is_none());
    }

    #[test]
    fn works_in_single_precision() {
        let sys = LinearSystem::<f32>::from_rows(3, vec![vec![1.0, 1.0, 1.0]], vec![1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = round_in_expectation(&sys, &[0.25, 0.25, 0.5], &mut rng).unwrap();
        assert!(fractional_support(&x).len() <= 1);
        assert!(sys.residual(&x) <= f32::residual_tol());
    }
}
