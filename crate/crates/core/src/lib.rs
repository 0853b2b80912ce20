//! Low-discrepancy `k`-colorings for `t`-sparse families of coverage
//! functions.
//!
//! A coverage function is given by its dual sets: `f(T) = Σ_S min{|S ∩ T|, 1}`.
//! The family is `t`-sparse when no item lies in more than `t` sets overall.
//! Three solvers are provided:
//!
//! * [`solve_small_sets`] for families whose sets have at most `s` items,
//! * [`solve_big_sets`] for families whose sets are all large enough to be
//!   made rainbow, giving discrepancy zero,
//! * [`solve_all_sets`] for everything else.
//!
//! The numeric core is generic over [`Scalar`] (`f64` or `f32`).

pub mod all_sets;
pub mod big_sets;
pub mod coloring;
mod dependency;
pub mod files;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod small_sets;

pub use all_sets::{solve_all_sets, AllSetsError};
pub use big_sets::{is_rainbow, lll_threshold, solve_big_sets, BigSetsError};
pub use coloring::{
    discrepancy, eval_F, eval_f, frac_discrepancy, restricted_form, ColoringError, Discrepancy,
    IntegralColoring,
};
pub use files::{read_coloring, write_coloring, write_fractional, ColoringFile};
pub use instance::{
    read_instance, sparsity, write_instance, CoverageFunction, CoverageInstance, InstanceError,
    ThresholdSet,
};
pub use lp::{round_in_expectation, vertex_solution, LpError};
pub use oracle::{eval_F_enumeration, min_discrepancy_exhaustive, OracleError};
pub use report::{Algorithm, Solution, SolveReport};
pub use scalar::Scalar;
pub use small_sets::{solve_small_sets, SmallSetsConfig, SmallSetsError};

pub type FractionalColoring<T = f64> = coloring::FractionalColoring<T>;
pub type FractionalColoringF64 = coloring::FractionalColoring<f64>;
pub type FractionalColoringF32 = coloring::FractionalColoring<f32>;
pub type LinearSystemF64 = lp::LinearSystem<f64>;
pub type LinearSystemF32 = lp::LinearSystem<f32>;
pub type RestrictedLinearFormF64 = coloring::RestrictedLinearForm<f64>;
pub type RestrictedLinearFormF32 = coloring::RestrictedLinearForm<f32>;
