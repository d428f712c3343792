//! Optimal insurance indemnities for an exponential-utility buyer facing a
//! convex premium functional `π(I) = E[g(I(X))]`.
//!
//! The optimal contract is pinned down by a single scalar
//! `M = E[e^{γ(X - Î(X))}]`; [`solver::fixed_point_solve`] finds it by
//! monotone fixed-point iteration and returns an evaluable
//! [`solver::IndemnitySchedule`]. The [`oracles`] module carries
//! independent closed forms and a brute-force search used to check it.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distributions;
pub mod error;
pub mod indemnity;
pub mod premium;
pub mod oracles;
pub mod solver;

pub use distributions::{LossDistribution, QuadratureSpec};
pub use error::{Error, Result};
pub use indemnity::{FnIndemnity, Indemnity};
pub use premium::PremiumFunction;
pub use solver::{fixed_point_solve, IndemnitySchedule, SolverConfig, SolverTrace};
