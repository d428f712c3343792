//! Independent reference implementations used to check the solver:
//! closed forms for an exponential loss, an exhaustive discrete search and
//! a variational perturbation audit.

mod brute_force;
mod closed_form;
mod lambert;
mod perturbation;

pub use brute_force::{brute_force_discrete, discrete_objective, BruteForceResult, SearchSpace, MAX_ATOMS, SEARCH_CAP};
pub use closed_form::{oracle_deductible, oracle_multilayer, oracle_quadratic, Branch, ClosedFormFamily, ClosedFormSolution};
pub use lambert::{lambert_w, lambert_w_exp};
pub use perturbation::{perturbation_gap, perturbation_test, Baseline, Bump, PerturbationReport, PerturbationTrial};
