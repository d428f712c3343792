//! Iteration counts and limits at a stopping tolerance of `1e-6`.

mod common;

use approx::assert_abs_diff_eq;
use common::{example_one, example_three, example_two};
use indemnity::fixed_point_solve;

fn run(case: common::Case) -> (usize, f64) {
    let cfg = case.cfg.with_tolerance(1e-6);
    let (schedule, trace) = fixed_point_solve(&case.dist, &case.g, &cfg).unwrap();
    assert!(trace.converged);
    (trace.iterations.len(), schedule.m_star())
}

#[test]
fn expected_value_premium_takes_37_steps() {
    let (n, m) = run(example_one());
    assert_eq!(n, 37);
    assert_abs_diff_eq!(m, 3.0, epsilon = 1e-5);
}

#[test]
fn quadratic_premium_takes_31_steps() {
    let (n, m) = run(example_two());
    assert_eq!(n, 31);
    assert_abs_diff_eq!(m, 5.4214, epsilon = 1e-4);
}

#[test]
fn stop_loss_premium_takes_27_steps() {
    let (n, m) = run(example_three());
    assert_eq!(n, 27);
    assert_abs_diff_eq!(m, 1.2288, epsilon = 1e-4);
}
