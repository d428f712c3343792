mod common;

use indemnity::solver::{check_comonotone, h_map, kappa, objective, Direction, M0Strategy, RootLocation, SolverTrace};
use indemnity::{fixed_point_solve, LossDistribution, PremiumFunction, SolverConfig};
use proptest::prelude::*;

fn arb_premium() -> impl Strategy<Value = PremiumFunction> {
    prop_oneof![
        (0.05f64..1.0).prop_map(|t| PremiumFunction::expected_value(t).unwrap()),
        (0.1f64..1.0).prop_map(|a| PremiumFunction::quadratic(a).unwrap()),
        prop::collection::vec((0.05f64..0.5, 0.2f64..1.5), 1..4).prop_map(|layers| {
            let mut at = 0.0;
            let (loadings, thresholds) = layers
                .into_iter()
                .map(|(t, gap)| {
                    at += gap;
                    (t, at)
                })
                .unzip();
            PremiumFunction::stop_loss(loadings, thresholds).unwrap()
        }),
    ]
}

/// Ratio of the last two steps, the empirical contraction factor.
fn contraction(t: &SolverTrace) -> f64 {
    let n = t.iterations.len();
    if n < 2 {
        return 0.0;
    }
    t.iterations[n - 1].step / t.iterations[n - 2].step
}

/// Geometric estimate of the distance from the last iterate to M*.
fn remaining(t: &SolverTrace) -> f64 {
    let q = contraction(t);
    t.iterations.last().map_or(0.0, |r| r.step) * q / (1.0 - q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn h_is_increasing(rate in 0.5f64..2.0, frac in 0.1f64..0.8, g in arb_premium(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let gamma = frac * rate;
        let dist = LossDistribution::exponential(rate).unwrap();
        let cfg = SolverConfig::new(gamma);
        let upper = rate / (rate - gamma);
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        let (m1, m2) = (1.0 + a * (upper - 1.0), 1.0 + b * (upper - 1.0));
        prop_assert!(h_map(m1, &dist, &g, &cfg).unwrap() <= h_map(m2, &dist, &g, &cfg).unwrap() + 1e-12);
        // the map sends the admissible interval into itself
        prop_assert!(h_map(upper, &dist, &g, &cfg).unwrap() <= upper + 1e-9);
        prop_assert!(h_map(1.0, &dist, &g, &cfg).unwrap() >= 1.0);
    }

    #[test]
    fn iteration_is_monotone_from_both_ends(rate in 0.5f64..2.0, frac in 0.1f64..0.8, g in arb_premium()) {
        let gamma = frac * rate;
        let dist = LossDistribution::exponential(rate).unwrap();
        let cfg = SolverConfig::new(gamma);
        let (low, tl) = fixed_point_solve(&dist, &g, &cfg).unwrap();
        let (high, th) = fixed_point_solve(&dist, &g, &cfg.with_m0(M0Strategy::UpperEndpoint)).unwrap();
        prop_assert!(tl.is_strictly_monotone() && tl.direction == Direction::Increasing);
        prop_assert!(th.is_strictly_monotone() && th.direction == Direction::Decreasing);
        prop_assert!(tl.m_values().all(|m| m <= low.m_star() + 1e-12));
        prop_assert!(th.m_values().all(|m| m >= high.m_star() - 1e-12));
        // the two runs bracket M*
        prop_assert!(low.m_star() <= high.m_star() + 1e-12);
        // A final step of δ leaves δ q / (1 - q) to go, so the literal 10δ
        // agreement needs q ≤ 0.8; slower contractions get the tail bound.
        let (rl, rh) = (remaining(&tl), remaining(&th));
        let gap = high.m_star() - low.m_star();
        if contraction(&tl).max(contraction(&th)) <= 0.8 {
            prop_assert!(gap <= 10.0 * cfg.m_tolerance, "gap {gap:e}");
        }
        prop_assert!(gap <= 1.5 * (rl + rh) + 1e-12, "gap {gap:e}, tail estimate {:e}", rl + rh);
        let res = tl.fixed_point_residual.unwrap();
        prop_assert!(res <= cfg.m_tolerance + tl.quadrature_error + 1e-12, "{res}");
    }

    #[test]
    fn schedule_properties(rate in 0.5f64..2.0, frac in 0.1f64..2.0, g in arb_premium()) {
        let gamma = frac * rate;
        let dist = LossDistribution::exponential(rate).unwrap();
        let cfg = SolverConfig::new(gamma);
        let (s, _) = fixed_point_solve(&dist, &g, &cfg).unwrap();
        let grid = s.curve_grid(dist.display_upper(), 2000);
        let r = check_comonotone(&s, &grid, Some(s.deductible()), &g.kinks());
        prop_assert!(r.ok, "{:?}", r.first_violation);
        for &x in grid.iter().filter(|&&x| x > 0.0) {
            let y = s.try_eval(x).unwrap();
            prop_assert!(y < x, "full cover at x = {x}");
            match s.root(x).unwrap() {
                RootLocation::Interior { lo, hi } => {
                    // strict on the log form the bisection uses, up to
                    // rounding on κ itself
                    let log_form = |y: f64| gamma * (x - y) - (s.m_star().ln() + g.right_derivative(y).ln());
                    prop_assert!(log_form(lo) > 0.0 && log_form(hi) <= 0.0);
                    let scale = 1e-12 * s.m_star() * g.right_derivative(hi);
                    prop_assert!(kappa(x, lo, s.m_star(), gamma, &g) > -scale);
                    prop_assert!(kappa(x, hi, s.m_star(), gamma, &g) < scale);
                }
                RootLocation::Full(_) => prop_assert!(false, "full cover at x = {x}"),
                _ => {}
            }
            prop_assert!(s.foc_residual(x).unwrap().magnitude() <= 1e-8 * s.m_star().max(1.0));
        }
        // E[exp(γ(X - Î(X)))] recomputed from the schedule reproduces M*
        let m = objective(&s, &dist, &g, &cfg).unwrap().post_indemnity_moment;
        prop_assert!((m - s.m_star()).abs() <= 10.0 * cfg.m_tolerance, "{m} vs {}", s.m_star());
    }
}
