use indemnity::{LossDistribution, QuadratureSpec};
use proptest::prelude::*;

fn empirical(raw: &[(f64, f64)]) -> LossDistribution {
    let mut xs: Vec<f64> = raw.iter().map(|r| r.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let total: f64 = raw.iter().take(xs.len()).map(|r| r.1).sum();
    let atoms: Vec<(f64, f64)> = xs.iter().zip(raw).map(|(&x, r)| (x, r.1 / total)).collect();
    let sum: f64 = atoms.iter().map(|a| a.1).sum();
    let mut atoms = atoms;
    let last = atoms.len() - 1;
    atoms[last].1 += 1.0 - sum;
    LossDistribution::empirical(&atoms).unwrap()
}

fn truncated(upper: f64) -> LossDistribution {
    // uniform on [0, upper]
    LossDistribution::truncated_continuous(move |x| (x / upper).clamp(0.0, 1.0), move |_| 1.0 / upper, upper).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_mass_is_one(rate in 0.1f64..5.0, raw in prop::collection::vec((0.0f64..10.0, 0.05f64..1.0), 1..8), upper in 0.5f64..20.0) {
        let spec = QuadratureSpec::default();
        for dist in [LossDistribution::exponential(rate).unwrap(), empirical(&raw), truncated(upper)] {
            let v = dist.integrate_df(&|_| 1.0, 0.0, f64::INFINITY, &[], &spec).unwrap().value;
            prop_assert!((v - 1.0).abs() <= 1e-10, "{v}");
        }
    }

    #[test]
    fn ranges_add_up(rate in 0.1f64..5.0, a in 0.0f64..3.0, w1 in 0.0f64..3.0, w2 in 0.0f64..3.0, k in 0.0f64..0.9, kink in 0.0f64..6.0) {
        let spec = QuadratureSpec::default();
        let dist = LossDistribution::exponential(rate).unwrap();
        // kinks of the integrand are passed as breakpoints, as the solver does
        let f = |x: f64| (k * rate * x).exp() * (1.0 + 0.5 * (3.0 * x).sin()) + (x - kink).max(0.0);
        let (b, c) = (a + w1, a + w1 + w2);
        let left = dist.integrate_df(&f, a, b, &[kink], &spec).unwrap().value;
        let right = dist.integrate_df(&f, b, c, &[kink], &spec).unwrap().value;
        let whole = dist.integrate_df(&f, a, c, &[b, kink], &spec).unwrap().value;
        prop_assert!((left + right - whole).abs() <= 1e-10);
        let tail = dist.integrate_df(&f, c, f64::INFINITY, &[kink], &spec).unwrap().value;
        let all = dist.integrate_df(&f, a, f64::INFINITY, &[b, c, kink], &spec).unwrap().value;
        prop_assert!((left + right + tail - all).abs() <= 1e-10 * all.max(1.0));
    }

    #[test]
    fn empirical_ranges_add_up(raw in prop::collection::vec((0.0f64..10.0, 0.05f64..1.0), 1..8), cut in 0.0f64..10.0) {
        let spec = QuadratureSpec::default();
        let dist = empirical(&raw);
        let f = |x: f64| 1.0 + x * x;
        let left = dist.integrate_df(&f, 0.0, cut, &[], &spec).unwrap().value;
        let right = dist.integrate_df(&f, cut, f64::INFINITY, &[], &spec).unwrap().value;
        let whole = dist.integrate_df(&f, 0.0, f64::INFINITY, &[], &spec).unwrap().value;
        prop_assert!((left + right - whole).abs() <= 1e-10 * whole);
    }

    #[test]
    fn exponential_moment_closed_form(rate in 0.1f64..5.0, frac in 0.01f64..0.95) {
        let gamma = frac * rate;
        let dist = LossDistribution::exponential(rate).unwrap();
        let closed = dist.exp_moment(gamma).unwrap();
        prop_assert!((closed - rate / (rate - gamma)).abs() <= 1e-10);
        let numeric = dist.integrate_df(&|x| (gamma * x).exp(), 0.0, f64::INFINITY, &[], &QuadratureSpec::default()).unwrap().value;
        prop_assert!((numeric - closed).abs() <= 1e-10 * closed.max(1.0));
    }

    #[test]
    fn refining_panels_stays_within_error_bound(rate in 0.2f64..4.0, k in 0.0f64..0.8, kink in 0.1f64..4.0, freq in 0.5f64..6.0) {
        let dist = LossDistribution::exponential(rate).unwrap();
        let f = |x: f64| (k * rate * x).exp() * (1.0 + 0.5 * (freq * x).cos()) + (x - kink).max(0.0);
        let coarse = QuadratureSpec::default();
        let fine = QuadratureSpec { panel_count: 2 * coarse.panel_count, ..coarse };
        let a = dist.integrate_df(&f, 0.0, f64::INFINITY, &[kink], &coarse).unwrap();
        let b = dist.integrate_df(&f, 0.0, f64::INFINITY, &[kink], &fine).unwrap();
        let bound = a.error.max(b.error) + 4.0 * f64::EPSILON * a.value.abs();
        prop_assert!((a.value - b.value).abs() <= bound, "{} vs {} (bound {bound})", a.value, b.value);
    }
}
