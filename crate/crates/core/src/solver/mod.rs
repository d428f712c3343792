//! First-order-condition machinery and the fixed-point iteration for `M`.
//!
//! For a given `m ≥ 1` the candidate indemnity is zero up to the threshold
//! `d = ln(m g'(0⁺)) / γ` and, beyond it, the unique root `y ∈ (0, x)` of
//! `κ(y) = e^{γ(x-y)} - m g'(y)`. The map
//! `h(m) = E[e^{γ(X - I_m(X))}]` is increasing with a unique fixed point
//! `M*`, reached monotonically from either end of the admissible interval.

mod objective;
mod schedule;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

pub use objective::{objective, ObjectiveReport};
pub use schedule::{check_comonotone, check_comonotone_points, ComonotoneReport, CurvePoint, FocResidual, IndemnitySchedule, Violation};

use crate::distributions::{Integral, LossDistribution, QuadratureSpec};
use crate::error::{Error, Result};
use crate::premium::PremiumFunction;

/// Starting point of the iteration inside `[1, E[e^{γX}]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "M0Repr", into = "M0Repr")]
pub enum M0Strategy {
    LowerEndpoint,
    UpperEndpoint,
    Custom(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum M0Repr {
    Named(String),
    Value(f64),
}

impl TryFrom<M0Repr> for M0Strategy {
    type Error = String;

    fn try_from(r: M0Repr) -> std::result::Result<Self, String> {
        match r {
            M0Repr::Named(s) => s.parse(),
            M0Repr::Value(v) => Ok(M0Strategy::Custom(v)),
        }
    }
}

impl From<M0Strategy> for M0Repr {
    fn from(s: M0Strategy) -> Self {
        match s {
            M0Strategy::LowerEndpoint => M0Repr::Named("lower".into()),
            M0Strategy::UpperEndpoint => M0Repr::Named("upper".into()),
            M0Strategy::Custom(v) => M0Repr::Value(v),
        }
    }
}

impl std::str::FromStr for M0Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lower" => Ok(M0Strategy::LowerEndpoint),
            "upper" => Ok(M0Strategy::UpperEndpoint),
            other => other
                .parse::<f64>()
                .map(M0Strategy::Custom)
                .map_err(|_| format!("expected `lower`, `upper` or a number, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Absolute risk aversion.
    pub gamma: f64,
    /// Stop once `|M_n - M_{n-1}|` falls to this level.
    #[serde(default = "defaults::m_tolerance")]
    pub m_tolerance: f64,
    #[serde(default = "defaults::max_iterations")]
    pub max_iterations: usize,
    /// Absolute bracket width on `y` for the bisection on `κ`.
    #[serde(default = "defaults::root_tolerance")]
    pub root_tolerance: f64,
    #[serde(default = "defaults::m0")]
    pub m0: M0Strategy,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

mod defaults {
    use super::M0Strategy;

    pub fn m_tolerance() -> f64 {
        1e-8
    }
    pub fn max_iterations() -> usize {
        500
    }
    pub fn root_tolerance() -> f64 {
        1e-12
    }
    pub fn m0() -> M0Strategy {
        M0Strategy::LowerEndpoint
    }
}

impl SolverConfig {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            m_tolerance: defaults::m_tolerance(),
            max_iterations: defaults::max_iterations(),
            root_tolerance: defaults::root_tolerance(),
            m0: defaults::m0(),
            quadrature: QuadratureSpec::default(),
        }
    }

    pub fn with_m0(mut self, m0: M0Strategy) -> Self {
        self.m0 = m0;
        self
    }

    pub fn with_tolerance(mut self, m_tolerance: f64) -> Self {
        self.m_tolerance = m_tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.m_tolerance > 0.0 && self.root_tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if let M0Strategy::Custom(v) = self.m0 {
            if !(v.is_finite() && v >= 1.0) {
                return Err(Error::InvalidConfig(format!("custom M0 must be >= 1, got {v}")));
            }
        }
        self.quadrature.validate()
    }
}

/// `d = ln(m g'(0⁺)) / γ`; requires `m g'(0⁺) > 1`.
pub fn deductible_from_m(m: f64, gamma: f64, g: &PremiumFunction) -> Result<f64> {
    let product = m * g.right_derivative(0.0);
    if !(product > 1.0) {
        return Err(Error::DegeneratePremium(product));
    }
    Ok(product.ln() / gamma)
}

/// Like [`deductible_from_m`] but admits the boundary `m g'(0⁺) = 1`
/// (threshold zero), which the iteration meets at `M_0 = 1` when
/// `g'(0⁺) = 1`.
pub(crate) fn threshold(m: f64, gamma: f64, g: &PremiumFunction) -> Result<f64> {
    let product = m * g.right_derivative(0.0);
    if !(product >= 1.0) {
        return Err(Error::DegeneratePremium(product));
    }
    Ok(product.ln() / gamma)
}

/// `κ(y) = e^{γ(x-y)} - m g'(y⁺)`.
pub fn kappa(x: f64, y: f64, m: f64, gamma: f64, g: &PremiumFunction) -> f64 {
    (gamma * (x - y)).exp() - m * g.right_derivative(y)
}

/// Where the optimal payment at a given loss sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootLocation {
    /// At or below the threshold.
    Zero,
    /// Pinned at a kink of `g'` whose subdifferential brackets `e^{γ(x-y)}`.
    Kink(f64),
    /// Interior root inside a bracket where `κ(lo) > 0 ≥ κ(hi)`.
    Interior { lo: f64, hi: f64 },
    /// `κ` does not change sign on `(0, x)`; only possible when `m g'(x⁻) = 1`.
    Full(f64),
}

impl RootLocation {
    pub fn value(&self) -> f64 {
        match *self {
            RootLocation::Zero => 0.0,
            RootLocation::Kink(y) | RootLocation::Full(y) => y,
            RootLocation::Interior { lo, hi } => 0.5 * (lo + hi),
        }
    }
}

/// Locates the zero of `κ` on `(0, x)` by bisection on its log form
/// `γ(x-y) - ln(m g'(y⁺))`, which has the same sign and stays finite for
/// large losses. Kink points are checked first so plateaus come out exact.
pub fn indemnity_root(
    x: f64,
    m: f64,
    gamma: f64,
    deductible: f64,
    root_tolerance: f64,
    g: &PremiumFunction,
) -> Result<RootLocation> {
    if x <= deductible {
        return Ok(RootLocation::Zero);
    }
    let log_m = m.ln();
    for k in g.kinks() {
        if k <= 0.0 || k >= x {
            continue;
        }
        let lhs = gamma * (x - k);
        let lo = log_m + g.left_derivative(k).ln();
        let hi = log_m + g.right_derivative(k).ln();
        if lo <= lhs && lhs <= hi {
            return Ok(RootLocation::Kink(k));
        }
    }
    let phi = |y: f64| gamma * (x - y) - (log_m + g.right_derivative(y).ln());
    if !(phi(0.0) > 0.0) {
        return Err(Error::BracketFailure {
            x,
            reason: format!("kappa(0+) <= 0 although x exceeds the threshold {deductible}"),
        });
    }
    if phi(x) >= 0.0 {
        return Ok(RootLocation::Full(x));
    }
    let (mut lo, mut hi) = (0.0, x);
    while hi - lo > root_tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // a bracket straddling a kink means the root is the kink itself
    if let Some(k) = g.kinks().into_iter().find(|k| lo <= *k && *k <= hi) {
        return Ok(RootLocation::Kink(k));
    }
    Ok(RootLocation::Interior { lo, hi })
}

/// The candidate indemnity induced by `m`, evaluated at `x`.
pub fn indemnity_at(x: f64, m: f64, cfg: &SolverConfig, g: &PremiumFunction) -> Result<f64> {
    let d = threshold(m, cfg.gamma, g)?;
    indemnity_root(x, m, cfg.gamma, d, cfg.root_tolerance, g).map(|r| r.value())
}

/// Loss levels where the candidate indemnity for `m` changes slope:
/// the threshold and both ends of every kink plateau.
pub fn image_kinks(m: f64, gamma: f64, g: &PremiumFunction) -> Vec<f64> {
    let mut out = Vec::new();
    if let Ok(d) = threshold(m, gamma, g) {
        out.push(d);
    }
    for k in g.kinks() {
        out.push(k + (m * g.left_derivative(k)).ln() / gamma);
        out.push(k + (m * g.right_derivative(k)).ln() / gamma);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `h(m)` together with its quadrature error bound.
pub fn h_map_integral(m: f64, dist: &LossDistribution, g: &PremiumFunction, cfg: &SolverConfig) -> Result<Integral> {
    let gamma = cfg.gamma;
    let d = threshold(m, gamma, g)?;
    let below = dist.integrate_df(&|x| (gamma * x).exp(), 0.0, d, &[], &cfg.quadrature)?;

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |x: f64| match indemnity_root(x, m, gamma, d, cfg.root_tolerance, g) {
        Ok(r) => (gamma * (x - r.value())).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let above = dist.integrate_df(&integrand, d, f64::INFINITY, &image_kinks(m, gamma, g), &cfg.quadrature);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(below + above?)
}

/// `h(m) = ∫_0^d e^{γx} dF + ∫_d^∞ e^{γ(x - I_m(x))} dF`.
pub fn h_map(m: f64, dist: &LossDistribution, g: &PremiumFunction, cfg: &SolverConfig) -> Result<f64> {
    h_map_integral(m, dist, g, cfg).map(|r| r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: usize,
    /// `M_n`
    pub m: f64,
    /// `d_n`, computed from `M_{n-1}`
    pub deductible: f64,
    /// `|M_n - M_{n-1}|`
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub m0: f64,
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    pub direction: Direction,
    /// `|h(M_final) - M_final|`, filled in after convergence.
    pub fixed_point_residual: Option<f64>,
    /// Largest quadrature error bound reported by any `h` evaluation.
    pub quadrature_error: f64,
    /// `E[e^{γX}]` when finite.
    pub exp_moment: Option<f64>,
    /// `E[g'(X)]`, computed when `E[e^{γX}]` diverges; it bounds the
    /// post-indemnity moment in that regime.
    pub derivative_moment: Option<f64>,
    pub extended_family: bool,
}

impl SolverTrace {
    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.m0).chain(self.iterations.iter().map(|r| r.m))
    }

    /// Whether every step moved strictly in the recorded direction.
    pub fn is_strictly_monotone(&self) -> bool {
        let ms: Vec<f64> = self.m_values().collect();
        match self.direction {
            Direction::Increasing => ms.windows(2).all(|w| w[1] > w[0]),
            Direction::Decreasing => ms.windows(2).all(|w| w[1] < w[0]),
            Direction::Stationary => true,
        }
    }

    pub fn final_m(&self) -> f64 {
        self.iterations.last().map_or(self.m0, |r| r.m)
    }
}

/// Resolves the starting value from the strategy and the admissible interval.
pub fn initial_m(strategy: M0Strategy, upper: Option<f64>) -> Result<f64> {
    match strategy {
        M0Strategy::LowerEndpoint => Ok(1.0),
        M0Strategy::UpperEndpoint => upper.ok_or_else(|| {
            Error::DivergentMoment("E[exp(gamma X)] is infinite, so the upper endpoint does not exist; start from the lower endpoint (m0 = \"lower\") instead".into())
        }),
        M0Strategy::Custom(v) => {
            if !(v >= 1.0) {
                return Err(Error::InvalidConfig(format!("custom M0 = {v} lies below 1")));
            }
            if let Some(u) = upper {
                if v > u {
                    return Err(Error::InvalidConfig(format!("custom M0 = {v} exceeds E[exp(gamma X)] = {u}")));
                }
            }
            Ok(v)
        }
    }
}

/// Iterates `M_n = h(M_{n-1})` until `|M_n - M_{n-1}| ≤ m_tolerance`.
pub fn fixed_point_solve(
    dist: &LossDistribution,
    g: &PremiumFunction,
    cfg: &SolverConfig,
) -> Result<(IndemnitySchedule, SolverTrace)> {
    cfg.validate()?;
    let validation = g.validate(dist.display_upper().max(1.0) * 2.0, 1000);
    if !validation.passed() {
        let failed: Vec<String> = validation.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(Error::InvalidPremium(failed.join("; ")));
    }

    let (exp_moment, derivative_moment) = match dist.exp_moment(cfg.gamma) {
        Ok(v) => (Some(v), None),
        Err(Error::DivergentMoment(_)) => {
            // x - I(x) = d + ln g'(I(x)) / γ beyond the threshold, so the
            // post-indemnity moment is finite when E[g'(X)] is.
            let r = dist
                .integrate_df(&|x| g.right_derivative(x), 0.0, f64::INFINITY, &g.kinks(), &cfg.quadrature)
                .map_err(|e| Error::DivergentMoment(format!("E[exp(gamma X)] and E[g'(X)] both fail: {e}")))?;
            (None, Some(r.value))
        }
        Err(e) => return Err(e),
    };
    let m0 = initial_m(cfg.m0, exp_moment)?;

    let mut trace = SolverTrace {
        m0,
        iterations: Vec::new(),
        converged: false,
        direction: Direction::Stationary,
        fixed_point_residual: None,
        quadrature_error: 0.0,
        exp_moment,
        derivative_moment,
        extended_family: validation.extended_family,
    };

    let mut prev = m0;
    for n in 1..=cfg.max_iterations {
        let d = threshold(prev, cfg.gamma, g)?;
        let next = h_map_integral(prev, dist, g, cfg)?;
        trace.quadrature_error = trace.quadrature_error.max(next.error);
        let step = (next.value - prev).abs();
        if n == 1 {
            trace.direction = if step <= cfg.m_tolerance {
                Direction::Stationary
            } else if next.value > prev {
                Direction::Increasing
            } else {
                Direction::Decreasing
            };
        }
        trace.iterations.push(IterationRecord {
            n,
            m: next.value,
            deductible: d,
            step,
        });
        prev = next.value;
        if step <= cfg.m_tolerance {
            trace.converged = true;
            break;
        }
    }
    if !trace.converged {
        return Err(Error::NoConvergence(Box::new(trace)));
    }

    let m_star = prev;
    let residual = h_map_integral(m_star, dist, g, cfg)?;
    trace.fixed_point_residual = Some((residual.value - m_star).abs());
    trace.quadrature_error = trace.quadrature_error.max(residual.error);

    let schedule = IndemnitySchedule::new(m_star, cfg.gamma, g.clone(), cfg.root_tolerance)?;
    Ok((schedule, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ev() -> PremiumFunction {
        PremiumFunction::expected_value(1.0 / 3.0).unwrap()
    }

    fn layered() -> PremiumFunction {
        PremiumFunction::stop_loss(vec![0.1, 0.2], vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn deductible_examples() {
        assert_abs_diff_eq!(deductible_from_m(3.0, 2.0, &ev()).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(deductible_from_m(1.2288, 0.5, &layered()).unwrap(), 2.0 * 1.2288f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(deductible_from_m(1.2288, 0.5, &layered()).unwrap(), 0.4121, epsilon = 1e-4);
        let q = PremiumFunction::quadratic(1.0).unwrap();
        assert!(matches!(deductible_from_m(1.0, 1.0, &q), Err(Error::DegeneratePremium(_))));
        assert_eq!(threshold(1.0, 1.0, &q).unwrap(), 0.0);
    }

    #[test]
    fn kappa_signs_and_root() {
        let g = ev();
        assert_abs_diff_eq!(kappa(1.0, 0.0, 3.0, 2.0, &g), 2f64.exp() - 4.0, epsilon = 1e-14);
        assert!(kappa(1.0, 1e-12, 3.0, 2.0, &g) > 0.0);
        assert_abs_diff_eq!(kappa(1.0, 1.0, 3.0, 2.0, &g), -3.0, epsilon = 1e-14);
        // linear g: the root is x - ln(m (1 + θ)) / γ
        let y = 1.0 - (3.0f64 * 4.0 / 3.0).ln() / 2.0;
        assert_abs_diff_eq!(kappa(1.0, y, 3.0, 2.0, &g), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn kappa_is_decreasing() {
        let g = PremiumFunction::quadratic(0.5).unwrap();
        let ys: Vec<f64> = (1..100).map(|k| k as f64 * 0.03).collect();
        let ks: Vec<f64> = ys.iter().map(|&y| kappa(3.0, y, 2.0, 1.5, &g)).collect();
        assert!(ks.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn indemnity_examples() {
        let cfg = SolverConfig::new(2.0);
        let y = indemnity_at(2.0, 3.0, &cfg, &ev()).unwrap();
        assert_abs_diff_eq!(y, 2.0 - 2f64.ln(), epsilon = 1e-12);
        let d = deductible_from_m(3.0, 2.0, &ev()).unwrap();
        assert_eq!(indemnity_at(d, 3.0, &cfg, &ev()).unwrap(), 0.0);

        // plateau at δ_1 = 1 for x in (1 + d, 1 + d + 2 ln 1.1]
        let cfg = SolverConfig::new(0.5);
        let m: f64 = 1.2288;
        let d = 2.0 * m.ln();
        assert_eq!(indemnity_at(1.5, m, &cfg, &layered()).unwrap(), 1.0);
        assert_eq!(indemnity_at(1.0 + d + 2.0 * 1.1f64.ln() - 1e-9, m, &cfg, &layered()).unwrap(), 1.0);
        let y = indemnity_at(1.0 + d - 0.1, m, &cfg, &layered()).unwrap();
        assert_abs_diff_eq!(y, 0.9, epsilon = 1e-11);
    }

    #[test]
    fn bisection_bracket_has_opposite_signs() {
        let g = PremiumFunction::quadratic(0.5).unwrap();
        let d = deductible_from_m(5.0, 2.0, &g).unwrap();
        for x in [d + 0.01, d + 1.0, d + 10.0] {
            match indemnity_root(x, 5.0, 2.0, d, 1e-12, &g).unwrap() {
                RootLocation::Interior { lo, hi } => {
                    assert!(hi - lo <= 1e-12);
                    assert!(kappa(x, lo, 5.0, 2.0, &g) > 0.0);
                    assert!(kappa(x, hi, 5.0, 2.0, &g) <= 0.0);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn h_fixed_point_example_one() {
        let dist = LossDistribution::exponential(1.0).unwrap();
        let cfg = SolverConfig::new(2.0);
        // beyond the threshold x - I(x) = d, so h(m) = 2 e^d - 1 with e^{2d} = 4m/3
        assert_abs_diff_eq!(h_map(3.0, &dist, &ev(), &cfg).unwrap(), 3.0, epsilon = 1e-10);
        let m = 1.7;
        let expected = 2.0 * (4.0 * m / 3.0f64).sqrt() - 1.0;
        assert_abs_diff_eq!(h_map(m, &dist, &ev(), &cfg).unwrap(), expected, epsilon = 1e-10);
    }

    #[test]
    fn h_at_one_exceeds_one() {
        let dist = LossDistribution::exponential(1.0).unwrap();
        for g in [ev(), PremiumFunction::quadratic(0.5).unwrap(), layered()] {
            let cfg = SolverConfig::new(0.5);
            assert!(h_map(1.0, &dist, &g, &cfg).unwrap() > 1.0);
        }
    }

    #[test]
    fn m0_strategies() {
        assert_eq!(initial_m(M0Strategy::LowerEndpoint, None).unwrap(), 1.0);
        assert!(matches!(initial_m(M0Strategy::UpperEndpoint, None), Err(Error::DivergentMoment(_))));
        assert_eq!(initial_m(M0Strategy::UpperEndpoint, Some(2.0)).unwrap(), 2.0);
        assert!(initial_m(M0Strategy::Custom(0.5), None).is_err());
        assert!(initial_m(M0Strategy::Custom(3.0), Some(2.0)).is_err());
        assert_eq!("upper".parse::<M0Strategy>().unwrap(), M0Strategy::UpperEndpoint);
        assert_eq!("1.5".parse::<M0Strategy>().unwrap(), M0Strategy::Custom(1.5));
        assert!("middle".parse::<M0Strategy>().is_err());
    }

    #[test]
    fn config_json_defaults_and_m0_forms() {
        let c: SolverConfig = serde_json::from_str(r#"{"gamma":2.0}"#).unwrap();
        assert_eq!(c, SolverConfig::new(2.0));
        let c: SolverConfig = serde_json::from_str(r#"{"gamma":2.0,"m0":1.5}"#).unwrap();
        assert_eq!(c.m0, M0Strategy::Custom(1.5));
        let c: SolverConfig = serde_json::from_str(r#"{"gamma":2.0,"m0":"upper"}"#).unwrap();
        assert_eq!(c.m0, M0Strategy::UpperEndpoint);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"gamma":2.0,"m0":"mid"}"#).is_err());
        assert!(serde_json::from_str::<SolverConfig>(r#"{"gamma":2.0,"delta":1}"#).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let dist = LossDistribution::exponential(1.0).unwrap();
        let bad = SolverConfig::new(-1.0);
        assert!(matches!(fixed_point_solve(&dist, &ev(), &bad), Err(Error::InvalidConfig(_))));
        let identity = PremiumFunction::custom(|x| x, |_| 1.0, vec![]);
        assert!(matches!(
            fixed_point_solve(&dist, &identity, &SolverConfig::new(0.5)),
            Err(Error::InvalidPremium(_))
        ));
    }

    #[test]
    fn upper_endpoint_requires_finite_moment() {
        let dist = LossDistribution::exponential(1.0).unwrap();
        let cfg = SolverConfig::new(2.0).with_m0(M0Strategy::UpperEndpoint);
        assert!(matches!(fixed_point_solve(&dist, &ev(), &cfg), Err(Error::DivergentMoment(_))));
    }

    #[test]
    fn iteration_budget_reports_trace() {
        let dist = LossDistribution::exponential(1.0).unwrap();
        let mut cfg = SolverConfig::new(2.0);
        cfg.max_iterations = 3;
        match fixed_point_solve(&dist, &ev(), &cfg) {
            Err(Error::NoConvergence(trace)) => {
                assert_eq!(trace.iterations.len(), 3);
                assert!(!trace.converged);
                assert!(trace.is_strictly_monotone());
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
