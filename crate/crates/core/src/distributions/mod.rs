//! Nonnegative loss distributions and integration against `dF`.

pub mod quadrature;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use quadrature::{Integral, QuadratureSpec};

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability atom at loss `x` with mass `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub p: f64,
}

/// An absolutely continuous law on `[0, upper]` given by callables.
#[derive(Clone)]
pub struct TruncatedContinuous {
    cdf: RealFn,
    density: RealFn,
    upper: f64,
}

impl fmt::Debug for TruncatedContinuous {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedContinuous").field("upper", &self.upper).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum DistributionKind {
    Exponential { rate: f64 },
    Empirical { atoms: Vec<Atom> },
    TruncatedContinuous(TruncatedContinuous),
}

/// The loss `X ≥ 0`. Immutable once built.
#[derive(Debug, Clone)]
pub struct LossDistribution {
    kind: DistributionKind,
}

impl LossDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidDistribution(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(Self {
            kind: DistributionKind::Exponential { rate },
        })
    }

    /// Atoms must have strictly increasing nonnegative locations and
    /// positive masses summing to one.
    pub fn empirical(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empirical distribution needs at least one atom".into()));
        }
        let mut total = 0.0;
        for (i, &(x, p)) in atoms.iter().enumerate() {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidDistribution(format!("atom {i}: location {x} must be finite and >= 0")));
            }
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidDistribution(format!("atom {i}: mass {p} must be positive")));
            }
            if i > 0 && x <= atoms[i - 1].0 {
                return Err(Error::InvalidDistribution(format!("atom {i}: locations must be strictly increasing")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("atom masses sum to {total}, expected 1")));
        }
        Ok(Self {
            kind: DistributionKind::Empirical {
                atoms: atoms.iter().map(|&(x, p)| Atom { x, p }).collect(),
            },
        })
    }

    pub fn truncated_continuous(
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        upper: f64,
    ) -> Result<Self> {
        if !(upper.is_finite() && upper > 0.0) {
            return Err(Error::InvalidDistribution(format!("support bound must be finite and positive, got {upper}")));
        }
        let at_zero = cdf(0.0);
        let at_upper = cdf(upper);
        if at_zero.abs() > 1e-12 || (at_upper - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "cdf(0) = {at_zero}, cdf(upper) = {at_upper}; expected 0 and 1"
            )));
        }
        Ok(Self {
            kind: DistributionKind::TruncatedContinuous(TruncatedContinuous {
                cdf: Arc::new(cdf),
                density: Arc::new(density),
                upper,
            }),
        })
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.kind {
            DistributionKind::Empirical { atoms } => Some(atoms),
            _ => None,
        }
    }

    pub fn support_upper(&self) -> f64 {
        match &self.kind {
            DistributionKind::Exponential { .. } => f64::INFINITY,
            DistributionKind::Empirical { atoms } => atoms.last().map_or(0.0, |a| a.x),
            DistributionKind::TruncatedContinuous(t) => t.upper,
        }
    }

    /// Right end of the range used for curves and grid checks: the
    /// `1 - 1e-6` quantile for unbounded families, the support bound otherwise.
    pub fn display_upper(&self) -> f64 {
        match &self.kind {
            DistributionKind::Exponential { rate } => 1e6f64.ln() / rate,
            _ => self.support_upper(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match &self.kind {
            DistributionKind::Exponential { rate } => -(-rate * x).exp_m1(),
            DistributionKind::Empirical { atoms } => {
                let mut acc = quadrature::CompensatedSum::default();
                for a in atoms.iter().take_while(|a| a.x <= x) {
                    acc.add(a.p);
                }
                acc.total().min(1.0)
            }
            DistributionKind::TruncatedContinuous(t) => {
                if x >= t.upper {
                    1.0
                } else {
                    (t.cdf)(x).clamp(0.0, 1.0)
                }
            }
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        match &self.kind {
            DistributionKind::Exponential { rate } => (-rate * x.max(0.0)).exp(),
            _ => 1.0 - self.cdf(x),
        }
    }

    /// `E[e^{γX}]`, the upper end of the admissible interval for `M`.
    pub fn exp_moment(&self, gamma: f64) -> Result<f64> {
        match &self.kind {
            DistributionKind::Exponential { rate } => {
                if gamma >= *rate {
                    Err(Error::DivergentMoment(format!(
                        "E[exp({gamma} X)] is infinite for an exponential loss with rate {rate}"
                    )))
                } else {
                    Ok(rate / (rate - gamma))
                }
            }
            DistributionKind::Empirical { atoms } => {
                let mut acc = quadrature::CompensatedSum::default();
                for a in atoms {
                    acc.add(a.p * (gamma * a.x).exp());
                }
                let v = acc.total();
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::DivergentMoment(format!("E[exp({gamma} X)] overflows")))
                }
            }
            DistributionKind::TruncatedContinuous(_) => self
                .integrate_df(&|x| (gamma * x).exp(), 0.0, f64::INFINITY, &[], &QuadratureSpec::default())
                .map(|r| r.value)
                .map_err(|e| Error::DivergentMoment(e.to_string())),
        }
    }

    /// `∫ f(x) dF(x)` over `[lower, upper]`; `upper` may be infinite.
    ///
    /// Atoms are counted on `(lower, upper]`, except that `lower == 0`
    /// includes an atom at zero, so adjacent ranges add up exactly.
    /// Points in `breakpoints` where `f` has kinks become panel edges.
    pub fn integrate_df(
        &self,
        f: &dyn Fn(f64) -> f64,
        lower: f64,
        upper: f64,
        breakpoints: &[f64],
        spec: &QuadratureSpec,
    ) -> Result<Integral> {
        if lower < 0.0 || upper.is_nan() || upper < lower {
            return Err(Error::QuadratureBudgetExceeded {
                lower,
                upper,
                reason: "expected 0 <= lower <= upper".into(),
            });
        }
        match &self.kind {
            DistributionKind::Exponential { rate } => {
                let rate = *rate;
                let weighted = move |x: f64| {
                    let v = f(x);
                    if v == 0.0 {
                        0.0
                    } else {
                        v * rate * (-rate * x).exp()
                    }
                };
                if upper.is_infinite() {
                    quadrature::integrate_semi_infinite(&weighted, lower, 4.0 / rate, breakpoints, spec)
                } else {
                    quadrature::integrate_finite(&weighted, lower, upper, breakpoints, spec)
                }
            }
            DistributionKind::Empirical { atoms } => {
                let mut acc = quadrature::CompensatedSum::default();
                for a in atoms {
                    let inside_left = a.x > lower || (lower == 0.0 && a.x == 0.0);
                    if inside_left && a.x <= upper {
                        acc.add(a.p * f(a.x));
                    }
                }
                let v = acc.total();
                if v.is_finite() {
                    Ok(Integral::exact(v))
                } else {
                    Err(Error::QuadratureBudgetExceeded {
                        lower,
                        upper,
                        reason: "integrand is not finite at an atom".into(),
                    })
                }
            }
            DistributionKind::TruncatedContinuous(t) => {
                let hi = upper.min(t.upper);
                let density = t.density.clone();
                let weighted = move |x: f64| f(x) * density(x);
                quadrature::integrate_finite(&weighted, lower.min(hi), hi, breakpoints, spec)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.kind {
            DistributionKind::Exponential { rate } => 1.0 / rate,
            _ => self
                .integrate_df(&|x| x, 0.0, f64::INFINITY, &[], &QuadratureSpec::default())
                .map(|r| r.value)
                .unwrap_or(f64::NAN),
        }
    }
}

/// JSON form used by scenario configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Exponential { lambda: f64 },
    Empirical { atoms: Vec<(f64, f64)> },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<LossDistribution> {
        match self {
            DistributionSpec::Exponential { lambda } => LossDistribution::exponential(*lambda),
            DistributionSpec::Empirical { atoms } => LossDistribution::empirical(atoms),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn exp1() -> LossDistribution {
        LossDistribution::exponential(1.0).unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(exp1().cdf(0.0), 0.0);
        assert_abs_diff_eq!(exp1().cdf(2f64.ln()), 0.5, epsilon = 1e-15);
        let emp = LossDistribution::empirical(&[(1.0, 0.3), (2.0, 0.7)]).unwrap();
        assert_abs_diff_eq!(emp.cdf(1.5), 0.3, epsilon = 1e-15);
        assert_eq!(emp.cdf(0.99), 0.0);
        assert_abs_diff_eq!(emp.cdf(2.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn exp_moment_examples() {
        assert_abs_diff_eq!(exp1().exp_moment(0.5).unwrap(), 2.0, epsilon = 1e-15);
        assert!(matches!(exp1().exp_moment(2.0), Err(Error::DivergentMoment(_))));
        assert!(matches!(exp1().exp_moment(1.0), Err(Error::DivergentMoment(_))));
        let emp = LossDistribution::empirical(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(emp.exp_moment(1.0).unwrap(), (1.0 + e) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn integrate_examples() {
        let spec = QuadratureSpec::default();
        let d = exp1();
        let total = d.integrate_df(&|_| 1.0, 0.0, f64::INFINITY, &[], &spec).unwrap();
        assert_abs_diff_eq!(total.value, 1.0, epsilon = 1e-12);
        let m = d.integrate_df(&|x| (0.5 * x).exp(), 0.0, f64::INFINITY, &[], &spec).unwrap();
        assert_abs_diff_eq!(m.value, 2.0, epsilon = 1e-10);
        // ∫_0^{ln 2} e^{2x} e^{-x} dx = e^{ln 2} - 1
        let part = d.integrate_df(&|x| (2.0 * x).exp(), 0.0, 2f64.ln(), &[], &spec).unwrap();
        assert_abs_diff_eq!(part.value, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn empirical_integration_is_exact_and_half_open() {
        let spec = QuadratureSpec::default();
        let d = LossDistribution::empirical(&[(0.0, 0.25), (1.0, 0.25), (2.0, 0.5)]).unwrap();
        let all = d.integrate_df(&|x| x + 1.0, 0.0, f64::INFINITY, &[], &spec).unwrap();
        assert_eq!(all.value, 0.25 + 0.5 + 1.5);
        let a = d.integrate_df(&|x| x + 1.0, 0.0, 1.0, &[], &spec).unwrap();
        let b = d.integrate_df(&|x| x + 1.0, 1.0, f64::INFINITY, &[], &spec).unwrap();
        assert_eq!(a.value + b.value, all.value);
        assert_eq!(all.error, 0.0);
    }

    #[test]
    fn empirical_validation() {
        assert!(LossDistribution::empirical(&[]).is_err());
        assert!(LossDistribution::empirical(&[(1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(LossDistribution::empirical(&[(2.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(LossDistribution::empirical(&[(-1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(LossDistribution::empirical(&[(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(LossDistribution::empirical(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
        assert!(LossDistribution::exponential(0.0).is_err());
        assert!(LossDistribution::exponential(f64::NAN).is_err());
    }

    #[test]
    fn truncated_uniform() {
        let d = LossDistribution::truncated_continuous(|x| x / 2.0, |_| 0.5, 2.0).unwrap();
        let spec = QuadratureSpec::default();
        let total = d.integrate_df(&|_| 1.0, 0.0, f64::INFINITY, &[], &spec).unwrap();
        assert_abs_diff_eq!(total.value, 1.0, epsilon = 1e-13);
        // (e^2 - 1) / 2
        assert_abs_diff_eq!(d.exp_moment(1.0).unwrap(), (2f64.exp() - 1.0) / 2.0, epsilon = 1e-12);
        assert_eq!(d.cdf(5.0), 1.0);
        assert!(LossDistribution::truncated_continuous(|x| x / 3.0, |_| 1.0 / 3.0, 2.0).is_err());
    }

    #[test]
    fn config_forms_parse() {
        let e: DistributionSpec = serde_json::from_str(r#"{"family":"exponential","lambda":1.0}"#).unwrap();
        assert_eq!(e, DistributionSpec::Exponential { lambda: 1.0 });
        let a: DistributionSpec = serde_json::from_str(r#"{"family":"empirical","atoms":[[1.0,0.3],[2.0,0.7]]}"#).unwrap();
        assert!(a.build().is_ok());
        assert!(serde_json::from_str::<DistributionSpec>(r#"{"family":"exponential","lambda":1.0,"mu":2}"#).is_err());
        assert!(serde_json::from_str::<DistributionSpec>(r#"{"family":"pareto","alpha":2}"#).is_err());
    }
}
