//! Convex premium functions `g` and the premium functional `π(I) = E[g(I(X))]`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::{LossDistribution, QuadratureSpec};
use crate::error::{Error, Result};
use crate::indemnity::Indemnity;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A user-supplied convex premium function.
#[derive(Clone)]
pub struct CustomConvex {
    value: RealFn,
    right_derivative: RealFn,
    kinks: Vec<f64>,
}

impl fmt::Debug for CustomConvex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomConvex").field("kinks", &self.kinks).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum PremiumFunction {
    /// `g(x) = (1 + θ) x`
    ExpectedValue { theta: f64 },
    /// `g(x) = x + α x²`
    Quadratic { alpha: f64 },
    /// `g(x) = x + Σ θ_i (x - δ_i)_+`
    StopLoss { loadings: Vec<f64>, thresholds: Vec<f64> },
    Custom(CustomConvex),
}

impl PremiumFunction {
    pub fn expected_value(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidPremium(format!("loading theta must be positive, got {theta}")));
        }
        Ok(Self::ExpectedValue { theta })
    }

    pub fn quadratic(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidPremium(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self::Quadratic { alpha })
    }

    pub fn stop_loss(loadings: Vec<f64>, thresholds: Vec<f64>) -> Result<Self> {
        if loadings.is_empty() || loadings.len() != thresholds.len() {
            return Err(Error::InvalidPremium(format!(
                "need matching nonempty loadings and thresholds, got {} and {}",
                loadings.len(),
                thresholds.len()
            )));
        }
        if loadings.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidPremium("stop-loss loadings must be positive".into()));
        }
        let mut prev = 0.0;
        for &d in &thresholds {
            if !(d.is_finite() && d > prev) {
                return Err(Error::InvalidPremium(
                    "stop-loss thresholds must be positive and strictly increasing".into(),
                ));
            }
            prev = d;
        }
        Ok(Self::StopLoss { loadings, thresholds })
    }

    /// `right_derivative` must return `g'(y⁺)`; the left derivative at a
    /// declared kink is taken as the limit from below.
    pub fn custom(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mut kinks: Vec<f64>,
    ) -> Self {
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        Self::Custom(CustomConvex {
            value: Arc::new(value),
            right_derivative: Arc::new(right_derivative),
            kinks,
        })
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::ExpectedValue { .. } => "expected_value",
            Self::Quadratic { .. } => "quadratic",
            Self::StopLoss { .. } => "stop_loss",
            Self::Custom(_) => "custom",
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        match self {
            Self::ExpectedValue { theta } => (1.0 + theta) * y,
            Self::Quadratic { alpha } => y + alpha * y * y,
            Self::StopLoss { loadings, thresholds } => {
                y + loadings
                    .iter()
                    .zip(thresholds)
                    .map(|(t, d)| t * (y - d).max(0.0))
                    .sum::<f64>()
            }
            Self::Custom(c) => (c.value)(y),
        }
    }

    pub fn derivative(&self, y: f64, side: Side) -> f64 {
        match self {
            Self::ExpectedValue { theta } => 1.0 + theta,
            Self::Quadratic { alpha } => 1.0 + 2.0 * alpha * y,
            Self::StopLoss { loadings, thresholds } => {
                1.0 + loadings
                    .iter()
                    .zip(thresholds)
                    .filter(|(_, d)| match side {
                        Side::Right => y >= **d,
                        Side::Left => y > **d,
                    })
                    .map(|(t, _)| t)
                    .sum::<f64>()
            }
            Self::Custom(c) => {
                let at_kink = c.kinks.contains(&y);
                if side == Side::Left && at_kink && y > 0.0 {
                    let h = 1e-9 * y.max(1.0);
                    (c.right_derivative)((y - h).max(0.0))
                } else {
                    (c.right_derivative)(y)
                }
            }
        }
    }

    pub fn right_derivative(&self, y: f64) -> f64 {
        self.derivative(y, Side::Right)
    }

    pub fn left_derivative(&self, y: f64) -> f64 {
        self.derivative(y, Side::Left)
    }

    /// Sorted points where `g'` jumps.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::ExpectedValue { .. } | Self::Quadratic { .. } => Vec::new(),
            Self::StopLoss { thresholds, .. } => thresholds.clone(),
            Self::Custom(c) => c.kinks.clone(),
        }
    }

    /// Non-differentiable premium functions fall outside the smooth premium
    /// set; the solver still handles them through one-sided derivatives.
    pub fn is_extended_family(&self) -> bool {
        !self.kinks().is_empty()
    }

    /// Grid check of the premium-set conditions: `g(0) = 0`, `g(x) ≥ x`,
    /// convexity, `g'(0⁺) ≥ 1` and `g ≢ x`.
    pub fn validate(&self, grid_max: f64, grid_points: usize) -> ValidationReport {
        let n = grid_points.max(3);
        let grid: Vec<f64> = (0..n).map(|k| grid_max * k as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&y| self.value(y)).collect();
        let slopes: Vec<f64> = grid.iter().map(|&y| self.right_derivative(y)).collect();
        let tol = 1e-12;
        let mut checks = Vec::new();

        let g0 = self.value(0.0);
        checks.push(ValidationCheck::new("g(0) = 0", g0.abs() <= tol, format!("g(0) = {g0}")));

        let below = grid.iter().zip(&values).find(|(y, v)| **v < **y - tol * y.max(1.0));
        checks.push(ValidationCheck::new(
            "g(x) >= x",
            below.is_none(),
            below.map_or_else(|| "holds on grid".into(), |(y, v)| format!("g({y}) = {v} < {y}")),
        ));

        let slope_drop = slopes.windows(2).position(|w| w[1] < w[0] - tol * w[0].abs().max(1.0));
        let chord_violation = values.windows(3).position(|w| w[0] - 2.0 * w[1] + w[2] < -tol * w[1].abs().max(1.0));
        checks.push(ValidationCheck::new(
            "convex",
            slope_drop.is_none() && chord_violation.is_none(),
            match (slope_drop, chord_violation) {
                (Some(i), _) => format!("right derivative decreases after grid point {}", grid[i]),
                (None, Some(i)) => format!("negative second difference at {}", grid[i + 1]),
                (None, None) => "holds on grid".into(),
            },
        ));

        let d0 = self.right_derivative(0.0);
        checks.push(ValidationCheck::new("g'(0+) >= 1", d0 >= 1.0 - tol, format!("g'(0+) = {d0}")));

        let loaded = grid.iter().zip(&values).any(|(y, v)| *v > *y + tol * y.max(1.0));
        checks.push(ValidationCheck::new(
            "g not identically x",
            loaded,
            if loaded { "g(x) > x somewhere on grid".into() } else { "g(x) = x on the whole grid".into() },
        ));

        ValidationReport {
            family: self.family().to_string(),
            grid_max,
            grid_points: n,
            extended_family: self.is_extended_family(),
            checks,
        }
    }

    /// `π(I) = E[g(I(X))]`.
    pub fn premium(&self, indemnity: &dyn Indemnity, dist: &LossDistribution, spec: &QuadratureSpec) -> Result<f64> {
        let breakpoints = indemnity.breakpoints();
        let r = dist.integrate_df(
            &|x| {
                let y = indemnity.eval(x);
                if y == 0.0 {
                    0.0
                } else {
                    self.value(y)
                }
            },
            0.0,
            f64::INFINITY,
            &breakpoints,
            spec,
        )?;
        Ok(r.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl ValidationCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub family: String,
    pub grid_max: f64,
    pub grid_points: usize,
    /// Set for premium functions with kinks.
    pub extended_family: bool,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// JSON form used by scenario configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PremiumSpec {
    ExpectedValue { theta: f64 },
    Quadratic { alpha: f64 },
    StopLoss { loadings: Vec<f64>, thresholds: Vec<f64> },
}

impl PremiumSpec {
    pub fn build(&self) -> Result<PremiumFunction> {
        match self {
            PremiumSpec::ExpectedValue { theta } => PremiumFunction::expected_value(*theta),
            PremiumSpec::Quadratic { alpha } => PremiumFunction::quadratic(*alpha),
            PremiumSpec::StopLoss { loadings, thresholds } => {
                PremiumFunction::stop_loss(loadings.clone(), thresholds.clone())
            }
        }
    }
}
