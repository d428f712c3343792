use serde::{Deserialize, Serialize};

use super::{deductible_from_m, image_kinks, indemnity_root, kappa, RootLocation};
use crate::error::Result;
use crate::indemnity::Indemnity;
use crate::premium::PremiumFunction;

/// The optimal indemnity pinned down by a converged `M*`.
#[derive(Debug, Clone)]
pub struct IndemnitySchedule {
    m_star: f64,
    deductible: f64,
    gamma: f64,
    premium_fn: PremiumFunction,
    root_tolerance: f64,
    cache: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub indemnity: f64,
    pub retained: f64,
}

/// First-order condition at one loss level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FocResidual {
    /// `x ≤ d`; requires `e^{γx} ≤ M g'(0⁺)`, `slack` is the excess.
    BelowDeductible { slack: f64 },
    /// `κ(Î(x))` at a smooth point of `g`.
    Smooth(f64),
    /// At a kink `y`: distance of `e^{γ(x-y)}` outside
    /// `M [g'(y⁻), g'(y⁺)]` (zero when inside).
    Kink { outside: f64 },
}

impl FocResidual {
    pub fn magnitude(&self) -> f64 {
        match *self {
            FocResidual::BelowDeductible { slack } => slack.max(0.0),
            FocResidual::Smooth(k) => k.abs(),
            FocResidual::Kink { outside } => outside,
        }
    }
}

impl IndemnitySchedule {
    pub fn new(m_star: f64, gamma: f64, premium_fn: PremiumFunction, root_tolerance: f64) -> Result<Self> {
        let deductible = deductible_from_m(m_star, gamma, &premium_fn)?;
        Ok(Self {
            m_star,
            deductible,
            gamma,
            premium_fn,
            root_tolerance,
            cache: None,
        })
    }

    pub fn m_star(&self) -> f64 {
        self.m_star
    }

    pub fn deductible(&self) -> f64 {
        self.deductible
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn premium_fn(&self) -> &PremiumFunction {
        &self.premium_fn
    }

    pub fn root(&self, x: f64) -> Result<RootLocation> {
        indemnity_root(x, self.m_star, self.gamma, self.deductible, self.root_tolerance, &self.premium_fn)
    }

    pub fn try_eval(&self, x: f64) -> Result<f64> {
        self.root(x).map(|r| r.value())
    }

    /// Loss levels bounding the plateaus at kinks of `g'`.
    pub fn image_kinks(&self) -> Vec<f64> {
        image_kinks(self.m_star, self.gamma, &self.premium_fn)
            .into_iter()
            .filter(|x| *x > self.deductible)
            .collect()
    }

    /// Hybrid grid on `[0, x_max]`: half uniform, half geometric towards
    /// zero, plus the threshold and every plateau edge.
    pub fn curve_grid(&self, x_max: f64, points: usize) -> Vec<f64> {
        let half = (points / 2).max(2);
        let mut grid: Vec<f64> = (0..half).map(|k| x_max * k as f64 / (half - 1) as f64).collect();
        let geometric = points.saturating_sub(half).max(2);
        let lo = (x_max * 1e-4).ln();
        let hi = x_max.ln();
        grid.extend((0..geometric).map(|k| (lo + (hi - lo) * k as f64 / (geometric - 1) as f64).exp()));
        grid.push(self.deductible);
        grid.extend(self.image_kinks());
        grid.retain(|x| *x >= 0.0 && *x <= x_max);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    pub fn with_cache(mut self, grid: &[f64]) -> Result<Self> {
        let pairs = grid.iter().map(|&x| self.try_eval(x).map(|y| (x, y))).collect::<Result<Vec<_>>>()?;
        self.cache = Some(pairs);
        Ok(self)
    }

    pub fn cache(&self) -> Option<&[(f64, f64)]> {
        self.cache.as_deref()
    }

    pub fn curve(&self, grid: &[f64]) -> Result<Vec<CurvePoint>> {
        grid.iter()
            .map(|&x| {
                let indemnity = match &self.cache {
                    Some(c) => match c.binary_search_by(|(cx, _)| cx.total_cmp(&x)) {
                        Ok(i) => c[i].1,
                        Err(_) => self.try_eval(x)?,
                    },
                    None => self.try_eval(x)?,
                };
                Ok(CurvePoint {
                    x,
                    indemnity,
                    retained: x - indemnity,
                })
            })
            .collect()
    }

    pub fn foc_residual(&self, x: f64) -> Result<FocResidual> {
        let g = &self.premium_fn;
        let m = self.m_star;
        Ok(match self.root(x)? {
            RootLocation::Zero => FocResidual::BelowDeductible {
                slack: (self.gamma * x).exp() - m * g.right_derivative(0.0),
            },
            RootLocation::Kink(y) => {
                let e = (self.gamma * (x - y)).exp();
                let lo = m * g.left_derivative(y);
                let hi = m * g.right_derivative(y);
                FocResidual::Kink {
                    outside: (lo - e).max(e - hi).max(0.0),
                }
            }
            r => FocResidual::Smooth(kappa(x, r.value(), m, self.gamma, g)),
        })
    }
}

impl Indemnity for IndemnitySchedule {
    fn eval(&self, x: f64) -> f64 {
        self.try_eval(x).unwrap_or(f64::NAN)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![self.deductible];
        b.extend(self.image_kinks());
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Decreasing,
    SteeperThanLoss,
    NotStrictBeyondDeductible,
    OutOfBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub x_left: f64,
    pub x_right: f64,
    pub i_left: f64,
    pub i_right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComonotoneReport {
    pub ok: bool,
    pub first_violation: Option<Violation>,
}

const SLACK: f64 = 1e-9;

/// Checks `0 ≤ I(x') - I(x) ≤ x' - x` on adjacent points of a sorted grid.
/// With `deductible = Some(d)` also requires strict increase on pairs with
/// `x' > d`, except on flat stretches at one of the `plateaus` levels.
pub fn check_comonotone_points(points: &[(f64, f64)], deductible: Option<f64>, plateaus: &[f64]) -> ComonotoneReport {
    let on_plateau = |y: f64| plateaus.iter().any(|p| (y - p).abs() <= 1e-12);
    for (i, &(x, y)) in points.iter().enumerate() {
        if !(y >= -SLACK && y <= x + SLACK) {
            return ComonotoneReport {
                ok: false,
                first_violation: Some(Violation {
                    kind: ViolationKind::OutOfBounds,
                    x_left: x,
                    x_right: x,
                    i_left: y,
                    i_right: y,
                }),
            };
        }
        if i == 0 {
            continue;
        }
        let (x0, y0) = points[i - 1];
        let dy = y - y0;
        let kind = if dy < -SLACK {
            Some(ViolationKind::Decreasing)
        } else if dy > (x - x0) + SLACK {
            Some(ViolationKind::SteeperThanLoss)
        } else if deductible.is_some_and(|d| x > d && x > x0) && dy <= 0.0 && !(on_plateau(y) && on_plateau(y0)) {
            Some(ViolationKind::NotStrictBeyondDeductible)
        } else {
            None
        };
        if let Some(kind) = kind {
            return ComonotoneReport {
                ok: false,
                first_violation: Some(Violation {
                    kind,
                    x_left: x0,
                    x_right: x,
                    i_left: y0,
                    i_right: y,
                }),
            };
        }
    }
    ComonotoneReport {
        ok: true,
        first_violation: None,
    }
}

/// Evaluates `indemnity` on `grid` and runs [`check_comonotone_points`].
pub fn check_comonotone(
    indemnity: &dyn Indemnity,
    grid: &[f64],
    deductible: Option<f64>,
    plateaus: &[f64],
) -> ComonotoneReport {
    let points: Vec<(f64, f64)> = grid.iter().map(|&x| (x, indemnity.eval(x))).collect();
    check_comonotone_points(&points, deductible, plateaus)
}
