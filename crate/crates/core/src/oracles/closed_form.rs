//! Closed-form optimal indemnities for an exponential loss under the
//! expected-value, quadratic and layered stop-loss premium functions.
//!
//! None of these routines touch the solver or the shared quadrature: the
//! scalar equations for `d` and `M` are solved by plain bisection, with
//! exponential integrals in closed form and the single non-elementary
//! integral (quadratic family) done by Romberg extrapolation.

use serde::{Deserialize, Serialize};

use super::lambert::lambert_w_exp;
use crate::error::{Error, Result};
use crate::indemnity::Indemnity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormFamily {
    Deductible,
    QuadraticLambertW,
    MultiLayer,
}

/// `I(x) = slope * x + intercept` on `(start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub start: f64,
    pub end: f64,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Deductible,
    Quadratic { alpha: f64 },
    Layers(Vec<Branch>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSolution {
    pub family: ClosedFormFamily,
    pub gamma: f64,
    pub lambda: f64,
    pub m: f64,
    pub deductible: f64,
    shape: Shape,
}

impl ClosedFormSolution {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.deductible {
            return 0.0;
        }
        match &self.shape {
            Shape::Deductible => x - self.deductible,
            Shape::Quadratic { alpha } => {
                let g = self.gamma;
                let h = 0.5 / alpha;
                let t = (g * h).ln() + g * (x - self.deductible + h);
                (lambert_w_exp(t) / g - h).max(0.0)
            }
            Shape::Layers(branches) => {
                let b = branches
                    .iter()
                    .find(|b| x > b.start && x <= b.end)
                    .or(branches.last())
                    .expect("layer table is never empty");
                b.slope * x + b.intercept
            }
        }
    }

    /// Branch table of a layered solution.
    pub fn branches(&self) -> Option<&[Branch]> {
        match &self.shape {
            Shape::Layers(b) => Some(b),
            _ => None,
        }
    }
}

impl Indemnity for ClosedFormSolution {
    fn eval(&self, x: f64) -> f64 {
        ClosedFormSolution::eval(self, x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Layers(b) => b.iter().map(|b| b.start).collect(),
            _ => vec![self.deductible],
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
    }
}

/// `∫_a^b e^{cx} λ e^{-λx} dx`, with `b = ∞` allowed when `c < λ`.
fn exp_weighted(c: f64, lambda: f64, a: f64, b: f64) -> f64 {
    let r = c - lambda;
    if b.is_infinite() {
        debug_assert!(r < 0.0);
        return lambda * (r * a).exp() / -r;
    }
    if r == 0.0 {
        lambda * (b - a)
    } else {
        lambda * (r * a).exp() * (r * (b - a)).exp_m1() / r
    }
}

/// Bisection for the sign change of `f` on `[lo, hi]`, assuming
/// `f(lo) < 0 < f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Romberg integration on `[a, b]`.
fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    const LEVELS: usize = 24;
    let mut prev = vec![0.5 * (b - a) * (f(a) + f(b))];
    let mut n = 1usize;
    for level in 1..LEVELS {
        let h = (b - a) / (2 * n) as f64;
        let mid_sum: f64 = (0..n).map(|k| f(a + (2 * k + 1) as f64 * h)).sum();
        let mut row = Vec::with_capacity(level + 1);
        row.push(0.5 * prev[0] + h * mid_sum);
        let mut factor = 1.0;
        for j in 1..=level {
            factor *= 4.0;
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            row.push(v);
        }
        n *= 2;
        let best = row[level];
        if level > 4 && (best - prev[level - 1]).abs() <= rel_tol * best.abs() {
            return best;
        }
        prev = row;
    }
    *prev.last().unwrap()
}

/// Expected-value premium `g(x) = (1 + θ) x`: the optimum is a pure
/// deductible whose level solves
/// `e^{γd}/(1+θ) - (γ/(γ-λ)) e^{(γ-λ)d} + λ/(γ-λ) = 0`.
pub fn oracle_deductible(gamma: f64, lambda: f64, theta: f64) -> Result<ClosedFormSolution> {
    check_positive("gamma", gamma)?;
    check_positive("lambda", lambda)?;
    check_positive("theta", theta)?;
    // M(d) = ∫_0^d e^{γx} dF + e^{γd} S(d), written to stay stable at γ = λ
    let moment = |d: f64| exp_weighted(gamma, lambda, 0.0, d) + ((gamma - lambda) * d).exp();
    let f = |d: f64| (gamma * d).exp() / (1.0 + theta) - moment(d);
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoRoot("deductible equation has no positive root below 1e6".into()));
        }
    }
    let d = bisect(f, 0.0, hi);
    Ok(ClosedFormSolution {
        family: ClosedFormFamily::Deductible,
        gamma,
        lambda,
        m: (gamma * d).exp() / (1.0 + theta),
        deductible: d,
        shape: Shape::Deductible,
    })
}

const QUADRATIC_BRACKET: (f64, f64) = (1e-6, 20.0);

/// Quadratic premium `g(x) = x + α x²`: beyond the deductible
/// `Î(x) = W((γ/2α) e^{γ(x-d+1/2α)})/γ - 1/2α`, and `d` solves
/// `∫_0^d λe^{(γ-λ)x}dx + ∫_d^∞ λe^{(γ-λ)x - γÎ(x)}dx = e^{γd}`.
pub fn oracle_quadratic(gamma: f64, lambda: f64, alpha: f64) -> Result<ClosedFormSolution> {
    check_positive("gamma", gamma)?;
    check_positive("lambda", lambda)?;
    check_positive("alpha", alpha)?;
    let h = 0.5 / alpha;
    let shift = (gamma * h).ln() + gamma * h;
    // Î(d + t) does not depend on d, so the tail integral factors as
    // e^{(γ-λ)d} · ∫_0^∞ λ e^{(γ-λ)t - γÎ(d+t)} dt.
    let paid = |t: f64| (lambert_w_exp(shift + gamma * t) / gamma - h).max(0.0);
    let horizon = 60.0 / lambda;
    let tail = romberg(
        |t| lambda * ((gamma - lambda) * t - gamma * paid(t)).exp(),
        0.0,
        horizon,
        1e-14,
    );
    let lhs = |d: f64| exp_weighted(gamma, lambda, 0.0, d) + tail * ((gamma - lambda) * d).exp() - (gamma * d).exp();

    let (lo, hi) = QUADRATIC_BRACKET;
    let scan: Vec<f64> = (0..=400).map(|k| lo + (hi - lo) * k as f64 / 400.0).collect();
    let sign_changes = scan.windows(2).filter(|w| (lhs(w[0]) > 0.0) != (lhs(w[1]) > 0.0)).count();
    if sign_changes != 1 || !(lhs(lo) > 0.0) {
        return Err(Error::NoRoot(format!(
            "deductible equation has {sign_changes} sign changes on [{lo}, {hi}]"
        )));
    }
    // lhs is positive below the root
    let d = bisect(|d| -lhs(d), lo, hi);
    Ok(ClosedFormSolution {
        family: ClosedFormFamily::QuadraticLambertW,
        gamma,
        lambda,
        m: (gamma * d).exp(),
        deductible: d,
        shape: Shape::Quadratic { alpha },
    })
}

/// Branch table of the layered indemnity for a given `m`: alternating flat
/// and slope-one pieces, flat at each threshold `δ_j` while
/// `e^{γ(x-δ_j)}` sits inside `m [1 + Σ_{i<j} θ_i, 1 + Σ_{i≤j} θ_i]`.
fn layer_table(m: f64, gamma: f64, loadings: &[f64], thresholds: &[f64]) -> Vec<Branch> {
    let d = m.ln() / gamma;
    let mut shifts = vec![0.0];
    let mut cumulative = 1.0;
    for t in loadings {
        cumulative += t;
        shifts.push(cumulative.ln() / gamma);
    }
    let mut out = vec![Branch {
        start: 0.0,
        end: d,
        slope: 0.0,
        intercept: 0.0,
    }];
    let mut start = d;
    for j in 0..=thresholds.len() {
        let band_end = thresholds.get(j).map_or(f64::INFINITY, |delta| delta + d + shifts[j]);
        out.push(Branch {
            start,
            end: band_end,
            slope: 1.0,
            intercept: -(d + shifts[j]),
        });
        if let Some(&delta) = thresholds.get(j) {
            let plateau_end = delta + d + shifts[j + 1];
            out.push(Branch {
                start: band_end,
                end: plateau_end,
                slope: 0.0,
                intercept: delta,
            });
            start = plateau_end;
        }
    }
    out
}

/// `E[e^{γ(X - I(X))}]` for a layer table and an exponential loss.
fn layered_moment(branches: &[Branch], gamma: f64, lambda: f64) -> f64 {
    branches
        .iter()
        .map(|b| {
            if b.slope == 0.0 {
                // retained loss x - δ
                (-gamma * b.intercept).exp() * exp_weighted(gamma, lambda, b.start, b.end)
            } else {
                // retained loss constant at -intercept
                let survival_gap = (-lambda * b.start).exp() - if b.end.is_infinite() { 0.0 } else { (-lambda * b.end).exp() };
                (-gamma * b.intercept).exp() * survival_gap
            }
        })
        .sum()
}

/// Layered stop-loss premium `g(x) = x + Σ θ_i (x - δ_i)_+`.
pub fn oracle_multilayer(gamma: f64, lambda: f64, loadings: &[f64], thresholds: &[f64]) -> Result<ClosedFormSolution> {
    check_positive("gamma", gamma)?;
    check_positive("lambda", lambda)?;
    if loadings.is_empty() || loadings.len() != thresholds.len() {
        return Err(Error::InvalidConfig("loadings and thresholds must be nonempty and of equal length".into()));
    }
    for &t in loadings {
        check_positive("loading", t)?;
    }
    if thresholds.windows(2).any(|w| w[1] <= w[0]) || thresholds[0] <= 0.0 {
        return Err(Error::InvalidConfig("thresholds must be positive and strictly increasing".into()));
    }
    let excess = |m: f64| layered_moment(&layer_table(m, gamma, loadings, thresholds), gamma, lambda) - m;
    if !(excess(1.0) > 0.0) {
        return Err(Error::NoRoot("moment map does not exceed 1 at m = 1".into()));
    }
    let mut hi = 2.0;
    while excess(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoRoot("no fixed point of the moment map below 1e12".into()));
        }
    }
    let m = bisect(|m| -excess(m), 1.0, hi);
    Ok(ClosedFormSolution {
        family: ClosedFormFamily::MultiLayer,
        gamma,
        lambda,
        m,
        deductible: m.ln() / gamma,
        shape: Shape::Layers(layer_table(m, gamma, loadings, thresholds)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn example_one_is_exact() {
        let s = oracle_deductible(2.0, 1.0, 1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(s.deductible, 2f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.m, 3.0, epsilon = 1e-13);
        // 3 e^{2d} - 8 e^d + 4 = 0 at d = ln 2
        let e = s.deductible.exp();
        assert_abs_diff_eq!(3.0 * e * e - 8.0 * e + 4.0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eval(2.0), 2.0 - 2f64.ln(), epsilon = 1e-14);
        assert_eq!(s.eval(0.5), 0.0);
    }

    #[test]
    fn deductible_with_finite_moment() {
        // reference from an arbitrary-precision root of the same equation
        let s = oracle_deductible(0.5, 1.0, 0.3).unwrap();
        assert_abs_diff_eq!(s.deductible, 1.3093321794706796, epsilon = 1e-12);
        assert_abs_diff_eq!(s.m, 1.4803844614152614, epsilon = 1e-12);
        let at_equal_rates = oracle_deductible(1.0, 1.0, 0.5).unwrap();
        // γ = λ: M = 1 + λd and M = e^{γd}/(1+θ)
        let d = at_equal_rates.deductible;
        assert_abs_diff_eq!(1.0 + d, d.exp() / 1.5, epsilon = 1e-12);
    }

    #[test]
    fn example_two_values() {
        let s = oracle_quadratic(2.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(s.deductible, 0.8452, epsilon = 1e-4);
        assert_abs_diff_eq!(s.m, 5.4214, epsilon = 1e-4);
        // arbitrary-precision reference
        assert_abs_diff_eq!(s.deductible, 0.845177484353006, epsilon = 1e-10);
        assert_abs_diff_eq!(s.m, 5.421404792659595, epsilon = 1e-9);
        assert_eq!(s.eval(s.deductible), 0.0);
        assert!(s.eval(s.deductible + 1e-9) >= 0.0);
        let d = s.deductible;
        let (a, b, c) = (s.eval(d + 1.0), s.eval(d + 2.0), s.eval(d + 3.0));
        assert_abs_diff_eq!(b, 1.5349191320239735, epsilon = 1e-10);
        assert!((a + c - 2.0 * b).abs() > 1e-3);
    }

    #[test]
    fn example_three_values() {
        let s = oracle_multilayer(0.5, 1.0, &[0.1, 0.2], &[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(s.m, 1.2288, epsilon = 1e-4);
        assert_abs_diff_eq!(s.m, 1.2288484153375865, epsilon = 1e-12);
        assert_abs_diff_eq!(s.deductible, 0.4121549662753689, epsilon = 1e-12);
        let slopes: Vec<f64> = s.branches().unwrap().iter().map(|b| b.slope).collect();
        assert_eq!(slopes, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        let b = s.branches().unwrap();
        assert!(b.windows(2).all(|w| w[0].start < w[1].start && w[0].end == w[1].start));
        assert_eq!(s.eval(1.5), 1.0);
        assert_eq!(s.eval(b[4].start + 1e-6), 2.0);
    }

    #[test]
    fn layers_collapse_to_deductible() {
        let s = oracle_multilayer(0.5, 1.0, &[0.1, 0.2], &[1e-6, 2e-6]).unwrap();
        let d = (1.3 * s.m).ln() / 0.5;
        for k in 0..200 {
            let x = k as f64 * 0.05;
            assert!((s.eval(x) - (x - d).max(0.0)).abs() <= 1e-4, "x = {x}");
        }
        // the expected-value problem with θ = 0.3 has the same M
        assert_abs_diff_eq!(s.m, oracle_deductible(0.5, 1.0, 0.3).unwrap().m, epsilon = 1e-5);
    }

    #[test]
    fn romberg_on_smooth_integrand() {
        let v = romberg(|x: f64| (-x).exp(), 0.0, 40.0, 1e-14);
        assert_abs_diff_eq!(v, 1.0 - (-40f64).exp(), epsilon = 1e-13);
    }

    #[test]
    fn invalid_parameters() {
        assert!(oracle_deductible(0.0, 1.0, 0.3).is_err());
        assert!(oracle_quadratic(2.0, -1.0, 0.5).is_err());
        assert!(oracle_multilayer(0.5, 1.0, &[0.1], &[1.0, 2.0]).is_err());
        assert!(oracle_multilayer(0.5, 1.0, &[0.1, 0.2], &[2.0, 1.0]).is_err());
    }
}
