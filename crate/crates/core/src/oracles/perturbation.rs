//! Random bump perturbations `I_ε = I + ε η` of a candidate contract.
//!
//! The gap `𝓙(I_ε) - 𝓙(I)` is assembled from integrals over the bump
//! support only, so it is exactly zero at `ε = 0` and does not lose digits
//! to cancellation between two full objectives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::LossDistribution;
use crate::error::Result;
use crate::indemnity::Indemnity;
use crate::premium::PremiumFunction;
use crate::solver::{objective, SolverConfig};

pub const GAP_TOLERANCE: f64 = 1e-8;
const FEASIBILITY_GRID: usize = 201;

/// `η(x) = (x - (c - w)) (c + w - x)` on `(c - w, c + w)`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = (self.center - self.half_width, self.center + self.half_width);
        if x <= a || x >= b {
            0.0
        } else {
            (x - a) * (b - x)
        }
    }

    fn support(&self) -> (f64, f64) {
        ((self.center - self.half_width).max(0.0), self.center + self.half_width)
    }
}

/// Premium and post-indemnity moment of the unperturbed contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baseline {
    pub premium: f64,
    pub moment: f64,
}

impl Baseline {
    pub fn of(indemnity: &dyn Indemnity, dist: &LossDistribution, g: &PremiumFunction, cfg: &SolverConfig) -> Result<Self> {
        let r = objective(indemnity, dist, g, cfg)?;
        Ok(Self {
            premium: r.premium,
            moment: r.post_indemnity_moment,
        })
    }
}

/// `𝓙(I + ε η) - 𝓙(I)`.
pub fn perturbation_gap(
    indemnity: &dyn Indemnity,
    base: Baseline,
    dist: &LossDistribution,
    g: &PremiumFunction,
    cfg: &SolverConfig,
    bump: Bump,
    epsilon: f64,
) -> Result<f64> {
    let gamma = cfg.gamma;
    let (lo, hi) = bump.support();
    if hi <= lo {
        return Ok(0.0);
    }
    let mut breakpoints = indemnity.breakpoints();
    breakpoints.push(bump.center);
    let d_premium = dist
        .integrate_df(
            &|x| {
                let y = indemnity.eval(x);
                g.value(y + epsilon * bump.eval(x)) - g.value(y)
            },
            lo,
            hi,
            &breakpoints,
            &cfg.quadrature,
        )?
        .value;
    let d_moment = dist
        .integrate_df(
            &|x| (gamma * (x - indemnity.eval(x))).exp() * (-gamma * epsilon * bump.eval(x)).exp_m1(),
            lo,
            hi,
            &breakpoints,
            &cfg.quadrature,
        )?
        .value;
    let scale = (gamma * base.premium).exp();
    Ok(scale * ((gamma * d_premium).exp_m1() * (base.moment + d_moment) + d_moment))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationTrial {
    pub bump: Bump,
    pub epsilon: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub min_gap: f64,
    /// Trials whose gap falls below `-tolerance`.
    pub improving: usize,
    /// Trials where neither sign leaves room inside `0 ≤ I ≤ x`.
    pub skipped: usize,
    pub worst: Option<PerturbationTrial>,
    pub passed: bool,
}

/// Largest `ε ≥ 0` keeping `0 ≤ I + s ε η ≤ x` on a grid over the bump.
fn max_step(indemnity: &dyn Indemnity, bump: Bump, sign: f64) -> f64 {
    let (lo, hi) = bump.support();
    let mut best = f64::INFINITY;
    for k in 1..FEASIBILITY_GRID - 1 {
        let x = lo + (hi - lo) * k as f64 / (FEASIBILITY_GRID - 1) as f64;
        let eta = bump.eval(x);
        if eta <= 0.0 {
            continue;
        }
        let y = indemnity.eval(x);
        let room = if sign > 0.0 { x - y } else { y };
        best = best.min(room.max(0.0) / eta);
    }
    best
}

/// Draws `trials` admissible bumps and records the objective change of each.
pub fn perturbation_test(
    indemnity: &dyn Indemnity,
    dist: &LossDistribution,
    g: &PremiumFunction,
    cfg: &SolverConfig,
    trials: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    let base = Baseline::of(indemnity, dist, g, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = dist.mean();
    let reach = match dist.atoms() {
        Some(atoms) => atoms.last().map_or(0.0, |a| a.x),
        None => 100f64.ln() * scale,
    };

    let mut report = PerturbationReport {
        trials,
        seed,
        tolerance: GAP_TOLERANCE,
        min_gap: f64::INFINITY,
        improving: 0,
        skipped: 0,
        worst: None,
        passed: true,
    };
    for _ in 0..trials {
        let bump = Bump {
            center: rng.gen_range(0.0..=reach),
            half_width: rng.gen_range(0.05..=0.5) * scale,
        };
        let mut sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let u: f64 = rng.gen_range(0.1..=0.9);
        let mut room = max_step(indemnity, bump, sign);
        if !(room > 1e-12) {
            sign = -sign;
            room = max_step(indemnity, bump, sign);
        }
        if !(room > 1e-12) {
            report.skipped += 1;
            continue;
        }
        // unbounded room only arises for bumps off the support
        let epsilon = sign * u * room.min(1.0 / scale);
        let gap = perturbation_gap(indemnity, base, dist, g, cfg, bump, epsilon)?;
        if gap < -GAP_TOLERANCE {
            report.improving += 1;
        }
        if gap < report.min_gap {
            report.min_gap = gap;
            report.worst = Some(PerturbationTrial { bump, epsilon, gap });
        }
    }
    if report.min_gap.is_infinite() {
        report.min_gap = 0.0;
    }
    report.passed = report.improving == 0;
    Ok(report)
}
