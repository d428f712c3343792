use serde::{Deserialize, Serialize};

use super::SolverConfig;
use crate::distributions::LossDistribution;
use crate::error::{Error, Result};
use crate::indemnity::Indemnity;
use crate::premium::PremiumFunction;

const ADMISSIBILITY_SLACK: f64 = 1e-10;
const ADMISSIBILITY_GRID: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    /// `π(I) = E[g(I(X))]`
    pub premium: f64,
    /// `E[e^{γ(X - I(X))}]`
    pub post_indemnity_moment: f64,
    /// `e^{γπ(I)} · E[e^{γ(X - I(X))}]`
    pub objective: f64,
    /// `ln(objective) / γ`
    pub certainty_equivalent: f64,
}

pub(crate) fn check_admissible(indemnity: &dyn Indemnity, dist: &LossDistribution) -> Result<()> {
    let upper = dist.display_upper();
    let mut points: Vec<f64> = (0..ADMISSIBILITY_GRID)
        .map(|k| upper * k as f64 / (ADMISSIBILITY_GRID - 1) as f64)
        .collect();
    if let Some(atoms) = dist.atoms() {
        points.extend(atoms.iter().map(|a| a.x));
    }
    for x in points {
        let y = indemnity.eval(x);
        if !(y >= -ADMISSIBILITY_SLACK && y <= x + ADMISSIBILITY_SLACK) {
            return Err(Error::InadmissibleIndemnity { x, value: y });
        }
    }
    Ok(())
}

/// Evaluates `E[e^{γ(X - I(X) + π(I))}]` for any admissible contract.
/// The premium is a constant, so it factors out of the expectation.
pub fn objective(
    indemnity: &dyn Indemnity,
    dist: &LossDistribution,
    g: &PremiumFunction,
    cfg: &SolverConfig,
) -> Result<ObjectiveReport> {
    check_admissible(indemnity, dist)?;
    let gamma = cfg.gamma;
    let premium = g.premium(indemnity, dist, &cfg.quadrature)?;
    let breakpoints = indemnity.breakpoints();
    let post = dist
        .integrate_df(
            &|x| (gamma * (x - indemnity.eval(x))).exp(),
            0.0,
            f64::INFINITY,
            &breakpoints,
            &cfg.quadrature,
        )?
        .value;
    let objective = (gamma * premium).exp() * post;
    Ok(ObjectiveReport {
        premium,
        post_indemnity_moment: post,
        objective,
        certainty_equivalent: premium + post.ln() / gamma,
    })
}
