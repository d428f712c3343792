use crate::error::{Error, Result};
use crate::premium::PremiumFunction;

/// Largest number of candidate vectors visited before giving up.
pub const SEARCH_CAP: u64 = 10_000_000;
pub const MAX_ATOMS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchSpace {
    /// Only vectors with `0 ≤ y_j - y_i ≤ x_j - x_i` for `x_i < x_j`.
    Comonotone,
    /// Every `y_i` on its own grid, independently.
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Payments, in the order of the input atoms.
    pub y: Vec<f64>,
    pub objective: f64,
    pub candidates: u64,
}

/// Objective `e^{γ Σ p_i g(y_i)} · Σ p_i e^{γ(x_i - y_i)}`.
pub fn discrete_objective(atoms: &[(f64, f64)], y: &[f64], g: &PremiumFunction, gamma: f64) -> f64 {
    let premium: f64 = atoms.iter().zip(y).map(|(&(_, p), &yi)| p * g.value(yi)).sum();
    let moment: f64 = atoms.iter().zip(y).map(|(&(x, p), &yi)| p * (gamma * (x - yi)).exp()).sum();
    (gamma * premium).exp() * moment
}

fn levels(x: f64, step: f64) -> Vec<f64> {
    let n = (x / step * (1.0 + 1e-12)).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| k as f64 * step).filter(|y| *y <= x).collect();
    if out.last().is_some_and(|y| x - y > 1e-12 * x.max(1.0)) {
        out.push(x);
    } else if let Some(last) = out.last_mut() {
        *last = x;
    }
    out
}

struct Search<'a> {
    atoms: &'a [(f64, f64)],
    grids: Vec<Vec<f64>>,
    g: &'a PremiumFunction,
    gamma: f64,
    space: SearchSpace,
    current: Vec<f64>,
    best: Option<(f64, Vec<f64>)>,
    visited: u64,
}

impl Search<'_> {
    /// Depth-first over atoms in increasing loss; levels ascend, and only a
    /// strictly better objective replaces the incumbent, so ties resolve to
    /// the lexicographically smallest vector.
    fn descend(&mut self, i: usize, premium: f64, moment: f64) -> Result<()> {
        if i == self.atoms.len() {
            self.visited += 1;
            if self.visited > SEARCH_CAP {
                return Err(Error::BudgetExceeded(format!("more than {SEARCH_CAP} candidate vectors")));
            }
            let value = (self.gamma * premium).exp() * moment;
            if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
                self.best = Some((value, self.current.clone()));
            }
            return Ok(());
        }
        let (x, p) = self.atoms[i];
        let (lo, hi) = match (self.space, i) {
            (SearchSpace::Comonotone, 1..) => {
                let prev_y = self.current[i - 1];
                let prev_x = self.atoms[i - 1].0;
                (prev_y - 1e-12, prev_y + (x - prev_x) + 1e-12)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        for k in 0..self.grids[i].len() {
            let y = self.grids[i][k];
            if y < lo {
                continue;
            }
            if y > hi {
                break;
            }
            self.current.push(y);
            self.descend(i + 1, premium + p * self.g.value(y), moment + p * (self.gamma * (x - y)).exp())?;
            self.current.pop();
        }
        Ok(())
    }
}

/// Exhaustive minimisation over `y_i ∈ {0, step, 2 step, ..., x_i}`.
pub fn brute_force_discrete(
    atoms: &[(f64, f64)],
    g: &PremiumFunction,
    gamma: f64,
    grid_step: f64,
    space: SearchSpace,
) -> Result<BruteForceResult> {
    if atoms.is_empty() || atoms.len() > MAX_ATOMS {
        return Err(Error::InvalidConfig(format!("brute force takes 1 to {MAX_ATOMS} atoms, got {}", atoms.len())));
    }
    if !(grid_step.is_finite() && grid_step > 0.0) || !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidConfig("grid step and gamma must be positive".into()));
    }
    if atoms.iter().any(|&(x, p)| !(x >= 0.0 && x.is_finite() && p > 0.0)) {
        return Err(Error::InvalidConfig("atoms need finite nonnegative losses and positive masses".into()));
    }
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| atoms[a].0.total_cmp(&atoms[b].0));
    let sorted: Vec<(f64, f64)> = order.iter().map(|&i| atoms[i]).collect();
    let grids: Vec<Vec<f64>> = sorted.iter().map(|&(x, _)| levels(x, grid_step)).collect();
    let product: f64 = grids.iter().map(|l| l.len() as f64).product();
    if space == SearchSpace::Unrestricted && product > SEARCH_CAP as f64 {
        return Err(Error::BudgetExceeded(format!("{product} candidate vectors exceed the cap of {SEARCH_CAP}")));
    }

    let mut search = Search {
        atoms: &sorted,
        grids,
        g,
        gamma,
        space,
        current: Vec::with_capacity(atoms.len()),
        best: None,
        visited: 0,
    };
    search.descend(0, 0.0, 0.0)?;
    let (_, sorted_y) = search.best.expect("the all-zero vector is always a candidate");
    let mut y = vec![0.0; atoms.len()];
    for (pos, &i) in order.iter().enumerate() {
        y[i] = sorted_y[pos];
    }
    // report the objective in one pass over the original order
    let objective = discrete_objective(atoms, &y, g, gamma);
    Ok(BruteForceResult {
        y,
        objective,
        candidates: search.visited,
    })
}
