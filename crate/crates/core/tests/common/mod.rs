#![allow(dead_code)]

use indemnity::{LossDistribution, PremiumFunction, SolverConfig};

pub struct Case {
    pub name: &'static str,
    pub dist: LossDistribution,
    pub g: PremiumFunction,
    pub cfg: SolverConfig,
}

pub fn example_one() -> Case {
    Case {
        name: "example1",
        dist: LossDistribution::exponential(1.0).unwrap(),
        g: PremiumFunction::expected_value(1.0 / 3.0).unwrap(),
        cfg: SolverConfig::new(2.0),
    }
}

pub fn example_two() -> Case {
    Case {
        name: "example2",
        dist: LossDistribution::exponential(1.0).unwrap(),
        g: PremiumFunction::quadratic(0.5).unwrap(),
        cfg: SolverConfig::new(2.0),
    }
}

pub fn example_three() -> Case {
    Case {
        name: "example3",
        dist: LossDistribution::exponential(1.0).unwrap(),
        g: PremiumFunction::stop_loss(vec![0.1, 0.2], vec![1.0, 2.0]).unwrap(),
        cfg: SolverConfig::new(0.5),
    }
}

pub fn examples() -> Vec<Case> {
    vec![example_one(), example_two(), example_three()]
}

pub fn uniform(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect()
}

pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}
