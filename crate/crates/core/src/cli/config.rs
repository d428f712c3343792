use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, LossDistribution, QuadratureSpec};
use crate::error::{Error, Result};
use crate::premium::{PremiumFunction, PremiumSpec};
use crate::solver::{M0Strategy, SolverConfig};

/// One scenario: a loss law, a premium function and a risk aversion, plus
/// the knobs used by `solve`, `verify` and `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub distribution: DistributionSpec,
    pub premium: PremiumSpec,
    pub gamma: f64,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Number of points on the indemnity curve.
    #[serde(default = "defaults::grid_points")]
    pub grid_points: usize,
    /// Right end of the curve; defaults to the 1 - 1e-6 quantile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_upper: Option<f64>,
    /// Perturbation trials run by `verify`.
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub compare: CompareOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default = "defaults::m_tolerance")]
    pub m_tolerance: f64,
    #[serde(default = "defaults::max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "defaults::root_tolerance")]
    pub root_tolerance: f64,
    #[serde(default = "defaults::m0")]
    pub m0: M0Strategy,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            m_tolerance: defaults::m_tolerance(),
            max_iterations: defaults::max_iterations(),
            root_tolerance: defaults::root_tolerance(),
            m0: defaults::m0(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareOptions {
    /// Allowed `|M* - M_oracle|`.
    #[serde(default = "defaults::compare_m_tolerance")]
    pub m_tolerance: f64,
    /// Allowed sup-distance between solver and oracle curves.
    #[serde(default = "defaults::curve_tolerance")]
    pub curve_tolerance: f64,
    #[serde(default = "defaults::curve_points")]
    pub curve_points: usize,
    /// Published value of `M`, checked in addition to the oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_m: Option<f64>,
    #[serde(default = "defaults::compare_m_tolerance")]
    pub reference_tolerance: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            m_tolerance: defaults::compare_m_tolerance(),
            curve_tolerance: defaults::curve_tolerance(),
            curve_points: defaults::curve_points(),
            reference_m: None,
            reference_tolerance: defaults::compare_m_tolerance(),
        }
    }
}

mod defaults {
    use crate::solver::M0Strategy;

    pub fn grid_points() -> usize {
        2000
    }
    pub fn trials() -> usize {
        200
    }
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
    pub fn compare_m_tolerance() -> f64 {
        1e-4
    }
    pub fn curve_tolerance() -> f64 {
        1e-5
    }
    pub fn curve_points() -> usize {
        500
    }
}

/// A config file that failed to parse, with the position serde reported.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: Error },
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|source| ConfigError::Invalid {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution()?;
        self.premium_fn()?;
        self.solver_config().validate()?;
        if self.grid_points < 2 || self.compare.curve_points < 2 {
            return Err(Error::InvalidConfig("grid sizes must be at least 2".into()));
        }
        if let Some(u) = self.curve_upper {
            if !(u.is_finite() && u > 0.0) {
                return Err(Error::InvalidConfig(format!("curve_upper must be positive, got {u}")));
            }
        }
        let c = &self.compare;
        if !(c.m_tolerance > 0.0 && c.curve_tolerance > 0.0 && c.reference_tolerance > 0.0) {
            return Err(Error::InvalidConfig("compare tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn distribution(&self) -> Result<LossDistribution> {
        self.distribution.build()
    }

    pub fn premium_fn(&self) -> Result<PremiumFunction> {
        self.premium.build()
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            gamma: self.gamma,
            m_tolerance: s.m_tolerance,
            max_iterations: s.max_iterations,
            root_tolerance: s.root_tolerance,
            m0: s.m0,
            quadrature: s.quadrature,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "name": "ev",
        "distribution": {"family": "exponential", "lambda": 1.0},
        "premium": {"family": "expected_value", "theta": 0.3333333333333333},
        "gamma": 2.0
    }"#;

    #[test]
    fn defaults_and_round_trip() {
        let cfg: ScenarioConfig = serde_json::from_str(EXAMPLE).unwrap();
        assert_eq!(cfg.grid_points, 2000);
        assert_eq!(cfg.solver.m0, M0Strategy::LowerEndpoint);
        cfg.validate().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = EXAMPLE.replace("\"gamma\"", "\"gama\": 1.0, \"gamma\"");
        let err = serde_json::from_str::<ScenarioConfig>(&text).unwrap_err();
        assert!(err.to_string().contains("gama"), "{err}");
        let nested = EXAMPLE.replace("\"lambda\"", "\"rate\": 2, \"lambda\"");
        assert!(serde_json::from_str::<ScenarioConfig>(&nested).is_err());
    }

    #[test]
    fn m0_forms() {
        for (text, want) in [
            ("\"lower\"", M0Strategy::LowerEndpoint),
            ("\"upper\"", M0Strategy::UpperEndpoint),
            ("2.5", M0Strategy::Custom(2.5)),
        ] {
            let src = EXAMPLE.replace("\"gamma\": 2.0", &format!("\"gamma\": 2.0, \"solver\": {{\"m0\": {text}}}"));
            let cfg: ScenarioConfig = serde_json::from_str(&src).unwrap();
            assert_eq!(cfg.solver.m0, want);
        }
    }
}
