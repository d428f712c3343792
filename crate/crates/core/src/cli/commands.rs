use std::path::{Path, PathBuf};

use super::config::{ConfigError, ScenarioConfig};
use super::report::{write_curve, write_json, write_table, ArtifactError, Check, CheckKind, OracleDelta, RunReport};
use crate::distributions::{DistributionSpec, LossDistribution};
use crate::error::Error;
use crate::oracles::{oracle_deductible, oracle_multilayer, oracle_quadratic, perturbation_test, ClosedFormSolution};
use crate::premium::{PremiumFunction, PremiumSpec};
use crate::solver::{check_comonotone, check_comonotone_points, fixed_point_solve, IndemnitySchedule, SolverConfig, SolverTrace};

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;
pub const EXIT_QUADRATURE: u8 = 4;
pub const EXIT_NO_ORACLE: u8 = 5;
pub const EXIT_COMPARE: u8 = 6;

const FOC_TOLERANCE: f64 = 1e-8;
const CURVE_FILE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] Error),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error("no closed-form oracle for a {distribution} loss with a {premium} premium")]
    NoOracle { distribution: String, premium: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(e) => match e {
                Error::NoConvergence(_) => EXIT_NO_CONVERGENCE,
                Error::QuadratureBudgetExceeded { .. } | Error::BracketFailure { .. } => EXIT_QUADRATURE,
                Error::InvalidConfig(_)
                | Error::InvalidDistribution(_)
                | Error::InvalidPremium(_)
                | Error::DegeneratePremium(_)
                | Error::DivergentMoment(_) => EXIT_CONFIG,
                _ => EXIT_INTERNAL,
            },
            CliError::Artifact(_) => EXIT_INTERNAL,
            CliError::NoOracle { .. } => EXIT_NO_ORACLE,
        }
    }
}

/// A finished command: the report plus the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: u8,
}

pub struct Solved {
    pub dist: LossDistribution,
    pub g: PremiumFunction,
    pub cfg: SolverConfig,
    pub schedule: IndemnitySchedule,
    pub trace: SolverTrace,
}

pub fn solve_scenario(scenario: &ScenarioConfig) -> Result<Solved, CliError> {
    let dist = scenario.distribution()?;
    let g = scenario.premium_fn()?;
    let cfg = scenario.solver_config();
    let (schedule, trace) = fixed_point_solve(&dist, &g, &cfg)?;
    Ok(Solved {
        dist,
        g,
        cfg,
        schedule,
        trace,
    })
}

fn curve_upper(scenario: &ScenarioConfig, dist: &LossDistribution) -> f64 {
    scenario.curve_upper.unwrap_or_else(|| dist.display_upper())
}

fn base_report(command: &str, scenario: &ScenarioConfig, solved: &Solved) -> RunReport {
    RunReport {
        command: command.to_string(),
        scenario: scenario.clone(),
        m0: solved.trace.m0,
        m_star: solved.schedule.m_star(),
        deductible: solved.schedule.deductible(),
        iterations: solved.trace.iterations.len(),
        direction: solved.trace.direction,
        fixed_point_residual: solved.trace.fixed_point_residual.unwrap_or(0.0),
        quadrature_error: solved.trace.quadrature_error,
        max_foc_residual: None,
        oracle: None,
        perturbation: None,
        checks: Vec::new(),
        passed: true,
        wall_time_seconds: None,
    }
}

/// Runs the iteration and writes `trace.json`, `indemnity.csv` and `report.json`.
pub fn cmd_solve(scenario: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let solved = solve_scenario(scenario)?;
    let grid = solved.schedule.curve_grid(curve_upper(scenario, &solved.dist), scenario.grid_points);
    let curve = solved.schedule.curve(&grid)?;
    create_dir(out)?;
    write_json(&out.join("trace.json"), &solved.trace)?;
    write_curve(&out.join("indemnity.csv"), &curve)?;
    let report = base_report("solve", scenario, &solved);
    write_json(&out.join("report.json"), &report)?;
    Ok(Outcome { report, exit_code: 0 })
}

/// Solves inline and runs every check; the exit code belongs to the first
/// failing check.
pub fn cmd_verify(scenario: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let solved = solve_scenario(scenario)?;
    let Solved {
        dist,
        g,
        cfg,
        schedule,
        trace,
    } = &solved;
    let mut report = base_report("verify", scenario, &solved);
    let upper = curve_upper(scenario, dist);
    let grid = schedule.curve_grid(upper, scenario.grid_points);
    let plateaus = g.kinks();
    let d = schedule.deductible();

    let como = check_comonotone(schedule, &grid, Some(d), &plateaus);
    let mut check = Check::at_most(CheckKind::Comonotone, "comonotone", if como.ok { 0.0 } else { 1.0 }, 0.0);
    if let Some(v) = como.first_violation {
        check = check.with_detail(format!("{:?} between x = {} and x = {}", v.kind, v.x_left, v.x_right));
    }
    report.checks.push(check);

    let csv_path = out.join("indemnity.csv");
    let stored = if csv_path.exists() {
        let points = super::report::read_curve(&csv_path)?;
        let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.indemnity)).collect();
        let r = check_comonotone_points(&pairs, Some(d), &plateaus);
        let mut check = Check::at_most(
            CheckKind::Comonotone,
            "comonotone (indemnity.csv)",
            if r.ok { 0.0 } else { 1.0 },
            0.0,
        );
        if let Some(v) = r.first_violation {
            check = check.with_detail(format!("{:?} between x = {} and x = {}", v.kind, v.x_left, v.x_right));
        }
        report.checks.push(check);
        Some(points)
    } else {
        None
    };

    let residual = trace.fixed_point_residual.unwrap_or(f64::INFINITY);
    report.checks.push(Check::at_most(
        CheckKind::SelfConsistency,
        "|h(M*) - M*|",
        residual,
        10.0 * cfg.m_tolerance,
    ));

    let mut foc = 0.0f64;
    for &x in &grid {
        foc = foc.max(schedule.foc_residual(x)?.magnitude());
    }
    report.max_foc_residual = Some(foc);
    report.checks.push(Check::at_most(CheckKind::FirstOrderCondition, "first-order condition", foc, FOC_TOLERANCE));

    let pert = perturbation_test(schedule, dist, g, cfg, scenario.trials, scenario.seed)?;
    report.checks.push(
        Check::at_most(CheckKind::Perturbation, "perturbation gap", (-pert.min_gap).max(0.0), pert.tolerance)
            .with_detail(format!("{} of {} trials improve", pert.improving, pert.trials)),
    );
    report.perturbation = Some(pert);

    if let Some(points) = stored {
        let mut worst = 0.0f64;
        for p in &points {
            worst = worst.max((p.indemnity - schedule.try_eval(p.x)?).abs());
        }
        report.checks.push(Check::at_most(
            CheckKind::CurveFile,
            "indemnity.csv against solver",
            worst,
            CURVE_FILE_TOLERANCE,
        ));
    }

    let oracle = match matching_oracle(scenario) {
        Ok(o) => Some(o),
        Err(CliError::NoOracle { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some(oracle) = oracle {
        let delta = oracle_delta(scenario, &solved, &oracle)?;
        report.checks.push(Check::at_most(CheckKind::Oracle, "oracle M", delta.m_delta, scenario.compare.m_tolerance));
        report.checks.push(Check::at_most(
            CheckKind::Oracle,
            "oracle curve",
            delta.max_curve_delta,
            scenario.compare.curve_tolerance,
        ));
        report.oracle = Some(delta);
    }

    create_dir(out)?;
    report.passed = report.first_failure().is_none();
    let exit_code = report.first_failure().map_or(0, |c| c.kind.exit_code());
    write_json(&out.join("verify.json"), &report)?;
    Ok(Outcome { report, exit_code })
}

fn premium_name(premium: &PremiumSpec) -> &'static str {
    match premium {
        PremiumSpec::ExpectedValue { .. } => "expected-value",
        PremiumSpec::Quadratic { .. } => "quadratic",
        PremiumSpec::StopLoss { .. } => "stop-loss",
    }
}

/// The closed form matching a scenario; only exponential losses have one.
pub fn matching_oracle(scenario: &ScenarioConfig) -> Result<ClosedFormSolution, CliError> {
    let DistributionSpec::Exponential { lambda } = scenario.distribution else {
        return Err(CliError::NoOracle {
            distribution: "empirical".into(),
            premium: premium_name(&scenario.premium).into(),
        });
    };
    let gamma = scenario.gamma;
    let solution = match &scenario.premium {
        PremiumSpec::ExpectedValue { theta } => oracle_deductible(gamma, lambda, *theta),
        PremiumSpec::Quadratic { alpha } => oracle_quadratic(gamma, lambda, *alpha),
        PremiumSpec::StopLoss { loadings, thresholds } => oracle_multilayer(gamma, lambda, loadings, thresholds),
    };
    Ok(solution?)
}

fn uniform_grid(upper: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| upper * k as f64 / (points - 1) as f64).collect()
}

fn oracle_delta(scenario: &ScenarioConfig, solved: &Solved, oracle: &ClosedFormSolution) -> Result<OracleDelta, CliError> {
    let grid = uniform_grid(curve_upper(scenario, &solved.dist), scenario.compare.curve_points);
    let mut worst = 0.0f64;
    for &x in &grid {
        worst = worst.max((solved.schedule.try_eval(x)? - oracle.eval(x)).abs());
    }
    let m_star = solved.schedule.m_star();
    Ok(OracleDelta {
        family: oracle.family,
        m_oracle: oracle.m,
        deductible_oracle: oracle.deductible,
        m_delta: (m_star - oracle.m).abs(),
        deductible_delta: (solved.schedule.deductible() - oracle.deductible).abs(),
        max_curve_delta: worst,
        curve_points: grid.len(),
        reference_delta: scenario.compare.reference_m.map(|r| (m_star - r).abs()),
    })
}

/// Solver against the closed form: writes `compare.csv`,
/// `oracle_indemnity.csv` and `compare.json`.
pub fn cmd_compare(scenario: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let oracle = matching_oracle(scenario)?;
    let solved = solve_scenario(scenario)?;
    let mut report = base_report("compare", scenario, &solved);
    let delta = oracle_delta(scenario, &solved, &oracle)?;

    let grid = uniform_grid(curve_upper(scenario, &solved.dist), scenario.compare.curve_points);
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        let s = solved.schedule.try_eval(x)?;
        let o = oracle.eval(x);
        rows.push(vec![x, s, o, s - o]);
    }
    create_dir(out)?;
    write_table(&out.join("compare.csv"), &["x", "solver", "oracle", "delta"], rows)?;
    let oracle_curve = solved.schedule.curve_grid(curve_upper(scenario, &solved.dist), scenario.grid_points);
    write_table(
        &out.join("oracle_indemnity.csv"),
        &["x", "indemnity", "retained"],
        oracle_curve.iter().map(|&x| {
            let y = oracle.eval(x);
            vec![x, y, x - y]
        }),
    )?;

    let c = &scenario.compare;
    report.checks.push(Check::at_most(CheckKind::Oracle, "oracle M", delta.m_delta, c.m_tolerance));
    report
        .checks
        .push(Check::at_most(CheckKind::Oracle, "oracle curve", delta.max_curve_delta, c.curve_tolerance));
    if let Some(r) = delta.reference_delta {
        report.checks.push(Check::at_most(CheckKind::Oracle, "reference M", r, c.reference_tolerance));
    }
    report.oracle = Some(delta);
    report.passed = report.first_failure().is_none();
    write_json(&out.join("compare.json"), &report)?;
    let exit_code = if report.passed { 0 } else { EXIT_COMPARE };
    Ok(Outcome { report, exit_code })
}

fn create_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|source| {
        CliError::Artifact(ArtifactError::Io {
            path: out.display().to_string(),
            source,
        })
    })
}

/// `--out`, else the config's `output_dir`, else `<root>/<name>` with the
/// root taken from the environment or `out`.
pub fn resolve_out(flag: Option<&Path>, scenario: &ScenarioConfig, env_root: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = &scenario.output_dir {
        return p.clone();
    }
    env_root.unwrap_or(Path::new("out")).join(&scenario.name)
}
