//! Command-line front end: `solve`, `verify` and `compare` on a JSON
//! scenario file.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_compare, cmd_solve, cmd_verify, matching_oracle, resolve_out, solve_scenario, CliError, Outcome, Solved};
pub use config::{CompareOptions, ConfigError, ScenarioConfig, SolverOptions};
pub use report::{fmt_real, read_curve, write_curve, Check, CheckKind, OracleDelta, RunReport};

use crate::solver::M0Strategy;

pub const OUT_DIR_ENV: &str = "INDEMNITY_OUT_DIR";

const EXIT_CODES: &str = "\
Exit codes:
   0  success
   1  internal or I/O error
   2  invalid command line or config (parse errors report line:column)
   3  fixed-point iteration did not converge
   4  quadrature or root-bracketing failure
   5  compare: no closed-form oracle for this scenario
   6  compare: solver outside the configured tolerance
  10  verify: comonotonicity violated (solver curve or indemnity.csv)
  11  verify: |h(M*) - M*| above 10 x m_tolerance
  12  verify: first-order condition residual above 1e-8
  13  verify: a perturbation improved the objective
  14  verify: indemnity.csv disagrees with the solver
  15  verify: solver disagrees with the closed-form oracle

When several verify checks fail, the code of the first one listed wins.";

#[derive(Debug, Parser)]
#[command(name = "indemnity", version, about = "Optimal insurance indemnities by fixed-point iteration", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the iteration and write trace.json, indemnity.csv and report.json.
    Solve(RunArgs),
    /// Solve and run the invariant checks; writes verify.json.
    Verify(RunArgs),
    /// Solve and compare against the closed-form oracle; writes compare.csv,
    /// oracle_indemnity.csv and compare.json.
    Compare(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to the config's output_dir, then
    /// $INDEMNITY_OUT_DIR/<name>, then out/<name>.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Starting value: lower, upper or a number.
    #[arg(long)]
    pub m0: Option<M0Strategy>,
    /// Stopping tolerance on |M_n - M_{n-1}|.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for the perturbation trials.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Record wall time in the report (makes it differ between runs).
    #[arg(long)]
    pub timing: bool,
    #[arg(long, env = OUT_DIR_ENV, hide = true)]
    pub out_root: Option<PathBuf>,
}

impl RunArgs {
    pub fn scenario(&self) -> Result<ScenarioConfig, CliError> {
        let mut s = ScenarioConfig::load(&self.config)?;
        if let Some(m0) = self.m0 {
            s.solver.m0 = m0;
        }
        if let Some(tol) = self.tol {
            s.solver.m_tolerance = tol;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s.validate().map_err(|source| ConfigError::Invalid {
            path: self.config.clone(),
            source,
        })?;
        Ok(s)
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let (args, name) = match &cli.command {
        Command::Solve(a) => (a, "solve"),
        Command::Verify(a) => (a, "verify"),
        Command::Compare(a) => (a, "compare"),
    };
    let scenario = args.scenario()?;
    let out = resolve_out(args.out.as_deref(), &scenario, args.out_root.as_deref());
    let start = Instant::now();
    let mut outcome = match &cli.command {
        Command::Solve(_) => cmd_solve(&scenario, &out)?,
        Command::Verify(_) => cmd_verify(&scenario, &out)?,
        Command::Compare(_) => cmd_compare(&scenario, &out)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!("{name}: {:.3} s", elapsed);
    if args.timing {
        outcome.report.wall_time_seconds = Some(elapsed);
        let file = match &cli.command {
            Command::Solve(_) => "report.json",
            Command::Verify(_) => "verify.json",
            Command::Compare(_) => "compare.json",
        };
        report::write_json(&out.join(file), &outcome.report)?;
    }
    Ok(outcome)
}

fn summarize(outcome: &Outcome) {
    let r = &outcome.report;
    println!(
        "{}: M* = {}  d = {}  iterations = {}  residual = {:.3e}",
        r.scenario.name, r.m_star, r.deductible, r.iterations, r.fixed_point_residual
    );
    if let Some(o) = &r.oracle {
        println!(
            "oracle {:?}: M = {}  |dM| = {:.3e}  max |dI| = {:.3e}",
            o.family, o.m_oracle, o.m_delta, o.max_curve_delta
        );
    }
    for c in &r.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        match &c.detail {
            Some(d) => println!("{verdict} {}: {:.3e} (tolerance {:.1e}; {d})", c.name, c.value, c.tolerance),
            None => println!("{verdict} {}: {:.3e} (tolerance {:.1e})", c.name, c.value, c.tolerance),
        }
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            summarize(&outcome);
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Solver(crate::error::Error::NoConvergence(trace)) = &e {
                eprintln!("last M = {}", trace.final_m());
            }
            ExitCode::from(e.exit_code())
        }
    }
}
