//! Solves the three exponential-loss scenarios and prints the iteration
//! summary next to the closed-form value of `M`.

use indemnity::oracles::{oracle_deductible, oracle_multilayer, oracle_quadratic};
use indemnity::{fixed_point_solve, Indemnity, LossDistribution, PremiumFunction, SolverConfig};

fn main() -> Result<(), indemnity::Error> {
    let loss = LossDistribution::exponential(1.0)?;
    let scenarios = [
        (PremiumFunction::expected_value(1.0 / 3.0)?, 2.0, oracle_deductible(2.0, 1.0, 1.0 / 3.0)?),
        (PremiumFunction::quadratic(0.5)?, 2.0, oracle_quadratic(2.0, 1.0, 0.5)?),
        (
            PremiumFunction::stop_loss(vec![0.1, 0.2], vec![1.0, 2.0])?,
            0.5,
            oracle_multilayer(0.5, 1.0, &[0.1, 0.2], &[1.0, 2.0])?,
        ),
    ];
    for (g, gamma, oracle) in scenarios {
        let (schedule, trace) = fixed_point_solve(&loss, &g, &SolverConfig::new(gamma))?;
        println!(
            "{:<15} M* = {:.8}  (closed form {:.8})  d = {:.6}  {} iterations",
            g.family(),
            schedule.m_star(),
            oracle.m,
            schedule.deductible(),
            trace.iterations.len()
        );
        for x in [0.5, 1.0, 2.0, 3.0, 4.0] {
            println!("    I({x:.1}) = {:.6}", schedule.eval(x));
        }
    }
    Ok(())
}
