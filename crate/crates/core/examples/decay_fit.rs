//! Decay of spatially uniform data without linear growth and with a linear
//! death rate: the first decays like a power of t, the second exponentially.
//! Both runs are audited against the guaranteed rates and the fitted models
//! are printed.

use kslab::diagnostics::{convergence_audit, fit_decay_in, AuditOptions, Monitor};
use kslab::solver::{initial_condition, InitialCondition, Solver, SolverConfig};
use kslab::thresholds::report;
use kslab::{Grid, Parameters, SourceFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit(1, 16)?;
    let cfg = SolverConfig {
        t_end: 10.0,
        dt_initial: 1e-3,
        snapshot_stride: 100,
        ..Default::default()
    };
    let initial = InitialCondition::ConstantPlusPerturbation {
        u: 1.0,
        v: 1.0,
        amplitude: 0.0,
        seed: 0,
    };
    for (label, params) in [
        (
            "kappa = 0",
            Parameters {
                kappa: 0.0,
                ..Parameters::unit(1.0)
            },
        ),
        (
            "kappa = -1, chi = 0",
            Parameters {
                kappa: -1.0,
                chi: 0.0,
                ..Parameters::unit(1.0)
            },
        ),
    ] {
        println!("== {label}");
        let monitor = Monitor::new(grid.clone(), params);
        let traj = Solver::new(
            grid.clone(),
            params,
            SourceFunction::from_params(&params),
            cfg.clone(),
        )?
        .run(initial_condition(&initial, &grid)?, &monitor)?;
        let last = traj.diagnostics.last().expect("at least one sample");
        println!(
            "  mass_u(10) = {:.8}   (1/11 = {:.8})",
            last.mass_u,
            1.0 / 11.0
        );
        let times = traj.diagnostics.times();
        for column in ["Linf_u", "Linf_v"] {
            let values = traj.diagnostics.column(column).expect("known column");
            let values: Vec<f64> = values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
            let fit = fit_decay_in(&times, &values, (5.0, 10.0))?;
            println!(
                "  {column}: {} rate {:.4} (exp R^2 {:.6}, power R^2 {:.6})",
                fit.model.as_str(),
                fit.rate,
                fit.exponential.r_squared,
                fit.algebraic.r_squared
            );
        }
        let verdict = convergence_audit(
            &traj,
            &params,
            &report(&params, false)?,
            AuditOptions::default(),
        )?;
        for (k, v) in verdict.lines() {
            println!("  {k}: {v}");
        }
    }
    Ok(())
}
