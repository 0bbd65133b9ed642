//! Bump initial data on a 32^3 box with damping 20% above the
//! three-dimensional threshold. Prints the monitored norms and checks that
//! the coupled functional stays bounded.

use kslab::diagnostics::{mass_bound_check, Monitor};
use kslab::solver::{initial_condition, InitialCondition, Solver, SolverConfig};
use kslab::thresholds::{gamma_rate, mu0_3d, select_coefficients_3d};
use kslab::{Grid, Parameters, SourceFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells: usize = std::env::args().nth(1).map_or(Ok(32), |s| s.parse())?;
    let t_end: f64 = std::env::args().nth(2).map_or(Ok(20.0), |s| s.parse())?;

    let base = Parameters::unit(1.0);
    let mu0 = mu0_3d(&base, false)?.value;
    let params = Parameters {
        mu: 1.2 * mu0,
        ..base
    };
    println!(
        "mu0 = {mu0:.6}, mu = {:.6}, gamma = {:.3e}",
        params.mu,
        gamma_rate(&params)?.gamma
    );

    let grid = Grid::unit(3, cells)?;
    let coefficients = select_coefficients_3d(&params, params.mu)?;
    let monitor = Monitor::new(grid.clone(), params).with_z3(coefficients);
    let (u_star, v_star) = params.equilibrium();
    let initial = initial_condition(
        &InitialCondition::GaussianBump {
            u_base: u_star,
            v_base: v_star,
            amplitude: 5.0,
            width: 0.1,
            centre: None,
        },
        &grid,
    )?;
    let u0_mass = initial.u.sum() * grid.cell_volume();

    let cfg = SolverConfig {
        t_end,
        dt_initial: 0.01,
        snapshot_stride: 10,
        ..Default::default()
    };
    let source = SourceFunction::from_params(&params);
    let certificate = source.certificate().expect("logistic source is certified");
    let start = std::time::Instant::now();
    let traj = Solver::new(grid.clone(), params, source, cfg)?.run(initial, &monitor)?;
    println!(
        "outcome {} after {} steps in {:.1?}",
        traj.outcome.as_str(),
        traj.steps,
        start.elapsed()
    );

    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}",
        "t", "mass_u", "Linf_u", "z3", "eq_dist"
    );
    let every = (traj.diagnostics.len() / 20).max(1);
    for r in traj.diagnostics.records.iter().step_by(every) {
        println!(
            "{:>8.3} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
            r.t,
            r.mass_u,
            r.linf_u,
            r.z3.unwrap_or(f64::NAN),
            r.equilibrium_distance.unwrap_or(f64::NAN)
        );
    }
    let early = traj
        .diagnostics
        .max_in("z3", 0.0, 0.3 * t_end)
        .unwrap_or(f64::NAN);
    let late = traj
        .diagnostics
        .max_in("z3", 0.7 * t_end, t_end)
        .unwrap_or(f64::NAN);
    let mass = mass_bound_check(&traj.diagnostics, certificate, u0_mass, grid.measure());
    println!(
        "z3 max early {early:.6e}, late {late:.6e}, ratio {:.4}",
        late / early
    );
    println!(
        "mass bound {} (worst margin {:.4e})",
        mass.passed, mass.worst_margin
    );
    println!("clamp count {}", traj.clamp_count);
    Ok(())
}
