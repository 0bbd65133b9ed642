use kslab::diagnostics::{read_csv_column, Monitor};
use kslab::solver::snapshot::{read_snapshot, write_snapshot};
use kslab::solver::{
    initial_condition, run, step, InitialCondition, Outcome, Scheme, Solver, SolverConfig,
    StepOutcome,
};
use kslab::{Grid, Parameters, SourceFunction};

fn bump() -> InitialCondition {
    InitialCondition::GaussianBump {
        u_base: 0.5,
        v_base: 0.5,
        amplitude: 2.0,
        width: 0.15,
        centre: Some(vec![0.3, 0.6]),
    }
}

#[test]
fn pure_step_matches_stateful_step() {
    let grid = Grid::unit(2, 24).unwrap();
    let params = Parameters::unit(3.0);
    let source = SourceFunction::from_params(&params);
    let cfg = SolverConfig::default();
    let state = initial_condition(&bump(), &grid).unwrap();
    let (next, outcome) = step(&state, &grid, &params, &source, &cfg).unwrap();
    let mut solver = Solver::new(grid, params, source, cfg).unwrap();
    let mut again = state.clone();
    assert_eq!(solver.step(&mut again), outcome);
    assert_eq!(next, again);
    assert!(matches!(outcome, StepOutcome::Advanced { dt } if dt > 0.0));
}

#[test]
fn runs_are_reproducible_and_end_at_t_end() {
    let grid = Grid::unit(2, 20).unwrap();
    let params = Parameters::unit(3.0);
    let source = SourceFunction::from_params(&params);
    let cfg = SolverConfig {
        t_end: 0.37,
        ..Default::default()
    };
    let ic = initial_condition(&bump(), &grid).unwrap();
    let a = run(ic.clone(), &grid, &params, &source, &cfg).unwrap();
    let b = run(ic, &grid, &params, &source, &cfg).unwrap();
    assert_eq!(a.outcome, Outcome::Completed);
    assert_eq!(a.final_state.t, 0.37);
    assert_eq!(a.final_state, b.final_state);
    assert_eq!(a.diagnostics, b.diagnostics);
}

#[test]
fn schemes_agree_on_a_smooth_problem() {
    let grid = Grid::unit(1, 64).unwrap();
    let params = Parameters::unit(3.0);
    let source = SourceFunction::from_params(&params);
    let ic = initial_condition(
        &InitialCondition::GaussianBump {
            u_base: 0.5,
            v_base: 0.5,
            amplitude: 1.0,
            width: 0.2,
            centre: None,
        },
        &grid,
    )
    .unwrap();
    let mut finals = Vec::new();
    for scheme in [Scheme::ImexAdi, Scheme::FullyExplicit] {
        let cfg = SolverConfig {
            scheme,
            t_end: 0.2,
            dt_initial: 1e-4,
            ..Default::default()
        };
        finals.push(
            run(ic.clone(), &grid, &params, &source, &cfg)
                .unwrap()
                .final_state,
        );
    }
    let gap = finals[0]
        .u
        .iter()
        .zip(finals[1].u.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-3, "{gap}");
}

#[test]
fn snapshot_and_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::new(&[2.0, 1.0], &[8, 6]).unwrap();
    let params = Parameters::unit(3.0);
    let state = initial_condition(&bump(), &grid).unwrap();
    let path = write_snapshot(dir.path(), "u_0000", "u", &state.u, &grid, 0.25).unwrap();
    let (header, field) = read_snapshot(&path).unwrap();
    assert_eq!(header.cells, vec![8, 6]);
    assert_eq!(header.extents, vec![2.0, 1.0]);
    assert_eq!(header.t, 0.25);
    assert_eq!(header.field, "u");
    assert_eq!(field, state.u);

    let cfg = SolverConfig {
        t_end: 0.1,
        snapshot_stride: 1,
        ..Default::default()
    };
    let monitor = Monitor::new(grid.clone(), params);
    let traj = Solver::new(grid, params, SourceFunction::from_params(&params), cfg)
        .unwrap()
        .run(state, &monitor)
        .unwrap();
    let mut buf = Vec::new();
    traj.diagnostics.write_csv(&mut buf).unwrap();
    let (t, linf) = read_csv_column(buf.as_slice(), "Linf_u").unwrap();
    assert_eq!(t, traj.diagnostics.times());
    let expected: Vec<f64> = traj.diagnostics.records.iter().map(|r| r.linf_u).collect();
    assert_eq!(linf, expected);
}
