use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::config::{ExperimentConfig, IcSpec, Scenario};
use super::sweep::{run_sweep, SweepSpec};
use crate::diagnostics::{
    convergence_audit, mass_bound_check, AuditOptions, DiagnosticsError, Monitor,
};
use crate::params::{Grid, SourceFunction, State};
use crate::solver::snapshot::{read_snapshot, write_snapshot};
use crate::solver::{
    initial_condition, refinement_study, InitialCondition, ManufacturedProblem, Outcome, Solver,
    SolverError, Trajectory,
};
use crate::thresholds::{
    mu0_general, report, select_coefficients_3d, select_coefficients_45d, ThresholdError,
    ThresholdReport,
};

/// Process exit codes of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass,
    Blowup,
    ConfigError,
    AuditFail,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Blowup => 2,
            ExitStatus::ConfigError => 3,
            ExitStatus::AuditFail => 4,
        }
    }
}

#[derive(Debug)]
pub struct ScenarioResult {
    pub status: ExitStatus,
    /// The `key: value` lines written to `report.txt`.
    pub report: Vec<(String, String)>,
    pub trajectory: Option<Trajectory>,
}

impl ScenarioResult {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.report
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("{0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

/// Everything one simulation of a config produces.
#[derive(Debug)]
pub struct PointRun {
    pub report: ThresholdReport,
    pub lines: Vec<(String, String)>,
    pub initial: State,
    pub trajectory: Trajectory,
}

fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

fn flag(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

pub fn build_initial_state(cfg: &ExperimentConfig) -> Result<State, ScenarioError> {
    let ic = match &cfg.ic {
        IcSpec::ConstantPlusPerturbation { u, v, amplitude } => {
            InitialCondition::ConstantPlusPerturbation {
                u: *u,
                v: *v,
                amplitude: *amplitude,
                seed: cfg.seed,
            }
        }
        IcSpec::GaussianBump {
            u_base,
            v_base,
            amplitude,
            width,
            centre,
        } => InitialCondition::GaussianBump {
            u_base: *u_base,
            v_base: *v_base,
            amplitude: *amplitude,
            width: *width,
            centre: centre.clone(),
        },
        IcSpec::CustomField { u_file, v_file } => {
            let (hu, u) = read_snapshot(u_file)?;
            let (hv, v) = read_snapshot(v_file)?;
            for h in [&hu, &hv] {
                if h.cells != cfg.grid.cells() {
                    return Err(ScenarioError::Config(format!(
                        "snapshot {} has cells {:?}, grid has {:?}",
                        h.field,
                        h.cells,
                        cfg.grid.cells()
                    )));
                }
            }
            InitialCondition::Custom { u, v }
        }
    };
    Ok(initial_condition(&ic, &cfg.grid)?)
}

/// Threshold report, coefficient selection, and the simulation itself.
pub fn simulate(cfg: &ExperimentConfig) -> Result<PointRun, ScenarioError> {
    let p = cfg.params;
    let report = report(&p, cfg.convex)?;
    let mut lines: Vec<(String, String)> = vec![
        ("scenario".into(), cfg.scenario.as_str().into()),
        ("grid_cells".into(), format!("{:?}", cfg.grid.cells())),
    ];
    lines.extend(report.lines());
    let mut monitor = Monitor::new(cfg.grid.clone(), p);
    match p.n {
        3 => match select_coefficients_3d(&p, p.mu) {
            Ok(c) => {
                for (k, v) in [
                    ("eps1", c.eps1),
                    ("eps2", c.eps2),
                    ("eps3", c.eps3),
                    ("eps4", c.eps4),
                    ("delta1", c.delta1),
                    ("delta2", c.delta2),
                    ("delta3", c.delta3),
                ] {
                    lines.push((format!("coefficients_3d_{k}"), fmt(v)));
                }
                monitor = monitor.with_z3(c);
            }
            Err(e) => lines.push(("coefficients_3d".into(), format!("unavailable ({e})"))),
        },
        4 | 5 => match select_coefficients_45d(&p, p.mu) {
            Ok(c) => {
                for (k, v) in [
                    ("eps", c.eps),
                    ("eta", c.eta),
                    ("eps1", c.eps1),
                    ("eps2", c.eps2),
                    ("eps3", c.eps3),
                    ("eps4", c.eps4),
                    ("delta1", c.delta1),
                    ("delta2", c.delta2),
                    ("delta3", c.delta3),
                    ("delta4", c.delta4),
                ] {
                    lines.push((format!("coefficients_45d_{k}"), fmt(v)));
                }
                monitor = monitor.with_z45(c);
            }
            Err(e) => lines.push(("coefficients_45d".into(), format!("unavailable ({e})"))),
        },
        _ => {}
    }
    let initial = build_initial_state(cfg)?;
    let source = SourceFunction::from_params(&p);
    let mut solver = Solver::new(cfg.grid.clone(), p, source, cfg.solver.clone())?;
    let trajectory = solver.run(initial.clone(), &monitor)?;
    lines.push(("outcome".into(), trajectory.outcome.as_str().into()));
    lines.push(("steps".into(), trajectory.steps.to_string()));
    lines.push(("final_time".into(), fmt(trajectory.final_state.t)));
    lines.push(("clamp_count".into(), trajectory.clamp_count.to_string()));
    lines.push(("sup_linf_u".into(), fmt(trajectory.sup_linf_u())));
    Ok(PointRun {
        report,
        lines,
        initial,
        trajectory,
    })
}

pub fn write_report(path: &Path, lines: &[(String, String)]) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for (k, v) in lines {
        writeln!(w, "{k}: {v}")?;
    }
    w.flush()
}

/// Diagnostics table and field snapshots of a run.
pub fn write_run_artifacts(dir: &Path, grid: &Grid, run: &PointRun) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir)?;
    let mut csv = BufWriter::new(fs::File::create(dir.join("diagnostics.csv"))?);
    run.trajectory.diagnostics.write_csv(&mut csv)?;
    csv.flush()?;
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    let mut states: Vec<&State> = vec![&run.initial];
    if run.trajectory.states.is_empty() {
        states.push(&run.trajectory.final_state);
    } else {
        states.extend(run.trajectory.states.iter().skip(1));
    }
    for (i, s) in states.iter().enumerate() {
        write_snapshot(&snaps, &format!("u_{i:04}"), "u", &s.u, grid, s.t)?;
        write_snapshot(&snaps, &format!("v_{i:04}"), "v", &s.v, grid, s.t)?;
    }
    Ok(())
}

/// Checks shared by the simulation scenarios: positivity and the mass
/// bound.
fn basic_checks(
    run: &PointRun,
    grid: &Grid,
    cfg: &ExperimentConfig,
) -> Vec<(String, bool, String)> {
    let mut out = vec![(
        "clamp_zero".to_string(),
        run.trajectory.clamp_count == 0,
        run.trajectory.clamp_count.to_string(),
    )];
    if let Some(cert) = SourceFunction::from_params(&cfg.params).certificate() {
        let u0_mass = run.initial.u.sum() * grid.cell_volume();
        let m = mass_bound_check(&run.trajectory.diagnostics, cert, u0_mass, grid.measure());
        out.push(("mass_bound".into(), m.passed, fmt(m.worst_margin)));
    }
    out
}

/// `z3` (or `z45`) over the last 30% of the run stays within 5% of its
/// maximum over the first 30%.
pub fn z_trend(traj: &Trajectory, column: &str) -> Option<(bool, f64, f64)> {
    let t = traj.final_state.t;
    let early = traj.diagnostics.max_in(column, 0.0, 0.3 * t)?;
    let late = traj.diagnostics.max_in(column, 0.7 * t, t)?;
    Some((late <= 1.05 * early, early, late))
}

pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ScenarioResult, ScenarioError> {
    fs::create_dir_all(&cfg.output)?;
    fs::write(cfg.output.join("config.txt"), cfg.to_text())?;
    let result = match cfg.scenario {
        Scenario::SmallDiffusionSweep => run_sweep_scenario(cfg)?,
        Scenario::ManufacturedOrder => run_manufactured(cfg)?,
        _ => run_simulation_scenario(cfg)?,
    };
    let mut lines = result.report.clone();
    lines.push(("exit_code".into(), result.status.code().to_string()));
    write_report(&cfg.output.join("report.txt"), &lines)?;
    Ok(ScenarioResult {
        report: lines,
        ..result
    })
}

fn run_simulation_scenario(cfg: &ExperimentConfig) -> Result<ScenarioResult, ScenarioError> {
    let run = simulate(cfg)?;
    write_run_artifacts(&cfg.output, &cfg.grid, &run)?;
    let mut lines = run.lines.clone();
    let traj = &run.trajectory;

    if cfg.scenario == Scenario::ConvexComparison {
        let convex = mu0_general(&cfg.params, true)?;
        let general = mu0_general(&cfg.params, false)?;
        lines.push(("mu0_convex".into(), fmt(convex.value)));
        lines.push(("mu0_general".into(), fmt(general.value)));
        lines.push((
            "mu_exceeds_mu0_convex".into(),
            (cfg.params.mu > convex.value).to_string(),
        ));
        lines.push((
            "mu_exceeds_mu0_general".into(),
            (cfg.params.mu > general.value).to_string(),
        ));
        lines.push((
            "observed_bounded".into(),
            (traj.outcome == Outcome::Completed).to_string(),
        ));
    }

    if traj.outcome != Outcome::Completed {
        return Ok(ScenarioResult {
            status: ExitStatus::Blowup,
            report: lines,
            trajectory: Some(run.trajectory),
        });
    }

    let mut checks = basic_checks(&run, &cfg.grid, cfg);
    match cfg.scenario {
        Scenario::Boundedness => {
            for column in ["z3", "z45"] {
                if let Some((ok, early, late)) = z_trend(traj, column) {
                    lines.push((format!("{column}_max_early"), fmt(early)));
                    lines.push((format!("{column}_max_late"), fmt(late)));
                    checks.push((format!("{column}_bounded"), ok, fmt(late / early)));
                }
            }
        }
        Scenario::ConvergencePositiveKappa
        | Scenario::DecayZeroKappa
        | Scenario::DecayNegativeKappa => {
            let options = AuditOptions {
                window: cfg.window,
                ..Default::default()
            };
            match convergence_audit(traj, &cfg.params, &run.report, options) {
                Ok(v) => {
                    let passed = v.passed();
                    lines.extend(v.lines());
                    checks.push(("convergence".into(), passed, String::new()));
                }
                Err(e) => {
                    lines.push(("audit_error".into(), e.to_string()));
                    checks.push(("convergence".into(), false, String::new()));
                }
            }
        }
        _ => {}
    }
    let passed = push_checks(&mut lines, &checks);
    Ok(ScenarioResult {
        status: if passed {
            ExitStatus::Pass
        } else {
            ExitStatus::AuditFail
        },
        report: lines,
        trajectory: Some(run.trajectory),
    })
}

fn push_checks(lines: &mut Vec<(String, String)>, checks: &[(String, bool, String)]) -> bool {
    for (name, ok, detail) in checks {
        lines.push((format!("check_{name}"), flag(*ok)));
        if !detail.is_empty() {
            lines.push((format!("check_{name}_value"), detail.clone()));
        }
    }
    let passed = checks.iter().all(|c| c.1);
    lines.push(("audit".into(), flag(passed)));
    passed
}

fn run_sweep_scenario(cfg: &ExperimentConfig) -> Result<ScenarioResult, ScenarioError> {
    let spec = SweepSpec {
        axis: cfg.sweep_axis.clone(),
        values: cfg.sweep_values.clone(),
        base: cfg.clone(),
    };
    let summary = run_sweep(&spec).map_err(|e| ScenarioError::Config(e.to_string()))?;
    let mut lines = vec![
        ("scenario".into(), cfg.scenario.as_str().into()),
        ("sweep_axis".into(), spec.axis.clone()),
        ("sweep_points".into(), summary.rows.len().to_string()),
    ];
    for row in &summary.rows {
        lines.push((
            format!("point_{:03}", row.index),
            format!(
                "{} = {} outcome {} sup_linf_u {}",
                spec.axis,
                row.value,
                row.outcome.map_or("error", Outcome::as_str),
                row.sup_linf_u.map_or("absent".into(), fmt)
            ),
        ));
    }
    let blown = summary.rows.iter().any(|r| {
        matches!(
            r.outcome,
            Some(Outcome::BlowupDetected | Outcome::DtCollapse)
        )
    });
    let trend = summary.sup_nondecreasing_as_axis_decreases();
    let checks = vec![
        (
            "all_points_ran".to_string(),
            summary.rows.iter().all(|r| r.error.is_none()),
            String::new(),
        ),
        ("sup_trend".to_string(), trend, String::new()),
    ];
    let passed = push_checks(&mut lines, &checks);
    let status = if blown {
        ExitStatus::Blowup
    } else if passed {
        ExitStatus::Pass
    } else {
        ExitStatus::AuditFail
    };
    Ok(ScenarioResult {
        status,
        report: lines,
        trajectory: None,
    })
}

fn run_manufactured(cfg: &ExperimentConfig) -> Result<ScenarioResult, ScenarioError> {
    let chemotaxis = cfg.params.chi != 0.0;
    let problem = ManufacturedProblem {
        params: cfg.params,
        chemotaxis,
        t_end: cfg.solver.t_end,
        ..ManufacturedProblem::diffusion_only()
    };
    let mut grids = vec![cfg.grid.clone()];
    for _ in 1..cfg.levels {
        let last = grids.last().expect("nonempty");
        let cells: Vec<usize> = last.cells().iter().map(|c| 2 * c).collect();
        grids.push(Grid::new(last.extents(), &cells).map_err(SolverError::from)?);
    }
    let result = refinement_study(&problem, &grids)?;
    let mut lines = vec![
        ("scenario".into(), cfg.scenario.as_str().into()),
        ("chemotaxis".into(), chemotaxis.to_string()),
    ];
    for (cells, e) in result.cells.iter().zip(&result.errors) {
        lines.push((format!("error_{cells:?}"), fmt(*e)));
    }
    lines.push(("observed_order".into(), fmt(result.observed_order)));
    let order = result.observed_order;
    let ok = if chemotaxis {
        (0.8..=2.0).contains(&order)
    } else {
        (order - 2.0).abs() <= 0.2
    };
    let passed = push_checks(&mut lines, &[("order".into(), ok, String::new())]);
    Ok(ScenarioResult {
        status: if passed {
            ExitStatus::Pass
        } else {
            ExitStatus::AuditFail
        },
        report: lines,
        trajectory: None,
    })
}
