use std::fs;
use std::io::{self, BufWriter};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::config::{check_axis, set_param, ConfigError, ExperimentConfig};
use super::scenario::{simulate, write_report, write_run_artifacts};
use crate::diagnostics::{fit_decay_in, DecayFit};
use crate::solver::Outcome;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: String,
    pub values: Vec<f64>,
    pub base: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub outcome: Option<Outcome>,
    pub sup_linf_u: Option<f64>,
    pub final_linf_u: Option<f64>,
    /// Fit of `‖u‖∞` over the second half of the run.
    pub fit: Option<DecayFit>,
    pub mu0: Option<f64>,
    pub mu_exceeds_mu0: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub axis: String,
    /// One row per requested value, in request order.
    pub rows: Vec<SweepRow>,
}

pub const SUMMARY_COLUMNS: [&str; 11] = [
    "index",
    "axis",
    "value",
    "outcome",
    "sup_linf_u",
    "final_linf_u",
    "fit_model",
    "fit_rate",
    "mu0",
    "mu_exceeds_mu0",
    "error",
];

impl SweepSummary {
    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let file = BufWriter::new(fs::File::create(path)?);
        let mut w = csv::Writer::from_writer(file);
        let num = |x: Option<f64>| x.map(|x| format!("{x:.17e}")).unwrap_or_default();
        w.write_record(SUMMARY_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.index.to_string(),
                self.axis.clone(),
                r.value.to_string(),
                r.outcome
                    .map(|o| o.as_str().to_string())
                    .unwrap_or_default(),
                num(r.sup_linf_u),
                num(r.final_linf_u),
                r.fit
                    .map(|f| f.model.as_str().to_string())
                    .unwrap_or_default(),
                num(r.fit.map(|f| f.rate)),
                num(r.mu0),
                r.mu_exceeds_mu0.map(|b| b.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()
    }

    /// Ordering the points by decreasing axis value, `sup ‖u‖∞` never
    /// decreases. False if any point lacks a value.
    pub fn sup_nondecreasing_as_axis_decreases(&self) -> bool {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for r in &self.rows {
            match r.sup_linf_u {
                Some(s) => pts.push((r.value, s)),
                None => return false,
            }
        }
        pts.sort_by(|a, b| b.0.total_cmp(&a.0));
        pts.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

/// Worker cap: `KSLAB_WORKERS` if set to a positive integer, otherwise the
/// available parallelism.
pub fn worker_cap() -> usize {
    std::env::var("KSLAB_WORKERS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run_point(base: &ExperimentConfig, axis: &str, index: usize, value: f64) -> SweepRow {
    let mut row = SweepRow {
        index,
        value,
        outcome: None,
        sup_linf_u: None,
        final_linf_u: None,
        fit: None,
        mu0: None,
        mu_exceeds_mu0: None,
        error: None,
    };
    let mut cfg = base.clone();
    set_param(&mut cfg.params, axis, value);
    cfg.output = base.output.join(format!("point_{index:03}"));
    let run = match simulate(&cfg) {
        Ok(run) => run,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let traj = &run.trajectory;
    row.outcome = Some(traj.outcome);
    row.sup_linf_u = Some(traj.sup_linf_u());
    row.final_linf_u = traj.diagnostics.last().map(|r| r.linf_u);
    row.mu0 = Some(run.report.mu0);
    row.mu_exceeds_mu0 = Some(run.report.applicability.mu_exceeds_mu0);
    let t_last = traj.final_state.t;
    let window = cfg.window.unwrap_or((0.5 * t_last, t_last));
    let times = traj.diagnostics.times();
    let linf: Vec<f64> = traj.diagnostics.records.iter().map(|r| r.linf_u).collect();
    row.fit = fit_decay_in(&times, &linf, window).ok();
    let written = write_run_artifacts(&cfg.output, &cfg.grid, &run)
        .map_err(|e| e.to_string())
        .and_then(|_| {
            write_report(&cfg.output.join("report.txt"), &run.lines).map_err(|e| e.to_string())
        });
    if let Err(e) = written {
        row.error = Some(e);
    }
    row
}

/// Runs every point of the sweep, concurrently up to [`worker_cap`], and
/// writes `summary.csv` into the base output directory.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepSummary, ConfigError> {
    let constraint = |message: String| ConfigError::Constraint {
        scenario: "sweep",
        message,
    };
    if spec.values.is_empty() {
        return Err(constraint("values list is empty".into()));
    }
    check_axis(&spec.base.params, &spec.axis, &spec.values).map_err(constraint)?;

    let n = spec.values.len();
    let workers = worker_cap().min(n);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; n]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let row = run_point(&spec.base, &spec.axis, i, spec.values[i]);
                slots.lock().expect("no panics while holding the lock")[i] = Some(row);
            });
        }
    });
    let rows = slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every point ran"))
        .collect();
    let summary = SweepSummary {
        axis: spec.axis.clone(),
        rows,
    };
    let written = fs::create_dir_all(&spec.base.output)
        .and_then(|_| summary.write_csv(&spec.base.output.join("summary.csv")));
    if let Err(e) = written {
        return Err(constraint(format!("writing summary: {e}")));
    }
    Ok(summary)
}
