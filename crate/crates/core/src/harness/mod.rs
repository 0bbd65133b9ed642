//! Configuration files, scenarios, sweeps and the command line.
//!
//! A config has five sections:
//!
//! ```text
//! [params]    d1 d2 chi alpha beta kappa mu (required), a n (optional)
//! [grid]      cells (required), extents
//! [solver]    dt_initial dt_min t_end cfl_safety scheme blowup_linf_threshold
//!             snapshot_stride strang keep_states
//! [ic]        kind = constant-plus-perturbation | gaussian-bump | custom-field
//! [scenario]  name (required), convex output seed window sweep_axis
//!             sweep_values levels
//! ```
//!
//! A scenario run writes `report.txt`, `diagnostics.csv` and raw snapshots
//! into its output directory and exits with 0 (audit passed), 2 (blow-up or
//! step-size collapse), 3 (configuration error) or 4 (audit failed).

mod cli;
mod config;
mod scenario;
mod sweep;

pub use cli::cli;
pub use config::{
    check_axis, parse_config, parse_list, set_param, ConfigError, ExperimentConfig, IcSpec,
    Scenario, PARAM_AXES,
};
pub use scenario::{
    build_initial_state, run_scenario, simulate, write_report, write_run_artifacts, z_trend,
    ExitStatus, PointRun, ScenarioError, ScenarioResult,
};
pub use sweep::{run_sweep, worker_cap, SweepRow, SweepSpec, SweepSummary, SUMMARY_COLUMNS};
