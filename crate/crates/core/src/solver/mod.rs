//! Finite-volume IMEX time stepping on boxes with no-flux boundaries.
//!
//! Cells are centred, boundary faces carry zero flux. One step applies the
//! explicit part (upwind chemotactic flux, reaction, optional forcing) and
//! then backward-Euler diffusion one axis at a time, each axis a set of
//! independent tridiagonal solves. The step size follows the positivity
//! limits of the explicit part, so with `cfl_safety <= 0.5` and a logistic
//! source no cell goes negative.

mod initial;
mod mms;
pub mod snapshot;
mod tridiag;

use std::sync::Arc;

use ndarray::{ArrayD, Axis, Zip};
use thiserror::Error;

use crate::diagnostics::{DiagnosticsSeries, Monitor};
use crate::params::{Grid, ParamError, Parameters, SourceFunction, State};

pub use initial::{initial_condition, InitialCondition};
pub use mms::{refinement_study, ManufacturedProblem, RefinementResult};
pub use tridiag::{solve_tridiagonal, NeumannTridiag};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("initial condition: {0}")]
    InitialCondition(String),
    #[error("refinement study: {0}")]
    Refinement(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ImexAdi,
    FullyExplicit,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::ImexAdi => "imex-adi",
            Scheme::FullyExplicit => "fully-explicit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "imex-adi" => Some(Scheme::ImexAdi),
            "fully-explicit" => Some(Scheme::FullyExplicit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Largest step taken; the adaptive limits can only shrink it.
    pub dt_initial: f64,
    pub dt_min: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
    pub blowup_linf_threshold: f64,
    /// Steps between diagnostic samples.
    pub snapshot_stride: usize,
    /// Half-step diffusion on both sides of the explicit update.
    pub strang: bool,
    /// Keep the sampled states in the trajectory.
    pub keep_states: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt_initial: 1e-2,
            dt_min: 1e-10,
            t_end: 1.0,
            cfl_safety: 0.5,
            scheme: Scheme::ImexAdi,
            blowup_linf_threshold: 1e8,
            snapshot_stride: 10,
            strang: false,
            keep_states: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::Config(m.into()));
        if !(self.dt_min > 0.0 && self.dt_initial.is_finite() && self.dt_min < self.dt_initial) {
            return bad("need 0 < dt_min < dt_initial");
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be finite and nonnegative");
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad("cfl_safety must lie in (0, 1]");
        }
        if !(self.blowup_linf_threshold > 0.0) {
            return bad("blowup_linf_threshold must be positive");
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    BlowupDetected,
    DtCollapse,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Completed => "completed",
            Outcome::BlowupDetected => "blowup-detected",
            Outcome::DtCollapse => "dt-collapse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Advanced { dt: f64 },
    BlowupDetected { dt: f64 },
    DtCollapse { dt: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sampled states when `keep_states` is set, otherwise empty.
    pub states: Vec<State>,
    pub final_state: State,
    pub diagnostics: DiagnosticsSeries,
    pub outcome: Outcome,
    pub steps: u64,
    pub clamp_count: u64,
    pub t_end: f64,
}

impl Trajectory {
    pub fn sup_linf_u(&self) -> f64 {
        self.diagnostics
            .records
            .iter()
            .fold(0.0, |m, r| m.max(r.linf_u))
    }
}

/// Source terms `(g_u, g_v)` added to the right-hand sides, as functions of
/// the cell centre and time.
pub type Forcing = Arc<dyn Fn(&[f64], f64) -> (f64, f64) + Send + Sync>;

/// Values below this are counted as genuine negativity before clamping.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

pub struct Solver {
    grid: Grid,
    params: Parameters,
    source: SourceFunction,
    cfg: SolverConfig,
    forcing: Option<Forcing>,
    clamp_count: u64,
    du: ArrayD<f64>,
    dv: ArrayD<f64>,
    lane: Vec<f64>,
}

impl Solver {
    pub fn new(
        grid: Grid,
        params: Parameters,
        source: SourceFunction,
        cfg: SolverConfig,
    ) -> Result<Self, SolverError> {
        let params = params.validate()?;
        cfg.validate()?;
        let du = grid.zeros();
        let dv = grid.zeros();
        Ok(Solver {
            grid,
            params,
            source,
            cfg,
            forcing: None,
            clamp_count: 0,
            du,
            dv,
            lane: Vec::new(),
        })
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn clamp_count(&self) -> u64 {
        self.clamp_count
    }

    /// Largest `|v_{i+1} - v_i| / h` over interior faces, per axis.
    fn max_face_gradients(&self, v: &ArrayD<f64>) -> Vec<f64> {
        (0..self.grid.dim())
            .map(|axis| {
                let h = self.grid.spacing(axis);
                let mut m: f64 = 0.0;
                for lane in v.lanes(Axis(axis)) {
                    for w in lane.windows(2) {
                        m = m.max((w[1] - w[0]).abs());
                    }
                }
                m / h
            })
            .collect()
    }

    /// Step size the adaptive rule would accept at `state`, before clipping
    /// to the final time.
    pub fn stable_dt(&self, state: &State) -> f64 {
        let p = &self.params;
        let grad = self.max_face_gradients(&state.v);
        let advective: f64 = grad
            .iter()
            .enumerate()
            .map(|(k, g)| 2.0 * p.chi.abs() * g / self.grid.spacing(k))
            .sum();
        let max_u = state.u.iter().fold(0.0f64, |m, &x| m.max(x));
        let reaction = self.source.lipschitz(max_u).max(p.beta);
        let mut rate = advective.max(reaction);
        if self.cfg.scheme == Scheme::FullyExplicit {
            let d = p.d1.max(p.d2);
            let diffusive: f64 = (0..self.grid.dim())
                .map(|k| 2.0 * d / self.grid.spacing(k).powi(2))
                .sum();
            rate = rate.max(diffusive);
        }
        let limit = if rate > 0.0 {
            self.cfg.cfl_safety / rate
        } else {
            f64::INFINITY
        };
        self.cfg.dt_initial.min(limit)
    }

    /// Explicit right-hand side into `du`, `dv`.
    fn explicit_rates(&mut self, state: &State) {
        let p = self.params;
        let du = &mut self.du;
        let dv = &mut self.dv;
        let source = &self.source;
        Zip::from(&mut *du)
            .and(&mut *dv)
            .and(&state.u)
            .and(&state.v)
            .for_each(|du, dv, &u, &v| {
                *du = source.value(u);
                *dv = p.alpha * u - p.beta * v;
            });
        for axis in 0..self.grid.dim() {
            let h = self.grid.spacing(axis);
            if p.chi != 0.0 {
                Zip::from(du.lanes_mut(Axis(axis)))
                    .and(state.u.lanes(Axis(axis)))
                    .and(state.v.lanes(Axis(axis)))
                    .for_each(|mut d, u, v| {
                        for i in 0..u.len() - 1 {
                            let a = p.chi * (v[i + 1] - v[i]) / h;
                            let flux = if a >= 0.0 { a * u[i] } else { a * u[i + 1] } / h;
                            d[i] -= flux;
                            d[i + 1] += flux;
                        }
                    });
            }
            if self.cfg.scheme == Scheme::FullyExplicit {
                add_explicit_diffusion(du, &state.u, p.d1 / (h * h), axis);
                add_explicit_diffusion(dv, &state.v, p.d2 / (h * h), axis);
            }
        }
        if let Some(forcing) = &self.forcing {
            let t = state.t;
            let centres = cell_centres(&self.grid);
            Zip::from(&mut *du)
                .and(&mut *dv)
                .and(&centres)
                .for_each(|du, dv, x| {
                    let (gu, gv) = forcing(x, t);
                    *du += gu;
                    *dv += gv;
                });
        }
    }

    fn implicit_diffusion(&mut self, state: &mut State, dt: f64) {
        for axis in 0..self.grid.dim() {
            let h = self.grid.spacing(axis);
            let n = self.grid.cells()[axis];
            for (field, d) in [
                (&mut state.u, self.params.d1),
                (&mut state.v, self.params.d2),
            ] {
                if d == 0.0 {
                    continue;
                }
                let solver = NeumannTridiag::new(n, d * dt / (h * h));
                let buf = &mut self.lane;
                for mut lane in field.lanes_mut(Axis(axis)) {
                    buf.clear();
                    buf.extend(lane.iter());
                    solver.solve_in_place(buf);
                    for (x, y) in lane.iter_mut().zip(buf.iter()) {
                        *x = *y;
                    }
                }
            }
        }
    }

    /// Advances `state` by one adaptive step.
    pub fn step(&mut self, state: &mut State) -> StepOutcome {
        let dt_stable = self.stable_dt(state);
        if dt_stable < self.cfg.dt_min {
            return StepOutcome::DtCollapse { dt: dt_stable };
        }
        let remaining = self.cfg.t_end - state.t;
        let clipped = remaining > 0.0 && remaining <= dt_stable;
        let dt = if clipped { remaining } else { dt_stable };
        self.advance(state, dt);
        if clipped {
            state.t = self.cfg.t_end;
        }
        let linf = state
            .u
            .iter()
            .fold(0.0f64, |m, &x| if x.is_nan() { f64::NAN } else { m.max(x) });
        if !(linf <= self.cfg.blowup_linf_threshold) {
            return StepOutcome::BlowupDetected { dt };
        }
        StepOutcome::Advanced { dt }
    }

    /// One step of exactly `dt`, without the adaptive rule or detector.
    pub fn advance(&mut self, state: &mut State, dt: f64) {
        let implicit = self.cfg.scheme == Scheme::ImexAdi;
        let strang = implicit && self.cfg.strang;
        if strang {
            self.implicit_diffusion(state, 0.5 * dt);
        }
        self.explicit_rates(state);
        Zip::from(&mut state.u)
            .and(&self.du)
            .for_each(|u, d| *u += dt * d);
        Zip::from(&mut state.v)
            .and(&self.dv)
            .for_each(|v, d| *v += dt * d);
        if implicit {
            self.implicit_diffusion(state, if strang { 0.5 * dt } else { dt });
        }
        let mut clamped = 0;
        for x in state.u.iter_mut().chain(state.v.iter_mut()) {
            if *x < 0.0 {
                if *x < -CLAMP_TOLERANCE {
                    clamped += 1;
                }
                *x = 0.0;
            }
        }
        self.clamp_count += clamped;
        state.t += dt;
    }

    /// Steps from `initial` to `t_end`, a detected blow-up, or a step-size
    /// collapse, sampling diagnostics every `snapshot_stride` steps and at the
    /// end.
    pub fn run(&mut self, initial: State, monitor: &Monitor) -> Result<Trajectory, SolverError> {
        initial.check_grid(&self.grid)?;
        let keep = self.cfg.keep_states;
        let mut state = initial;
        let mut series = DiagnosticsSeries::default();
        let mut states = Vec::new();
        let mut sample = |state: &State, clamps: u64, series: &mut DiagnosticsSeries| {
            series.records.push(monitor.record(state, clamps));
            if keep {
                states.push(state.clone());
            }
        };
        sample(&state, self.clamp_count, &mut series);
        let linf0 = state.u.iter().fold(0.0f64, |m, &x| m.max(x));
        let mut outcome = if linf0 > self.cfg.blowup_linf_threshold {
            Outcome::BlowupDetected
        } else {
            Outcome::Completed
        };
        let mut steps = 0u64;
        while outcome == Outcome::Completed && state.t < self.cfg.t_end {
            match self.step(&mut state) {
                StepOutcome::Advanced { .. } => {}
                StepOutcome::BlowupDetected { .. } => outcome = Outcome::BlowupDetected,
                StepOutcome::DtCollapse { .. } => {
                    outcome = Outcome::DtCollapse;
                    break;
                }
            }
            steps += 1;
            let last = outcome != Outcome::Completed || state.t >= self.cfg.t_end;
            if steps.is_multiple_of(self.cfg.snapshot_stride as u64) || last {
                sample(&state, self.clamp_count, &mut series);
            }
        }
        Ok(Trajectory {
            states,
            final_state: state,
            diagnostics: series,
            outcome,
            steps,
            clamp_count: self.clamp_count,
            t_end: self.cfg.t_end,
        })
    }
}

fn add_explicit_diffusion(out: &mut ArrayD<f64>, w: &ArrayD<f64>, coeff: f64, axis: usize) {
    Zip::from(out.lanes_mut(Axis(axis)))
        .and(w.lanes(Axis(axis)))
        .for_each(|mut d, w| {
            for i in 0..w.len() - 1 {
                let q = coeff * (w[i + 1] - w[i]);
                d[i] += q;
                d[i + 1] -= q;
            }
        });
}

fn cell_centres(grid: &Grid) -> ArrayD<Vec<f64>> {
    let h: Vec<f64> = (0..grid.dim()).map(|k| grid.spacing(k)).collect();
    ArrayD::from_shape_fn(grid.shape(), |idx| {
        (0..grid.dim())
            .map(|k| (idx[k] as f64 + 0.5) * h[k])
            .collect()
    })
}

/// One adaptive step as a pure function.
pub fn step(
    state: &State,
    grid: &Grid,
    params: &Parameters,
    source: &SourceFunction,
    cfg: &SolverConfig,
) -> Result<(State, StepOutcome), SolverError> {
    state.check_grid(grid)?;
    let mut solver = Solver::new(grid.clone(), *params, source.clone(), cfg.clone())?;
    let mut next = state.clone();
    let outcome = solver.step(&mut next);
    Ok((next, outcome))
}

/// Runs with a monitor that records norms and, for `kappa > 0`, H.
pub fn run(
    initial: State,
    grid: &Grid,
    params: &Parameters,
    source: &SourceFunction,
    cfg: &SolverConfig,
) -> Result<Trajectory, SolverError> {
    let mut solver = Solver::new(grid.clone(), *params, source.clone(), cfg.clone())?;
    let monitor = Monitor::new(grid.clone(), *params);
    solver.run(initial, &monitor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn logistic(p: &Parameters) -> SourceFunction {
        SourceFunction::from_params(p)
    }

    fn bump(grid: &Grid, amplitude: f64) -> State {
        initial_condition(
            &InitialCondition::GaussianBump {
                u_base: 0.5,
                v_base: 0.5,
                amplitude,
                width: 0.1,
                centre: None,
            },
            grid,
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig {
                dt_min: 1.0,
                ..Default::default()
            },
            SolverConfig {
                cfl_safety: 1.5,
                ..Default::default()
            },
            SolverConfig {
                blowup_linf_threshold: 0.0,
                ..Default::default()
            },
            SolverConfig {
                snapshot_stride: 0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        for scheme in [Scheme::ImexAdi, Scheme::FullyExplicit] {
            let grid = Grid::unit(2, 16).unwrap();
            let p = Parameters {
                kappa: 2.0,
                mu: 3.0,
                chi: 4.0,
                ..Parameters::unit(3.0)
            };
            let (us, vs) = p.equilibrium();
            let mut state = State::new(grid.constant(us), grid.constant(vs), 0.0).unwrap();
            let cfg = SolverConfig {
                scheme,
                ..Default::default()
            };
            let mut solver = Solver::new(grid, p, logistic(&p), cfg).unwrap();
            for _ in 0..50 {
                solver.step(&mut state);
                for &u in state.u.iter() {
                    assert_relative_eq!(u, us, max_relative = 1e-12);
                }
                for &v in state.v.iter() {
                    assert_relative_eq!(v, vs, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn mass_conserved_without_reaction() {
        let grid = Grid::unit(2, 16).unwrap();
        let p = Parameters {
            chi: 0.0,
            kappa: 0.0,
            ..Parameters::unit(1.0)
        };
        let zero = SourceFunction::zero();
        let mut solver = Solver::new(grid.clone(), p, zero, SolverConfig::default()).unwrap();
        let mut s = bump(&grid, 3.0);
        let mut mass = s.u.sum();
        for _ in 0..20 {
            solver.step(&mut s);
            let next = s.u.sum();
            assert_relative_eq!(next, mass, max_relative = 1e-12);
            mass = next;
        }
    }

    #[test]
    fn transport_conserves_mass() {
        let grid = Grid::unit(3, 8).unwrap();
        let p = Parameters {
            chi: 5.0,
            kappa: 0.0,
            ..Parameters::unit(1.0)
        };
        let zero = SourceFunction::zero();
        let mut solver = Solver::new(grid.clone(), p, zero, SolverConfig::default()).unwrap();
        let mut s = bump(&grid, 3.0);
        s.v = grid.sample(|x| x[0] * x[0] + (3.0 * x[1]).sin() + 1.0);
        let mass = s.u.sum();
        for _ in 0..10 {
            solver.step(&mut s);
        }
        assert_relative_eq!(s.u.sum(), mass, max_relative = 1e-12);
    }

    #[test]
    fn uniform_logistic_decay() {
        let grid = Grid::unit(1, 8).unwrap();
        let p = Parameters {
            chi: 0.0,
            kappa: 0.0,
            ..Parameters::unit(1.0)
        };
        let cfg = SolverConfig {
            dt_initial: 1e-3,
            t_end: 10.0,
            snapshot_stride: 100,
            ..Default::default()
        };
        let s = State::new(grid.constant(1.0), grid.constant(1.0), 0.0).unwrap();
        let traj = run(s, &grid, &p, &logistic(&p), &cfg).unwrap();
        assert_eq!(traj.outcome, Outcome::Completed);
        let last = traj.diagnostics.last().unwrap();
        assert_eq!(last.t, 10.0);
        assert!((last.mass_u - 1.0 / 11.0).abs() < 1e-4, "{}", last.mass_u);
    }

    #[test]
    fn blowup_detected_on_initial_state() {
        let grid = Grid::unit(2, 8).unwrap();
        let p = Parameters::unit(10.0);
        let cfg = SolverConfig {
            blowup_linf_threshold: 1.0,
            ..Default::default()
        };
        let traj = run(bump(&grid, 5.0), &grid, &p, &logistic(&p), &cfg).unwrap();
        assert_eq!(traj.outcome, Outcome::BlowupDetected);
        assert_eq!(traj.steps, 0);
        assert_eq!(traj.diagnostics.len(), 1);
    }

    #[test]
    fn dt_collapse_reported() {
        let grid = Grid::unit(1, 8).unwrap();
        let p = Parameters::unit(1e12);
        let cfg = SolverConfig {
            dt_min: 1e-6,
            ..Default::default()
        };
        let traj = run(bump(&grid, 5.0), &grid, &p, &logistic(&p), &cfg).unwrap();
        assert_eq!(traj.outcome, Outcome::DtCollapse);
    }

    #[test]
    fn one_dimensional_strong_chemotaxis_stays_bounded() {
        let grid = Grid::unit(1, 64).unwrap();
        let p = Parameters {
            chi: 5.0,
            ..Parameters::unit(1.0)
        };
        let cfg = SolverConfig {
            t_end: 5.0,
            ..Default::default()
        };
        let traj = run(bump(&grid, 5.0), &grid, &p, &logistic(&p), &cfg).unwrap();
        assert_eq!(traj.outcome, Outcome::Completed);
        assert_eq!(traj.clamp_count, 0);
        assert!(traj.sup_linf_u() < 50.0);
        let times = traj.diagnostics.times();
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn strang_and_lie_agree_to_first_order() {
        let grid = Grid::unit(1, 32).unwrap();
        let p = Parameters::unit(2.0);
        let end = |strang| {
            let cfg = SolverConfig {
                dt_initial: 1e-4,
                t_end: 0.1,
                strang,
                ..Default::default()
            };
            run(bump(&grid, 2.0), &grid, &p, &logistic(&p), &cfg)
                .unwrap()
                .final_state
        };
        let (a, b) = (end(false), end(true));
        let diff = Zip::from(&a.u)
            .and(&b.u)
            .fold(0.0f64, |m, x, y| m.max((x - y).abs()));
        assert!(diff < 1e-3, "{diff}");
    }

    #[test]
    fn deterministic() {
        let grid = Grid::unit(2, 16).unwrap();
        let p = Parameters::unit(4.0);
        let ic = InitialCondition::ConstantPlusPerturbation {
            u: 0.25,
            v: 0.25,
            amplitude: 0.2,
            seed: 11,
        };
        let cfg = SolverConfig {
            t_end: 0.5,
            ..Default::default()
        };
        let go = || {
            let s = initial_condition(&ic, &grid).unwrap();
            run(s, &grid, &p, &logistic(&p), &cfg).unwrap()
        };
        let (a, b) = (go(), go());
        assert_eq!(a.final_state.u, b.final_state.u);
        assert_eq!(a.diagnostics, b.diagnostics);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn doubling_chi_never_increases_dt(chi in 0.0..20.0f64, seed in 0u64..1000) {
                let grid = Grid::unit(2, 8).unwrap();
                let ic = InitialCondition::ConstantPlusPerturbation {
                    u: 1.0, v: 1.0, amplitude: 0.9, seed,
                };
                let mut s = initial_condition(&ic, &grid).unwrap();
                s.v = s.u.clone();
                let dt = |chi: f64| {
                    let p = Parameters { chi, ..Parameters::unit(1.0) };
                    Solver::new(grid.clone(), p, logistic(&p), SolverConfig::default())
                        .unwrap()
                        .stable_dt(&s)
                };
                prop_assert!(dt(2.0 * chi) <= dt(chi));
            }

            #[test]
            fn positivity(seed in 0u64..1000, chi in 0.0..10.0f64, mu in 0.1..5.0f64) {
                let grid = Grid::unit(2, 12).unwrap();
                let p = Parameters { chi, ..Parameters::unit(mu) };
                let ic = InitialCondition::ConstantPlusPerturbation {
                    u: 0.3, v: 0.1, amplitude: 1.0, seed,
                };
                let s = initial_condition(&ic, &grid).unwrap();
                let cfg = SolverConfig { t_end: 0.2, ..Default::default() };
                let traj = run(s, &grid, &p, &logistic(&p), &cfg).unwrap();
                prop_assert_eq!(traj.clamp_count, 0);
                prop_assert!(traj.final_state.u.iter().all(|&x| x >= 0.0));
            }

            #[test]
            fn translation_equivariance(shift in 1usize..6, chi in 0.0..3.0f64) {
                // explicit stencils reach one cell per step, so 20 steps from
                // a bump centred well inside a 96-cell line never see the walls
                let grid = Grid::unit(1, 96).unwrap();
                let p = Parameters { chi, ..Parameters::unit(1.0) };
                let cfg = SolverConfig { scheme: Scheme::FullyExplicit, ..Default::default() };
                let profile = |i: usize, at: usize| {
                    let d = i as f64 - at as f64;
                    if d.abs() < 8.0 { 1.0 + (8.0 - d.abs()) * 0.1 } else { 1.0 }
                };
                let make = |at: usize| {
                    let u = ArrayD::from_shape_fn(grid.shape(), |i| profile(i[0], at));
                    let v = ArrayD::from_shape_fn(grid.shape(), |i| profile(i[0], at) * 0.5);
                    State::new(u, v, 0.0).unwrap()
                };
                let mut a = make(40);
                let mut b = make(40 + shift);
                let mut sa = Solver::new(grid.clone(), p, logistic(&p), cfg.clone()).unwrap();
                let mut sb = Solver::new(grid.clone(), p, logistic(&p), cfg).unwrap();
                for _ in 0..20 {
                    sa.step(&mut a);
                    sb.step(&mut b);
                }
                for i in 10..70 {
                    prop_assert_eq!(a.u[[i]], b.u[[i + shift]]);
                    prop_assert_eq!(a.v[[i]], b.v[[i + shift]]);
                }
            }
        }
    }
}
