//! Convergence order against a manufactured solution
//! `u = A_u + B_u φ(x) e^{-t}`, `v = A_v + B_v φ(x) e^{-t}` with
//! `φ = Π_k cos(π x_k / L_k)`, which satisfies the no-flux condition.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{Solver, SolverConfig, SolverError};
use crate::diagnostics::{lp_norm, Lp};
use crate::params::{Grid, Parameters, SourceFunction, State};

#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedProblem {
    pub params: Parameters,
    /// Keep the chemotactic flux; otherwise `chi` is set to zero.
    pub chemotaxis: bool,
    pub t_end: f64,
    /// Step size as a multiple of the smallest `h^2`.
    pub dt_factor: f64,
    pub u_mean: f64,
    pub u_amplitude: f64,
    pub v_mean: f64,
    pub v_amplitude: f64,
}

impl ManufacturedProblem {
    pub fn diffusion_only() -> Self {
        ManufacturedProblem {
            params: Parameters {
                chi: 0.0,
                ..Parameters::unit(1.0)
            },
            chemotaxis: false,
            t_end: 0.1,
            dt_factor: 0.1,
            u_mean: 2.0,
            u_amplitude: 1.0,
            v_mean: 2.0,
            v_amplitude: 1.0,
        }
    }

    pub fn with_chemotaxis(chi: f64) -> Self {
        ManufacturedProblem {
            params: Parameters {
                chi,
                ..Parameters::unit(1.0)
            },
            chemotaxis: true,
            ..Self::diffusion_only()
        }
    }

    fn effective_params(&self) -> Parameters {
        if self.chemotaxis {
            self.params
        } else {
            Parameters {
                chi: 0.0,
                ..self.params
            }
        }
    }

    /// Exact `(u, v)` at `x`, `t`.
    pub fn exact(&self, extents: &[f64], x: &[f64], t: f64) -> (f64, f64) {
        let phi: f64 = x
            .iter()
            .zip(extents)
            .map(|(x, l)| (PI * x / l).cos())
            .product();
        let g = (-t).exp();
        (
            self.u_mean + self.u_amplitude * phi * g,
            self.v_mean + self.v_amplitude * phi * g,
        )
    }

    fn forcing(&self, extents: Vec<f64>) -> super::Forcing {
        let p = self.effective_params();
        let source = SourceFunction::from_params(&p);
        let me = self.clone();
        Arc::new(move |x: &[f64], t: f64| {
            let g = (-t).exp();
            let mut phi = 1.0;
            let mut lap_factor = 0.0;
            for (xk, lk) in x.iter().zip(&extents) {
                phi *= (PI * xk / lk).cos();
                lap_factor += (PI / lk).powi(2);
            }
            let mut grad_sq = 0.0;
            for k in 0..x.len() {
                let mut comp = -(PI / extents[k]) * (PI * x[k] / extents[k]).sin();
                for j in 0..x.len() {
                    if j != k {
                        comp *= (PI * x[j] / extents[j]).cos();
                    }
                }
                grad_sq += comp * comp;
            }
            let lap_phi = -lap_factor * phi;
            let (bu, bv) = (me.u_amplitude, me.v_amplitude);
            let u = me.u_mean + bu * phi * g;
            let v = me.v_mean + bv * phi * g;
            let u_t = -bu * phi * g;
            let v_t = -bv * phi * g;
            let lap_u = bu * g * lap_phi;
            let lap_v = bv * g * lap_phi;
            let div_u_grad_v = bu * bv * g * g * grad_sq + u * lap_v;
            let gu = u_t - p.d1 * lap_u + p.chi * div_u_grad_v - source.value(u);
            let gv = v_t - p.d2 * lap_v + p.beta * v - p.alpha * u;
            (gu, gv)
        })
    }

    /// Discrete L² error of `u` at `t_end` on one grid.
    pub fn error_on(&self, grid: &Grid) -> Result<f64, SolverError> {
        let p = self.effective_params();
        let extents = grid.extents().to_vec();
        let h_min = (0..grid.dim())
            .map(|k| grid.spacing(k))
            .fold(f64::INFINITY, f64::min);
        let cfg = SolverConfig {
            dt_initial: self.dt_factor * h_min * h_min,
            dt_min: 1e-14,
            t_end: self.t_end,
            snapshot_stride: usize::MAX,
            ..Default::default()
        };
        let u0 = grid.sample(|x| self.exact(&extents, x, 0.0).0);
        let v0 = grid.sample(|x| self.exact(&extents, x, 0.0).1);
        let mut state = State::new(u0, v0, 0.0)?;
        let mut solver = Solver::new(grid.clone(), p, SourceFunction::from_params(&p), cfg)?
            .with_forcing(self.forcing(extents.clone()));
        while state.t < self.t_end {
            if let super::StepOutcome::DtCollapse { dt } = solver.step(&mut state) {
                return Err(SolverError::Refinement(format!(
                    "step size collapsed to {dt}"
                )));
            }
        }
        let exact = grid.sample(|x| self.exact(&extents, x, self.t_end).0);
        Ok(lp_norm(&(&state.u - &exact), Lp::L2, grid))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementResult {
    pub cells: Vec<Vec<usize>>,
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` for consecutive grids.
    pub orders: Vec<f64>,
    /// Order between the two finest grids.
    pub observed_order: f64,
}

/// Runs the problem on each grid, which must double the cell count on
/// every axis from one grid to the next over the same box.
pub fn refinement_study(
    problem: &ManufacturedProblem,
    grids: &[Grid],
) -> Result<RefinementResult, SolverError> {
    if grids.len() < 3 {
        return Err(SolverError::Refinement(format!(
            "need at least 3 grids, got {}",
            grids.len()
        )));
    }
    for pair in grids.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.dim() != b.dim() || a.extents() != b.extents() {
            return Err(SolverError::Refinement(
                "grids cover different boxes".into(),
            ));
        }
        if a.cells() == b.cells() {
            return Err(SolverError::Refinement("grid repeated".into()));
        }
        if a.cells().iter().zip(b.cells()).any(|(m, n)| 2 * m != *n) {
            return Err(SolverError::Refinement(format!(
                "grids not nested: {:?} then {:?}",
                a.cells(),
                b.cells()
            )));
        }
    }
    let errors = grids
        .iter()
        .map(|g| problem.error_on(g))
        .collect::<Result<Vec<_>, _>>()?;
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    Ok(RefinementResult {
        cells: grids.iter().map(|g| g.cells().to_vec()).collect(),
        observed_order: *orders.last().expect("at least two ratios"),
        orders,
        errors,
    })
}
