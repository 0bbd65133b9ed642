//! Norms and functionals along trajectories, decay-rate fitting, and the
//! audits comparing observed decay with the guaranteed rates.

mod audit;
mod fit;
mod series;

use ndarray::{ArrayD, Axis, Zip};
use thiserror::Error;

use crate::params::{Certificate, Grid, Parameters, State};
use crate::thresholds::{CoefficientSet3D, CoefficientSet45D};

pub use audit::{
    convergence_audit, AuditCheck, AuditOptions, AuditVerdict, AUDIT_RATE_TOLERANCE,
    H_MONOTONE_TOLERANCE,
};
pub use fit::{fit_decay, fit_decay_in, DecayFit, DecayModel, LineFit, MIN_FIT_SAMPLES};
pub use series::{
    read_csv_column, DiagnosticsRecord, DiagnosticsSeries, Monitor, CSV_COLUMNS, VACUUM_FLOOR,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("unsupported exponent p = {0}; expected one of 1, 2, 3, 4, 6, inf")]
    UnsupportedExponent(f64),
    #[error("H undefined at vacuum: min u = {0}")]
    Vacuum(f64),
    #[error("kappa = {0} must be positive for H")]
    NonPositiveKappa(f64),
    #[error("fit needs at least {needed} samples in the window, got {got}")]
    ShortWindow { needed: usize, got: usize },
    #[error("fit needs positive values, found {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },
    #[error("times and values differ in length ({0} vs {1})")]
    Length(usize, usize),
    #[error("audit: {0}")]
    Audit(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// Supported Lebesgue exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lp {
    L1,
    L2,
    L3,
    L4,
    L6,
    Inf,
}

impl TryFrom<f64> for Lp {
    type Error = DiagnosticsError;

    fn try_from(p: f64) -> Result<Self, Self::Error> {
        match p {
            1.0 => Ok(Lp::L1),
            2.0 => Ok(Lp::L2),
            3.0 => Ok(Lp::L3),
            4.0 => Ok(Lp::L4),
            6.0 => Ok(Lp::L6),
            f64::INFINITY => Ok(Lp::Inf),
            p => Err(DiagnosticsError::UnsupportedExponent(p)),
        }
    }
}

impl Lp {
    fn exponent(self) -> Option<i32> {
        match self {
            Lp::L1 => Some(1),
            Lp::L2 => Some(2),
            Lp::L3 => Some(3),
            Lp::L4 => Some(4),
            Lp::L6 => Some(6),
            Lp::Inf => None,
        }
    }
}

/// Midpoint-rule `L^p` norm; the maximum of `|field|` for `p = inf`.
pub fn lp_norm(field: &ArrayD<f64>, p: Lp, grid: &Grid) -> f64 {
    match p.exponent() {
        None => field.iter().fold(0.0, |m, x| m.max(x.abs())),
        Some(1) => field.iter().map(|x| x.abs()).sum::<f64>() * grid.cell_volume(),
        Some(k) => {
            let sum: f64 = field.iter().map(|x| x.abs().powi(k)).sum();
            (sum * grid.cell_volume()).powf(1.0 / k as f64)
        }
    }
}

/// `∫ field` by the midpoint rule.
pub fn integral(field: &ArrayD<f64>, grid: &Grid) -> f64 {
    field.sum() * grid.cell_volume()
}

/// `|grad v|^2` at cell centres. Each component is the average of the two
/// adjacent face differences, with zero difference on boundary faces.
pub fn gradient_squared(v: &ArrayD<f64>, grid: &Grid) -> ArrayD<f64> {
    let mut out = ArrayD::zeros(v.raw_dim());
    for axis in 0..grid.dim() {
        let h = grid.spacing(axis);
        Zip::from(out.lanes_mut(Axis(axis)))
            .and(v.lanes(Axis(axis)))
            .for_each(|mut out, v| {
                let n = v.len();
                for i in 0..n {
                    let right = if i + 1 < n { v[i + 1] - v[i] } else { 0.0 };
                    let left = if i > 0 { v[i] - v[i - 1] } else { 0.0 };
                    let g = 0.5 * (left + right) / h;
                    out[i] += g * g;
                }
            });
    }
    out
}

/// `δ1 ∫u² + δ2 ∫u|∇v|² + δ3 ∫|∇v|⁴`
pub fn functional_z3(state: &State, grid: &Grid, c: &CoefficientSet3D) -> f64 {
    let g2 = gradient_squared(&state.v, grid);
    let mut sum = 0.0;
    Zip::from(&state.u).and(&g2).for_each(|&u, &g| {
        sum += c.delta1 * u * u + c.delta2 * u * g + c.delta3 * g * g;
    });
    sum * grid.cell_volume()
}

/// `δ1 ∫u³ + δ2 ∫u²|∇v|² + δ3 ∫u|∇v|⁴ + δ4 ∫|∇v|⁶`
pub fn functional_z45(state: &State, grid: &Grid, c: &CoefficientSet45D) -> f64 {
    let g2 = gradient_squared(&state.v, grid);
    let mut sum = 0.0;
    Zip::from(&state.u).and(&g2).for_each(|&u, &g| {
        sum += c.delta1 * u * u * u
            + c.delta2 * u * u * g
            + c.delta3 * u * g * g
            + c.delta4 * g * g * g;
    });
    sum * grid.cell_volume()
}

/// `x - 1 - ln x`, accurate near `x = 1`.
fn relative_entropy(x: f64) -> f64 {
    let y = x - 1.0;
    if y.abs() < 1e-2 {
        // alternating series of y - ln(1 + y)
        let mut term = y * y;
        let mut sum = 0.0;
        for k in 2..12 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * term / k as f64;
            term *= y;
        }
        sum
    } else {
        y - x.ln()
    }
}

/// Weight of the signal term in [`lyapunov_h`].
pub fn lyapunov_weight(params: &Parameters) -> f64 {
    params.kappa * params.chi * params.chi / (8.0 * params.d1 * params.d2 * params.mu)
}

/// Entropy-type distance to the positive equilibrium,
/// `∫(u - c - c ln(u/c)) + δ∫(v - v*)²` with `c = κ/μ`.
pub fn lyapunov_h(
    state: &State,
    grid: &Grid,
    params: &Parameters,
) -> Result<f64, DiagnosticsError> {
    if !(params.kappa > 0.0) {
        return Err(DiagnosticsError::NonPositiveKappa(params.kappa));
    }
    let min_u = state.u.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    if !(min_u > 0.0) {
        return Err(DiagnosticsError::Vacuum(min_u));
    }
    let (u_star, v_star) = params.equilibrium();
    let weight = lyapunov_weight(params);
    let mut sum = 0.0;
    Zip::from(&state.u).and(&state.v).for_each(|&u, &v| {
        let dv = v - v_star;
        sum += u_star * relative_entropy(u / u_star) + weight * dv * dv;
    });
    Ok(sum * grid.cell_volume())
}

/// Outcome of checking the L¹ bound along a series.
#[derive(Debug, Clone, PartialEq)]
pub struct MassCheck {
    pub passed: bool,
    pub bound: f64,
    /// Smallest `bound - mass` over the samples.
    pub worst_margin: f64,
    pub first_violation: Option<usize>,
}

pub const MASS_SLACK: f64 = 1e-6;

/// `∫u(t) <= ‖u0‖₁ + (a + 1/(4μ))|Ω|` at every sample, with `(a, μ)` from
/// the source certificate.
pub fn mass_bound_check(
    series: &DiagnosticsSeries,
    certificate: Certificate,
    u0_mass: f64,
    volume: f64,
) -> MassCheck {
    let bound = u0_mass + (certificate.a + 1.0 / (4.0 * certificate.mu)) * volume;
    let mut worst_margin = f64::INFINITY;
    let mut first_violation = None;
    for (i, record) in series.records.iter().enumerate() {
        let margin = bound - record.mass_u;
        worst_margin = worst_margin.min(margin);
        if !(record.mass_u <= bound + MASS_SLACK) && first_violation.is_none() {
            first_violation = Some(i);
        }
    }
    MassCheck {
        passed: first_violation.is_none(),
        bound,
        worst_margin,
        first_violation,
    }
}
