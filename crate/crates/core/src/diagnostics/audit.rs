use super::{fit_decay_in, DecayFit, DiagnosticsError};
use crate::params::Parameters;
use crate::solver::{Outcome, Trajectory};
use crate::thresholds::{KappaRegime, ThresholdReport};

/// Slack allowed below each guaranteed rate.
pub const AUDIT_RATE_TOLERANCE: f64 = 1e-6;

/// Per-sample increase of H allowed, relative to H at the first sample.
pub const H_MONOTONE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    /// Fit window; defaults to the second half of the run.
    pub window: Option<(f64, f64)>,
    pub tolerance: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            window: None,
            tolerance: AUDIT_RATE_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub observed: f64,
    pub required: f64,
    pub passed: bool,
    pub fit: Option<DecayFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditVerdict {
    pub regime: KappaRegime,
    pub checks: Vec<AuditCheck>,
    /// Some sample had `min u` at or below the vacuum floor, so H was not
    /// monitored.
    pub vacuum_encountered: bool,
}

impl AuditVerdict {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn lines(&self) -> Vec<(String, String)> {
        let mut out = vec![("audit_regime".to_string(), self.regime.as_str().to_string())];
        for c in &self.checks {
            out.push((
                format!("audit_{}_observed", c.name),
                format!("{:.17e}", c.observed),
            ));
            out.push((
                format!("audit_{}_required", c.name),
                format!("{:.17e}", c.required),
            ));
            out.push((format!("audit_{}", c.name), verdict(c.passed).into()));
        }
        if self.vacuum_encountered {
            out.push(("audit_H".into(), "vacuum encountered".into()));
        }
        out.push(("audit_verdict".into(), verdict(self.passed()).into()));
        out
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn column(traj: &Trajectory, name: &str) -> Result<(Vec<f64>, Vec<f64>), DiagnosticsError> {
    let values = traj
        .diagnostics
        .column(name)
        .ok_or_else(|| DiagnosticsError::Audit(format!("no column {name}")))?;
    let mut t = Vec::new();
    let mut v = Vec::new();
    for (r, x) in traj.diagnostics.records.iter().zip(values) {
        if let Some(x) = x {
            t.push(r.t);
            v.push(x);
        }
    }
    Ok((t, v))
}

fn rate_check(
    name: &'static str,
    traj: &Trajectory,
    column_name: &str,
    window: (f64, f64),
    required: f64,
    algebraic: bool,
    tolerance: f64,
) -> Result<AuditCheck, DiagnosticsError> {
    let (t, v) = column(traj, column_name)?;
    let fit = fit_decay_in(&t, &v, window)?;
    let observed = if algebraic {
        fit.algebraic_rate()
    } else {
        fit.exponential_rate()
    };
    Ok(AuditCheck {
        name,
        observed,
        required,
        passed: observed >= required - tolerance,
        fit: Some(fit),
    })
}

/// Compares the decay seen along a completed run with the rate guaranteed
/// in the run's regime of `kappa`.
pub fn convergence_audit(
    traj: &Trajectory,
    params: &Parameters,
    report: &ThresholdReport,
    options: AuditOptions,
) -> Result<AuditVerdict, DiagnosticsError> {
    if traj.outcome != Outcome::Completed {
        return Err(DiagnosticsError::Audit(format!(
            "run did not complete ({})",
            traj.outcome.as_str()
        )));
    }
    let regime = KappaRegime::of(params.kappa);
    if report.applicability.kappa_regime != regime {
        return Err(DiagnosticsError::Audit(format!(
            "report is for kappa regime {}, run has {}",
            report.applicability.kappa_regime.as_str(),
            regime.as_str()
        )));
    }
    let window = options.window.unwrap_or((0.5 * traj.t_end, traj.t_end));
    let tol = options.tolerance;
    let n1 = params.n as f64 + 1.0;
    let mut checks = Vec::new();
    let mut vacuum_encountered = false;
    match regime {
        KappaRegime::Positive => {
            let gamma = report.gamma.ok_or_else(|| {
                DiagnosticsError::Audit("no guaranteed rate: need mu > mu1 and chi != 0".into())
            })?;
            checks.push(rate_check(
                "eq_rate", traj, "eq_dist", window, gamma, false, tol,
            )?);
            vacuum_encountered = traj.diagnostics.records.iter().any(|r| r.vacuum);
            if !vacuum_encountered {
                let h: Vec<f64> = traj
                    .diagnostics
                    .records
                    .iter()
                    .filter_map(|r| r.h)
                    .collect();
                let h0 = h.first().copied().unwrap_or(0.0);
                let worst = h
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                let observed = if h0 > 0.0 { worst / h0 } else { worst };
                checks.push(AuditCheck {
                    name: "H_monotone",
                    observed,
                    required: H_MONOTONE_TOLERANCE,
                    passed: !(observed > H_MONOTONE_TOLERANCE),
                    fit: None,
                });
            }
        }
        KappaRegime::Zero => {
            checks.push(rate_check(
                "u_power",
                traj,
                "Linf_u",
                window,
                1.0 / n1,
                true,
                tol,
            )?);
            checks.push(rate_check(
                "v_power",
                traj,
                "Linf_v",
                window,
                1.0 / n1,
                true,
                tol,
            )?);
        }
        KappaRegime::Negative => {
            let k = -params.kappa;
            checks.push(rate_check(
                "u_rate",
                traj,
                "Linf_u",
                window,
                k / n1,
                false,
                tol,
            )?);
            let v_rate = params.beta.min(k) / (2.0 * n1);
            checks.push(rate_check(
                "v_rate", traj, "Linf_v", window, v_rate, false, tol,
            )?);
        }
    }
    Ok(AuditVerdict {
        regime,
        checks,
        vacuum_encountered,
    })
}
