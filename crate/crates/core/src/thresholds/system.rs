//! Coefficient selection for the coupled functionals and verification of
//! the inequality systems they must satisfy.

use super::{minimize_h, mu0_3d, mu0_general, ThresholdError};
use crate::params::Parameters;

/// Relative tolerance of the pass/fail decision, scaled by the size of both
/// sides of the inequality.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

/// One inequality `lhs > rhs` (strict) or `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inequality {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
}

impl Inequality {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn scale(&self) -> f64 {
        self.lhs.abs() + self.rhs.abs()
    }

    pub fn passes(&self) -> bool {
        let margin = self.margin();
        if !margin.is_finite() {
            return margin == f64::INFINITY;
        }
        if self.strict {
            margin > MARGIN_TOLERANCE * self.scale()
        } else {
            margin >= -MARGIN_TOLERANCE * self.scale()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemCheck {
    pub inequalities: Vec<Inequality>,
}

impl SystemCheck {
    pub fn passed(&self) -> bool {
        self.inequalities.iter().all(Inequality::passes)
    }

    pub fn margins(&self) -> Vec<f64> {
        self.inequalities.iter().map(Inequality::margin).collect()
    }

    /// Indices of the failing inequalities.
    pub fn failures(&self) -> Vec<usize> {
        self.inequalities
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.passes())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn get(&self, label: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|q| q.label == label)
    }
}

/// Young's-inequality weights and functional weights of the L^2 coupled
/// functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet3D {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

/// Weights of the L^3 coupled functional used for n = 4, 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet45D {
    pub eps: f64,
    pub eta: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
}

/// The four inequalities the L^2 functional needs; the first three strict.
pub fn verify_system_3d(params: &Parameters, mu: f64, c: &CoefficientSet3D) -> SystemCheck {
    let Parameters {
        d1, d2, chi, alpha, ..
    } = *params;
    let n = params.n as f64;
    let chi2 = chi * chi;
    let s = d1 + d2;
    SystemCheck {
        inequalities: vec![
            Inequality {
                label: "gradient-u",
                lhs: 2.0 * (d1 - c.eps1) * c.delta1,
                rhs: s * s / (4.0 * c.eps4) * c.delta2,
                strict: true,
            },
            Inequality {
                label: "u-cubed",
                lhs: 2.0 * mu * c.delta1,
                rhs: n * alpha * alpha / (8.0 * d2) * c.delta2,
                strict: true,
            },
            Inequality {
                label: "hessian-v",
                lhs: 2.0 * (d2 - c.eps2) * c.delta3,
                rhs: (c.eps3 + c.eps4) * c.delta2,
                strict: true,
            },
            Inequality {
                label: "cross-term",
                lhs: mu * c.delta2,
                rhs: chi2 / (4.0 * c.eps3) * c.delta2
                    + 2.0 * (n / (2.0 * d2) + 1.0 / c.eps2) * alpha * alpha * c.delta3
                    + chi2 / (2.0 * c.eps1) * c.delta1,
                strict: false,
            },
        ],
    }
}

/// Coefficients for the L^2 functional at a damping rate above the
/// three-dimensional threshold.
///
/// The Young weights are the unique minimisers of the eliminated threshold.
/// The functional weights sit a relative slack `s` above the binding lower
/// bounds of the first and third inequalities, with `s` sized so that the
/// fourth inequality keeps half of the gap `mu - mu0`.
pub fn select_coefficients_3d(
    params: &Parameters,
    mu: f64,
) -> Result<CoefficientSet3D, ThresholdError> {
    if params.n != 3 {
        return Err(ThresholdError::Dimension {
            n: params.n,
            expected: "3",
        });
    }
    if params.chi == 0.0 {
        return Err(ThresholdError::ZeroSensitivity);
    }
    let mu0 = mu0_3d(params, false)?.value;
    if !(mu > mu0) {
        return Err(ThresholdError::BelowThreshold { mu, threshold: mu0 });
    }
    let Parameters {
        d1, d2, chi, alpha, ..
    } = *params;
    let n = params.n as f64;
    let chi_abs = chi.abs();
    let root = (2.0 * n + 4.0).sqrt() - 2.0;

    let eps1 = d1 / 2.0;
    let eps2 = root / n * d2;
    let eps3 = root * d2 * chi_abs / (2.0 * n * alpha);
    let eps4 = root * (d1 + d2) * d2 * chi_abs / (2.0 * n * d1 * alpha);

    let delta1_floor = (d1 + d2).powi(2) / (8.0 * eps4 * (d1 - eps1));
    let delta3_floor = (eps3 + eps4) / (2.0 * (d2 - eps2));
    // u^3 bound; always dominated by delta1_floor at the optimal Young weights
    let cubic_floor = n * alpha * alpha / (16.0 * d2 * mu0);

    let residual = mu0 - chi * chi / (4.0 * eps3);
    let slack = (mu - mu0) / (2.0 * residual);
    let set = CoefficientSet3D {
        eps1,
        eps2,
        eps3,
        eps4,
        delta1: ((1.0 + slack) * delta1_floor).max((1.0 + slack) * cubic_floor),
        delta2: 1.0,
        delta3: (1.0 + slack) * delta3_floor,
    };
    debug_assert!(verify_system_3d(params, mu, &set).passed());
    Ok(set)
}

fn ratio_constraint(params: &Parameters, c: &CoefficientSet45D) -> Inequality {
    let s = params.d1 + params.d2;
    let gap = (params.d1 - c.eps) * (params.d2 - c.eta);
    Inequality {
        label: "ratio",
        lhs: c.eps2 / (c.eps3 + s * s / (4.0 * c.eps4)),
        rhs: if gap > 0.0 {
            s * s / (4.0 * gap)
        } else {
            f64::INFINITY
        },
        strict: false,
    }
}

/// The seven inequalities the L^3 functional needs, plus the ratio
/// constraint linking the third and fourth.
pub fn verify_system_45d(params: &Parameters, mu: f64, c: &CoefficientSet45D) -> SystemCheck {
    let Parameters {
        d1, d2, chi, alpha, ..
    } = *params;
    let n = params.n as f64;
    let chi2 = chi * chi;
    let a2 = alpha * alpha;
    let s2 = (d1 + d2).powi(2);
    let g = 2.0 * a2 / c.eta + n * a2 / (2.0 * d2);
    SystemCheck {
        inequalities: vec![
            Inequality {
                label: "u-gradient-u",
                lhs: 6.0 * (d1 - c.eps) * c.delta1,
                rhs: 2.0 * c.eps4 * c.delta2,
                strict: true,
            },
            Inequality {
                label: "gradv-hessian-v",
                lhs: 6.0 * (d2 - c.eta) * c.delta4,
                rhs: 2.0 * (c.eps1 + c.eps2) * c.delta3,
                strict: true,
            },
            Inequality {
                label: "gradient-u-gradv",
                lhs: 2.0 * (d1 - c.eps) * c.delta2,
                rhs: s2 / (2.0 * c.eps2) * c.delta3,
                strict: false,
            },
            Inequality {
                label: "u-hessian-v",
                lhs: 2.0 * (d2 - c.eta) * c.delta3,
                rhs: (2.0 * c.eps3 + s2 / (2.0 * c.eps4)) * c.delta2,
                strict: false,
            },
            Inequality {
                label: "u-fourth",
                lhs: 3.0 * mu * c.delta1,
                rhs: n * a2 / (18.0 * d2) * c.delta2,
                strict: false,
            },
            Inequality {
                label: "u-cubed-gradv",
                lhs: 2.0 * mu * c.delta2,
                rhs: chi2 / (2.0 * c.eps3) * c.delta2
                    + 3.0 * chi2 / (2.0 * c.eps) * c.delta1
                    + a2 / 2.0 * (1.0 / c.eta + n / (2.0 * d2)) * c.delta3,
                strict: false,
            },
            Inequality {
                label: "u-squared-gradv4",
                lhs: mu * c.delta3,
                rhs: chi2 / (2.0 * c.eps1) * c.delta3
                    + chi2 / (2.0 * c.eps) * c.delta2
                    + 3.0 * g * c.delta4,
                strict: false,
            },
            ratio_constraint(params, c),
        ],
    }
}

const DELTA_SLACK: f64 = 1.05;

/// Young weights of the constructive recipe; the functional weights are
/// then solved for at each damping rate.
#[derive(Debug, Clone, Copy)]
struct Recipe45 {
    params: Parameters,
    eps: f64,
    eta: f64,
    eps1: f64,
    eps3: f64,
}

impl Recipe45 {
    fn new(params: &Parameters) -> Result<Self, ThresholdError> {
        let h = minimize_h(params.n, params.d1, params.d2)?;
        let n = params.n as f64;
        let a2 = params.alpha * params.alpha;
        let g = 2.0 * a2 / h.eta + n * a2 / (2.0 * params.d2);
        Ok(Recipe45 {
            params: *params,
            eps: h.epsilon,
            eta: h.eta,
            eps1: params.chi.abs() * ((params.d2 - h.eta) / (2.0 * g)).sqrt(),
            eps3: 1.0,
        })
    }

    /// Ratio constraint met with a factor-two margin.
    fn eps2_for(&self, eps4: f64) -> f64 {
        let p = &self.params;
        let s2 = (p.d1 + p.d2).powi(2);
        let ratio = s2 / (4.0 * (p.d1 - self.eps) * (p.d2 - self.eta));
        2.0 * ratio * (self.eps3 + s2 / (4.0 * eps4))
    }

    fn coefficients(&self, eps4: f64, mu: f64) -> Option<CoefficientSet45D> {
        let p = &self.params;
        let n = p.n as f64;
        let chi2 = p.chi * p.chi;
        let a2 = p.alpha * p.alpha;
        let s2 = (p.d1 + p.d2).powi(2);
        let eps2 = self.eps2_for(eps4);
        let g = 2.0 * a2 / self.eta + n * a2 / (2.0 * p.d2);
        let (eps, eta, eps1, eps3) = (self.eps, self.eta, self.eps1, self.eps3);

        let delta2 = 1.0;
        let delta1 = DELTA_SLACK * (eps4 / (3.0 * (p.d1 - eps))).max(n * a2 / (54.0 * p.d2 * mu));

        // delta3 bracket from the third (upper), fourth (lower), sixth
        // (upper) and seventh (lower) inequalities.
        let upper3 = 4.0 * eps2 * (p.d1 - eps) / s2;
        let lower4 = (2.0 * eps3 + s2 / (2.0 * eps4)) / (2.0 * (p.d2 - eta));
        let upper6 = (2.0 * mu - chi2 / (2.0 * eps3) - 3.0 * chi2 / (2.0 * eps) * delta1)
            / (a2 / 2.0 * (1.0 / eta + n / (2.0 * p.d2)));
        let coef7 = mu - chi2 / (2.0 * eps1) - DELTA_SLACK * g * (eps1 + eps2) / (p.d2 - eta);
        if !(coef7 > 0.0) {
            return None;
        }
        let lower7 = chi2 / (2.0 * eps) / coef7;
        let lower = lower4.max(lower7);
        let upper = upper3.min(upper6);
        if !(lower <= upper) {
            return None;
        }
        let delta3 = (DELTA_SLACK * lower).min(upper);
        let delta4 = DELTA_SLACK * (eps1 + eps2) * delta3 / (3.0 * (p.d2 - eta));
        let set = CoefficientSet45D {
            eps,
            eta,
            eps1,
            eps2,
            eps3,
            eps4,
            delta1,
            delta2,
            delta3,
            delta4,
        };
        verify_system_45d(p, mu, &set).passed().then_some(set)
    }

    /// Smallest damping rate at which [`Self::coefficients`] succeeds for a
    /// fixed `eps4`; feasibility is monotone in `mu`.
    fn threshold_for(&self, eps4: f64) -> f64 {
        let mut hi = 1.0_f64.max(self.params.alpha * self.params.chi.abs());
        let mut guard = 0;
        while self.coefficients(eps4, hi).is_none() {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.coefficients(eps4, mid).is_some() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `eps4` minimising the recipe threshold: a coarse scan in log space
    /// around `(d1 + d2)^2 / 4` followed by golden-section refinement.
    fn best_eps4(&self) -> (f64, f64) {
        let p = &self.params;
        let centre = ((p.d1 + p.d2).powi(2) / 4.0).ln();
        let span = 10.0;
        let scan = 41;
        let at = |i: usize| centre - span + 2.0 * span * i as f64 / (scan - 1) as f64;
        let mut best = (0, f64::INFINITY);
        for i in 0..scan {
            let value = self.threshold_for(at(i).exp());
            if value < best.1 {
                best = (i, value);
            }
        }
        let mut lo = at(best.0.saturating_sub(1));
        let mut hi = at((best.0 + 1).min(scan - 1));
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = self.threshold_for(x1.exp());
        let mut f2 = self.threshold_for(x2.exp());
        for _ in 0..60 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = self.threshold_for(x1.exp());
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = self.threshold_for(x2.exp());
            }
        }
        let candidates = [(at(best.0), best.1), (x1, f1), (x2, f2)];
        let (log_eps4, threshold) = candidates
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        (log_eps4.exp(), threshold)
    }
}

fn check_45d_inputs(params: &Parameters) -> Result<(), ThresholdError> {
    if params.n != 4 && params.n != 5 {
        return Err(ThresholdError::Dimension {
            n: params.n,
            expected: "4 or 5",
        });
    }
    if params.chi == 0.0 {
        return Err(ThresholdError::ZeroSensitivity);
    }
    Ok(())
}

/// Smallest damping rate for which [`select_coefficients_45d`] produces an
/// admissible set. This generally lies above `mu0` for n = 4, 5.
pub fn recipe_threshold_45d(params: &Parameters) -> Result<f64, ThresholdError> {
    check_45d_inputs(params)?;
    let recipe = Recipe45::new(params)?;
    Ok(recipe.best_eps4().1)
}

/// Coefficients for the L^3 functional.
///
/// `(eps, eta)` is the minimiser of the h objective, `eps1` balances the
/// two terms it enters, `eps3 = 1`, `eps2` meets the ratio constraint with
/// a factor-two margin for the `eps4` that minimises the recipe threshold,
/// and the functional weights are 1.05 times their binding bounds. Fails
/// with [`ThresholdError::Infeasible`] when that construction cannot meet
/// all seven inequalities at `mu`.
pub fn select_coefficients_45d(
    params: &Parameters,
    mu: f64,
) -> Result<CoefficientSet45D, ThresholdError> {
    check_45d_inputs(params)?;
    let mu0 = mu0_general(params, false)?.value;
    if !(mu > mu0) {
        return Err(ThresholdError::BelowThreshold { mu, threshold: mu0 });
    }
    let recipe = Recipe45::new(params)?;
    let (eps4, recipe_threshold) = recipe.best_eps4();
    recipe
        .coefficients(eps4, mu)
        .ok_or(ThresholdError::Infeasible {
            mu,
            recipe_threshold,
        })
}
