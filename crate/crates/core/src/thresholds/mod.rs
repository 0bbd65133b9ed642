//! Closed-form damping thresholds, convergence rates, and the coefficient
//! systems behind them.

mod hmin;
mod system;

use thiserror::Error;

use crate::params::Parameters;

pub use hmin::{h_objective, minimize_h, HMin};
pub use system::{
    recipe_threshold_45d, select_coefficients_3d, select_coefficients_45d, verify_system_3d,
    verify_system_45d, CoefficientSet3D, CoefficientSet45D, Inequality, SystemCheck,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("dimension n = {n} not supported here (expected {expected})")]
    Dimension { n: u32, expected: &'static str },
    #[error(
        "mu0 is only established for n = 3, 4, 5 (got n = {0}); the general-n formula is a \
         conjecture and is not evaluated"
    )]
    UnprovenDimension(u32),
    #[error("{0}")]
    Invalid(String),
    #[error("mu = {mu} does not exceed the threshold {threshold}")]
    BelowThreshold { mu: f64, threshold: f64 },
    #[error("kappa = {0} must be positive for the exponential rate")]
    NonPositiveKappa(f64),
    #[error("coefficient selection degenerates at chi = 0")]
    ZeroSensitivity,
    #[error(
        "no admissible coefficients from the constructive recipe at mu = {mu}; \
         the recipe needs mu > {recipe_threshold}"
    )]
    Infeasible { mu: f64, recipe_threshold: f64 },
}

/// Which case of the threshold formula was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    ConvexEqualDiffusion,
    General,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::ConvexEqualDiffusion => "convex-equal-diffusion",
            Branch::General => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mu0 {
    pub value: f64,
    pub branch: Branch,
}

fn convex_branch_applies(params: &Parameters, convex: bool) -> bool {
    convex && params.d1 == params.d2 && params.chi > 0.0
}

/// `n / (sqrt(2n + 4) - 2) * (1/d1 + 2/d2)`, the factor multiplying
/// `alpha |chi|` in the general three-dimensional threshold.
pub fn lower_factor(n: u32, d1: f64, d2: f64) -> f64 {
    let n = n as f64;
    n / ((2.0 * n + 4.0).sqrt() - 2.0) * (1.0 / d1 + 2.0 / d2)
}

/// Damping threshold in three dimensions.
pub fn mu0_3d(params: &Parameters, convex: bool) -> Result<Mu0, ThresholdError> {
    if params.n != 3 {
        return Err(ThresholdError::Dimension {
            n: params.n,
            expected: "3",
        });
    }
    if convex_branch_applies(params, convex) {
        return Ok(Mu0 {
            value: 3.0 / (4.0 * params.d1) * params.alpha * params.chi,
            branch: Branch::ConvexEqualDiffusion,
        });
    }
    Ok(Mu0 {
        value: lower_factor(3, params.d1, params.d2) * params.alpha * params.chi.abs(),
        branch: Branch::General,
    })
}

/// Damping threshold for `n` in {3, 4, 5}.
pub fn mu0_general(params: &Parameters, convex: bool) -> Result<Mu0, ThresholdError> {
    match params.n {
        3 => mu0_3d(params, convex),
        4 | 5 => {
            let n = params.n;
            if convex_branch_applies(params, convex) {
                return Ok(Mu0 {
                    value: n as f64 / (4.0 * params.d1) * params.alpha * params.chi,
                    branch: Branch::ConvexEqualDiffusion,
                });
            }
            let h = minimize_h(n, params.d1, params.d2)?;
            let factor = (h.value / 3.0).max(lower_factor(n, params.d1, params.d2));
            Ok(Mu0 {
                value: factor * params.alpha * params.chi.abs(),
                branch: Branch::General,
            })
        }
        n => Err(ThresholdError::UnprovenDimension(n)),
    }
}

/// Damping threshold above which bounded solutions converge to the positive
/// equilibrium; zero when `kappa <= 0`.
pub fn mu1(params: &Parameters) -> f64 {
    if params.kappa <= 0.0 {
        return 0.0;
    }
    params.alpha * params.chi.abs() / 4.0
        * (params.kappa / (params.d1 * params.d2 * params.beta)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRate {
    pub gamma: f64,
    pub epsilon0: f64,
}

/// Guaranteed exponential convergence rate for `kappa > 0`, `mu > mu1`.
pub fn gamma_rate(params: &Parameters) -> Result<GammaRate, ThresholdError> {
    let Parameters {
        d1,
        d2,
        chi,
        alpha,
        beta,
        kappa,
        mu,
        n,
        ..
    } = *params;
    if kappa <= 0.0 {
        return Err(ThresholdError::NonPositiveKappa(kappa));
    }
    if chi == 0.0 {
        return Err(ThresholdError::ZeroSensitivity);
    }
    let threshold = mu1(params);
    if mu <= threshold {
        return Err(ThresholdError::BelowThreshold { mu, threshold });
    }
    let chi2 = chi * chi;
    let epsilon0 = 0.5 * (alpha / (4.0 * beta) + 4.0 * d1 * d2 * mu * mu / (alpha * kappa * chi2));
    let weight = kappa * chi2 / (4.0 * d1 * d2 * mu);
    let first = mu - alpha * weight * epsilon0;
    let second = weight * (beta - alpha / (4.0 * epsilon0));
    let denominator = (n as f64 + 2.0) * (mu / kappa).max(kappa * chi2 / (8.0 * d1 * d2 * mu));
    Ok(GammaRate {
        gamma: first.min(second) / denominator,
        epsilon0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaRegime {
    Positive,
    Zero,
    Negative,
}

impl KappaRegime {
    pub fn of(kappa: f64) -> Self {
        if kappa > 0.0 {
            KappaRegime::Positive
        } else if kappa == 0.0 {
            KappaRegime::Zero
        } else {
            KappaRegime::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KappaRegime::Positive => "positive",
            KappaRegime::Zero => "zero",
            KappaRegime::Negative => "negative",
        }
    }
}

/// Assumptions recorded alongside the threshold values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Applicability {
    pub n: u32,
    pub convex_requested: bool,
    pub convex_branch_used: bool,
    pub mu_exceeds_mu0: bool,
    pub mu_exceeds_mu1: bool,
    pub kappa_regime: KappaRegime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub mu: f64,
    pub mu0: f64,
    pub branch: Branch,
    pub mu1: f64,
    pub gamma: Option<f64>,
    pub epsilon0: Option<f64>,
    /// Minimiser of the h objective, for n = 4, 5 on the general branch.
    pub h: Option<HMin>,
    pub applicability: Applicability,
}

impl ThresholdReport {
    /// `key: value` lines in a fixed order.
    pub fn lines(&self) -> Vec<(String, String)> {
        let fmt = |x: f64| format!("{x:.17e}");
        let opt = |x: Option<f64>| x.map(fmt).unwrap_or_else(|| "absent".into());
        let a = &self.applicability;
        let mut lines = vec![
            ("n".into(), a.n.to_string()),
            ("mu".into(), fmt(self.mu)),
            ("mu0".into(), fmt(self.mu0)),
            ("mu0_branch".into(), self.branch.as_str().into()),
            ("mu1".into(), fmt(self.mu1)),
            ("gamma".into(), opt(self.gamma)),
            ("epsilon0".into(), opt(self.epsilon0)),
        ];
        if let Some(h) = self.h {
            lines.push(("h_min".into(), fmt(h.value)));
            lines.push(("h_argmin_epsilon".into(), fmt(h.epsilon)));
            lines.push(("h_argmin_eta".into(), fmt(h.eta)));
        }
        lines.extend([
            ("convex_requested".into(), a.convex_requested.to_string()),
            (
                "convex_branch_used".into(),
                a.convex_branch_used.to_string(),
            ),
            ("mu_exceeds_mu0".into(), a.mu_exceeds_mu0.to_string()),
            ("mu_exceeds_mu1".into(), a.mu_exceeds_mu1.to_string()),
            ("kappa_regime".into(), a.kappa_regime.as_str().into()),
        ]);
        lines
    }
}

/// All thresholds and rates for one parameter set.
pub fn report(params: &Parameters, convex: bool) -> Result<ThresholdReport, ThresholdError> {
    let mu0 = mu0_general(params, convex)?;
    let h = if matches!(params.n, 4 | 5) && mu0.branch == Branch::General {
        Some(minimize_h(params.n, params.d1, params.d2)?)
    } else {
        None
    };
    let mu1 = mu1(params);
    let rate = gamma_rate(params).ok();
    Ok(ThresholdReport {
        mu: params.mu,
        mu0: mu0.value,
        branch: mu0.branch,
        mu1,
        gamma: rate.map(|r| r.gamma),
        epsilon0: rate.map(|r| r.epsilon0),
        h,
        applicability: Applicability {
            n: params.n,
            convex_requested: convex,
            convex_branch_used: mu0.branch == Branch::ConvexEqualDiffusion,
            mu_exceeds_mu0: params.mu > mu0.value,
            mu_exceeds_mu1: params.mu > mu1,
            kappa_regime: KappaRegime::of(params.kappa),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit3() -> Parameters {
        Parameters::unit(8.0)
    }

    #[test]
    fn mu0_3d_reference_values() {
        let general = mu0_3d(&unit3(), false).unwrap();
        assert_eq!(general.branch, Branch::General);
        assert!((general.value - 7.743416).abs() < 1e-6);
        assert_relative_eq!(
            general.value,
            9.0 / (10f64.sqrt() - 2.0),
            max_relative = 1e-15
        );

        let convex = mu0_3d(&unit3(), true).unwrap();
        assert_eq!(convex.branch, Branch::ConvexEqualDiffusion);
        assert_eq!(convex.value, 0.75);
    }

    #[test]
    fn mu0_3d_zero_sensitivity_and_repulsion() {
        let p = Parameters {
            chi: 0.0,
            ..unit3()
        };
        assert_eq!(mu0_3d(&p, false).unwrap().value, 0.0);
        assert_eq!(mu0_3d(&p, true).unwrap().value, 0.0);

        // d1=1, d2=2, chi=-1: 3/(sqrt10-2) * (1 + 1) = 6/(sqrt10-2)
        let p = Parameters {
            d2: 2.0,
            chi: -1.0,
            ..unit3()
        };
        let m = mu0_3d(&p, true).unwrap();
        assert_eq!(m.branch, Branch::General);
        assert_relative_eq!(m.value, 5.162277660168379, max_relative = 1e-12);
    }

    #[test]
    fn convex_branch_requires_equal_diffusion_and_attraction() {
        let p = Parameters { d2: 2.0, ..unit3() };
        assert_eq!(mu0_3d(&p, true).unwrap().branch, Branch::General);
        let p = Parameters {
            chi: -1.0,
            ..unit3()
        };
        assert_eq!(mu0_3d(&p, true).unwrap().branch, Branch::General);
    }

    #[test]
    fn mu0_3d_rejects_other_dimensions() {
        let p = Parameters { n: 4, ..unit3() };
        assert!(mu0_3d(&p, false).is_err());
    }

    #[test]
    fn mu0_general_four_dimensions() {
        let p = Parameters { n: 4, ..unit3() };
        assert_eq!(mu0_general(&p, true).unwrap().value, 1.0);
        let m = mu0_general(&p, false).unwrap();
        let second = 12.0 / (12f64.sqrt() - 2.0);
        assert_relative_eq!(second, 8.196152422706632, max_relative = 1e-14);
        let h = minimize_h(4, 1.0, 1.0).unwrap().value;
        assert_relative_eq!(m.value, (h / 3.0).max(second), max_relative = 1e-14);
        let p = Parameters { chi: 0.0, ..p };
        assert_eq!(mu0_general(&p, false).unwrap().value, 0.0);
    }

    #[test]
    fn mu0_general_rejects_unproven_dimensions() {
        for n in [1, 2, 6, 7] {
            let p = Parameters { n, ..unit3() };
            assert_eq!(
                mu0_general(&p, false).unwrap_err(),
                ThresholdError::UnprovenDimension(n)
            );
        }
    }

    #[test]
    fn mu1_values() {
        assert_eq!(
            mu1(&Parameters {
                kappa: -1.0,
                ..unit3()
            }),
            0.0
        );
        assert_eq!(
            mu1(&Parameters {
                kappa: 0.0,
                ..unit3()
            }),
            0.0
        );
        assert_eq!(mu1(&unit3()), 0.25);
        assert_eq!(
            mu1(&Parameters {
                chi: 0.0,
                ..unit3()
            }),
            0.0
        );
    }

    #[test]
    fn gamma_reference_value() {
        let r = gamma_rate(&unit3()).unwrap();
        assert_eq!(r.epsilon0, 128.125);
        // intermediates: 8 - 128.125/32 and (1/32)(1 - 1/512.5), over 5 * max(8, 1/64)
        let first = 8.0 - 128.125 / 32.0;
        let second = (1.0 / 32.0) * (1.0 - 1.0 / 512.5);
        assert_relative_eq!(first, 3.99609375, max_relative = 1e-15);
        assert_relative_eq!(second, 0.031189024390243903, max_relative = 1e-14);
        assert_relative_eq!(r.gamma, second / 40.0, max_relative = 1e-14);
        assert!((r.gamma - 7.7973e-4).abs() < 1e-8);
    }

    #[test]
    fn gamma_is_even_in_chi_and_positive_near_mu1() {
        let p = unit3();
        let flipped = Parameters { chi: -1.0, ..p };
        assert_eq!(gamma_rate(&p).unwrap(), gamma_rate(&flipped).unwrap());
        let near = Parameters {
            mu: mu1(&p) * (1.0 + 1e-9),
            ..p
        };
        assert!(gamma_rate(&near).unwrap().gamma > 0.0);
    }

    #[test]
    fn gamma_preconditions() {
        assert!(matches!(
            gamma_rate(&Parameters {
                kappa: 0.0,
                ..unit3()
            }),
            Err(ThresholdError::NonPositiveKappa(_))
        ));
        assert!(matches!(
            gamma_rate(&Parameters {
                mu: 0.25,
                ..unit3()
            }),
            Err(ThresholdError::BelowThreshold { .. })
        ));
    }

    #[test]
    fn report_composes_components() {
        let r = report(&unit3(), false).unwrap();
        assert!((r.mu0 - 7.743416).abs() < 1e-6);
        assert_eq!(r.mu1, 0.25);
        assert!((r.gamma.unwrap() - 7.7973e-4).abs() < 1e-8);
        assert!(r.applicability.mu_exceeds_mu0);

        let r = report(
            &Parameters {
                kappa: -1.0,
                ..unit3()
            },
            false,
        )
        .unwrap();
        assert_eq!(r.mu1, 0.0);
        assert!(r.gamma.is_none() && r.epsilon0.is_none());

        let r = report(
            &Parameters {
                chi: 0.0,
                ..unit3()
            },
            false,
        )
        .unwrap();
        assert_eq!((r.mu0, r.mu1), (0.0, 0.0));
        assert!(r.gamma.is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn params(n: u32, d1: f64, d2: f64, alpha: f64, chi: f64) -> Parameters {
            Parameters {
                d1,
                d2,
                alpha,
                chi,
                n,
                ..Parameters::unit(1.0)
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn general_branch_is_homogeneous(n in 3u32..=5, d1 in 0.1..10.0f64, d2 in 0.1..10.0f64,
                                             alpha in 0.1..10.0f64, chi in 0.1..10.0f64, c in 0.1..10.0f64) {
                let base = mu0_general(&params(n, d1, d2, alpha, chi), false).unwrap().value;
                let scaled_alpha = mu0_general(&params(n, d1, d2, c * alpha, chi), false).unwrap().value;
                let scaled_chi = mu0_general(&params(n, d1, d2, alpha, -c * chi), false).unwrap().value;
                prop_assert!((scaled_alpha - c * base).abs() <= 1e-12 * scaled_alpha);
                prop_assert!((scaled_chi - c * base).abs() <= 1e-12 * scaled_chi);
            }

            // h grows like sqrt(d1) once d1 >> d2, so monotonicity in d1 is
            // only sampled where d1 <= 10 d2.
            #[test]
            fn general_branch_nonincreasing_in_diffusion(n in 3u32..=5, d2 in 0.1..5.0f64, r in 0.02..3.3f64,
                                                         f in 1.0..3.0f64) {
                let d1 = r * d2;
                let base = mu0_general(&params(n, d1, d2, 1.0, 1.0), false).unwrap().value;
                let wider1 = mu0_general(&params(n, f * d1, d2, 1.0, 1.0), false).unwrap().value;
                let wider2 = mu0_general(&params(n, d1, f * d2, 1.0, 1.0), false).unwrap().value;
                prop_assert!(wider1 <= base * (1.0 + 1e-9));
                prop_assert!(wider2 <= base * (1.0 + 1e-9));
            }

            #[test]
            fn mu1_monotone_and_sqrt_kappa(d1 in 0.1..5.0f64, d2 in 0.1..5.0f64, beta in 0.1..5.0f64,
                                           kappa in 0.1..5.0f64, f in 1.0..4.0f64) {
                let p = Parameters { d1, d2, beta, kappa, ..Parameters::unit(1.0) };
                let m = mu1(&p);
                let wider_d1 = mu1(&Parameters { d1: f * d1, ..p });
                let wider_d2 = mu1(&Parameters { d2: f * d2, ..p });
                let faster_decay = mu1(&Parameters { beta: f * beta, ..p });
                prop_assert!(wider_d1 <= m && wider_d2 <= m && faster_decay <= m);
                let scaled = mu1(&Parameters { kappa: f * kappa, ..p });
                prop_assert!((scaled - f.sqrt() * m).abs() <= 1e-12 * scaled);
            }
        }
    }

    #[test]
    fn mu0_diverges_as_d1_vanishes() {
        for n in [3, 4, 5] {
            let p = |d1| Parameters {
                d1,
                n,
                ..Parameters::unit(1.0)
            };
            let small = mu0_general(&p(1e-6), false).unwrap().value;
            let unit = mu0_general(&p(1.0), false).unwrap().value;
            assert!(small > 1e3 * unit, "n={n}: {small} vs {unit}");
        }
    }

    #[test]
    fn mu0_grows_with_d1_when_signal_diffusion_is_much_slower() {
        let p = |d1| Parameters {
            d1,
            d2: 0.1,
            n: 4,
            ..Parameters::unit(1.0)
        };
        let at = |d1| mu0_general(&p(d1), false).unwrap().value;
        assert!(at(8.0) > at(4.0));
        assert!(at(20.0) > at(8.0));
    }

    #[test]
    fn mu1_diverges_as_rates_vanish() {
        let m = mu1(&unit3());
        for p in [
            Parameters {
                d1: 1e-8,
                ..unit3()
            },
            Parameters {
                d2: 1e-8,
                ..unit3()
            },
            Parameters {
                beta: 1e-8,
                ..unit3()
            },
        ] {
            assert!(mu1(&p) > 1e3 * m);
        }
    }
}
