use super::DiagnosticsError;

pub const MIN_FIT_SAMPLES: usize = 10;
const MODEL_GOODNESS: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    Exponential,
    Algebraic,
    None,
}

impl DecayModel {
    pub fn as_str(self) -> &'static str {
        match self {
            DecayModel::Exponential => "exponential",
            DecayModel::Algebraic => "algebraic",
            DecayModel::None => "none",
        }
    }
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to [0, 1]; 0 when `y` has no
    /// variance.
    pub r_squared: f64,
}

impl LineFit {
    fn of(x: &[f64], y: &[f64]) -> LineFit {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for (&xi, &yi) in x.iter().zip(y) {
            sxx += (xi - mx) * (xi - mx);
            sxy += (xi - mx) * (yi - my);
            syy += (yi - my) * (yi - my);
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let intercept = my - slope * mx;
        // relative test so that rounding noise in a constant series counts as zero variance
        let r_squared = if syy <= 1e-24 * n * (my * my).max(f64::MIN_POSITIVE) || sxx == 0.0 {
            0.0
        } else {
            (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
        };
        LineFit {
            slope,
            intercept,
            r_squared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub model: DecayModel,
    /// `-slope` of the chosen fit; for `None`, the better candidate's.
    pub rate: f64,
    pub goodness: f64,
    pub window: (f64, f64),
    /// `ln value` against `t`.
    pub exponential: LineFit,
    /// `ln value` against `ln(1 + t)`.
    pub algebraic: LineFit,
}

impl DecayFit {
    pub fn exponential_rate(&self) -> f64 {
        -self.exponential.slope
    }

    pub fn algebraic_rate(&self) -> f64 {
        -self.algebraic.slope
    }
}

/// Fits over `[t_last/2, t_last]`.
pub fn fit_decay(times: &[f64], values: &[f64]) -> Result<DecayFit, DiagnosticsError> {
    let t_last = times.last().copied().unwrap_or(0.0);
    fit_decay_in(times, values, (0.5 * t_last, t_last))
}

/// Fits exponential and algebraic decay laws to the samples with
/// `t` in the closed `window`.
pub fn fit_decay_in(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
) -> Result<DecayFit, DiagnosticsError> {
    if times.len() != values.len() {
        return Err(DiagnosticsError::Length(times.len(), values.len()));
    }
    let mut t = Vec::new();
    let mut y = Vec::new();
    for (&ti, &vi) in times.iter().zip(values) {
        if ti < window.0 || ti > window.1 {
            continue;
        }
        if !(vi > 0.0) || !vi.is_finite() {
            return Err(DiagnosticsError::NonPositive { t: ti, value: vi });
        }
        t.push(ti);
        y.push(vi.ln());
    }
    if t.len() < MIN_FIT_SAMPLES {
        return Err(DiagnosticsError::ShortWindow {
            needed: MIN_FIT_SAMPLES,
            got: t.len(),
        });
    }
    let log_t: Vec<f64> = t.iter().map(|ti| ti.ln_1p()).collect();
    let exponential = LineFit::of(&t, &y);
    let algebraic = LineFit::of(&log_t, &y);

    let (best_model, best) = if algebraic.r_squared > exponential.r_squared {
        (DecayModel::Algebraic, algebraic)
    } else {
        (DecayModel::Exponential, exponential)
    };
    let model = if best.r_squared < MODEL_GOODNESS {
        DecayModel::None
    } else {
        best_model
    };
    Ok(DecayFit {
        model,
        rate: -best.slope,
        goodness: best.r_squared,
        window,
        exponential,
        algebraic,
    })
}
