//! Minimisation of the two-variable objective whose minimum enters the
//! damping threshold in four and five dimensions.

use super::ThresholdError;

/// Minimum of the objective and the interior point attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HMin {
    pub value: f64,
    pub epsilon: f64,
    pub eta: f64,
}

/// The objective on the open rectangle `(0, d1) x (0, d2)`; `+inf` outside.
pub fn h_objective(n: u32, d1: f64, d2: f64, epsilon: f64, eta: f64) -> f64 {
    if !(epsilon > 0.0 && epsilon < d1 && eta > 0.0 && eta < d2) {
        return f64::INFINITY;
    }
    let n = n as f64;
    let a = (n / (18.0 * d2 * epsilon)).sqrt();
    let b = ((1.0 / (2.0 * epsilon)) * (1.0 / eta + n / (2.0 * d2))).sqrt();
    let c = ((1.0 / (d2 - eta)) * (2.0 / eta + n / (2.0 * d2))).sqrt();
    let bracket =
        std::f64::consts::SQRT_2 + (d1 + d2) / (2.0 * ((d1 - epsilon) * (d2 - eta)).sqrt());
    a + b + c * bracket
}

const GRID: usize = 64;
const LOGIT_SPAN: f64 = 9.0;
const HALVINGS: usize = 60;
const MOVES_PER_LEVEL: usize = 500;

#[inline]
fn sigmoid(s: f64) -> f64 {
    1.0 / (1.0 + (-s).exp())
}

/// Global minimum of [`h_objective`] for `n` in {4, 5}.
///
/// A 64 x 64 grid in logit coordinates (logarithmically clustered towards
/// both edges of each interval) locates the basin, then a compass search
/// with step halving polishes the best cell.
pub fn minimize_h(n: u32, d1: f64, d2: f64) -> Result<HMin, ThresholdError> {
    if n != 4 && n != 5 {
        return Err(ThresholdError::Dimension {
            n,
            expected: "4 or 5",
        });
    }
    if !(d1 > 0.0 && d1.is_finite()) {
        return Err(ThresholdError::Invalid("d1 must be positive".into()));
    }
    if !(d2 > 0.0 && d2.is_finite()) {
        return Err(ThresholdError::Invalid("d2 must be positive".into()));
    }

    let eval = |s: f64, t: f64| h_objective(n, d1, d2, d1 * sigmoid(s), d2 * sigmoid(t));
    let node = |i: usize| -LOGIT_SPAN + 2.0 * LOGIT_SPAN * i as f64 / (GRID - 1) as f64;

    let mut best = (node(0), node(0), f64::INFINITY);
    for i in 0..GRID {
        for j in 0..GRID {
            let (s, t) = (node(i), node(j));
            let value = eval(s, t);
            if value < best.2 {
                best = (s, t, value);
            }
        }
    }

    let (mut s, mut t, mut value) = best;
    let mut step = 2.0 * LOGIT_SPAN / (GRID - 1) as f64;
    let directions = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (-1.0, -1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
    ];
    for _ in 0..HALVINGS {
        for _ in 0..MOVES_PER_LEVEL {
            let mut improved = false;
            for (ds, dt) in directions {
                let candidate = eval(s + step * ds, t + step * dt);
                if candidate < value {
                    s += step * ds;
                    t += step * dt;
                    value = candidate;
                    improved = true;
                    break;
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.5;
    }

    Ok(HMin {
        value,
        epsilon: d1 * sigmoid(s),
        eta: d2 * sigmoid(t),
    })
}
