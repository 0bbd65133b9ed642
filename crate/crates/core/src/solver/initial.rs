use ndarray::ArrayD;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SolverError;
use crate::params::{Grid, State};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Constants plus seeded uniform noise in `[-amplitude, amplitude]` on
    /// `u`, shifted up if needed so that `u >= 0`.
    ConstantPlusPerturbation {
        u: f64,
        v: f64,
        amplitude: f64,
        seed: u64,
    },
    /// `u = u_base + amplitude exp(-|x - centre|^2 / (2 width^2))`,
    /// `v = v_base`. The centre defaults to the middle of the box.
    GaussianBump {
        u_base: f64,
        v_base: f64,
        amplitude: f64,
        width: f64,
        centre: Option<Vec<f64>>,
    },
    Custom {
        u: ArrayD<f64>,
        v: ArrayD<f64>,
    },
}

fn nonnegative(name: &str, x: f64) -> Result<(), SolverError> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(SolverError::InitialCondition(format!(
            "{name} must be finite and nonnegative, got {x}"
        )))
    }
}

pub fn initial_condition(ic: &InitialCondition, grid: &Grid) -> Result<State, SolverError> {
    let state = match ic {
        InitialCondition::ConstantPlusPerturbation {
            u,
            v,
            amplitude,
            seed,
        } => {
            nonnegative("u", *u)?;
            nonnegative("v", *v)?;
            nonnegative("amplitude", *amplitude)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut field = grid.constant(*u);
            if *amplitude > 0.0 {
                field.mapv_inplace(|x| x + rng.gen_range(-*amplitude..=*amplitude));
                let min = field.iter().fold(f64::INFINITY, |m, &x| m.min(x));
                if min < 0.0 {
                    field.mapv_inplace(|x| (x - min).max(0.0));
                }
            }
            State::new(field, grid.constant(*v), 0.0)?
        }
        InitialCondition::GaussianBump {
            u_base,
            v_base,
            amplitude,
            width,
            centre,
        } => {
            nonnegative("v_base", *v_base)?;
            if !(*width > 0.0) {
                return Err(SolverError::InitialCondition(
                    "width must be positive".into(),
                ));
            }
            let centre = match centre {
                Some(c) if c.len() == grid.dim() => c.clone(),
                Some(c) => {
                    return Err(SolverError::InitialCondition(format!(
                        "centre has {} coordinates, grid has {}",
                        c.len(),
                        grid.dim()
                    )))
                }
                None => grid.extents().iter().map(|l| 0.5 * l).collect(),
            };
            let field = grid.sample(|x| {
                let r2: f64 = x.iter().zip(&centre).map(|(a, b)| (a - b) * (a - b)).sum();
                u_base + amplitude * (-r2 / (2.0 * width * width)).exp()
            });
            if let Some(bad) = field.iter().find(|x| !(**x >= 0.0)) {
                return Err(SolverError::InitialCondition(format!(
                    "bump produces negative density {bad}"
                )));
            }
            State::new(field, grid.constant(*v_base), 0.0)?
        }
        InitialCondition::Custom { u, v } => State::new(u.clone(), v.clone(), 0.0)?,
    };
    state.check_grid(grid)?;
    Ok(state)
}
