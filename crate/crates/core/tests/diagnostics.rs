use std::f64::consts::PI;

use approx::assert_relative_eq;
use kslab::diagnostics::{gradient_squared, integral, lp_norm, lyapunov_h, Lp};
use kslab::{Grid, Parameters, State};
use ndarray::{ArrayD, IxDyn};

fn field_1d(n: usize, f: impl Fn(f64) -> f64) -> ArrayD<f64> {
    let h = 1.0 / n as f64;
    ArrayD::from_shape_fn(IxDyn(&[n]), |i| f((i[0] as f64 + 0.5) * h))
}

#[test]
fn norms_converge_to_closed_forms() {
    let n = 4096;
    let grid = Grid::unit(1, n).unwrap();
    let u = field_1d(n, |x| 2.0 + (PI * x).cos());
    // ∫(2 + cos πx)² = 4.5, ∫(2 + cos πx)⁴ = 16 + 12 + 3/8
    assert_relative_eq!(integral(&u, &grid), 2.0, epsilon = 1e-9);
    assert_relative_eq!(lp_norm(&u, Lp::L2, &grid), 4.5f64.sqrt(), epsilon = 1e-7);
    assert_relative_eq!(
        lp_norm(&u, Lp::L4, &grid),
        28.375f64.powf(0.25),
        epsilon = 1e-7
    );
    assert!((lp_norm(&u, Lp::Inf, &grid) - 3.0).abs() < 1e-6);
}

#[test]
fn gradient_of_a_cosine_integrates_to_its_energy() {
    let n = 2048;
    let grid = Grid::unit(1, n).unwrap();
    let v = field_1d(n, |x| (PI * x).cos());
    // ∫(π sin πx)² = π²/2
    let g2 = gradient_squared(&v, &grid);
    assert_relative_eq!(integral(&g2, &grid), PI * PI / 2.0, max_relative = 1e-3);
}

#[test]
fn lyapunov_h_matches_a_direct_sum() {
    let n = 64;
    let grid = Grid::unit(1, n).unwrap();
    let params = Parameters {
        chi: 2.0,
        mu: 2.0,
        ..Parameters::unit(1.0)
    };
    let (us, vs) = (0.5, 0.5);
    let u = field_1d(n, |x| us * (1.0 + 0.5 * (PI * x).cos()));
    let v = field_1d(n, |x| vs + 0.1 * (2.0 * PI * x).cos());
    let weight = 1.0 * 4.0 / (8.0 * 2.0);
    let direct: f64 = u
        .iter()
        .zip(v.iter())
        .map(|(&u, &v)| u - us - us * (u / us).ln() + weight * (v - vs).powi(2))
        .sum::<f64>()
        / n as f64;
    let h = lyapunov_h(&State::new(u, v, 0.0).unwrap(), &grid, &params).unwrap();
    assert_relative_eq!(h, direct, max_relative = 1e-12);
}
