mod common;

use common::h_brute_force;
use kslab::thresholds::{
    minimize_h, mu0_3d, mu0_general, select_coefficients_3d, verify_system_3d,
};
use kslab::Parameters;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn minimize_h_agrees_with_brute_force_at_unit_diffusion() {
    let (oracle, _, _) = h_brute_force(4, 1.0, 1.0, 2000);
    let found = minimize_h(4, 1.0, 1.0).unwrap();
    assert!(
        ((found.value - oracle) / oracle).abs() < 1e-5,
        "{} vs {oracle}",
        found.value
    );
    // frozen from the oracle run
    assert!((oracle - 13.585027124491576).abs() < 1e-6, "{oracle}");
    let wider = h_brute_force(4, 2.0, 1.0, 2000).0;
    assert!(wider <= oracle);
}

#[test]
fn minimize_h_agrees_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let d1 = 10f64.powf(rng.gen_range(-1.0..1.0));
        let d2 = 10f64.powf(rng.gen_range(-1.0..1.0));
        for n in [4, 5] {
            let (oracle, _, _) = h_brute_force(n, d1, d2, 600);
            let found = minimize_h(n, d1, d2).unwrap();
            assert!(
                ((found.value - oracle) / oracle).abs() < 1e-5,
                "n={n} d1={d1} d2={d2}: {} vs {oracle}",
                found.value
            );
        }
    }
}

#[test]
fn four_dimensional_max_is_resolved_by_the_oracle() {
    let (oracle, _, _) = h_brute_force(4, 1.0, 1.0, 2000);
    let second = 12.0 / (12f64.sqrt() - 2.0);
    let expected = (oracle / 3.0).max(second);
    let p = Parameters {
        n: 4,
        ..Parameters::unit(1.0)
    };
    let m = mu0_general(&p, false).unwrap().value;
    assert!(((m - expected) / expected).abs() < 1e-5);
    // h/3 is about 4.53, so the second argument binds
    assert_eq!(expected, second);
}

#[test]
fn selected_3d_coefficients_pass_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let p = Parameters {
            d1: rng.gen_range(0.1..10.0),
            d2: rng.gen_range(0.1..10.0),
            alpha: rng.gen_range(0.1..10.0),
            chi: rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            ..Parameters::unit(1.0)
        };
        let mu0 = mu0_3d(&p, false).unwrap().value;
        let mu = mu0 * 10f64.powf(rng.gen_range(0.001f64.log10()..1.0f64.log10() + 1.0));
        let mu = mu.max(1.001 * mu0);
        let c = select_coefficients_3d(&p, mu).unwrap();
        let check = verify_system_3d(&p, mu, &c);
        assert!(check.passed(), "{p:?} mu={mu}: {check:?}");
    }
}
