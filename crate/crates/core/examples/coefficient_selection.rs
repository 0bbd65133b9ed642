//! Builds the weights of the coupled functionals and checks the inequality
//! systems they must satisfy. In three dimensions any damping above the
//! threshold admits a set; just below it the last inequality fails. In four
//! and five dimensions the constructive recipe needs damping above its own,
//! larger threshold.

use kslab::thresholds::{
    mu0_general, recipe_threshold_45d, select_coefficients_3d, select_coefficients_45d,
    verify_system_3d, verify_system_45d, SystemCheck,
};
use kslab::Parameters;

fn show(check: &SystemCheck) {
    for q in &check.inequalities {
        println!(
            "    {:<6} lhs {:>13.6e} rhs {:>13.6e} margin {:>13.6e} {}",
            q.label,
            q.lhs,
            q.rhs,
            q.margin(),
            if q.passes() { "ok" } else { "FAILS" }
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Parameters::unit(1.0);
    let mu0 = mu0_general(&p, false)?.value;
    println!("n = 3, mu0 = {mu0:.6}");
    let mu = 1.2 * mu0;
    let c = select_coefficients_3d(&p, mu)?;
    println!("  at mu = 1.2 mu0: {c:?}");
    show(&verify_system_3d(&p, mu, &c));
    let below = 0.99 * mu0;
    println!("  same weights at mu = 0.99 mu0:");
    show(&verify_system_3d(&p, below, &c));

    for n in [4, 5] {
        let p = Parameters { n, ..p };
        let mu0 = mu0_general(&p, false)?.value;
        let recipe = recipe_threshold_45d(&p)?;
        println!("n = {n}, mu0 = {mu0:.6}, recipe threshold = {recipe:.6}");
        for factor in [1.05, 2.0] {
            let mu = factor * mu0;
            match select_coefficients_45d(&p, mu) {
                Ok(c) => {
                    println!("  mu = {factor} mu0: admissible");
                    show(&verify_system_45d(&p, mu, &c));
                }
                Err(e) => println!("  mu = {factor} mu0: {e}"),
            }
        }
    }
    Ok(())
}
