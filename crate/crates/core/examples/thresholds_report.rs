//! Damping thresholds, the convergence threshold and the guaranteed rate for
//! a few parameter sets, including the h minimisation behind the
//! four- and five-dimensional thresholds.

use kslab::thresholds::{minimize_h, mu0_general, report};
use kslab::Parameters;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let unit = Parameters::unit(10.0);
    for (label, p, convex) in [
        ("unit, n = 3", unit, false),
        ("unit, n = 3, convex", unit, true),
        ("unit, n = 4", Parameters { n: 4, ..unit }, false),
        ("unit, n = 5", Parameters { n: 5, ..unit }, false),
        ("slow signal, n = 3", Parameters { d2: 0.1, ..unit }, false),
        (
            "strong attraction, n = 3",
            Parameters { chi: 5.0, ..unit },
            false,
        ),
    ] {
        println!("== {label}");
        for (k, v) in report(&p, convex)?.lines() {
            println!("  {k}: {v}");
        }
    }

    println!("== h minimum over diffusion rates");
    println!(
        "{:>3} {:>6} {:>6} {:>12} {:>10} {:>10}",
        "n", "d1", "d2", "h_min", "epsilon", "eta"
    );
    for n in [4, 5] {
        for &d1 in &[0.1, 1.0, 10.0] {
            for &d2 in &[0.1, 1.0, 10.0] {
                let h = minimize_h(n, d1, d2)?;
                println!(
                    "{n:>3} {d1:>6} {d2:>6} {:>12.6} {:>10.4e} {:>10.4e}",
                    h.value, h.epsilon, h.eta
                );
            }
        }
    }

    println!("== mu0 as d1 shrinks (n = 3)");
    for d1 in [1.0, 0.5, 0.25, 0.125, 0.0625] {
        let mu0 = mu0_general(&Parameters { d1, ..unit }, false)?.value;
        println!("  d1 = {d1:<7} mu0 = {mu0:.6}");
    }
    Ok(())
}
