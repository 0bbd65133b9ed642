//! Sweeps the cell diffusivity at fixed chemotactic sensitivity and prints
//! the largest density reached at each point.

use kslab::harness::{parse_config, run_sweep, SweepSpec};

const CONFIG: &str = include_str!("../configs/small_diffusion_2d.cfg");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut base = parse_config(CONFIG)?;
    base.output = std::env::temp_dir().join("kslab-diffusion-sweep");
    let spec = SweepSpec {
        axis: "d1".into(),
        values: vec![1.0, 0.5, 0.25, 0.125],
        base,
    };
    let start = std::time::Instant::now();
    let summary = run_sweep(&spec)?;
    println!("{} points in {:.1?}", summary.rows.len(), start.elapsed());
    println!(
        "{:>8} {:>16} {:>14} {:>14}",
        "d1", "outcome", "sup Linf_u", "final Linf_u"
    );
    for r in &summary.rows {
        println!(
            "{:>8} {:>16} {:>14.6e} {:>14.6e}",
            r.value,
            r.outcome.map_or("error", |o| o.as_str()),
            r.sup_linf_u.unwrap_or(f64::NAN),
            r.final_linf_u.unwrap_or(f64::NAN)
        );
    }
    println!(
        "sup Linf_u nondecreasing as d1 decreases: {}",
        summary.sup_nondecreasing_as_axis_decreases()
    );
    println!(
        "summary table: {}",
        spec.base.output.join("summary.csv").display()
    );
    Ok(())
}
