//! Observed spatial order of the scheme against manufactured solutions, in
//! one and two dimensions, with and without the chemotactic term.

use kslab::solver::{refinement_study, ManufacturedProblem};
use kslab::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (
            "1d diffusion",
            ManufacturedProblem::diffusion_only(),
            1,
            vec![32, 64, 128, 256],
        ),
        (
            "1d chemotaxis",
            ManufacturedProblem::with_chemotaxis(1.0),
            1,
            vec![32, 64, 128, 256],
        ),
        (
            "2d diffusion",
            ManufacturedProblem::diffusion_only(),
            2,
            vec![16, 32, 64],
        ),
    ];
    for (label, problem, dim, levels) in cases {
        let grids = levels
            .iter()
            .map(|&n| Grid::unit(dim, n))
            .collect::<Result<Vec<_>, _>>()?;
        let study = refinement_study(&problem, &grids)?;
        println!("== {label}");
        for (i, (cells, err)) in study.cells.iter().zip(&study.errors).enumerate() {
            let order = if i == 0 {
                String::new()
            } else {
                format!("{:.4}", study.orders[i - 1])
            };
            println!(
                "  {:>10} cells  L2 error {err:.6e}  {order}",
                format!("{cells:?}")
            );
        }
        println!("  observed order {:.4}", study.observed_order);
    }
    Ok(())
}
