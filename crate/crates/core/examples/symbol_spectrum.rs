//! Eigenvalues of the system matrix for a two-material object next to the
//! accumulation points predicted by the operator symbol.

use num_complex::Complex64;
use tevie::assembly::assemble_dense;
use tevie::oracle::dense_spectrum;
use tevie::scene::{BackgroundMedium, ContrastMap, ContrastShape, Grid2D, Scene, Shape};
use tevie::symbol::{dedup_points, full_symbol, predicted_accumulation};

fn main() -> tevie::Result<()> {
    let chi = [Complex64::new(1.0, 0.2), Complex64::new(3.0, 0.5)];
    let s = full_symbol(chi[1], 0.4);
    println!(
        "symbol at phi = 0.4, chi_e = {}: trace {:.3}, det {:.3}",
        chi[1],
        s[(0, 0)] + s[(1, 1)],
        s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)]
    );

    let medium = BackgroundMedium::new(1.0, 1.0, 1.0)?;
    let grid = Grid2D::centered([0.0, 0.0], 0.25, 20, 20)?;
    let shapes = [
        ContrastShape {
            shape: Shape::Square {
                center: [0.0, 0.0],
                side: 5.0,
            },
            chi_e: chi[0],
            chi_m: 0.0.into(),
        },
        ContrastShape {
            shape: Shape::Disk {
                center: [0.0, 0.0],
                radius: 1.2,
            },
            chi_e: chi[1],
            chi_m: 0.0.into(),
        },
    ];
    let contrast = ContrastMap::from_shapes(&grid, &shapes);
    let predicted = dedup_points(&predicted_accumulation(&contrast), 1e-12);
    let scene = Scene::new(medium, grid, contrast)?;
    let report = dense_spectrum(&assemble_dense(&scene)?, &predicted)?;
    println!(
        "{} eigenvalues, smallest modulus {:.3}",
        report.eigenvalues.len(),
        report.min_modulus()
    );
    for (p, d) in report.predicted.iter().zip(&report.distances) {
        println!("  predicted {p:.3}: nearest eigenvalue at distance {d:.2e}");
    }
    Ok(())
}
