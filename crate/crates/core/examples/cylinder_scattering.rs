//! Solves scattering by a dielectric cylinder and compares with the series
//! solution at a few grid resolutions.

use num_complex::Complex64;
use tevie::assembly::assemble_rhs;
use tevie::fastop::build_operator;
use tevie::oracle::{CylinderSpec, MieCylinder};
use tevie::scene::{BackgroundMedium, ContrastMap, ContrastShape, Grid2D, PlaneWaveTE, Scene, Shape};
use tevie::solver::{solve_scene, Preconditioner, SolverConfig};

fn main() -> tevie::Result<()> {
    let medium = BackgroundMedium::new(1.0, 1.0, 1.0)?;
    let radius = 1.0;
    let chi = Complex64::new(1.0, 0.0);
    let wave = PlaneWaveTE::new([1.0, 0.0], Complex64::new(1.0, 0.0))?;
    let mie = MieCylinder::new(CylinderSpec::new(radius, chi, [0.0, 0.0])?, medium, wave)?;
    println!(
        "series order {} with tail {:.1e}",
        mie.order(),
        mie.truncation_estimate()
    );

    for kh in [0.2, 0.1, 0.05] {
        let h = kh / medium.k_b();
        let n = ((2.0 * radius + medium.wavelength()) / h).ceil() as usize;
        let grid = Grid2D::centered([0.0, 0.0], h, n, n)?;
        let disk = ContrastShape {
            shape: Shape::Disk {
                center: [0.0, 0.0],
                radius,
            },
            chi_e: chi,
            chi_m: 0.0.into(),
        };
        let scene = Scene::new(medium, grid, ContrastMap::from_shapes(&grid, &[disk]))?;
        let cfg = SolverConfig {
            preconditioner: Preconditioner::SymbolDiagonal,
            ..SolverConfig::default()
        };
        let report = solve_scene(
            &scene,
            &build_operator(&scene)?,
            &assemble_rhs(&scene, &wave),
            &cfg,
        )?;

        let (mut num, mut den) = (0.0, 0.0);
        for (cell, x) in grid.centers().enumerate() {
            if (x[0].hypot(x[1]) - radius).abs() <= h {
                continue;
            }
            let reference = mie.fields_at(x)?;
            for (c, r) in reference.iter().take(2).enumerate() {
                num += (report.solution.block(c)[cell] - r).norm_sqr();
                den += r.norm_sqr();
            }
        }
        println!(
            "k h = {kh:<5} grid {n}x{n}: {} GMRES iterations, relative E error {:.4}",
            report.iterations,
            (num / den).sqrt()
        );
    }
    Ok(())
}
