//! FFT matrix-vector product against the assembled matrix, with timings.

use std::time::Instant;

use num_complex::Complex64;
use tevie::assembly::assemble_dense;
use tevie::fastop::build_operator;
use tevie::scene::{BackgroundMedium, ContrastMap, ContrastShape, FieldVector, Grid2D, Scene, Shape};

fn main() -> tevie::Result<()> {
    let medium = BackgroundMedium::new(1.0, 1.0, 1.0)?;
    for n in [16, 32, 48] {
        let grid = Grid2D::centered([0.0, 0.0], 0.2, n, n)?;
        let disk = ContrastShape {
            shape: Shape::Disk {
                center: [0.0, 0.0],
                radius: 0.08 * n as f64,
            },
            chi_e: Complex64::new(1.5, 0.2),
            chi_m: Complex64::new(0.3, 0.0),
        };
        let scene = Scene::new(medium, grid, ContrastMap::from_shapes(&grid, &[disk]))?;
        let u: Vec<Complex64> = (0..scene.dim())
            .map(|i| Complex64::from_polar(1.0, 0.37 * i as f64))
            .collect();

        let t = Instant::now();
        let dense = assemble_dense(&scene)?;
        let t_assemble = t.elapsed();
        let expected = dense.matvec(&u)?;

        let t = Instant::now();
        let op = build_operator(&scene)?;
        let t_build = t.elapsed();
        let t = Instant::now();
        let got = op.apply(&FieldVector::from_vec(scene.num_cells(), u)?)?;
        let t_apply = t.elapsed();

        let num: f64 = got
            .as_slice()
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = expected.iter().map(|b| b.norm_sqr()).sum();
        println!(
            "{n:>3}x{n:<3} rel diff {:.1e}  dense assembly {t_assemble:>10.2?}  tables {t_build:>9.2?}  apply {t_apply:>9.2?}",
            (num / den).sqrt()
        );
    }
    Ok(())
}
