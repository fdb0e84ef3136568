//! Shared helpers for the integration tests.

#![allow(dead_code)]

pub mod bigfloat;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tevie::scene::{BackgroundMedium, ContrastMap, ContrastShape, Grid2D, Scene, Shape};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn unit_medium() -> BackgroundMedium {
    BackgroundMedium::new(1.0, 1.0, 1.0).unwrap()
}

/// Passive random contrast, optionally magnetic.
pub fn random_contrast(rng: &mut ChaCha8Rng, cells: usize, magnetic: bool) -> ContrastMap {
    let mut draw = |on: bool| -> Vec<Complex64> {
        (0..cells)
            .map(|_| {
                if on {
                    c(rng.gen_range(-0.5..2.0), rng.gen_range(0.0..0.5))
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect()
    };
    let e = draw(true);
    let m = draw(magnetic);
    ContrastMap::new(e, m).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Square `n x n` grid centred at the origin with `k_b h = kh`.
pub fn square_scene(n: usize, kh: f64, contrast: ContrastMap) -> Scene {
    let medium = unit_medium();
    let grid = Grid2D::centered([0.0, 0.0], kh / medium.k_b(), n, n).unwrap();
    Scene::new(medium, grid, contrast).unwrap()
}

/// Disk of the given contrast filling most of an `n x n` grid.
pub fn disk_scene(n: usize, kh: f64, chi_e: Complex64, chi_m: Complex64) -> Scene {
    let medium = unit_medium();
    let h = kh / medium.k_b();
    let grid = Grid2D::centered([0.0, 0.0], h, n, n).unwrap();
    let shape = ContrastShape {
        shape: Shape::Disk {
            center: [0.0, 0.0],
            radius: 0.4 * h * n as f64,
        },
        chi_e,
        chi_m,
    };
    Scene::new(medium, grid, ContrastMap::from_shapes(&grid, &[shape])).unwrap()
}

pub fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
