mod common;

use common::{c, random_contrast, random_vector, rng, square_scene};
use num_complex::Complex64;
use std::f64::consts::TAU;

use proptest::prelude::*;
use tevie::fastop::build_operator;
use tevie::kernels::{kernel_g_singular, kernel_k_compact, tensor_a, tensor_b, Displacement};
use tevie::scene::{BackgroundMedium, ContrastMap, ContrastShape, FieldVector, Grid2D, Shape};
use tevie::symbol::full_symbol;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tensor_a_symmetric_and_even(r in 1e-3f64..10.0, phi in 0.0f64..TAU, k in 0.1f64..5.0) {
        let d = Displacement::from_polar(r, phi);
        let a = tensor_a(&d, k).unwrap();
        prop_assert_eq!(a[(0, 1)], a[(1, 0)]);
        prop_assert_eq!(a, tensor_a(&-d, k).unwrap());
        prop_assert!(a.is_finite());
        let b = tensor_b(&d, k).unwrap();
        prop_assert_eq!(b, -tensor_b(&-d, k).unwrap());
        prop_assert_eq!(b[(0, 2)], -b[(2, 0)]);
    }

    #[test]
    fn split_identity_holds(kr in 1e-3f64..20.0, phi in 0.0f64..TAU, omega in 0.2f64..4.0, eps in 0.5f64..3.0, mu in 0.5f64..3.0) {
        let medium = BackgroundMedium::new(omega, eps, mu).unwrap();
        let k = medium.k_b();
        let d = Displacement::from_polar(kr / k, phi);
        let a = tensor_a(&d, k).unwrap();
        let sum = kernel_g_singular(&d).unwrap() + kernel_k_compact(&d, &medium).unwrap() + a;
        for p in 0..2 {
            for q in 0..2 {
                prop_assert!(sum[(p, q)].norm() < 1e-12 * a.max_abs());
            }
        }
    }

    #[test]
    fn grid_index_round_trip(n1 in 1usize..40, n2 in 1usize..40, seed in 0u64..1000) {
        let grid = Grid2D::new([-1.0, 2.0], 0.1, n1, n2).unwrap();
        let n = (seed as usize) % (n1 * n2);
        let (i, j) = grid.ij(n);
        prop_assert_eq!(grid.index(i, j), n);
        let x = grid.cell_center(n);
        prop_assert!((x[0] - (-1.0 + 0.1 * (i as f64 + 0.5))).abs() < 1e-12);
        prop_assert!((x[1] - (2.0 + 0.1 * (j as f64 + 0.5))).abs() < 1e-12);
    }

    #[test]
    fn symbol_eigenvalues_are_one_and_one_plus_chi(re in -0.9f64..3.0, im in 0.0f64..2.0, phi in 0.0f64..TAU) {
        let chi = c(re, im);
        let s = full_symbol(chi, phi);
        let tr = s[(0, 0)] + s[(1, 1)];
        let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
        prop_assert!((tr - (2.0 + chi)).norm() < 1e-12);
        prop_assert!((det - (1.0 + chi)).norm() < 1e-12);
        prop_assert_eq!(s[(2, 2)], c(1.0, 0.0));
    }

    #[test]
    fn later_shapes_win(r in 0.1f64..0.9) {
        let grid = Grid2D::centered([0.0, 0.0], 0.1, 20, 20).unwrap();
        let outer = ContrastShape { shape: Shape::Square { center: [0.0, 0.0], side: 2.0 }, chi_e: c(1.0, 0.0), chi_m: c(0.0, 0.0) };
        let inner = ContrastShape { shape: Shape::Disk { center: [0.0, 0.0], radius: r }, chi_e: c(3.0, 0.5), chi_m: c(0.2, 0.0) };
        let map = ContrastMap::from_shapes(&grid, &[outer, inner]);
        for (n, x) in grid.centers().enumerate() {
            let expected = if x[0].hypot(x[1]) < r { c(3.0, 0.5) } else { c(1.0, 0.0) };
            prop_assert_eq!(map.chi_e()[n], expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fast_operator_is_linear(seed in 0u64..10_000, n in 3usize..9, a_re in -2.0f64..2.0, a_im in -2.0f64..2.0) {
        let mut r = rng(seed);
        let scene = square_scene(n, 0.3, random_contrast(&mut r, n * n, true));
        let op = build_operator(&scene).unwrap();
        let cells = n * n;
        let u = random_vector(&mut r, 3 * cells);
        let v = random_vector(&mut r, 3 * cells);
        let alpha = Complex64::new(a_re, a_im);
        let w: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| alpha * x + y).collect();
        let au = op.apply(&FieldVector::from_vec(cells, u).unwrap()).unwrap();
        let av = op.apply(&FieldVector::from_vec(cells, v).unwrap()).unwrap();
        let aw = op.apply(&FieldVector::from_vec(cells, w).unwrap()).unwrap();
        let combo: Vec<Complex64> = au.as_slice().iter().zip(av.as_slice()).map(|(x, y)| alpha * x + y).collect();
        prop_assert!(common::rel_diff(aw.as_slice(), &combo) < 1e-12);
    }
}
