//! Splits the in-plane dyadic kernel into its singular and compact parts.

use tevie::kernels::{kernel_g_singular, kernel_k_compact, tensor_a, Displacement};
use tevie::scene::BackgroundMedium;

fn main() -> tevie::Result<()> {
    let medium = BackgroundMedium::new(1.0, 1.0, 1.0)?;
    let k = medium.k_b();
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>10}",
        "k r", "|A11|", "|G11|", "|K11|", "residual"
    );
    for kr in [1e-3, 1e-2, 0.1, 1.0, 10.0] {
        let d = Displacement::from_polar(kr / k, 0.7);
        let a = tensor_a(&d, k)?;
        let g = kernel_g_singular(&d)?;
        let kk = kernel_k_compact(&d, &medium)?;
        let sum = g + kk + a;
        let res = (0..4).map(|i| sum[(i / 2, i % 2)].norm()).fold(0.0, f64::max) / a.max_abs();
        println!(
            "{kr:>8} {:>12.4e} {:>12.4e} {:>12.4e} {res:>10.1e}",
            a[(0, 0)].norm(),
            g[(0, 0)].norm(),
            kk[(0, 0)].norm()
        );
    }
    Ok(())
}
