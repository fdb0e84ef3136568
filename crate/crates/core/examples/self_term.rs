//! Closed-form self term against brute-force polar quadrature.

use tevie::assembly::{self_term, SelfTermConstants};
use tevie::oracle::brute_force_self_term;

fn main() -> tevie::Result<()> {
    for kh in [0.05, 0.3, 1.0] {
        let closed = self_term(1.0, kh)?;
        let st = SelfTermConstants::new(1.0, kh)?;
        println!(
            "k h = {kh}: self term {closed:.12}, E bracket {:.6}, H bracket {:.6}",
            st.e_bracket, st.h_bracket
        );
        for refinement in 2..=6 {
            let q = brute_force_self_term(1.0, kh, refinement)? - 0.5;
            println!(
                "  excluded radius a/10^{refinement}: error {:.2e}",
                (q - closed).norm()
            );
        }
    }
    Ok(())
}
