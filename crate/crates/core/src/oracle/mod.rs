//! Independent references: the analytic cylinder solution, brute-force
//! quadratures and the dense eigenvalue spectrum.

pub mod mie;
pub mod quadrature;
pub mod spectrum;

pub use mie::{mie_cylinder_fields, CylinderSpec, MieCylinder};
pub use quadrature::{
    brute_force_self_tensor, brute_force_self_term, check_angular_identities, AngularReport,
};
pub use spectrum::{dense_spectrum, min_distance, SpectrumReport};
