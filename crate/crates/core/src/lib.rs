//! Volume integral equation solver for two-dimensional TE scattering by
//! inhomogeneous dielectric and magnetic objects.
//!
//! The unknowns are the total fields `[E1 | E2 | H3]` at the cell centres of a
//! uniform grid. The crate covers the kernels and their singular split, the
//! self-cell closed form, dense assembly, an FFT matrix-vector product,
//! restarted GMRES, the operator symbol with its predicted essential spectrum,
//! and independent references (series solution for a cylinder, brute-force
//! quadratures, dense eigenvalues).
//!
//! Time dependence is `e^{-i omega t}`; passive media have `Im chi >= 0`.

pub mod assembly;
pub mod cli;
pub mod error;
pub mod fastop;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod scene;
pub mod selfcheck;
pub mod solver;
pub mod specfun;
pub mod symbol;

pub use error::{Error, Result};
