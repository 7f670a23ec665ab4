//! Numerical building blocks: special functions, quadrature and grid densities.

pub mod grid;
pub(crate) mod kernel;
pub mod quadrature;
pub mod special;

pub use grid::{convolve, entropy_of_grid, kl_to_gaussian, moment_of_grid, GridDensity};
pub use quadrature::{integrate, integrate_estimate, QuadEstimate, QuadratureSettings};
pub use special::{digamma, gamma, log_gamma, log_gamma_root, EULER_GAMMA};
