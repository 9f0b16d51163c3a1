//! Special functions and adaptive quadrature used by every weighted integral
//! in the crate.

mod gamma;
mod quadrature;

pub use gamma::{beta_fn, gamma_fn, gamma_ratio, ln_gamma_signed, log_gamma};
pub use quadrature::{
    gauss_kronrod_15, integrate, integrate_with, IntervalSpec, PointBehavior, QuadConfig,
    QuadError, QuadResult, Singularity, Symmetry,
};
