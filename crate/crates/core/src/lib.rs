//! Symmetric orthogonal polynomials `S_n(p, q, r, s; x)` solving
//! `x²(px² + q) y'' + x(rx² + s) y' − (n(r + (n−1)p) x² + (1 − (−1)^n) s / 2) y = 0`,
//! their four finite and infinite subclasses, generalized Legendre functions,
//! the `x^λ` family and weighted expansions over any of them.
//!
//! Everything in [`core_class`] is generic over [`Scalar`]: `f64`, `f32` and
//! exact `BigRational`.

pub mod error;
pub mod numerics;
pub mod scalar;
pub mod core_class;
pub mod subclasses;
pub mod basis;
pub mod verify;
pub mod legendre;
pub mod lambda_map;
pub mod expansion;

use num_rational::BigRational;

pub use core_class::{ClassParams, SymmetricPoly};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Params = ClassParams<f64>;
pub type Params32 = ClassParams<f32>;
pub type ExactParams = ClassParams<BigRational>;

pub type Poly = SymmetricPoly<f64>;
pub type Poly32 = SymmetricPoly<f32>;
pub type ExactPoly = SymmetricPoly<BigRational>;
