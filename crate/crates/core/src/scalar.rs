//! Scalar abstraction shared by the polynomial constructions.
//!
//! The symmetric polynomial machinery only needs field arithmetic, so it is
//! written once against [`Scalar`] and instantiated for `f32`, `f64` and
//! exact big rationals.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Field element usable for coefficient construction and evaluation.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> {
    fn from_i64(v: i64) -> Self;

    /// Conversion from a binary float. Exact for rationals, a cast for floats.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// `true` when the value is unusable (overflowed or NaN). Never true for
    /// exact types.
    fn is_non_finite(&self) -> bool {
        false
    }

    fn abs_value(&self) -> Self {
        if self.to_f64() < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_non_finite(&self) -> bool {
        !self.is_finite()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f32 {
    fn from_i64(v: i64) -> Self {
        v as f32
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(v as f32)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn is_non_finite(&self) -> bool {
        !self.is_finite()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs_value(&self) -> Self {
        if self < &BigRational::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Exact rational `num/den`, for building test fixtures and exact parameters.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
