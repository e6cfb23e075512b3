//! Scalar types used for probabilities.
//!
//! Laws and exact oracles are generic over [`Scalar`]; root finding needs a
//! [`num_traits::Float`] on top of it. `f64` is the working type, `f32` is
//! supported for cheap evaluation and [`BigRational`] gives exact pmfs.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Slack allowed when checking that probabilities sum to one.
    fn normalization_tolerance() -> Self;

    fn from_count(k: u64) -> Self {
        Self::from_u64(k).expect("integer count representable in scalar")
    }

    /// `self^k` by repeated squaring.
    fn powu(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn normalization_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn normalization_tolerance() -> Self {
        1e-5
    }
}

impl Scalar for BigRational {
    fn normalization_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
}

/// Converts an `f64` constant into `T`; exact for binary fractions.
pub fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("finite constant")
}

/// Scales an `f64`-calibrated tolerance to the precision of `T`.
pub fn tol<T: num_traits::Float>(v: f64) -> T {
    let ratio = T::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
    T::from(v * ratio).unwrap()
}
