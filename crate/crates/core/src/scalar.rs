//! Coefficient rings for the generic polynomial and Jacobian code.
//!
//! Elements of the runtime-modulus rings carry their modulus, so a single
//! element is enough to manufacture the additive and multiplicative identity
//! of its ring. This is what lets [`crate::poly::Poly`] and
//! [`crate::jacobian::MumfordDiv`] be generic over the rationals, prime fields,
//! their quadratic extensions and the capped-precision rings `Z/p^k` alike.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A commutative ring with (possibly failing) inversion.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    /// Image of an integer under the canonical map `Z -> R`.
    fn from_int_like(&self, n: &BigInt) -> Self;
    /// Multiplicative inverse; `Err(NonInvertible)` for zero and non-units.
    fn try_inv(&self) -> Result<Self>;

    fn is_one_elem(&self) -> bool {
        *self == self.one_like()
    }

    fn from_i64_like(&self, n: i64) -> Self {
        self.from_int_like(&BigInt::from(n))
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn pow_u64(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }

    fn one_like(&self) -> Self {
        BigRational::one()
    }

    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }

    fn from_int_like(&self, n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn try_inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::NonInvertible)
        } else {
            Ok(self.recip())
        }
    }

    fn is_one_elem(&self) -> bool {
        One::is_one(self)
    }
}
