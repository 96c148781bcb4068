//! Integer coefficient types.
//!
//! Everything in this crate is generic over a [`Scalar`]: an exact signed
//! integer type with checked arithmetic. [`num_bigint::BigInt`] never
//! overflows; the fixed-width types (`i64`, `i128`) are much faster and
//! report overflow as [`crate::Error::Overflow`] instead of wrapping.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + Debug
    + Display
    + Hash
    + Ord
    + Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_u64_exact(v: u64) -> Result<Self> {
        Self::from_u64(v).ok_or(Error::Overflow)
    }

    fn add_checked(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }

    fn sub_checked(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(rhs).ok_or(Error::Overflow)
    }

    fn mul_checked(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }

    fn pow_checked(&self, exp: u32) -> Result<Self> {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_checked(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_checked(&base)?;
            }
        }
        Ok(acc)
    }

    /// Least non-negative residue modulo a positive `m`.
    fn rem_floor(&self, m: &Self) -> Self {
        self.mod_floor(m)
    }

    fn to_bigint(&self) -> BigInt {
        // i64/i128/BigInt all render losslessly in decimal.
        self.to_string()
            .parse()
            .expect("decimal rendering of an integer")
    }

    fn from_bigint(v: &BigInt) -> Result<Self> {
        Self::from_str_radix(&v.to_string(), 10).map_err(|_| Error::Overflow)
    }
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + Display
        + Hash
        + Ord
        + Integer
        + Signed
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}
