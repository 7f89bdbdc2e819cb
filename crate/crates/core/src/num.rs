//! Integer scalar traits.
//!
//! Everything in this crate is exact integer combinatorics. Multiplicities,
//! degrees and path counts are [`Count`]s (unsigned); K₀ coordinates are
//! [`Coeff`]s (signed). Both are implemented for the machine widths and for
//! the arbitrary-precision types from `num-bigint`, so callers pick the
//! trade-off between speed and overflow headroom.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Unsigned exact counts: edge multiplicities, degrees, path counts.
pub trait Count:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + FromStr
    + Zero
    + One
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }

    /// `self - rhs`, or `None` when the result would be negative.
    fn sub_nonneg(&self, rhs: &Self) -> Option<Self> {
        self.checked_sub(rhs)
    }

    fn from_usize_exact(v: usize) -> Result<Self> {
        Self::from_usize(v).ok_or(Error::Overflow)
    }

    /// `Σ a_i · b_i` with overflow detection.
    fn dot<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a Self, &'a Self)>,
    {
        let mut acc = Self::zero();
        for (a, b) in pairs {
            acc = acc.try_add(&a.try_mul(b)?)?;
        }
        Ok(acc)
    }
}

impl Count for u32 {}
impl Count for u64 {}
impl Count for u128 {}
impl Count for BigUint {}

/// Signed exact coefficients for K₀ vectors and the unit-normalizing
/// automorphisms.
pub trait Coeff:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + FromStr
    + Signed
    + Integer
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(rhs).ok_or(Error::Overflow)
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }
}

impl Coeff for i32 {}
impl Coeff for i64 {}
impl Coeff for i128 {}
impl Coeff for BigInt {}

/// Converts between count types, e.g. a `u64` fixture into `BigUint`.
pub fn convert<A: Count, B: Count>(a: &A) -> Result<B> {
    match a.to_u128() {
        Some(v) => B::from_u128(v).ok_or(Error::Overflow),
        None => a.to_string().parse::<B>().map_err(|_| Error::Overflow),
    }
}
