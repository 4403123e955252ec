//! Integer coefficient rings.
//!
//! Everything in this crate is computed over an exact integer type. The
//! [`Coeff`] trait collects what the algorithms need from it: Euclidean
//! division (for normal forms), checked arithmetic (overflow is a hard
//! error, never a silent wrap), and string conversion for serialization.
//! `i64`, `i128` and [`num_bigint::BigInt`] all qualify.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

pub trait Coeff:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + Hash
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Send
    + Sync
    + 'static
{
    fn from_int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("coefficient type cannot hold i64")
    }

    fn add_ck(&self, other: &Self) -> Self {
        self.checked_add(other).expect("coefficient overflow in addition")
    }

    fn sub_ck(&self, other: &Self) -> Self {
        self.checked_sub(other).expect("coefficient overflow in subtraction")
    }

    fn mul_ck(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("coefficient overflow in multiplication")
    }

    fn is_unit(&self) -> bool {
        self.is_one() || (-self.clone()).is_one()
    }
}

impl<T> Coeff for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn units() {
        assert!(1i64.is_unit());
        assert!((-1i128).is_unit());
        assert!(!BigInt::from(2).is_unit());
        assert!(!0i64.is_unit());
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_is_not_silent() {
        let _ = i64::MAX.add_ck(&1);
    }
}
