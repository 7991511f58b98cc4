//! Exact 256-bit token amounts.
//!
//! All balances, reserves and swap quantities are unsigned 256-bit integers
//! in token base units (10^decimals per whole token). Arithmetic is checked:
//! anything that would overflow 256 bits or go below zero reverts instead of
//! wrapping.

use std::fmt;
use std::str::FromStr;

use primitive_types::U256;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Revert;

/// A token quantity in base units.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Amount(pub U256);

impl Amount {
    pub const ZERO: Amount = Amount(U256::zero());

    pub fn from_u128(v: u128) -> Amount {
        Amount(U256::from(v))
    }

    /// `whole * 10^decimals`, the usual way corpus files spell amounts.
    pub fn from_whole(whole: u128, decimals: u32) -> Amount {
        Amount(U256::from(whole) * U256::from(10u64).pow(U256::from(decimals)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(self, other: Amount) -> Result<Amount, Revert> {
        self.0
            .checked_add(other.0)
            .map(Amount)
            .ok_or(Revert::Overflow)
    }

    pub fn checked_sub(self, other: Amount) -> Result<Amount, Revert> {
        self.0
            .checked_sub(other.0)
            .map(Amount)
            .ok_or(Revert::Underflow)
    }

    pub fn checked_mul(self, other: Amount) -> Result<Amount, Revert> {
        self.0
            .checked_mul(other.0)
            .map(Amount)
            .ok_or(Revert::Overflow)
    }

    /// Integer division, rounding toward zero.
    pub fn checked_div(self, other: Amount) -> Result<Amount, Revert> {
        self.0
            .checked_div(other.0)
            .map(Amount)
            .ok_or(Revert::DivisionByZero)
    }

    /// `self * num / den` with the intermediate product checked.
    pub fn mul_div(self, num: Amount, den: Amount) -> Result<Amount, Revert> {
        self.checked_mul(num)?.checked_div(den)
    }

    pub fn saturating_sub(self, other: Amount) -> Amount {
        Amount(self.0.saturating_sub(other.0))
    }

    pub fn one() -> Amount {
        Amount(U256::one())
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Amount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("invalid amount {s:?}: expected a decimal string"));
        }
        U256::from_dec_str(s)
            .map(Amount)
            .map_err(|e| format!("invalid amount {s:?}: {e}"))
    }
}

// Amounts cross process boundaries as decimal strings: 256-bit values do not
// fit the numeric types of common interchange formats.
impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

impl From<u64> for Amount {
    fn from(v: u64) -> Amount {
        Amount(U256::from(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_arithmetic_reverts_instead_of_wrapping() {
        let max = Amount(U256::MAX);
        assert_eq!(max.checked_add(Amount::one()), Err(Revert::Overflow));
        assert_eq!(Amount::ZERO.checked_sub(Amount::one()), Err(Revert::Underflow));
        assert_eq!(max.checked_mul(Amount::from_u128(2)), Err(Revert::Overflow));
        assert_eq!(
            Amount::one().checked_div(Amount::ZERO),
            Err(Revert::DivisionByZero)
        );
    }

    #[test]
    fn division_rounds_toward_zero() {
        let a = Amount::from_u128(7);
        assert_eq!(a.checked_div(Amount::from_u128(2)).unwrap(), Amount::from_u128(3));
    }

    #[test]
    fn decimal_string_round_trip() {
        let a = Amount::from_whole(10_000, 18);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "\"10000000000000000000000\"");
        let b: Amount = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_decimal_strings() {
        assert!("0x10".parse::<Amount>().is_err());
        assert!("".parse::<Amount>().is_err());
        assert!("-1".parse::<Amount>().is_err());
    }
}
