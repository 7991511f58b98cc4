//! Outcome classification: drain invariants over the transaction body, and
//! exact profitability in USD.
//!
//! The two invariants look only at the boundary window (before the second
//! call, after the second-to-last call), i.e. at what the body of the
//! transaction did to the pool and to the attacker, ignoring the attacker's
//! own entry and exit swaps.
//!
//! Profitability compares the attacker's balances across the whole
//! transaction: some priced token must strictly increase by more than the
//! USD threshold, and no other token may decrease — paying for a gain with
//! a different token is arbitrage between prices, not extracted value.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::amount::Amount;
use crate::error::Revert;
use crate::exec::Snapshot;
use crate::ids::{AccountId, TokenId};
use crate::ledger::balance_of;
use crate::world::WorldState;

pub fn amount_to_bigint(a: Amount) -> BigInt {
    let mut bytes = [0u8; 32];
    a.0.to_big_endian(&mut bytes);
    BigInt::from_bytes_be(num_bigint::Sign::Plus, &bytes)
}

/// USD per whole token, as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Price {
    pub num: Amount,
    pub den: Amount,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceTable {
    pub prices: BTreeMap<TokenId, Price>,
}

impl PriceTable {
    /// Exact USD value of `amount` base units, or None for unpriced tokens.
    pub fn usd_value(&self, token: &TokenId, decimals: u32, amount: Amount) -> Option<BigRational> {
        let price = self.prices.get(token)?;
        if price.den.is_zero() {
            return None;
        }
        let scale = BigInt::from(10u32).pow(decimals);
        Some(BigRational::new(
            amount_to_bigint(amount) * amount_to_bigint(price.num),
            amount_to_bigint(price.den) * scale,
        ))
    }
}

/// An exact USD rational that serializes as numerator/denominator strings
/// with a float approximation for human readers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsdValue(pub BigRational);

impl fmt::Display for UsdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.to_f64() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

impl Serialize for UsdValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            num: String,
            den: String,
            approx: &'a f64,
        }
        let approx = self.0.to_f64().unwrap_or(f64::NAN);
        Repr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
            approx: &approx,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UsdValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            num: String,
            den: String,
        }
        let repr = Repr::deserialize(deserializer)?;
        let num: BigInt = repr.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = repr.den.parse().map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(UsdValue(BigRational::new(num, den)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub invariant1_broken: bool,
    pub invariant2_broken: bool,
    pub profitable: bool,
    pub profit_token: Option<TokenId>,
    pub profit_amount: Amount,
    pub profit_usd: Option<UsdValue>,
}

impl Verdict {
    pub fn unprofitable() -> Verdict {
        Verdict {
            invariant1_broken: false,
            invariant2_broken: false,
            profitable: false,
            profit_token: None,
            profit_amount: Amount::ZERO,
            profit_usd: None,
        }
    }
}

/// Invariant 1: the pool's balance of `token_y` strictly decreased across
/// the body window.
pub fn check_invariant1(
    before: &Snapshot,
    after: &Snapshot,
    pool_account: &AccountId,
    token_y: &TokenId,
) -> Result<bool, Revert> {
    let b = balance_of(&before.0, token_y, pool_account)?;
    let a = balance_of(&after.0, token_y, pool_account)?;
    Ok(a < b)
}

/// Invariant 2: the attacker's balance of `token_y` strictly increased
/// across the body window.
pub fn check_invariant2(
    before: &Snapshot,
    after: &Snapshot,
    attacker: &AccountId,
    token_y: &TokenId,
) -> Result<bool, Revert> {
    let b = balance_of(&before.0, token_y, attacker)?;
    let a = balance_of(&after.0, token_y, attacker)?;
    Ok(a > b)
}

/// Compares the attacker's balances between `initial` and `fin`. Profitable
/// iff no token decreased and some priced token's gain exceeds
/// `threshold_usd`. Among qualifying gains the largest USD gain is reported.
pub fn evaluate_profit(
    initial: &WorldState,
    fin: &WorldState,
    prices: &PriceTable,
    threshold_usd: &BigRational,
) -> Result<Verdict, Revert> {
    let attacker = &initial.attacker;
    let mut best: Option<(TokenId, Amount, BigRational)> = None;
    for (token_id, token) in &initial.tokens {
        let before = balance_of(initial, token_id, attacker)?;
        let after = balance_of(fin, token_id, attacker)?;
        if after < before {
            return Ok(Verdict::unprofitable());
        }
        if after > before {
            let gain = after.checked_sub(before)?;
            if let Some(usd) = prices.usd_value(token_id, token.spec.decimals, gain) {
                let better = match &best {
                    Some((_, _, best_usd)) => usd > *best_usd,
                    None => true,
                };
                if better {
                    best = Some((token_id.clone(), gain, usd));
                }
            }
        }
    }
    match best {
        Some((token, gain, usd)) if usd > *threshold_usd => Ok(Verdict {
            invariant1_broken: false,
            invariant2_broken: false,
            profitable: true,
            profit_token: Some(token),
            profit_amount: gain,
            profit_usd: Some(UsdValue(usd)),
        }),
        _ => Ok(Verdict::unprofitable()),
    }
}

/// The default profitability threshold: one US dollar.
pub fn one_dollar() -> BigRational {
    BigRational::one()
}
