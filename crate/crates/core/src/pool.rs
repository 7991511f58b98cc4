//! Constant-product pool operations.
//!
//! The pool tracks `reserve_x`/`reserve_y` as its last-synced view of its own
//! ledger balances. Swaps price against reserves but measure the actual input
//! as `balance - reserve`, so tokens already sitting in the pool (from a
//! previous transfer or an unskimmed remainder) count as swap input.
//! `skim` pays out any excess of balance over reserve; `sync` adopts the
//! balances as the new reserves.
//!
//! Every operation is atomic: on revert the world is left exactly as it was.

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::Revert;
use crate::ids::{AccountId, PoolId, TokenId};
use crate::ledger::{balance_of, transfer};
use crate::world::WorldState;

pub const DEFAULT_FEE_NUM: u64 = 997;
pub const DEFAULT_FEE_DEN: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolState {
    pub id: PoolId,
    pub token_x: TokenId,
    pub token_y: TokenId,
    pub reserve_x: Amount,
    pub reserve_y: Amount,
    pub fee_num: u64,
    pub fee_den: u64,
    pub account: AccountId,
}

impl PoolState {
    pub fn reserve_of(&self, token: &TokenId) -> Option<Amount> {
        if *token == self.token_x {
            Some(self.reserve_x)
        } else if *token == self.token_y {
            Some(self.reserve_y)
        } else {
            None
        }
    }

    pub fn other_token(&self, token: &TokenId) -> Option<&TokenId> {
        if *token == self.token_x {
            Some(&self.token_y)
        } else if *token == self.token_y {
            Some(&self.token_x)
        } else {
            None
        }
    }
}

/// out = floor(in·fee_num·reserve_out / (reserve_in·fee_den + in·fee_num))
pub fn get_amount_out(
    amount_in: Amount,
    reserve_in: Amount,
    reserve_out: Amount,
    fee_num: u64,
    fee_den: u64,
) -> Result<Amount, Revert> {
    if reserve_in.is_zero() || reserve_out.is_zero() {
        return Err(Revert::ZeroReserves);
    }
    let in_with_fee = amount_in.checked_mul(Amount::from(fee_num))?;
    let numerator = in_with_fee.checked_mul(reserve_out)?;
    let denominator = reserve_in
        .checked_mul(Amount::from(fee_den))?
        .checked_add(in_with_fee)?;
    numerator.checked_div(denominator)
}

/// Swaps `amount_in` of `input_token` (paid by `caller`) for the other pool
/// token, sent to `to`. Reserves are updated to the pool's post-swap balances.
pub fn swap_exact_in(
    world: &mut WorldState,
    pool_id: &PoolId,
    input_token: &TokenId,
    amount_in: Amount,
    caller: &AccountId,
    to: &AccountId,
) -> Result<Amount, Revert> {
    let rollback = world.clone();
    match swap_exact_in_inner(world, pool_id, input_token, amount_in, caller, to) {
        Ok(out) => Ok(out),
        Err(e) => {
            *world = rollback;
            Err(e)
        }
    }
}

fn swap_exact_in_inner(
    world: &mut WorldState,
    pool_id: &PoolId,
    input_token: &TokenId,
    amount_in: Amount,
    caller: &AccountId,
    to: &AccountId,
) -> Result<Amount, Revert> {
    let pool = world.pool(pool_id)?.clone();
    let output_token = pool
        .other_token(input_token)
        .ok_or_else(|| Revert::UnknownToken(input_token.to_string()))?
        .clone();
    let reserve_in = pool.reserve_of(input_token).unwrap();
    let reserve_out = pool.reserve_of(&output_token).unwrap();

    transfer(world, input_token, caller, &pool.account, amount_in)?;

    // Actual input: whatever the pool now holds beyond its booked reserve.
    // Transfer-time behaviors (fees, deflation) make this differ from
    // amount_in, and pre-existing excess counts too.
    let held_in = balance_of(world, input_token, &pool.account)?;
    let effective_in = held_in
        .checked_sub(reserve_in)
        .map_err(|_| Revert::InsufficientOutput)?;
    let out = get_amount_out(effective_in, reserve_in, reserve_out, pool.fee_num, pool.fee_den)?;
    if out.is_zero() {
        return Err(Revert::InsufficientOutput);
    }
    transfer(world, &output_token, &pool.account, to, out)?;

    let new_reserve_in = balance_of(world, input_token, &pool.account)?;
    let new_reserve_out = balance_of(world, &output_token, &pool.account)?;
    let p = world.pool_mut(pool_id)?;
    if *input_token == p.token_x {
        p.reserve_x = new_reserve_in;
        p.reserve_y = new_reserve_out;
    } else {
        p.reserve_y = new_reserve_in;
        p.reserve_x = new_reserve_out;
    }
    Ok(out)
}

/// Pays out any excess of the pool's balances over its reserves to `to`.
/// Shortfalls (balance below reserve) skim as zero; the transfer still runs,
/// so transfer-time behaviors fire even for zero amounts.
pub fn skim(
    world: &mut WorldState,
    pool_id: &PoolId,
    to: &AccountId,
) -> Result<(Amount, Amount), Revert> {
    let rollback = world.clone();
    match skim_inner(world, pool_id, to) {
        Ok(v) => Ok(v),
        Err(e) => {
            *world = rollback;
            Err(e)
        }
    }
}

fn skim_inner(
    world: &mut WorldState,
    pool_id: &PoolId,
    to: &AccountId,
) -> Result<(Amount, Amount), Revert> {
    let pool = world.pool(pool_id)?.clone();
    let excess_x = balance_of(world, &pool.token_x, &pool.account)?.saturating_sub(pool.reserve_x);
    let excess_y = balance_of(world, &pool.token_y, &pool.account)?.saturating_sub(pool.reserve_y);
    transfer(world, &pool.token_x, &pool.account, to, excess_x)?;
    transfer(world, &pool.token_y, &pool.account, to, excess_y)?;
    Ok((excess_x, excess_y))
}

/// Adopts the pool's current balances as its reserves.
pub fn sync(world: &mut WorldState, pool_id: &PoolId) -> Result<(), Revert> {
    let pool = world.pool(pool_id)?.clone();
    let bal_x = balance_of(world, &pool.token_x, &pool.account)?;
    let bal_y = balance_of(world, &pool.token_y, &pool.account)?;
    if bal_x.is_zero() || bal_y.is_zero() {
        return Err(Revert::SyncZeroReserve);
    }
    let p = world.pool_mut(pool_id)?;
    p.reserve_x = bal_x;
    p.reserve_y = bal_y;
    Ok(())
}
