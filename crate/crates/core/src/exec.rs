//! Transaction execution: symbolic arguments, call sequences, snapshots.
//!
//! A test case is a list of [`Call`]s executed atomically as one transaction.
//! Symbolic arguments are resolved against the live state immediately before
//! the call that uses them, so e.g. `balance_of_self` tracks whatever earlier
//! calls in the same transaction produced.
//!
//! The executor records two boundary snapshots — the state just before the
//! second call and just after the second-to-last call — which is the window
//! the invariant checks inspect: the first and last calls are the attacker's
//! own swaps in and out, and the body in between is where a drain shows up.

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::Revert;
use crate::ids::{AccountId, PoolId, TokenId};
use crate::ledger::{self, balance_of, BPS_DENOMINATOR};
use crate::pool;
use crate::world::WorldState;

/// A full value copy of the world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot(pub WorldState);

pub fn take_snapshot(world: &WorldState) -> Snapshot {
    Snapshot(world.clone())
}

pub fn restore(world: &mut WorldState, snapshot: &Snapshot) {
    *world = snapshot.0.clone();
}

/// Execution context: who the attacker is and which pool is under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecCtx {
    pub attacker: AccountId,
    pub pool: PoolId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolicArg {
    Constant { value: Amount },
    /// Attacker's current balance of `token`.
    BalanceOfSelf { token: TokenId },
    /// Pool account's current balance of `token`.
    BalanceOfPair { token: TokenId },
    /// Pool balance minus one; fails on an empty pool.
    PairBalanceMinusOne { token: TokenId },
    /// totalSupply − 2·(totalSupply / pool balance), integer division.
    BurnSupplyFormula { token: TokenId },
    /// Largest `a` such that `a` plus its exclusive transfer fee does not
    /// exceed the inner value. Passes the inner value through unchanged for
    /// tokens without an exclusive fee.
    FeeAdjusted {
        token: TokenId,
        inner: Box<SymbolicArg>,
    },
}

impl SymbolicArg {
    pub fn constant(value: Amount) -> Self {
        SymbolicArg::Constant { value }
    }
}

/// Largest `a` with `a + floor(a·rate_bps/10000) <= desired_total` for the
/// token's exclusive fee rate.
pub fn compute_exclusive_fee_amount(
    world: &WorldState,
    token: &TokenId,
    desired_total: Amount,
) -> Result<Amount, Revert> {
    let rate = world
        .token(token)?
        .spec
        .exclusive_fee_bps()
        .ok_or_else(|| {
            Revert::ArgResolution(format!("token {token} has no exclusive transfer fee"))
        })?;
    let den = Amount::from(BPS_DENOMINATOR);
    let gross = |a: Amount| -> Result<Amount, Revert> {
        a.checked_add(a.mul_div(Amount::from(rate), den)?)
    };
    // Closed-form floor is at most a few units low because the fee floors;
    // walk up to the true maximum.
    let mut a = desired_total.mul_div(den, Amount::from(BPS_DENOMINATOR + rate))?;
    loop {
        let next = a.checked_add(Amount::one())?;
        if gross(next)? <= desired_total {
            a = next;
        } else {
            return Ok(a);
        }
    }
}

pub fn resolve_arg(
    world: &WorldState,
    ctx: &ExecCtx,
    arg: &SymbolicArg,
) -> Result<Amount, Revert> {
    let pool_account = |w: &WorldState| -> Result<AccountId, Revert> {
        Ok(w.pool(&ctx.pool)?.account.clone())
    };
    match arg {
        SymbolicArg::Constant { value } => Ok(*value),
        SymbolicArg::BalanceOfSelf { token } => balance_of(world, token, &ctx.attacker),
        SymbolicArg::BalanceOfPair { token } => balance_of(world, token, &pool_account(world)?),
        SymbolicArg::PairBalanceMinusOne { token } => {
            let bal = balance_of(world, token, &pool_account(world)?)?;
            bal.checked_sub(Amount::one())
                .map_err(|_| Revert::ArgResolution("pool balance is zero".into()))
        }
        SymbolicArg::BurnSupplyFormula { token } => {
            let supply = ledger::total_supply(world, token)?;
            let bal = balance_of(world, token, &pool_account(world)?)?;
            let quotient = supply
                .checked_div(bal)
                .map_err(|_| Revert::ArgResolution("pool balance is zero".into()))?;
            let twice = quotient
                .checked_mul(Amount::from_u128(2))
                .map_err(|e| Revert::ArgResolution(e.to_string()))?;
            supply
                .checked_sub(twice)
                .map_err(|_| Revert::ArgResolution("supply formula underflows".into()))
        }
        SymbolicArg::FeeAdjusted { token, inner } => {
            let inner_value = resolve_arg(world, ctx, inner)?;
            if world.token(token)?.spec.exclusive_fee_bps().is_some() {
                compute_exclusive_fee_amount(world, token, inner_value)
            } else {
                Ok(inner_value)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Call {
    /// Attacker sends `amount` of `token` to `to`.
    Transfer {
        token: TokenId,
        to: AccountId,
        amount: SymbolicArg,
    },
    /// Attacker burns `amount` of `token` held by `from`.
    Burn {
        token: TokenId,
        from: AccountId,
        amount: SymbolicArg,
    },
    Skim {
        pool: PoolId,
        to: AccountId,
    },
    Sync {
        pool: PoolId,
    },
    SwapExactIn {
        pool: PoolId,
        input_token: TokenId,
        amount: SymbolicArg,
        to: AccountId,
    },
    Hook {
        token: TokenId,
        name: String,
    },
}

impl Call {
    fn with_resolved_args(&self, resolved: &[Amount]) -> Call {
        let constant = |i: usize| SymbolicArg::constant(resolved[i]);
        match self {
            Call::Transfer { token, to, .. } => Call::Transfer {
                token: token.clone(),
                to: to.clone(),
                amount: constant(0),
            },
            Call::Burn { token, from, .. } => Call::Burn {
                token: token.clone(),
                from: from.clone(),
                amount: constant(0),
            },
            Call::SwapExactIn {
                pool, input_token, to, ..
            } => Call::SwapExactIn {
                pool: pool.clone(),
                input_token: input_token.clone(),
                amount: constant(0),
                to: to.clone(),
            },
            other => other.clone(),
        }
    }

    fn symbolic_args(&self) -> Vec<&SymbolicArg> {
        match self {
            Call::Transfer { amount, .. }
            | Call::Burn { amount, .. }
            | Call::SwapExactIn { amount, .. } => vec![amount],
            _ => vec![],
        }
    }
}

/// One executed call with its arguments pinned to the values they resolved
/// to, so a trace can be replayed verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    #[serde(flatten)]
    pub op: Call,
    pub args_resolved: Vec<Amount>,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxResult {
    pub reverted: bool,
    pub revert_reason: Option<String>,
    pub failed_index: Option<usize>,
    pub trace: Vec<TraceEntry>,
    /// (before the second call, after the second-to-last call); present only
    /// for non-reverting transactions of at least two calls.
    pub boundary: Option<(Snapshot, Snapshot)>,
    pub final_state: WorldState,
}

fn apply_call(world: &mut WorldState, ctx: &ExecCtx, call: &Call, args: &[Amount]) -> Result<String, Revert> {
    match call {
        Call::Transfer { token, to, .. } => {
            ledger::transfer(world, token, &ctx.attacker, to, args[0])?;
            Ok("ok".into())
        }
        Call::Burn { token, from, .. } => {
            ledger::burn(world, token, &ctx.attacker, from, args[0])?;
            Ok("ok".into())
        }
        Call::Skim { pool, to } => {
            let (x, y) = pool::skim(world, pool, to)?;
            Ok(format!("ok skim=({x},{y})"))
        }
        Call::Sync { pool } => {
            pool::sync(world, pool)?;
            Ok("ok".into())
        }
        Call::SwapExactIn {
            pool, input_token, to, ..
        } => {
            let out = pool::swap_exact_in(world, pool, input_token, args[0], &ctx.attacker, to)?;
            Ok(format!("ok out={out}"))
        }
        Call::Hook { token, name } => {
            ledger::invoke_hook(world, token, name, &ctx.attacker)?;
            Ok("ok".into())
        }
    }
}

/// Executes `calls` as one atomic transaction against a copy of `initial`.
/// Any revert (including argument resolution failure) aborts the whole
/// transaction and `final_state` is the untouched initial state.
pub fn execute_tx(initial: &WorldState, calls: &[Call], ctx: &ExecCtx) -> TxResult {
    let mut world = initial.clone();
    let mut trace = Vec::with_capacity(calls.len());
    let mut before_window: Option<Snapshot> = None;
    let mut after_window: Option<Snapshot> = None;

    for (index, call) in calls.iter().enumerate() {
        let mut resolved = Vec::new();
        let mut failure: Option<Revert> = None;
        for arg in call.symbolic_args() {
            match resolve_arg(&world, ctx, arg) {
                Ok(v) => resolved.push(v),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        let outcome = match failure {
            Some(e) => Err(e),
            None => apply_call(&mut world, ctx, call, &resolved),
        };
        match outcome {
            Ok(desc) => {
                trace.push(TraceEntry {
                    op: call.with_resolved_args(&resolved),
                    args_resolved: resolved,
                    outcome: desc,
                });
            }
            Err(e) => {
                trace.push(TraceEntry {
                    op: call.clone(),
                    args_resolved: resolved,
                    outcome: format!("revert: {e}"),
                });
                return TxResult {
                    reverted: true,
                    revert_reason: Some(e.to_string()),
                    failed_index: Some(index),
                    trace,
                    boundary: None,
                    final_state: initial.clone(),
                };
            }
        }
        if calls.len() >= 2 {
            if index == 0 {
                before_window = Some(take_snapshot(&world));
            }
            if index == calls.len() - 2 {
                after_window = Some(take_snapshot(&world));
            }
        }
    }

    TxResult {
        reverted: false,
        revert_reason: None,
        failed_index: None,
        trace,
        boundary: before_window.zip(after_window),
        final_state: world,
    }
}
