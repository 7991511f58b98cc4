//! The simulated world: every token ledger, every pool, and the attacker
//! account, as one plain value.
//!
//! `WorldState` is `Clone + PartialEq` on purpose: snapshots are full value
//! copies and rollback is assignment. The maps are ordered so that iteration,
//! serialization, and therefore whole scans are deterministic.

use std::collections::{BTreeMap, BTreeSet};

use crate::amount::Amount;
use crate::error::{Revert, SpecError};
use crate::ids::{AccountId, PoolId, TokenId};
use crate::ledger::{BehaviorSpec, LedgerState, RebaseState, TokenSpec};
use crate::pool::PoolState;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub spec: TokenSpec,
    pub ledger: LedgerState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldState {
    pub tokens: BTreeMap<TokenId, Token>,
    pub pools: BTreeMap<PoolId, PoolState>,
    pub pool_accounts: BTreeSet<AccountId>,
    pub attacker: AccountId,
}

impl WorldState {
    pub fn new(attacker: AccountId) -> Self {
        WorldState {
            tokens: BTreeMap::new(),
            pools: BTreeMap::new(),
            pool_accounts: BTreeSet::new(),
            attacker,
        }
    }

    pub fn token(&self, id: &TokenId) -> Result<&Token, Revert> {
        self.tokens
            .get(id)
            .ok_or_else(|| Revert::UnknownToken(id.to_string()))
    }

    pub fn token_mut(&mut self, id: &TokenId) -> Result<&mut Token, Revert> {
        self.tokens
            .get_mut(id)
            .ok_or_else(|| Revert::UnknownToken(id.to_string()))
    }

    pub fn pool(&self, id: &PoolId) -> Result<&PoolState, Revert> {
        self.pools
            .get(id)
            .ok_or_else(|| Revert::UnknownPool(id.to_string()))
    }

    pub fn pool_mut(&mut self, id: &PoolId) -> Result<&mut PoolState, Revert> {
        self.pools
            .get_mut(id)
            .ok_or_else(|| Revert::UnknownPool(id.to_string()))
    }

    pub fn is_pool_account(&self, account: &AccountId) -> bool {
        self.pool_accounts.contains(account)
    }

    /// Installs a token with the given initial holder balances (token units).
    /// Holder balances must sum to the declared total supply; rebase holder
    /// balances must convert to shares exactly.
    pub fn add_token(
        &mut self,
        spec: TokenSpec,
        holders: &BTreeMap<AccountId, Amount>,
    ) -> Result<(), SpecError> {
        spec.validate()?;
        let path = |field: &str| format!("tokens[{}].{}", spec.id, field);
        if self.tokens.contains_key(&spec.id) {
            return Err(SpecError::new(path("id"), "duplicate token id"));
        }

        let rebase = match &spec.behavior {
            BehaviorSpec::ShareRebase {
                initial_token_supply,
                initial_share_supply,
                ..
            } => {
                if *initial_token_supply != spec.total_supply {
                    return Err(SpecError::new(
                        path("behavior.initial_token_supply"),
                        "must equal total_supply",
                    ));
                }
                Some(RebaseState {
                    token_supply: *initial_token_supply,
                    share_supply: *initial_share_supply,
                })
            }
            _ => None,
        };
        let rate = match &rebase {
            Some(rb) => rb
                .rate()
                .map_err(|e| SpecError::new(path("behavior"), e.to_string()))?,
            None => Amount::one(),
        };

        let mut balances = BTreeMap::new();
        let mut sum_tokens = Amount::ZERO;
        let mut sum_raw = Amount::ZERO;
        for (account, amount) in holders {
            let hp = format!("tokens[{}].holders[{}]", spec.id, account);
            if balances.contains_key(account) {
                return Err(SpecError::new(hp, "duplicate holder"));
            }
            let raw = amount
                .checked_div(rate)
                .map_err(|e| SpecError::new(hp.clone(), e.to_string()))?;
            if raw.checked_mul(rate).ok() != Some(*amount) {
                return Err(SpecError::new(hp, "balance is not a multiple of the rebase rate"));
            }
            sum_tokens = sum_tokens
                .checked_add(*amount)
                .map_err(|e| SpecError::new(hp.clone(), e.to_string()))?;
            sum_raw = sum_raw
                .checked_add(raw)
                .map_err(|e| SpecError::new(hp, e.to_string()))?;
            balances.insert(account.clone(), raw);
        }
        if sum_tokens != spec.total_supply {
            return Err(SpecError::new(
                path("holders"),
                format!(
                    "holder balances sum to {sum_tokens}, expected total_supply {}",
                    spec.total_supply
                ),
            ));
        }

        let ledger = LedgerState {
            balances,
            burned: Amount::ZERO,
            minted: Amount::ZERO,
            rebase,
            initial_circulating: sum_raw,
        };
        self.tokens.insert(spec.id.clone(), Token { spec, ledger });
        Ok(())
    }

    /// Installs a pool. The pool account must already hold exactly the
    /// declared reserves of both tokens.
    pub fn add_pool(&mut self, pool: PoolState) -> Result<(), SpecError> {
        let path = |field: &str| format!("pools[{}].{}", pool.id, field);
        if self.pools.contains_key(&pool.id) {
            return Err(SpecError::new(path("id"), "duplicate pool id"));
        }
        if pool.token_x == pool.token_y {
            return Err(SpecError::new(path("token_y"), "pool tokens must differ"));
        }
        for (field, token) in [("token_x", &pool.token_x), ("token_y", &pool.token_y)] {
            if !self.tokens.contains_key(token) {
                return Err(SpecError::new(path(field), format!("unknown token {token}")));
            }
        }
        if pool.reserve_x.is_zero() || pool.reserve_y.is_zero() {
            return Err(SpecError::new(path("reserves"), "reserves must be positive"));
        }
        if pool.fee_den == 0 || pool.fee_num == 0 || pool.fee_num > pool.fee_den {
            return Err(SpecError::new(
                path("fee"),
                "fee must satisfy 0 < fee_num <= fee_den",
            ));
        }
        for (field, token, reserve) in [
            ("reserve_x", &pool.token_x, pool.reserve_x),
            ("reserve_y", &pool.token_y, pool.reserve_y),
        ] {
            let held = crate::ledger::balance_of(self, token, &pool.account)
                .map_err(|e| SpecError::new(path(field), e.to_string()))?;
            if held != reserve {
                return Err(SpecError::new(
                    path(field),
                    format!("pool account holds {held}, declared reserve is {reserve}"),
                ));
            }
        }
        self.pool_accounts.insert(pool.account.clone());
        self.pools.insert(pool.id.clone(), pool);
        Ok(())
    }
}
