//! Corpus files: one JSON document carrying tokens, pools, prices and the
//! attacker endowment, so a scan is reproducible from a single artifact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cpmmscan_core::oracle::Price;
use cpmmscan_core::{
    AccountId, Amount, PoolId, PriceTable, ScanTarget, SpecError, TokenId, TokenSpec, WorldState,
};
use num_rational::BigRational;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackerDoc {
    pub id: AccountId,
    #[serde(default)]
    pub endowments: BTreeMap<TokenId, Amount>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenDoc {
    #[serde(flatten)]
    pub spec: TokenSpec,
    /// Initial balances, excluding the attacker (whose endowment lives on
    /// the attacker object). Together they must sum to total_supply.
    #[serde(default)]
    pub holders: BTreeMap<AccountId, Amount>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolDoc {
    pub id: PoolId,
    pub token_x: TokenId,
    pub token_y: TokenId,
    pub reserve_x: Amount,
    pub reserve_y: Amount,
    pub fee_num: u64,
    pub fee_den: u64,
}

/// Ground-truth annotation for generated corpora.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Label {
    pub vulnerable: bool,
    pub archetype: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_invariant: Option<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusFile {
    pub attacker: AttackerDoc,
    pub tokens: Vec<TokenDoc>,
    pub pools: Vec<PoolDoc>,
    #[serde(default)]
    pub prices: BTreeMap<TokenId, Price>,
    /// Pool id → ground truth; absent for hand-written corpora.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, Label>,
}

pub fn pool_account(id: &PoolId) -> AccountId {
    AccountId::new(format!("pool:{id}"))
}

impl CorpusFile {
    /// Builds the combined world containing every token and pool.
    pub fn build_world(&self) -> Result<WorldState, SpecError> {
        let mut world = WorldState::new(self.attacker.id.clone());
        // Pool accounts must be known before token installation so that
        // behavior checks (deflation, rewards) see them; registration
        // happens in add_pool, so pre-register here.
        for pool in &self.pools {
            world.pool_accounts.insert(pool_account(&pool.id));
        }
        for token in &self.tokens {
            let mut holders = token.holders.clone();
            if let Some(endowment) = self.attacker.endowments.get(&token.spec.id) {
                if holders.contains_key(&self.attacker.id) {
                    return Err(SpecError::new(
                        format!("tokens[{}].holders[{}]", token.spec.id, self.attacker.id),
                        "attacker balance belongs in attacker.endowments",
                    ));
                }
                if !endowment.is_zero() {
                    holders.insert(self.attacker.id.clone(), *endowment);
                }
            }
            world.add_token(token.spec.clone(), &holders)?;
        }
        for pool in &self.pools {
            world.add_pool(cpmmscan_core::PoolState {
                id: pool.id.clone(),
                token_x: pool.token_x.clone(),
                token_y: pool.token_y.clone(),
                reserve_x: pool.reserve_x,
                reserve_y: pool.reserve_y,
                fee_num: pool.fee_num,
                fee_den: pool.fee_den,
                account: pool_account(&pool.id),
            })?;
        }
        for token_id in self.prices.keys() {
            if !world.tokens.contains_key(token_id) {
                return Err(SpecError::new(
                    format!("prices[{token_id}]"),
                    "price for unknown token",
                ));
            }
        }
        Ok(world)
    }

    /// One scan target per pool, each on a pruned private world copy.
    pub fn targets(&self) -> Result<Vec<ScanTarget>, SpecError> {
        let world = self.build_world()?;
        let mut targets = Vec::new();
        for pool in &self.pools {
            if let Some(endowment) = self.attacker.endowments.get(&pool.token_y) {
                if !endowment.is_zero() {
                    return Err(SpecError::new(
                        format!("attacker.endowments[{}]", pool.token_y),
                        "attacker must start with zero of the target token",
                    ));
                }
            }
            let mut target_world = world.clone();
            target_world
                .tokens
                .retain(|id, _| *id == pool.token_x || *id == pool.token_y);
            target_world.pools.retain(|id, _| *id == pool.id);
            let mut prices = PriceTable::default();
            for token_id in [&pool.token_x, &pool.token_y] {
                if let Some(price) = self.prices.get(token_id) {
                    prices.prices.insert(token_id.clone(), *price);
                }
            }
            targets.push(ScanTarget {
                id: pool.id.to_string(),
                world: target_world,
                pool: pool.id.clone(),
                token_y: pool.token_y.clone(),
                prices,
            });
        }
        Ok(targets)
    }
}

pub fn parse_corpus(text: &str) -> Result<CorpusFile, SpecError> {
    let corpus: CorpusFile = serde_json::from_str(text)
        .map_err(|e| SpecError::new("$", format!("malformed corpus: {e}")))?;
    let mut seen_pools = std::collections::BTreeSet::new();
    for pool in &corpus.pools {
        if !seen_pools.insert(pool.id.clone()) {
            return Err(SpecError::new(
                format!("pools[{}].id", pool.id),
                "duplicate pool id",
            ));
        }
    }
    Ok(corpus)
}

pub fn load_corpus(path: &Path) -> Result<Vec<ScanTarget>, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError::new(path.display().to_string(), e.to_string()))?;
    let corpus = parse_corpus(&text)?;
    corpus.targets()
}

/// Keeps targets whose X token is a plain priced token backing more than
/// `min_usd` of reserve value.
pub fn filter_targets(targets: Vec<ScanTarget>, min_usd: &BigRational) -> Vec<ScanTarget> {
    targets
        .into_iter()
        .filter(|target| {
            let Ok(pool) = target.world.pool(&target.pool) else {
                return false;
            };
            let Ok(token_x) = target.world.token(&pool.token_x) else {
                return false;
            };
            if !matches!(token_x.spec.behavior, cpmmscan_core::BehaviorSpec::Standard) {
                return false;
            }
            match target
                .prices
                .usd_value(&pool.token_x, token_x.spec.decimals, pool.reserve_x)
            {
                Some(value) => value > *min_usd,
                None => false,
            }
        })
        .collect()
}
