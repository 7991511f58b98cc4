//! Deterministic synthetic corpus generation.
//!
//! Each target pairs the shared stable token `usdx` (priced $1) with a fresh
//! token exercising one archetype:
//!
//! - `anch`: reward-on-trade token paying a small minted reward per DEX
//!   trade above a minimum amount (drainable with repetition).
//! - `shadowfi`: public burn-from-anyone (pool drainable in one pass).
//! - `deflate`: sell-side deflation scaling the pool's balance down on every
//!   transfer into it (one pass with a sync).
//! - `rebase`: share-based token with a public maintenance hook minting the
//!   caller a share reward (drainable by repeating the hook).
//! - `benign`: plain token.
//! - `benign-fot`: inclusive fee-on-transfer, the classic Invariant-1 false
//!   positive — fees only ever come out of the payer's amount, never the
//!   pool's reserves.
//!
//! Parameters are sampled from archetype-valid ranges chosen so that every
//! vulnerable instance is exploitable within the default search budget
//! (repetition cap 256; minimal repetitions stay within the reference
//! oracle's bound of 64).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cpmmscan_core::oracle::Price;
use cpmmscan_core::{
    AccountId, Amount, BehaviorSpec, FeeMode, FeeSink, HookDef, HookEffect, SpecError, TokenId,
    TokenSpec,
};

use crate::corpus::{pool_account, AttackerDoc, CorpusFile, Label, PoolDoc, TokenDoc};

#[derive(Debug, Clone, Copy, Default)]
pub struct ArchetypeCounts {
    pub anch: usize,
    pub shadowfi: usize,
    pub deflate: usize,
    pub rebase: usize,
    pub benign: usize,
    pub benign_fot: usize,
}

impl ArchetypeCounts {
    pub fn total(&self) -> usize {
        self.anch + self.shadowfi + self.deflate + self.rebase + self.benign + self.benign_fot
    }
}

const ARCHETYPES: [&str; 6] = ["anch", "shadowfi", "deflate", "rebase", "benign", "benign-fot"];

pub fn generate_corpus(seed: u64, counts: &ArchetypeCounts) -> Result<CorpusFile, SpecError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attacker = AccountId::new("attacker");
    let stable = TokenId::new("usdx");

    let mut tokens = Vec::new();
    let mut pools = Vec::new();
    let mut labels = BTreeMap::new();
    let mut stable_holders: BTreeMap<AccountId, Amount> = BTreeMap::new();
    let mut stable_total = Amount::ZERO;
    let mut max_reserve_x = Amount::ZERO;

    for archetype in ARCHETYPES {
        let count = match archetype {
            "anch" => counts.anch,
            "shadowfi" => counts.shadowfi,
            "deflate" => counts.deflate,
            "rebase" => counts.rebase,
            "benign" => counts.benign,
            "benign-fot" => counts.benign_fot,
            _ => unreachable!(),
        };
        for index in 0..count {
            let reserve_x_whole: u128 = rng.gen_range(50_000..150_000);
            let ratio: u128 = rng.gen_range(2..10);
            let reserve_y_whole = reserve_x_whole * ratio;
            let deployer_y_whole = reserve_y_whole / 2;
            let total_y_whole = reserve_y_whole + deployer_y_whole;

            let (behavior, hooks, expected_invariant) = match archetype {
                "anch" => (
                    BehaviorSpec::RewardOnDexTrade {
                        reward_num: rng.gen_range(4..=8),
                        reward_den: 10_000,
                        // Well below the smallest budget's swap output so the
                        // reward path is reachable at every budget.
                        min_amount: Amount::from_whole(reserve_y_whole / 1000, 18),
                    },
                    vec![],
                    Some(2u8),
                ),
                "shadowfi" => (
                    BehaviorSpec::PublicBurn {
                        anyone_can_burn_from: true,
                    },
                    vec![],
                    Some(1),
                ),
                "deflate" => (
                    BehaviorSpec::SellSideDeflation {
                        burn_num: rng.gen_range(1..=2),
                        burn_den: 10,
                    },
                    vec![],
                    Some(1),
                ),
                "rebase" => {
                    // Rates divide 10^18, keeping every whole-token balance an
                    // exact number of shares.
                    let rate: u128 = *[2u128, 4, 5].get(rng.gen_range(0..3)).unwrap();
                    let total_supply = Amount::from_whole(total_y_whole, 18);
                    (
                        BehaviorSpec::ShareRebase {
                            initial_token_supply: total_supply,
                            initial_share_supply: total_supply
                                .checked_div(Amount::from(rate as u64))
                                .unwrap(),
                            maintain_reward: Amount::from_whole(reserve_y_whole / 10_000, 18)
                                .checked_div(Amount::from(rate as u64))
                                .unwrap(),
                            min_caller_share: Amount::from(1000u64),
                            scale_num: 9,
                            scale_den: 10,
                        },
                        vec![HookDef {
                            name: "maintain".into(),
                            effect: HookEffect::RebaseMaintenance,
                        }],
                        Some(2),
                    )
                }
                "benign" => (BehaviorSpec::Standard, vec![], None),
                "benign-fot" => (
                    BehaviorSpec::FeeOnTransfer {
                        rate_bps: rng.gen_range(50..=500),
                        // Inclusive only: fees always come out of the moved
                        // amount. A fee charged on top would be paid from the
                        // pool's reserve on outbound transfers, which is a
                        // real leak, not a benign token.
                        mode: FeeMode::Inclusive,
                        sink: if rng.gen_bool(0.5) {
                            FeeSink::Burn
                        } else {
                            FeeSink::Account(AccountId::new("fee-sink"))
                        },
                    },
                    vec![],
                    None,
                ),
                _ => unreachable!(),
            };

            let token_id = TokenId::new(format!("{archetype}{index}"));
            let pool_id = cpmmscan_core::PoolId::new(format!("pool-{archetype}{index}"));
            let reserve_x = Amount::from_whole(reserve_x_whole, 18);
            let reserve_y = Amount::from_whole(reserve_y_whole, 18);

            let mut holders = BTreeMap::new();
            holders.insert(pool_account(&pool_id), reserve_y);
            holders.insert(AccountId::new("deployer"), Amount::from_whole(deployer_y_whole, 18));
            tokens.push(TokenDoc {
                spec: TokenSpec {
                    id: token_id.clone(),
                    decimals: 18,
                    total_supply: Amount::from_whole(total_y_whole, 18),
                    behavior,
                    hooks,
                },
                holders,
            });

            stable_holders.insert(pool_account(&pool_id), reserve_x);
            stable_total = stable_total.checked_add(reserve_x).map_err(sp)?;
            max_reserve_x = max_reserve_x.max(reserve_x);

            pools.push(PoolDoc {
                id: pool_id.clone(),
                token_x: stable.clone(),
                token_y: token_id,
                reserve_x,
                reserve_y,
                fee_num: 997,
                fee_den: 1000,
            });
            labels.insert(
                pool_id.to_string(),
                Label {
                    vulnerable: expected_invariant.is_some(),
                    archetype: archetype.to_string(),
                    expected_invariant,
                },
            );
        }
    }

    // Cover the largest budget fraction (2× reserve) with headroom.
    let endowment = max_reserve_x
        .checked_mul(Amount::from(3u64))
        .map_err(sp)?;
    stable_total = stable_total.checked_add(endowment).map_err(sp)?;
    tokens.insert(
        0,
        TokenDoc {
            spec: TokenSpec {
                id: stable.clone(),
                decimals: 18,
                total_supply: stable_total,
                behavior: BehaviorSpec::Standard,
                hooks: vec![],
            },
            holders: stable_holders,
        },
    );

    let mut endowments = BTreeMap::new();
    if !endowment.is_zero() {
        endowments.insert(stable.clone(), endowment);
    }
    let mut prices = BTreeMap::new();
    prices.insert(
        stable,
        Price {
            num: Amount::from(1u64),
            den: Amount::from(1u64),
        },
    );

    let corpus = CorpusFile {
        attacker: AttackerDoc {
            id: attacker,
            endowments,
        },
        tokens,
        pools,
        prices,
        labels,
    };
    // Fail generation, not scanning, if any parameter combination is invalid.
    corpus.build_world()?;
    Ok(corpus)
}

fn sp(e: cpmmscan_core::Revert) -> SpecError {
    SpecError::new("corpusgen", e.to_string())
}
