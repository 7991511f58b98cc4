//! Exploit synthesis: template enumeration, the shallow invariant pass, and
//! the deep repetition search.
//!
//! Every candidate transaction has the same shape: a swap of the priced
//! token X into the pool, a template body that pushes on the target token Y,
//! and a swap of all recovered Y back out. The shallow pass runs each
//! template once per budget and keeps the ones whose body drains the pool or
//! enriches the attacker (the two invariants). The deep pass re-runs those
//! candidates with a doubling repetition count, dismissing candidates whose
//! outcome stops improving, and on the first profitable hit backtracks to
//! the smallest repetition count that is still profitable.

use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::Revert;
use crate::exec::{execute_tx, Call, ExecCtx, SymbolicArg, TraceEntry, TxResult};
use crate::ids::{AccountId, PoolId, TokenId};
use crate::ledger::TokenSpec;
use crate::oracle::{
    check_invariant1, check_invariant2, evaluate_profit, PriceTable, UsdValue, Verdict,
};
use crate::pool::PoolState;
use crate::world::WorldState;

/// One pool to scan: a world, the pool under test, the behavior-rich token,
/// and the price table used for profit accounting.
#[derive(Debug, Clone)]
pub struct ScanTarget {
    pub id: String,
    pub world: WorldState,
    pub pool: PoolId,
    pub token_y: TokenId,
    pub prices: PriceTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Hard ceiling on body repetitions in the deep search.
    pub rep_cap: u32,
    /// Reduced ceiling applied once a candidate's outcome starts declining.
    pub limited_rep_cap: u32,
    /// Consecutive unchanged outcomes before a candidate is dismissed.
    pub stagnation_limit: u32,
    /// Swap-in budgets as fractions of the pool's X reserve.
    pub budget_fractions: Vec<(u64, u64)>,
    /// Minimum profit, USD, as a rational (num, den). Profit must be strictly
    /// greater.
    pub profit_threshold_usd: (u64, u64),
    /// Skip the deep search entirely (single-pass ablation).
    pub no_repeat: bool,
    /// Replace the invariant gate with random repetition sampling (ablation).
    pub no_invariant_gate: bool,
    /// Run against a fee-less copy of the pool (ablation).
    pub no_dex_fee: bool,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            rep_cap: 256,
            limited_rep_cap: 8,
            stagnation_limit: 3,
            budget_fractions: vec![(1, 100), (1, 10), (1, 1), (2, 1)],
            profit_threshold_usd: (1, 1),
            no_repeat: false,
            no_invariant_gate: false,
            no_dex_fee: false,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn threshold(&self) -> BigRational {
        BigRational::new(
            self.profit_threshold_usd.0.into(),
            self.profit_threshold_usd.1.into(),
        )
    }
}

/// Doubling repetition schedule: 1, 2, 4, ... capped at `cap` (inclusive).
pub fn rep_schedule(cap: u32) -> Vec<u32> {
    let mut schedule = Vec::new();
    let mut r = 1u32;
    while r < cap {
        schedule.push(r);
        r = r.saturating_mul(2);
    }
    schedule.push(cap.max(1));
    schedule
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub repeatable: bool,
    pub calls: Vec<Call>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub id: String,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploitReport {
    pub target_id: String,
    pub pool: PoolId,
    pub token_y: TokenId,
    pub template_id: String,
    pub budget: Amount,
    pub reps: u32,
    pub invariant1_broken: bool,
    pub invariant2_broken: bool,
    pub profit_token: TokenId,
    pub profit_amount: Amount,
    pub profit_usd: UsdValue,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanVerdict {
    Profitable(Box<ExploitReport>),
    NotVulnerable {
        /// True when the shallow pass found no invariant-breaking candidate
        /// and the deep search never ran.
        early_terminated: bool,
    },
    Timeout,
}

/// Search exceeded its wall-clock deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimedOut;

type SearchResult<T> = Result<T, TimedOut>;

/// Enumerates base templates for a target. Four cross-trading bodies, each
/// with three amount arguments and with/without a trailing sync; plus two
/// burn bodies (two arguments each are folded into distinct templates) when
/// the token exposes a public burn.
pub fn enumerate_templates(
    world: &WorldState,
    pool: &PoolState,
    token_y: &TokenId,
) -> Result<Vec<Template>, Revert> {
    let attacker = world.attacker.clone();
    let pa = pool.account.clone();
    let y = token_y.clone();
    let transfer = |to: &AccountId, amount: SymbolicArg| Call::Transfer {
        token: y.clone(),
        to: to.clone(),
        amount,
    };
    let skim = |to: &AccountId| Call::Skim {
        pool: pool.id.clone(),
        to: to.clone(),
    };
    let sync_seg = Segment {
        repeatable: false,
        calls: vec![Call::Sync {
            pool: pool.id.clone(),
        }],
    };

    let mut templates = Vec::new();
    let amount_args: [(&str, SymbolicArg); 3] = [
        ("self", SymbolicArg::BalanceOfSelf { token: y.clone() }),
        ("pair", SymbolicArg::BalanceOfPair { token: y.clone() }),
        ("zero", SymbolicArg::constant(Amount::ZERO)),
    ];
    for (arg_name, arg) in &amount_args {
        let bodies: [(&str, Vec<Segment>); 4] = [
            (
                "cross1",
                vec![Segment {
                    repeatable: true,
                    calls: vec![transfer(&attacker, arg.clone())],
                }],
            ),
            (
                "cross2",
                vec![Segment {
                    repeatable: true,
                    calls: vec![transfer(&pa, arg.clone()), skim(&attacker)],
                }],
            ),
            (
                "cross3",
                vec![
                    Segment {
                        repeatable: false,
                        calls: vec![transfer(&pa, arg.clone())],
                    },
                    Segment {
                        repeatable: true,
                        calls: vec![skim(&pa)],
                    },
                    Segment {
                        repeatable: false,
                        calls: vec![skim(&attacker)],
                    },
                ],
            ),
            (
                "cross4",
                vec![
                    Segment {
                        repeatable: false,
                        calls: vec![transfer(&pa, arg.clone())],
                    },
                    Segment {
                        repeatable: true,
                        calls: vec![skim(&pa)],
                    },
                ],
            ),
        ];
        for (base, segments) in bodies {
            templates.push(Template {
                id: format!("{base}[{arg_name}]"),
                segments: segments.clone(),
            });
            let mut with_sync = segments;
            with_sync.push(sync_seg.clone());
            templates.push(Template {
                id: format!("{base}[{arg_name}]+sync"),
                segments: with_sync,
            });
        }
    }

    if world.token(token_y)?.spec.has_public_burn() {
        let burn_args: [(&str, SymbolicArg); 2] = [
            ("pair-1", SymbolicArg::PairBalanceMinusOne { token: y.clone() }),
            ("supply", SymbolicArg::BurnSupplyFormula { token: y.clone() }),
        ];
        for (arg_name, arg) in burn_args {
            templates.push(Template {
                id: format!("burn-self[{arg_name}]"),
                segments: vec![Segment {
                    repeatable: true,
                    calls: vec![Call::Burn {
                        token: y.clone(),
                        from: attacker.clone(),
                        amount: arg.clone(),
                    }],
                }],
            });
            templates.push(Template {
                id: format!("burn-pool[{arg_name}]+sync"),
                segments: vec![
                    Segment {
                        repeatable: true,
                        calls: vec![Call::Burn {
                            token: y.clone(),
                            from: pa.clone(),
                            amount: arg,
                        }],
                    },
                    sync_seg.clone(),
                ],
            });
        }
    }
    Ok(templates)
}

/// Expands a template with one extra state-changing call: tiny transfers to
/// self or to the pool, or any declared token hook; inserted either into the
/// repeating segment (and repeated with it) or appended once after the body.
pub fn expand_with_state_changing(
    template: &Template,
    y_spec: &TokenSpec,
    pool_account: &AccountId,
    attacker: &AccountId,
) -> Vec<Template> {
    let y = y_spec.id.clone();
    let mut extras: Vec<(String, Call)> = Vec::new();
    for (dest_name, dest) in [("self", attacker), ("pool", pool_account)] {
        for amount in 0u64..=1 {
            extras.push((
                format!("t{amount}-{dest_name}"),
                Call::Transfer {
                    token: y.clone(),
                    to: dest.clone(),
                    amount: SymbolicArg::constant(Amount::from(amount)),
                },
            ));
        }
    }
    for hook in &y_spec.hooks {
        extras.push((
            format!("hook-{}", hook.name),
            Call::Hook {
                token: y.clone(),
                name: hook.name.clone(),
            },
        ));
    }

    let mut out = Vec::new();
    for (name, call) in &extras {
        if let Some(last_rep) = template.segments.iter().rposition(|s| s.repeatable) {
            let mut t = template.clone();
            t.segments[last_rep].calls.push(call.clone());
            t.id = format!("{}+{}@rep", template.id, name);
            out.push(t);
        }
        let mut t = template.clone();
        t.segments.push(Segment {
            repeatable: false,
            calls: vec![call.clone()],
        });
        t.id = format!("{}+{}@tail", template.id, name);
        out.push(t);
    }
    out
}

fn build_calls(
    template: &Template,
    pool: &PoolState,
    token_y: &TokenId,
    attacker: &AccountId,
    budget: Amount,
    reps: u32,
) -> Vec<Call> {
    let mut calls = vec![Call::SwapExactIn {
        pool: pool.id.clone(),
        input_token: pool.token_x.clone(),
        amount: SymbolicArg::constant(budget),
        to: attacker.clone(),
    }];
    for segment in &template.segments {
        let n = if segment.repeatable { reps } else { 1 };
        for _ in 0..n {
            calls.extend(segment.calls.iter().cloned());
        }
    }
    calls.push(Call::SwapExactIn {
        pool: pool.id.clone(),
        input_token: token_y.clone(),
        amount: SymbolicArg::FeeAdjusted {
            token: token_y.clone(),
            inner: Box::new(SymbolicArg::BalanceOfSelf {
                token: token_y.clone(),
            }),
        },
        to: attacker.clone(),
    });
    calls
}

struct Eval {
    reverted: bool,
    verdict: Verdict,
    /// Attacker's final X balance; the deep search's progress metric.
    final_x: Amount,
    tx: TxResult,
}

struct Runner<'a> {
    target: &'a ScanTarget,
    /// Initial world for every execution (fee stripped under no_dex_fee).
    world: WorldState,
    pool: PoolState,
    ctx: ExecCtx,
    threshold: BigRational,
    deadline: Option<Instant>,
}

impl<'a> Runner<'a> {
    fn new(
        target: &'a ScanTarget,
        config: &SearchConfig,
        deadline: Option<Instant>,
    ) -> Result<Runner<'a>, Revert> {
        let mut world = target.world.clone();
        if config.no_dex_fee {
            let p = world.pool_mut(&target.pool)?;
            p.fee_num = 1;
            p.fee_den = 1;
        }
        let pool = world.pool(&target.pool)?.clone();
        let ctx = ExecCtx {
            attacker: world.attacker.clone(),
            pool: target.pool.clone(),
        };
        Ok(Runner {
            target,
            world,
            pool,
            ctx,
            threshold: config.threshold(),
            deadline,
        })
    }

    fn budgets(&self, config: &SearchConfig) -> Vec<Amount> {
        let mut budgets = Vec::new();
        for (num, den) in &config.budget_fractions {
            if *den == 0 {
                continue;
            }
            if let Ok(b) = self.pool.reserve_x.mul_div(Amount::from(*num), Amount::from(*den)) {
                if !b.is_zero() && !budgets.contains(&b) {
                    budgets.push(b);
                }
            }
        }
        budgets
    }

    fn execute(&self, template: &Template, budget: Amount, reps: u32) -> SearchResult<Eval> {
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return Err(TimedOut);
            }
        }
        let calls = build_calls(
            template,
            &self.pool,
            &self.target.token_y,
            &self.ctx.attacker,
            budget,
            reps,
        );
        let tx = execute_tx(&self.world, &calls, &self.ctx);
        if tx.reverted {
            return Ok(Eval {
                reverted: true,
                verdict: Verdict::unprofitable(),
                final_x: Amount::ZERO,
                tx,
            });
        }
        let mut verdict = evaluate_profit(&self.world, &tx.final_state, &self.target.prices, &self.threshold)
            .unwrap_or_else(|_| Verdict::unprofitable());
        if let Some((before, after)) = &tx.boundary {
            verdict.invariant1_broken =
                check_invariant1(before, after, &self.pool.account, &self.target.token_y)
                    .unwrap_or(false);
            verdict.invariant2_broken =
                check_invariant2(before, after, &self.ctx.attacker, &self.target.token_y)
                    .unwrap_or(false);
        }
        let final_x =
            crate::ledger::balance_of(&tx.final_state, &self.pool.token_x, &self.ctx.attacker)
                .unwrap_or(Amount::ZERO);
        Ok(Eval {
            reverted: false,
            verdict,
            final_x,
            tx,
        })
    }

    fn report(&self, template: &Template, budget: Amount, reps: u32, eval: Eval) -> ExploitReport {
        ExploitReport {
            target_id: self.target.id.clone(),
            pool: self.target.pool.clone(),
            token_y: self.target.token_y.clone(),
            template_id: template.id.clone(),
            budget,
            reps,
            invariant1_broken: eval.verdict.invariant1_broken,
            invariant2_broken: eval.verdict.invariant2_broken,
            profit_token: eval.verdict.profit_token.unwrap_or_else(|| self.pool.token_x.clone()),
            profit_amount: eval.verdict.profit_amount,
            profit_usd: eval
                .verdict
                .profit_usd
                .unwrap_or_else(|| UsdValue(BigRational::from_integer(0.into()))),
            trace: eval.tx.trace.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub template: Template,
    pub budget: Amount,
    pub invariant1: bool,
    pub invariant2: bool,
    metric: Amount,
    cap: u32,
    stagnation: u32,
    alive: bool,
}

pub enum ShallowOutcome {
    Profitable(Box<ExploitReport>),
    Candidates(Vec<Candidate>),
    Clean,
}

/// Runs only the shallow phase and returns its raw outcome, for tests and
/// diagnostics that need to inspect the candidate classification.
pub fn shallow_pass(
    target: &ScanTarget,
    config: &SearchConfig,
    deadline: Option<Instant>,
) -> Result<ShallowOutcome, TimedOut> {
    let runner = Runner::new(target, config, deadline).map_err(|_| TimedOut)?;
    let base = enumerate_templates(&runner.world, &runner.pool, &target.token_y)
        .map_err(|_| TimedOut)?;
    let y_spec = runner.world.token(&target.token_y).unwrap().spec.clone();
    let expanded: Vec<Template> = base
        .iter()
        .flat_map(|t| expand_with_state_changing(t, &y_spec, &runner.pool.account, &runner.ctx.attacker))
        .collect();
    shallow_search(&runner, &base, &expanded, config)
}

fn shallow_search(
    runner: &Runner,
    base: &[Template],
    expanded: &[Template],
    config: &SearchConfig,
) -> SearchResult<ShallowOutcome> {
    let budgets = runner.budgets(config);
    let mut candidates = Vec::new();
    // Base templates first; expansions only add state-changing noise and are
    // only worth paying for if the plain bodies found nothing.
    for phase in [base, expanded] {
        for budget in &budgets {
            for template in phase {
                let eval = runner.execute(template, *budget, 1)?;
                if eval.reverted {
                    continue;
                }
                if eval.verdict.profitable {
                    return Ok(ShallowOutcome::Profitable(Box::new(
                        runner.report(template, *budget, 1, eval),
                    )));
                }
                if eval.verdict.invariant1_broken || eval.verdict.invariant2_broken {
                    candidates.push(Candidate {
                        template: template.clone(),
                        budget: *budget,
                        invariant1: eval.verdict.invariant1_broken,
                        invariant2: eval.verdict.invariant2_broken,
                        metric: eval.final_x,
                        cap: config.rep_cap,
                        stagnation: 0,
                        alive: true,
                    });
                }
            }
        }
    }
    if candidates.is_empty() {
        Ok(ShallowOutcome::Clean)
    } else {
        Ok(ShallowOutcome::Candidates(candidates))
    }
}

fn deep_search(
    runner: &Runner,
    candidates: &mut [Candidate],
    config: &SearchConfig,
) -> SearchResult<Option<ExploitReport>> {
    let schedule = rep_schedule(config.rep_cap);
    let mut prev_r = 1u32;
    for &r in schedule.iter().skip(1) {
        for index in 0..candidates.len() {
            let (alive, cap) = (candidates[index].alive, candidates[index].cap);
            if !alive || r > cap {
                continue;
            }
            let candidate = &candidates[index];
            let eval = runner.execute(&candidate.template, candidate.budget, r)?;
            if eval.reverted {
                candidates[index].alive = false;
                continue;
            }
            if eval.verdict.profitable {
                // Backtrack: the previous schedule point was unprofitable for
                // everyone, so the true minimum lies in (prev_r, r]. Scan it
                // linearly across all still-live candidates.
                for r_fine in (prev_r + 1)..r {
                    for j in 0..candidates.len() {
                        let cj = &candidates[j];
                        if !cj.alive || r_fine > cj.cap {
                            continue;
                        }
                        let fine = runner.execute(&cj.template, cj.budget, r_fine)?;
                        if !fine.reverted && fine.verdict.profitable {
                            let report = runner.report(&cj.template, cj.budget, r_fine, fine);
                            return Ok(Some(report));
                        }
                    }
                }
                let report = runner.report(&candidates[index].template, candidates[index].budget, r, eval);
                return Ok(Some(report));
            }
            let candidate = &mut candidates[index];
            if eval.final_x == candidate.metric {
                candidate.stagnation += 1;
                if candidate.stagnation >= config.stagnation_limit {
                    candidate.alive = false;
                }
            } else if eval.final_x < candidate.metric {
                candidate.cap = candidate.cap.min(config.limited_rep_cap);
                candidate.metric = eval.final_x;
            } else {
                candidate.stagnation = 0;
                candidate.metric = eval.final_x;
            }
        }
        prev_r = r;
    }
    Ok(None)
}

fn random_rep_search(
    runner: &Runner,
    base: &[Template],
    expanded: &[Template],
    config: &SearchConfig,
) -> SearchResult<ScanVerdict> {
    let mut seed = config.seed;
    for b in runner.target.id.bytes() {
        seed = seed.wrapping_mul(31).wrapping_add(b as u64);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budgets = runner.budgets(config);
    let samples = rep_schedule(config.rep_cap).len();
    for phase in [base, expanded] {
        for budget in &budgets {
            for template in phase {
                for _ in 0..samples {
                    let r = rng.gen_range(1..=config.rep_cap);
                    let eval = runner.execute(template, *budget, r)?;
                    if !eval.reverted && eval.verdict.profitable {
                        return Ok(ScanVerdict::Profitable(Box::new(
                            runner.report(template, *budget, r, eval),
                        )));
                    }
                }
            }
        }
    }
    Ok(ScanVerdict::NotVulnerable {
        early_terminated: false,
    })
}

/// Full scan of one target: shallow pass, then (unless ablated) the deep
/// repetition search over invariant-breaking candidates.
pub fn run_pipeline(
    target: &ScanTarget,
    config: &SearchConfig,
    deadline: Option<Instant>,
) -> ScanVerdict {
    let runner = match Runner::new(target, config, deadline) {
        Ok(r) => r,
        Err(_) => {
            return ScanVerdict::NotVulnerable {
                early_terminated: true,
            }
        }
    };
    let base = match enumerate_templates(&runner.world, &runner.pool, &target.token_y) {
        Ok(t) => t,
        Err(_) => {
            return ScanVerdict::NotVulnerable {
                early_terminated: true,
            }
        }
    };
    let y_spec = runner.world.token(&target.token_y).unwrap().spec.clone();
    let expanded: Vec<Template> = base
        .iter()
        .flat_map(|t| expand_with_state_changing(t, &y_spec, &runner.pool.account, &runner.ctx.attacker))
        .collect();

    if config.no_invariant_gate {
        return match random_rep_search(&runner, &base, &expanded, config) {
            Ok(v) => v,
            Err(TimedOut) => ScanVerdict::Timeout,
        };
    }

    match shallow_search(&runner, &base, &expanded, config) {
        Err(TimedOut) => ScanVerdict::Timeout,
        Ok(ShallowOutcome::Profitable(report)) => ScanVerdict::Profitable(report),
        Ok(ShallowOutcome::Clean) => ScanVerdict::NotVulnerable {
            early_terminated: true,
        },
        Ok(ShallowOutcome::Candidates(mut candidates)) => {
            if config.no_repeat {
                return ScanVerdict::NotVulnerable {
                    early_terminated: false,
                };
            }
            match deep_search(&runner, &mut candidates, config) {
                Err(TimedOut) => ScanVerdict::Timeout,
                Ok(Some(report)) => ScanVerdict::Profitable(Box::new(report)),
                Ok(None) => ScanVerdict::NotVulnerable {
                    early_terminated: false,
                },
            }
        }
    }
}

/// Exhaustive reference search: every template, every budget, every
/// repetition count from 1 to `rep_bound`, in repetition-major order, so the
/// first hit has the globally minimal repetition count.
pub fn brute_force_oracle(
    target: &ScanTarget,
    config: &SearchConfig,
    rep_bound: u32,
    deadline: Option<Instant>,
) -> SearchResult<Option<ExploitReport>> {
    let runner = match Runner::new(target, config, deadline) {
        Ok(r) => r,
        Err(_) => return Ok(None),
    };
    let base = match enumerate_templates(&runner.world, &runner.pool, &target.token_y) {
        Ok(t) => t,
        Err(_) => return Ok(None),
    };
    let y_spec = runner.world.token(&target.token_y).unwrap().spec.clone();
    let expanded: Vec<Template> = base
        .iter()
        .flat_map(|t| expand_with_state_changing(t, &y_spec, &runner.pool.account, &runner.ctx.attacker))
        .collect();
    let budgets = runner.budgets(config);
    for r in 1..=rep_bound {
        for budget in &budgets {
            for template in base.iter().chain(expanded.iter()) {
                let eval = runner.execute(template, *budget, r)?;
                if !eval.reverted && eval.verdict.profitable {
                    return Ok(Some(runner.report(template, *budget, r, eval)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::ledger::BehaviorSpec;
    use crate::oracle::Price;

    fn acct(s: &str) -> AccountId {
        AccountId::new(s)
    }

    /// World with token x (standard, priced $1) and token y with the given
    /// behavior, pooled at the given whole-token reserves. The attacker
    /// holds `attacker_x` of x and nothing else.
    pub fn target_with_y(
        behavior: BehaviorSpec,
        reserve_x: u128,
        reserve_y: u128,
        attacker_x: u128,
        extra_y_holder: Option<(&str, u128)>,
    ) -> ScanTarget {
        let mut world = WorldState::new(acct("attacker"));
        let mut x_holders = BTreeMap::new();
        x_holders.insert(acct("pool-acct"), Amount::from_whole(reserve_x, 18));
        x_holders.insert(acct("attacker"), Amount::from_whole(attacker_x, 18));
        world
            .add_token(
                TokenSpec {
                    id: TokenId::new("x"),
                    decimals: 18,
                    total_supply: Amount::from_whole(reserve_x + attacker_x, 18),
                    behavior: BehaviorSpec::Standard,
                    hooks: vec![],
                },
                &x_holders,
            )
            .unwrap();
        let mut y_holders = BTreeMap::new();
        y_holders.insert(acct("pool-acct"), Amount::from_whole(reserve_y, 18));
        let mut y_total = reserve_y;
        if let Some((holder, amount)) = extra_y_holder {
            y_holders.insert(acct(holder), Amount::from_whole(amount, 18));
            y_total += amount;
        }
        world
            .add_token(
                TokenSpec {
                    id: TokenId::new("y"),
                    decimals: 18,
                    total_supply: Amount::from_whole(y_total, 18),
                    behavior,
                    hooks: vec![],
                },
                &y_holders,
            )
            .unwrap();
        world
            .add_pool(PoolState {
                id: PoolId::new("p"),
                token_x: TokenId::new("x"),
                token_y: TokenId::new("y"),
                reserve_x: Amount::from_whole(reserve_x, 18),
                reserve_y: Amount::from_whole(reserve_y, 18),
                fee_num: 997,
                fee_den: 1000,
                account: acct("pool-acct"),
            })
            .unwrap();
        let mut prices = BTreeMap::new();
        prices.insert(
            TokenId::new("x"),
            Price {
                num: Amount::from(1u64),
                den: Amount::from(1u64),
            },
        );
        ScanTarget {
            id: "t".into(),
            world,
            pool: PoolId::new("p"),
            token_y: TokenId::new("y"),
            prices: PriceTable { prices },
        }
    }

    #[test]
    fn template_counts() {
        let target = target_with_y(BehaviorSpec::Standard, 1000, 1000, 100, None);
        let pool = target.world.pool(&target.pool).unwrap().clone();
        let base = enumerate_templates(&target.world, &pool, &target.token_y).unwrap();
        // 4 bodies × 3 amount args × {plain, +sync} = 24.
        assert_eq!(base.len(), 24);

        let burnable = target_with_y(
            BehaviorSpec::PublicBurn {
                anyone_can_burn_from: true,
            },
            1000,
            1000,
            100,
            None,
        );
        let pool = burnable.world.pool(&burnable.pool).unwrap().clone();
        let with_burn = enumerate_templates(&burnable.world, &pool, &burnable.token_y).unwrap();
        // + 2 burn bodies × 2 burn args.
        assert_eq!(with_burn.len(), 28);
    }

    #[test]
    fn expansion_counts() {
        let target = target_with_y(BehaviorSpec::Standard, 1000, 1000, 100, None);
        let pool = target.world.pool(&target.pool).unwrap().clone();
        let base = enumerate_templates(&target.world, &pool, &target.token_y).unwrap();
        let y_spec = target.world.token(&target.token_y).unwrap().spec.clone();
        let expanded = expand_with_state_changing(
            &base[0],
            &y_spec,
            &pool.account,
            &target.world.attacker,
        );
        // 4 tiny transfers (no hooks) × 2 insertion positions.
        assert_eq!(expanded.len(), 8);
        let ids: Vec<&str> = expanded.iter().map(|t| t.id.as_str()).collect();
        assert!(ids.iter().any(|i| i.ends_with("@rep")));
        assert!(ids.iter().any(|i| i.ends_with("@tail")));
    }

    #[test]
    fn benign_pool_terminates_early() {
        let target = target_with_y(BehaviorSpec::Standard, 1000, 1000, 100, None);
        let verdict = run_pipeline(&target, &SearchConfig::default(), None);
        assert_eq!(
            verdict,
            ScanVerdict::NotVulnerable {
                early_terminated: true
            }
        );
    }

    #[test]
    fn public_burn_pool_is_profitable_in_one_rep() {
        let target = target_with_y(
            BehaviorSpec::PublicBurn {
                anyone_can_burn_from: true,
            },
            1000,
            1000,
            100,
            None,
        );
        let verdict = run_pipeline(&target, &SearchConfig::default(), None);
        match verdict {
            ScanVerdict::Profitable(report) => {
                assert_eq!(report.reps, 1);
                assert!(report.template_id.starts_with("burn-pool"), "{}", report.template_id);
                assert_eq!(report.profit_token, TokenId::new("x"));
            }
            other => panic!("expected profitable, got {other:?}"),
        }
    }

    #[test]
    fn no_repeat_ablation_skips_deep_search() {
        // Reward token: drains only with repetition, so single-pass misses it.
        let target = target_with_y(
            BehaviorSpec::RewardOnDexTrade {
                reward_num: 5,
                reward_den: 10000,
                min_amount: Amount::from_whole(10, 18),
            },
            100_000,
            1_000_000,
            20_000,
            None,
        );
        let config = SearchConfig {
            no_repeat: true,
            ..SearchConfig::default()
        };
        assert_eq!(
            run_pipeline(&target, &config, None),
            ScanVerdict::NotVulnerable {
                early_terminated: false
            }
        );
    }

    #[test]
    fn reward_token_needs_repetition_and_matches_reference() {
        let target = target_with_y(
            BehaviorSpec::RewardOnDexTrade {
                reward_num: 5,
                reward_den: 10000,
                min_amount: Amount::from_whole(10, 18),
            },
            100_000,
            1_000_000,
            20_000,
            None,
        );
        let config = SearchConfig::default();
        let report = match run_pipeline(&target, &config, None) {
            ScanVerdict::Profitable(report) => report,
            other => panic!("expected profitable, got {other:?}"),
        };
        assert!(report.reps > 1, "one pass must not be enough, got reps={}", report.reps);
        assert!(report.invariant2_broken);
        let reference = brute_force_oracle(&target, &config, 64, None)
            .unwrap()
            .expect("reference search must also find it");
        assert_eq!(report.reps, reference.reps, "repetition count must be minimal");
    }

    #[test]
    fn scan_verdicts_are_deterministic() {
        let target = target_with_y(
            BehaviorSpec::PublicBurn {
                anyone_can_burn_from: true,
            },
            1000,
            1000,
            100,
            None,
        );
        let a = run_pipeline(&target, &SearchConfig::default(), None);
        let b = run_pipeline(&target, &SearchConfig::default(), None);
        assert_eq!(a, b);
    }

    #[test]
    fn rep_schedule_doubles_to_cap() {
        assert_eq!(rep_schedule(256), vec![1, 2, 4, 8, 16, 32, 64, 128, 256]);
        assert_eq!(rep_schedule(1), vec![1]);
        assert_eq!(rep_schedule(6), vec![1, 2, 4, 6]);
    }
}
