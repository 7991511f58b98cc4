use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use cpmmscan_bench::{bench_targets, target_by_prefix};
use cpmmscan_core::exec::{execute_tx, Call, ExecCtx, SymbolicArg};
use cpmmscan_core::pool::get_amount_out;
use cpmmscan_core::synth::{run_pipeline, shallow_pass};
use cpmmscan_core::{Amount, SearchConfig};

fn amount_out(c: &mut Criterion) {
    let rin = Amount::from_whole(100_000, 18);
    let rout = Amount::from_whole(500_000, 18);
    let ain = Amount::from_whole(1_000, 18);
    c.bench_function("get_amount_out", |b| {
        b.iter(|| get_amount_out(std::hint::black_box(ain), rin, rout, 997, 1000).unwrap())
    });
}

fn tx_round_trip(c: &mut Criterion) {
    let targets = bench_targets();
    let target = target_by_prefix(&targets, "pool-benign0");
    let pool = target.world.pool(&target.pool).unwrap().clone();
    let ctx = ExecCtx {
        attacker: target.world.attacker.clone(),
        pool: target.pool.clone(),
    };
    let budget = pool.reserve_x.checked_div(Amount::from(100u64)).unwrap();
    let calls = vec![
        Call::SwapExactIn {
            pool: target.pool.clone(),
            input_token: pool.token_x.clone(),
            amount: SymbolicArg::constant(budget),
            to: ctx.attacker.clone(),
        },
        Call::Transfer {
            token: pool.token_y.clone(),
            to: pool.account.clone(),
            amount: SymbolicArg::BalanceOfSelf {
                token: pool.token_y.clone(),
            },
        },
        Call::Skim {
            pool: target.pool.clone(),
            to: ctx.attacker.clone(),
        },
        Call::Sync {
            pool: target.pool.clone(),
        },
        Call::SwapExactIn {
            pool: target.pool.clone(),
            input_token: pool.token_y.clone(),
            amount: SymbolicArg::BalanceOfSelf {
                token: pool.token_y.clone(),
            },
            to: ctx.attacker.clone(),
        },
    ];
    c.bench_function("execute_tx_round_trip", |b| {
        b.iter(|| execute_tx(std::hint::black_box(&target.world), &calls, &ctx))
    });
}

fn shallow_benign(c: &mut Criterion) {
    let targets = bench_targets();
    let target = target_by_prefix(&targets, "pool-benign0");
    let config = SearchConfig::default();
    c.bench_function("shallow_pass_benign", |b| {
        b.iter(|| shallow_pass(std::hint::black_box(&target), &config, None).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let targets = bench_targets();
    let config = SearchConfig::default();
    let mut group = c.benchmark_group("pipeline");
    group.measurement_time(Duration::from_secs(10));
    for prefix in ["pool-shadowfi0", "pool-anch0", "pool-benign-fot0"] {
        let target = target_by_prefix(&targets, prefix);
        group.bench_function(prefix, |b| {
            b.iter(|| run_pipeline(std::hint::black_box(&target), &config, None))
        });
    }
    group.finish();
}

criterion_group!(benches, amount_out, tx_round_trip, shallow_benign, pipeline);
criterion_main!(benches);
