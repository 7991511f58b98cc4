//! Deterministic constant-product market simulator and exploit search.
//!
//! The crate models pools and behavior-rich tokens as plain values
//! ([`world::WorldState`]), executes call sequences atomically
//! ([`exec::execute_tx`]), classifies outcomes against pool-drain invariants
//! and a profitability oracle ([`oracle`]), and searches template-generated
//! call sequences for profitable transactions ([`synth`]).

pub mod amount;
pub mod error;
pub mod exec;
pub mod ids;
pub mod ledger;
pub mod oracle;
pub mod pool;
pub mod synth;
pub mod world;

pub use amount::Amount;
pub use error::{Revert, SpecError};
pub use exec::{Call, ExecCtx, Snapshot, SymbolicArg, TraceEntry, TxResult};
pub use ids::{AccountId, PoolId, TokenId};
pub use ledger::{BehaviorSpec, FeeMode, FeeSink, HookDef, HookEffect, LedgerState, TokenSpec};
pub use oracle::{PriceTable, UsdValue, Verdict};
pub use pool::PoolState;
pub use synth::{ExploitReport, ScanTarget, ScanVerdict, SearchConfig};
pub use world::{Token, WorldState};
