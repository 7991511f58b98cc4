//! Report files and replay.
//!
//! The report is the scan's durable artifact: engine version, the exact
//! search configuration, and per-target verdicts with replayable traces.
//! `generated_at` is the only field allowed to differ between two runs of
//! the same scan.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use cpmmscan_core::exec::{execute_tx, Call, ExecCtx};
use cpmmscan_core::oracle::evaluate_profit;
use cpmmscan_core::synth::{ExploitReport, ScanVerdict};
use cpmmscan_core::{ScanTarget, SearchConfig};

use crate::corpus::CorpusFile;
use crate::scan::ScanOutcome;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetResult {
    pub target_id: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub early_terminated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploit: Option<ExploitReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub engine_version: String,
    pub generated_at: String,
    pub config: SearchConfig,
    pub results: Vec<TargetResult>,
}

pub fn build_report(outcomes: &[ScanOutcome], config: &SearchConfig) -> ReportFile {
    let results = outcomes
        .iter()
        .map(|outcome| match &outcome.verdict {
            ScanVerdict::Profitable(report) => TargetResult {
                target_id: outcome.target_id.clone(),
                verdict: "profitable".into(),
                early_terminated: None,
                exploit: Some((**report).clone()),
            },
            ScanVerdict::NotVulnerable { early_terminated } => TargetResult {
                target_id: outcome.target_id.clone(),
                verdict: "not_vulnerable".into(),
                early_terminated: Some(*early_terminated),
                exploit: None,
            },
            ScanVerdict::Timeout => TargetResult {
                target_id: outcome.target_id.clone(),
                verdict: "timeout".into(),
                early_terminated: None,
                exploit: None,
            },
        })
        .collect();
    ReportFile {
        engine_version: ENGINE_VERSION.into(),
        generated_at: chrono::Utc::now().to_rfc3339(),
        config: config.clone(),
        results,
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("report references target {0} missing from the corpus")]
    MissingTarget(String),
    #[error("target {target}: {message}")]
    Mismatch { target: String, message: String },
}

/// Re-executes every exploit trace against the corpus and checks the
/// recorded profit exactly. Returns the number of confirmed exploits.
pub fn replay(report: &ReportFile, corpus: &CorpusFile) -> Result<usize, ReplayError> {
    let targets = corpus
        .targets()
        .map_err(|e| ReplayError::Mismatch {
            target: "$".into(),
            message: e.to_string(),
        })?;
    let threshold = report.config.threshold();
    let mut confirmed = 0;
    for result in &report.results {
        let Some(exploit) = &result.exploit else {
            continue;
        };
        let target: &ScanTarget = targets
            .iter()
            .find(|t| t.id == result.target_id)
            .ok_or_else(|| ReplayError::MissingTarget(result.target_id.clone()))?;
        let mismatch = |message: String| ReplayError::Mismatch {
            target: result.target_id.clone(),
            message,
        };

        let mut world = target.world.clone();
        if report.config.no_dex_fee {
            let pool = world
                .pool_mut(&target.pool)
                .map_err(|e| mismatch(e.to_string()))?;
            pool.fee_num = 1;
            pool.fee_den = 1;
        }
        let calls: Vec<Call> = exploit.trace.iter().map(|entry| entry.op.clone()).collect();
        let ctx = ExecCtx {
            attacker: world.attacker.clone(),
            pool: target.pool.clone(),
        };
        let tx = execute_tx(&world, &calls, &ctx);
        if tx.reverted {
            return Err(mismatch(format!(
                "trace reverted at call {:?}: {}",
                tx.failed_index,
                tx.revert_reason.unwrap_or_default()
            )));
        }
        let verdict = evaluate_profit(&world, &tx.final_state, &target.prices, &threshold)
            .map_err(|e| mismatch(e.to_string()))?;
        if !verdict.profitable {
            return Err(mismatch("trace is not profitable on this corpus".into()));
        }
        if verdict.profit_token.as_ref() != Some(&exploit.profit_token) {
            return Err(mismatch(format!(
                "profit token {:?} != recorded {:?}",
                verdict.profit_token, exploit.profit_token
            )));
        }
        if verdict.profit_amount != exploit.profit_amount {
            return Err(mismatch(format!(
                "profit {} != recorded {}",
                verdict.profit_amount, exploit.profit_amount
            )));
        }
        confirmed += 1;
    }
    Ok(confirmed)
}
