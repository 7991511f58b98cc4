//! Parallel scan orchestration.
//!
//! Targets are sorted by id and distributed to workers through an atomic
//! cursor; each worker writes into its own result slot, so the output order
//! is independent of scheduling. Workers share nothing mutable.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use cpmmscan_core::synth::{run_pipeline, ScanVerdict};
use cpmmscan_core::{ScanTarget, SearchConfig};

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub target_id: String,
    pub verdict: ScanVerdict,
    pub elapsed: Duration,
}

pub fn scan_all(
    mut targets: Vec<ScanTarget>,
    config: &SearchConfig,
    worker_count: usize,
    timeout: Duration,
) -> Vec<ScanOutcome> {
    targets.sort_by(|a, b| a.id.cmp(&b.id));
    let worker_count = worker_count.max(1).min(targets.len().max(1));
    let cursor = AtomicUsize::new(0);
    let mut slots: Vec<Option<ScanOutcome>> = vec![None; targets.len()];

    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..worker_count {
            let cursor = &cursor;
            let targets = &targets;
            handles.push(scope.spawn(move || {
                let mut results = Vec::new();
                loop {
                    let index = cursor.fetch_add(1, Ordering::Relaxed);
                    if index >= targets.len() {
                        return results;
                    }
                    let target = &targets[index];
                    let start = Instant::now();
                    let verdict = run_pipeline(target, config, Some(start + timeout));
                    results.push((
                        index,
                        ScanOutcome {
                            target_id: target.id.clone(),
                            verdict,
                            elapsed: start.elapsed(),
                        },
                    ));
                }
            }));
        }
        for handle in handles {
            for (index, outcome) in handle.join().expect("scan worker panicked") {
                slots[index] = Some(outcome);
            }
        }
    });

    slots.into_iter().map(|s| s.expect("missing scan slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpusgen::{generate_corpus, ArchetypeCounts};

    #[test]
    fn parallel_and_sequential_agree() {
        let corpus = generate_corpus(
            7,
            &ArchetypeCounts {
                anch: 1,
                shadowfi: 1,
                deflate: 1,
                rebase: 0,
                benign: 3,
                benign_fot: 2,
            },
        )
        .unwrap();
        let config = SearchConfig::default();
        let timeout = Duration::from_secs(1200);
        let one = scan_all(corpus.targets().unwrap(), &config, 1, timeout);
        let eight = scan_all(corpus.targets().unwrap(), &config, 8, timeout);
        assert_eq!(one.len(), eight.len());
        for (a, b) in one.iter().zip(eight.iter()) {
            assert_eq!(a.target_id, b.target_id);
            assert_eq!(a.verdict, b.verdict);
        }
    }
}
