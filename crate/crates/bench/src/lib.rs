//! Shared fixtures for the criterion benches.

use cpmmscan_cli::corpusgen::{generate_corpus, ArchetypeCounts};
use cpmmscan_core::ScanTarget;

/// One target per archetype plus two benign pools, all from one seed.
pub fn bench_targets() -> Vec<ScanTarget> {
    generate_corpus(
        97,
        &ArchetypeCounts {
            anch: 1,
            shadowfi: 1,
            deflate: 1,
            rebase: 1,
            benign: 1,
            benign_fot: 1,
        },
    )
    .unwrap()
    .targets()
    .unwrap()
}

pub fn target_by_prefix(targets: &[ScanTarget], prefix: &str) -> ScanTarget {
    targets
        .iter()
        .find(|t| t.id.starts_with(prefix))
        .unwrap()
        .clone()
}
