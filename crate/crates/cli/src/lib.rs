//! Corpus handling, scan orchestration and reporting for the pool scanner.

pub mod corpus;
pub mod corpusgen;
pub mod report;
pub mod scan;
