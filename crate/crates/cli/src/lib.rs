//! Command-line harness: ensemble and circuit files, the seeded verification
//! suites and their JSON reports.

pub mod commands;
pub mod format;
pub mod report;
pub mod suite;
