//! File formats, run reports, parallel bucketing and the subcommands behind
//! the `stabilab` binary. The algorithms themselves live in
//! `stabilab_core`.

pub mod commands;
pub mod format;
pub mod loader;
pub mod parallel;
pub mod report;
