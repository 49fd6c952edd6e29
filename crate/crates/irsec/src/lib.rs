//! File formats, the Monte Carlo runner and the oracle suites on top of
//! `irsec-core`.

pub mod dump;
pub mod record;
pub mod runner;
pub mod scenario;
pub mod validate;
