//! Command-line front end for `jointvol`: single-contract pricing, Greeks
//! with finite-difference cross-checks, the reference tables and config
//! validation. Reports are comma-separated text with a `#` header.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod tables;

pub use commands::{cmd_greeks, cmd_price, cmd_table, cmd_validate, Outcome};
pub use config::{Method, Resolved, RunConfig};
pub use error::{CliError, Result};
pub use report::Report;
