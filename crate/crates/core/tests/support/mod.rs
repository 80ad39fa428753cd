//! Oracles shared by the integration tests and the acceptance run. Each
//! check returns its worst observed deviation or a failure message.

#![allow(dead_code)]

pub mod boundaries;
pub mod identities;
pub mod pricing;
pub mod quadrature;
