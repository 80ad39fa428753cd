//! Complex special functions: Γ, confluent hypergeometric ₁F₁ and the
//! modified Bessel function K of complex order.
//!
//! All branch cuts are principal.

mod bessel;
mod gamma;
mod hyp1f1;

pub use bessel::{bessel_k, bessel_k_scaled};
pub use gamma::{complex_gamma, ln_abs_gamma, ln_gamma};
pub use hyp1f1::{kummer_1f1, kummer_1f1_scaled, TERM_BUDGET};
