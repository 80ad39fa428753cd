//! Pricing of European claims on an asset and its realized quadratic
//! variation under stochastic volatility, by two-dimensional Fourier
//! inversion along shifted contours.
//!
//! The price of a claim `F(S_T, I_T)` is
//!
//! ```text
//! V = e^{-rτ}/(4π²) ∫∫ S^{-iω} e^{-iω(r-d)τ} e^{-iηI} Ĥ(ω,η,v,τ) F̂(ω,η) dω dη
//! ```
//!
//! with `Ĥ` the model's fundamental transform ([`models`]) and `F̂` the
//! payoff transform ([`payoffs`]). [`montecarlo`] provides an independent
//! simulation oracle.

pub mod domain;
pub mod error;
pub mod models;
pub mod montecarlo;
pub mod payoffs;
pub mod pricer;
pub mod quad;
pub mod specfun;

pub use domain::{
    intersect_strips, validate_model, Contour, GarchParams, HestonParams, Interval, MarketState, ModelSpec,
    RatesSpec, Strip, ThreeHalvesParams,
};
pub use error::{Axis, Error, Result};
pub use models::{classify_boundaries, is_regular, transform, BoundaryReport, TransformQuery};
pub use montecarlo::{empirical_cf, mc_price, simulate_terminals, CfEstimate, FloorPolicy, McConfig, McEstimate, Samples};
pub use payoffs::ContractSpec;
pub use pricer::{check_contour, choose_contour, delta, gamma, price, PriceResult};
pub use quad::QuadConfig;
