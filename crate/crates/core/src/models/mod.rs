//! Fundamental transforms `Ĥ(ω, η, v, τ) = E[exp(-iω·Z - iη·J)]`, where
//! `Z = ln(S_T/S_t) - (r-d)τ` and `J = I_T - I_t`, for the three variance
//! models, together with regularity probes, holomorphy strips and the
//! boundary classification of the variance diffusion.

mod boundary;
mod garch;
mod heston;
mod three_halves;

use num_complex::Complex64;

pub use boundary::{classify_boundaries, closed_form_boundaries, numeric_boundaries, BoundaryMethod, BoundaryReport};
pub use garch::{garch_transform, garch_transform_direct, GarchKernel};
pub use heston::{heston_exponents, heston_transform};
pub use three_halves::three_halves_transform;

use crate::domain::{Interval, ModelSpec, Strip};
use crate::error::{Error, Result};

/// Point at which a fundamental transform is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformQuery {
    pub omega: Complex64,
    pub eta: Complex64,
    pub inst_variance: f64,
    /// Time to maturity in years.
    pub tau: f64,
}

impl TransformQuery {
    pub fn new(omega: Complex64, eta: Complex64, inst_variance: f64, tau: f64) -> Result<Self> {
        if !(inst_variance.is_finite() && inst_variance > 0.0) {
            return Err(Error::InvalidInput(format!("variance must be > 0, got {inst_variance}")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidInput(format!("tau must be >= 0, got {tau}")));
        }
        Ok(Self {
            omega,
            eta,
            inst_variance,
            tau,
        })
    }

    /// `ω² - iω + 2iη`, the coefficient that vanishes at the martingale point.
    pub fn q(&self) -> Complex64 {
        q_coefficient(self.omega, self.eta)
    }
}

pub fn q_coefficient(omega: Complex64, eta: Complex64) -> Complex64 {
    let i = Complex64::i();
    omega * omega - i * omega + 2.0 * i * eta
}

/// Evaluates the model's fundamental transform.
pub fn transform(q: &TransformQuery, model: &ModelSpec) -> Result<Complex64> {
    match model {
        ModelSpec::Heston(p) => heston_transform(q, p),
        ModelSpec::ThreeHalves(p) => three_halves_transform(q, p),
        ModelSpec::Garch(p) => garch_transform(q, p),
    }
}

/// Relative tolerance of the regularity probe.
pub const REGULARITY_TOL: f64 = 1e-12;

/// True when the transform's defining expressions are bounded away from
/// their singular sets at `q`.
pub fn is_regular(q: &TransformQuery, model: &ModelSpec) -> bool {
    match model {
        ModelSpec::Heston(p) => heston::is_regular(q, p),
        ModelSpec::ThreeHalves(_) => true,
        ModelSpec::Garch(p) => {
            let two_theta_above = 2.0 * p.theta > p.epsilon * p.epsilon;
            !(two_theta_above && q.q().norm() < REGULARITY_TOL)
        }
    }
}

/// Axis-aligned region of `(Im ω, Im η)` on which the transform is
/// holomorphic.
///
/// For GARCH the exact region is `Im ω - (Im ω)² - 2 Im η > 0`, which is not
/// a product of intervals; the returned strip is its envelope for
/// `Im ω ∈ (0, 1)` and [`garch_contour_admissible`] checks the coupling.
pub fn model_strip(model: &ModelSpec) -> Strip {
    match model {
        ModelSpec::Heston(_) | ModelSpec::ThreeHalves(_) => Strip::WHOLE,
        ModelSpec::Garch(_) => Strip::new(Interval::new(0.0, 1.0), Interval::new(f64::NEG_INFINITY, 0.125)),
    }
}

/// Exponential-moment condition for the GARCH transform on the contour.
pub fn garch_contour_admissible(k1: f64, k2: f64) -> bool {
    k1 - k1 * k1 - 2.0 * k2 > 0.0
}
