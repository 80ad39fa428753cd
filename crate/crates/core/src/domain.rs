//! Shared domain types: market state, rates, model parameters and the
//! strip / contour algebra used to place the inversion contour.

use std::fmt;

use crate::error::{Axis, Error, Result};

/// State variables of the pricing problem at valuation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    pub spot: f64,
    pub inst_variance: f64,
    /// Quadratic variation accrued since inception, `I_t = ∫₀ᵗ v_u du`.
    pub accrued_qv: f64,
    pub time: f64,
}

impl MarketState {
    pub fn new(spot: f64, inst_variance: f64, accrued_qv: f64, time: f64) -> Result<Self> {
        let state = Self {
            spot,
            inst_variance,
            accrued_qv,
            time,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spot.is_finite() && self.spot > 0.0) {
            return Err(Error::InvalidInput(format!("spot must be > 0, got {}", self.spot)));
        }
        if !(self.inst_variance.is_finite() && self.inst_variance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "instantaneous variance must be > 0, got {}",
                self.inst_variance
            )));
        }
        if !(self.accrued_qv.is_finite() && self.accrued_qv >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "accrued quadratic variation must be >= 0, got {}",
                self.accrued_qv
            )));
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::InvalidInput(format!("time must be >= 0, got {}", self.time)));
        }
        Ok(())
    }

    /// Time to maturity, rejecting expired contracts.
    pub fn time_to(&self, maturity: f64) -> Result<f64> {
        self.validate()?;
        if self.time >= maturity {
            return Err(Error::InvalidInput(format!(
                "valuation time {} is not before maturity {}",
                self.time, maturity
            )));
        }
        Ok(maturity - self.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatesSpec {
    pub risk_free: f64,
    pub dividend_yield: f64,
}

impl RatesSpec {
    pub fn new(risk_free: f64, dividend_yield: f64) -> Result<Self> {
        if !(risk_free.is_finite() && dividend_yield.is_finite()) {
            return Err(Error::InvalidInput("rates must be finite".into()));
        }
        Ok(Self {
            risk_free,
            dividend_yield,
        })
    }

    pub fn carry(&self) -> f64 {
        self.risk_free - self.dividend_yield
    }
}

/// `dv = κ(θ − v)dt + ε√v dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonParams {
    pub kappa: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub rho: f64,
}

/// `dv = κ(θv − v²)dt + ε v^{3/2} dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeHalvesParams {
    pub kappa: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub rho: f64,
}

/// `dv = θv dt + εv dW`, uncorrelated with the asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchParams {
    pub theta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Heston(HestonParams),
    ThreeHalves(ThreeHalvesParams),
    Garch(GarchParams),
}

impl ModelSpec {
    pub fn heston(kappa: f64, theta: f64, epsilon: f64, rho: f64) -> Result<Self> {
        let m = ModelSpec::Heston(HestonParams {
            kappa,
            theta,
            epsilon,
            rho,
        });
        validate_model(&m)?;
        Ok(m)
    }

    pub fn three_halves(kappa: f64, theta: f64, epsilon: f64, rho: f64) -> Result<Self> {
        let m = ModelSpec::ThreeHalves(ThreeHalvesParams {
            kappa,
            theta,
            epsilon,
            rho,
        });
        validate_model(&m)?;
        Ok(m)
    }

    pub fn garch(theta: f64, epsilon: f64) -> Result<Self> {
        let m = ModelSpec::Garch(GarchParams { theta, epsilon });
        validate_model(&m)?;
        Ok(m)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Heston(_) => "heston",
            ModelSpec::ThreeHalves(_) => "three_halves",
            ModelSpec::Garch(_) => "garch",
        }
    }

    pub fn rho(&self) -> f64 {
        match self {
            ModelSpec::Heston(p) => p.rho,
            ModelSpec::ThreeHalves(p) => p.rho,
            ModelSpec::Garch(_) => 0.0,
        }
    }

    pub fn vol_of_vol(&self) -> f64 {
        match self {
            ModelSpec::Heston(p) => p.epsilon,
            ModelSpec::ThreeHalves(p) => p.epsilon,
            ModelSpec::Garch(p) => p.epsilon,
        }
    }

    /// Drift `α(v)` of the variance diffusion.
    pub fn variance_drift(&self, v: f64) -> f64 {
        match self {
            ModelSpec::Heston(p) => p.kappa * (p.theta - v),
            ModelSpec::ThreeHalves(p) => p.kappa * v * (p.theta - v),
            ModelSpec::Garch(p) => p.theta * v,
        }
    }

    /// Diffusion coefficient `β(v)` of the variance diffusion.
    pub fn variance_diffusion(&self, v: f64) -> f64 {
        match self {
            ModelSpec::Heston(p) => p.epsilon * v.max(0.0).sqrt(),
            ModelSpec::ThreeHalves(p) => {
                let v = v.max(0.0);
                p.epsilon * v * v.sqrt()
            }
            ModelSpec::Garch(p) => p.epsilon * v,
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Heston(p) => write!(
                f,
                "heston(kappa={}, theta={}, epsilon={}, rho={})",
                p.kappa, p.theta, p.epsilon, p.rho
            ),
            ModelSpec::ThreeHalves(p) => write!(
                f,
                "three_halves(kappa={}, theta={}, epsilon={}, rho={})",
                p.kappa, p.theta, p.epsilon, p.rho
            ),
            ModelSpec::Garch(p) => write!(f, "garch(theta={}, epsilon={})", p.theta, p.epsilon),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::ModelRejected(format!("{name} must be a positive real, got {x}")))
    }
}

fn correlation(rho: f64) -> Result<()> {
    if rho.is_finite() && (-1.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::ModelRejected(format!("rho must lie in [-1, 1], got {rho}")))
    }
}

/// Checks parameter ranges and the natural-boundary condition (NB) for the
/// model family. The rejection message names the violated condition.
pub fn validate_model(model: &ModelSpec) -> Result<()> {
    match *model {
        ModelSpec::Heston(p) => {
            positive("kappa", p.kappa)?;
            positive("theta", p.theta)?;
            positive("epsilon", p.epsilon)?;
            correlation(p.rho)?;
            let lhs = 2.0 * p.kappa * p.theta;
            let rhs = p.epsilon * p.epsilon;
            if lhs < rhs {
                return Err(Error::ModelRejected(format!(
                    "(NB) violated: 2*kappa*theta = {lhs} < epsilon^2 = {rhs}, zero variance is attainable"
                )));
            }
            Ok(())
        }
        ModelSpec::ThreeHalves(p) => {
            positive("kappa", p.kappa)?;
            positive("theta", p.theta)?;
            positive("epsilon", p.epsilon)?;
            correlation(p.rho)?;
            let lhs = 2.0 * p.kappa;
            let rhs = -p.epsilon * p.epsilon;
            if lhs < rhs {
                return Err(Error::ModelRejected(format!(
                    "(NB) violated: 2*kappa = {lhs} < -epsilon^2 = {rhs}, variance explodes"
                )));
            }
            Ok(())
        }
        ModelSpec::Garch(p) => {
            if !p.theta.is_finite() {
                return Err(Error::ModelRejected(format!("theta must be finite, got {}", p.theta)));
            }
            positive("epsilon", p.epsilon)
        }
    }
}

/// Open interval `(lo, hi)` on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ALL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let out = Interval::new(self.lo.max(other.lo), self.hi.min(other.hi));
        (!out.is_empty()).then_some(out)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Axis-aligned product of open strips in `Im ω` and `Im η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub omega: Interval,
    pub eta: Interval,
}

impl Strip {
    pub const WHOLE: Strip = Strip {
        omega: Interval::ALL,
        eta: Interval::ALL,
    };

    pub fn new(omega: Interval, eta: Interval) -> Self {
        Self { omega, eta }
    }

    pub fn contains(&self, k1: f64, k2: f64) -> bool {
        self.omega.contains(k1) && self.eta.contains(k2)
    }

    pub fn check(&self, contour: &Contour) -> Result<()> {
        for (axis, iv, k) in [
            (Axis::Omega, self.omega, contour.k1),
            (Axis::Eta, self.eta, contour.k2),
        ] {
            if !iv.contains(k) {
                return Err(Error::OutsideStrip {
                    axis,
                    value: k,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Strip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Im(omega) in {}, Im(eta) in {}", self.omega, self.eta)
    }
}

/// Componentwise intersection; `None` when either axis is empty.
pub fn intersect_strips(a: &Strip, b: &Strip) -> Option<Strip> {
    Some(Strip {
        omega: a.omega.intersect(&b.omega)?,
        eta: a.eta.intersect(&b.eta)?,
    })
}

/// Inversion contour `ω = s + i k1`, `η = t + i k2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub k1: f64,
    pub k2: f64,
}

impl Contour {
    pub fn new(k1: f64, k2: f64) -> Self {
        Self { k1, k2 }
    }
}

impl fmt::Display for Contour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k1={}, k2={})", self.k1, self.k2)
    }
}
