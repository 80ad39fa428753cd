//! Contract payoffs `F(S_T, I_T)` and their two-dimensional transforms
//! `F̂(ω, η) = ∫∫ e^{iωx + iηy} F(eˣ, y) dx dy`.

use std::fmt;

use num_complex::Complex64;

use crate::domain::{Interval, Strip};
use crate::error::{Axis, Error, Result};
use crate::specfun::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContractSpec {
    /// `σ̄ √(T/I_T) (S_T - K)⁺`
    TvoCall { target_vol: f64, strike: f64, maturity: f64 },
    /// `σ̄ √(T/I_T) (K - S_T)⁺`
    TvoPut { target_vol: f64, strike: f64, maturity: f64 },
    /// `1{S_T ≥ K₁, I_T/T ≥ K₂}`
    DoubleDigitalCall { asset_strike: f64, variance_strike: f64, maturity: f64 },
    /// `(S_T - K)⁺ 1{K₁ ≤ √(I_T/T) ≤ K₂}`
    VolCappedCall { strike: f64, vol_lo: f64, vol_hi: f64, maturity: f64 },
    /// `(S_T - N √(I_T/T))⁺`
    VolStruckCall { notional: f64, maturity: f64 },
    VanillaCall { strike: f64, maturity: f64 },
    VanillaPut { strike: f64, maturity: f64 },
    /// `1{S_T ≥ K}`
    DigitalCall { strike: f64, maturity: f64 },
}

/// Pole of `F̂` in `ω` between the payoff strip and `Im ω ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossedPole {
    /// `ω = i`, crossed by call-like payoffs; its residue is priced in the
    /// share measure.
    Share,
    /// `ω = 0`, crossed by put-like payoffs; its residue is priced in the
    /// risk-neutral measure.
    Cash,
}

/// Dependence of a payoff on `I_T` after the asset leg is removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceWeight {
    Unit,
    /// `coef / √I_T`
    InvSqrt { coef: f64 },
    /// `1{lo ≤ I_T ≤ hi}`
    Band { lo: f64, hi: f64 },
}

impl VarianceWeight {
    pub fn eval(&self, qv: f64) -> f64 {
        match *self {
            VarianceWeight::Unit => 1.0,
            VarianceWeight::InvSqrt { coef } => coef / qv.sqrt(),
            VarianceWeight::Band { lo, hi } => f64::from(lo <= qv && qv <= hi),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be > 0, got {x}")))
    }
}

impl ContractSpec {
    pub fn maturity(&self) -> f64 {
        match *self {
            ContractSpec::TvoCall { maturity, .. }
            | ContractSpec::TvoPut { maturity, .. }
            | ContractSpec::DoubleDigitalCall { maturity, .. }
            | ContractSpec::VolCappedCall { maturity, .. }
            | ContractSpec::VolStruckCall { maturity, .. }
            | ContractSpec::VanillaCall { maturity, .. }
            | ContractSpec::VanillaPut { maturity, .. }
            | ContractSpec::DigitalCall { maturity, .. } => maturity,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ContractSpec::TvoCall { .. } => "tvo-call",
            ContractSpec::TvoPut { .. } => "tvo-put",
            ContractSpec::DoubleDigitalCall { .. } => "double-digital-call",
            ContractSpec::VolCappedCall { .. } => "vol-capped-call",
            ContractSpec::VolStruckCall { .. } => "vol-struck-call",
            ContractSpec::VanillaCall { .. } => "vanilla-call",
            ContractSpec::VanillaPut { .. } => "vanilla-put",
            ContractSpec::DigitalCall { .. } => "digital-call",
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("maturity", self.maturity())?;
        match *self {
            ContractSpec::TvoCall { target_vol, strike, .. } | ContractSpec::TvoPut { target_vol, strike, .. } => {
                positive("target_vol", target_vol)?;
                positive("strike", strike)
            }
            ContractSpec::DoubleDigitalCall {
                asset_strike,
                variance_strike,
                ..
            } => {
                // zero strikes give the constant payoff 1, which has no
                // transform but is a valid simulation target
                for (name, x) in [("asset_strike", asset_strike), ("variance_strike", variance_strike)] {
                    if !(x.is_finite() && x >= 0.0) {
                        return Err(Error::InvalidInput(format!("{name} must be >= 0, got {x}")));
                    }
                }
                Ok(())
            }
            ContractSpec::VolCappedCall {
                strike, vol_lo, vol_hi, ..
            } => {
                positive("strike", strike)?;
                positive("vol_hi", vol_hi)?;
                if !(vol_lo.is_finite() && vol_lo >= 0.0 && vol_lo <= vol_hi) {
                    return Err(Error::InvalidInput(format!(
                        "vol_lo must satisfy 0 <= vol_lo <= vol_hi, got {vol_lo} and {vol_hi}"
                    )));
                }
                Ok(())
            }
            ContractSpec::VolStruckCall { notional, .. } => positive("notional", notional),
            ContractSpec::VanillaCall { strike, .. }
            | ContractSpec::VanillaPut { strike, .. }
            | ContractSpec::DigitalCall { strike, .. } => positive("strike", strike),
        }
    }

    /// Payoff at maturity given the terminal spot and total quadratic
    /// variation.
    pub fn evaluate(&self, terminal_spot: f64, terminal_qv: f64) -> Result<f64> {
        if !(terminal_spot.is_finite() && terminal_spot >= 0.0) {
            return Err(Error::InvalidInput(format!("terminal spot must be >= 0, got {terminal_spot}")));
        }
        if !(terminal_qv.is_finite() && terminal_qv >= 0.0) {
            return Err(Error::InvalidInput(format!("terminal variance must be >= 0, got {terminal_qv}")));
        }
        let s = terminal_spot;
        let y = terminal_qv;
        let needs_qv = matches!(self, ContractSpec::TvoCall { .. } | ContractSpec::TvoPut { .. });
        if needs_qv && y == 0.0 {
            return Err(Error::UndefinedPayoff {
                count: 1,
                reason: format!("{} needs I_T > 0", self.name()),
            });
        }
        Ok(match *self {
            ContractSpec::TvoCall {
                target_vol,
                strike,
                maturity,
            } => target_vol * (maturity / y).sqrt() * (s - strike).max(0.0),
            ContractSpec::TvoPut {
                target_vol,
                strike,
                maturity,
            } => target_vol * (maturity / y).sqrt() * (strike - s).max(0.0),
            ContractSpec::DoubleDigitalCall {
                asset_strike,
                variance_strike,
                maturity,
            } => f64::from(s >= asset_strike && y / maturity >= variance_strike),
            ContractSpec::VolCappedCall {
                strike,
                vol_lo,
                vol_hi,
                maturity,
            } => {
                let vol = (y / maturity).sqrt();
                if vol_lo <= vol && vol <= vol_hi {
                    (s - strike).max(0.0)
                } else {
                    0.0
                }
            }
            ContractSpec::VolStruckCall { notional, maturity } => (s - notional * (y / maturity).sqrt()).max(0.0),
            ContractSpec::VanillaCall { strike, .. } => (s - strike).max(0.0),
            ContractSpec::VanillaPut { strike, .. } => (strike - s).max(0.0),
            ContractSpec::DigitalCall { strike, .. } => f64::from(s >= strike),
        })
    }

    /// True when the payoff does not depend on `I_T`; such contracts are
    /// priced by a one-dimensional inversion at `η = 0`.
    pub fn is_eta_independent(&self) -> bool {
        matches!(
            self,
            ContractSpec::VanillaCall { .. } | ContractSpec::VanillaPut { .. } | ContractSpec::DigitalCall { .. }
        )
    }

    /// Region of `(Im ω, Im η)` on which `F̂` is holomorphic.
    pub fn strip(&self) -> Strip {
        let above = |x: f64| Interval::new(x, f64::INFINITY);
        let below = |x: f64| Interval::new(f64::NEG_INFINITY, x);
        let pos = above(0.0);
        match self {
            ContractSpec::TvoCall { .. } | ContractSpec::VolCappedCall { .. } => Strip::new(above(1.0), pos),
            ContractSpec::TvoPut { .. } => Strip::new(below(0.0), pos),
            ContractSpec::DoubleDigitalCall { .. } => Strip::new(pos, pos),
            ContractSpec::VolStruckCall { .. } => Strip::new(Interval::new(1.0, 3.0), pos),
            ContractSpec::VanillaCall { .. } => Strip::new(above(1.0), Interval::ALL),
            ContractSpec::VanillaPut { .. } => Strip::new(below(0.0), Interval::ALL),
            ContractSpec::DigitalCall { .. } => Strip::new(pos, Interval::ALL),
        }
    }

    /// Pole crossed when the `ω`-line is moved into `Im ω ∈ (0, 1)`, and the
    /// variance weight multiplying the asset leg.
    pub fn residue(&self) -> Option<(CrossedPole, VarianceWeight)> {
        match *self {
            ContractSpec::TvoCall {
                target_vol, maturity, ..
            } => Some((
                CrossedPole::Share,
                VarianceWeight::InvSqrt {
                    coef: target_vol * maturity.sqrt(),
                },
            )),
            ContractSpec::TvoPut {
                target_vol, maturity, ..
            } => Some((
                CrossedPole::Cash,
                VarianceWeight::InvSqrt {
                    coef: target_vol * maturity.sqrt(),
                },
            )),
            ContractSpec::VolCappedCall {
                vol_lo,
                vol_hi,
                maturity,
                ..
            } => Some((
                CrossedPole::Share,
                VarianceWeight::Band {
                    lo: vol_lo * vol_lo * maturity,
                    hi: vol_hi * vol_hi * maturity,
                },
            )),
            ContractSpec::VolStruckCall { .. } | ContractSpec::VanillaCall { .. } => {
                Some((CrossedPole::Share, VarianceWeight::Unit))
            }
            ContractSpec::VanillaPut { .. } => Some((CrossedPole::Cash, VarianceWeight::Unit)),
            ContractSpec::DoubleDigitalCall { .. } | ContractSpec::DigitalCall { .. } => None,
        }
    }

    /// Strip reached after crossing [`ContractSpec::residue`]'s pole.
    pub fn residue_strip(&self) -> Option<Strip> {
        self.residue()
            .map(|_| Strip::new(Interval::new(0.0, 1.0), self.strip().eta))
    }

    /// `F̂(ω, η)`, rejecting arguments outside [`ContractSpec::strip`].
    ///
    /// For η-independent payoffs `η` is ignored and the one-dimensional
    /// transform in `ω` is returned.
    pub fn payoff_transform(&self, omega: Complex64, eta: Complex64) -> Result<Complex64> {
        self.check_strip(&self.strip(), omega, eta)?;
        self.transform_formula(omega, eta)
    }

    /// Like [`ContractSpec::payoff_transform`], but also accepting the strip
    /// past the crossed pole, where the same closed form is the analytic
    /// continuation.
    pub fn continued_transform(&self, omega: Complex64, eta: Complex64) -> Result<Complex64> {
        let own = self.check_strip(&self.strip(), omega, eta);
        match (own, self.residue_strip()) {
            (Ok(()), _) => {}
            (Err(e), None) => return Err(e),
            (Err(_), Some(s)) => self.check_strip(&s, omega, eta)?,
        }
        self.transform_formula(omega, eta)
    }

    fn check_strip(&self, strip: &Strip, omega: Complex64, eta: Complex64) -> Result<()> {
        let check = |axis, iv: &Interval, x: f64| {
            if iv.contains(x) {
                Ok(())
            } else {
                Err(Error::OutsideStrip {
                    axis,
                    value: x,
                    lo: iv.lo,
                    hi: iv.hi,
                })
            }
        };
        check(Axis::Omega, &strip.omega, omega.im)?;
        if !self.is_eta_independent() {
            check(Axis::Eta, &strip.eta, eta.im)?;
        }
        Ok(())
    }

    /// The closed form without strip checks.
    pub fn transform_formula(&self, omega: Complex64, eta: Complex64) -> Result<Complex64> {
        let i = Complex64::i();
        let call = |k: f64| (k.ln() * (1.0 + i * omega)).exp() / (i * omega - omega * omega);
        let out = match *self {
            ContractSpec::TvoCall {
                target_vol,
                strike,
                maturity,
            }
            | ContractSpec::TvoPut {
                target_vol,
                strike,
                maturity,
            } => {
                let root = (std::f64::consts::PI * maturity / (2.0 * eta)).sqrt();
                target_vol * (1.0 + i) * root * call(strike)
            }
            ContractSpec::DoubleDigitalCall {
                asset_strike,
                variance_strike,
                maturity,
            } => {
                -(i * omega * asset_strike.ln() + i * eta * maturity * variance_strike).exp() / (omega * eta)
            }
            ContractSpec::VolCappedCall {
                strike,
                vol_lo,
                vol_hi,
                maturity,
            } => {
                let gate = (i * eta * vol_lo * vol_lo * maturity).exp() - (i * eta * vol_hi * vol_hi * maturity).exp();
                gate * (strike.ln() * (1.0 + i * omega)).exp() / ((omega + i * omega * omega) * eta)
            }
            ContractSpec::VolStruckCall { notional, maturity } => {
                let scale = (notional / maturity.sqrt()).ln() * (1.0 + i * omega);
                let lg = ln_gamma((3.0 + i * omega) / 2.0)?;
                let power = (-1.5 - 0.5 * i * omega) * (-i * eta).ln();
                (scale + lg + power).exp() / (i * omega - omega * omega)
            }
            ContractSpec::VanillaCall { strike, .. } | ContractSpec::VanillaPut { strike, .. } => call(strike),
            ContractSpec::DigitalCall { strike, .. } => -(i * omega * strike.ln()).exp() / (i * omega),
        };
        if !(out.re.is_finite() && out.im.is_finite()) {
            return Err(Error::Pole {
                function: "payoff_transform",
                at: format!("{} at omega={omega}, eta={eta}", self.name()),
            });
        }
        Ok(out)
    }
}

impl fmt::Display for ContractSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ContractSpec::TvoCall {
                target_vol,
                strike,
                maturity,
            } => write!(f, "tvo-call(sigma={target_vol}, K={strike}, T={maturity})"),
            ContractSpec::TvoPut {
                target_vol,
                strike,
                maturity,
            } => write!(f, "tvo-put(sigma={target_vol}, K={strike}, T={maturity})"),
            ContractSpec::DoubleDigitalCall {
                asset_strike,
                variance_strike,
                maturity,
            } => write!(f, "double-digital-call(K1={asset_strike}, K2={variance_strike}, T={maturity})"),
            ContractSpec::VolCappedCall {
                strike,
                vol_lo,
                vol_hi,
                maturity,
            } => write!(f, "vol-capped-call(K={strike}, K1={vol_lo}, K2={vol_hi}, T={maturity})"),
            ContractSpec::VolStruckCall { notional, maturity } => {
                write!(f, "vol-struck-call(N={notional}, T={maturity})")
            }
            ContractSpec::VanillaCall { strike, maturity } => write!(f, "vanilla-call(K={strike}, T={maturity})"),
            ContractSpec::VanillaPut { strike, maturity } => write!(f, "vanilla-put(K={strike}, T={maturity})"),
            ContractSpec::DigitalCall { strike, maturity } => write!(f, "digital-call(K={strike}, T={maturity})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pointwise_examples() {
        let tvo = ContractSpec::TvoCall {
            target_vol: 0.1,
            strike: 100.0,
            maturity: 3.0,
        };
        assert!((tvo.evaluate(110.0, 0.03).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(tvo.evaluate(110.0, 0.0), Err(Error::UndefinedPayoff { .. })));
        let dd = ContractSpec::DoubleDigitalCall {
            asset_strike: 100.0,
            variance_strike: 0.24,
            maturity: 2.5,
        };
        assert_eq!(dd.evaluate(99.0, 10.0).unwrap(), 0.0);
        let vs = ContractSpec::VolStruckCall {
            notional: 150.0,
            maturity: 4.0,
        };
        assert!((vs.evaluate(50.0, 0.36).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn double_digital_on_imaginary_axis() {
        let dd = ContractSpec::DoubleDigitalCall {
            asset_strike: 100.0,
            variance_strike: 0.24,
            maturity: 2.5,
        };
        let v = dd.payoff_transform(c(0.0, 2.0), c(0.0, 1.0)).unwrap();
        let expect = (-0.6f64).exp() / 20000.0;
        assert!((v - expect).norm() < 1e-15, "{v}");
    }

    #[test]
    fn strips_and_rejection() {
        let vs = ContractSpec::VolStruckCall {
            notional: 150.0,
            maturity: 4.0,
        };
        assert_eq!(vs.strip().omega, Interval::new(1.0, 3.0));
        let err = vs.payoff_transform(c(0.0, 3.5), c(0.0, 0.5)).unwrap_err();
        assert!(matches!(err, Error::OutsideStrip { axis: Axis::Omega, .. }));
        let put = ContractSpec::VanillaPut {
            strike: 1.0,
            maturity: 1.0,
        };
        assert_eq!(put.strip().eta, Interval::ALL);
    }

    #[test]
    fn equal_caps_give_zero_transform() {
        let vc = ContractSpec::VolCappedCall {
            strike: 100.0,
            vol_lo: 0.3,
            vol_hi: 0.3,
            maturity: 2.0,
        };
        assert_eq!(vc.payoff_transform(c(0.7, 1.5), c(-2.0, 0.5)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn conjugate_symmetry() {
        let all = [
            ContractSpec::TvoCall {
                target_vol: 0.1,
                strike: 90.0,
                maturity: 3.0,
            },
            ContractSpec::TvoPut {
                target_vol: 0.1,
                strike: 90.0,
                maturity: 3.0,
            },
            ContractSpec::DoubleDigitalCall {
                asset_strike: 100.0,
                variance_strike: 0.24,
                maturity: 2.5,
            },
            ContractSpec::VolCappedCall {
                strike: 100.0,
                vol_lo: 0.2,
                vol_hi: 0.4,
                maturity: 2.0,
            },
            ContractSpec::VolStruckCall {
                notional: 150.0,
                maturity: 4.0,
            },
        ];
        for p in all {
            let k1 = if p.strip().omega.contains(1.5) { 1.5 } else { -0.5 };
            for (s, t) in [(0.3, 1.7), (-2.0, 0.4), (5.0, -3.0)] {
                let a = p.payoff_transform(c(s, k1), c(t, 0.5)).unwrap();
                let b = p.payoff_transform(c(-s, k1), c(-t, 0.5)).unwrap();
                assert!((a - b.conj()).norm() <= 1e-12 * a.norm(), "{p}");
            }
        }
    }

    #[test]
    fn wide_band_recovers_vanilla_pointwise() {
        let vanilla = ContractSpec::VanillaCall {
            strike: 100.0,
            maturity: 2.0,
        };
        let capped = ContractSpec::VolCappedCall {
            strike: 100.0,
            vol_lo: 1e-9,
            vol_hi: 1e9,
            maturity: 2.0,
        };
        for (s, y) in [(120.0, 0.1), (80.0, 0.5), (150.0, 3.0)] {
            assert_eq!(vanilla.evaluate(s, y).unwrap(), capped.evaluate(s, y).unwrap());
        }
    }
}
