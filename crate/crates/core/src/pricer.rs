//! Contour-inversion pricing engine.
//!
//! The double integral runs over `ω = s + ik₁`, `η = t + ik₂`. Conjugate
//! symmetry of both transforms makes the integrand Hermitian in `(s, t)`,
//! so only `s ≥ 0` is integrated and twice the real part is kept. The
//! `η`-line is the outer integral and the `ω`-ray the inner one.
//!
//! A contour with `Im ω ∈ (0, 1)` lying past a call's pole at `ω = i` (or
//! a put's pole at `ω = 0`) is allowed; the pole's residue is then added as
//! an expectation over `I_T` alone. This is how call-like claims are priced
//! under GARCH, whose transform only exists for `Im ω ∈ (0, 1)`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;

use crate::domain::{intersect_strips, Contour, Interval, MarketState, ModelSpec, RatesSpec, Strip};
use crate::error::{Axis, Error, Result};
use crate::models::{self, garch_contour_admissible, is_regular, model_strip, TransformQuery};
use crate::payoffs::{ContractSpec, CrossedPole, VarianceWeight};
use crate::quad::{self, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceResult {
    pub value: f64,
    pub est_error: f64,
    pub nodes_used: usize,
    /// Furthest `|Re ω|` reached by the inner integrals.
    pub truncation_omega: f64,
    /// Furthest `|Re η|` reached by the outer integral (0 on the 1D path).
    pub truncation_eta: f64,
    pub contour: Contour,
}

/// Offset used to replace a node on the singular set by two neighbours.
const SINGULAR_SHIFT: f64 = 1e-6;
/// `Im η` of the line used for the band probability of a crossed pole.
const BAND_LINE: f64 = -0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weight {
    Value,
    Delta,
    Gamma,
}

fn pick(iv: &Interval, call_like: bool) -> f64 {
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => 0.5 * (iv.lo + iv.hi),
        (true, false) => iv.lo + 0.5,
        (false, true) => iv.hi - 0.5,
        (false, false) => {
            if call_like {
                0.5
            } else {
                0.0
            }
        }
    }
}

fn admissible(model: &ModelSpec, contour: &Contour) -> Result<()> {
    model_strip(model).check(contour)?;
    if let ModelSpec::Garch(_) = model {
        if !garch_contour_admissible(contour.k1, contour.k2) {
            let (k1, k2) = (contour.k1, contour.k2);
            return Err(Error::OutsideStrip {
                axis: Axis::Eta,
                value: k2,
                lo: f64::NEG_INFINITY,
                hi: 0.5 * (k1 - k1 * k1),
            });
        }
    }
    Ok(())
}

/// Probes the Heston regularity of the contour along a fixed node set.
fn check_regular(model: &ModelSpec, contract: &ContractSpec, contour: &Contour, tau: f64) -> Result<()> {
    if !matches!(model, ModelSpec::Heston(_)) || tau == 0.0 {
        return Ok(());
    }
    let k2 = if contract.is_eta_independent() { 0.0 } else { contour.k2 };
    let grid: Vec<f64> = (0..=40).map(|j| -50.0 + 2.5 * j as f64).collect();
    for &s in &grid {
        for &t in &grid {
            let t = if contract.is_eta_independent() { 0.0 } else { t };
            let q = TransformQuery::new(Complex64::new(s, contour.k1), Complex64::new(t, k2), 1.0, tau)?;
            if !is_regular(&q, model) {
                return Err(Error::Singular(format!(
                    "contour (k1={}, k2={}) meets the singular set at s={s}, t={t}",
                    contour.k1, contour.k2
                )));
            }
        }
    }
    Ok(())
}

/// Default contour for `contract` under `model`.
///
/// Inside the joint strip `k₁` is its midpoint when bounded and otherwise
/// half a unit inside its finite edge; `k₂` follows the same rule (0 for
/// η-independent claims). When the joint strip is empty but the model
/// admits `Im ω ∈ (0, 1)`, the contour is placed there and the crossed
/// pole is handled by [`price`].
pub fn choose_contour(contract: &ContractSpec, model: &ModelSpec, tau: f64) -> Result<Contour> {
    contract.validate()?;
    let ms = model_strip(model);
    let joint = intersect_strips(&contract.strip(), &ms)
        .or_else(|| contract.residue_strip().and_then(|s| intersect_strips(&s, &ms)))
        .ok_or_else(|| Error::EmptyStrip(format!("{contract} under {model}")))?;
    let call_like = !matches!(contract, ContractSpec::TvoPut { .. } | ContractSpec::VanillaPut { .. });
    let k1 = pick(&joint.omega, call_like);
    let k2 = if contract.is_eta_independent() {
        0.0
    } else {
        pick(&joint.eta, true)
    };
    let contour = Contour::new(k1, k2);
    if contract.is_eta_independent() {
        model_strip(model).check(&Contour::new(k1, 0.0))?;
    } else {
        admissible(model, &contour)?;
    }
    check_regular(model, contract, &contour, tau)?;
    Ok(contour)
}

struct Engine<'a> {
    model: &'a ModelSpec,
    contract: &'a ContractSpec,
    state: &'a MarketState,
    rates: &'a RatesSpec,
    cfg: &'a QuadConfig,
    contour: Contour,
    tau: f64,
    /// `ln S + (r-d)τ`
    x0: f64,
    crossed: Option<(CrossedPole, VarianceWeight)>,
}

impl<'a> Engine<'a> {
    fn new(
        model: &'a ModelSpec,
        rates: &'a RatesSpec,
        contract: &'a ContractSpec,
        state: &'a MarketState,
        contour: Contour,
        cfg: &'a QuadConfig,
    ) -> Result<Self> {
        crate::domain::validate_model(model)?;
        contract.validate()?;
        state.validate()?;
        cfg.validate()?;
        let tau = state.time_to(contract.maturity())?;
        if tau <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "valuation time {} must precede maturity {}",
                state.time,
                contract.maturity()
            )));
        }
        let eta_free = contract.is_eta_independent();
        let line = if eta_free { Contour::new(contour.k1, 0.0) } else { contour };
        let own = contract.strip();
        let crossed = if own.omega.contains(line.k1) {
            if !eta_free {
                own.check(&line)?;
            }
            None
        } else {
            match contract.residue_strip() {
                Some(rs) if rs.omega.contains(line.k1) => {
                    if !eta_free {
                        rs.check(&line)?;
                    }
                    contract.residue()
                }
                _ => {
                    return Err(Error::OutsideStrip {
                        axis: Axis::Omega,
                        value: line.k1,
                        lo: own.omega.lo,
                        hi: own.omega.hi,
                    })
                }
            }
        };
        if eta_free {
            model_strip(model).check(&line)?;
        } else {
            admissible(model, &line)?;
        }
        Ok(Self {
            model,
            contract,
            state,
            rates,
            cfg,
            contour: line,
            tau,
            x0: state.spot.ln() + rates.carry() * tau,
            crossed,
        })
    }

    fn weight(&self, omega: Complex64, w: Weight) -> Complex64 {
        let i = Complex64::i();
        let s = self.state.spot;
        match w {
            Weight::Value => Complex64::new(1.0, 0.0),
            Weight::Delta => -i * omega / s,
            Weight::Gamma => (i * omega - omega * omega) / (s * s),
        }
    }

    /// Integrand at a single node, without the singular-node policy.
    fn raw(&self, omega: Complex64, eta: Complex64, w: Weight) -> Result<Complex64> {
        let i = Complex64::i();
        let q = TransformQuery::new(omega, eta, self.state.inst_variance, self.tau)?;
        if !is_regular(&q, self.model) {
            return Err(Error::Singular(format!("omega={omega}, eta={eta}")));
        }
        let h = models::transform(&q, self.model)?;
        let f = self.contract.transform_formula(omega, eta)?;
        let phase = (-i * omega * self.x0 - i * eta * self.state.accrued_qv).exp();
        Ok(phase * h * f * self.weight(omega, w))
    }

    fn node(&self, s: f64, t: f64, w: Weight) -> Result<Complex64> {
        let omega = Complex64::new(s, self.contour.k1);
        let eta = Complex64::new(t, self.contour.k2);
        match self.raw(omega, eta, w) {
            Err(Error::Singular(_)) => {
                let d = SINGULAR_SHIFT * s.abs().max(1.0);
                let a = self.raw(omega + d, eta, w)?;
                let b = self.raw(omega - d, eta, w)?;
                Ok(0.5 * (a + b))
            }
            r => r,
        }
    }

    /// Conjugate-symmetry probe of the integrand: with halving only the
    /// real part survives, so a broken symmetry would go unnoticed.
    fn symmetry_probe(&self) -> Result<()> {
        let pts = [(0.7, 0.3), (2.3, -1.9), (5.1, 4.4)];
        for (s, t) in pts {
            let t = if self.contract.is_eta_independent() { 0.0 } else { t };
            let a = self.node(s, t, Weight::Value)?;
            let b = self.node(-s, -t, Weight::Value)?;
            let residue = (a - b.conj()).norm();
            let tolerance = 1e-8 * a.norm().max(1e-300);
            if residue > tolerance {
                return Err(Error::ImaginaryResidue { residue, tolerance });
            }
        }
        Ok(())
    }

    fn integral(&self, w: Weight) -> Result<PriceResult> {
        self.symmetry_probe()?;
        let r = self.rates.risk_free;
        let cfg = self.cfg;
        if self.contract.is_eta_independent() {
            // V = e^{-rτ}/(2π) · 2 Re ∫_{s≥0}
            let pref = (-r * self.tau).exp() / PI;
            let f = |s: f64| self.node(s, 0.0, w);
            let res = quad::integrate_ray(&f, 0.0, 1.0, cfg, cfg.abs_tol / pref, true)?;
            return Ok(PriceResult {
                value: pref * res.value.re,
                est_error: pref * res.error,
                nodes_used: res.nodes,
                truncation_omega: res.extent,
                truncation_eta: 0.0,
                contour: self.contour,
            });
        }
        // V = e^{-rτ}/(4π²) · 2 Re ∫_t ∫_{s≥0}
        let pref = (-r * self.tau).exp() / (2.0 * PI * PI);
        let outer_floor = cfg.abs_tol / pref;
        let inner_floor = outer_floor / (2.0 * cfg.max_halfwidth);
        let inner_nodes = AtomicUsize::new(0);
        let inner_stats = Mutex::new((0.0f64, 0.0f64));
        let inner = |t: f64| -> Result<Complex64> {
            let f = |s: f64| self.node(s, t, w);
            let res = quad::integrate_ray(&f, 0.0, 1.0, cfg, inner_floor, false)?;
            inner_nodes.fetch_add(res.nodes, Ordering::Relaxed);
            let mut st = inner_stats.lock().unwrap_or_else(|e| e.into_inner());
            st.0 = st.0.max(res.error);
            st.1 = st.1.max(res.extent);
            Ok(res.value)
        };
        let res = quad::integrate_line(&inner, 0.0, cfg, outer_floor, true)?;
        let (inner_err, omega_extent) = *inner_stats.lock().unwrap_or_else(|e| e.into_inner());
        Ok(PriceResult {
            value: pref * res.value.re,
            est_error: pref * (res.error + inner_err * 2.0 * res.extent),
            nodes_used: res.nodes + inner_nodes.load(Ordering::Relaxed),
            truncation_omega: omega_extent,
            truncation_eta: res.extent,
            contour: self.contour,
        })
    }

    /// `E[a(I_T)]` under the measure attached to `pole`, with error.
    fn weight_expectation(&self, pole: CrossedPole, a: VarianceWeight) -> Result<(f64, f64)> {
        let p = match pole {
            CrossedPole::Share => Complex64::i(),
            CrossedPole::Cash => Complex64::new(0.0, 0.0),
        };
        let v = self.state.inst_variance;
        let it = self.state.accrued_qv;
        let h = |eta: Complex64| -> Result<Complex64> {
            models::transform(&TransformQuery::new(p, eta, v, self.tau)?, self.model)
        };
        match a {
            VarianceWeight::Unit => Ok((1.0, 0.0)),
            VarianceWeight::InvSqrt { coef } => {
                // 1/√y = (2/√π) ∫₀^∞ e^{-w²y} dw
                let f = |w: f64| -> Result<Complex64> {
                    let l = w * w;
                    Ok((-l * it).exp() * h(Complex64::new(0.0, -l))?)
                };
                let c = coef * 2.0 / PI.sqrt();
                let res = quad::integrate_ray(&f, 0.0, 1.0, self.cfg, self.cfg.abs_tol / c, false)?;
                Ok((c * res.value.re, c * res.error))
            }
            VarianceWeight::Band { lo, hi } => {
                // P(lo ≤ I_T ≤ hi) = (1/2π) ∫ e^{-iηI_t} Ĥ(p, η) (e^{iη·hi} - e^{iη·lo})/(iη) dη
                let i = Complex64::i();
                let f = |t: f64| -> Result<Complex64> {
                    let eta = Complex64::new(t, BAND_LINE);
                    let gate = ((i * eta * (hi - it)).exp() - (i * eta * (lo - it)).exp()) / (i * eta);
                    Ok(gate * h(eta)?)
                };
                let res = quad::integrate_ray(&f, 0.0, 1.0, self.cfg, self.cfg.abs_tol * PI, false)?;
                Ok((res.value.re / PI, res.error / PI))
            }
        }
    }

    /// Contribution of the crossed pole to the value or its derivatives.
    fn residue(&self, w: Weight) -> Result<(f64, f64)> {
        let Some((pole, a)) = self.crossed else {
            return Ok((0.0, 0.0));
        };
        if w == Weight::Gamma {
            return Ok((0.0, 0.0));
        }
        let (e, err) = self.weight_expectation(pole, a)?;
        let scale = match (pole, w) {
            (CrossedPole::Share, Weight::Value) => self.state.spot * (-self.rates.dividend_yield * self.tau).exp(),
            (CrossedPole::Share, _) => (-self.rates.dividend_yield * self.tau).exp(),
            (CrossedPole::Cash, Weight::Value) => strike(self.contract) * (-self.rates.risk_free * self.tau).exp(),
            (CrossedPole::Cash, _) => 0.0,
        };
        Ok((scale * e, scale * err))
    }

    fn run(&self, w: Weight) -> Result<PriceResult> {
        let mut out = self.integral(w)?;
        let (extra, err) = self.residue(w)?;
        out.value += extra;
        out.est_error += err;
        if !(out.value.is_finite() && out.est_error.is_finite()) {
            return Err(Error::NonConvergence {
                what: format!("{} under {}", self.contract, self.model),
                estimate: out.value,
                error: out.est_error,
            });
        }
        Ok(out)
    }
}

fn strike(c: &ContractSpec) -> f64 {
    match *c {
        ContractSpec::TvoCall { strike, .. }
        | ContractSpec::TvoPut { strike, .. }
        | ContractSpec::VolCappedCall { strike, .. }
        | ContractSpec::VanillaCall { strike, .. }
        | ContractSpec::VanillaPut { strike, .. }
        | ContractSpec::DigitalCall { strike, .. } => strike,
        ContractSpec::DoubleDigitalCall { asset_strike, .. } => asset_strike,
        ContractSpec::VolStruckCall { .. } => 0.0,
    }
}

/// Present value of `contract`.
pub fn price(
    model: &ModelSpec,
    rates: &RatesSpec,
    contract: &ContractSpec,
    state: &MarketState,
    contour: Contour,
    cfg: &QuadConfig,
) -> Result<PriceResult> {
    Engine::new(model, rates, contract, state, contour, cfg)?.run(Weight::Value)
}

/// `∂V/∂S`, from the integrand weighted by `-iω/S`.
pub fn delta(
    model: &ModelSpec,
    rates: &RatesSpec,
    contract: &ContractSpec,
    state: &MarketState,
    contour: Contour,
    cfg: &QuadConfig,
) -> Result<PriceResult> {
    Engine::new(model, rates, contract, state, contour, cfg)?.run(Weight::Delta)
}

/// `∂²V/∂S²`, from the integrand weighted by `(iω - ω²)/S²`.
pub fn gamma(
    model: &ModelSpec,
    rates: &RatesSpec,
    contract: &ContractSpec,
    state: &MarketState,
    contour: Contour,
    cfg: &QuadConfig,
) -> Result<PriceResult> {
    Engine::new(model, rates, contract, state, contour, cfg)?.run(Weight::Gamma)
}

/// Checks that `contour` is admissible for `contract` under `model` without
/// pricing: strip membership, crossed-pole handling and Heston regularity.
pub fn check_contour(
    model: &ModelSpec,
    rates: &RatesSpec,
    contract: &ContractSpec,
    state: &MarketState,
    contour: Contour,
) -> Result<()> {
    Engine::new(model, rates, contract, state, contour, &QuadConfig::default()).map(|_| ())
}

/// Joint strip of a contract and a model, when non-empty.
pub fn joint_strip(contract: &ContractSpec, model: &ModelSpec) -> Option<Strip> {
    intersect_strips(&contract.strip(), &model_strip(model))
}
