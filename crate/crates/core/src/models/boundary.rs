//! Feller classification of the variance boundaries `0` and `+∞`.
//!
//! A boundary `l` is attainable iff
//! `v(l) = ∫ s(y) ∫ m(z) dz dy` (between `l` and an interior point) is
//! finite, where `s` is the scale density and `m = 2/(β² s)` the speed
//! density. The numeric check first tests the scale integral `p(l) = ∫ s`;
//! when it is finite, `v(l)` is evaluated as `∫ (2/β(z)²) R(z) dz` with
//! `R(z) = ∫ s(y)/s(z) dy` taken from `l` to `z`, which avoids forming the
//! product of a huge and a tiny number. Finiteness is decided from the
//! decay of successive six-decade blocks of the integral.

use std::fmt;

use crate::domain::ModelSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMethod {
    ClosedForm,
    NumericScaleFunction,
}

impl fmt::Display for BoundaryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryMethod::ClosedForm => write!(f, "closed-form"),
            BoundaryMethod::NumericScaleFunction => write!(f, "numeric-scale-function"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub zero_attainable: bool,
    pub infinity_attainable: bool,
    pub method: BoundaryMethod,
    pub detail: String,
}

/// Attainability of `(0, +∞)` from the parameter inequalities.
pub fn closed_form_boundaries(model: &ModelSpec) -> (bool, bool) {
    match *model {
        ModelSpec::Heston(p) => (2.0 * p.kappa * p.theta < p.epsilon * p.epsilon, false),
        ModelSpec::ThreeHalves(p) => (false, 2.0 * p.kappa < -p.epsilon * p.epsilon),
        ModelSpec::Garch(_) => (false, false),
    }
}

#[derive(Clone, Copy)]
enum Side {
    Zero,
    Infinity,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Zero => -1.0,
            Side::Infinity => 1.0,
        }
    }
}

/// Scale and speed data of `dv = α(v)dt + β(v)dW` in logarithmic form.
struct Diffusion {
    model: ModelSpec,
}

impl Diffusion {
    fn new(model: &ModelSpec) -> Result<Self> {
        let eps = model.vol_of_vol();
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidInput(format!("vol of vol must be > 0, got {eps}")));
        }
        Ok(Self { model: *model })
    }

    /// `ln s(u)`, normalised by `s(1) = 1`.
    fn ln_s(&self, u: f64) -> f64 {
        match self.model {
            ModelSpec::Heston(p) => {
                let e2 = p.epsilon * p.epsilon;
                -2.0 * p.kappa * p.theta / e2 * u.ln() + 2.0 * p.kappa / e2 * (u - 1.0)
            }
            ModelSpec::ThreeHalves(p) => {
                let e2 = p.epsilon * p.epsilon;
                2.0 * p.kappa / e2 * u.ln() + 2.0 * p.kappa * p.theta / e2 * (1.0 / u - 1.0)
            }
            ModelSpec::Garch(p) => -2.0 * p.theta / (p.epsilon * p.epsilon) * u.ln(),
        }
    }

    /// `ln s(z·r) - ln s(z)` given `ln r`, computed without cancellation.
    fn ln_s_ratio(&self, z: f64, ln_r: f64) -> f64 {
        let rm1 = ln_r.exp_m1();
        match self.model {
            ModelSpec::Heston(p) => {
                let e2 = p.epsilon * p.epsilon;
                -2.0 * p.kappa * p.theta / e2 * ln_r + 2.0 * p.kappa / e2 * z * rm1
            }
            ModelSpec::ThreeHalves(p) => {
                let e2 = p.epsilon * p.epsilon;
                // 1/(zr) - 1/z = -(r-1)/(zr)
                2.0 * p.kappa / e2 * ln_r - 2.0 * p.kappa * p.theta / e2 * rm1 / (z * ln_r.exp())
            }
            ModelSpec::Garch(p) => -2.0 * p.theta / (p.epsilon * p.epsilon) * ln_r,
        }
    }

    /// `ln(2/β(z)²)`.
    fn ln_two_over_beta2(&self, z: f64) -> f64 {
        let eps = self.model.vol_of_vol();
        let power = match self.model {
            ModelSpec::Heston(_) => 1.0,
            ModelSpec::ThreeHalves(_) => 3.0,
            ModelSpec::Garch(_) => 2.0,
        };
        2f64.ln() - 2.0 * eps.ln() - power * z.ln()
    }
}

const BLOCKS: usize = 5;
const BLOCK_DECADES: f64 = 6.0;
const PANEL: f64 = 0.25;
const RATIO_LIMIT: f64 = 0.7;
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln ∫_a^b e^{f(x)} dx` by 5-point Gauss–Legendre panels.
fn ln_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panel: f64) -> f64 {
    let n = ((b - a).abs() / panel).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut acc = f64::NEG_INFINITY;
    for k in 0..n {
        let c = a + h * (k as f64 + 0.5);
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let v = f(c + 0.5 * h * x);
            if v.is_nan() || v == f64::INFINITY {
                return f64::INFINITY;
            }
            acc = log_add(acc, (0.5 * h.abs() * w).ln() + v);
        }
    }
    acc
}

/// Decides convergence of `Σ blocks` from the last two block ratios.
fn blocks_converge(ln_blocks: &[f64]) -> bool {
    if ln_blocks.iter().any(|b| b.is_nan() || *b == f64::INFINITY) {
        return false;
    }
    let n = ln_blocks.len();
    let ratio = |k: usize| {
        if ln_blocks[k + 1] == f64::NEG_INFINITY {
            0.0
        } else {
            (ln_blocks[k + 1] - ln_blocks[k]).exp()
        }
    };
    ratio(n - 2) < RATIO_LIMIT && ratio(n - 3) < RATIO_LIMIT
}

fn block_range(side: Side, k: usize) -> (f64, f64) {
    let len = BLOCK_DECADES * std::f64::consts::LN_10;
    let s = side.sign();
    (s * len * k as f64, s * len * (k + 1) as f64)
}

/// `ln R(z)` with `R(z) = ∫ s(y)/s(z) dy` from the boundary to `z`.
fn ln_r(diff: &Diffusion, side: Side, z: f64) -> f64 {
    let s = side.sign();
    // y = z·e^{s·w}, dy = z·e^{s·w} dw, w from 0 to ∞
    let integrand = |w: f64| diff.ln_s_ratio(z, s * w) + z.ln() + s * w;
    let probe = 1e-6;
    let slope = ((integrand(probe) - integrand(0.0)) / probe).abs();
    let mut h = 0.05 / slope.max(1.0);
    let mut a = 0.0;
    let mut acc = f64::NEG_INFINITY;
    let mut top = f64::NEG_INFINITY;
    for _ in 0..400 {
        let b = a + h;
        let part = ln_integral(integrand, a, b, h);
        if part == f64::INFINITY {
            return f64::INFINITY;
        }
        acc = log_add(acc, part);
        let end = integrand(b);
        top = top.max(integrand(a)).max(end);
        if end < top - 45.0 && part < acc - 45.0 {
            return acc;
        }
        if b > 5e3 {
            // integrand does not decay: R is infinite
            return f64::INFINITY;
        }
        a = b;
        h *= 1.5;
    }
    f64::INFINITY
}

fn side_attainable(diff: &Diffusion, side: Side) -> (bool, String) {
    let p_blocks: Vec<f64> = (0..BLOCKS)
        .map(|k| {
            let (a, b) = block_range(side, k);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            // u = e^y, du = e^y dy
            ln_integral(|y| diff.ln_s(y.exp()) + y, lo, hi, PANEL)
        })
        .collect();
    if !blocks_converge(&p_blocks) {
        return (false, format!("scale integral diverges (block logs {p_blocks:.3?})"));
    }
    let v_blocks: Vec<f64> = (0..BLOCKS)
        .map(|k| {
            let (a, b) = block_range(side, k);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            ln_integral(
                |y| {
                    let z = y.exp();
                    diff.ln_two_over_beta2(z) + ln_r(diff, side, z) + y
                },
                lo,
                hi,
                PANEL,
            )
        })
        .collect();
    let finite = blocks_converge(&v_blocks);
    let verdict = if finite { "converges" } else { "diverges" };
    (finite, format!("scale integral converges; explosion integral {verdict} (block logs {v_blocks:.3?})"))
}

/// Attainability of `(0, +∞)` from the numeric scale-function test, with
/// a human-readable trace.
pub fn numeric_boundaries(model: &ModelSpec) -> Result<(bool, bool, String)> {
    let diff = Diffusion::new(model)?;
    let (zero, zd) = side_attainable(&diff, Side::Zero);
    let (inf, id) = side_attainable(&diff, Side::Infinity);
    Ok((zero, inf, format!("0: {zd}; +inf: {id}")))
}

/// Classifies both boundaries in closed form and confirms the result with
/// the numeric test; a disagreement is an internal-consistency failure.
pub fn classify_boundaries(model: &ModelSpec) -> Result<BoundaryReport> {
    let (zero, inf) = closed_form_boundaries(model);
    let (nz, ni, trace) = numeric_boundaries(model)?;
    if (zero, inf) != (nz, ni) {
        return Err(Error::InternalConsistency(format!(
            "{model}: closed form gives (0: {zero}, inf: {inf}) but scale functions give (0: {nz}, inf: {ni}); {trace}"
        )));
    }
    Ok(BoundaryReport {
        zero_attainable: zero,
        infinity_attainable: inf,
        method: BoundaryMethod::ClosedForm,
        detail: format!("confirmed by {}: {trace}", BoundaryMethod::NumericScaleFunction),
    })
}
