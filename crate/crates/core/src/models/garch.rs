use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::TransformQuery;
use crate::domain::GarchParams;
use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{bessel_k_scaled, ln_gamma};

/// Relative envelope level at which the order integral is truncated.
const Z_CUTOFF: f64 = 1e-14;
const Z_SCAN_STEP: f64 = 0.25;
const Z_PANEL: f64 = 1.0;

struct Shape {
    beta: f64,
    /// ε²τ
    s2: f64,
}

impl Shape {
    fn new(p: &GarchParams, tau: f64) -> Self {
        Self {
            beta: 2.0 * p.theta / (p.epsilon * p.epsilon) - 1.0,
            s2: p.epsilon * p.epsilon * tau,
        }
    }

    /// `ln(|Γ((β+iz)/2)|² z sinh(πz) e^{-(β²+z²)ε²τ/8})`.
    fn ln_weight(&self, z: f64) -> Result<f64> {
        let lg = ln_gamma(Complex64::new(0.5 * self.beta, 0.5 * z))?.re;
        let ln_sinh = PI * z + (-(-2.0 * PI * z).exp()).ln_1p() - LN_2;
        Ok(2.0 * lg + z.ln() + ln_sinh - (self.beta * self.beta + z * z) * self.s2 / 8.0)
    }

    /// Terms of the finite sum as `(ln|coefficient|, order)`; the
    /// coefficient is positive.
    fn finite_terms(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        if self.beta >= 0.0 {
            return Ok(out);
        }
        let top = (-self.beta / 2.0).floor() as usize;
        let mut ln_fact = 0.0;
        for j in 0..=top {
            let jf = j as f64;
            if j > 0 {
                ln_fact += jf.ln();
            }
            let order = -self.beta - 2.0 * jf;
            if order <= 0.0 {
                // zero coefficient
                continue;
            }
            let lg = ln_gamma(Complex64::new(1.0 - self.beta - jf, 0.0))?.re;
            let ln_c = order.ln() - ln_fact - lg + (self.beta * jf + jf * jf) * self.s2 / 2.0;
            out.push((ln_c, order));
        }
        Ok(out)
    }

    /// Scans `ln_weight(z) + slope·z` for its peak and the point beyond it
    /// where it has dropped by `drop`.
    fn envelope(&self, slope: f64, drop: f64) -> Result<(f64, f64)> {
        let mut peak = f64::NEG_INFINITY;
        let mut z = Z_SCAN_STEP;
        loop {
            let e = self.ln_weight(z)? + slope * z;
            peak = peak.max(e);
            if e < peak - drop && z > 1.0 {
                return Ok((peak, z));
            }
            z += Z_SCAN_STEP;
            if z > 1e5 {
                return Err(Error::NonConvergence {
                    what: "garch order-integral envelope".into(),
                    estimate: f64::NAN,
                    error: f64::INFINITY,
                });
            }
        }
    }
}

fn parse_d(qq: Complex64, v: f64, p: &GarchParams) -> Result<Complex64> {
    let d = 2.0 * (qq * v).sqrt() / p.epsilon;
    if d.re <= 0.0 {
        return Err(Error::Singular(format!(
            "garch transform on the branch cut, omega^2 - i omega + 2 i eta = {qq}"
        )));
    }
    Ok(d)
}

/// Sum of `m_k e^{s_k}` as a mantissa and a common log-scale.
fn log_sum(terms: &[(Complex64, f64)]) -> (Complex64, f64) {
    let top = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let sum = terms.iter().map(|(m, s)| m * (s - top).exp()).sum();
    (sum, top)
}

fn finish(beta: f64, d: Complex64, mantissa: Complex64, scale: f64) -> Result<Complex64> {
    let ln_pref = (beta + 1.0) * LN_2 - beta * d.ln();
    let out = mantissa * (ln_pref + scale).exp();
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(Error::Overflow {
            function: "garch_transform",
            at: format!("d = {d}"),
        });
    }
    Ok(out)
}

/// GARCH fundamental transform (`ρ = 0`):
///
/// `Ĥ = 2^{β+1}/d^β [ Σ_j (-β-2j)/(j! Γ(1-β-j)) K_{-β-2j}(d) e^{(βj+j²)ε²τ/2}
///      + 1/(4π²) ∫₀^∞ |Γ((β+iz)/2)|² z sinh(πz) K_{iz}(d) e^{-(β²+z²)ε²τ/8} dz ]`
///
/// with `β = 2θ/ε² - 1`, `d = 2√(qv)/ε`, the sum running over
/// `0 <= j <= ⌊-β/2⌋` when `β < 0`.
///
/// Evaluated through a cached [`GarchKernel`] for `(θ, ε, τ)`; see
/// [`garch_transform_direct`] for the term-by-term evaluation.
pub fn garch_transform(q: &TransformQuery, p: &GarchParams) -> Result<Complex64> {
    if q.tau == 0.0 || q.q() == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    cached_kernel(p, q.tau)?.eval(q.omega, q.eta, q.inst_variance)
}

const CACHE_CAPACITY: usize = 64;

type CacheEntry = ([u64; 3], Arc<GarchKernel>);

fn cached_kernel(p: &GarchParams, tau: f64) -> Result<Arc<GarchKernel>> {
    static CACHE: Mutex<Vec<CacheEntry>> = Mutex::new(Vec::new());
    let key = [p.theta.to_bits(), p.epsilon.to_bits(), tau.to_bits()];
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(pos) = cache.iter().position(|(k, _)| *k == key) {
        let entry = cache.remove(pos);
        let kernel = entry.1.clone();
        cache.push(entry);
        return Ok(kernel);
    }
    let kernel = Arc::new(GarchKernel::new(p, tau)?);
    if cache.len() == CACHE_CAPACITY {
        cache.remove(0);
    }
    cache.push((key, kernel.clone()));
    Ok(kernel)
}

/// Term-by-term evaluation of [`garch_transform`]: each `K_{iz}(d)` is
/// computed separately and the order integral is done adaptively. Slow,
/// but independent of the kernel tabulation.
pub fn garch_transform_direct(q: &TransformQuery, p: &GarchParams) -> Result<Complex64> {
    let qq = q.q();
    if q.tau == 0.0 || qq == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let d = parse_d(qq, q.inst_variance, p)?;
    let shape = Shape::new(p, q.tau);

    let mut terms = Vec::new();
    for (ln_c, order) in shape.finite_terms()? {
        let (m, s) = bessel_k_scaled(Complex64::new(order, 0.0), d)?;
        terms.push((m, s + ln_c));
    }

    let (_, z_max) = shape.envelope(0.0, Z_CUTOFF.recip().ln())?;
    // Approximate magnitude of the integrand, used only as a common scale.
    let decay = FRAC_PI_2 - d.arg().abs();
    let (reference, _) = shape.envelope(-decay, 1.0)?;
    let f = |z: f64| -> Result<Complex64> {
        let (m, s) = bessel_k_scaled(Complex64::new(0.0, z), d)?;
        Ok(m * (shape.ln_weight(z)? + s - reference).exp())
    };
    let panels = (z_max / Z_PANEL).ceil() as usize;
    let h = z_max / panels as f64;
    let mut integral = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let a = h * k as f64;
        integral += quad::integrate(&f, a, a + h, 1e-13 * h, 1e-10, 20, false)?.value;
    }
    terms.push((integral / (4.0 * PI * PI), reference));

    let (m, s) = log_sum(&terms);
    finish(shape.beta, d, m, s)
}

/// Contour rotation used by the kernel representation.
const KERNEL_ALPHA: f64 = FRAC_PI_2 - FRAC_PI_4 - 0.2;
/// Margin kept between `|arg d| + α` and `π/2`.
const KERNEL_MARGIN: f64 = 0.15;
/// Largest tolerated `ln` of the cancellation factor in the kernel.
const KERNEL_MAX_CANCELLATION: f64 = 20.0;
const KERNEL_U_MAX: f64 = 25.0;
const KERNEL_H: f64 = 0.03;
const KERNEL_DROP: f64 = 40.0;
const KERNEL_Z_PANEL: f64 = 0.25;

/// Fast evaluator of the GARCH transform for a fixed `(θ, ε, τ)`.
///
/// Writing `K_ν(d) = ½∫ e^{-d cosh t - νt} dt` on the line `t = u - iα` and
/// exchanging the order of integration gives
///
/// `Ĥ = 2^{β+1}/d^β · ½ ∫ e^{-d cosh(u-iα)} M(u) du`
///
/// where `M` collects the finite sum and the order integral and does not
/// depend on `(ω, η, v)`. `M` is tabulated once on a uniform grid and the
/// `u`-integral is a trapezoid sum, so each evaluation costs one pass over
/// the grid and is a smooth function of `v`. Arguments outside the
/// kernel's range are delegated to [`garch_transform_direct`].
#[derive(Debug, Clone)]
pub struct GarchKernel {
    params: GarchParams,
    tau: f64,
    beta: f64,
    usable: bool,
    cosh_nodes: Vec<Complex64>,
    m_nodes: Vec<Complex64>,
    ln_m_abs: Vec<f64>,
    ln_m_max: f64,
    ln_scale: f64,
}

impl GarchKernel {
    pub fn new(params: &GarchParams, tau: f64) -> Result<Self> {
        let shape = Shape::new(params, tau);
        let mut kernel = GarchKernel {
            params: *params,
            tau,
            beta: shape.beta,
            usable: false,
            cosh_nodes: Vec::new(),
            m_nodes: Vec::new(),
            ln_m_abs: Vec::new(),
            ln_m_max: 0.0,
            ln_scale: 0.0,
        };
        let cancellation = 2.0 * (FRAC_PI_2 - KERNEL_ALPHA).powi(2) / shape.s2;
        if tau == 0.0 || cancellation > KERNEL_MAX_CANCELLATION {
            return Ok(kernel);
        }
        let alpha = KERNEL_ALPHA;
        let (peak, z_max) = shape.envelope(-alpha, KERNEL_DROP)?;
        let panels = (z_max / KERNEL_Z_PANEL).ceil() as usize;
        let (zs, ws) = quad::composite_rule(0.0, z_max, panels);
        let mut zw = Vec::with_capacity(zs.len());
        for (&z, &w) in zs.iter().zip(&ws) {
            let lw = shape.ln_weight(z)? - alpha * z - peak;
            zw.push((z, w * lw.exp() / (4.0 * PI * PI)));
        }

        let n = (2.0 * KERNEL_U_MAX / KERNEL_H).round() as usize;
        let u0 = -KERNEL_U_MAX;
        let mut m = vec![Complex64::new(0.0, 0.0); n + 1];
        for &(z, w) in &zw {
            let step = Complex64::new(0.0, -z * KERNEL_H).exp();
            let mut phase = Complex64::new(0.0, -z * u0).exp() * w;
            for mj in m.iter_mut() {
                *mj += phase;
                phase *= step;
            }
        }
        let finite = shape.finite_terms()?;
        let i = Complex64::i();
        let mut cosh_nodes = Vec::with_capacity(n + 1);
        for (j, mj) in m.iter_mut().enumerate() {
            let u = u0 + KERNEL_H * j as f64;
            let t = Complex64::new(u, -alpha);
            cosh_nodes.push(t.cosh());
            for &(ln_c, order) in &finite {
                *mj += (ln_c - order * u - peak + i * order * alpha).exp();
            }
        }
        kernel.ln_m_abs = m.iter().map(|x| x.norm().ln()).collect();
        kernel.ln_m_max = kernel.ln_m_abs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        kernel.m_nodes = m;
        kernel.cosh_nodes = cosh_nodes;
        kernel.ln_scale = peak;
        kernel.usable = true;
        Ok(kernel)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// True when evaluations use the tabulated kernel.
    pub fn is_tabulated(&self) -> bool {
        self.usable
    }

    pub fn eval(&self, omega: Complex64, eta: Complex64, v: f64) -> Result<Complex64> {
        let query = TransformQuery::new(omega, eta, v, self.tau)?;
        let qq = query.q();
        if self.tau == 0.0 || qq == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let d = parse_d(qq, v, &self.params)?;
        if !self.usable || d.arg().abs() + KERNEL_ALPHA > FRAC_PI_2 - KERNEL_MARGIN || d.norm() < 1e-8 {
            return garch_transform_direct(&query, &self.params);
        }
        // Re(-d·cosh(t_j)) + ln|M_j|, the log-magnitude of each term
        let log_mag = |j: usize| -(d.re * self.cosh_nodes[j].re - d.im * self.cosh_nodes[j].im) + self.ln_m_abs[j];
        let n = self.cosh_nodes.len();
        // Re(d·cosh(u - iα)) >= A e^{|u|} - |d| with A = |d|cos(|arg d| + α)/2,
        // which bounds the nodes that can matter in terms of a known term.
        let centre = n / 2;
        let a = 0.5 * d.norm() * (d.arg().abs() + KERNEL_ALPHA).cos();
        let reach = (d.norm() + self.ln_m_max - log_mag(centre) + KERNEL_DROP) / a;
        let half = if reach > 1.0 { reach.ln() } else { 0.0 };
        let span = ((half / KERNEL_H).ceil() as usize + 1).min(centre);
        let (lo, hi) = (centre - span, (centre + span).min(n - 1));
        let top = (lo..=hi).map(log_mag).fold(f64::NEG_INFINITY, f64::max);
        let cut = top - KERNEL_DROP;
        if log_mag(lo) > cut || log_mag(hi) > cut {
            return garch_transform_direct(&query, &self.params);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for j in lo..=hi {
            let e = log_mag(j);
            if e > cut {
                let c = self.cosh_nodes[j];
                let phase = -(d.re * c.im + d.im * c.re);
                sum += self.m_nodes[j] * Complex64::from_polar((e - self.ln_m_abs[j] - top).exp(), phase);
            }
        }
        let b = 0.5 * KERNEL_H * sum;
        finish(self.beta, d, b, top + self.ln_scale)
    }
}
