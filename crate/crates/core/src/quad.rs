//! Panel Gauss–Legendre quadrature for smooth complex integrands on
//! finite intervals and half-lines.

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Order of the panel rule.
pub const GL_ORDER: usize = 15;

/// Tolerances and truncation controls shared by all contour integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the truncation point of each real axis.
    pub max_halfwidth: f64,
    /// Number of panels spanning `max_halfwidth`; fixes the panel width.
    pub initial_panels: usize,
    /// Maximum bisection depth inside a panel.
    pub max_refinements: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_halfwidth: 200.0,
            initial_panels: 64,
            max_refinements: 12,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_halfwidth > 0.0
            && self.max_halfwidth.is_finite()
            && self.initial_panels >= 1
            && self.max_refinements >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid quadrature settings: {self:?}")))
        }
    }

    pub fn panel_width(&self) -> f64 {
        self.max_halfwidth / self.initial_panels as f64
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn eval_nodes<F>(f: &F, xs: &[f64], parallel: bool) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if parallel {
        xs.par_iter().map(|&x| f(x)).collect()
    } else {
        xs.iter().map(|&x| f(x)).collect()
    }
}

fn panel_nodes(a: f64, b: f64) -> Vec<f64> {
    let (x, _) = gl15();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().map(|&t| c + h * t).collect()
}

fn panel_sum(a: f64, b: f64, vals: &[Complex64]) -> Complex64 {
    panel_sums(a, b, vals).0
}

/// Panel estimate together with the quadrature of `|f|`, which sets the
/// round-off floor of the estimate.
fn panel_sums(a: f64, b: f64, vals: &[Complex64]) -> (Complex64, f64) {
    let (_, w) = gl15();
    let h = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (wi, vi) in w.iter().zip(vals) {
        s += vi * *wi;
        l1 += wi * vi.norm();
    }
    (s * h, l1 * h.abs())
}

/// Single 15-point panel.
pub fn gl_panel<F>(f: &F, a: f64, b: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let vals = eval_nodes(f, &panel_nodes(a, b), false)?;
    Ok(panel_sum(a, b, &vals))
}

/// Result of one adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub nodes: usize,
    /// Furthest abscissa reached (for half-line integrals).
    pub extent: f64,
}

struct Adaptive<'a, F> {
    f: &'a F,
    max_depth: usize,
    parallel: bool,
}

impl<F> Adaptive<'_, F>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    /// Bisection: accept when the whole-panel and two-half estimates agree.
    fn run(&self, a: f64, b: f64, whole: Complex64, tol: f64, depth: usize) -> Result<Integral> {
        let m = 0.5 * (a + b);
        let mut xs = panel_nodes(a, m);
        xs.extend(panel_nodes(m, b));
        let vals = eval_nodes(self.f, &xs, self.parallel)?;
        let (left, l1_left) = panel_sums(a, m, &vals[..GL_ORDER]);
        let (right, l1_right) = panel_sums(m, b, &vals[GL_ORDER..]);
        let refined = left + right;
        let err = (refined - whole).norm();
        let tol = tol.max(ROUNDOFF * (l1_left + l1_right));
        let nodes = 2 * GL_ORDER;
        if !refined.re.is_finite() || !refined.im.is_finite() {
            return Err(Error::NonConvergence {
                what: format!("non-finite integrand on [{a}, {b}]"),
                estimate: f64::NAN,
                error: f64::INFINITY,
            });
        }
        if err <= tol {
            return Ok(Integral {
                value: refined,
                error: err,
                nodes,
                extent: b,
            });
        }
        if depth >= self.max_depth {
            return Err(Error::NonConvergence {
                what: format!("panel [{a}, {b}]"),
                estimate: refined.re,
                error: err,
            });
        }
        let l = self.run(a, m, left, 0.5 * tol, depth + 1)?;
        let r = self.run(m, b, right, 0.5 * tol, depth + 1)?;
        Ok(Integral {
            value: l.value + r.value,
            error: l.error + r.error,
            nodes: nodes + l.nodes + r.nodes,
            extent: b,
        })
    }
}

const ROUNDOFF: f64 = 1e-14;

/// Adaptive integral over the finite interval `[a, b]` to the tolerance
/// `max(abs_tol, rel_tol·|estimate|)`.
pub fn integrate<F>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_refinements: usize,
    parallel: bool,
) -> Result<Integral>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let whole = {
        let vals = eval_nodes(f, &panel_nodes(a, b), parallel)?;
        panel_sum(a, b, &vals)
    };
    let tol = abs_tol.max(rel_tol * whole.norm());
    let driver = Adaptive {
        f,
        max_depth: max_refinements,
        parallel,
    };
    let mut out = driver.run(a, b, whole, tol, 1)?;
    out.nodes += GL_ORDER;
    Ok(out)
}

/// Integral over `[start, start + direction·∞)` by marching fixed-width
/// panels outward. Stops once two consecutive panels each contribute less
/// than `rel_tol/10` of the running sum (or less than `abs_floor`), or when
/// the distance from `start` reaches `cfg.max_halfwidth`; in the latter case
/// the last panel's size is added to the error as a tail estimate.
pub fn integrate_ray<F>(
    f: &F,
    start: f64,
    direction: f64,
    cfg: &QuadConfig,
    abs_floor: f64,
    parallel: bool,
) -> Result<Integral>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let width = cfg.panel_width();
    let sign = direction.signum();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut nodes = 0;
    let mut quiet = 0;
    let mut k = 0usize;
    loop {
        let a = start + sign * width * k as f64;
        let b = start + sign * width * (k + 1) as f64;
        let (lo, hi) = if sign > 0.0 { (a, b) } else { (b, a) };
        let abs = (0.1 * cfg.rel_tol * sum.norm()).max(0.1 * abs_floor);
        let p = integrate(f, lo, hi, abs, 0.1 * cfg.rel_tol, cfg.max_refinements, parallel)?;
        sum += p.value;
        error += p.error;
        nodes += p.nodes;
        let last = p.value.norm();
        k += 1;
        let extent = width * k as f64;
        if last <= 0.1 * cfg.rel_tol * sum.norm() || last <= abs_floor {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 2 {
            break;
        }
        if extent >= cfg.max_halfwidth * (1.0 - 1e-12) {
            error += last;
            break;
        }
    }
    Ok(Integral {
        value: sum,
        error,
        nodes,
        extent: width * k as f64,
    })
}

/// Integral over the whole real line as two rays from `centre`.
pub fn integrate_line<F>(f: &F, centre: f64, cfg: &QuadConfig, abs_floor: f64, parallel: bool) -> Result<Integral>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let r = integrate_ray(f, centre, 1.0, cfg, abs_floor, parallel)?;
    let l = integrate_ray(f, centre, -1.0, cfg, abs_floor, parallel)?;
    Ok(Integral {
        value: r.value + l.value,
        error: r.error + l.error,
        nodes: r.nodes + l.nodes,
        extent: r.extent.max(l.extent),
    })
}

/// Fixed composite Gauss–Legendre rule on `[a, b]` with `panels` panels;
/// returns abscissae and weights. Used where a smooth dependence on
/// parameters matters more than adaptivity.
pub fn composite_rule(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gl15();
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * GL_ORDER);
    let mut ws = Vec::with_capacity(panels * GL_ORDER);
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(w) {
            xs.push(c + 0.5 * h * xi);
            ws.push(0.5 * h * wi);
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(GL_ORDER);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // degree 28 is exact for 15 points
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let f = |x: f64| Ok(Complex64::new(0.0, 40.0 * x).exp());
        let r = integrate(&f, 0.0, 3.0, 1e-12, 0.0, 12, false).unwrap();
        let exact = (Complex64::new(0.0, 120.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn ray_integrates_exponential_tail() {
        let f = |x: f64| Ok(c((-x).exp()));
        let r = integrate_ray(&f, 0.0, 1.0, &QuadConfig::default(), 0.0, false).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.extent < 200.0);
    }

    #[test]
    fn line_gaussian() {
        let f = |x: f64| Ok(c((-x * x).exp()));
        let r = integrate_line(&f, 0.0, &QuadConfig::default(), 0.0, true).unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn composite_weights_sum_to_length() {
        let (_, w) = composite_rule(-1.0, 4.0, 7);
        assert!((w.iter().sum::<f64>() - 5.0).abs() < 1e-13);
    }
}
