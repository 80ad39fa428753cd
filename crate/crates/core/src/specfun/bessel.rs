use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::quad;

/// Relative drop below the peak of the integrand at which the range is cut.
const RANGE_DROP: f64 = 46.0;
const SCAN_STEP: f64 = 0.05;
const SCAN_LIMIT: f64 = 60.0;

/// `K_ν(x) = m·e^{s}`, returned as `(m, s)`.
///
/// For `Re x > 0` uses `K_ν(x) = ½∫ e^{-x cosh t - νt} dt` on the line
/// `t = u - iα`; the shift removes the `e^{-π|Im ν|/2}` scale that otherwise
/// cancels inside the integral for large imaginary order.
pub fn bessel_k_scaled(nu: Complex64, x: Complex64) -> Result<(Complex64, f64)> {
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("bessel_k at x = 0".into()));
    }
    if !(nu.re.is_finite() && nu.im.is_finite() && x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::InvalidInput(format!("bessel_k({nu}, {x}) with non-finite input")));
    }
    // K is even in the order.
    let nu = if nu.im < 0.0 || (nu.im == 0.0 && nu.re < 0.0) { -nu } else { nu };
    if x.re > 0.0 {
        return right_half_plane(nu, x);
    }
    continuation(nu, x)
}

fn right_half_plane(nu: Complex64, x: Complex64) -> Result<(Complex64, f64)> {
    let phi = x.arg();
    let z = nu.im;
    // Move towards the saddle of the phase, sinh t = -ν/x, staying inside
    // the sector where the integrand decays.
    let saddle = (z / x.norm()).min(1.0).asin();
    let alpha = saddle.min(FRAC_PI_2 - phi.abs() - 1.0 / (1.0 + z)).max(0.0);
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let g = |u: f64| -(x.re * ca * u.cosh() + x.im * sa * u.sinh()) - nu.re * u;

    let n = (2.0 * SCAN_LIMIT / SCAN_STEP) as i64;
    let mut gmax = f64::NEG_INFINITY;
    let mut vals = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let u = -SCAN_LIMIT + SCAN_STEP * k as f64;
        let v = g(u);
        gmax = gmax.max(v);
        vals.push((u, v));
    }
    if !gmax.is_finite() {
        return Err(Error::Overflow {
            function: "bessel_k",
            at: format!("({nu}, {x})"),
        });
    }
    let keep: Vec<f64> = vals.iter().filter(|(_, v)| *v >= gmax - RANGE_DROP).map(|(u, _)| *u).collect();
    let lo = keep.first().copied().unwrap_or(0.0) - SCAN_STEP;
    let hi = keep.last().copied().unwrap_or(0.0) + SCAN_STEP;
    if lo <= -SCAN_LIMIT || hi >= SCAN_LIMIT {
        return Err(Error::NonConvergence {
            what: format!("bessel_k({nu}, {x}) integrand does not decay"),
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }

    let shift = Complex64::new(0.0, -alpha);
    let f = |u: f64| -> Result<Complex64> {
        let t = Complex64::new(u, 0.0) + shift;
        Ok((-x * t.cosh() - nu * u - gmax).exp())
    };
    // Sub-panels no wider than the local oscillation scale of the phase.
    let width = (hi - lo) / 0.25;
    let panels = (width.ceil() as usize).max(1);
    let h = (hi - lo) / panels as f64;
    // Rounding in the exponent sets the attainable absolute accuracy.
    let umax = lo.abs().max(hi.abs());
    let noise = 4e-16 * (1.0 + x.norm() * umax.cosh() + nu.norm() * umax + gmax.abs());
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = lo + h * p as f64;
        let r = quad::integrate(&f, a, a + h, noise * h, 1e-14, 30, false)?;
        sum += r.value;
    }
    // e^{-ν(u - iα)} = e^{-νu}·e^{iαν}
    let phase = Complex64::new(0.0, alpha * nu.re).exp();
    Ok((0.5 * sum * phase, gmax - alpha * z))
}

/// Power series of `I_ν(w)`, for moderate `|w|`.
fn bessel_i(nu: Complex64, w: Complex64) -> Result<Complex64> {
    if w.norm() > 500.0 {
        return Err(Error::Overflow {
            function: "bessel_i",
            at: format!("({nu}, {w})"),
        });
    }
    let nu = if nu.im == 0.0 && nu.re < 0.0 && nu.re == nu.re.round() { -nu } else { nu };
    let mut term = (nu * (w * 0.5).ln() - ln_gamma(nu + 1.0)?).exp();
    let q = w * w * 0.25;
    let mut sum = term;
    for k in 0..10_000 {
        term *= q / ((k as f64 + 1.0) * (nu + k as f64 + 1.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && k as f64 > q.norm().sqrt() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: format!("bessel_i({nu}, {w}) series"),
        estimate: sum.re,
        error: term.norm(),
    })
}

/// Analytic continuation to `Re x <= 0`.
fn continuation(nu: Complex64, x: Complex64) -> Result<(Complex64, f64)> {
    let i = Complex64::i();
    if x.re < 0.0 {
        let w = -x;
        let (m, s) = right_half_plane(nu, w)?;
        let k = m * s.exp();
        let iw = bessel_i(nu, w)?;
        // K_ν(w e^{±iπ}) = e^{∓iπν} K_ν(w) ∓ iπ I_ν(w)
        let v = if x.im >= 0.0 {
            (-i * PI * nu).exp() * k - i * PI * iw
        } else {
            (i * PI * nu).exp() * k + i * PI * iw
        };
        return Ok((v, 0.0));
    }
    let sin = (nu * PI).sin();
    if sin.norm() < 1e-8 {
        return Err(Error::InvalidInput(format!(
            "bessel_k on the imaginary axis needs non-integer order, got {nu}"
        )));
    }
    let v = (bessel_i(-nu, x)? - bessel_i(nu, x)?) * FRAC_PI_2 / sin;
    Ok((v, 0.0))
}

/// Modified Bessel function of the second kind for complex order and argument.
pub fn bessel_k(nu: Complex64, x: Complex64) -> Result<Complex64> {
    let (m, s) = bessel_k_scaled(nu, x)?;
    if m == Complex64::new(0.0, 0.0) {
        return Ok(m);
    }
    let ln_mag = m.norm().ln() + s;
    if ln_mag > 709.0 {
        return Err(Error::Overflow {
            function: "bessel_k",
            at: format!("({nu}, {x})"),
        });
    }
    if ln_mag < -745.0 {
        return Err(Error::Underflow {
            function: "bessel_k",
            at: format!("({nu}, {x})"),
        });
    }
    Ok(m * s.exp())
}
