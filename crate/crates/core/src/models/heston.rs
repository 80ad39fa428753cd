use num_complex::Complex64;

use super::{TransformQuery, REGULARITY_TOL};
use crate::domain::HestonParams;
use crate::error::{Error, Result};

/// Below this `|d|τ` the closed form is replaced by its series in `d`.
const SMALL_D: f64 = 1e-7;

struct Parts {
    b: Complex64,
    d: Complex64,
    q: Complex64,
    /// `(b+d) - (b-d)e^{-dτ}`, the denominator of `D`.
    g: Complex64,
}

fn parts(omega: Complex64, eta: Complex64, tau: f64, p: &HestonParams) -> Parts {
    let i = Complex64::i();
    let q = super::q_coefficient(omega, eta);
    let b = p.kappa + i * p.epsilon * p.rho * omega;
    let d = (b * b + p.epsilon * p.epsilon * q).sqrt();
    let g = (b + d) - (b - d) * (-d * tau).exp();
    Parts { b, d, q, g }
}

pub(super) fn is_regular(q: &TransformQuery, p: &HestonParams) -> bool {
    if q.tau == 0.0 {
        return true;
    }
    let Parts { b, d, g, .. } = parts(q.omega, q.eta, q.tau, p);
    if (d * q.tau).norm() < SMALL_D {
        // g ≈ d(2 + bτ)
        return (2.0 + b * q.tau).norm() >= REGULARITY_TOL * (2.0 + b.norm() * q.tau);
    }
    g.norm() >= REGULARITY_TOL * ((b - d).norm() + (b + d).norm())
}

/// Exponents `(C, D)` with `Ĥ = exp(C + vD)`.
///
/// With `b = κ + iερω`, `d = √(b² + ε²q)` and `c = (b+d)/(b-d)`, the
/// logarithmic term `ln((e^{-dτ} - c)/(1 - c))` is written as
/// `ln(((b+d) - (b-d)e^{-dτ})/(2d))`, which is the same quantity but stays
/// finite at `q = 0` (where `c` is infinite) and never overflows.
pub fn heston_exponents(
    omega: Complex64,
    eta: Complex64,
    tau: f64,
    p: &HestonParams,
) -> Result<(Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    if tau == 0.0 {
        return Ok((zero, zero));
    }
    let Parts { b, d, q, g } = parts(omega, eta, tau, p);
    let k = p.kappa * p.theta / (p.epsilon * p.epsilon);
    if (d * tau).norm() < SMALL_D {
        let ratio = 1.0 + (b - d) * tau * 0.5 - (b - d) * d * tau * tau * 0.25;
        if ratio.norm() < REGULARITY_TOL {
            return Err(Error::Singular(format!("heston at omega={omega}, eta={eta}")));
        }
        let dd = -q * tau * (1.0 - d * tau * 0.5) / (2.0 * ratio);
        let cc = k * (tau * (b - d) - 2.0 * ratio.ln());
        return Ok((cc, dd));
    }
    if g.norm() < REGULARITY_TOL * ((b - d).norm() + (b + d).norm()) {
        return Err(Error::Singular(format!("heston at omega={omega}, eta={eta}")));
    }
    let e = (-d * tau).exp();
    let dd = -q * (1.0 - e) / g;
    let cc = k * (tau * (b - d) - 2.0 * (g / (2.0 * d)).ln());
    Ok((cc, dd))
}

pub fn heston_transform(q: &TransformQuery, p: &HestonParams) -> Result<Complex64> {
    if q.tau == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (c, d) = heston_exponents(q.omega, q.eta, q.tau, p)?;
    Ok((c + q.inst_variance * d).exp())
}
