use num_complex::Complex64;

use super::TransformQuery;
use crate::domain::ThreeHalvesParams;
use crate::error::{Error, Result};
use crate::specfun::{kummer_1f1_scaled, ln_gamma};

/// `Ĥ = Γ(β-α)/Γ(β) · X^α · ₁F₁(α; β; -X)` with
/// `b = (κ + ε²/2 + iρεω)/ε²`, `c = √(b² + q/ε²)`, `α = c - b`,
/// `β = 1 + 2c` and `X = 2κθ/(ε²v(e^{κθτ} - 1))`.
pub fn three_halves_transform(q: &TransformQuery, p: &ThreeHalvesParams) -> Result<Complex64> {
    if q.tau == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let i = Complex64::i();
    let eps2 = p.epsilon * p.epsilon;
    let b = (p.kappa + 0.5 * eps2 + i * p.rho * p.epsilon * q.omega) / eps2;
    let c = (b * b + q.q() / eps2).sqrt();
    let alpha = c - b;
    let beta = 1.0 + 2.0 * c;
    let kt = p.kappa * p.theta;
    let x = 2.0 * kt / (eps2 * q.inst_variance * (kt * q.tau).exp_m1());
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidInput(format!("3/2 transform scale X = {x}")));
    }
    let (m, s) = kummer_1f1_scaled(alpha, beta, Complex64::new(-x, 0.0))?;
    let ln_pref = ln_gamma(beta - alpha)? - ln_gamma(beta)? + alpha * x.ln();
    let out = m * (ln_pref + s).exp();
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(Error::Overflow {
            function: "three_halves_transform",
            at: format!("omega={}, eta={}", q.omega, q.eta),
        });
    }
    Ok(out)
}
