//! Structural identities of the fundamental transforms.

use jointvol::models::{transform, TransformQuery};
use jointvol::{GarchParams, HestonParams, ModelSpec, ThreeHalvesParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<f64, String>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn heston() -> HestonParams {
    HestonParams {
        kappa: 0.5,
        theta: 0.2,
        epsilon: 0.3,
        rho: -0.4,
    }
}

pub fn three_halves() -> ThreeHalvesParams {
    ThreeHalvesParams {
        kappa: 1.0,
        theta: 0.2,
        epsilon: 0.5,
        rho: -0.5,
    }
}

pub fn garch() -> GarchParams {
    GarchParams {
        theta: 0.1,
        epsilon: 0.4,
    }
}

pub fn models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::Heston(heston()),
        ModelSpec::ThreeHalves(three_halves()),
        ModelSpec::Garch(garch()),
    ]
}

pub fn h(m: &ModelSpec, omega: Complex64, eta: Complex64, v: f64, tau: f64) -> Complex64 {
    transform(&TransformQuery::new(omega, eta, v, tau).unwrap(), m).unwrap()
}

/// Random point inside the model's strip: GARCH needs
/// `Im ω - (Im ω)² - 2 Im η > 0`.
pub fn sample_point(m: &ModelSpec, rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    let s = rng.random_range(-4.0..4.0);
    let t = rng.random_range(-6.0..6.0);
    match m {
        ModelSpec::Garch(_) => {
            let k1: f64 = rng.random_range(0.1..0.9);
            let bound = 0.5 * (k1 - k1 * k1);
            let k2 = rng.random_range(-1.0..0.9 * bound);
            (c(s, k1), c(t, k2))
        }
        _ => (c(s, rng.random_range(-1.0..2.5)), c(t, rng.random_range(-0.5..1.0))),
    }
}

fn within(worst: &mut f64, dev: f64, tol: f64, what: impl FnOnce() -> String) -> Result<(), String> {
    *worst = worst.max(dev);
    if dev <= tol {
        Ok(())
    } else {
        Err(format!("{}: deviation {dev:e} > {tol:e}", what()))
    }
}

/// `Ĥ(·, ·, v, 0) = 1` to 1e-12 at 100 random points per model.
pub fn initial_condition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for m in models() {
        for _ in 0..100 {
            let (w, e) = sample_point(&m, &mut rng);
            let v = h(&m, w, e, rng.random_range(0.01..1.0), 0.0);
            within(&mut worst, (v - 1.0).norm(), 1e-12, || format!("{m} at {w}, {e}"))?;
        }
    }
    Ok(worst)
}

/// `Ĥ(i, 0, v, τ) = 1` to 1e-8 on a grid of `v` and `τ`.
pub fn martingale_point() -> Check {
    let mut worst: f64 = 0.0;
    for m in models() {
        for v in [0.05, 0.2, 0.5] {
            for tau in [0.25, 1.0, 3.0, 5.0] {
                let x = h(&m, Complex64::i(), c(0.0, 0.0), v, tau);
                within(&mut worst, (x - 1.0).norm(), 1e-8, || format!("{m} v={v} tau={tau}"))?;
            }
        }
    }
    Ok(worst)
}

/// `Ĥ → 1` as both frequencies approach zero.
pub fn zero_frequency_limit() -> Check {
    let w = c(1e-6, 1e-6);
    let mut worst: f64 = 0.0;
    for m in models() {
        // GARCH moments need Im η < (Im ω - (Im ω)²)/2, so η sits below ω there
        let e = match m {
            ModelSpec::Garch(_) => c(1e-6, 2.5e-7),
            _ => c(1e-6, 1e-6),
        };
        let x = h(&m, w, e, 0.2, 1.0);
        within(&mut worst, (x - 1.0).norm(), 1e-4, || format!("{m}"))?;
    }
    Ok(worst)
}

/// `Ĥ(-ω̄, -η̄) = conj Ĥ(ω, η)`.
pub fn conjugate_symmetry() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for m in models() {
        for _ in 0..20 {
            let (w, e) = sample_point(&m, &mut rng);
            let a = h(&m, w, e, 0.2, 1.5);
            let b = h(&m, -w.conj(), -e.conj(), 0.2, 1.5);
            let dev = (a - b.conj()).norm() / a.norm().max(1.0);
            within(&mut worst, dev, 1e-12, || format!("{m} at {w}, {e}"))?;
        }
    }
    Ok(worst)
}

/// Residual of `∂τĤ = (α(v) - iωρ√v β(v)) ∂vĤ + ½β(v)² ∂vvĤ - (q v/2) Ĥ`
/// by central differences, with `|Ĥ|`.
pub fn residual_at(m: &ModelSpec, w: Complex64, e: Complex64, v: f64, tau: f64) -> (f64, f64) {
    let i = Complex64::i();
    let hv = 1e-4 * v;
    let ht = 1e-4 * tau;
    let f = |v: f64, t: f64| h(m, w, e, v, t);
    let centre = f(v, tau);
    let d_tau = (f(v, tau + ht) - f(v, tau - ht)) / (2.0 * ht);
    let d_v = (f(v + hv, tau) - f(v - hv, tau)) / (2.0 * hv);
    let d_vv = (f(v + hv, tau) - 2.0 * centre + f(v - hv, tau)) / (hv * hv);
    let beta = m.variance_diffusion(v);
    let drift = m.variance_drift(v) - i * w * m.rho() * v.sqrt() * beta;
    let q = w * w - i * w + 2.0 * i * e;
    let rhs = drift * d_v + 0.5 * beta * beta * d_vv - 0.5 * q * v * centre;
    ((d_tau - rhs).norm(), centre.norm())
}

/// Relative PDE residual at 50 random points per model, at most 1e-4.
pub fn pde_residual() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for m in models() {
        for _ in 0..50 {
            let (w, e) = sample_point(&m, &mut rng);
            let v = rng.random_range(0.05..0.5);
            // the GARCH kernel loses about e^{2/(ε²τ)} in round-off, which a
            // finite difference in τ amplifies; keep ε²τ >= 0.24 there
            let tau = match m {
                ModelSpec::Garch(_) => rng.random_range(1.5..3.0),
                _ => rng.random_range(0.3..3.0),
            };
            let (res, size) = residual_at(&m, w, e, v, tau);
            within(&mut worst, res / size, 1e-4, || {
                format!("{m} at w={w}, e={e}, v={v}, tau={tau}")
            })?;
        }
    }
    Ok(worst)
}
