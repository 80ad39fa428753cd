//! Closed-form and scale-function boundary classifications over random
//! parameter sweeps, including natural-boundary violations.
//!
//! Points within 10% of the critical ratio are resampled: the numeric test
//! decides finiteness from tail decay, which becomes arbitrarily slow at the
//! critical value itself.

use jointvol::models::{closed_form_boundaries, numeric_boundaries};
use jointvol::{GarchParams, HestonParams, ModelSpec, ThreeHalvesParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const POINTS: usize = 20;

/// Points checked and how many of them have an attainable boundary.
pub type Sweep = Result<(usize, usize), String>;

fn agree(models: &[ModelSpec]) -> Sweep {
    let mut attainable = 0;
    for m in models {
        let closed = closed_form_boundaries(m);
        let (zero, inf, trace) = numeric_boundaries(m).map_err(|e| format!("{m}: {e}"))?;
        if closed != (zero, inf) {
            return Err(format!("{m}: closed form {closed:?}, numeric {:?}; {trace}", (zero, inf)));
        }
        if zero || inf {
            attainable += 1;
        }
    }
    Ok((models.len(), attainable))
}

fn away_from_critical(ratio: f64) -> bool {
    (ratio - 1.0).abs() > 0.1
}

pub fn heston_sweep() -> Sweep {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut models = Vec::new();
    while models.len() < POINTS {
        let p = HestonParams {
            kappa: rng.random_range(0.05..4.0),
            theta: rng.random_range(0.01..0.5),
            epsilon: rng.random_range(0.05..1.5),
            rho: rng.random_range(-0.9..0.9),
        };
        if away_from_critical(2.0 * p.kappa * p.theta / (p.epsilon * p.epsilon)) {
            models.push(ModelSpec::Heston(p));
        }
    }
    agree(&models)
}

pub fn three_halves_sweep() -> Sweep {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut models = Vec::new();
    while models.len() < POINTS {
        let p = ThreeHalvesParams {
            kappa: rng.random_range(-3.0..3.0),
            theta: rng.random_range(0.05..0.5),
            epsilon: rng.random_range(0.1..2.0),
            rho: rng.random_range(-0.9..0.9),
        };
        if away_from_critical(-2.0 * p.kappa / (p.epsilon * p.epsilon)) {
            models.push(ModelSpec::ThreeHalves(p));
        }
    }
    agree(&models)
}

pub fn garch_sweep() -> Sweep {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let models: Vec<ModelSpec> = (0..POINTS)
        .map(|_| {
            ModelSpec::Garch(GarchParams {
                theta: rng.random_range(-2.0..2.0),
                epsilon: rng.random_range(0.05..2.0),
            })
        })
        .collect();
    agree(&models)
}
