//! Euler simulation of `(S_T, I_T)` used as an independent oracle for the
//! transform pricer and for the fundamental transforms themselves.
//!
//! Every path draws from its own ChaCha stream keyed by `(seed, path)`, so
//! results do not depend on the number of worker threads.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::domain::{MarketState, ModelSpec, RatesSpec};
use crate::error::{Error, Result};
use crate::payoffs::ContractSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FloorPolicy {
    /// Use `max(v, 0)` in drift, diffusion and the variance integral.
    #[default]
    FullTruncation,
    /// Reflect the updated variance at zero.
    Reflection,
}

impl fmt::Display for FloorPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FloorPolicy::FullTruncation => write!(f, "full-truncation"),
            FloorPolicy::Reflection => write!(f, "reflection"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    /// Time steps over the whole horizon.
    pub n_steps: usize,
    pub seed: u64,
    pub floor_policy: FloorPolicy,
}

impl McConfig {
    pub const STEPS_PER_YEAR: f64 = 250.0;

    /// Configuration with `steps_per_year` steps per unit of time, at least
    /// one step.
    pub fn per_year(n_paths: usize, steps_per_year: f64, tau: f64, seed: u64) -> Self {
        Self {
            n_paths,
            n_steps: ((steps_per_year * tau).round() as usize).max(1),
            seed,
            floor_policy: FloorPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.n_steps == 0 {
            return Err(Error::InvalidInput(format!(
                "need at least one path and one step, got {} and {}",
                self.n_paths, self.n_steps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

/// Empirical transform with componentwise standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfEstimate {
    pub value: Complex64,
    pub std_error_re: f64,
    pub std_error_im: f64,
}

/// Terminal spot and total quadratic variation per path.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub spot: Vec<f64>,
    pub qv: Vec<f64>,
    pub model: ModelSpec,
    pub config: McConfig,
    pub start: MarketState,
    pub rates: RatesSpec,
    pub tau: f64,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.spot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spot.is_empty()
    }

    /// The same paths started from a different accrued variance; `I_T`
    /// moves by the difference since the increment does not depend on it.
    pub fn with_accrued_qv(&self, accrued_qv: f64) -> Result<Samples> {
        let start = MarketState {
            accrued_qv,
            ..self.start
        };
        start.validate()?;
        let shift = accrued_qv - self.start.accrued_qv;
        Ok(Samples {
            qv: self.qv.iter().map(|y| y + shift).collect(),
            start,
            spot: self.spot.clone(),
            ..*self
        })
    }

    /// Writes the sample set as comma-separated text with a `#` header.
    pub fn write_delimited<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# model: {}", self.model)?;
        writeln!(
            w,
            "# paths: {}, steps: {}, seed: {}, floor: {}",
            self.config.n_paths, self.config.n_steps, self.config.seed, self.config.floor_policy
        )?;
        writeln!(
            w,
            "# start: S={}, v={}, I={}, t={}; tau={}",
            self.start.spot, self.start.inst_variance, self.start.accrued_qv, self.start.time, self.tau
        )?;
        writeln!(w, "spot,qv")?;
        for (s, y) in self.spot.iter().zip(&self.qv) {
            writeln!(w, "{s},{y}")?;
        }
        Ok(())
    }
}

fn check_dynamics(model: &ModelSpec) -> Result<()> {
    let (params, rho): (Vec<f64>, f64) = match *model {
        ModelSpec::Heston(p) => (vec![p.kappa, p.theta, p.epsilon], p.rho),
        ModelSpec::ThreeHalves(p) => (vec![p.kappa, p.theta, p.epsilon], p.rho),
        ModelSpec::Garch(p) => (vec![p.theta, p.epsilon], 0.0),
    };
    if params.iter().any(|x| !x.is_finite()) || model.vol_of_vol() < 0.0 || !(-1.0..=1.0).contains(&rho) {
        return Err(Error::ModelRejected(format!("{model}: parameters outside simulable range")));
    }
    Ok(())
}

/// One path: log-Euler for `S` with the variance frozen over each step,
/// Euler for `v`, trapezoid for `I`.
fn path(model: &ModelSpec, carry: f64, start: &MarketState, dt: f64, cfg: &McConfig, index: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let rho = model.rho();
    let rho_c = (1.0 - rho * rho).sqrt();
    let sqrt_dt = dt.sqrt();
    let mut x = start.spot.ln();
    let mut v = start.inst_variance;
    let mut qv = start.accrued_qv;
    for _ in 0..cfg.n_steps {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let zv = rho * z1 + rho_c * z2;
        let v_pos = v.max(0.0);
        x += (carry - 0.5 * v_pos) * dt + (v_pos * dt).sqrt() * z1;
        let next = v_pos + model.variance_drift(v_pos) * dt + model.variance_diffusion(v_pos) * sqrt_dt * zv;
        v = match cfg.floor_policy {
            FloorPolicy::FullTruncation => v + (next - v_pos),
            FloorPolicy::Reflection => next.abs(),
        };
        qv += 0.5 * (v_pos + v.max(0.0)) * dt;
    }
    (x.exp(), qv)
}

/// Simulates `n_paths` terminal pairs `(S_T, I_T)` at absolute time
/// `horizon`.
pub fn simulate_terminals(
    model: &ModelSpec,
    rates: &RatesSpec,
    start: &MarketState,
    horizon: f64,
    cfg: &McConfig,
) -> Result<Samples> {
    check_dynamics(model)?;
    cfg.validate()?;
    let tau = start.time_to(horizon)?;
    let dt = tau / cfg.n_steps as f64;
    let carry = rates.carry();
    let pairs: Vec<(f64, f64)> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|k| path(model, carry, start, dt, cfg, k))
        .collect();
    let (spot, qv) = pairs.into_iter().unzip();
    Ok(Samples {
        spot,
        qv,
        model: *model,
        config: *cfg,
        start: *start,
        rates: *rates,
        tau,
    })
}

/// Sum in a fixed binary-tree order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Discounted sample mean of the payoff with its standard error.
pub fn mc_price(contract: &ContractSpec, samples: &Samples) -> Result<McEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample set".into()));
    }
    let mut values = Vec::with_capacity(samples.len());
    let mut bad = 0usize;
    let mut reason = String::new();
    for (&s, &y) in samples.spot.iter().zip(&samples.qv) {
        match contract.evaluate(s, y) {
            Ok(v) => values.push(v),
            Err(Error::UndefinedPayoff { reason: r, .. }) => {
                bad += 1;
                reason = r;
            }
            Err(e) => return Err(e),
        }
    }
    if bad > 0 {
        return Err(Error::UndefinedPayoff { count: bad, reason });
    }
    let disc = (-samples.rates.risk_free * samples.tau).exp();
    let (mean, se) = mean_and_error(&values);
    Ok(McEstimate {
        mean: disc * mean,
        std_error: disc * se,
        n_paths: values.len(),
    })
}

/// Share of the total carried by the largest 1% of `weights`.
fn top_share(weights: &mut [f64]) -> f64 {
    let total: f64 = pairwise_sum(weights);
    if total == 0.0 || !total.is_finite() {
        return 1.0;
    }
    let k = (weights.len() / 100).max(1);
    let cut = weights.len() - k;
    weights.select_nth_unstable_by(cut, |a, b| a.total_cmp(b));
    pairwise_sum(&weights[cut..]) / total
}

/// Sample estimate of `E[exp(-iω·Z - iη·J)]` with
/// `Z = ln(S_T/S_t) - (r-d)τ` and `J = I_T - I_t`, the quantity computed by
/// [`crate::models::transform`].
pub fn empirical_cf(samples: &Samples, omega: Complex64, eta: Complex64) -> Result<CfEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample set".into()));
    }
    let i = Complex64::i();
    let x0 = samples.start.spot.ln() + samples.rates.carry() * samples.tau;
    let terms: Vec<Complex64> = samples
        .spot
        .par_iter()
        .zip(&samples.qv)
        .map(|(&s, &y)| {
            let z = s.ln() - x0;
            let j = y - samples.start.accrued_qv;
            (-i * omega * z - i * eta * j).exp()
        })
        .collect();
    let mut weights: Vec<f64> = terms.iter().map(|t| t.norm()).collect();
    let share = top_share(&mut weights);
    if share > 0.5 {
        return Err(Error::VarianceExplosion { share: 100.0 * share });
    }
    let re: Vec<f64> = terms.iter().map(|t| t.re).collect();
    let im: Vec<f64> = terms.iter().map(|t| t.im).collect();
    let (mr, sr) = mean_and_error(&re);
    let (mi, si) = mean_and_error(&im);
    Ok(CfEstimate {
        value: Complex64::new(mr, mi),
        std_error_re: sr,
        std_error_im: si,
    })
}
