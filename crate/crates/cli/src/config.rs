//! Run configuration: a TOML document with `model`, `rates`, `market` and
//! `contract` blocks plus optional `quadrature`, `montecarlo` and `contour`
//! overrides. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use jointvol::{ContractSpec, Contour, FloorPolicy, MarketState, McConfig, ModelSpec, QuadConfig, RatesSpec};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Transform,
    Montecarlo,
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Transform => write!(f, "transform"),
            Method::Montecarlo => write!(f, "montecarlo"),
            Method::Both => write!(f, "both"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelBlock {
    Heston {
        kappa: f64,
        theta: f64,
        epsilon: f64,
        rho: f64,
    },
    ThreeHalves {
        kappa: f64,
        theta: f64,
        epsilon: f64,
        rho: f64,
    },
    Garch {
        theta: f64,
        epsilon: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContractBlock {
    TvoCall {
        target_vol: f64,
        strike: f64,
        maturity: f64,
    },
    TvoPut {
        target_vol: f64,
        strike: f64,
        maturity: f64,
    },
    DoubleDigitalCall {
        asset_strike: f64,
        variance_strike: f64,
        maturity: f64,
    },
    VolCappedCall {
        strike: f64,
        vol_lo: f64,
        vol_hi: f64,
        maturity: f64,
    },
    VolStruckCall {
        notional: f64,
        maturity: f64,
    },
    VanillaCall {
        strike: f64,
        maturity: f64,
    },
    VanillaPut {
        strike: f64,
        maturity: f64,
    },
    DigitalCall {
        strike: f64,
        maturity: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesBlock {
    pub risk_free: f64,
    #[serde(default)]
    pub dividend_yield: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketBlock {
    pub spot: f64,
    pub inst_variance: f64,
    #[serde(default)]
    pub accrued_qv: f64,
    #[serde(default)]
    pub time: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadBlock {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_halfwidth: Option<f64>,
    pub initial_panels: Option<usize>,
    pub max_refinements: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloorBlock {
    #[default]
    FullTruncation,
    Reflection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McBlock {
    #[serde(default = "McBlock::default_paths")]
    pub n_paths: usize,
    #[serde(default = "McBlock::default_steps")]
    pub steps_per_year: f64,
    #[serde(default = "McBlock::default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub floor_policy: FloorBlock,
}

impl McBlock {
    pub const DEFAULT_PATHS: usize = 1_000_000;
    pub const DEFAULT_SEED: u64 = 2024;

    fn default_paths() -> usize {
        Self::DEFAULT_PATHS
    }

    fn default_steps() -> f64 {
        McConfig::STEPS_PER_YEAR
    }

    fn default_seed() -> u64 {
        Self::DEFAULT_SEED
    }
}

impl Default for McBlock {
    fn default() -> Self {
        Self {
            n_paths: Self::DEFAULT_PATHS,
            steps_per_year: McConfig::STEPS_PER_YEAR,
            seed: Self::DEFAULT_SEED,
            floor_policy: FloorBlock::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourBlock {
    pub k1: f64,
    pub k2: f64,
}

/// A parsed configuration file, before validation of the numbers.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub method: Method,
    /// Report destination; overrides the output directory.
    pub output: Option<PathBuf>,
    pub model: ModelBlock,
    pub rates: RatesBlock,
    pub market: MarketBlock,
    pub contract: ContractBlock,
    #[serde(default)]
    pub quadrature: QuadBlock,
    #[serde(default)]
    pub montecarlo: McBlock,
    pub contour: Option<ContourBlock>,
}

/// A configuration with every block converted to engine types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub method: Method,
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    pub rates: RatesSpec,
    pub state: MarketState,
    pub contract: ContractSpec,
    pub quad: QuadConfig,
    pub mc: McBlock,
    pub contour: Option<Contour>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_string(),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let model = match self.model {
            ModelBlock::Heston {
                kappa,
                theta,
                epsilon,
                rho,
            } => ModelSpec::heston(kappa, theta, epsilon, rho)?,
            ModelBlock::ThreeHalves {
                kappa,
                theta,
                epsilon,
                rho,
            } => ModelSpec::three_halves(kappa, theta, epsilon, rho)?,
            ModelBlock::Garch { theta, epsilon } => ModelSpec::garch(theta, epsilon)?,
        };
        let contract = self.contract.to_spec();
        contract.validate()?;
        let q = &self.quadrature;
        let d = QuadConfig::default();
        let quad = QuadConfig {
            rel_tol: q.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: q.abs_tol.unwrap_or(d.abs_tol),
            max_halfwidth: q.max_halfwidth.unwrap_or(d.max_halfwidth),
            initial_panels: q.initial_panels.unwrap_or(d.initial_panels),
            max_refinements: q.max_refinements.unwrap_or(d.max_refinements),
        };
        quad.validate()?;
        let m = &self.market;
        Ok(Resolved {
            method: self.method,
            output: self.output.clone(),
            model,
            rates: RatesSpec::new(self.rates.risk_free, self.rates.dividend_yield)?,
            state: MarketState::new(m.spot, m.inst_variance, m.accrued_qv, m.time)?,
            contract,
            quad,
            mc: self.montecarlo.clone(),
            contour: self.contour.map(|c| Contour::new(c.k1, c.k2)),
        })
    }
}

impl ContractBlock {
    pub fn to_spec(&self) -> ContractSpec {
        match *self {
            ContractBlock::TvoCall {
                target_vol,
                strike,
                maturity,
            } => ContractSpec::TvoCall {
                target_vol,
                strike,
                maturity,
            },
            ContractBlock::TvoPut {
                target_vol,
                strike,
                maturity,
            } => ContractSpec::TvoPut {
                target_vol,
                strike,
                maturity,
            },
            ContractBlock::DoubleDigitalCall {
                asset_strike,
                variance_strike,
                maturity,
            } => ContractSpec::DoubleDigitalCall {
                asset_strike,
                variance_strike,
                maturity,
            },
            ContractBlock::VolCappedCall {
                strike,
                vol_lo,
                vol_hi,
                maturity,
            } => ContractSpec::VolCappedCall {
                strike,
                vol_lo,
                vol_hi,
                maturity,
            },
            ContractBlock::VolStruckCall { notional, maturity } => ContractSpec::VolStruckCall { notional, maturity },
            ContractBlock::VanillaCall { strike, maturity } => ContractSpec::VanillaCall { strike, maturity },
            ContractBlock::VanillaPut { strike, maturity } => ContractSpec::VanillaPut { strike, maturity },
            ContractBlock::DigitalCall { strike, maturity } => ContractSpec::DigitalCall { strike, maturity },
        }
    }
}

impl Resolved {
    pub fn tau(&self) -> f64 {
        self.contract.maturity() - self.state.time
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig {
            floor_policy: match self.mc.floor_policy {
                FloorBlock::FullTruncation => FloorPolicy::FullTruncation,
                FloorBlock::Reflection => FloorPolicy::Reflection,
            },
            ..McConfig::per_year(self.mc.n_paths, self.mc.steps_per_year, self.tau(), self.mc.seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_ONE: &str = r#"
        method = "both"
        [model]
        type = "heston"
        kappa = 0.5
        theta = 0.2
        epsilon = 0.3
        rho = 0.0
        [rates]
        risk_free = 0.0
        [market]
        spot = 100.0
        inst_variance = 0.2
        [contract]
        type = "tvo-call"
        target_vol = 0.1
        strike = 100.0
        maturity = 3.0
    "#;

    #[test]
    fn parses_and_resolves() {
        let cfg = RunConfig::parse(TABLE_ONE, "inline").unwrap();
        assert_eq!(cfg.method, Method::Both);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.tau(), 3.0);
        assert_eq!(r.mc_config().n_steps, 750);
        assert_eq!(r.quad, QuadConfig::default());
    }

    #[test]
    fn unknown_contract_field_is_rejected() {
        let text = TABLE_ONE.replace("type = \"tvo-call\"", "type = \"vanilla-call\"");
        let err = RunConfig::parse(&text, "inline").unwrap_err();
        assert!(err.to_string().contains("target_vol"), "{err}");
    }

    #[test]
    fn unknown_method_is_rejected() {
        let text = TABLE_ONE.replace("\"both\"", "\"fft\"");
        assert!(RunConfig::parse(&text, "inline").is_err());
    }
}
