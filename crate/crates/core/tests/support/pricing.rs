//! Contour Greeks against finite differences, and contour invariance.

use jointvol::{
    choose_contour, delta, gamma, price, ContractSpec, Contour, MarketState, ModelSpec, QuadConfig, RatesSpec,
};

pub struct Case {
    pub model: ModelSpec,
    pub rates: RatesSpec,
    pub contract: ContractSpec,
    pub state: MarketState,
}

/// Differences of prices amplify quadrature noise by 1/h and 1/h²; the
/// tolerances here keep that noise well under the checked accuracy.
pub fn tight() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        ..QuadConfig::default()
    }
}

pub fn heston(rho: f64) -> ModelSpec {
    ModelSpec::heston(0.5, 0.2, 0.3, rho).unwrap()
}

pub fn cases() -> Vec<(&'static str, Case)> {
    let table1 = |contract| Case {
        model: heston(0.0),
        rates: RatesSpec::new(0.0, 0.0).unwrap(),
        contract,
        state: MarketState::new(100.0, 0.2, 0.0, 0.0).unwrap(),
    };
    vec![
        (
            "tvo call, K=100",
            table1(ContractSpec::TvoCall {
                target_vol: 0.1,
                strike: 100.0,
                maturity: 3.0,
            }),
        ),
        (
            "tvo put",
            table1(ContractSpec::TvoPut {
                target_vol: 0.1,
                strike: 100.0,
                maturity: 3.0,
            }),
        ),
        (
            "double digital",
            Case {
                model: heston(0.2),
                rates: RatesSpec::new(0.1, 0.01).unwrap(),
                contract: ContractSpec::DoubleDigitalCall {
                    asset_strike: 100.0,
                    variance_strike: 0.24,
                    maturity: 2.5,
                },
                state: MarketState::new(120.0, 0.2, 0.5, 1.0).unwrap(),
            },
        ),
        (
            "vol capped",
            Case {
                model: heston(-0.3),
                rates: RatesSpec::new(0.07, 0.0).unwrap(),
                contract: ContractSpec::VolCappedCall {
                    strike: 100.0,
                    vol_lo: 0.2,
                    vol_hi: 0.5,
                    maturity: 2.0,
                },
                state: MarketState::new(110.0, 0.2, 0.0, 0.0).unwrap(),
            },
        ),
        (
            "vol struck",
            Case {
                model: heston(-0.5),
                rates: RatesSpec::new(0.05, 0.02).unwrap(),
                contract: ContractSpec::VolStruckCall {
                    notional: 150.0,
                    maturity: 5.0,
                },
                state: MarketState::new(50.0, 0.2, 0.18, 1.0).unwrap(),
            },
        ),
        (
            "vanilla call",
            table1(ContractSpec::VanillaCall {
                strike: 100.0,
                maturity: 3.0,
            }),
        ),
        (
            "vanilla put",
            table1(ContractSpec::VanillaPut {
                strike: 100.0,
                maturity: 3.0,
            }),
        ),
        (
            "digital",
            table1(ContractSpec::DigitalCall {
                strike: 100.0,
                maturity: 3.0,
            }),
        ),
    ]
}

pub fn at_spot(case: &Case, spot: f64) -> MarketState {
    MarketState { spot, ..case.state }
}

pub fn value(case: &Case, spot: f64) -> f64 {
    let tau = case.contract.maturity() - case.state.time;
    let k = choose_contour(&case.contract, &case.model, tau).unwrap();
    price(&case.model, &case.rates, &case.contract, &at_spot(case, spot), k, &tight())
        .unwrap()
        .value
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub struct GreekCheck {
    pub name: &'static str,
    pub delta: f64,
    pub fd_delta: f64,
    pub gamma: f64,
    pub fd_gamma: f64,
    pub gamma_from_delta: f64,
}

impl GreekCheck {
    pub fn deviations(&self) -> (f64, f64, f64) {
        (
            rel(self.delta, self.fd_delta),
            rel(self.gamma, self.fd_gamma),
            rel(self.gamma, self.gamma_from_delta),
        )
    }

    /// Delta within 1e-3, Gamma within 1e-2 of the price differences and
    /// within 1e-3 of the difference of Delta.
    pub fn passes(&self) -> bool {
        let (d, g, gd) = self.deviations();
        d <= 1e-3 && g <= 1e-2 && gd <= 1e-3
    }
}

/// Delta from `(V(S(1+h)) - V(S(1-h)))/(2Sh)` with `h = 1e-4`; Gamma from
/// the second difference with `h = 1e-3` and from differencing Delta.
pub fn check(name: &'static str, case: &Case) -> GreekCheck {
    let s = case.state.spot;
    let tau = case.contract.maturity() - case.state.time;
    let k = choose_contour(&case.contract, &case.model, tau).unwrap();
    let d = delta(&case.model, &case.rates, &case.contract, &case.state, k, &tight())
        .unwrap()
        .value;
    let g = gamma(&case.model, &case.rates, &case.contract, &case.state, k, &tight())
        .unwrap()
        .value;

    let h = 1e-4;
    let fd_delta = (value(case, s * (1.0 + h)) - value(case, s * (1.0 - h))) / (2.0 * s * h);
    let h = 1e-3;
    let (up, mid, down) = (value(case, s * (1.0 + h)), value(case, s), value(case, s * (1.0 - h)));
    let fd_gamma = (up - 2.0 * mid + down) / (s * h).powi(2);

    let delta_at = |spot: f64| {
        delta(&case.model, &case.rates, &case.contract, &at_spot(case, spot), k, &tight())
            .unwrap()
            .value
    };
    let h = 1e-4;
    let gamma_from_delta = (delta_at(s * (1.0 + h)) - delta_at(s * (1.0 - h))) / (2.0 * s * h);
    GreekCheck {
        name,
        delta: d,
        fd_delta,
        gamma: g,
        fd_gamma,
        gamma_from_delta,
    }
}

/// Value, Delta and Gamma of the double digital with `K₁ = 1e-6` and
/// `K₂ = 1e-9`, whose payoff is 1 on almost every path.
pub fn constant_payoff() -> (f64, f64, f64) {
    let m = heston(0.0);
    let rates = RatesSpec::new(0.0, 0.0).unwrap();
    let state = MarketState::new(100.0, 0.2, 0.0, 0.0).unwrap();
    let contract = ContractSpec::DoubleDigitalCall {
        asset_strike: 1e-6,
        variance_strike: 1e-9,
        maturity: 3.0,
    };
    let k = choose_contour(&contract, &m, 3.0).unwrap();
    let cfg = QuadConfig::default();
    let v = price(&m, &rates, &contract, &state, k, &cfg).unwrap().value;
    let d = delta(&m, &rates, &contract, &state, k, &cfg).unwrap().value;
    let g = gamma(&m, &rates, &contract, &state, k, &cfg).unwrap().value;
    (v, d, g)
}

/// Largest pairwise relative spread of the K = 100 TVO price over
/// `k₁ ∈ {1.25, 1.5, 2}`, `k₂ ∈ {0.25, 0.5, 1}`, with the nine prices.
pub fn contour_spread() -> (f64, Vec<(Contour, f64)>) {
    let (_, case) = cases().swap_remove(0);
    let mut values = Vec::new();
    for k1 in [1.25, 1.5, 2.0] {
        for k2 in [0.25, 0.5, 1.0] {
            let k = Contour::new(k1, k2);
            let p = price(&case.model, &case.rates, &case.contract, &case.state, k, &QuadConfig::default()).unwrap();
            values.push((k, p.value));
        }
    }
    let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    ((hi - lo) / lo, values)
}
