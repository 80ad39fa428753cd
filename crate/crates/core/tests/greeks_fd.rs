//! Contour Delta and Gamma against central differences of the contour price.

mod support;

use jointvol::{choose_contour, delta, QuadConfig};
use support::pricing::{cases, check, constant_payoff};

#[test]
fn delta_and_gamma_match_finite_differences() {
    for (name, case) in cases() {
        let c = check(name, &case);
        println!(
            "{name}: delta {:.8} (fd {:.8}), gamma {:.8} (fd {:.8}, from delta {:.8})",
            c.delta, c.fd_delta, c.gamma, c.fd_gamma, c.gamma_from_delta
        );
        assert!(c.passes(), "{name}: deviations {:?}", c.deviations());
    }
}

#[test]
fn tvo_delta_sanity_bound() {
    let (_, case) = cases().swap_remove(0);
    let k = choose_contour(&case.contract, &case.model, 3.0).unwrap();
    let d = delta(&case.model, &case.rates, &case.contract, &case.state, k, &QuadConfig::default())
        .unwrap()
        .value;
    // E[I_T] = 0.6 when v starts at θ
    let scale = 0.1 * (3.0f64 / 0.6).sqrt();
    assert!(d > 0.0 && d < scale, "{d} vs {scale}");
}

#[test]
fn constant_payoff_has_no_greeks() {
    let (v, d, g) = constant_payoff();
    println!("constant payoff: value {v:.8}, delta {d:e}, gamma {g:e}");
    assert!((v - 1.0).abs() <= 1e-4, "{v}");
    assert!(d.abs() <= 1e-4 && g.abs() <= 1e-4, "{d} {g}");
}
