use std::fmt::Write as _;
use std::time::Instant;

use jointvol::{
    check_contour, choose_contour, classify_boundaries, delta, gamma, mc_price, price, simulate_terminals, Contour, MarketState,
    McEstimate, PriceResult, QuadConfig,
};

use crate::config::{Method, Resolved};
use crate::error::{CliError, Result};
use crate::report::{flag, num, sci, Report};
use crate::tables::{run_table, table_report, MC_SIGMAS};

/// Result of one command: a report, text for humans, and an optional
/// tolerance breach that turns into a nonzero exit after the report is
/// written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub human: String,
    pub breach: Option<String>,
}

pub const DELTA_TOL: f64 = 1e-3;
pub const GAMMA_TOL: f64 = 1e-2;
/// Finite-difference steps relative to spot (first and second derivative)
/// and to instantaneous variance.
pub const DELTA_STEP: f64 = 1e-4;
pub const GAMMA_STEP: f64 = 1e-3;
pub const VARIANCE_STEP: f64 = 1e-4;
/// Greeks smaller than this are compared absolutely.
pub const GREEK_FLOOR: f64 = 1e-4;

fn describe(cfg: &Resolved, r: &mut Report) {
    r.meta("model", cfg.model);
    r.meta("contract", cfg.contract);
    let s = &cfg.state;
    r.meta(
        "market",
        format!(
            "spot={} inst_variance={} accrued_qv={} time={} risk_free={} dividend_yield={}",
            s.spot, s.inst_variance, s.accrued_qv, s.time, cfg.rates.risk_free, cfg.rates.dividend_yield
        ),
    );
}

fn contour_for(cfg: &Resolved) -> Result<Contour> {
    match cfg.contour {
        Some(k) => Ok(k),
        None => Ok(choose_contour(&cfg.contract, &cfg.model, cfg.tau())?),
    }
}

fn transform_at(cfg: &Resolved, state: &MarketState, contour: Contour, quad: &QuadConfig) -> Result<PriceResult> {
    Ok(price(&cfg.model, &cfg.rates, &cfg.contract, state, contour, quad)?)
}

fn simulate(cfg: &Resolved) -> Result<McEstimate> {
    let samples = simulate_terminals(
        &cfg.model,
        &cfg.rates,
        &cfg.state,
        cfg.contract.maturity(),
        &cfg.mc_config(),
    )?;
    Ok(mc_price(&cfg.contract, &samples)?)
}

pub fn cmd_price(cfg: &Resolved) -> Result<Outcome> {
    let mut report = Report::new("price", &["quantity", "value", "error"]);
    describe(cfg, &mut report);
    report.meta("method", cfg.method);
    let mut human = String::new();
    writeln!(human, "{} under {}", cfg.contract, cfg.model).unwrap();

    let transform = if cfg.method != Method::Montecarlo {
        let t0 = Instant::now();
        let k = contour_for(cfg)?;
        let p = transform_at(cfg, &cfg.state, k, &cfg.quad)?;
        report.meta("contour", format!("k1={} k2={}", k.k1, k.k2));
        report.meta("nodes", p.nodes_used);
        report.row(vec!["transform".into(), num(p.value), sci(p.est_error)]);
        writeln!(
            human,
            "transform   {:.6} (error {:.1e}, contour k1={} k2={}, {} nodes, {:.2} s)",
            p.value,
            p.est_error,
            k.k1,
            k.k2,
            p.nodes_used,
            t0.elapsed().as_secs_f64()
        )
        .unwrap();
        Some(p)
    } else {
        None
    };

    let mc = if cfg.method != Method::Transform {
        let t0 = Instant::now();
        let m = simulate(cfg)?;
        let mc_cfg = cfg.mc_config();
        report.meta(
            "simulation",
            format!(
                "{} paths, {} steps, seed {}, {} floor",
                mc_cfg.n_paths, mc_cfg.n_steps, mc_cfg.seed, mc_cfg.floor_policy
            ),
        );
        report.row(vec!["montecarlo".into(), num(m.mean), sci(m.std_error)]);
        writeln!(
            human,
            "montecarlo  {:.6} (std error {:.1e}, {} paths, {:.2} s)",
            m.mean,
            m.std_error,
            m.n_paths,
            t0.elapsed().as_secs_f64()
        )
        .unwrap();
        Some(m)
    } else {
        None
    };

    let mut breach = None;
    if let (Some(p), Some(m)) = (transform, mc) {
        let z = (p.value - m.mean).abs() / m.std_error.hypot(p.est_error);
        let flagged = z > MC_SIGMAS;
        report.row(vec!["discrepancy_se".into(), format!("{z:.3}"), String::new()]);
        report.meta("discrepancy flagged", flagged);
        writeln!(human, "discrepancy {z:.2} standard errors, flagged {flagged}").unwrap();
        if flagged {
            breach = Some(format!("transform and simulation differ by {z:.2} standard errors"));
        }
    }
    Ok(Outcome { report, human, breach })
}

/// Deviation relative to the reference, or absolute below [`GREEK_FLOOR`].
pub fn greek_deviation(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(GREEK_FLOOR)
}

pub fn cmd_greeks(cfg: &Resolved) -> Result<Outcome> {
    if cfg.method == Method::Montecarlo {
        return Err(CliError::Usage(
            "greeks are computed by contour integration only; set method = \"transform\" or \"both\"".into(),
        ));
    }
    // differences amplify quadrature noise by 1/h², so everything here runs
    // at a tight tolerance
    let quad = QuadConfig {
        rel_tol: cfg.quad.rel_tol.min(1e-10),
        abs_tol: cfg.quad.abs_tol.min(1e-13),
        ..cfg.quad
    };
    let k = contour_for(cfg)?;
    let s = cfg.state.spot;
    let at = |state: MarketState| transform_at(cfg, &state, k, &quad).map(|p| p.value);
    let spot = |x: f64| MarketState { spot: x, ..cfg.state };

    let (m, r, c) = (&cfg.model, &cfg.rates, &cfg.contract);
    let d = delta(m, r, c, &cfg.state, k, &quad)?.value;
    let g = gamma(m, r, c, &cfg.state, k, &quad)?.value;
    let value = at(cfg.state)?;

    let h = DELTA_STEP * s;
    let fd_delta = (at(spot(s + h))? - at(spot(s - h))?) / (2.0 * h);
    let h = GAMMA_STEP * s;
    let fd_gamma = (at(spot(s + h))? - 2.0 * value + at(spot(s - h))?) / (h * h);
    let h = DELTA_STEP * s;
    let delta_at = |x: f64| delta(m, r, c, &spot(x), k, &quad).map(|p| p.value);
    let gamma_of_delta = (delta_at(s + h)? - delta_at(s - h)?) / (2.0 * h);
    let v = cfg.state.inst_variance;
    let hv = VARIANCE_STEP * v;
    let var_state = |x: f64| MarketState {
        inst_variance: x,
        ..cfg.state
    };
    let dv = (at(var_state(v + hv))? - at(var_state(v - hv))?) / (2.0 * hv);

    let mut report = Report::new(
        "greeks",
        &["quantity", "contour", "finite_difference", "deviation", "tolerance", "check"],
    );
    describe(cfg, &mut report);
    report.meta("contour", format!("k1={} k2={}", k.k1, k.k2));
    report.meta("value", num(value));
    let checks = [
        ("delta", d, fd_delta, DELTA_TOL),
        ("gamma", g, fd_gamma, GAMMA_TOL),
        ("gamma_vs_delta", g, gamma_of_delta, DELTA_TOL),
    ];
    let mut human = String::new();
    writeln!(human, "{} under {}: value {value:.6}", cfg.contract, cfg.model).unwrap();
    let mut failed = Vec::new();
    for (name, contour, fd, tol) in checks {
        let dev = greek_deviation(contour, fd);
        let ok = dev <= tol;
        if !ok {
            failed.push(name);
        }
        report.row(vec![
            name.into(),
            format!("{contour:.10e}"),
            format!("{fd:.10e}"),
            sci(dev),
            tol.to_string(),
            flag(ok),
        ]);
        writeln!(
            human,
            "{name:<15} contour {contour:>14.8e}  finite difference {fd:>14.8e}  deviation {dev:.1e}{}",
            if ok { "" } else { "  FLAGGED" }
        )
        .unwrap();
    }
    report.row(vec![
        "dv_dvariance".into(),
        String::new(),
        format!("{dv:.10e}"),
        String::new(),
        String::new(),
        String::new(),
    ]);
    writeln!(human, "{:<15} finite difference {dv:>14.8e}", "dV/dv").unwrap();
    let breach = (!failed.is_empty()).then(|| format!("{} outside tolerance", failed.join(", ")));
    Ok(Outcome { report, human, breach })
}

pub fn cmd_table(id: u8, mc_paths: usize, seed: u64) -> Result<Outcome> {
    let run = run_table(id, mc_paths, seed, &QuadConfig::default())?;
    let report = table_report(&run, mc_paths, seed);
    let mut human = String::new();
    writeln!(human, "Table {}: {}", run.table.id, run.table.title).unwrap();
    for row in &run.rows {
        let mc = match (row.mc, row.mc_z()) {
            (Some(m), Some(z)) => format!("  mc {:.4} ± {:.4} ({z:.2} se)", m.mean, m.std_error),
            _ => String::new(),
        };
        writeln!(
            human,
            "{} = {:<6} reference {:<8} transform {:.4} ({:.2} s){mc}  {}",
            run.table.parameter,
            row.param,
            row.reference,
            row.transform.value,
            row.seconds,
            if run.row_ok(row) { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    let breach = (!run.all_ok()).then(|| format!("table {id} has rows outside tolerance"));
    Ok(Outcome { report, human, breach })
}

pub fn cmd_validate(cfg: &Resolved) -> Result<Outcome> {
    let mut report = Report::new("validate", &["check", "result"]);
    describe(cfg, &mut report);
    let b = classify_boundaries(&cfg.model)?;
    let mut human = String::new();
    writeln!(human, "model {}: natural-boundary condition holds", cfg.model).unwrap();
    report.row(vec!["natural_boundaries".into(), "pass".into()]);
    report.row(vec![
        "zero_attainable".into(),
        b.zero_attainable.to_string(),
    ]);
    report.row(vec![
        "infinity_attainable".into(),
        b.infinity_attainable.to_string(),
    ]);
    writeln!(human, "boundaries: {} ({})", b.method, b.detail).unwrap();
    if cfg.method != Method::Montecarlo {
        let k = contour_for(cfg)?;
        check_contour(&cfg.model, &cfg.rates, &cfg.contract, &cfg.state, k)?;
        report.row(vec!["contour".into(), format!("k1={} k2={}", k.k1, k.k2)]);
        writeln!(human, "contour k1={} k2={} admissible", k.k1, k.k2).unwrap();
    } else {
        cfg.mc_config().validate()?;
    }
    writeln!(human, "method {}: configuration valid", cfg.method).unwrap();
    Ok(Outcome {
        report,
        human,
        breach: None,
    })
}
