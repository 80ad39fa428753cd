use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum number of series terms before reporting non-convergence.
pub const TERM_BUDGET: usize = 10_000;

const RESCALE_AT: f64 = 1e200;

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, x.im, &mut self.comp.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }
}

fn two_sum(s: f64, x: f64, c: &mut f64) -> f64 {
    let t = s + x;
    if s.abs() >= x.abs() {
        *c += (s - t) + x;
    } else {
        *c += (x - t) + s;
    }
    t
}

fn is_nonpositive_integer(b: Complex64) -> bool {
    b.im == 0.0 && b.re <= 0.0 && b.re == b.re.round()
}

/// Taylor series `Σ (a)_n/(b)_n z^n/n!` as mantissa and log-scale.
fn series(a: Complex64, b: Complex64, z: Complex64) -> Result<(Complex64, f64)> {
    let mut acc = Compensated::default();
    let mut term = Complex64::new(1.0, 0.0);
    let mut ln_scale = 0.0;
    acc.add(term);
    let mut small = 0;
    for n in 0..TERM_BUDGET {
        let nf = n as f64;
        let ratio = (a + nf) / ((b + nf) * (nf + 1.0)) * z;
        term *= ratio;
        if term == Complex64::new(0.0, 0.0) {
            // terminating series (a a nonpositive integer) or underflow
            return Ok((acc.value(), ln_scale));
        }
        acc.add(term);
        if term.norm() > RESCALE_AT {
            term /= RESCALE_AT;
            acc.scale(1.0 / RESCALE_AT);
            ln_scale += RESCALE_AT.ln();
        }
        let s = acc.value().norm();
        if term.norm() <= 1e-17 * s && ratio.norm() < 1.0 {
            small += 1;
            if small >= 2 {
                return Ok((acc.value(), ln_scale));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        what: format!("1F1({a}; {b}; {z}) series"),
        estimate: acc.value().re,
        error: term.norm(),
    })
}

/// `₁F₁(a; b; z) = m·e^{s}` returned as `(m, s)` so that very large values
/// remain representable.
pub fn kummer_1f1_scaled(a: Complex64, b: Complex64, z: Complex64) -> Result<(Complex64, f64)> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole {
            function: "1F1",
            at: format!("b = {b}"),
        });
    }
    if z.re < 0.0 {
        // Kummer transformation keeps the series free of cancellation.
        let (m, s) = series(b - a, b, -z)?;
        let phase = Complex64::new(0.0, z.im).exp();
        return Ok((m * phase, s + z.re));
    }
    series(a, b, z)
}

/// Confluent hypergeometric function `₁F₁(a; b; z)`.
pub fn kummer_1f1(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    let (m, s) = kummer_1f1_scaled(a, b, z)?;
    let ln_mag = m.norm().ln() + s;
    if ln_mag > 709.0 {
        return Err(Error::Overflow {
            function: "1F1",
            at: format!("({a}, {b}, {z})"),
        });
    }
    Ok(m * s.exp())
}
