use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k(2k-1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT_TO: f64 = 15.0;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Stirling series for `Re z >= 0.5`, after upward recurrence.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    while z.re < SHIFT_TO {
        prod *= z;
        // Fold the product into a log before it can overflow.
        if prod.norm() > 1e150 {
            shift += prod.ln();
            prod = Complex64::new(1.0, 0.0);
        }
        z += 1.0;
    }
    shift += prod.ln();
    let zi = z.inv();
    let zi2 = zi * zi;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = zi;
    for c in STIRLING {
        series += pow * c;
        pow *= zi2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift
}

/// `ln sin(πz)` for `Im z >= 0`, without overflow for large `Im z`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    // sin(πz) = e^{-iπz}(1 - e^{2iπz}) / (-2i); |e^{2iπz}| <= 1.
    let e = (i * 2.0 * PI * z).exp();
    -i * PI * z + (Complex64::new(1.0, 0.0) - e).ln() - (-2.0 * i).ln()
}

/// A logarithm of Γ(z); the branch is not continuous in `z`, but
/// `exp(ln_gamma(z)) = Γ(z)`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput(format!("ln_gamma of non-finite {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole {
            function: "gamma",
            at: format!("{z}"),
        });
    }
    if z.im < 0.0 {
        return ln_gamma(z.conj()).map(|w| w.conj());
    }
    if z.re >= 0.5 {
        return Ok(ln_gamma_right(z));
    }
    // Reflection: Γ(z)Γ(1-z) = π / sin(πz).
    Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
}

/// Euler's Γ for complex argument; relative accuracy ~1e-14 for |z| <= 50.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    let lg = ln_gamma(z)?;
    if lg.re > 709.0 {
        return Err(Error::Overflow {
            function: "gamma",
            at: format!("{z}"),
        });
    }
    Ok(lg.exp())
}

/// `ln|Γ(z)|`, continuous in `z`.
pub fn ln_abs_gamma(z: Complex64) -> Result<f64> {
    ln_gamma(z).map(|w| w.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Lanczos approximation (g = 7, n = 9) with reflection, as an
    /// independent scheme.
    fn lanczos(z: Complex64) -> Complex64 {
        const G: f64 = 7.0;
        const P: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if z.re < 0.5 {
            return PI / ((PI * z).sin() * lanczos(1.0 - z));
        }
        let z = z - 1.0;
        let mut x = Complex64::new(P[0], 0.0);
        for (i, p) in P.iter().enumerate().skip(1) {
            x += *p / (z + i as f64);
        }
        let t = z + G + 0.5;
        (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn known_values() {
        let one = complex_gamma(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
        let half = complex_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((half.re - PI.sqrt()).abs() < 1e-14 && half.im.abs() < 1e-15);
        let g5 = complex_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-12);
        let gm = complex_gamma(Complex64::new(-0.5, 0.0)).unwrap();
        assert!((gm.re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn matches_lanczos_at_3_plus_4i() {
        let z = Complex64::new(3.0, 4.0);
        assert!(rel(complex_gamma(z).unwrap(), lanczos(z)) < 1e-12);
    }

    #[test]
    fn poles_and_overflow_are_distinct() {
        for n in [0.0, -1.0, -7.0] {
            assert!(matches!(complex_gamma(Complex64::new(n, 0.0)), Err(Error::Pole { .. })));
        }
        assert!(matches!(complex_gamma(Complex64::new(200.0, 0.0)), Err(Error::Overflow { .. })));
    }

    #[test]
    fn large_imaginary_part_stays_finite() {
        let lg = ln_gamma(Complex64::new(-3.3, 400.0)).unwrap();
        // |Γ(x+iy)| ~ √(2π) |y|^{x-1/2} e^{-π|y|/2}
        let approx = LN_SQRT_2PI + (-3.8) * 400f64.ln() - PI * 200.0;
        assert!((lg.re - approx).abs() < 1e-3, "{lg}");
    }

    #[test]
    fn agrees_with_lanczos_on_grid() {
        for i in -12..=12 {
            for j in -12..=12 {
                let z = Complex64::new(0.37 + 2.0 * i as f64, 1.9 * j as f64);
                if z.norm() > 25.0 {
                    continue;
                }
                let a = complex_gamma(z).unwrap();
                assert!(rel(a, lanczos(z)) < 1e-11, "z={z}: {a} vs {}", lanczos(z));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn recurrence(re in -30.0f64..30.0, im in -30.0f64..30.0) {
            let z = Complex64::new(re, im);
            prop_assume!(z.norm() <= 30.0);
            prop_assume!((z - z.re.round()).norm() >= 0.1 || z.re.round() > 0.0);
            prop_assume!((z + 1.0 - (z.re + 1.0).round()).norm() >= 0.1 || (z.re + 1.0).round() > 0.0);
            let lhs = ln_gamma(z + 1.0).unwrap();
            let rhs = ln_gamma(z).unwrap() + z.ln();
            // compare Γ values through the log difference, modulo 2πi
            let d = lhs - rhs;
            let k = (d.im / (2.0 * PI)).round();
            let err = Complex64::new(d.re, d.im - 2.0 * PI * k).norm();
            prop_assert!(err < 1e-11, "z={} err={}", z, err);
        }
    }
}
