//! Complex Gamma function and the archimedean factor Γ_R.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2j} / (2j (2j-1)) for j = 1..=12.
const STIRLING: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
];

/// Principal-ish logarithm of Γ(z). The imaginary part may differ from the
/// principal branch by a multiple of 2π; only `exp` of the result, or real
/// parts, should be relied on.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(one - z);
    }
    let mut z = z;
    let mut shift = Complex64::new(1.0, 0.0);
    let mut shift_log = Complex64::new(0.0, 0.0);
    while z.norm() < 16.0 {
        shift *= z;
        if shift.norm() > 1e150 {
            shift_log += shift.ln();
            shift = Complex64::new(1.0, 0.0);
        }
        z += 1.0;
    }
    shift_log += shift.ln();
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING.iter() {
        series += pow * *c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift_log
}

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (e^{iπz} - e^{-iπz}) / 2i; the term with positive real exponent dominates.
    if z.im > 0.0 {
        let e = (2.0 * PI * i * z).exp();
        -i * PI * z + (Complex64::new(1.0, 0.0) - e).ln() - (2.0 * i).ln()
    } else {
        let e = (-2.0 * PI * i * z).exp();
        i * PI * z + (e - 1.0).ln() - (2.0 * i).ln()
    }
}

/// Γ(z). Returns an infinite value at the poles z = 0, -1, -2, ...
pub fn gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.im == 0.0 && z.re > 0.0 && z.re <= 170.0 && z.re == z.re.round() {
        return Complex64::new(factorial(z.re as u32 - 1), 0.0);
    }
    ln_gamma(z).exp()
}

/// Real Γ(x) for x > 0.
pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Γ_R(s) = π^{-s/2} Γ(s/2).
pub fn gamma_r(s: Complex64) -> Result<Complex64> {
    let half = s * 0.5;
    if is_nonpositive_integer(half) {
        return Err(Error::Pole {
            function: "gamma_r",
            at: format!("{s}"),
        });
    }
    Ok(ln_gamma_r(s).exp())
}

/// ln Γ_R(s), same branch caveat as [`ln_gamma`].
pub fn ln_gamma_r(s: Complex64) -> Complex64 {
    -s * 0.5 * PI.ln() + ln_gamma(s * 0.5)
}

pub(crate) fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}
