//! Upper incomplete gamma function Γ(a, x) for complex a and x > 0.

use num_complex::Complex64;

use super::gamma::{gamma, is_nonpositive_integer, ln_gamma};
use super::zeta::{exprel, zeta};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt.
pub fn upper_incomplete_gamma(a: Complex64, x: f64) -> Result<Complex64> {
    Ok(ln_upper_incomplete_gamma(a, x)?.exp())
}

/// A logarithm of Γ(a, x); only its exponential and real part are meaningful.
/// `exp` of this never overflows where Γ(a, x) itself would.
pub fn ln_upper_incomplete_gamma(a: Complex64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "incomplete gamma needs x > 0, got {x}"
        )));
    }
    if x >= 1.5 && x >= a.re + 1.0 {
        if let Some(h) = continued_fraction(a, x) {
            return Ok(h.ln() + a * x.ln() - x);
        }
    }
    let m = (-a.re).round();
    if m >= 0.0 && (a + m).norm() < 0.1 && x < 1.5 {
        return Ok(near_pole(a, m as u32, x).ln());
    }
    Ok(series(a, x).ln())
}

/// Modified Lentz evaluation of e^x x^{-a} Γ(a, x).
fn continued_fraction(a: Complex64, x: f64) -> Option<Complex64> {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = Complex64::new(x + 1.0, 0.0) - a;
    let mut c = Complex64::new(1e300, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..5000 {
        let an = -(i as f64) * (Complex64::new(i as f64, 0.0) - a);
        b += 2.0;
        d = an * d + b;
        if d.norm() < 1e-300 {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        d = d.inv();
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            return Some(h);
        }
    }
    None
}

/// Γ(a) − γ(a, x) with γ(a, x) = x^a e^{-x} Σ_k x^k / (a)_{k+1}.
fn series(a: Complex64, x: f64) -> Complex64 {
    let mut term = a.inv();
    let mut sum = term;
    for k in 1..4000 {
        term *= x / (a + k as f64);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    let lower = (a * x.ln() - x).exp() * sum;
    if is_nonpositive_integer(a) {
        unreachable!("poles are routed to near_pole");
    }
    gamma(a) - lower
}

/// Γ(a, x) for a within 0.1 of −m and x < 1.5: evaluate at δ = a + m with
/// the pole of Γ(δ) cancelled analytically, then recur downward.
fn near_pole(a: Complex64, m: u32, x: f64) -> Complex64 {
    let delta = a + m as f64;
    let lnx = x.ln();
    // Γ(δ) − x^δ/δ = (Γ(1+δ) − 1)/δ − (x^δ − 1)/δ
    let l_over_delta = ln_gamma_1p_over(delta);
    let l = l_over_delta * delta;
    let head = exprel(l) * l_over_delta - exprel(delta * lnx) * lnx;
    // remaining terms of the alternating lower series
    let xd = (delta * lnx).exp();
    let mut fact = 1.0;
    let mut pow = 1.0;
    let mut tail = Complex64::new(0.0, 0.0);
    for k in 1..200 {
        fact *= k as f64;
        pow *= -x;
        let t = pow / fact / (delta + k as f64);
        tail += t;
        if t.norm() < 1e-18 * tail.norm().max(1e-300) {
            break;
        }
    }
    let mut value = head - xd * tail;
    // Γ(b−1, x) = (Γ(b, x) − x^{b−1} e^{−x}) / (b−1)
    let mut b = delta;
    for _ in 0..m {
        let bm1 = b - 1.0;
        value = (value - (bm1 * lnx - x).exp()) / bm1;
        b = bm1;
    }
    value
}

/// ln Γ(1+δ)/δ for |δ| < 0.1 from the Taylor series −γ + Σ_{k≥2} ζ(k)(−δ)^{k−1}/k.
fn ln_gamma_1p_over(delta: Complex64) -> Complex64 {
    if delta.norm() == 0.0 {
        return Complex64::new(-EULER_GAMMA, 0.0);
    }
    if delta.norm() > 0.1 {
        return ln_gamma(delta + 1.0) / delta;
    }
    let mut sum = Complex64::new(-EULER_GAMMA, 0.0);
    let mut pow = Complex64::new(-1.0, 0.0);
    for k in 2..=24u32 {
        pow *= -delta;
        let z = zeta(Complex64::new(k as f64, 0.0))
            .expect("zeta at integer k >= 2")
            .re;
        sum += pow * (z / k as f64);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::exp_sinh;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Γ(a, x) = x^a ∫_0^∞ exp(a u − x e^u) du, integrated in u ≥ 0 pieces.
    fn oracle(a: Complex64, x: f64) -> Complex64 {
        let f = |t: f64| -> Complex64 { ((a - 1.0) * (x + t).ln() - (x + t)).exp() };
        exp_sinh(f, 0.0, 1e-14, 12).unwrap().value
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(
            upper_incomplete_gamma(c(1.0, 0.0), 1.0).unwrap().re,
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            upper_incomplete_gamma(c(1.0, 0.0), 1e-12).unwrap().re,
            1.0,
            max_relative = 1e-11
        );
        for x in [0.2, 1.0, 3.0, 30.0] {
            // Γ(2, x) = (1 + x) e^{-x}
            let v = upper_incomplete_gamma(c(2.0, 0.0), x).unwrap().re;
            assert_relative_eq!(v, (1.0 + x) * (-x).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn half_against_quadrature() {
        let v = upper_incomplete_gamma(c(0.5, 0.0), 2.0).unwrap();
        let o = oracle(c(0.5, 0.0), 2.0);
        assert_relative_eq!(v.re, o.re, max_relative = 1e-13);
        // erfc link: Γ(1/2, x) = √π erfc(√x); erfc(√2) = 0.0455002638963584...
        assert_relative_eq!(
            v.re,
            std::f64::consts::PI.sqrt() * 0.045_500_263_896_358_4,
            max_relative = 1e-13
        );
    }

    #[test]
    fn complex_order_against_quadrature() {
        for (a, x) in [
            (c(0.5, 3.0), 0.7),
            (c(0.5, -1.2), 2.5),
            (c(2.3, 4.0), 6.0),
            (c(-1.7, 0.4), 0.9),
            (c(-3.2, 1.0), 4.0),
        ] {
            let v = upper_incomplete_gamma(a, x).unwrap();
            let o = oracle(a, x);
            assert!(
                (v - o).norm() <= 1e-12 * o.norm(),
                "a={a} x={x}: {v} vs {o}"
            );
        }
    }

    #[test]
    fn near_nonpositive_integers() {
        // Γ(0, x) = E1(x); E1(1) = 0.21938393439552029
        assert_relative_eq!(
            upper_incomplete_gamma(c(0.0, 0.0), 1.0).unwrap().re,
            0.219_383_934_395_520_3,
            max_relative = 1e-14
        );
        for (a, x) in [
            (c(-1.0, 0.0), 0.5),
            (c(-2.0 + 1e-9, 0.0), 1.2),
            (c(0.03, 0.02), 0.3),
            (c(-3.05, 0.0), 0.8),
        ] {
            let v = upper_incomplete_gamma(a, x).unwrap();
            let o = oracle(a, x);
            assert!(
                (v - o).norm() <= 1e-12 * o.norm(),
                "a={a} x={x}: {v} vs {o}"
            );
        }
    }

    #[test]
    fn continuity_across_branches() {
        let a = c(0.8, 0.5);
        let lo = upper_incomplete_gamma(a, 1.5 - 1e-15).unwrap();
        let hi = upper_incomplete_gamma(a, 1.5 + 1e-15).unwrap();
        assert!((lo - hi).norm() < 1e-12 * lo.norm(), "{lo} {hi}");
    }

    #[test]
    fn log_form_survives_underflow() {
        let l = ln_upper_incomplete_gamma(c(0.5, 0.0), 2000.0).unwrap();
        assert!(l.re < -1990.0 && l.re.is_finite());
    }
}
