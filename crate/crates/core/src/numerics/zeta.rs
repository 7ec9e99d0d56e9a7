//! Riemann zeta, Hurwitz zeta and Dirichlet beta via Euler–Maclaurin.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::gamma;
use crate::error::{Error, Result};

/// B_{2j} / (2j)! for j = 1..=15.
const BERNOULLI_OVER_FACT: [f64; 15] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
    77683.0 / 14101100039391805440000.0,
    -236364091.0 / 1693824136731743669452800000.0,
    657931.0 / 186134520519971831808000000.0,
    -3392780147.0 / 37893265687455865519472640000000.0,
    1723168255201.0 / 759790291646040068357842010112000000.0,
];

/// ζ(s, a) minus the polar term (N + a)^{1-s}/(s-1), where N is returned.
fn hurwitz_regular(s: Complex64, a: f64) -> (Complex64, usize) {
    let n = (2.0 * s.norm()).max(30.0).ceil() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let big = n as f64 + a;
    let ln_big = big.ln();
    let head = (-s * ln_big).exp();
    sum += head * 0.5;
    // Σ B_{2j}/(2j)! (s)_{2j-1} big^{-s-2j+1}
    let mut rising = s;
    let mut pow = head / big;
    let inv2 = 1.0 / (big * big);
    for (j, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = rising * pow * *b;
        sum += term;
        let m = 2 * j as u32 + 1;
        rising *= (s + m as f64) * (s + (m + 1) as f64);
        pow *= inv2;
    }
    (sum, n)
}

/// Hurwitz zeta ζ(s, a) for a > 0, Re s > -1 (accuracy degrades for very
/// negative real parts; use [`zeta`] there).
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "hurwitz_zeta",
            at: "1".into(),
        });
    }
    let (reg, n) = hurwitz_regular(s, a);
    let big = n as f64 + a;
    Ok(reg + ((1.0 - s) * big.ln()).exp() / (s - 1.0))
}

/// Riemann zeta with analytic continuation.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "zeta",
            at: "1".into(),
        });
    }
    if s.re < -0.5 {
        // ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s)
        let one_minus = 1.0 - s;
        let factor = (s * 2f64.ln()).exp()
            * ((s - 1.0) * PI.ln()).exp()
            * (s * PI * 0.5).sin()
            * gamma(one_minus);
        return Ok(factor * zeta(one_minus)?);
    }
    hurwitz_zeta(s, 1.0)
}

/// Dirichlet beta β(s) = Σ (-1)^n (2n+1)^{-s}, entire.
pub fn dirichlet_beta(s: Complex64) -> Complex64 {
    // β(s) = 4^{-s} (ζ(s,1/4) - ζ(s,3/4)); the two polar terms are combined
    // so that s = 1 is not special.
    let (r1, n) = hurwitz_regular(s, 0.25);
    let (r3, _) = hurwitz_regular(s, 0.75);
    let a = n as f64 + 0.25;
    let b = n as f64 + 0.75;
    let w = 1.0 - s;
    // (a^w - b^w) / (s - 1) = a^w * exprel(w ln(b/a)) * ln(b/a)
    let l = (b / a).ln();
    let polar = (w * a.ln()).exp() * exprel(w * l) * l;
    (-s * 4f64.ln()).exp() * (r1 - r3 + polar)
}

/// (e^z - 1) / z.
pub(crate) fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..10 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// ξ(s) = π^{-s/2} Γ(s/2) ζ(s), with poles at 0 and 1.
pub fn completed_zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(0.0, 0.0) || s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "completed_zeta",
            at: format!("{s}"),
        });
    }
    // Use the functional equation to stay in Re s >= 1/2 where both factors are tame.
    let s = if s.re < 0.5 { 1.0 - s } else { s };
    Ok(super::gamma::gamma_r(s)? * zeta(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zeta_special_values() {
        assert_relative_eq!(
            zeta(r(2.0)).unwrap().re,
            PI * PI / 6.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(zeta(r(0.0)).unwrap().re, -0.5, max_relative = 1e-15);
        assert_relative_eq!(
            zeta(r(4.0)).unwrap().re,
            PI.powi(4) / 90.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(zeta(r(-1.0)).unwrap().re, -1.0 / 12.0, max_relative = 1e-13);
        assert_relative_eq!(
            zeta(r(0.5)).unwrap().re,
            -1.460_354_508_809_586_8,
            max_relative = 1e-14
        );
        assert!(zeta(r(-2.0)).unwrap().norm() < 1e-15);
        assert!(matches!(zeta(r(1.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn zeta_first_zero() {
        let z = zeta(Complex64::new(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.norm() < 1e-12, "{z}");
    }

    #[test]
    fn beta_special_values() {
        assert_relative_eq!(dirichlet_beta(r(1.0)).re, PI / 4.0, max_relative = 1e-15);
        // Catalan's constant
        assert_relative_eq!(
            dirichlet_beta(r(2.0)).re,
            0.915_965_594_177_219,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            dirichlet_beta(r(3.0)).re,
            PI.powi(3) / 32.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(dirichlet_beta(r(0.0)).re, 0.5, max_relative = 1e-14);
        // direct alternating sum with averaging at s = 1.3
        let s = 1.3f64;
        let mut partial = 0.0;
        let mut prev = 0.0;
        for n in 0..200_000u32 {
            prev = partial;
            partial += if n % 2 == 0 { 1.0 } else { -1.0 } / (2.0 * n as f64 + 1.0).powf(s);
        }
        assert_relative_eq!(
            dirichlet_beta(r(s)).re,
            0.5 * (partial + prev),
            max_relative = 1e-10
        );
    }

    #[test]
    fn completed_zeta_functional_equation() {
        for s in [
            Complex64::new(0.3, 2.0),
            Complex64::new(1.7, -0.4),
            Complex64::new(2.2, 5.0),
        ] {
            let a = completed_zeta(s).unwrap();
            let b = completed_zeta(1.0 - s).unwrap();
            assert!((a - b).norm() < 1e-13 * a.norm());
        }
        // residue 1 at s = 1
        let h = 1e-6;
        let v = completed_zeta(r(1.0 + h)).unwrap().re * h;
        assert_relative_eq!(v, 1.0, max_relative = 1e-5);
    }
}
