//! Real-analytic Eisenstein series for SL_2(Z) from the Fourier expansion
//!
//! E*(z,s) = ξ(2s) y^s + ξ(2−2s) y^{1−s}
//!         + 4√y Σ_{n≥1} n^{s−1/2} σ_{1−2s}(n) K_{s−1/2}(2πny) cos(2πnx),
//!
//! where ξ(s) = Γ_R(s) ζ(s) and E* = ξ(2s) E.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_k;
use crate::numerics::zeta::completed_zeta;
use crate::symmetric_space::UpperHalfPoint;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Value of E*(z, s) together with the number of Fourier terms used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisensteinEval {
    pub x: f64,
    pub y: f64,
    pub s: Complex64,
    pub value: Complex64,
    pub n_fourier_terms: usize,
}

/// Fourier data of E*(x + iy, s) at fixed y and s: the constant term and
/// the cosine coefficients, so that many x can be evaluated cheaply.
#[derive(Debug, Clone, PartialEq)]
pub struct EisensteinProfile {
    pub y: f64,
    pub s: Complex64,
    pub constant: Complex64,
    /// coefficients of cos(2πnx), n = 1, 2, ...
    pub cosine: Vec<Complex64>,
}

impl EisensteinProfile {
    pub fn new(y: f64, s: Complex64) -> Result<Self> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("y = {y} must be positive")));
        }
        check_poles(s)?;
        let constant = constant_term(y, s)?;
        let order = s - 0.5;
        let sqrt_y = y.sqrt();
        let mut cosine = Vec::new();
        let mut small = 0;
        let mut n = 1usize;
        // exponents of the divisor sum may grow |n^{s−1/2} σ_{1−2s}(n)| like n^{|Re s − 1/2|}
        let growth = (s.re - 0.5).abs();
        loop {
            let arg = TAU * n as f64 * y;
            let k = bessel_k(order, arg)?;
            let coeff = 4.0
                * sqrt_y
                * ((order * (n as f64).ln()).exp())
                * divisor_sigma(n, 1.0 - 2.0 * s)
                * k.value;
            cosine.push(coeff);
            let bound = 4.0 * sqrt_y * (n as f64).powf(growth + 1.0) * k.value.norm();
            let scale = constant.norm().max(1e-300);
            if arg > 30.0 && (bound < 1e-18 * scale || k.underflow) {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
            n += 1;
            if n > 100_000 {
                return Err(Error::Truncation {
                    needed: n,
                    available: 100_000,
                });
            }
        }
        Ok(Self {
            y,
            s,
            constant,
            cosine,
        })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let cos1 = (TAU * x).cos();
        // cos(nθ) by the Chebyshev recurrence
        let mut c_prev = 1.0;
        let mut c = cos1;
        let mut sum = self.constant;
        for a in &self.cosine {
            sum += *a * c;
            let next = 2.0 * cos1 * c - c_prev;
            c_prev = c;
            c = next;
        }
        sum
    }
}

fn check_poles(s: Complex64) -> Result<()> {
    if s == Complex64::new(0.0, 0.0) || s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "eisenstein_star_gl2",
            at: format!("{s}"),
        });
    }
    Ok(())
}

/// σ_w(n) = Σ_{d | n} d^w.
fn divisor_sigma(n: usize, w: Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += (w * (d as f64).ln()).exp();
            let e = n / d;
            if e != d {
                total += (w * (e as f64).ln()).exp();
            }
        }
        d += 1;
    }
    total
}

/// ξ(2s) y^s + ξ(2−2s) y^{1−s}, continuous through s = 1/2.
pub fn constant_term(y: f64, s: Complex64) -> Result<Complex64> {
    check_poles(s)?;
    let delta = s - 0.5;
    if delta.norm() < 1e-4 {
        // Even in s − 1/2: use the limit plus the quadratic term.
        let c0 = constant_term_limit(y);
        let h = 1e-3;
        let c2 = (direct_constant(y, Complex64::new(0.5 + h, 0.0))? - c0) / (h * h);
        return Ok(c0 + c2 * delta * delta);
    }
    direct_constant(y, s)
}

fn direct_constant(y: f64, s: Complex64) -> Result<Complex64> {
    let lny = y.ln();
    Ok(completed_zeta(2.0 * s)? * (s * lny).exp()
        + completed_zeta(2.0 - 2.0 * s)? * ((1.0 - s) * lny).exp())
}

/// Constant term at s = 1/2: √y (log y + γ − log 4π).
fn constant_term_limit(y: f64) -> Complex64 {
    Complex64::new(y.sqrt() * (y.ln() + EULER_GAMMA - (4.0 * PI).ln()), 0.0)
}

/// E*(z, s) for an n = 2 point with y ≥ 0.1.
pub fn eisenstein_star_gl2(z: &UpperHalfPoint, s: Complex64) -> Result<EisensteinEval> {
    let (x, y) = gl2_coords(z)?;
    let profile = EisensteinProfile::new(y, s)?;
    Ok(EisensteinEval {
        x,
        y,
        s,
        value: profile.eval(x),
        n_fourier_terms: profile.cosine.len(),
    })
}

/// Uncompleted E(z, s) = E*(z, s) / ξ(2s).
pub fn eisenstein_gl2(z: &UpperHalfPoint, s: Complex64) -> Result<Complex64> {
    Ok(eisenstein_star_gl2(z, s)?.value / completed_zeta(2.0 * s)?)
}

fn gl2_coords(z: &UpperHalfPoint) -> Result<(f64, f64)> {
    if z.n() != 2 {
        return Err(Error::Domain(
            "GL(2) Eisenstein series needs an n = 2 point".into(),
        ));
    }
    let y = z.y()[0];
    if y < 0.1 {
        return Err(Error::Domain(format!("y = {y} below 0.1")));
    }
    Ok((z.x_entry(0, 1), y))
}

/// Residue of s ↦ F(s) at s = 1 from symmetric differences (s−1)F(s) at
/// 1 ± h, 1 ± h/2, combined by Richardson extrapolation.
fn residue_at_one(f: impl Fn(Complex64) -> Result<Complex64>) -> Result<f64> {
    let sym = |h: f64| -> Result<f64> {
        let a = f(Complex64::new(1.0 + h, 0.0))?.re * h;
        let b = f(Complex64::new(1.0 - h, 0.0))?.re * (-h);
        Ok(0.5 * (a + b))
    };
    let h = 2e-3;
    let r1 = sym(h)?;
    let r2 = sym(h / 2.0)?;
    Ok((4.0 * r2 - r1) / 3.0)
}

/// Residue of E(z, s) at s = 1 (expected 3/π for every z).
pub fn eisenstein_residue_gl2(z: &UpperHalfPoint) -> Result<f64> {
    gl2_coords(z)?;
    residue_at_one(|s| eisenstein_gl2(z, s))
}

/// Residue of E*(z, s) at s = 1 (expected 1/2).
pub fn eisenstein_star_residue_gl2(z: &UpperHalfPoint) -> Result<f64> {
    gl2_coords(z)?;
    residue_at_one(|s| Ok(eisenstein_star_gl2(z, s)?.value))
}

/// Fit of |E*(x + iy, 1/2)| ≤ C √y (1 + |log y|) over a sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalLineFit {
    pub constant: f64,
    /// the sample attaining the constant
    pub argmax: (f64, f64),
    /// largest ratio over the top decade of sampled heights
    pub top_decade: f64,
    pub samples: usize,
}

/// Sample y log-uniformly on [y_lo, y_hi] and x uniformly on [0, 1].
pub fn critical_line_fit(y_lo: f64, y_hi: f64, ny: usize, nx: usize) -> Result<CriticalLineFit> {
    if !(y_lo >= 0.1 && y_hi > y_lo && ny >= 2 && nx >= 1) {
        return Err(Error::Domain(
            "need 0.1 ≤ y_lo < y_hi and at least two heights".into(),
        ));
    }
    let half = Complex64::new(0.5, 0.0);
    let mut fit = CriticalLineFit {
        constant: 0.0,
        argmax: (0.0, y_lo),
        top_decade: 0.0,
        samples: 0,
    };
    let step = (y_hi / y_lo).ln() / (ny - 1) as f64;
    for j in 0..ny {
        let y = y_lo * (step * j as f64).exp();
        let profile = EisensteinProfile::new(y, half)?;
        let scale = y.sqrt() * (1.0 + y.ln().abs());
        for i in 0..nx {
            let x = i as f64 / nx as f64;
            let r = profile.eval(x).norm() / scale;
            if r > fit.constant {
                fit.constant = r;
                fit.argmax = (x, y);
            }
            if y >= y_hi / 10.0 {
                fit.top_decade = fit.top_decade.max(r);
            }
            fit.samples += 1;
        }
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::gl2(x, y).unwrap()
    }

    fn estar(x: f64, y: f64, s: Complex64) -> Complex64 {
        eisenstein_star_gl2(&pt(x, y), s).unwrap().value
    }

    #[test]
    fn functional_equation_at_i() {
        let s = c(0.3, 0.7);
        let a = estar(0.0, 1.0, s);
        let b = estar(0.0, 1.0, 1.0 - s);
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn functional_equation_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (x, y) = (rng.gen_range(-0.5..0.5), rng.gen_range(0.5..4.0));
            let s = c(rng.gen_range(-0.5..1.5), rng.gen_range(-3.0..3.0));
            let a = estar(x, y, s);
            let b = estar(x, y, 1.0 - s);
            assert!(
                (a - b).norm() <= 1e-10 * a.norm(),
                "x={x} y={y} s={s}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn automorphy() {
        let s = c(0.8, 1.3);
        let z = c(0.21, 0.74);
        let a = estar(z.re, z.im, s);
        let shifted = estar(z.re + 1.0, z.im, s);
        let w = -z.inv();
        let inverted = estar(w.re, w.im, s);
        assert!((a - shifted).norm() < 1e-12 * a.norm());
        assert!(
            (a - inverted).norm() < 1e-11 * a.norm(),
            "{a} vs {inverted}"
        );
    }

    #[test]
    fn continuous_through_half() {
        for y in [0.7, 3.0, 500.0] {
            let at = constant_term(y, c(0.5, 0.0)).unwrap();
            let near = constant_term(y, c(0.5 + 2e-4, 0.0)).unwrap();
            let inside = constant_term(y, c(0.5 + 5e-5, 1e-5)).unwrap();
            assert!((at - near).norm() < 1e-6 * at.norm().max(1.0));
            assert!((inside - at).norm() < 1e-7 * at.norm().max(1.0));
            assert!(at.im == 0.0);
        }
        let v = estar(0.1, 2.0, c(0.5, 0.0));
        let w = estar(0.1, 2.0, c(0.5 + 1e-3, 0.0));
        assert!((v - w).norm() < 1e-4);
    }

    #[test]
    fn residue_is_three_over_pi() {
        for (x, y) in [(0.0, 1.0), (0.3, 2.7)] {
            let r = eisenstein_residue_gl2(&pt(x, y)).unwrap();
            assert!((r - 3.0 / PI).abs() < 1e-8, "z = {x}+{y}i: {r}");
        }
    }

    #[test]
    fn completed_residue_routes_agree() {
        let r = eisenstein_star_residue_gl2(&pt(0.1, 1.3)).unwrap();
        // ξ(2) · 3/π = (π/6)(3/π) = 1/2
        let xi2 = completed_zeta(c(2.0, 0.0)).unwrap().re;
        assert_relative_eq!(r, 0.5, epsilon = 1e-8);
        assert_relative_eq!(xi2 * 3.0 / PI, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn critical_line_bound() {
        let fit = critical_line_fit(0.5, 1e4, 60, 16).unwrap();
        assert!(fit.constant.is_finite() && fit.constant < 5.0, "{fit:?}");
        // the constant term √y (log y + γ − log 4π) dominates high up
        assert!(
            fit.top_decade > 0.5 && fit.top_decade <= fit.constant,
            "{fit:?}"
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            eisenstein_star_gl2(&pt(0.0, 1.0), c(1.0, 0.0)),
            Err(Error::Pole { .. })
        ));
        assert!(eisenstein_star_gl2(&pt(0.0, 0.05), c(0.3, 0.0)).is_err());
    }
}
