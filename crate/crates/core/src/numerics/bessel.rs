//! Modified Bessel function K_ν(x) for complex order and positive argument.
//!
//! Evaluated from K_ν(x) = ∫_0^∞ exp(-x cosh t) cosh(νt) dt with the
//! trapezoidal rule. The integrand is entire and decays doubly
//! exponentially, so halving the step converges geometrically in the
//! number of nodes. For purely imaginary order ν = it and x < |t| the
//! integrand oscillates while the result is of size e^{-π|t|/2}; relative
//! accuracy in binary64 is then about 1e-16 · e^{π|t|/2}.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Value of K_ν(x), with a flag set when e^{-x} underflows binary64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselK {
    pub value: Complex64,
    pub underflow: bool,
}

/// e^{x} K_ν(x).
pub fn bessel_k_scaled(order: Complex64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    let nu_re = order.re.abs();
    // Integrand magnitude is exp(-x (cosh t - 1) + |Re ν| t); cut where it is below e^{-45}
    // relative to its peak.
    let peak_t = (nu_re / x).asinh();
    // cosh t − 1 without cancellation
    let cm1 = |t: f64| 2.0 * (0.5 * t).sinh().powi(2);
    let peak = -x * cm1(peak_t) + nu_re * peak_t;
    let log_mag = |t: f64| -x * cm1(t) + nu_re * t;
    let mut t_max = peak_t.max(1.0f64.min(4.0 / x.sqrt()));
    while log_mag(t_max) > peak - 45.0 {
        t_max *= 1.25;
    }
    let f = |t: f64| -> Complex64 { (order * t).cosh() * (-x * cm1(t)).exp() };

    let mut h = (t_max / 16.0).min(0.5);
    let mut n = (t_max / h).ceil() as usize;
    h = t_max / n as f64;
    let mut sum = f(0.0) * 0.5;
    let mut mass = sum.norm();
    for j in 1..=n {
        let v = f(j as f64 * h);
        mass += v.norm();
        sum += v;
    }
    let mut estimate = sum * h;
    let mut delta = f64::INFINITY;
    for _level in 0..12 {
        // halve the step: add the midpoints
        let mut mid = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let v = f((j as f64 + 0.5) * h);
            mass += v.norm();
            mid += v;
        }
        sum += mid;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        delta = (next - estimate).norm();
        estimate = next;
        // floor set by cancellation when the integrand oscillates
        let floor = (1e-15 * estimate.norm()).max(4e-16 * mass * h);
        if delta <= floor {
            return Ok(estimate);
        }
    }
    Err(Error::NonConvergence {
        levels: 12,
        best: estimate.norm(),
        delta,
    })
}

/// K_ν(x) for complex order ν and x > 0.
pub fn bessel_k(order: Complex64, x: f64) -> Result<BesselK> {
    let scaled = bessel_k_scaled(order, x)?;
    let damp = (-x).exp();
    if damp == 0.0 {
        return Ok(BesselK {
            value: Complex64::new(0.0f64.copysign(scaled.re), 0.0),
            underflow: true,
        });
    }
    Ok(BesselK {
        value: scaled * damp,
        underflow: false,
    })
}

/// K_{it}(x), which is real for real t.
pub fn bessel_k_imag(t: f64, x: f64) -> Result<f64> {
    Ok(bessel_k(Complex64::new(0.0, t), x)?.value.re)
}
