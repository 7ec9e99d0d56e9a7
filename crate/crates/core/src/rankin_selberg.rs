//! Rankin–Selberg L-functions L(f×ḡ, s) = ζ(2s) Σ λ_f(n) λ_g(n) n^{−s}
//! of two level-one eigenforms of the same weight k.
//!
//! The completed function Λ(s) = (2π)^{−2s} Γ(s+k−1) Γ(s) L(s) is the
//! Mellin transform of Θ(u) = Σ c(n) Φ(nu) with
//! Φ(u) = ∫_0^∞ e^{−v − 4π²u/v} v^{k−1} dv/v. Splitting the Mellin integral
//! at u = T and applying Θ(1/u) = uΘ(u) + ρ(u − 1) gives
//!
//! Λ(s) = Σ c(n) [T^s G_s(nT) + T^{s−1} G_{1−s}(n/T)] + ρ [T^{s−1}/(s−1) − T^s/s],
//!
//! G_s(x) = ∫_1^∞ Φ(xt) t^s dt/t = (4π²x)^{−s} ∫_0^∞ e^{−v} v^{s+k−1} Γ(s, 4π²x/v) dv/v,
//!
//! with ρ = res_{s=1} Λ (zero unless f = g). Everything here is divided by
//! Γ(k), i.e. it computes Λ* = Λ/Γ(k).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::modforms::HeckeEigenform;
use crate::numerics::gamma::{ln_gamma, ln_gamma_real};
use crate::numerics::incomplete_gamma::ln_upper_incomplete_gamma;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Afe,
    PeriodQuadrature,
}

/// A computed L-value or inner product with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LValueResult {
    pub value: Complex64,
    pub abs_err_estimate: f64,
    pub truncation_length: usize,
    pub route: Route,
}

/// c(n) = Σ_{d²m = n} λ_f(m) λ_g(m) for n = 0..=N (c(0) = 0).
pub fn rs_coefficients(f: &HeckeEigenform, g: &HeckeEigenform, n: usize) -> Result<Vec<f64>> {
    if f.weight != g.weight {
        return Err(Error::Domain(format!(
            "weights differ: {} vs {}",
            f.weight, g.weight
        )));
    }
    let available = f.horizon().min(g.horizon());
    if n > available {
        return Err(Error::Truncation {
            needed: n,
            available,
        });
    }
    let mut c = vec![0.0; n + 1];
    for m in 1..=n {
        let p = f.lambda(m) * g.lambda(m);
        let mut d = 1;
        while d * d * m <= n {
            c[d * d * m] += p;
            d += 1;
        }
    }
    Ok(c)
}

/// (2π)^{−2s} Γ(s+k−1) Γ(s) / Γ(k).
pub fn gamma_factor_star(k: u32, s: Complex64) -> Complex64 {
    let kf = k as f64;
    (-2.0 * s * (2.0 * PI).ln() + ln_gamma(s + kf - 1.0) + ln_gamma(s) - ln_gamma_real(kf)).exp()
}

/// G_s(x) / Γ(k) by the trapezoidal rule in log v.
pub fn incomplete_mellin(k: u32, s: Complex64, x: f64) -> Result<Complex64> {
    let kf = k as f64;
    let big_x = 4.0 * PI * PI * x;
    let ln_x = big_x.ln();
    let norm = ln_gamma_real(kf);
    let log_integrand = |u: f64| -> Result<Complex64> {
        let lg = ln_upper_incomplete_gamma(s, big_x * (-u).exp())?;
        Ok(-u.exp() + (s + kf - 1.0) * u + lg - s * ln_x - norm)
    };
    // Peak of −v + (k−1) log v − X/v.
    let centre = (0.5 * ((kf - 1.0) + ((kf - 1.0).powi(2) + 4.0 * big_x).sqrt())).ln();
    let peak = log_integrand(centre)?.re;
    let cutoff = peak - 45.0;
    let mut lo = centre;
    while log_integrand(lo)?.re > cutoff {
        lo -= 0.5;
    }
    let mut hi = centre;
    while log_integrand(hi)?.re > cutoff {
        hi += 0.5;
    }
    let mut h = 0.25;
    let mut n = ((hi - lo) / h).ceil() as usize;
    h = (hi - lo) / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        sum += log_integrand(lo + j as f64 * h)?.exp();
    }
    let mut estimate = sum * h;
    for _ in 0..6 {
        let mut mid = Complex64::new(0.0, 0.0);
        for j in 0..n {
            mid += log_integrand(lo + (j as f64 + 0.5) * h)?.exp();
        }
        sum += mid;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        let delta = (next - estimate).norm();
        estimate = next;
        if delta <= 1e-15 * estimate.norm() {
            return Ok(estimate);
        }
    }
    Ok(estimate)
}

/// AFE weights w(n) = T^s G_s(nT) + T^{s−1} G_{1−s}(n/T), divided by Γ(k),
/// for a fixed weight, s and split point. Independent of the forms, so
/// one set serves every pair in a space.
#[derive(Debug, Clone, PartialEq)]
pub struct AfeKernel {
    pub weight: u32,
    pub s: Complex64,
    pub split: f64,
    /// w(n) for n = 0..=N (w(0) = 0).
    pub weights: Vec<Complex64>,
    /// Σ_{n > N} 7n |w(n)|, which bounds the dropped tail since |c(n)| ≤ 7n.
    pub tail_bound: f64,
}

impl AfeKernel {
    /// Weights out to the point where the tail is below `rel_eps` times the
    /// accumulated Σ 7n|w(n)|, or `max_terms`, whichever comes first.
    pub fn new(
        weight: u32,
        s: Complex64,
        split: f64,
        rel_eps: f64,
        max_terms: usize,
    ) -> Result<Self> {
        if !(split > 0.0) {
            return Err(Error::Domain("split point must be positive".into()));
        }
        let ts = (s * split.ln()).exp();
        let ts1 = ((s - 1.0) * split.ln()).exp();
        let mut weights = vec![Complex64::new(0.0, 0.0)];
        let mut mass = 0.0;
        let mut prev = f64::INFINITY;
        let mut n = 1;
        loop {
            let nf = n as f64;
            let w = ts * incomplete_mellin(weight, s, nf * split)?
                + ts1 * incomplete_mellin(weight, 1.0 - s, nf / split)?;
            weights.push(w);
            let b = 7.0 * nf * w.norm();
            mass += b;
            // once the bounds decrease geometrically the tail is at most b r/(1−r)
            let r = b / prev;
            prev = b;
            if n >= 4 && r < 0.95 {
                let tail = b * r / (1.0 - r);
                if tail <= rel_eps * mass {
                    return Ok(Self {
                        weight,
                        s,
                        split,
                        weights,
                        tail_bound: tail,
                    });
                }
            }
            if n >= max_terms {
                return Err(Error::Truncation {
                    needed: n + 1,
                    available: max_terms,
                });
            }
            n += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Σ c(n) w(n) with an error estimate: the tail bound plus rounding.
    pub fn apply(&self, c: &[f64]) -> Result<(Complex64, f64)> {
        if c.len() < self.weights.len() {
            return Err(Error::Truncation {
                needed: self.len(),
                available: c.len().saturating_sub(1),
            });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for (w, cn) in self.weights.iter().zip(c).skip(1) {
            sum += *w * *cn;
            mass += (*w * *cn).norm();
        }
        Ok((sum, self.tail_bound + 1e-15 * mass))
    }

    /// Coefficient of ρ: T^{s−1}/(s−1) − T^s/s.
    pub fn polar(&self) -> Complex64 {
        let lt = self.split.ln();
        ((self.s - 1.0) * lt).exp() / (self.s - 1.0) - (self.s * lt).exp() / self.s
    }
}

/// Relative size of the dropped AFE tail.
const TAIL_EPS: f64 = 1e-17;

/// L(f×ḡ, s) with its coefficient table and, for f = g, the residue of Λ*.
#[derive(Debug, Clone, PartialEq)]
pub struct RankinSelberg {
    pub weight: u32,
    pub diagonal: bool,
    c: Vec<f64>,
    /// res_{s=1} Λ*(s), zero when f ≠ g.
    residue_star: f64,
    /// Relative disagreement of two independent determinations of the residue.
    residue_crosscheck: f64,
}

impl RankinSelberg {
    /// Uses every coefficient both forms provide.
    pub fn new(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<Self> {
        let n = f.horizon().min(g.horizon());
        let c = rs_coefficients(f, g, n)?;
        let diagonal = f.index == g.index && f.lambdas() == g.lambdas();
        let mut rs = Self {
            weight: f.weight,
            diagonal,
            c,
            residue_star: 0.0,
            residue_crosscheck: 0.0,
        };
        if diagonal {
            let r1 = rs.residue_from_splits(Complex64::new(2.0, 0.0))?;
            let r2 = rs.residue_from_splits(Complex64::new(1.5, 0.0))?;
            rs.residue_star = r1;
            rs.residue_crosscheck = ((r1 - r2) / r1).abs();
        }
        Ok(rs)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn horizon(&self) -> usize {
        self.c.len() - 1
    }

    /// Λ* is independent of the split point T only for the true residue:
    /// solve A_1 + ρP_1 = A_2 + ρP_2 with T = 1 and T = 2.
    fn residue_from_splits(&self, s: Complex64) -> Result<f64> {
        let k1 = self.kernel(s, 1.0)?;
        let k2 = self.kernel(s, 2.0)?;
        let (a1, _) = k1.apply(&self.c)?;
        let (a2, _) = k2.apply(&self.c)?;
        Ok(((a2 - a1) / (k1.polar() - k2.polar())).re)
    }

    pub fn kernel(&self, s: Complex64, split: f64) -> Result<AfeKernel> {
        AfeKernel::new(self.weight, s, split, TAIL_EPS, self.horizon())
    }

    pub fn residue_star(&self) -> f64 {
        self.residue_star
    }

    pub fn residue_crosscheck(&self) -> f64 {
        self.residue_crosscheck
    }

    /// res_{s=1} L(f×f̄, s) = 4π² res Λ*.
    pub fn residue_l(&self) -> f64 {
        4.0 * PI * PI * self.residue_star
    }

    fn check_pole(&self, s: Complex64) -> Result<()> {
        if self.diagonal && ((s - 1.0).norm() < 1e-12 || s.norm() < 1e-12) {
            return Err(Error::Pole {
                function: "completed_lambda",
                at: format!("{s}"),
            });
        }
        Ok(())
    }

    /// Λ*(s) using precomputed weights (the kernel's weight must match).
    pub fn lambda_star_with(&self, kernel: &AfeKernel) -> Result<LValueResult> {
        self.check_pole(kernel.s)?;
        if kernel.weight != self.weight {
            return Err(Error::Domain("kernel weight does not match".into()));
        }
        let (sum, err) = kernel.apply(&self.c)?;
        let polar = kernel.polar() * self.residue_star;
        let polar_err = polar.norm() * self.residue_crosscheck.max(1e-15);
        Ok(LValueResult {
            value: sum + polar,
            abs_err_estimate: err + polar_err,
            truncation_length: kernel.len(),
            route: Route::Afe,
        })
    }

    /// Λ*(s) = Λ(s)/Γ(k).
    pub fn lambda_star(&self, s: Complex64) -> Result<LValueResult> {
        self.lambda_star_with(&self.kernel(s, 1.0)?)
    }

    /// Λ(s) = (2π)^{−2s} Γ(s+k−1) Γ(s) L(s).
    pub fn completed_lambda(&self, s: Complex64) -> Result<LValueResult> {
        let mut r = self.lambda_star(s)?;
        let scale = ln_gamma_real(self.weight as f64).exp();
        r.value *= scale;
        r.abs_err_estimate *= scale;
        Ok(r)
    }

    /// L(f×ḡ, s).
    pub fn l_value(&self, s: Complex64) -> Result<LValueResult> {
        let mut r = self.lambda_star(s)?;
        let g = gamma_factor_star(self.weight, s);
        r.value /= g;
        r.abs_err_estimate /= g.norm();
        Ok(r)
    }

    /// Truncated Dirichlet series Σ_{n ≤ N} c(n) n^{−s} for Re s > 1, with
    /// the tail bounded by Σ_{n > N} 7n^{1−σ}.
    pub fn dirichlet_series(&self, s: Complex64) -> Result<LValueResult> {
        let sigma = s.re;
        if sigma <= 2.0 {
            return Err(Error::Domain(
                "direct series needs Re s > 2 for the divisor-bound tail".into(),
            ));
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, cn) in self.c.iter().enumerate().skip(1) {
            sum += *cn * (-s * (n as f64).ln()).exp();
        }
        let n = self.horizon() as f64;
        let tail = 7.0 * n.powf(2.0 - sigma) / (sigma - 2.0);
        Ok(LValueResult {
            value: sum,
            abs_err_estimate: tail,
            truncation_length: self.horizon(),
            route: Route::Afe,
        })
    }
}

/// ‖f‖² = res_{s=1} L(f×f̄, s) / (2π²).
pub fn petersson_norm(f: &HeckeEigenform) -> Result<f64> {
    let rs = RankinSelberg::new(f, f)?;
    Ok(rs.residue_l() / (2.0 * PI * PI))
}

/// L(f×f̄, 1+ε) from the approximate functional equation.
pub fn l_at_one_plus_eps(f: &HeckeEigenform, eps: f64) -> Result<f64> {
    if !(0.01..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("eps = {eps} outside [0.01, 1]")));
    }
    let rs = RankinSelberg::new(f, f)?;
    Ok(rs.l_value(Complex64::new(1.0 + eps, 0.0))?.value.re)
}
