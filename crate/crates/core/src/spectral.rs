//! GL(n) spectral parameters, the Plancherel density, spherical Whittaker
//! functions for n = 2, 3 and numerical checks of Stade's formula
//!
//! ∫ W_ν(y) conj(W_μ(y)) det(y)^s d*y
//!   = Π_{j,k} Γ_R(s + α_j − β_k)
//!     / (2 Γ_R(ns) Π_{j≤k} Γ_R(1 + n(ν_j+…+ν_k)) Γ_R(1 − n(μ_j+…+μ_k))).
//!
//! Spectral parameters are purely imaginary and stored by their imaginary
//! parts, so ν = i·`nu`. Coordinates follow y = diag(y_1⋯y_{n−1}, …, y_1, 1)
//! with det(y) = Π y_i^{n−i} and d*y = Π y_k^{−k(n−k)} dy_k/y_k.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_k;
use crate::numerics::gamma::{ln_gamma, ln_gamma_r};
use crate::numerics::par_map;
use crate::numerics::quadrature::{CompensatedComplex, GaussLegendre};

fn im(t: f64) -> Complex64 {
    Complex64::new(0.0, t)
}

/// ν and the Langlands parameters α (imaginary parts of both).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub n: usize,
    pub nu: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// α_j = Σ_i c_{ij} ν_i with c_{ij} = n − i for j ≤ i and −i for j > i.
pub fn nu_to_alpha(nu: &[f64]) -> Vec<f64> {
    let n = nu.len() + 1;
    (1..=n)
        .map(|j| {
            nu.iter()
                .enumerate()
                .map(|(idx, v)| {
                    let i = idx + 1;
                    let c = if j <= i { (n - i) as f64 } else { -(i as f64) };
                    c * v
                })
                .sum()
        })
        .collect()
}

/// ν_j = (α_j − α_{j+1}) / n.
pub fn alpha_to_nu(alpha: &[f64]) -> Vec<f64> {
    let n = alpha.len() as f64;
    alpha.windows(2).map(|w| (w[0] - w[1]) / n).collect()
}

impl SpectralParams {
    pub fn from_nu(nu: &[f64]) -> Result<Self> {
        if nu.is_empty() {
            return Err(Error::Domain("need n ≥ 2, i.e. at least one ν".into()));
        }
        if nu.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("spectral parameters must be finite".into()));
        }
        Ok(Self {
            n: nu.len() + 1,
            nu: nu.to_vec(),
            alpha: nu_to_alpha(nu),
        })
    }

    /// Requires Σ α_j = 0.
    pub fn from_alpha(alpha: &[f64]) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::Domain("need n ≥ 2 Langlands parameters".into()));
        }
        let sum: f64 = alpha.iter().sum();
        let scale: f64 = alpha.iter().map(|a| a.abs()).sum::<f64>().max(1.0);
        if sum.abs() > 1e-12 * scale {
            return Err(Error::Domain(format!(
                "Langlands parameters sum to {sum}, not 0"
            )));
        }
        Ok(Self {
            n: alpha.len(),
            nu: alpha_to_nu(alpha),
            alpha: alpha.to_vec(),
        })
    }

    /// ν_j + … + ν_k for 1 ≤ j ≤ k ≤ n − 1, j outer.
    pub fn partial_sums(&self) -> Vec<f64> {
        let m = self.nu.len();
        let mut out = Vec::with_capacity(m * (m + 1) / 2);
        for j in 0..m {
            let mut acc = 0.0;
            for k in j..m {
                acc += self.nu[k];
                out.push(acc);
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.nu.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// G(ix) = (x/2π) tanh(πx/2).
pub fn plancherel_g(x: f64) -> f64 {
    x / TAU * (PI * x / 2.0).tanh()
}

/// G(ix) = |Γ_R(1 + ix)/Γ_R(ix)|², evaluated through log-gamma.
pub fn plancherel_g_gamma(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (2.0 * (ln_gamma_r(Complex64::new(1.0, x)) - ln_gamma_r(im(x))).re).exp()
}

/// Π_{j≤k} G(n(ν_j + … + ν_k)).
pub fn plancherel_density(p: &SpectralParams) -> f64 {
    let n = p.n as f64;
    p.partial_sums()
        .iter()
        .map(|s| plancherel_g(n * s))
        .product()
}

/// Π_{j<k} G(α_j − α_k), the same density written in Langlands parameters.
pub fn plancherel_density_alpha(p: &SpectralParams) -> f64 {
    let mut prod = 1.0;
    for j in 0..p.n {
        for k in j + 1..p.n {
            prod *= plancherel_g(p.alpha[j] - p.alpha[k]);
        }
    }
    prod
}

/// The density through the Gamma-quotient form of G.
pub fn plancherel_density_gamma(p: &SpectralParams) -> f64 {
    let n = p.n as f64;
    p.partial_sums()
        .iter()
        .map(|s| plancherel_g_gamma(n * s))
        .product()
}

/// Π_{j≤k} (1 + |ν_j + … + ν_k|).
pub fn plancherel_proxy(p: &SpectralParams) -> f64 {
    p.partial_sums().iter().map(|s| 1.0 + s.abs()).product()
}

/// Analytic-conductor proxy Π (1 + |ν_j + … + ν_k|)² of f × g, evaluated at
/// the parameters of f.
pub fn conductor_proxy(f: &SpectralParams, g: &SpectralParams) -> Result<f64> {
    if f.n != g.n {
        return Err(Error::Domain(format!("ranks differ: {} vs {}", f.n, g.n)));
    }
    Ok(plancherel_proxy(f).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallScheme {
    /// Gauss–Legendre in polar coordinates for n ≤ 3, tensor rule with the
    /// ball indicator for n = 4, Monte-Carlo beyond.
    Quadrature,
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallIntegral {
    pub value: f64,
    pub error: f64,
    pub proxy: f64,
}

impl BallIntegral {
    pub fn ratio(&self) -> f64 {
        self.value / self.proxy
    }
}

/// ∫_{‖μ − ν‖ ≤ r} d_spec μ together with the product proxy at ν.
pub fn plancherel_ball(
    center: &SpectralParams,
    radius: f64,
    scheme: BallScheme,
) -> Result<BallIntegral> {
    if !(radius > 0.0 && radius <= 2.0) {
        return Err(Error::Domain(format!("radius {radius} outside (0, 2]")));
    }
    let d = center.nu.len();
    let density = |t: &[f64]| -> f64 {
        let nu: Vec<f64> = center.nu.iter().zip(t).map(|(c, x)| c + x).collect();
        plancherel_density(&SpectralParams::from_nu(&nu).expect("finite parameters"))
    };
    let (value, error) = match scheme {
        BallScheme::MonteCarlo { samples, seed } => {
            ball_monte_carlo(d, radius, samples, seed, density)
        }
        BallScheme::Quadrature if d == 1 => {
            // G is smooth, with a kink of tanh-scale only at 0; split there
            let f = |x: f64| density(&[x]);
            let lo = -radius;
            let hi = radius;
            let mut cuts = vec![lo, hi];
            let zero = -center.nu[0];
            if zero > lo && zero < hi {
                cuts.insert(1, zero);
            }
            let fine = ball_1d(&cuts, 64, &f);
            let coarse = ball_1d(&cuts, 32, &f);
            (fine, (fine - coarse).abs())
        }
        BallScheme::Quadrature if d == 2 => {
            let fine = ball_polar(radius, 48, 128, &density);
            let coarse = ball_polar(radius, 24, 64, &density);
            (fine, (fine - coarse).abs())
        }
        BallScheme::Quadrature if d == 3 => {
            let fine = ball_box(d, radius, 48, &density);
            let coarse = ball_box(d, radius, 24, &density);
            (fine, (fine - coarse).abs())
        }
        BallScheme::Quadrature => ball_monte_carlo(d, radius, 200_000, 0, density),
    };
    Ok(BallIntegral {
        value,
        error,
        proxy: plancherel_proxy(center),
    })
}

fn ball_1d(cuts: &[f64], panels: usize, f: &impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(8);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let width = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let a = w[0] + p as f64 * width;
            total += rule.integrate(a, a + width, f);
        }
    }
    total
}

fn ball_polar(radius: f64, nr: usize, ntheta: usize, f: &impl Fn(&[f64]) -> f64) -> f64 {
    let rule = GaussLegendre::new(nr);
    let mut total = 0.0;
    for (r, wr) in rule.on(0.0, radius) {
        let mut ring = 0.0;
        for j in 0..ntheta {
            let th = TAU * j as f64 / ntheta as f64;
            ring += f(&[r * th.cos(), r * th.sin()]);
        }
        total += wr * r * ring * TAU / ntheta as f64;
    }
    total
}

fn ball_box(d: usize, radius: f64, order: usize, f: &impl Fn(&[f64]) -> f64) -> f64 {
    let rule = GaussLegendre::new(order);
    let pts: Vec<(f64, f64)> = rule.on(-radius, radius).collect();
    let mut idx = vec![0usize; d];
    let mut total = 0.0;
    let mut x = vec![0.0; d];
    loop {
        let mut w = 1.0;
        for (i, &k) in idx.iter().enumerate() {
            x[i] = pts[k].0;
            w *= pts[k].1;
        }
        if x.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
            total += w * f(&x);
        }
        let mut i = 0;
        loop {
            if i == d {
                return total;
            }
            idx[i] += 1;
            if idx[i] < order {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn ball_volume(d: usize, radius: f64) -> f64 {
    let half = d as f64 / 2.0;
    PI.powf(half) / (ln_gamma(Complex64::new(half + 1.0, 0.0)).re).exp() * radius.powi(d as i32)
}

/// Uniform samples in the ball by rejection from the cube.
fn ball_monte_carlo(
    d: usize,
    radius: f64,
    samples: u64,
    seed: u64,
    f: impl Fn(&[f64]) -> f64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut x = vec![0.0; d];
    let mut taken = 0u64;
    while taken < samples.max(2) {
        for v in x.iter_mut() {
            *v = rng.gen_range(-radius..radius);
        }
        if x.iter().map(|v| v * v).sum::<f64>() > radius * radius {
            continue;
        }
        let v = f(&x);
        sum += v;
        sq += v * v;
        taken += 1;
    }
    let n = taken as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0);
    let vol = ball_volume(d, radius);
    (vol * mean, vol * (var / n).sqrt())
}

/// Normalization of a spherical Whittaker function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhittakerNormalization {
    /// completed function divided by Π_{j≤k} Γ_R(1 + n(ν_j + … + ν_k)),
    /// the normalization in which Stade's formula is stated
    Paper,
    Completed,
    /// n = 2 only: 2√π cosh(π|ν|/2) √y K_ν(2πy)
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhittakerSpec {
    pub params: SpectralParams,
    pub normalization: WhittakerNormalization,
}

/// Π_{j≤k} Γ_R(1 + n(ν_j + … + ν_k)).
fn normalizer(p: &SpectralParams) -> Complex64 {
    let n = p.n as f64;
    p.partial_sums()
        .iter()
        .map(|s| ln_gamma_r(Complex64::new(1.0, n * s)))
        .sum::<Complex64>()
        .exp()
}

const Y_RANGE: (f64, f64) = (1e-3, 1e3);

/// W_ν(y) for n ∈ {2, 3}, y_i ∈ [1e−3, 1e3].
pub fn whittaker(spec: &WhittakerSpec, y: &[f64]) -> Result<Complex64> {
    let p = &spec.params;
    if !(p.n == 2 || p.n == 3) {
        return Err(Error::Domain(format!(
            "Whittaker functions implemented for n = 2, 3, not {}",
            p.n
        )));
    }
    if y.len() != p.n - 1 {
        return Err(Error::Domain(format!(
            "need {} coordinates, got {}",
            p.n - 1,
            y.len()
        )));
    }
    if y.iter().any(|v| !(*v >= Y_RANGE.0 && *v <= Y_RANGE.1)) {
        return Err(Error::Domain(format!("y = {y:?} outside [1e-3, 1e3]")));
    }
    let completed = match p.n {
        2 => completed_gl2(p.nu[0], y[0])?,
        _ => {
            if spec.normalization == WhittakerNormalization::Classical {
                return Err(Error::Domain(
                    "the classical closed form exists only for n = 2".into(),
                ));
            }
            let (s1, s2) = Gl3Whittaker::contour_for(p, y[0], y[1]);
            Gl3Whittaker::new(p, s1, s2)?.completed(y[0], y[1])
        }
    };
    Ok(match spec.normalization {
        WhittakerNormalization::Completed => completed,
        WhittakerNormalization::Paper => completed / normalizer(p),
        WhittakerNormalization::Classical => {
            let t = p.nu[0];
            completed * (PI.sqrt() * (PI * t.abs() / 2.0).cosh())
        }
    })
}

/// 2 √y K_ν(2πy).
fn completed_gl2(t: f64, y: f64) -> Result<Complex64> {
    Ok(bessel_k(im(t), TAU * y)?.value * (2.0 * y.sqrt()))
}

/// Completed GL(3) Whittaker function from the double Mellin–Barnes integral
///
/// W*(y_1, y_2) = y_1 y_2 (2πi)^{−2} ∫∫ K(s_1, s_2) y_1^{−s_1} y_2^{−s_2} ds_1 ds_2,
/// K = 2^{−3/2} Π_j Γ_R(s_1 − α_j) Γ_R(s_2 + α_j) / Γ_R(s_1 + s_2),
///
/// on vertical lines Re s_i = σ_i > 0. The kernel is sampled once on a
/// trapezoidal grid, so evaluation at many y is a pair of matrix products.
#[derive(Debug, Clone)]
pub struct Gl3Whittaker {
    /// nodes s_{1,i}, s_{2,j}
    s1: Vec<Complex64>,
    s2: Vec<Complex64>,
    /// K(s_{1,i}, s_{2,j}) h²/(2π)², row-major in i
    kernel: Vec<Complex64>,
}

impl Gl3Whittaker {
    pub fn new(p: &SpectralParams, sigma1: f64, sigma2: f64) -> Result<Self> {
        let sigma = sigma1.min(sigma2);
        // trapezoidal error is about exp(−2π σ / h)
        let h = (TAU * sigma / 34.0).min(0.12);
        Self::with_step(p, sigma1, sigma2, h)
    }

    pub fn with_step(p: &SpectralParams, sigma1: f64, sigma2: f64, h: f64) -> Result<Self> {
        if p.n != 3 {
            return Err(Error::Domain("GL(3) Whittaker function needs n = 3".into()));
        }
        if !(sigma1 > 0.0 && sigma2 > 0.0) {
            return Err(Error::Domain(
                "contours must lie right of the poles at Re s = 0".into(),
            ));
        }
        let amax = p.alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let nodes = |sigma: f64| -> Vec<Complex64> {
            // decay is at least exp(−π|t|/2) once |t| exceeds the shifts
            let t_max = 34.0 + 2.0 * amax + 1.5 * sigma;
            let m = (t_max / h).ceil() as i64;
            (-m..=m)
                .map(|j| Complex64::new(sigma, j as f64 * h))
                .collect()
        };
        let s1 = nodes(sigma1);
        let s2 = nodes(sigma2);
        let alpha: Vec<Complex64> = p.alpha.iter().map(|a| im(*a)).collect();
        let left: Vec<Complex64> = s1
            .iter()
            .map(|s| alpha.iter().map(|a| ln_gamma_r(s - a)).sum())
            .collect();
        let right: Vec<Complex64> = s2
            .iter()
            .map(|s| alpha.iter().map(|a| ln_gamma_r(s + a)).sum())
            .collect();
        let log_c = -1.5 * 2f64.ln() + (h * h / (TAU * TAU)).ln();
        let rows = par_map(&(0..s1.len()).collect::<Vec<_>>(), |&i| {
            s2.iter()
                .zip(&right)
                .map(|(b, r)| (left[i] + r - ln_gamma_r(s1[i] + b) + log_c).exp())
                .collect::<Vec<_>>()
        });
        Ok(Self {
            s1,
            s2,
            kernel: rows.into_iter().flatten().collect(),
        })
    }

    /// Contour abscissae that keep y^{−σ} K small at this point; by Stirling
    /// the best line moves right as y grows.
    pub fn contour_for(p: &SpectralParams, y1: f64, y2: f64) -> (f64, f64) {
        let alpha: Vec<Complex64> = p.alpha.iter().map(|a| im(*a)).collect();
        let cands = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        let mut best = (f64::INFINITY, (0.5, 0.5));
        for &a in &cands {
            for &b in &cands {
                let s1 = Complex64::new(a, 0.0);
                let s2 = Complex64::new(b, 0.0);
                let k: f64 = alpha
                    .iter()
                    .map(|x| (ln_gamma_r(s1 - x) + ln_gamma_r(s2 + x)).re)
                    .sum::<f64>()
                    - ln_gamma_r(s1 + s2).re;
                let m = k - a * y1.ln() - b * y2.ln();
                if m < best.0 {
                    best = (m, (a, b));
                }
            }
        }
        best.1
    }

    pub fn nodes(&self) -> usize {
        self.s1.len() * self.s2.len()
    }

    pub fn completed(&self, y1: f64, y2: f64) -> Complex64 {
        self.completed_grid(&[y1.ln()], &[y2.ln()])[0]
    }

    /// W*(e^{u1_a}, e^{u2_b}) for all pairs, row-major in a.
    pub fn completed_grid(&self, u1: &[f64], u2: &[f64]) -> Vec<Complex64> {
        let n2 = self.s2.len();
        // A[b][i] = Σ_j K_ij e^{−s2_j u2_b}
        let a = par_map(u2, |&u| {
            let pw: Vec<Complex64> = self.s2.iter().map(|s| (-s * u).exp()).collect();
            (0..self.s1.len())
                .map(|i| {
                    let row = &self.kernel[i * n2..(i + 1) * n2];
                    row.iter().zip(&pw).map(|(k, p)| k * p).sum::<Complex64>()
                })
                .collect::<Vec<_>>()
        });
        let rows = par_map(u1, |&v| {
            let pw: Vec<Complex64> = self.s1.iter().map(|s| (-s * v).exp()).collect();
            a.iter()
                .zip(u2)
                .map(|(ab, &w)| {
                    ab.iter().zip(&pw).map(|(x, p)| x * p).sum::<Complex64>() * (v + w).exp()
                })
                .collect::<Vec<_>>()
        });
        rows.into_iter().flatten().collect()
    }
}

/// Right side of Stade's formula.
pub fn stade_rhs(nu: &SpectralParams, mu: &SpectralParams, s: f64) -> Result<Complex64> {
    if nu.n != mu.n {
        return Err(Error::Domain("ν and μ must have the same rank".into()));
    }
    let n = nu.n as f64;
    let sc = Complex64::new(s, 0.0);
    let mut log = Complex64::new(0.0, 0.0);
    for a in &nu.alpha {
        for b in &mu.alpha {
            log += ln_gamma_r(sc + im(a - b));
        }
    }
    log -= (2.0f64).ln() + ln_gamma_r(sc * n);
    for (x, y) in nu.partial_sums().iter().zip(mu.partial_sums()) {
        log -= ln_gamma_r(Complex64::new(1.0, n * x)) + ln_gamma_r(Complex64::new(1.0, -n * y));
    }
    Ok(log.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StadeCheck {
    pub n: usize,
    pub nu: Vec<f64>,
    pub mu: Vec<f64>,
    pub s: f64,
    pub lhs: Complex64,
    pub lhs_err: f64,
    pub rhs: Complex64,
    pub rel_err: f64,
}

/// Both sides of Stade's formula, the left by quadrature over the torus.
pub fn stade_check(nu: &SpectralParams, mu: &SpectralParams, s: f64) -> Result<StadeCheck> {
    if nu.n != mu.n || !(nu.n == 2 || nu.n == 3) {
        return Err(Error::Domain(
            "Stade check implemented for n = 2, 3 with matching ranks".into(),
        ));
    }
    if !(0.5..=1.5).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside [1/2, 3/2]")));
    }
    if nu.norm() > 3.0 || mu.norm() > 3.0 {
        return Err(Error::Domain("‖ν‖, ‖μ‖ must be at most 3".into()));
    }
    let (lhs, lhs_err) = if nu.n == 2 {
        stade_lhs_gl2(nu, mu, s)?
    } else {
        stade_lhs_gl3(nu, mu, s)?
    };
    let rhs = stade_rhs(nu, mu, s)?;
    Ok(StadeCheck {
        n: nu.n,
        nu: nu.nu.clone(),
        mu: mu.nu.clone(),
        s,
        lhs,
        lhs_err,
        rhs,
        rel_err: (lhs - rhs).norm() / rhs.norm(),
    })
}

/// ∫_0^∞ W_ν W̄_μ y^{s−1} dy/y in u = log y by the trapezoidal rule with
/// step halving; the truncated tail is bounded with |K_{it}(x)| ≤ K_0(x).
fn stade_lhs_gl2(nu: &SpectralParams, mu: &SpectralParams, s: f64) -> Result<(Complex64, f64)> {
    let scale = (normalizer(nu) * normalizer(mu).conj()).inv() * 4.0;
    let integrand = |u: f64| -> Result<Complex64> {
        let x = TAU * u.exp();
        let a = bessel_k(im(nu.nu[0]), x)?.value;
        let b = if mu.nu == nu.nu {
            a
        } else {
            bessel_k(im(mu.nu[0]), x)?.value
        };
        Ok(a * b.conj() * (s * u).exp())
    };
    let u_lo = -36.0 / s;
    let u_hi = 2.0;
    let mut h = 0.25;
    let mut n = ((u_hi - u_lo) / h).ceil() as usize;
    h = (u_hi - u_lo) / n as f64;
    let pts: Vec<f64> = (0..=n).map(|j| u_lo + j as f64 * h).collect();
    let mut sum = sum_results(par_map(&pts, |&u| integrand(u)))?;
    let mut est = sum * h;
    for _ in 0..8 {
        let mids: Vec<f64> = (0..n).map(|j| u_lo + (j as f64 + 0.5) * h).collect();
        sum += sum_results(par_map(&mids, |&u| integrand(u)))?;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        let delta = (next - est).norm();
        est = next;
        if delta < 1e-13 * est.norm() {
            break;
        }
    }
    // K_0(x) ≤ |log(x/2)| + 1 for small x
    let tail = 4.0 * (u_lo.abs() + 2.0).powi(2) * (s * u_lo).exp() / s;
    Ok((est * scale, (tail + 1e-13 * est.norm()) * scale.norm()))
}

fn sum_results(v: Vec<Result<Complex64>>) -> Result<Complex64> {
    let mut acc = CompensatedComplex::default();
    for x in v {
        acc.add(x?);
    }
    Ok(acc.value())
}

/// ∫∫ W_ν W̄_μ y_1^{2s} y_2^{s} d*y in log coordinates. The contour sits at
/// σ ≤ s/2, so Mellin–Barnes rounding amplified by y^{−σ} at small y stays
/// below the decay of the measure there.
fn stade_lhs_gl3(nu: &SpectralParams, mu: &SpectralParams, s: f64) -> Result<(Complex64, f64)> {
    let sigma = (s / 2.0).min(0.5);
    let wn = Gl3Whittaker::new(nu, sigma, sigma)?;
    let wm = if mu.nu == nu.nu {
        None
    } else {
        Some(Gl3Whittaker::new(mu, sigma, sigma)?)
    };
    let du = 0.15;
    let grid = |lo: f64| -> Vec<f64> {
        let m = ((2.2 - lo) / du).ceil() as usize;
        (0..=m).map(|j| lo + j as f64 * du).collect()
    };
    // the measure decays like e^{2s u1 + s u2} towards the origin
    let depth = 26.0;
    let u1 = grid(-depth / (2.0 * s));
    let u2 = grid(-depth / s);
    let a = wn.completed_grid(&u1, &u2);
    let b = match &wm {
        Some(w) => w.completed_grid(&u1, &u2),
        None => a.clone(),
    };
    let scale = (normalizer(nu) * normalizer(mu).conj()).inv();
    let mut fine = CompensatedComplex::default();
    let mut coarse = CompensatedComplex::default();
    // integrals along the two truncation edges, for the tail estimate
    let (mut edge1, mut edge2) = (0.0, 0.0);
    for (i, x) in u1.iter().enumerate() {
        for (j, y) in u2.iter().enumerate() {
            let idx = i * u2.len() + j;
            // W W̄ y1^{2s−2} y2^{s−2}
            let v = a[idx] * b[idx].conj() * ((2.0 * s - 2.0) * x + (s - 2.0) * y).exp();
            fine.add(v);
            if i % 2 == 0 && j % 2 == 0 {
                coarse.add(v);
            }
            if i == 0 {
                edge1 += v.norm();
            }
            if j == 0 {
                edge2 += v.norm();
            }
        }
    }
    let f = fine.value() * (du * du);
    let c = coarse.value() * (4.0 * du * du);
    // beyond the edges the integrand decays like e^{2s u1}, e^{s u2} up to
    // powers of u; a factor depth covers those
    let tail = depth * du * (edge1 / (2.0 * s) + edge2 / s);
    Ok((f * scale, ((f - c).norm() + tail) * scale.norm()))
}

/// Stade's right side at μ = ν divided by Π_{j≤k} |Γ_R(s + n(ν_j+…))|² / |Γ_R(1 + n(ν_j+…))|².
pub fn diagonal_gamma_ratio(nu: &SpectralParams, s: f64) -> Result<f64> {
    let rhs = stade_rhs(nu, nu, s)?.norm();
    let n = nu.n as f64;
    let mut log = 0.0;
    for x in nu.partial_sums() {
        log += 2.0
            * (ln_gamma_r(Complex64::new(s, n * x)) - ln_gamma_r(Complex64::new(1.0, n * x))).re;
    }
    Ok(rhs / log.exp())
}

/// Stade's value at s = 1/2, μ = ν divided by (∫_{‖μ−ν‖≤1} d_spec μ)^{−1/2}.
pub fn central_mass_ratio(nu: &SpectralParams) -> Result<f64> {
    let stade = stade_rhs(nu, nu, 0.5)?.norm();
    let ball = plancherel_ball(nu, 1.0, BallScheme::Quadrature)?;
    Ok(stade * ball.value.sqrt())
}

/// Centers drawn uniformly from the ball ‖ν‖ ≤ `radius` in dimension n − 1.
pub fn random_centers(n: usize, count: usize, radius: f64, seed: u64) -> Vec<SpectralParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = n - 1;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-radius..radius)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            out.push(SpectralParams::from_nu(&v).expect("finite"));
        }
    }
    out
}

/// Columns n, nu, mu, s, lhs, rhs, rel_err; complex values as re+imi and
/// vectors joined with ';'.
pub fn write_stade_csv<W: Write>(rows: &[StadeCheck], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Domain(format!("csv: {e}"));
    w.write_record(["n", "nu", "mu", "s", "lhs", "rhs", "rel_err"])
        .map_err(err)?;
    let vec = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.16e}"))
            .collect::<Vec<_>>()
            .join(";")
    };
    let cx = |z: Complex64| format!("{:.16e}{:+.16e}i", z.re, z.im);
    for r in rows {
        w.write_record([
            r.n.to_string(),
            vec(&r.nu),
            vec(&r.mu),
            format!("{:.16e}", r.s),
            cx(r.lhs),
            cx(r.rhs),
            format!("{:.6e}", r.rel_err),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(nu: &[f64]) -> SpectralParams {
        SpectralParams::from_nu(nu).unwrap()
    }

    #[test]
    fn alpha_map_for_n3() {
        let p = params(&[0.4, -1.1]);
        let (a, b) = (0.4, -1.1);
        let want = [2.0 * a + b, -a + b, -a - 2.0 * b];
        for (x, y) in p.alpha.iter().zip(want) {
            assert_relative_eq!(*x, y, epsilon = 1e-15);
        }
        let back = SpectralParams::from_alpha(&p.alpha).unwrap();
        assert_relative_eq!(back.nu[0], a, epsilon = 1e-15);
        assert_relative_eq!(back.nu[1], b, epsilon = 1e-15);
        assert!(SpectralParams::from_alpha(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn g_at_two() {
        // (2/2π) tanh(π) = tanh(π)/π
        let v = plancherel_g(2.0);
        assert_relative_eq!(v, PI.tanh() / PI, max_relative = 1e-15);
        assert_relative_eq!(v, 0.317_123_251_189_915_7, max_relative = 1e-12);
        assert_relative_eq!(plancherel_g_gamma(2.0), v, max_relative = 1e-12);
        assert_eq!(plancherel_density(&params(&[0.0])), 0.0);
    }

    #[test]
    fn density_forms_agree() {
        for nu in [vec![0.3], vec![0.3, -0.8], vec![1.5, -0.2, 0.7]] {
            let p = params(&nu);
            assert_relative_eq!(
                plancherel_density(&p),
                plancherel_density_alpha(&p),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                plancherel_density(&p),
                plancherel_density_gamma(&p),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn ball_two_schemes_agree() {
        let c = params(&[0.0]);
        let q = plancherel_ball(&c, 1.0, BallScheme::Quadrature).unwrap();
        let m = plancherel_ball(
            &c,
            1.0,
            BallScheme::MonteCarlo {
                samples: 400_000,
                seed: 5,
            },
        )
        .unwrap();
        assert!(((q.value - m.value) / q.value).abs() < 0.01, "{q:?} {m:?}");
        // ∫_{−1}^{1} G(2t) dt by an independent rule
        let direct = GaussLegendre::new(80).integrate(-1.0, 1.0, |t| plancherel_g(2.0 * t));
        assert_relative_eq!(q.value, direct, max_relative = 1e-10);
    }

    #[test]
    fn whittaker_gl2_normalizations() {
        let spec = |norm| WhittakerSpec {
            params: params(&[0.0]),
            normalization: norm,
        };
        let k0 = bessel_k(Complex64::new(0.0, 0.0), TAU).unwrap().value.re;
        let classical = whittaker(&spec(WhittakerNormalization::Classical), &[1.0]).unwrap();
        assert_relative_eq!(classical.re, 2.0 * PI.sqrt() * k0, max_relative = 1e-14);
        let paper = whittaker(&spec(WhittakerNormalization::Paper), &[1.0]).unwrap();
        // Γ_R(1) = 1
        assert_relative_eq!(paper.re, 2.0 * k0, max_relative = 1e-14);
        assert!(whittaker(&spec(WhittakerNormalization::Paper), &[1e-4]).is_err());
    }

    #[test]
    fn stade_gl2_at_a_point() {
        let p = params(&[0.7]);
        let c = stade_check(&p, &p, 1.0).unwrap();
        assert!(c.rel_err < 1e-8, "{c:?}");
        let q = params(&[-0.4]);
        let c = stade_check(&p, &q, 0.5).unwrap();
        assert!(c.rel_err < 1e-8, "{c:?}");
    }

    #[test]
    fn stade_gl3() {
        let p = params(&[0.2, 0.1]);
        let c = stade_check(&p, &p, 1.0).unwrap();
        assert!(c.rel_err < 1e-6, "{c:?}");
        assert!(c.lhs_err < 1e-5 * c.rhs.norm());
        let q = params(&[-0.3, 0.25]);
        let c = stade_check(&p, &q, 0.8).unwrap();
        assert!(c.rel_err < 1e-6, "{c:?}");
    }

    #[test]
    fn gl3_self_dual_symmetry() {
        let p = params(&[0.3, 0.3]);
        let w = Gl3Whittaker::new(&p, 1.0, 1.0).unwrap();
        let a = w.completed(0.4, 1.3);
        let b = w.completed(1.3, 0.4);
        assert!((a - b).norm() < 1e-10 * a.norm(), "{a} {b}");
    }

    #[test]
    fn whittaker_decays() {
        for nu in [vec![0.9], vec![0.4, -0.2]] {
            let spec = WhittakerSpec {
                params: params(&nu),
                normalization: WhittakerNormalization::Completed,
            };
            let at = |y: f64| {
                let mut v = vec![1.0; nu.len()];
                v[0] = y;
                whittaker(&spec, &v).unwrap().norm()
            };
            // W(2y)/W(y) shrinks with y, faster than any fixed power
            let ratios: Vec<f64> = [1.0, 2.0, 4.0]
                .iter()
                .map(|&y| at(2.0 * y) / at(y))
                .collect();
            assert!(ratios[0] < 1e-2, "ν = {nu:?}: {ratios:?}");
            assert!(
                ratios.windows(2).all(|w| w[1] < 1e-2 * w[0]),
                "ν = {nu:?}: {ratios:?}"
            );
        }
    }

    #[test]
    fn diagonal_ratio_at_mu_equal_nu() {
        // at μ = ν the ratio is Γ_R(s)^n / (2 Γ_R(ns)), whatever ν is
        for s in [0.5, 1.0, 1.5] {
            let a = diagonal_gamma_ratio(&params(&[0.3]), s).unwrap();
            let b = diagonal_gamma_ratio(&params(&[7.0]), s).unwrap();
            let want = (2.0 * ln_gamma_r(Complex64::new(s, 0.0)).re
                - ln_gamma_r(Complex64::new(2.0 * s, 0.0)).re)
                .exp()
                / 2.0;
            assert_relative_eq!(a, want, max_relative = 1e-12);
            assert_relative_eq!(b, want, max_relative = 1e-12);
        }
    }
}
