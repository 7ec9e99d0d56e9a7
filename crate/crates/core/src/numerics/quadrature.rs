//! Quadrature engines: double-exponential rules for finite intervals and
//! half-lines, Gauss–Legendre tensor products on boxes, and a seeded
//! Monte-Carlo fallback.
//!
//! Error estimates are the difference between the last two refinement
//! levels (or the sample standard error for Monte-Carlo); they are not
//! rigorous enclosures.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Values a quadrature rule can accumulate.
pub trait QuadValue:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Integral estimate with the last-two-level error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    DoubleExponential,
    TensorProduct,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub max_levels: usize,
    pub tolerance: f64,
}

impl QuadratureSpec {
    pub fn new(scheme: Scheme, max_levels: usize, tolerance: f64) -> Result<Self> {
        if max_levels < 1 {
            return Err(Error::Domain("max_levels must be at least 1".into()));
        }
        if !(tolerance > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        Ok(Self {
            scheme,
            max_levels,
            tolerance,
        })
    }

    pub fn double_exponential(tolerance: f64) -> Self {
        Self {
            scheme: Scheme::DoubleExponential,
            max_levels: 10,
            tolerance,
        }
    }

    pub fn tensor(tolerance: f64) -> Self {
        Self {
            scheme: Scheme::TensorProduct,
            max_levels: 6,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// [start, ∞)
    HalfLine { start: f64 },
    /// Axis-aligned box; a one-dimensional box is an interval.
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

/// Integrate `f` over `domain` with the scheme in `spec`.
///
/// The integrand receives a coordinate slice of the domain's dimension.
pub fn integrate<T, F>(f: F, domain: &Domain, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T + Sync,
{
    match (domain, spec.scheme) {
        (Domain::HalfLine { start }, Scheme::DoubleExponential) => {
            exp_sinh(|x| f(&[x]), *start, spec.tolerance, spec.max_levels)
        }
        (Domain::HalfLine { .. }, _) => Err(Error::Domain(
            "half-line domains need the double-exponential scheme".into(),
        )),
        (Domain::Box { lower, upper }, scheme) => {
            if lower.len() != upper.len() || lower.is_empty() {
                return Err(Error::Domain(
                    "box bounds must have equal, positive length".into(),
                ));
            }
            match scheme {
                Scheme::DoubleExponential if lower.len() == 1 => tanh_sinh(
                    |x| f(&[x]),
                    lower[0],
                    upper[0],
                    spec.tolerance,
                    spec.max_levels,
                ),
                Scheme::DoubleExponential | Scheme::TensorProduct => {
                    tensor_gauss(&f, lower, upper, spec.tolerance, spec.max_levels)
                }
                Scheme::MonteCarlo { samples, seed } => {
                    Ok(monte_carlo(&f, lower, upper, samples, seed))
                }
            }
        }
    }
}

/// Tanh-sinh rule on [a, b].
pub fn tanh_sinh<T, F>(f: F, a: f64, b: f64, tol: f64, max_levels: usize) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let d = 0.5 * (b - a);
    let t_max = 6.5;
    // Node t maps to x = c + d tanh(π/2 sinh t); the distance to the nearer
    // endpoint is computed without cancellation.
    let eval = |t: f64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let gap = 2.0 * e / (1.0 + e); // 1 - tanh|u|
        let weight = d * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if gap == 0.0 || weight == 0.0 {
            return T::zero();
        }
        let x = if u >= 0.0 { b - d * gap } else { a + d * gap };
        if x <= a || x >= b {
            return T::zero();
        }
        f(x) * weight
    };
    let mut h = 0.5;
    let mut count = 0usize;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum = sum + eval(t) + eval(-t);
        count += 2;
        k += 1;
    }
    let mut estimate = sum * h;
    let mut delta = f64::INFINITY;
    for _ in 1..max_levels.max(2) {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum = sum + eval(t) + eval(-t);
            count += 2;
            k += 2;
        }
        let next = sum * h;
        delta = (next - estimate).magnitude();
        estimate = next;
        if delta <= tol * estimate.magnitude().max(1e-300) || delta < 1e-300 {
            return Ok(Estimate {
                value: estimate,
                error: delta,
                evaluations: count,
            });
        }
    }
    Err(Error::NonConvergence {
        levels: max_levels,
        best: estimate.magnitude(),
        delta,
    })
}

/// Exp-sinh rule on [a, ∞) for integrands that decay at infinity.
pub fn exp_sinh<T, F>(f: F, a: f64, tol: f64, max_levels: usize) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let eval = |t: f64| -> Option<T> {
        let u = FRAC_PI_2 * t.sinh();
        let g = u.exp();
        let w = FRAC_PI_2 * t.cosh() * g;
        let x = a + g;
        if !(x > a) || !x.is_finite() || !w.is_finite() {
            return None;
        }
        let v = f(x) * w;
        v.is_finite_value().then_some(v)
    };
    // Sweep t in one direction from `start` with stride `step` until the terms die out.
    let sweep = |start: f64, step: f64, scale: f64| -> (T, usize) {
        let mut acc = T::zero();
        let mut n = 0usize;
        let mut small = 0;
        let mut t = start;
        while t.abs() <= 6.0 {
            n += 1;
            match eval(t) {
                Some(v) => {
                    acc = acc + v;
                    if v.magnitude() <= 1e-18 * scale.max(acc.magnitude()) {
                        small += 1;
                        if small >= 3 {
                            break;
                        }
                    } else {
                        small = 0;
                    }
                }
                None => break,
            }
            t += step;
        }
        (acc, n)
    };
    let mut h = 0.5;
    let centre = eval(0.0).unwrap_or_else(T::zero);
    let scale = centre.magnitude();
    let (up, n1) = sweep(h, h, scale);
    let (down, n2) = sweep(-h, -h, scale);
    let mut sum = centre + up + down;
    let mut count = 1 + n1 + n2;
    let mut estimate = sum * h;
    let mut delta = f64::INFINITY;
    for _ in 1..max_levels.max(2) {
        let step = h;
        h *= 0.5;
        let scale = sum.magnitude() * h;
        let (up, n1) = sweep(h, step, scale / h);
        let (down, n2) = sweep(-h, -step, scale / h);
        sum = sum + up + down;
        count += n1 + n2;
        let next = sum * h;
        delta = (next - estimate).magnitude();
        estimate = next;
        if delta <= tol * estimate.magnitude().max(1e-300) || delta < 1e-300 {
            return Ok(Estimate {
                value: estimate,
                error: delta,
                evaluations: count,
            });
        }
    }
    Err(Error::NonConvergence {
        levels: max_levels,
        best: estimate.magnitude(),
        delta,
    })
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let d = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + d * x, d * w))
    }

    pub fn integrate<T: QuadValue>(&self, a: f64, b: f64, f: impl Fn(f64) -> T) -> T {
        self.on(a, b).fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre with `panels` equal panels of an `order`-point rule.
pub fn composite_gauss<T: QuadValue>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    f: impl Fn(f64) -> T,
) -> T {
    let width = (b - a) / panels as f64;
    (0..panels).fold(T::zero(), |acc, p| {
        let lo = a + p as f64 * width;
        acc + rule.integrate(lo, lo + width, &f)
    })
}

fn tensor_gauss<T, F>(
    f: &F,
    lower: &[f64],
    upper: &[f64],
    tol: f64,
    max_levels: usize,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T + Sync,
{
    let dim = lower.len();
    let mut order = 8usize;
    let mut previous: Option<T> = None;
    let mut delta = f64::INFINITY;
    let mut evaluations = 0;
    for _ in 0..max_levels.max(2) {
        let rule = GaussLegendre::new(order);
        let total = order.pow(dim as u32);
        let mut point = vec![0.0; dim];
        let mut acc = T::zero();
        for idx in 0..total {
            let mut rem = idx;
            let mut w = 1.0;
            for axis in 0..dim {
                let j = rem % order;
                rem /= order;
                let c = 0.5 * (lower[axis] + upper[axis]);
                let d = 0.5 * (upper[axis] - lower[axis]);
                point[axis] = c + d * rule.nodes[j];
                w *= d * rule.weights[j];
            }
            acc = acc + f(&point) * w;
        }
        evaluations += total;
        if let Some(prev) = previous {
            delta = (acc - prev).magnitude();
            if delta <= tol * acc.magnitude().max(1e-300) || delta < 1e-300 {
                return Ok(Estimate {
                    value: acc,
                    error: delta,
                    evaluations,
                });
            }
        }
        previous = Some(acc);
        order *= 2;
    }
    Err(Error::NonConvergence {
        levels: max_levels,
        best: previous.map(|v| v.magnitude()).unwrap_or(f64::NAN),
        delta,
    })
}

fn monte_carlo<T, F>(f: &F, lower: &[f64], upper: &[f64], samples: u64, seed: u64) -> Estimate<T>
where
    T: QuadValue,
    F: Fn(&[f64]) -> T + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = lower.len();
    let volume: f64 = lower.iter().zip(upper).map(|(a, b)| b - a).product();
    let mut point = vec![0.0; dim];
    let mut sum = T::zero();
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        for axis in 0..dim {
            point[axis] = rng.gen_range(lower[axis]..upper[axis]);
        }
        let v = f(&point);
        sum_sq += v.magnitude() * v.magnitude();
        sum = sum + v;
    }
    let n = samples.max(1) as f64;
    let mean = sum * (1.0 / n);
    let var = (sum_sq / n - mean.magnitude() * mean.magnitude()).max(0.0);
    Estimate {
        value: mean * volume,
        error: volume * (var / n).sqrt(),
        evaluations: samples as usize,
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}
