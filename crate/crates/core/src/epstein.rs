//! Epstein zeta functions Z(M, ρ) = ½ Σ_{a≠0} (a^t M a)^{−ρ}, the GL(n)
//! maximal-parabolic Eisenstein series built from them, and the sampling
//! check of the bound
//!
//! E*(z, 1/2) ≪ det(z)^{1/2+ε} + det(z̃)^{1/2+ε} on the Siegel set.
//!
//! The continuation uses the theta integral split at t_0:
//!
//! ```text
//! π^{−ρ}Γ(ρ) Z(M, ρ) = ½ Σ_{a≠0} (πQ(a))^{−ρ} Γ(ρ, π t_0 Q(a))
//!   + ½ det(M)^{−1/2} Σ_{b≠0} (πQ'(b))^{ρ−n/2} Γ(n/2 − ρ, πQ'(b)/t_0)
//!   − ½ t_0^ρ/ρ − ½ det(M)^{−1/2} t_0^{ρ−n/2}/(n/2 − ρ),
//! ```
//!
//! with Q' the form of M^{−1}. Any t_0 > 0 gives the same value.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::gamma::ln_gamma;
use crate::numerics::incomplete_gamma::upper_incomplete_gamma;
use crate::numerics::par_map;
use crate::numerics::quadrature::CompensatedComplex;
use crate::symmetric_space::{GramMatrix, UpperHalfPoint};

/// Terms with π t_0 Q(a) beyond this are below 1e−18 of the polar part.
const CUTOFF: f64 = 46.0;

/// Quadratic form Q(a) = |R a|² with R upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLattice {
    r: DMatrix<f64>,
}

impl QuadraticLattice {
    /// Q(a) = |T a|² for any invertible T, triangularized by QR.
    pub fn from_factor(t: &DMatrix<f64>) -> Result<Self> {
        let n = t.nrows();
        if n == 0 || t.ncols() != n {
            return Err(Error::Domain("lattice factor must be square".into()));
        }
        let r = t.clone().qr().r();
        let scale = r.amax();
        if (0..n).any(|i| r[(i, i)].abs() <= 1e-300_f64.max(1e-15 * scale * f64::EPSILON)) {
            return Err(Error::Singular("lattice factor is singular".into()));
        }
        Ok(Self { r })
    }

    pub fn from_gram(m: &GramMatrix) -> Result<Self> {
        let l = m
            .matrix()
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Singular("Gram matrix is not positive definite".into()))?
            .l();
        Self::from_factor(&l.transpose())
    }

    /// Q(a) = a^t z z^t a = |z^t a|².
    pub fn from_point(z: &UpperHalfPoint) -> Result<Self> {
        Self::from_factor(&z.matrix().transpose())
    }

    /// The form of M^{−1}: |R^{−t} b|².
    pub fn dual(&self) -> Result<Self> {
        let inv = self
            .r
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("lattice factor is singular".into()))?;
        Self::from_factor(&inv.transpose())
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    /// √det M.
    pub fn sqrt_det(&self) -> f64 {
        (0..self.dim()).map(|i| self.r[(i, i)].abs()).product()
    }

    pub fn value(&self, a: &[i64]) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let v: f64 = (i..n).map(|j| self.r[(i, j)] * a[j] as f64).sum();
                v * v
            })
            .sum()
    }

    /// Visit every a ≠ 0 with Q(a) ≤ bound whose last nonzero entry is
    /// positive (one of each ±a pair), by Fincke–Pohst traversal.
    pub fn enumerate_half(&self, bound: f64, mut visit: impl FnMut(&[i64], f64)) {
        let n = self.dim();
        let mut a = vec![0i64; n];
        self.descend(n, bound, 0.0, true, &mut a, &mut visit);
    }

    /// `level` counts the coordinates not yet fixed; coordinates are fixed
    /// from the last one down. `zero_so_far` tracks whether all fixed
    /// coordinates vanish, to keep only one of ±a.
    fn descend(
        &self,
        level: usize,
        bound: f64,
        used: f64,
        zero_so_far: bool,
        a: &mut [i64],
        visit: &mut impl FnMut(&[i64], f64),
    ) {
        if level == 0 {
            if !zero_so_far {
                visit(a, used);
            }
            return;
        }
        let i = level - 1;
        let n = self.dim();
        let d = self.r[(i, i)];
        let shift: f64 = (i + 1..n)
            .map(|j| self.r[(i, j)] * a[j] as f64)
            .sum::<f64>()
            / d;
        let room = bound - used;
        if room < 0.0 {
            return;
        }
        let width = room.sqrt() / d.abs();
        let center = -shift;
        let mut lo = (center - width).ceil() as i64;
        let hi = (center + width).floor() as i64;
        if zero_so_far {
            lo = lo.max(0);
        }
        for v in lo..=hi {
            let t = d * (v as f64 + shift);
            a[i] = v;
            self.descend(
                level - 1,
                bound,
                used + t * t,
                zero_so_far && v == 0,
                a,
                visit,
            );
        }
        a[i] = 0;
    }

    /// All Q(a) ≤ bound over the half lattice.
    pub fn values_up_to(&self, bound: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.enumerate_half(bound, |_, q| out.push(q));
        out
    }
}

fn check_rho(rho: Complex64, n: usize) -> Result<()> {
    let half_n = n as f64 / 2.0;
    if rho.norm() < 1e-12 || (rho - half_n).norm() < 1e-12 {
        return Err(Error::Pole {
            function: "epstein_z",
            at: format!("{rho}"),
        });
    }
    Ok(())
}

/// Σ_q (πq)^{−a} Γ(a, πq/scale) for the listed values q; by symmetry the
/// caller passes half-lattice values, which absorbs the factor ½.
fn incomplete_sum(values: &[f64], a: Complex64, scale: f64) -> Result<Complex64> {
    let terms = par_map(values, |&q| -> Result<Complex64> {
        let x = PI * q;
        Ok(upper_incomplete_gamma(a, x / scale)? * (-a * x.ln()).exp())
    });
    let mut acc = CompensatedComplex::default();
    for t in terms {
        acc.add(t?);
    }
    Ok(acc.value())
}

/// π^{−ρ}Γ(ρ) Z(M, ρ) with the split at `t0`.
pub fn epstein_lambda_split(
    lattice: &QuadraticLattice,
    rho: Complex64,
    t0: f64,
) -> Result<Complex64> {
    let n = lattice.dim();
    check_rho(rho, n)?;
    if !(t0 > 0.0) {
        return Err(Error::Domain("split point must be positive".into()));
    }
    let half_n = n as f64 / 2.0;
    let dual = lattice.dual()?;
    let inv_sqrt_det = 1.0 / lattice.sqrt_det();
    let direct = incomplete_sum(&lattice.values_up_to(CUTOFF / (PI * t0)), rho, 1.0 / t0)?;
    let mirrored = incomplete_sum(&dual.values_up_to(CUTOFF * t0 / PI), half_n - rho, t0)?;
    let lt0 = t0.ln();
    let polar =
        (rho * lt0).exp() / rho + ((rho - half_n) * lt0).exp() * inv_sqrt_det / (half_n - rho);
    Ok(direct + mirrored * inv_sqrt_det - polar * 0.5)
}

/// Split point balancing the two lattice sums.
pub fn balanced_split(lattice: &QuadraticLattice) -> f64 {
    lattice.sqrt_det().powf(-2.0 / lattice.dim() as f64)
}

pub fn epstein_lambda(lattice: &QuadraticLattice, rho: Complex64) -> Result<Complex64> {
    epstein_lambda_split(lattice, rho, balanced_split(lattice))
}

/// Z(M, ρ), analytically continued to ρ ∉ {0, n/2}.
pub fn epstein_z(m: &GramMatrix, rho: Complex64) -> Result<Complex64> {
    let lattice = QuadraticLattice::from_gram(m)?;
    let lambda = epstein_lambda(&lattice, rho)?;
    // divide by π^{−ρ}Γ(ρ); at non-positive integers Γ has poles and Z = 0
    let lg = ln_gamma(rho);
    if !lg.re.is_finite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(lambda * (rho * PI.ln() - lg).exp())
}

/// ½ Σ_{Q(a) ≤ R²} Q(a)^{−ρ} plus the integral of the tail beyond R; needs
/// Re ρ > n/2 + 1 so that the lattice-point error is small.
pub fn epstein_direct(m: &GramMatrix, rho: Complex64, radius: f64) -> Result<Complex64> {
    let n = m.dim();
    let half_n = n as f64 / 2.0;
    if rho.re <= half_n + 1.0 {
        return Err(Error::Domain(format!(
            "direct sum needs Re ρ > {}, got {}",
            half_n + 1.0,
            rho.re
        )));
    }
    let lattice = QuadraticLattice::from_gram(m)?;
    let mut acc = CompensatedComplex::default();
    lattice.enumerate_half(radius * radius, |_, q| acc.add((-rho * q.ln()).exp()));
    let ball_surface =
        n as f64 * PI.powf(half_n) / ln_gamma(Complex64::new(half_n + 1.0, 0.0)).re.exp();
    let tail = 0.5 * ball_surface / lattice.sqrt_det() * ((half_n - rho) * 2.0 * radius.ln()).exp()
        / (2.0 * rho - n as f64);
    Ok(acc.value() + tail)
}

/// Relative residual of π^{−ρ}Γ(ρ)Z(M, ρ) = det(M)^{−1/2} π^{ρ−n/2}Γ(n/2−ρ)Z(M^{−1}, n/2−ρ).
/// The right side is built from the Cholesky factor of M^{−1} with a
/// different split, so the two sides share no intermediate sums.
pub fn functional_equation_residual(m: &GramMatrix, rho: Complex64) -> Result<f64> {
    let n = m.dim() as f64;
    let lat = QuadraticLattice::from_gram(m)?;
    let lhs = epstein_lambda(&lat, rho)?;
    let inv = QuadraticLattice::from_gram(&m.inverse_gram()?)?;
    let rhs =
        epstein_lambda_split(&inv, n / 2.0 - rho, balanced_split(&inv) * 1.7)? / m.det().sqrt();
    Ok((lhs - rhs).norm() / lhs.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlnEisensteinEval {
    pub value: Complex64,
    pub det: f64,
    /// set when a removable singularity had to be resolved by a limit; the
    /// completed theta representation is finite for every s ∉ {0, 1}, so
    /// this stays false
    pub limit_evaluated: bool,
}

/// E*(z, s) = det(z)^s Γ_R(ns) Z(z z^t, ns/2) = det(z)^s π^{−ns/2}Γ(ns/2) Z.
pub fn eisenstein_star_gln(z: &UpperHalfPoint, s: Complex64) -> Result<GlnEisensteinEval> {
    if s.norm() < 1e-12 || (s - 1.0).norm() < 1e-12 {
        return Err(Error::Pole {
            function: "eisenstein_star_gln",
            at: format!("{s}"),
        });
    }
    let n = z.n() as f64;
    let lattice = QuadraticLattice::from_point(z)?;
    let lambda = epstein_lambda(&lattice, s * n / 2.0)?;
    let det = z.det();
    Ok(GlnEisensteinEval {
        value: lambda * (s * det.ln()).exp(),
        det,
        limit_evaluated: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Sample {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub det_z: f64,
    pub det_dual: f64,
    pub e_star: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub n: usize,
    pub eps: f64,
    pub samples: Vec<Lemma1Sample>,
    pub max_ratio: f64,
    pub argmax: usize,
    pub median_ratio: f64,
    /// least-squares slope of log ratio against log det(z)
    pub slope: f64,
}

impl Lemma1Report {
    pub fn max_over_median(&self) -> f64 {
        self.max_ratio / self.median_ratio
    }
}

/// |E*(z, 1/2)| / (det(z)^{1/2+ε} + det(z̃)^{1/2+ε}) at Siegel-set points with
/// y_j log-uniform in [√3/2, 10³] and x_ij uniform in [0, 1].
pub fn lemma1_check(n: usize, samples: usize, eps: f64, seed: u64) -> Result<Lemma1Report> {
    if !(2..=4).contains(&n) {
        return Err(Error::Domain(format!("n = {n} outside 2..=4")));
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, 1/2]")));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = ((3f64.sqrt() / 2.0).ln(), 1e3f64.ln());
    let points: Vec<UpperHalfPoint> = (0..samples)
        .map(|_| {
            let x: Vec<f64> = (0..n * (n - 1) / 2)
                .map(|_| rng.gen_range(0.0..1.0))
                .collect();
            let y: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(lo..hi).exp()).collect();
            UpperHalfPoint::new(n, &x, &y).expect("valid sample")
        })
        .collect();
    let half = Complex64::new(0.5, 0.0);
    let evaluated = par_map(&points, |z| -> Result<Lemma1Sample> {
        let e = eisenstein_star_gln(z, half)?;
        let det_dual = z.dual()?.det();
        let p = 0.5 + eps;
        let ratio = e.value.norm() / (e.det.powf(p) + det_dual.powf(p));
        Ok(Lemma1Sample {
            y: z.y().to_vec(),
            x: z.x_upper(),
            det_z: e.det,
            det_dual,
            e_star: e.value.re,
            ratio,
        })
    });
    let samples: Vec<Lemma1Sample> = evaluated.into_iter().collect::<Result<_>>()?;
    let (argmax, max_ratio) =
        samples
            .iter()
            .map(|s| s.ratio)
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, r)| {
                if r > best.1 {
                    (i, r)
                } else {
                    best
                }
            });
    let mut sorted: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let m = sorted.len();
    let median_ratio = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (s.det_z.ln(), s.ratio.ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    Ok(Lemma1Report {
        n,
        eps,
        samples,
        max_ratio,
        argmax,
        median_ratio,
        slope,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Columns n, y_1..y_{n−1}, det_z, det_ztilde, E_star, ratio.
pub fn write_lemma1_csv<W: Write>(report: &Lemma1Report, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Domain(format!("csv: {e}"));
    let mut header = vec!["n".to_string()];
    header.extend((1..report.n).map(|i| format!("y{i}")));
    header.extend(["det_z", "det_ztilde", "E_star", "ratio"].map(String::from));
    w.write_record(&header).map_err(err)?;
    for s in &report.samples {
        let mut row = vec![report.n.to_string()];
        row.extend(s.y.iter().map(|v| format!("{v:.16e}")));
        row.extend([s.det_z, s.det_dual, s.e_star, s.ratio].map(|v| format!("{v:.16e}")));
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(())
}

/// A random positive-definite n×n matrix A A^t + I/2 with entries of A in [−1, 1].
pub fn random_gram(n: usize, rng: &mut impl Rng) -> GramMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let m = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
    GramMatrix::new(m).expect("positive definite by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::eisenstein_star_gl2;
    use crate::numerics::zeta::{dirichlet_beta, zeta};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn enumeration_counts_gaussian_integers() {
        // a² + b² ≤ 25 has 81 solutions, so 40 pairs ±a
        let lat = QuadraticLattice::from_gram(&GramMatrix::identity(2)).unwrap();
        let vals = lat.values_up_to(25.0);
        assert_eq!(vals.len(), 40);
        assert!(vals.iter().all(|q| *q <= 25.0 + 1e-12));
    }

    #[test]
    fn square_lattice_identity() {
        for rho in [0.7, 1.3, 2.5] {
            let z = epstein_z(&GramMatrix::identity(2), c(rho, 0.0)).unwrap();
            let want = 2.0 * zeta(c(rho, 0.0)).unwrap() * dirichlet_beta(c(rho, 0.0));
            assert_relative_eq!(z.re, want.re, max_relative = 1e-10);
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn continuation_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=4 {
            let m = random_gram(n, &mut rng);
            let rho = c(n as f64 / 2.0 + 3.0, 0.4);
            let a = epstein_z(&m, rho).unwrap();
            let b = epstein_direct(&m, rho, 30.0).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm(), "n = {n}: {a} vs {b}");
        }
    }

    #[test]
    fn independent_of_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lat = QuadraticLattice::from_gram(&random_gram(3, &mut rng)).unwrap();
        let rho = c(0.4, 2.0);
        let a = epstein_lambda_split(&lat, rho, 0.6).unwrap();
        let b = epstein_lambda_split(&lat, rho, 1.9).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm(), "{a} {b}");
    }

    #[test]
    fn functional_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=4 {
            let m = random_gram(n, &mut rng);
            let r = functional_equation_residual(&m, c(0.3, 1.1)).unwrap();
            assert!(r < 1e-10, "n = {n}: {r}");
        }
        assert!(matches!(
            epstein_z(&GramMatrix::identity(3), c(1.5, 0.0)),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            epstein_z(&GramMatrix::identity(3), c(0.0, 0.0)),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn gl2_routes_agree() {
        for (x, y, s) in [
            (0.1, 1.3, c(0.3, 0.7)),
            (0.45, 0.9, c(0.5, 0.0)),
            (-0.2, 6.0, c(1.4, -2.0)),
        ] {
            let z = UpperHalfPoint::gl2(x, y).unwrap();
            let a = eisenstein_star_gln(&z, s).unwrap().value;
            let b = eisenstein_star_gl2(&z, s).unwrap().value;
            assert!(
                (a - b).norm() < 1e-10 * b.norm(),
                "z = {x}+{y}i s = {s}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn gl3_finite_at_half_and_automorphic() {
        let z = UpperHalfPoint::diagonal(&[2.0, 3.0]).unwrap();
        let e = eisenstein_star_gln(&z, c(0.5, 0.0)).unwrap();
        assert!(e.value.re.is_finite() && !e.limit_evaluated);
        let gamma = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, -1.0, 1.0, 2.0, 1.0]);
        let w = UpperHalfPoint::new(3, &[0.3, 0.6, 0.1], &[1.2, 0.8]).unwrap();
        let s = c(0.7, 0.4);
        let a = eisenstein_star_gln(&w, s).unwrap().value;
        let b = eisenstein_star_gln(&w.act(&gamma).unwrap(), s)
            .unwrap()
            .value;
        assert!((a - b).norm() < 1e-10 * a.norm(), "{a} vs {b}");
    }

    #[test]
    fn lemma1_small_sample() {
        let r = lemma1_check(2, 40, 0.05, 1).unwrap();
        assert_eq!(r.samples.len(), 40);
        assert!(
            r.max_ratio.is_finite() && r.max_over_median() < 10.0,
            "{r:?}"
        );
    }
}
