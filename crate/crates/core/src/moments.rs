//! Period integrals over the standard fundamental domain
//! F = {|x| ≤ 1/2, |z| ≥ 1} and the second-moment chain
//!
//! S(k)/k ≪ Σ_g |Λ*(f×ḡ,1/2)|²/‖g‖² = Σ_g |⟨fE*(·,1/2), g⟩|²/‖g‖²
//!        ≤ ‖fE*(·,1/2)‖² ≪ ⟨fE*(·,1+ε), f⟩ = Λ*(f×f̄, 1+ε).
//!
//! F is split into the rectangle [−1/2, 1/2] × [1, Y] and the strip below
//! y = 1 bounded by the unit circle. On the rectangle the integrand is
//! periodic in x, so a trapezoidal rule with more nodes than its Fourier
//! bandwidth is exact up to series truncation; y uses composite
//! Gauss–Legendre. The strip uses a Gauss–Legendre tensor rule in the
//! curvilinear coordinates (x, t), y = b(x) + t(1 − b(x)).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::Write;

use crate::eisenstein::EisensteinProfile;
use crate::error::{Error, Result};
use crate::modforms::{eigenforms, HeckeEigenform};
use crate::numerics::par_map;
use crate::numerics::quadrature::{CompensatedComplex, CompensatedSum, Estimate, GaussLegendre};
use crate::numerics::zeta::completed_zeta;
use crate::rankin_selberg::{petersson_norm, LValueResult, RankinSelberg};

/// The integrand restricted to a horizontal line.
pub struct Row<'a> {
    /// Largest |m| with a nonzero e(mx) coefficient, when the row is a
    /// trigonometric polynomial.
    pub bandwidth: Option<usize>,
    eval: Box<dyn Fn(f64) -> Complex64 + 'a>,
}

impl<'a> Row<'a> {
    pub fn new(bandwidth: Option<usize>, eval: impl Fn(f64) -> Complex64 + 'a) -> Self {
        Self {
            bandwidth,
            eval: Box::new(eval),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.eval)(x)
    }
}

/// A Γ-invariant function F(z) (the y^k weight is applied by the quadrature).
pub trait Integrand: Sync {
    fn at_height(&self, y: f64) -> Result<Row<'_>>;
}

/// A factor of a product integrand.
#[derive(Debug, Clone, Copy)]
pub enum Factor<'a> {
    Form(&'a HeckeEigenform),
    ConjForm(&'a HeckeEigenform),
    /// completed E*(z, s)
    EStar(Complex64),
    ConjEStar(Complex64),
    /// E(z, s) = E*(z, s)/ξ(2s)
    E(Complex64),
}

/// Product of cusp forms and Eisenstein series, times a constant.
#[derive(Debug, Clone)]
pub struct Product<'a> {
    pub factors: Vec<Factor<'a>>,
    pub scale: Complex64,
    /// Absolute tolerance on y^{k/2}|f| for each truncated cusp-form series.
    pub series_tol: f64,
}

impl<'a> Product<'a> {
    pub fn new(factors: Vec<Factor<'a>>) -> Self {
        Self {
            factors,
            scale: Complex64::new(1.0, 0.0),
            series_tol: 1e-17,
        }
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.scale *= c;
        self
    }
}

enum Prepared {
    Series {
        weights: Vec<f64>,
        conj: bool,
    },
    Eisenstein {
        profile: EisensteinProfile,
        scale: Complex64,
        conj: bool,
    },
}

impl Integrand for Product<'_> {
    fn at_height(&self, y: f64) -> Result<Row<'_>> {
        let mut parts = Vec::with_capacity(self.factors.len());
        let mut bandwidth = 0;
        for factor in &self.factors {
            match *factor {
                Factor::Form(f) | Factor::ConjForm(f) => {
                    let tol = self.series_tol * y.powf(-0.5 * f.weight as f64);
                    let terms = f.terms_needed(y, tol);
                    if terms > f.horizon() {
                        return Err(Error::Truncation {
                            needed: terms,
                            available: f.horizon(),
                        });
                    }
                    bandwidth += terms;
                    parts.push(Prepared::Series {
                        weights: f.fourier_weights(y, terms),
                        conj: matches!(factor, Factor::ConjForm(_)),
                    });
                }
                Factor::EStar(s) | Factor::ConjEStar(s) | Factor::E(s) => {
                    let profile = EisensteinProfile::new(y, s)?;
                    bandwidth += profile.cosine.len();
                    let scale = match factor {
                        Factor::E(_) => completed_zeta(2.0 * s)?.inv(),
                        _ => Complex64::new(1.0, 0.0),
                    };
                    parts.push(Prepared::Eisenstein {
                        profile,
                        scale,
                        conj: matches!(factor, Factor::ConjEStar(_)),
                    });
                }
            }
        }
        let scale = self.scale;
        Ok(Row::new(Some(bandwidth), move |x| {
            let mut v = scale;
            for p in &parts {
                let (w, conj) = match p {
                    Prepared::Series { weights, conj } => {
                        (HeckeEigenform::eval_with_weights(weights, x), *conj)
                    }
                    Prepared::Eisenstein {
                        profile,
                        scale,
                        conj,
                    } => (profile.eval(x) * scale, *conj),
                };
                v *= if conj { w.conj() } else { w };
            }
            v
        }))
    }
}

/// A plain function F(x, y), sampled without bandwidth information.
pub struct Pointwise<F> {
    pub f: F,
}

impl<F: Fn(f64, f64) -> Complex64 + Sync> Integrand for Pointwise<F> {
    fn at_height(&self, y: f64) -> Result<Row<'_>> {
        Ok(Row::new(None, move |x| (self.f)(x, y)))
    }
}

/// Truncation height and refinement limits of the fundamental-domain rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainQuadrature {
    pub y_max: f64,
    /// Target error relative to ∫|F| y^k dμ.
    pub tolerance: f64,
    pub max_levels: usize,
}

impl DomainQuadrature {
    /// Y_max = max(10, (k + 40)/2π), past which y^k e^{−4πy} has decayed
    /// far below double precision relative to the bulk.
    pub fn for_weight(k: u32) -> Self {
        Self {
            y_max: (10.0f64).max((k as f64 + 40.0) / TAU),
            tolerance: 1e-11,
            max_levels: 5,
        }
    }
}

const PANEL_ORDER: usize = 16;

struct Partial {
    value: Complex64,
    mass: f64,
    evaluations: usize,
}

fn combine(parts: Vec<Result<Partial>>) -> Result<Partial> {
    let mut value = CompensatedComplex::default();
    let mut mass = CompensatedSum::new();
    let mut evaluations = 0;
    for p in parts {
        let p = p?;
        value.add(p.value);
        mass.add(p.mass);
        evaluations += p.evaluations;
    }
    Ok(Partial {
        value: value.value(),
        mass: mass.value(),
        evaluations,
    })
}

/// ∫_{−1/2}^{1/2} row(x) dx by the periodic trapezoidal rule.
fn row_integral(row: &Row, level: usize) -> (Complex64, f64, usize) {
    let m = match row.bandwidth {
        Some(b) => b + 1,
        None => 64 << level,
    };
    let mut sum = CompensatedComplex::default();
    let mut mass = 0.0;
    for j in 0..m {
        let v = row.eval(-0.5 + (j as f64 + 0.5) / m as f64);
        mass += v.norm();
        sum.add(v);
    }
    (sum.value() / m as f64, mass / m as f64, m)
}

fn upper_region(
    integrand: &dyn Integrand,
    k: u32,
    q: &DomainQuadrature,
    level: usize,
    rule: &GaussLegendre,
) -> Result<Partial> {
    let panels = (((q.y_max - 1.0) / 0.5).ceil() as usize).max(1) << level;
    let width = (q.y_max - 1.0) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let lo = 1.0 + p as f64 * width;
        nodes.extend(rule.on(lo, lo + width));
    }
    let parts = par_map(&nodes, |&(y, w)| -> Result<Partial> {
        let row = integrand.at_height(y)?;
        let (v, m, n) = row_integral(&row, level);
        let measure = w * y.powf(k as f64 - 2.0);
        Ok(Partial {
            value: v * measure,
            mass: m * measure,
            evaluations: n,
        })
    });
    combine(parts)
}

fn lower_strip(
    integrand: &dyn Integrand,
    k: u32,
    level: usize,
    rule: &GaussLegendre,
) -> Result<Partial> {
    let panels = 2usize << level;
    let y_rule = GaussLegendre::new(8 * (level + 1));
    let width = 0.5 / panels as f64;
    let mut xs = Vec::with_capacity(2 * panels * PANEL_ORDER);
    for p in 0..panels {
        let lo = p as f64 * width;
        for (x, w) in rule.on(lo, lo + width) {
            xs.push((x, w));
            xs.push((-x, w));
        }
    }
    let parts = par_map(&xs, |&(x, wx)| -> Result<Partial> {
        let b = (1.0 - x * x).sqrt();
        let mut value = CompensatedComplex::default();
        let mut mass = 0.0;
        for (y, wy) in y_rule.on(b, 1.0) {
            let v = integrand.at_height(y)?.eval(x) * (wx * wy * y.powf(k as f64 - 2.0));
            mass += v.norm();
            value.add(v);
        }
        Ok(Partial {
            value: value.value(),
            mass,
            evaluations: y_rule.nodes.len(),
        })
    });
    combine(parts)
}

/// Refine one region until two successive levels agree.
fn refine(
    q: &DomainQuadrature,
    mut at_level: impl FnMut(usize) -> Result<Partial>,
) -> Result<Estimate<Complex64>> {
    let mut prev = at_level(0)?;
    let mut evaluations = prev.evaluations;
    for level in 1..=q.max_levels {
        let next = at_level(level)?;
        evaluations += next.evaluations;
        let delta = (next.value - prev.value).norm();
        if delta <= q.tolerance * next.mass.max(1e-300) {
            return Ok(Estimate {
                value: next.value,
                error: delta,
                evaluations,
            });
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        levels: q.max_levels,
        best: prev.value.norm(),
        delta: f64::NAN,
    })
}

/// ∫_F F(z) y^k dx dy / y² with an error estimate.
pub fn petersson_inner_quadrature(
    integrand: &dyn Integrand,
    k: u32,
    q: &DomainQuadrature,
) -> Result<Estimate<Complex64>> {
    if !(q.y_max > 1.0) || !(q.tolerance > 0.0) {
        return Err(Error::Domain(
            "quadrature needs y_max > 1 and a positive tolerance".into(),
        ));
    }
    let rule = GaussLegendre::new(PANEL_ORDER);
    let upper = refine(q, |l| upper_region(integrand, k, q, l, &rule))?;
    let lower = refine(q, |l| lower_strip(integrand, k, l, &rule))?;
    Ok(Estimate {
        value: upper.value + lower.value,
        error: upper.error + lower.error,
        evaluations: upper.evaluations + lower.evaluations,
    })
}

/// ⟨f, g⟩ = ∫_F f ḡ y^k dμ.
pub fn inner_product(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<Estimate<Complex64>> {
    same_weight(f, g)?;
    let integrand = Product::new(vec![Factor::Form(f), Factor::ConjForm(g)]);
    petersson_inner_quadrature(
        &integrand,
        f.weight,
        &DomainQuadrature::for_weight(f.weight),
    )
}

fn same_weight(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<()> {
    if f.weight != g.weight {
        return Err(Error::Domain(format!(
            "weights differ: {} vs {}",
            f.weight, g.weight
        )));
    }
    Ok(())
}

/// Both sides of ⟨fE*(·,s), g⟩ = Λ*(f×ḡ, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnfoldCheck {
    pub s: Complex64,
    pub period: Estimate<Complex64>,
    pub afe: LValueResult,
    pub rel_diff: f64,
}

impl UnfoldCheck {
    pub fn agrees(&self, rel_tol: f64) -> bool {
        let combined = self.period.error + self.afe.abs_err_estimate;
        (self.period.value - self.afe.value).norm() <= rel_tol * self.afe.value.norm() + combined
    }
}

pub fn unfold_inner(f: &HeckeEigenform, g: &HeckeEigenform, s: Complex64) -> Result<UnfoldCheck> {
    same_weight(f, g)?;
    let rs = RankinSelberg::new(f, g)?;
    unfold_with(&rs, f, g, s)
}

fn unfold_with(
    rs: &RankinSelberg,
    f: &HeckeEigenform,
    g: &HeckeEigenform,
    s: Complex64,
) -> Result<UnfoldCheck> {
    let afe = rs.lambda_star(s)?;
    let integrand = Product::new(vec![Factor::Form(f), Factor::EStar(s), Factor::ConjForm(g)]);
    let period = petersson_inner_quadrature(
        &integrand,
        f.weight,
        &DomainQuadrature::for_weight(f.weight),
    )?;
    Ok(UnfoldCheck {
        s,
        period,
        afe,
        rel_diff: (period.value - afe.value).norm() / afe.value.norm(),
    })
}

/// ‖fE*(·,1/2)‖² and the regularized quantities that bound it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub eps: f64,
    /// ∫_F |f|² |E*(z,1/2)|² y^k dμ
    pub norm_fe: f64,
    pub norm_fe_err: f64,
    /// ∫_F |f|² E(z,1+ε) y^k dμ by quadrature
    pub regularized_quadrature: f64,
    pub regularized_quadrature_err: f64,
    /// the same integral unfolded: Γ(k+ε)/((4π)^{1+ε}Γ(k)) · L(f×f̄,1+ε)/ζ(2+2ε)
    pub regularized_bound: f64,
    /// sup over sampled z ∈ F of |E*(z,1/2)|² / E(z,1+ε)
    pub pointwise_constant: f64,
}

impl NormEstimate {
    pub fn bound_holds(&self) -> bool {
        self.norm_fe
            <= self.pointwise_constant * self.regularized_bound * (1.0 + 1e-9) + self.norm_fe_err
    }
}

/// sup of |E*(z,1/2)|²/E(z,1+ε) over a grid on F truncated at `y_max`.
pub fn pointwise_constant(eps: f64, y_max: f64) -> Result<f64> {
    let half = Complex64::new(0.5, 0.0);
    let reg = Complex64::new(1.0 + eps, 0.0);
    let xi = completed_zeta(2.0 * reg)?.re;
    let ys: Vec<f64> = (0..96)
        .map(|i| (3f64.sqrt() / 2.0) * (y_max / (3f64.sqrt() / 2.0)).powf(i as f64 / 95.0))
        .collect();
    let rows = par_map(&ys, |&y| -> Result<f64> {
        let a = EisensteinProfile::new(y, half)?;
        let b = EisensteinProfile::new(y, reg)?;
        let mut best: f64 = 0.0;
        for j in 0..=24 {
            let x = 0.5 * j as f64 / 24.0;
            if x * x + y * y < 1.0 {
                continue;
            }
            let e = b.eval(x).re / xi;
            best = best.max(a.eval(x).norm_sqr() / e);
        }
        Ok(best)
    });
    rows.into_iter().try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

pub fn norm_f_estar(f: &HeckeEigenform, eps: f64) -> Result<NormEstimate> {
    let rs = RankinSelberg::new(f, f)?;
    norm_with(&rs, f, eps)
}

fn norm_with(rs: &RankinSelberg, f: &HeckeEigenform, eps: f64) -> Result<NormEstimate> {
    if !(0.01..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("eps = {eps} outside [0.01, 1]")));
    }
    let q = DomainQuadrature::for_weight(f.weight);
    let half = Complex64::new(0.5, 0.0);
    let reg = Complex64::new(1.0 + eps, 0.0);
    let fe = petersson_inner_quadrature(
        &Product::new(vec![
            Factor::Form(f),
            Factor::ConjForm(f),
            Factor::EStar(half),
            Factor::ConjEStar(half),
        ]),
        f.weight,
        &q,
    )?;
    let regq = petersson_inner_quadrature(
        &Product::new(vec![Factor::Form(f), Factor::ConjForm(f), Factor::E(reg)]),
        f.weight,
        &q,
    )?;
    let xi = completed_zeta(2.0 * reg)?.re;
    let lambda = rs.lambda_star(reg)?.value.re;
    Ok(NormEstimate {
        eps,
        norm_fe: fe.value.re,
        norm_fe_err: fe.error,
        regularized_quadrature: regq.value.re,
        regularized_quadrature_err: regq.error,
        regularized_bound: lambda / xi,
        pointwise_constant: pointwise_constant(eps, q.y_max)?,
    })
}

/// Values attached to one g in the eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairValues {
    pub g_index: usize,
    pub g_a2: f64,
    /// L(f×ḡ, 1/2) from the approximate functional equation
    pub central_value: f64,
    pub central_value_err: f64,
    pub lambda_star_afe: f64,
    pub lambda_star_period: f64,
    pub lambda_star_period_err: f64,
    /// ‖g‖² from the Rankin–Selberg residue
    pub norm_g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// lhs ≤ C · rhs with the reported constant
    Ll,
    /// lhs = rhs to the stated tolerance
    Eq,
    /// lhs ≤ rhs up to the combined error
    Le,
}

/// One link of the moment chain; `constant` is lhs / rhs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub error: f64,
    pub holds: bool,
}

impl ChainLink {
    fn new(name: &str, relation: Relation, lhs: f64, rhs: f64, error: f64, holds: bool) -> Self {
        Self {
            name: name.to_string(),
            relation,
            lhs,
            rhs,
            constant: lhs / rhs,
            error,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub k: u32,
    pub dim: usize,
    pub f_index: usize,
    pub horizon: usize,
    pub pairs: Vec<PairValues>,
    /// Σ_g |L(f×ḡ, 1/2)|²
    pub s_k: f64,
    pub norm_fe: f64,
    pub norm_fe_err: f64,
    /// Σ_g |⟨fE*(·,1/2), g⟩|² / ‖g‖² by the period route
    pub bessel_rhs: f64,
    pub bessel_lhs: f64,
    pub bessel_slack: f64,
    pub bessel_err: f64,
    pub norm: NormEstimate,
    /// Λ*(f×f̄, 1+ε)
    pub lambda_star_reg: f64,
    pub chain: Vec<ChainLink>,
}

impl MomentReport {
    pub fn all_links_hold(&self) -> bool {
        self.chain.iter().all(|l| l.holds)
    }
}

/// Options for [`moment_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentOptions {
    pub eps: f64,
    /// Coefficient horizon; `None` picks one from the weight.
    pub horizon: Option<usize>,
    /// Relative agreement demanded of two-route equalities.
    pub rel_tol: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            eps: 0.1,
            horizon: None,
            rel_tol: 1e-4,
        }
    }
}

/// Enough coefficients for the Rankin–Selberg kernels at Re s ≥ 1/2 and the
/// cusp-form series on F.
pub fn moment_horizon(k: u32) -> usize {
    300 + 12 * k as usize
}

pub fn moment_sum(k: u32, opts: &MomentOptions) -> Result<MomentReport> {
    let horizon = opts.horizon.unwrap_or_else(|| moment_horizon(k));
    let forms = eigenforms(k, horizon)?;
    let f = &forms[0];
    let half = Complex64::new(0.5, 0.0);
    let diag = RankinSelberg::new(f, f)?;
    let mut pairs = Vec::with_capacity(forms.len());
    let mut afe_checks = Vec::new();
    for g in &forms {
        let rs = if g.index == f.index {
            diag.clone()
        } else {
            RankinSelberg::new(f, g)?
        };
        let central = rs.l_value(half)?;
        let check = unfold_with(&rs, f, g, half)?;
        pairs.push(PairValues {
            g_index: g.index,
            g_a2: g.a(2),
            central_value: central.value.re,
            central_value_err: central.abs_err_estimate,
            lambda_star_afe: check.afe.value.re,
            lambda_star_period: check.period.value.re,
            lambda_star_period_err: check.period.error,
            norm_g: petersson_norm(g)?,
        });
        afe_checks.push(check);
    }
    let s_k: f64 = pairs.iter().map(|p| p.central_value.powi(2)).sum();
    let spectral_afe: f64 = pairs
        .iter()
        .map(|p| p.lambda_star_afe.powi(2) / p.norm_g)
        .sum();
    let spectral_period: f64 = pairs
        .iter()
        .map(|p| p.lambda_star_period.powi(2) / p.norm_g)
        .sum();
    let spectral_err: f64 = pairs
        .iter()
        .map(|p| 2.0 * p.lambda_star_period.abs() * p.lambda_star_period_err / p.norm_g)
        .sum();

    let norm = norm_with(&diag, f, opts.eps)?;
    let reg = Complex64::new(1.0 + opts.eps, 0.0);
    let lambda_reg = diag.lambda_star(reg)?;
    let xi = completed_zeta(2.0 * reg)?.re;
    // ⟨fE*(·,1+ε), f⟩ = ξ(2+2ε) ∫|f|² E(z,1+ε) y^k dμ
    let reg_period = xi * norm.regularized_quadrature;
    let reg_period_err = xi * norm.regularized_quadrature_err;

    let bessel_err = spectral_err + norm.norm_fe_err;
    let kf = k as f64;
    let chain = vec![
        ChainLink::new(
            "moment-vs-spectral",
            Relation::Ll,
            s_k / kf,
            spectral_afe,
            0.0,
            spectral_afe > 0.0,
        ),
        ChainLink::new(
            "unfolding-central",
            Relation::Eq,
            spectral_afe,
            spectral_period,
            spectral_err,
            afe_checks.iter().all(|c| c.agrees(opts.rel_tol)),
        ),
        ChainLink::new(
            "bessel",
            Relation::Le,
            spectral_period,
            norm.norm_fe,
            bessel_err,
            spectral_period <= norm.norm_fe + bessel_err,
        ),
        ChainLink::new(
            "regularization",
            Relation::Ll,
            norm.norm_fe,
            reg_period,
            norm.norm_fe_err + reg_period_err,
            norm.bound_holds(),
        ),
        ChainLink::new(
            "unfolding-regularized",
            Relation::Eq,
            reg_period,
            lambda_reg.value.re,
            reg_period_err + lambda_reg.abs_err_estimate,
            (reg_period - lambda_reg.value.re).abs()
                <= opts.rel_tol * lambda_reg.value.re.abs() + reg_period_err,
        ),
    ];
    Ok(MomentReport {
        k,
        dim: forms.len(),
        f_index: f.index,
        horizon,
        pairs,
        s_k,
        norm_fe: norm.norm_fe,
        norm_fe_err: norm.norm_fe_err,
        bessel_rhs: spectral_period,
        bessel_lhs: norm.norm_fe,
        bessel_slack: norm.norm_fe - spectral_period,
        bessel_err,
        norm,
        lambda_star_reg: lambda_reg.value.re,
        chain,
    })
}

/// Least-squares slope of log S(k) against log k.
pub fn log_log_slope(points: &[(u32, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, s)| s.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One CSV row per report: k, dim, S_k, norm_fE, bessel_slack, slope_so_far.
pub fn write_moment_csv<W: Write>(reports: &[MomentReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Domain(format!("csv: {e}"));
    w.write_record(["k", "dim", "S_k", "norm_fE", "bessel_slack", "slope_so_far"])
        .map_err(err)?;
    let mut seen = Vec::new();
    for r in reports {
        seen.push((r.k, r.s_k));
        let slope = log_log_slope(&seen)
            .map(|s| format!("{s:.6}"))
            .unwrap_or_default();
        w.write_record([
            r.k.to_string(),
            r.dim.to_string(),
            format!("{:.16e}", r.s_k),
            format!("{:.16e}", r.norm_fe),
            format!("{:.6e}", r.bessel_slack),
            slope,
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(())
}
