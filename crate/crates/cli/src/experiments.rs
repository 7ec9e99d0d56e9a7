use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use period_moments::eisenstein::{
    eisenstein_residue_gl2, eisenstein_star_gl2, eisenstein_star_residue_gl2,
};
use period_moments::epstein::{
    eisenstein_star_gln, epstein_z, functional_equation_residual, lemma1_check, random_gram,
    write_lemma1_csv,
};
use period_moments::modforms::{cusp_dimension, eigenforms};
use period_moments::moments::{
    inner_product, log_log_slope, moment_horizon, moment_sum, unfold_inner, write_moment_csv,
    MomentOptions,
};
use period_moments::numerics::zeta::{dirichlet_beta, zeta};
use period_moments::rankin_selberg::petersson_norm;
use period_moments::spectral::{
    central_mass_ratio, diagonal_gamma_ratio, plancherel_ball, random_centers, stade_check,
    write_stade_csv, BallScheme, SpectralParams,
};
use period_moments::symmetric_space::{GramMatrix, UpperHalfPoint};

use crate::report::{sci, Check};
use crate::CliError;

pub struct Outcome {
    pub csv: Vec<u8>,
    pub checks: Vec<Check>,
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))
}

fn row(w: &mut csv::Writer<Vec<u8>>, fields: &[String]) -> Result<(), CliError> {
    w.write_record(fields)
        .map_err(|e| CliError::Numeric(e.to_string()))
}

pub fn moment(k_min: u32, k_max: u32, eps: f64) -> Result<Outcome, CliError> {
    if k_min < 12 || k_min > k_max {
        return Err(CliError::Config(format!(
            "need 12 ≤ k-min ≤ k-max, got {k_min}..{k_max}"
        )));
    }
    let opts = MomentOptions {
        eps,
        ..MomentOptions::default()
    };
    let mut reports = Vec::new();
    for k in (k_min..=k_max).filter(|k| k % 2 == 0 && cusp_dimension(*k) > 0) {
        reports.push(moment_sum(k, &opts)?);
    }
    let mut csv = Vec::new();
    write_moment_csv(&reports, &mut csv)?;
    let mut checks = Vec::new();
    for r in &reports {
        checks.push(Check::at_least(
            format!("k{}:bessel_slack", r.k),
            r.bessel_slack,
            -r.bessel_err,
        ));
        for link in &r.chain {
            checks.push(Check::flag(
                format!("k{}:{}", r.k, link.name),
                link.lhs,
                link.rhs,
                link.holds,
            ));
        }
    }
    // the growth exponent is only meaningful over a real sweep
    if reports.len() >= 5 {
        let pts: Vec<(u32, f64)> = reports.iter().map(|r| (r.k, r.s_k)).collect();
        let slope = log_log_slope(&pts).unwrap_or(f64::NAN);
        checks.push(Check::at_most("log_log_slope", slope, 1.3));
        if let Some(first) = reports.iter().find(|r| r.k == 12) {
            let base = first.s_k / 12f64.powf(1.3);
            let worst = reports
                .iter()
                .map(|r| r.s_k / (r.k as f64).powf(1.3) / base)
                .fold(0.0, f64::max);
            checks.push(Check::at_most(
                "max_S_over_k1.3_relative_to_k12",
                worst,
                1.0,
            ));
        }
    }
    Ok(Outcome { csv, checks })
}

pub fn unfold_check(weights: &[u32], ss: &[f64]) -> Result<Outcome, CliError> {
    let mut w = csv_writer();
    row(
        &mut w,
        &[
            "k",
            "f",
            "g",
            "s",
            "period_re",
            "period_im",
            "afe_re",
            "afe_im",
            "rel_diff",
        ]
        .map(String::from),
    )?;
    let mut checks = Vec::new();
    for &k in weights {
        let forms = eigenforms(k, moment_horizon(k))?;
        for f in &forms {
            for g in &forms {
                for &s in ss {
                    let c = unfold_inner(f, g, Complex64::new(s, 0.0))?;
                    row(
                        &mut w,
                        &[
                            k.to_string(),
                            f.index.to_string(),
                            g.index.to_string(),
                            sci(s),
                            sci(c.period.value.re),
                            sci(c.period.value.im),
                            sci(c.afe.value.re),
                            sci(c.afe.value.im),
                            format!("{:.6e}", c.rel_diff),
                        ],
                    )?;
                    checks.push(Check::at_most(
                        format!("k{k}:f{}g{}:s{s}", f.index, g.index),
                        c.rel_diff,
                        1e-4,
                    ));
                }
            }
        }
    }
    Ok(Outcome {
        csv: finish(w)?,
        checks,
    })
}

pub fn stade(n: usize, samples: usize, s: Option<f64>, seed: u64) -> Result<Outcome, CliError> {
    let (radius, tol) = match n {
        2 => (2.0, 1e-8),
        3 => (1.0, 1e-4),
        _ => {
            return Err(CliError::Config(format!(
                "stade supports n = 2, 3, not {n}"
            )))
        }
    };
    if let Some(s) = s {
        if !(0.5..=1.5).contains(&s) {
            return Err(CliError::Config(format!("s = {s} outside [0.5, 1.5]")));
        }
    }
    let nus = random_centers(n, samples, radius, seed);
    let mus = random_centers(n, samples, radius, seed.wrapping_add(1));
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (i, (nu, mu)) in nus.iter().zip(&mus).enumerate() {
        let s = s.unwrap_or(if n == 2 { [0.5, 1.0, 1.5][i % 3] } else { 1.0 });
        let c = stade_check(nu, mu, s)?;
        checks.push(Check::at_most(format!("sample{i}:rel_err"), c.rel_err, tol));
        rows.push(c);
    }
    let mut csv = Vec::new();
    write_stade_csv(&rows, &mut csv)?;
    Ok(Outcome { csv, checks })
}

pub fn plancherel(n: usize, centers: usize, radius: f64, seed: u64) -> Result<Outcome, CliError> {
    if !(2..=6).contains(&n) {
        return Err(CliError::Config(format!(
            "plancherel supports 2 ≤ n ≤ 6, not {n}"
        )));
    }
    let mut w = csv_writer();
    row(
        &mut w,
        &[
            "n",
            "center",
            "ball",
            "ball_err",
            "proxy",
            "ratio",
            "central_mass_ratio",
        ]
        .map(String::from),
    )?;
    let mut checks = Vec::new();
    let scheme = if n >= 5 {
        BallScheme::MonteCarlo {
            samples: 200_000,
            seed,
        }
    } else {
        BallScheme::Quadrature
    };
    for (i, c) in random_centers(n, centers, radius, seed).iter().enumerate() {
        let b = plancherel_ball(c, 1.0, scheme)?;
        checks.push(Check::within(
            format!("center{i}:ball_over_proxy"),
            b.ratio(),
            0.125,
            8.0,
        ));
        let central = if n == 2 {
            let r = central_mass_ratio(c)?;
            checks.push(Check::within(
                format!("center{i}:central_mass_ratio"),
                r,
                0.125,
                8.0,
            ));
            sci(r)
        } else {
            String::new()
        };
        let center = c.nu.iter().map(|v| sci(*v)).collect::<Vec<_>>().join(";");
        row(
            &mut w,
            &[
                n.to_string(),
                center,
                sci(b.value),
                sci(b.error),
                sci(b.proxy),
                sci(b.ratio()),
                central,
            ],
        )?;
    }
    if n == 2 {
        let p = SpectralParams::from_nu(&[0.0])?;
        for s in [0.5, 1.0, 1.5] {
            checks.push(Check::within(
                format!("diagonal_gamma_ratio:s{s}"),
                diagonal_gamma_ratio(&p, s)?,
                0.25,
                4.0,
            ));
        }
    }
    Ok(Outcome {
        csv: finish(w)?,
        checks,
    })
}

pub fn epstein_fe(n: usize, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    if !(2..=4).contains(&n) {
        return Err(CliError::Config(format!(
            "epstein-fe supports n = 2, 3, 4, not {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = csv_writer();
    row(
        &mut w,
        &["kind", "n", "sample", "rho_re", "rho_im", "rel_err"].map(String::from),
    )?;
    let mut checks = Vec::new();
    for i in 0..samples {
        let m = random_gram(n, &mut rng);
        let rho = Complex64::new(rng.gen_range(-1.0..3.0), rng.gen_range(-4.0..4.0));
        let r = functional_equation_residual(&m, rho)?;
        row(
            &mut w,
            &[
                "functional-equation".into(),
                n.to_string(),
                i.to_string(),
                sci(rho.re),
                sci(rho.im),
                format!("{r:.6e}"),
            ],
        )?;
        checks.push(Check::at_most(format!("sample{i}:fe_residual"), r, 1e-8));
    }
    if n == 2 {
        for (i, rho) in [0.7, 1.3, 2.5].into_iter().enumerate() {
            let r = Complex64::new(rho, 0.0);
            let z = epstein_z(&GramMatrix::identity(2), r)?;
            let want = 2.0 * zeta(r)? * dirichlet_beta(r);
            let err = (z - want).norm() / want.norm();
            row(
                &mut w,
                &[
                    "square-lattice".into(),
                    "2".into(),
                    i.to_string(),
                    sci(rho),
                    sci(0.0),
                    format!("{err:.6e}"),
                ],
            )?;
            checks.push(Check::at_most(
                format!("square_lattice:rho{rho}"),
                err,
                1e-8,
            ));
        }
        for i in 0..samples {
            let z = UpperHalfPoint::gl2(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..3.0))?;
            let s = Complex64::new(rng.gen_range(-0.5..1.5), rng.gen_range(-3.0..3.0));
            let a = eisenstein_star_gln(&z, s)?.value;
            let b = eisenstein_star_gl2(&z, s)?.value;
            let err = (a - b).norm() / b.norm();
            row(
                &mut w,
                &[
                    "fourier-route".into(),
                    "2".into(),
                    i.to_string(),
                    sci(s.re),
                    sci(s.im),
                    format!("{err:.6e}"),
                ],
            )?;
            checks.push(Check::at_most(
                format!("sample{i}:epstein_vs_fourier"),
                err,
                1e-8,
            ));
        }
    }
    Ok(Outcome {
        csv: finish(w)?,
        checks,
    })
}

pub fn lemma1(n: usize, samples: usize, eps: f64, seed: u64) -> Result<Outcome, CliError> {
    let r = lemma1_check(n, samples, eps, seed)?;
    let mut csv = Vec::new();
    write_lemma1_csv(&r, &mut csv)?;
    let checks = vec![
        Check::within("log_ratio_vs_log_det_slope", r.slope, -0.05, 0.02),
        Check::at_most("max_over_median", r.max_over_median(), 3.0),
    ];
    Ok(Outcome { csv, checks })
}

pub fn eisenstein_residue(seed: u64) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![(0.0, 1.0), (0.3, 2.7)];
    while points.len() < 5 {
        points.push((rng.gen_range(-0.5..0.5), rng.gen_range(0.5..3.0)));
    }
    let mut w = csv_writer();
    row(
        &mut w,
        &["x", "y", "residue", "residue_star"].map(String::from),
    )?;
    let mut checks = Vec::new();
    let mut values = Vec::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let z = UpperHalfPoint::gl2(*x, *y)?;
        let r = eisenstein_residue_gl2(&z)?;
        let rs = eisenstein_star_residue_gl2(&z)?;
        row(&mut w, &[sci(*x), sci(*y), sci(r), sci(rs)])?;
        checks.push(Check::at_most(
            format!("point{i}:abs_err_vs_3_over_pi"),
            (r - 3.0 / PI).abs(),
            1e-8,
        ));
        checks.push(Check::at_most(
            format!("point{i}:completed_abs_err_vs_half"),
            (rs - 0.5).abs(),
            1e-8,
        ));
        values.push(r);
    }
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(Check::at_most("spread", spread, 1e-8));
    Ok(Outcome {
        csv: finish(w)?,
        checks,
    })
}

pub fn norm_crosscheck(weights: &[u32]) -> Result<Outcome, CliError> {
    let mut w = csv_writer();
    row(
        &mut w,
        &["k", "index", "quadrature", "residue", "rel_diff"].map(String::from),
    )?;
    let mut checks = Vec::new();
    for &k in weights {
        for f in eigenforms(k, moment_horizon(k))? {
            let q = inner_product(&f, &f)?.value.re;
            let r = petersson_norm(&f)?;
            let d = ((q - r) / r).abs();
            row(
                &mut w,
                &[
                    k.to_string(),
                    f.index.to_string(),
                    sci(q),
                    sci(r),
                    format!("{d:.6e}"),
                ],
            )?;
            checks.push(Check::at_most(format!("k{k}:f{}", f.index), d, 1e-6));
        }
    }
    Ok(Outcome {
        csv: finish(w)?,
        checks,
    })
}
