//! Level-one holomorphic cusp forms: Miller basis, Hecke eigenforms and
//! evaluation of the normalized Fourier series
//! f(z) = Σ λ(n) (4πn)^{(k−1)/2} e(nz) / √Γ(k).

mod eigen;
pub mod qexp;
mod space;

pub use eigen::{char_poly, hecke_eigenbasis, hecke_matrix, real_roots, HeckeEigenform};
pub use space::{cusp_dimension, default_horizon, miller_basis, CuspFormSpace};

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numerics::gamma::ln_gamma_real;
use crate::symmetric_space::UpperHalfPoint;

/// Eigenbasis of S_k with coefficients to `horizon`.
pub fn eigenforms(k: u32, horizon: usize) -> Result<Vec<HeckeEigenform>> {
    hecke_eigenbasis(&miller_basis(k, horizon)?)
}

impl HeckeEigenform {
    /// log of (4πn)^{(k−1)/2} e^{−2πny} / √Γ(k).
    fn log_scale(&self, n: usize, y: f64) -> f64 {
        let k = self.weight as f64;
        0.5 * (k - 1.0) * (4.0 * PI * n as f64).ln() - TAU * n as f64 * y - 0.5 * ln_gamma_real(k)
    }

    /// Bound on the n-th term using |λ(n)| ≤ d(n) ≤ 2√n.
    fn term_bound(&self, n: usize, y: f64) -> f64 {
        2.0 * (n as f64).sqrt() * self.log_scale(n, y).exp()
    }

    /// Bound on Σ_{n > terms} of the series at height y, or None if the
    /// terms are still increasing there.
    pub fn tail_bound(&self, terms: usize, y: f64) -> Option<f64> {
        let n = terms as f64 + 1.0;
        let ratio = ((n + 1.0) / n).powf(0.5 * self.weight as f64) * (-TAU * y).exp();
        (ratio < 1.0).then(|| self.term_bound(terms + 1, y) / (1.0 - ratio))
    }

    /// Smallest truncation whose tail bound at height y is below `abs_tol`.
    pub fn terms_needed(&self, y: f64, abs_tol: f64) -> usize {
        let mut n = 1;
        loop {
            if let Some(t) = self.tail_bound(n, y) {
                if t <= abs_tol {
                    return n;
                }
            }
            n += 1;
            if n > 10_000_000 {
                return n;
            }
        }
    }

    /// Coefficients w_n with f(x + iy) = Σ_{n ≤ terms} w_n e(nx).
    pub fn fourier_weights(&self, y: f64, terms: usize) -> Vec<f64> {
        (1..=terms)
            .map(|n| self.lambda(n) * self.log_scale(n, y).exp())
            .collect()
    }

    /// f(x + iy) from precomputed weights.
    pub fn eval_with_weights(weights: &[f64], x: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, TAU * x);
        let mut e = step;
        let mut sum = Complex64::new(0.0, 0.0);
        for w in weights {
            sum += e * *w;
            e *= step;
        }
        sum
    }
}

/// Value of the normalized series at a point of the upper half plane, with
/// the discarded tail guaranteed below `abs_tol`.
pub fn eval_cusp_form(
    f: &HeckeEigenform,
    z: &UpperHalfPoint,
    terms: usize,
    abs_tol: f64,
) -> Result<Complex64> {
    if z.n() != 2 {
        return Err(Error::Domain(
            "cusp forms live on the n = 2 upper half plane".into(),
        ));
    }
    let (x, y) = (z.x_entry(0, 1), z.y()[0]);
    if y < 0.1 {
        return Err(Error::Domain(format!("y = {y} below 0.1")));
    }
    let needed = f.terms_needed(y, abs_tol);
    let ok = f.tail_bound(terms, y).is_some_and(|t| t <= abs_tol);
    if !ok || terms > f.horizon() {
        return Err(Error::Truncation {
            needed,
            available: terms.min(f.horizon()),
        });
    }
    Ok(HeckeEigenform::eval_with_weights(
        &f.fourier_weights(y, terms),
        x,
    ))
}

/// Write a(n) for every form as CSV with columns n, `a_n[0]`, `a_n[1]`, …
pub fn write_coefficients_csv<W: Write>(forms: &[HeckeEigenform], out: W) -> Result<()> {
    let horizon = forms.iter().map(|f| f.horizon()).min().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n".to_string()];
    header.extend((0..forms.len()).map(|i| format!("a_n[{i}]")));
    w.write_record(&header).map_err(io_err)?;
    for n in 1..=horizon {
        let mut row = vec![n.to_string()];
        row.extend(forms.iter().map(|f| format!("{:.16e}", f.a(n))));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(())
}

/// Read a table written by [`write_coefficients_csv`].
pub fn read_coefficients_csv<R: Read>(weight: u32, input: R) -> Result<Vec<HeckeEigenform>> {
    let mut r = csv::Reader::from_reader(input);
    let cols = r.headers().map_err(io_err)?.len();
    if cols < 2 {
        return Err(Error::Domain(
            "coefficient table has no embedding columns".into(),
        ));
    }
    let mut data: Vec<Vec<TwoFloat>> = vec![vec![TwoFloat::from(0.0)]; cols - 1];
    for rec in r.records() {
        let rec = rec.map_err(io_err)?;
        for (i, col) in data.iter_mut().enumerate() {
            let v: f64 = rec[i + 1]
                .parse()
                .map_err(|_| Error::Domain(format!("bad number {:?}", &rec[i + 1])))?;
            col.push(TwoFloat::from(v));
        }
    }
    Ok(data
        .into_iter()
        .enumerate()
        .map(|(i, a)| HeckeEigenform::from_coefficients(weight, i, a))
        .collect())
}

fn io_err(e: csv::Error) -> Error {
    Error::Domain(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn periodic_and_modular() {
        let f = &eigenforms(12, 200).unwrap()[0];
        let z = Complex64::new(0.3, 1.1);
        let at = |w: Complex64| {
            eval_cusp_form(f, &UpperHalfPoint::gl2(w.re, w.im).unwrap(), 150, 1e-15).unwrap()
        };
        let v = at(z);
        let shifted = at(z + 1.0);
        assert!((v - shifted).norm() < 1e-13 * v.norm());
        let inv = -z.inv();
        assert_relative_eq!(
            at(inv).norm(),
            z.norm().powi(12) * v.norm(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn vanishes_at_the_cusp() {
        let f = &eigenforms(12, 100).unwrap()[0];
        let a = eval_cusp_form(f, &UpperHalfPoint::gl2(0.1, 5.0).unwrap(), 40, 1e-20).unwrap();
        let b = eval_cusp_form(f, &UpperHalfPoint::gl2(0.1, 20.0).unwrap(), 40, 1e-20).unwrap();
        assert!(b.norm() < 1e-30 * a.norm().max(1e-300) + 1e-40);
    }

    #[test]
    fn truncation_is_reported() {
        let f = &eigenforms(12, 100).unwrap()[0];
        let z = UpperHalfPoint::gl2(0.0, 0.2).unwrap();
        assert!(matches!(
            eval_cusp_form(f, &z, 5, 1e-12),
            Err(Error::Truncation { .. })
        ));
        let low = UpperHalfPoint::gl2(0.0, 0.05).unwrap();
        assert!(eval_cusp_form(f, &low, 100, 1.0).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let forms = eigenforms(24, 40).unwrap();
        let mut buf = Vec::new();
        write_coefficients_csv(&forms, &mut buf).unwrap();
        let back = read_coefficients_csv(24, buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        for (f, g) in forms.iter().zip(&back) {
            for n in 1..=40 {
                assert_eq!(f.a(n), g.a(n));
            }
        }
    }
}
