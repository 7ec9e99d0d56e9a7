//! Three operations exported to the browser page in `www/`.
//!
//! Every function returns a flat `Vec<f64>` so the JavaScript side needs no
//! glue beyond what wasm-bindgen generates. Errors come back as strings.

use num_complex::Complex64;
use period_moments::eisenstein::eisenstein_star_gl2;
use period_moments::epstein::{epstein_z, functional_equation_residual};
use period_moments::spectral::{stade_check, SpectralParams};
use period_moments::symmetric_space::{GramMatrix, UpperHalfPoint};
use wasm_bindgen::prelude::*;

fn js_err(e: period_moments::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Completed Eisenstein series E*(x + iy, s). Returns `[re, im, terms]`.
#[wasm_bindgen]
pub fn eisenstein(x: f64, y: f64, s_re: f64, s_im: f64) -> Result<Vec<f64>, JsValue> {
    let z = UpperHalfPoint::gl2(x, y).map_err(js_err)?;
    let e = eisenstein_star_gl2(&z, Complex64::new(s_re, s_im)).map_err(js_err)?;
    Ok(vec![e.value.re, e.value.im, e.n_fourier_terms as f64])
}

/// Whittaker inner product against the Gamma-factor product, for GL(2)
/// Langlands parameters (ν, −ν) and (μ, −μ).
/// Returns `[lhs_re, lhs_im, rhs_re, rhs_im, rel_err]`.
#[wasm_bindgen]
pub fn stade_gl2(nu: f64, mu: f64, s: f64) -> Result<Vec<f64>, JsValue> {
    let nu = SpectralParams::from_nu(&[nu]).map_err(js_err)?;
    let mu = SpectralParams::from_nu(&[mu]).map_err(js_err)?;
    let c = stade_check(&nu, &mu, s).map_err(js_err)?;
    Ok(vec![c.lhs.re, c.lhs.im, c.rhs.re, c.rhs.im, c.rel_err])
}

/// Epstein zeta of the binary form a·m² + 2b·mn + c·n².
/// Returns `[re, im, functional_equation_residual]`.
#[wasm_bindgen]
pub fn epstein(a: f64, b: f64, c: f64, rho_re: f64, rho_im: f64) -> Result<Vec<f64>, JsValue> {
    let m = GramMatrix::from_rows(&[vec![a, b], vec![b, c]]).map_err(js_err)?;
    let rho = Complex64::new(rho_re, rho_im);
    let z = epstein_z(&m, rho).map_err(js_err)?;
    let fe = functional_equation_residual(&m, rho).map_err(js_err)?;
    Ok(vec![z.re, z.im, fe])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice_matches_zeta_times_beta() {
        // half-lattice sum: Z(I, 2) = 2 ζ(2) β(2) = (π²/3)·Catalan
        let v = epstein(1.0, 0.0, 1.0, 2.0, 0.0).unwrap();
        let want = std::f64::consts::PI.powi(2) / 3.0 * 0.915_965_594_177_219;
        assert!((v[0] - want).abs() < 1e-12 * want);
        assert!(v[2] < 1e-8);
    }

    #[test]
    fn stade_point() {
        let v = stade_gl2(0.3, 0.7, 1.0).unwrap();
        assert!(v[4] < 1e-8);
    }

    #[test]
    fn eisenstein_is_real_on_real_axis_of_s() {
        let v = eisenstein(0.2, 1.3, 0.7, 0.0).unwrap();
        assert!(v[1].abs() < 1e-12 * v[0].abs());
    }
}
