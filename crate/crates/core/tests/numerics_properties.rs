use num_complex::Complex64;
use period_moments::numerics::{bessel_k, gamma, gamma_r, integrate, Domain, QuadratureSpec};
use proptest::prelude::*;
use std::f64::consts::TAU;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_r_duplication(re in 0.1f64..3.0, im in -10.0f64..10.0) {
        let s = Complex64::new(re, im);
        let lhs = gamma_r(s).unwrap() * gamma_r(s + 1.0).unwrap();
        let rhs = gamma(s) * 2.0 * (-s * TAU.ln()).exp();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn bessel_imaginary_order_is_real(t in -20.0f64..20.0, x in 0.01f64..40.0) {
        let k = bessel_k(Complex64::new(0.0, t), x).unwrap().value;
        prop_assert!(k.im.abs() <= 1e-14 * k.re.abs().max(1e-300) + 1e-300);
        let mirrored = bessel_k(Complex64::new(0.0, -t), x).unwrap().value;
        prop_assert!((k - mirrored).norm() <= 1e-14 * k.norm() + 1e-300);
    }
}

#[test]
fn integrate_is_bit_deterministic() {
    let spec = QuadratureSpec::double_exponential(1e-12);
    let f = |x: &[f64]| (-x[0]).exp() * (3.0 * x[0]).cos();
    let dom = Domain::HalfLine { start: 0.0 };
    let a = integrate(f, &dom, &spec).unwrap();
    let b = integrate(f, &dom, &spec).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert!((a.value - 0.1).abs() < 1e-12);
}

#[test]
fn k0_squared_mellin_against_stade_specialization() {
    // ∫ 4 K_0(2πy)² y^s dy/y = Γ_R(s)^4 / (2 Γ_R(2s)), here at s = 1/2
    let spec = QuadratureSpec::double_exponential(1e-12);
    let v = integrate(
        |x: &[f64]| {
            let y = x[0];
            let k = bessel_k(Complex64::new(0.0, 0.0), TAU * y)
                .unwrap()
                .value
                .re;
            4.0 * k * k * y.powf(-0.5)
        },
        &Domain::HalfLine { start: 0.0 },
        &spec,
    )
    .unwrap();
    let g = gamma_r(Complex64::new(0.5, 0.0)).unwrap().re;
    let want = g.powi(4) / (2.0 * gamma_r(Complex64::new(1.0, 0.0)).unwrap().re);
    assert!(
        (v.value - want).abs() < 1e-9 * want,
        "{} vs {}",
        v.value,
        want
    );
    assert!((gamma_r(Complex64::new(1.0, 0.0)).unwrap().re - 1.0).abs() < 1e-15);
}
