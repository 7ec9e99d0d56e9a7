use period_moments::spectral::{
    alpha_to_nu, conductor_proxy, nu_to_alpha, plancherel_density, plancherel_g,
    plancherel_g_gamma, stade_check, SpectralParams,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn g_formulas_agree(x in -50.0f64..50.0) {
        let a = plancherel_g(x);
        let b = plancherel_g_gamma(x);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{} vs {}", a, b);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn alpha_maps_roundtrip(nu in proptest::collection::vec(-10.0f64..10.0, 1..5)) {
        let alpha = nu_to_alpha(&nu);
        let sum: f64 = alpha.iter().sum();
        prop_assert!(sum.abs() < 1e-12);
        let back = alpha_to_nu(&alpha);
        for (a, b) in nu.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let p = SpectralParams::from_nu(&nu).unwrap();
        prop_assert!(plancherel_density(&p) >= 0.0);
    }

    #[test]
    fn conductor_proxy_is_monotone(a in -5.0f64..5.0, b in -5.0f64..5.0, grow in 0.0f64..3.0) {
        let p = SpectralParams::from_nu(&[a, b]).unwrap();
        let q = SpectralParams::from_nu(&[a + grow * a.signum(), b + grow * b.signum()]).unwrap();
        // scaling both coordinates outward by the same sign pattern can still
        // shrink |ν_1 + ν_2|; compare only when every partial sum grows
        let grows = p.partial_sums().iter().zip(q.partial_sums()).all(|(x, y)| y.abs() >= x.abs());
        if grows {
            prop_assert!(conductor_proxy(&q, &q).unwrap() >= conductor_proxy(&p, &p).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn stade_gl2_random(nu in -2.0f64..2.0, mu in -2.0f64..2.0, which in 0usize..3) {
        let s = [0.5, 1.0, 1.5][which];
        let a = SpectralParams::from_nu(&[nu]).unwrap();
        let b = SpectralParams::from_nu(&[mu]).unwrap();
        let c = stade_check(&a, &b, s).unwrap();
        prop_assert!(c.rel_err <= 1e-8, "{:?}", c);
    }
}

#[test]
fn conductor_proxy_at_origin() {
    let p = SpectralParams::from_nu(&[0.0, 0.0]).unwrap();
    assert_eq!(conductor_proxy(&p, &p).unwrap(), 1.0);
}
