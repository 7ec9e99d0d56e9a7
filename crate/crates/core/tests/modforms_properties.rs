use num_complex::Complex64;
use period_moments::modforms::{cusp_dimension, eigenforms, miller_basis};
use period_moments::rankin_selberg::{petersson_norm, RankinSelberg};
use proptest::prelude::*;
use std::sync::OnceLock;

fn divisors(n: usize) -> usize {
    (1..=n).filter(|d| n.is_multiple_of(*d)).count()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn primes(limit: usize) -> Vec<usize> {
    (2..=limit)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect()
}

#[test]
fn hecke_invariants_across_weights() {
    let horizon = 600;
    for k in (12..=40).step_by(2).filter(|&k| cusp_dimension(k) > 0) {
        for f in eigenforms(k, horizon).unwrap() {
            let tol = 1e-9;
            for n in 1..=horizon {
                assert!(f.lambda(n).abs() <= divisors(n) as f64 + tol, "k={k} n={n}");
            }
            for p in primes(23) {
                assert!(
                    f.lambda(p).abs() <= 2.0 + tol,
                    "Deligne fails at k={k} p={p}"
                );
                let mut prev = 1.0;
                let mut pr = p;
                while pr * p <= horizon {
                    let lhs = f.lambda(p) * f.lambda(pr);
                    let rhs = f.lambda(pr * p) + prev;
                    assert!(
                        (lhs - rhs).abs() <= tol,
                        "Hecke relation fails at k={k} p^r={pr}"
                    );
                    prev = f.lambda(pr);
                    pr *= p;
                }
            }
            for m in 2..=24 {
                for n in 2..=24 {
                    if gcd(m, n) == 1 {
                        assert!((f.lambda(m * n) - f.lambda(m) * f.lambda(n)).abs() <= tol);
                    }
                }
            }
        }
    }
}

#[test]
fn miller_basis_is_reproducible_and_integral() {
    let a = miller_basis(36, 200).unwrap();
    let b = miller_basis(36, 200).unwrap();
    assert_eq!(a, b);
    for i in 0..a.dimension {
        for j in 1..=a.dimension {
            let want = if i + 1 == j { 1 } else { 0 };
            assert_eq!(*a.coeff(i, j), want.into());
        }
    }
}

#[test]
fn galois_swap_exchanges_norms() {
    let forms = eigenforms(24, 600).unwrap();
    let norms: Vec<f64> = forms.iter().map(|f| petersson_norm(f).unwrap()).collect();
    let mut swapped = forms.clone();
    swapped.reverse();
    let swapped_norms: Vec<f64> = swapped.iter().map(|f| petersson_norm(f).unwrap()).collect();
    assert_eq!(norms[0].to_bits(), swapped_norms[1].to_bits());
    assert_eq!(norms[1].to_bits(), swapped_norms[0].to_bits());
    assert!(norms.iter().all(|v| *v > 0.0));
    assert!(
        (norms[0] - norms[1]).abs() > 1e-6 * norms[0],
        "embeddings give distinct norms"
    );
}

fn pair(k: u32) -> &'static RankinSelberg {
    static P24: OnceLock<RankinSelberg> = OnceLock::new();
    static P28: OnceLock<RankinSelberg> = OnceLock::new();
    let cell = if k == 24 { &P24 } else { &P28 };
    cell.get_or_init(|| {
        let forms = eigenforms(k, 300 + 12 * k as usize).unwrap();
        RankinSelberg::new(&forms[0], &forms[1]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn rankin_selberg_functional_equation(re in 0.2f64..0.8, im in -2.0f64..2.0, big in proptest::bool::ANY) {
        let rs = pair(if big { 28 } else { 24 });
        let s = Complex64::new(re, im);
        let a = rs.completed_lambda(s).unwrap().value;
        let b = rs.completed_lambda(1.0 - s).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-8 * a.norm(), "{} vs {}", a, b);
    }
}

#[test]
fn central_values_are_real() {
    for k in [24u32, 28] {
        let forms = eigenforms(k, 300 + 12 * k as usize).unwrap();
        for f in &forms {
            for g in &forms {
                let v = RankinSelberg::new(f, g)
                    .unwrap()
                    .l_value(Complex64::new(0.5, 0.0))
                    .unwrap();
                assert!(
                    v.value.im.abs() <= 1e-12 * v.value.re.abs().max(1.0),
                    "k={k}: {}",
                    v.value
                );
            }
        }
    }
}
