use nalgebra::DMatrix;
use num_complex::Complex64;
use period_moments::epstein::{
    eisenstein_star_gln, epstein_direct, epstein_z, functional_equation_residual, random_gram,
};
use period_moments::symmetric_space::{iwasawa, UpperHalfPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Product of random elementary integer matrices, determinant 1.
fn random_unimodular(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n, n);
    for _ in 0..4 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = rng.gen_range(-2i32..=2) as f64;
        let mut e = DMatrix::identity(n, n);
        e[(i, j)] = c;
        g *= e;
    }
    g
}

fn random_point(n: usize, rng: &mut impl Rng) -> UpperHalfPoint {
    let x: Vec<f64> = (0..n * (n - 1) / 2)
        .map(|_| rng.gen_range(0.0..1.0))
        .collect();
    let y: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.8..2.5)).collect();
    UpperHalfPoint::new(n, &x, &y).unwrap()
}

#[test]
fn continuation_equals_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..20 {
        let n = 2 + trial % 3;
        let m = random_gram(n, &mut rng);
        let rho = Complex64::new(
            n as f64 / 2.0 + rng.gen_range(3.0..5.0),
            rng.gen_range(-3.0..3.0),
        );
        let a = epstein_z(&m, rho).unwrap();
        let b = epstein_direct(&m, rho, 30.0).unwrap();
        assert!(
            (a - b).norm() <= 1e-10 * a.norm(),
            "n={n} ρ={rho}: {a} vs {b}"
        );
    }
}

#[test]
fn functional_equation_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        for _ in 0..10 {
            let m = random_gram(n, &mut rng);
            let rho = Complex64::new(rng.gen_range(-1.0..3.0), rng.gen_range(-4.0..4.0));
            let r = functional_equation_residual(&m, rho).unwrap();
            assert!(r <= 1e-8, "n={n} ρ={rho}: {r}");
        }
    }
}

#[test]
fn eisenstein_is_automorphic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=4 {
        for _ in 0..10 {
            let z = random_point(n, &mut rng);
            let gamma = random_unimodular(n, &mut rng);
            let s = Complex64::new(rng.gen_range(0.2..0.9), rng.gen_range(-2.0..2.0));
            let a = eisenstein_star_gln(&z, s).unwrap().value;
            let w = iwasawa(&(gamma * z.matrix())).unwrap();
            let b = eisenstein_star_gln(&w, s).unwrap().value;
            assert!((a - b).norm() <= 1e-8 * a.norm(), "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn dual_point_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 2..=4 {
        let z = random_point(n, &mut rng);
        let back = z.dual().unwrap().dual().unwrap();
        for (a, b) in z.y().iter().zip(back.y()) {
            assert!((a - b).abs() < 1e-12 * a);
        }
        for (a, b) in z.x_upper().iter().zip(back.x_upper()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
