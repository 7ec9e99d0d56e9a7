//! Truncated integer q-expansions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Coefficients c_0..c_N of a power series in q, truncated at q^N.
pub type QSeries = Vec<BigInt>;

pub fn sigma(power: u32, n: u64) -> BigInt {
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += BigInt::from(d).pow(power);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(power);
            }
        }
        d += 1;
    }
    total
}

/// E_4 = 1 + 240 Σ σ_3(n) q^n.
pub fn e4(horizon: usize) -> QSeries {
    let mut s: QSeries = (0..=horizon)
        .map(|n| BigInt::from(240) * sigma(3, n as u64))
        .collect();
    s[0] = BigInt::one();
    s
}

/// E_6 = 1 − 504 Σ σ_5(n) q^n.
pub fn e6(horizon: usize) -> QSeries {
    let mut s: QSeries = (0..=horizon)
        .map(|n| BigInt::from(-504) * sigma(5, n as u64))
        .collect();
    s[0] = BigInt::one();
    s
}

/// Δ = (E_4^3 − E_6^2) / 1728.
pub fn delta(horizon: usize) -> QSeries {
    let a = e4(horizon);
    let a3 = mul(&mul(&a, &a), &a);
    let b = e6(horizon);
    let b2 = mul(&b, &b);
    a3.into_iter()
        .zip(b2)
        .map(|(x, y)| (x - y) / BigInt::from(1728))
        .collect()
}

/// Product truncated to the shorter horizon.
pub fn mul(a: &[BigInt], b: &[BigInt]) -> QSeries {
    let horizon = a.len().min(b.len());
    let mut out = vec![BigInt::zero(); horizon];
    let first_b = b.iter().position(|c| !c.is_zero()).unwrap_or(horizon);
    for (i, ai) in a.iter().enumerate().take(horizon) {
        if ai.is_zero() {
            continue;
        }
        for j in first_b..horizon - i {
            if !b[j].is_zero() {
                out[i + j] += ai * &b[j];
            }
        }
    }
    out
}

pub fn pow(a: &[BigInt], e: u32) -> QSeries {
    let mut result: QSeries = vec![BigInt::zero(); a.len()];
    result[0] = BigInt::one();
    for _ in 0..e {
        result = mul(&result, a);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    /// q Π (1 − q^m)^24 by direct expansion.
    fn delta_product(horizon: usize) -> Vec<i64> {
        let mut s = vec![0i64; horizon + 1];
        s[1] = 1;
        for m in 1..=horizon {
            for _ in 0..24 {
                for n in (m..=horizon).rev() {
                    s[n] -= s[n - m];
                }
            }
        }
        s
    }

    #[test]
    fn delta_matches_product_formula() {
        let d = delta(30);
        let p = delta_product(30);
        for n in 0..=30 {
            assert_eq!(d[n], BigInt::from(p[n]), "n = {n}");
        }
        assert_eq!(d[2], BigInt::from(-24));
        assert_eq!(d[3], BigInt::from(252));
    }

    #[test]
    fn e4_squared_is_e8() {
        let a = e4(20);
        let e8 = mul(&a, &a);
        for n in 1..=20u64 {
            assert_eq!(e8[n as usize], BigInt::from(480) * sigma(7, n));
        }
    }
}
