use num_bigint::BigInt;
use num_traits::Zero;

use super::qexp::{self, QSeries};
use crate::error::{Error, Result};

/// dim S_k for level one.
pub fn cusp_dimension(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let m = (k / 12) as usize + if k % 12 == 2 { 0 } else { 1 };
    m - 1
}

/// Default coefficient horizon for weight k.
pub fn default_horizon(k: u32) -> usize {
    2000usize.max(60 * k as usize)
}

/// Echelonized integral basis of S_k: element i (0-based) is
/// q^{i+1} + O(q^{d+1}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspFormSpace {
    pub weight: u32,
    pub dimension: usize,
    pub horizon: usize,
    pub miller_basis: Vec<QSeries>,
}

impl CuspFormSpace {
    /// Coefficient of q^n in basis element i.
    pub fn coeff(&self, i: usize, n: usize) -> &BigInt {
        &self.miller_basis[i][n]
    }
}

/// Miller basis of S_k to q-precision `horizon` from Δ^j E_6^b E_4^a.
pub fn miller_basis(k: u32, horizon: usize) -> Result<CuspFormSpace> {
    if k % 2 == 1 {
        return Err(Error::Domain(format!("weight {k} is odd")));
    }
    let d = cusp_dimension(k);
    if d == 0 {
        return Err(Error::EmptySpace { weight: k });
    }
    // T_2 and T_3 on the first d coefficients need 3d terms.
    let min_horizon = (d + 9).max(3 * d);
    if horizon < min_horizon {
        return Err(Error::Domain(format!(
            "horizon {horizon} below {min_horizon}"
        )));
    }
    let b = if k.is_multiple_of(4) { 0 } else { 1 };
    let e4 = qexp::e4(horizon);
    let delta = qexp::delta(horizon);
    let base = if b == 1 {
        qexp::e6(horizon)
    } else {
        unit(horizon)
    };

    // Δ^j for j = 1..d, and E_4^a for the exponents needed.
    let mut delta_pows = vec![delta.clone()];
    for _ in 1..d {
        let next = qexp::mul(delta_pows.last().unwrap(), &delta);
        delta_pows.push(next);
    }
    let max_a = ((k as usize - 12 - 6 * b) / 4) as u32;
    let mut e4_pows = vec![unit(horizon)];
    for _ in 0..max_a {
        let next = qexp::mul(e4_pows.last().unwrap(), &e4);
        e4_pows.push(next);
    }
    let mut basis: Vec<QSeries> = (1..=d)
        .map(|j| {
            let a = (k as usize - 12 * j - 6 * b) / 4;
            let g = qexp::mul(&delta_pows[j - 1], &e4_pows[a]);
            if b == 1 {
                qexp::mul(&g, &base)
            } else {
                g
            }
        })
        .collect();

    // Clear q^j (j > i) from element i using the later, already reduced elements.
    for i in (0..d).rev() {
        for j in i + 1..d {
            let c = basis[i][j + 1].clone();
            if !c.is_zero() {
                let (lo, hi) = basis.split_at_mut(j);
                for (x, y) in lo[i].iter_mut().zip(&hi[0]) {
                    *x -= &c * y;
                }
            }
        }
    }
    Ok(CuspFormSpace {
        weight: k,
        dimension: d,
        horizon,
        miller_basis: basis,
    })
}

fn unit(horizon: usize) -> QSeries {
    let mut s = vec![BigInt::zero(); horizon + 1];
    s[0] = BigInt::from(1);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let expected = [
            (12, 1),
            (14, 0),
            (16, 1),
            (18, 1),
            (20, 1),
            (22, 1),
            (24, 2),
            (26, 1),
            (28, 2),
            (36, 3),
            (38, 2),
            (40, 3),
            (10, 0),
            (0, 0),
        ];
        for (k, d) in expected {
            assert_eq!(cusp_dimension(k), d, "k = {k}");
        }
    }

    #[test]
    fn weight_twelve_is_delta() {
        let s = miller_basis(12, 10).unwrap();
        assert_eq!(s.dimension, 1);
        assert_eq!(s.coeff(0, 1), &BigInt::from(1));
        assert_eq!(s.coeff(0, 2), &BigInt::from(-24));
        assert_eq!(s.coeff(0, 3), &BigInt::from(252));
    }

    #[test]
    fn empty_spaces() {
        assert!(matches!(
            miller_basis(14, 40),
            Err(Error::EmptySpace { weight: 14 })
        ));
        assert!(matches!(
            miller_basis(10, 40),
            Err(Error::EmptySpace { .. })
        ));
    }

    #[test]
    fn echelon_form() {
        for k in [24, 36, 40] {
            let s = miller_basis(k, 30).unwrap();
            for i in 0..s.dimension {
                assert!(s.coeff(i, 0).is_zero());
                for n in 1..=s.dimension {
                    let want = if n == i + 1 { 1 } else { 0 };
                    assert_eq!(s.coeff(i, n), &BigInt::from(want), "k={k} i={i} n={n}");
                }
            }
        }
    }

    #[test]
    fn reproducible() {
        assert_eq!(miller_basis(28, 40).unwrap(), miller_basis(28, 40).unwrap());
    }
}
