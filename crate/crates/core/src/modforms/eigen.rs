use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use twofloat::TwoFloat;

use super::space::CuspFormSpace;
use crate::error::{Error, Result};

/// Normalized Hecke eigenform of level one, one real embedding of its
/// coefficient field.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeEigenform {
    pub weight: u32,
    /// Position of this form when the T_2 eigenvalues are sorted ascending.
    pub index: usize,
    /// a(n) for n = 0..=horizon, a(0) = 0, a(1) = 1.
    a_coeffs: Vec<TwoFloat>,
    /// λ(n) = a(n) / n^{(k−1)/2}.
    lambda: Vec<f64>,
}

impl HeckeEigenform {
    /// Build from raw coefficients a(0..=N) with a(1) = 1.
    pub fn from_coefficients(weight: u32, index: usize, a_coeffs: Vec<TwoFloat>) -> Self {
        let half = (weight as i32 - 1) / 2;
        let odd = (weight - 1) % 2 == 1;
        let lambda = a_coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| {
                if n == 0 {
                    return 0.0;
                }
                let nn = TwoFloat::from(n as f64);
                let mut scale = nn.powi(half);
                if odd {
                    scale *= nn.sqrt();
                }
                f64::from(*a / scale)
            })
            .collect();
        Self {
            weight,
            index,
            a_coeffs,
            lambda,
        }
    }

    pub fn horizon(&self) -> usize {
        self.a_coeffs.len() - 1
    }

    pub fn a(&self, n: usize) -> f64 {
        f64::from(self.a_coeffs[n])
    }

    pub fn a_hp(&self, n: usize) -> TwoFloat {
        self.a_coeffs[n]
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    /// λ(0..=N), with λ(0) = 0.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    pub fn t2_eigenvalue(&self) -> f64 {
        self.a(2)
    }

    /// Copy truncated to a shorter horizon.
    pub fn truncated(&self, horizon: usize) -> Self {
        let h = horizon.min(self.horizon());
        Self {
            weight: self.weight,
            index: self.index,
            a_coeffs: self.a_coeffs[..=h].to_vec(),
            lambda: self.lambda[..=h].to_vec(),
        }
    }
}

/// Integer matrix of T_p on the first d coefficients: column i holds the
/// coefficients 1..d of T_p applied to basis element i.
pub fn hecke_matrix(space: &CuspFormSpace, p: u64) -> Result<Vec<Vec<BigInt>>> {
    let d = space.dimension;
    if (p as usize) * d > space.horizon {
        return Err(Error::Truncation {
            needed: p as usize * d,
            available: space.horizon,
        });
    }
    let pk = BigInt::from(p).pow(space.weight - 1);
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for (row, mrow) in m.iter_mut().enumerate() {
        let n = row + 1;
        for (i, entry) in mrow.iter_mut().enumerate() {
            let mut v = space.coeff(i, p as usize * n).clone();
            if n % p as usize == 0 {
                v += &pk * space.coeff(i, n / p as usize);
            }
            *entry = v;
        }
    }
    Ok(m)
}

/// Characteristic polynomial det(xI − A), coefficients from x^0 up to x^d
/// (Faddeev–LeVerrier; all divisions are exact for integer matrices).
pub fn char_poly(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = a.len();
    let mut coeffs = vec![BigInt::zero(); d + 1];
    coeffs[d] = BigInt::from(1);
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for k in 1..=d {
        // M_k = A M_{k-1} + c_{d-k+1} I
        let mut next = vec![vec![BigInt::zero(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut s = BigInt::zero();
                for l in 0..d {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &coeffs[d - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = BigInt::zero();
        for i in 0..d {
            for l in 0..d {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs[d - k] = -tr / BigInt::from(k);
    }
    coeffs
}

pub(crate) fn bigint_to_tf(x: &BigInt) -> TwoFloat {
    let hi = x.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return TwoFloat::from(hi);
    }
    let rem = x - float_to_bigint(hi);
    let lo = rem.to_f64().unwrap_or(0.0);
    TwoFloat::new_add(hi, lo)
}

fn float_to_bigint(x: f64) -> BigInt {
    use num_traits::FromPrimitive;
    BigInt::from_f64(x).unwrap_or_else(BigInt::zero)
}

fn horner(p: &[TwoFloat], x: TwoFloat) -> TwoFloat {
    p.iter()
        .rev()
        .fold(TwoFloat::from(0.0), |acc, c| acc * x + *c)
}

fn derivative(p: &[TwoFloat]) -> Vec<TwoFloat> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| *c * i as f64)
        .collect()
}

/// Sorted real roots of a real-rooted polynomial, found by bisection
/// between consecutive roots of its derivative. Returns None if fewer
/// than deg distinct sign changes are found (a multiple root).
pub fn real_roots(p: &[TwoFloat]) -> Option<Vec<TwoFloat>> {
    let deg = p.len() - 1;
    if deg == 0 {
        return Some(vec![]);
    }
    let lead = p[deg];
    let bound = 1.0
        + p[..deg]
            .iter()
            .map(|c| f64::from((*c / lead).abs()))
            .fold(0.0, f64::max);
    let crit = real_roots(&derivative(p)).unwrap_or_default();
    let mut knots = vec![TwoFloat::from(-bound)];
    knots.extend(crit);
    knots.push(TwoFloat::from(bound));
    let mut roots = Vec::with_capacity(deg);
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let flo = horner(p, lo);
        let fhi = horner(p, hi);
        if flo == 0.0 {
            if roots.last() != Some(&lo) {
                roots.push(lo);
            }
            continue;
        }
        if fhi == 0.0 || (flo < 0.0) == (fhi < 0.0) {
            continue;
        }
        let neg_at_lo = flo < 0.0;
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            if mid == lo || mid == hi {
                break;
            }
            let fm = horner(p, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == neg_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push((lo + hi) / 2.0);
    }
    if let Some(last) = knots.last() {
        if horner(p, *last) == 0.0 {
            roots.push(*last);
        }
    }
    (roots.len() == deg).then_some(roots)
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<TwoFloat>>, mut b: Vec<TwoFloat>) -> Option<Vec<TwoFloat>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            f64::from(a[i][col].abs())
                .partial_cmp(&f64::from(a[j][col].abs()))
                .unwrap()
        })?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let t = a[col][c];
                a[r][c] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = vec![TwoFloat::from(0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Simultaneous Hecke eigenforms of the space, sorted by ascending T_2
/// eigenvalue.
pub fn hecke_eigenbasis(space: &CuspFormSpace) -> Result<Vec<HeckeEigenform>> {
    let d = space.dimension;
    if d == 0 {
        return Err(Error::EmptySpace {
            weight: space.weight,
        });
    }
    let t2 = hecke_matrix(space, 2)?;
    let (matrix, roots) = match split(&t2) {
        Some(r) => (t2, r),
        None => {
            // T_2 + T_3 separates what T_2 alone does not.
            let t3 = hecke_matrix(space, 3)?;
            let sum: Vec<Vec<BigInt>> = t2
                .iter()
                .zip(&t3)
                .map(|(r2, r3)| r2.iter().zip(r3).map(|(a, b)| a + b).collect())
                .collect();
            let roots = split(&sum).ok_or(Error::DegenerateSpectrum {
                weight: space.weight,
            })?;
            (sum, roots)
        }
    };
    let mtf: Vec<Vec<TwoFloat>> = matrix
        .iter()
        .map(|r| r.iter().map(bigint_to_tf).collect())
        .collect();
    let basis_tf: Vec<Vec<TwoFloat>> = space
        .miller_basis
        .iter()
        .map(|b| b.iter().map(bigint_to_tf).collect())
        .collect();
    let mut forms = Vec::with_capacity(d);
    for root in roots {
        // (M − λ) c = 0 with c_1 = 1; rows 2..d determine c_2..c_d.
        let c = if d == 1 {
            vec![TwoFloat::from(1.0)]
        } else {
            let a: Vec<Vec<TwoFloat>> = (1..d)
                .map(|r| {
                    (1..d)
                        .map(|col| {
                            if r == col {
                                mtf[r][col] - root
                            } else {
                                mtf[r][col]
                            }
                        })
                        .collect()
                })
                .collect();
            let b: Vec<TwoFloat> = (1..d).map(|r| -mtf[r][0]).collect();
            let rest = solve(a, b).ok_or(Error::DegenerateSpectrum {
                weight: space.weight,
            })?;
            std::iter::once(TwoFloat::from(1.0)).chain(rest).collect()
        };
        let coeffs: Vec<TwoFloat> = (0..=space.horizon)
            .map(|n| {
                c.iter()
                    .zip(&basis_tf)
                    .fold(TwoFloat::from(0.0), |acc, (ci, b)| acc + *ci * b[n])
            })
            .collect();
        forms.push(HeckeEigenform::from_coefficients(space.weight, 0, coeffs));
    }
    forms.sort_by(|f, g| {
        f.t2_eigenvalue()
            .partial_cmp(&g.t2_eigenvalue())
            .unwrap()
            .then(f.a(3).partial_cmp(&g.a(3)).unwrap())
    });
    for (i, f) in forms.iter_mut().enumerate() {
        f.index = i;
    }
    Ok(forms)
}

/// Distinct real eigenvalues of an integer matrix, or None if repeated.
fn split(m: &[Vec<BigInt>]) -> Option<Vec<TwoFloat>> {
    let poly: Vec<TwoFloat> = char_poly(m).iter().map(bigint_to_tf).collect();
    let roots = real_roots(&poly)?;
    let scale = roots.iter().map(|r| f64::from(r.abs())).fold(1.0, f64::max);
    let separated = roots
        .windows(2)
        .all(|w| f64::from(w[1] - w[0]) > 1e-24 * scale);
    separated.then_some(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::space::miller_basis;

    #[test]
    fn faddeev_leverrier_small() {
        let a = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3)],
        ];
        // x^2 − 5x + 5
        assert_eq!(
            char_poly(&a),
            vec![BigInt::from(5), BigInt::from(-5), BigInt::from(1)]
        );
    }

    #[test]
    fn roots_of_known_cubic() {
        // (x − 1)(x − 2)(x + 3) = x^3 − 7x + 6
        let p: Vec<TwoFloat> = [6.0, -7.0, 0.0, 1.0]
            .iter()
            .map(|&c| TwoFloat::from(c))
            .collect();
        let r = real_roots(&p).unwrap();
        let r: Vec<f64> = r.iter().map(|x| f64::from(*x)).collect();
        assert_eq!(r, vec![-3.0, 1.0, 2.0]);
        // double root is reported
        let q: Vec<TwoFloat> = [1.0, -2.0, 1.0]
            .iter()
            .map(|&c| TwoFloat::from(c))
            .collect();
        assert!(real_roots(&q).is_none_or(|r| r.len() < 2 || r[0] == r[1]));
    }

    #[test]
    fn delta_eigenvalue() {
        let s = miller_basis(12, 50).unwrap();
        let f = &hecke_eigenbasis(&s).unwrap()[0];
        assert_eq!(f.a(2), -24.0);
        assert!((f.lambda(2) - (-24.0 / 2f64.powf(5.5))).abs() < 1e-15);
        assert!((f.lambda(2) + 0.530_330_085_889_910_6).abs() < 1e-15);
    }

    #[test]
    fn weight_24_roots_of_hecke_polynomial() {
        // T_2 on S_24 has characteristic polynomial x^2 − 1080x − 20468736
        let s = miller_basis(24, 60).unwrap();
        let cp = char_poly(&hecke_matrix(&s, 2).unwrap());
        assert_eq!(
            cp,
            vec![
                BigInt::from(-20_468_736i64),
                BigInt::from(-1080),
                BigInt::from(1)
            ]
        );
        let forms = hecke_eigenbasis(&s).unwrap();
        let disc = (1080.0f64 * 1080.0 + 4.0 * 20_468_736.0).sqrt();
        assert!((forms[0].a(2) - (1080.0 - disc) / 2.0).abs() < 1e-9);
        assert!((forms[1].a(2) - (1080.0 + disc) / 2.0).abs() < 1e-9);
    }
}
