//! Points of the generalized upper half plane h^n = GL_n(R) / (O(n) R^×)
//! in Iwasawa coordinates, and positive-definite Gram matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric positive-definite matrix with cached determinant and inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    m: DMatrix<f64>,
    det: f64,
    inv: DMatrix<f64>,
}

impl GramMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(Error::Domain(
                "Gram matrix must be square and non-empty".into(),
            ));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (&m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Domain("Gram matrix must be symmetric".into()));
        }
        let m = (&m + m.transpose()) * 0.5;
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Singular("Gram matrix is not positive definite".into()))?;
        let det = chol.l_dirty().diagonal().iter().map(|d| d * d).product();
        let inv = chol.inverse();
        Ok(Self { m, det, inv })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(
                "Gram matrix rows must have equal length".into(),
            ));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn inverse_gram(&self) -> Result<GramMatrix> {
        GramMatrix::new(self.inv.clone())
    }

    /// a^t M a.
    pub fn quadratic_form(&self, a: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.m[(i, j)] * a[j];
            }
            s += a[i] * row;
        }
        s
    }
}

/// z = x·y with x upper unitriangular and y = diag(y_1⋯y_{n−1}, …, y_1, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    n: usize,
    /// Row-major n×n upper unitriangular matrix.
    x: Vec<f64>,
    y: Vec<f64>,
}

impl UpperHalfPoint {
    /// `x` holds the strictly upper entries row by row (x_12, x_13, …, x_23, …).
    pub fn new(n: usize, x_upper: &[f64], y: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("h^n needs n >= 2".into()));
        }
        if x_upper.len() != n * (n - 1) / 2 || y.len() != n - 1 {
            return Err(Error::Domain(format!("wrong coordinate count for n = {n}")));
        }
        if y.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain("y coordinates must be positive".into()));
        }
        let mut x = vec![0.0; n * n];
        let mut it = x_upper.iter();
        for i in 0..n {
            x[i * n + i] = 1.0;
            for j in i + 1..n {
                x[i * n + j] = *it.next().unwrap();
            }
        }
        Ok(Self {
            n,
            x,
            y: y.to_vec(),
        })
    }

    /// z = x + iy in the classical upper half plane.
    pub fn gl2(x: f64, y: f64) -> Result<Self> {
        Self::new(2, &[x], &[y])
    }

    pub fn diagonal(y: &[f64]) -> Result<Self> {
        let n = y.len() + 1;
        Self::new(n, &vec![0.0; n * (n - 1) / 2], y)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_entry(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n + j]
    }

    pub fn x_upper(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.x_entry(i, j))
            .collect()
    }

    /// Diagonal of the Iwasawa y-matrix.
    pub fn y_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| self.y[..n - 1 - i].iter().product())
            .collect()
    }

    /// The matrix z = x·y.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let d = self.y_diagonal();
        DMatrix::from_fn(n, n, |i, j| self.x[i * n + j] * d[j])
    }

    /// det z = Π y_i^{n−i}.
    pub fn det(&self) -> f64 {
        self.y
            .iter()
            .enumerate()
            .map(|(i, v)| v.powi((self.n - 1 - i) as i32))
            .product()
    }

    /// Gram matrix z z^t, whose quadratic form enters the Epstein zeta function.
    pub fn gram(&self) -> Result<GramMatrix> {
        let z = self.matrix();
        GramMatrix::new(&z * z.transpose())
    }

    /// Iwasawa coordinates of w (z^{−1})^t w.
    pub fn dual(&self) -> Result<Self> {
        let n = self.n;
        let inv = self
            .matrix()
            .try_inverse()
            .ok_or_else(|| Error::Singular("z is not invertible".into()))?;
        let t = inv.transpose();
        let w = DMatrix::from_fn(n, n, |i, j| t[(n - 1 - i, n - 1 - j)]);
        iwasawa(&w)
    }

    /// 0 ≤ x_ij ≤ 1 and y_j ≥ √3/2.
    pub fn in_siegel_set(&self) -> bool {
        let sqrt3_2 = 3f64.sqrt() / 2.0;
        self.x_upper().iter().all(|v| (0.0..=1.0).contains(v))
            && self.y.iter().all(|v| *v >= sqrt3_2)
    }

    /// γ·z for an invertible matrix γ, reduced back to Iwasawa form.
    pub fn act(&self, gamma: &DMatrix<f64>) -> Result<Self> {
        iwasawa(&(gamma * self.matrix()))
    }
}

/// Iwasawa decomposition g = x·y·k·c with k orthogonal and c > 0 scalar.
///
/// The diagonal part comes from the reverse Cholesky factorization
/// g g^t = x D x^t, so rows are orthogonalized from the bottom.
pub fn iwasawa(g: &DMatrix<f64>) -> Result<UpperHalfPoint> {
    let n = g.nrows();
    if n < 2 || g.ncols() != n {
        return Err(Error::Domain(
            "iwasawa needs a square matrix of size >= 2".into(),
        ));
    }
    let m = g * g.transpose();
    // Reverse index order, factor L L^t, and reverse back: M = U U^t, U upper triangular.
    let rev = DMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)]);
    let scale = rev.amax();
    let chol = rev
        .cholesky()
        .ok_or_else(|| Error::Singular("g is not invertible".into()))?;
    let l = chol.l();
    let u = DMatrix::from_fn(n, n, |i, j| l[(n - 1 - i, n - 1 - j)]);
    let diag: Vec<f64> = (0..n).map(|i| u[(i, i)]).collect();
    if diag.iter().any(|d| d.abs() < 1e-30 * scale.sqrt()) {
        return Err(Error::Singular("pivot below 1e-30 in iwasawa".into()));
    }
    let mut x_upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            x_upper.push(u[(i, j)] / diag[j]);
        }
    }
    // D_i = Π_{j ≤ n−1−i} y_j up to scale, so y_{n−1−i} = D_i / D_{i+1}.
    let y: Vec<f64> = (1..n).map(|m| diag[n - 1 - m] / diag[n - m]).collect();
    UpperHalfPoint::new(n, &x_upper, &y)
}
