//! Small dense square matrices.
//!
//! Everything in this crate works with desk-scale systems (a handful of
//! states), so a row-major `Vec<f64>` with naive kernels is all we need.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A square real matrix stored row-major. All entries are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "entry ({}, {}) is not finite",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        Self::new(values.len(), m.data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.dim)
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        self.data
            .chunks(self.dim)
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Solves `self * X = rhs` by LU with partial pivoting. `None` when singular.
    pub fn solve(&self, rhs: &RealMatrix) -> Option<RealMatrix> {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        lu_solve_in_place(&mut a, n, &mut b, n).then(|| RealMatrix { dim: n, data: b })
    }

    pub fn inverse(&self) -> Option<RealMatrix> {
        self.solve(&RealMatrix::identity(self.dim))
    }

    /// Largest singular value, by power iteration on `AᵀA`.
    pub fn norm_2(&self) -> f64 {
        let ata = &self.transpose() * self;
        let n = self.dim;
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        // perturb so we are not orthogonal to the dominant singular vector
        for (i, x) in v.iter_mut().enumerate() {
            *x += 1e-3 * (i as f64 + 1.0).sin();
        }
        let mut lambda = 0.0;
        for _ in 0..500 {
            let w = ata.mul_vec(&v);
            let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            let next: Vec<f64> = w.iter().map(|x| x / nw).collect();
            let delta = (nw - lambda).abs();
            lambda = nw;
            v = next;
            if delta <= 1e-15 * lambda {
                break;
            }
        }
        lambda.sqrt()
    }
}

/// Gaussian elimination with partial pivoting on a row-major `n×n` system
/// with `m` right-hand-side columns stored row-major in `b` (`n×m`).
/// Returns false when a pivot underflows relative to the matrix scale.
pub(crate) fn lu_solve_in_place(a: &mut [f64], n: usize, b: &mut [f64], m: usize) -> bool {
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return false;
    }
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv <= scale * 1e-300_f64.max(f64::EPSILON * 1e-6) {
            return false;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            for j in 0..m {
                b.swap(k * m + j, p * m + j);
            }
        }
        let piv = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            if f == 0.0 {
                continue;
            }
            a[i * n + k] = 0.0;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            for j in 0..m {
                b[i * m + j] -= f * b[k * m + j];
            }
        }
    }
    for k in (0..n).rev() {
        let piv = a[k * n + k];
        for j in 0..m {
            let mut s = b[k * m + j];
            for i in k + 1..n {
                s -= a[k * n + i] * b[i * m + j];
            }
            b[k * m + j] = s / piv;
        }
    }
    true
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &RealMatrix {
    type Output = RealMatrix;
    fn mul(self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &RealMatrix {
    type Output = RealMatrix;
    fn add(self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!(self.dim, rhs.dim);
        RealMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RealMatrix {
    type Output = RealMatrix;
    fn sub(self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!(self.dim, rhs.dim);
        RealMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for RealMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<RealMatrix> for Vec<Vec<f64>> {
    fn from(m: RealMatrix) -> Self {
        m.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_nonfinite() {
        assert!(RealMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(RealMatrix::new(1, vec![f64::NAN]).is_err());
        assert!(RealMatrix::new(0, vec![]).is_err());
    }

    #[test]
    fn solve_and_inverse() {
        let a = RealMatrix::from_rows(vec![vec![0.0, 2.0], vec![1.0, 1.0]]).unwrap();
        let inv = a.inverse().unwrap();
        let prod = &a * &inv;
        assert!((&prod - &RealMatrix::identity(2)).norm_fro() < 1e-15);
        assert!(RealMatrix::zeros(2).inverse().is_none());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = RealMatrix::diag(&[-3.0, 2.0, 0.5]).unwrap();
        assert!((a.norm_2() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn serde_uses_row_arrays() {
        let a = RealMatrix::diag(&[-0.2, -0.5]).unwrap();
        let rows: Vec<Vec<f64>> = a.clone().into();
        assert_eq!(rows, vec![vec![-0.2, 0.0], vec![0.0, -0.5]]);
        assert_eq!(RealMatrix::try_from(rows).unwrap(), a);
    }
}
