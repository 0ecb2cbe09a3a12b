//! Small dense matrices over any [`Scalar`], plus the floating-point
//! factorizations the analysis code needs (backed by `nalgebra`).

use std::ops::{Add, Mul};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{QfockError, Result};
use crate::scalars::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: S) {
        let slot = &mut self.data[r * self.cols + c];
        *slot += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Largest entrywise deviation, for floating-point comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).to_f64().map(f64::abs))
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }
}

impl<S: Scalar> Add for &DenseMatrix<S> {
    type Output = DenseMatrix<S>;
    fn add(self, rhs: &DenseMatrix<S>) -> DenseMatrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sum");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Mul for &DenseMatrix<S> {
    type Output = DenseMatrix<S>;
    fn mul(self, rhs: &DenseMatrix<S>) -> DenseMatrix<S> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for m in 0..self.cols {
                let a = self.get(r, m);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(m, c);
                    if !b.is_zero() {
                        out.add_at(r, c, a.clone() * b.clone());
                    }
                }
            }
        }
        out
    }
}

impl DenseMatrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

/// Eigen-factorization of a symmetric positive definite Gram block, giving
/// `G^{1/2}`, `G^{-1/2}` and `G^{-1}`.
#[derive(Clone, Debug)]
pub struct GramFactor {
    pub min_eigenvalue: f64,
    pub sqrt: DMatrix<f64>,
    pub inv_sqrt: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
}

/// Eigenvalues below this floor are treated as a failed factorization.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

impl GramFactor {
    pub fn new(gram: &DMatrix<f64>, degree: usize) -> Result<Self> {
        let eig = SymmetricEigen::new(gram.clone());
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let min = if gram.nrows() == 0 { 1.0 } else { min };
        if !(min > EIGENVALUE_FLOOR) {
            return Err(QfockError::GramFactorization { degree, min_eigenvalue: min });
        }
        let v = &eig.eigenvectors;
        let build = |f: &dyn Fn(f64) -> f64| {
            let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
            v * d * v.transpose()
        };
        Ok(GramFactor {
            min_eigenvalue: min,
            sqrt: build(&|x| x.sqrt()),
            inv_sqrt: build(&|x| 1.0 / x.sqrt()),
            inverse: build(&|x| 1.0 / x),
        })
    }
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}
