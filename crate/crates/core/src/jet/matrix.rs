use nalgebra::DMatrix;

use super::{Jet2, JetVec};
use crate::error::{Error, Result};

/// A matrix with jet entries; row-major storage.
///
/// Used for algebra-valued 1-form coefficients (whose derivatives enter the
/// higher-order deformation conditions) and for jet-exact frame inversion.
#[derive(Debug, Clone)]
pub struct JetMat {
    rows: usize,
    cols: usize,
    entries: Vec<Jet2>,
}

impl JetMat {
    pub fn zero(rows: usize, cols: usize, degree: usize) -> Self {
        JetMat {
            rows,
            cols,
            entries: vec![Jet2::zero(degree); rows * cols],
        }
    }

    /// Assemble columns into a matrix, truncating to the smallest column
    /// degree (zero-extension would fabricate high-order coefficients).
    pub fn from_columns(cols: &[JetVec]) -> Self {
        assert!(!cols.is_empty());
        let rows = cols[0].dim();
        let degree = cols.iter().map(|c| c.degree()).min().unwrap();
        let mut m = JetMat::zero(rows, cols.len(), degree);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.dim(), rows);
            for i in 0..rows {
                *m.entry_mut(i, j) = c.comp(i).to_degree(degree);
            }
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Jet2>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        let degree = entries[0].degree();
        assert!(entries.iter().all(|e| e.degree() == degree));
        JetMat {
            rows,
            cols,
            entries,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn degree(&self) -> usize {
        self.entries[0].degree()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Jet2 {
        &self.entries[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Jet2 {
        &mut self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> JetVec {
        JetVec::new((0..self.rows).map(|i| self.entry(i, j).clone()).collect())
    }

    /// Matrix of point values.
    pub fn value(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).value())
    }

    /// Matrix of `∂_u^a ∂_v^b` entry derivatives.
    pub fn deriv(&self, a: usize, b: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).deriv(a, b))
    }

    pub fn du(&self) -> JetMat {
        JetMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.du()).collect(),
        }
    }

    pub fn dv(&self) -> JetMat {
        JetMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.dv()).collect(),
        }
    }

    pub fn to_degree(&self, degree: usize) -> JetMat {
        JetMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.to_degree(degree)).collect(),
        }
    }

    pub fn add(&self, other: &JetMat) -> JetMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        JetMat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &JetMat) -> JetMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        JetMat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale_jet(&self, s: &Jet2) -> JetMat {
        let s = s.to_degree(self.degree());
        JetMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.mul(&s)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> JetMat {
        JetMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &JetVec) -> JetVec {
        assert_eq!(self.cols, v.dim());
        let d = self.degree().min(v.degree());
        JetVec::new(
            (0..self.rows)
                .map(|i| {
                    let mut sum = Jet2::zero(d);
                    for j in 0..self.cols {
                        sum = sum.add(&self.entry(i, j).to_degree(d).mul(&v.comp(j).to_degree(d)));
                    }
                    sum
                })
                .collect(),
        )
    }

    pub fn mul_mat(&self, other: &JetMat) -> JetMat {
        assert_eq!(self.cols, other.rows);
        let d = self.degree().min(other.degree());
        JetMat::from_fn(self.rows, other.cols, |i, j| {
            let mut sum = Jet2::zero(d);
            for k in 0..self.cols {
                sum = sum.add(
                    &self
                        .entry(i, k)
                        .to_degree(d)
                        .mul(&other.entry(k, j).to_degree(d)),
                );
            }
            sum
        })
    }

    /// Jet-exact inverse by Gauss–Jordan elimination, pivoting on constant
    /// terms. Fails if some pivot's constant term is (numerically) zero,
    /// i.e. the point-value matrix is singular.
    pub fn inverse(&self) -> Result<JetMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let d = self.degree();
        let mut a = self.clone();
        let mut inv = JetMat::zero(n, n, d);
        for i in 0..n {
            *inv.entry_mut(i, i) = Jet2::constant(1.0, d);
        }
        for col in 0..n {
            // largest constant-term pivot in rows col..n
            let mut pivot = col;
            let mut best = a.entry(col, col).value().abs();
            for r in (col + 1)..n {
                let c = a.entry(r, col).value().abs();
                if c > best {
                    best = c;
                    pivot = r;
                }
            }
            if best < 1e-13 {
                return Err(Error::Other(
                    "jet matrix inversion: singular point value".into(),
                ));
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a.entry(col, j).clone();
                    *a.entry_mut(col, j) = a.entry(pivot, j).clone();
                    *a.entry_mut(pivot, j) = tmp;
                    let tmp = inv.entry(col, j).clone();
                    *inv.entry_mut(col, j) = inv.entry(pivot, j).clone();
                    *inv.entry_mut(pivot, j) = tmp;
                }
            }
            let pivot_inv = a.entry(col, col).recip()?;
            for j in 0..n {
                *a.entry_mut(col, j) = a.entry(col, j).mul(&pivot_inv);
                *inv.entry_mut(col, j) = inv.entry(col, j).mul(&pivot_inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.entry(r, col).clone();
                if factor.max_abs_coeff() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let sub_a = a.entry(col, j).mul(&factor);
                    *a.entry_mut(r, j) = a.entry(r, j).sub(&sub_a);
                    let sub_i = inv.entry(col, j).mul(&factor);
                    *inv.entry_mut(r, j) = inv.entry(r, j).sub(&sub_i);
                }
            }
        }
        Ok(inv)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, e| m.max(e.max_abs_coeff()))
    }
}
