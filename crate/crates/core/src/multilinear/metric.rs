use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A finite dimensional real vector space, optionally carrying a
/// non-degenerate symmetric bilinear form of signature `(p, q)`.
///
/// The Gram matrix is required to be symmetric and involutive
/// (`G² = id`), which covers both the canonical diagonal forms
/// `diag(+…+, −…−)` and basis-permuted pairings such as the volume
/// pairing on `∧²R⁴`. A space without a metric (`signature == None`)
/// models the plain `R⁴` underlying projective 3-space.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    dimension: usize,
    signature: Option<(usize, usize)>,
    gram: DMatrix<f64>,
}

impl MetricSpace {
    /// Canonical `R^{p,q}` with Gram matrix `diag(+1 × p, −1 × q)`.
    pub fn indefinite(p: usize, q: usize) -> Self {
        let n = p + q;
        let gram = DMatrix::from_fn(n, n, |i, j| {
            if i != j {
                0.0
            } else if i < p {
                1.0
            } else {
                -1.0
            }
        });
        MetricSpace {
            dimension: n,
            signature: Some((p, q)),
            gram,
        }
    }

    /// Euclidean `R^n`.
    pub fn euclidean(n: usize) -> Self {
        Self::indefinite(n, 0)
    }

    /// A plain linear space with no distinguished bilinear form.
    pub fn plain(n: usize) -> Self {
        MetricSpace {
            dimension: n,
            signature: None,
            gram: DMatrix::identity(n, n),
        }
    }

    /// A space with an explicit symmetric involutive Gram matrix.
    ///
    /// The signature is determined by eigenvalue sign count and checked
    /// against `G² = id` and symmetry to tolerance `1e-12`.
    pub fn with_gram(gram: DMatrix<f64>) -> Result<Self> {
        let n = gram.nrows();
        if gram.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.ncols(),
            });
        }
        let sym = (&gram - gram.transpose()).norm();
        if sym > 1e-12 * (1.0 + gram.norm()) {
            return Err(Error::InvariantViolation {
                what: "gram symmetry",
                residual: sym,
                tol: 1e-12,
            });
        }
        let invol = (&gram * &gram - DMatrix::identity(n, n)).norm();
        if invol > 1e-12 * (1.0 + gram.norm()) {
            return Err(Error::InvariantViolation {
                what: "gram involutivity",
                residual: invol,
                tol: 1e-12,
            });
        }
        let eig = gram.clone().symmetric_eigenvalues();
        let p = eig.iter().filter(|&&l| l > 0.0).count();
        let q = n - p;
        Ok(MetricSpace {
            dimension: n,
            signature: Some((p, q)),
            gram,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `None` for a plain linear space.
    pub fn signature(&self) -> Option<(usize, usize)> {
        self.signature
    }

    pub fn has_metric(&self) -> bool {
        self.signature.is_some()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// The bilinear form `(v, w) = vᵀ G w`.
    pub fn inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        (v.transpose() * &self.gram * w)[(0, 0)]
    }
}
