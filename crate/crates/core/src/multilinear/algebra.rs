use nalgebra::DMatrix;

use super::MetricSpace;
use crate::error::{Error, Result};

/// Which matrix Lie algebra an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    /// Trace-free matrices, `sl(n)`.
    SpecialLinear,
    /// Skew-adjoint matrices w.r.t. the ambient Gram matrix, `o(p,q)`.
    Orthogonal,
}

/// An element of `sl(n)` or `o(p,q)` attached to its ambient space.
///
/// Constructors validate the defining invariant to a scale-relative
/// tolerance: trace-freeness for `sl`, `AᵀG + GA = 0` for `o(p,q)`.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    ambient: MetricSpace,
    matrix: DMatrix<f64>,
    kind: AlgebraKind,
}

const INVARIANT_TOL: f64 = 1e-9;

impl AlgebraElement {
    pub fn new(ambient: MetricSpace, matrix: DMatrix<f64>, kind: AlgebraKind) -> Result<Self> {
        let n = ambient.dimension();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows(),
            });
        }
        let scale = 1.0 + matrix.norm();
        match kind {
            AlgebraKind::SpecialLinear => {
                let tr = matrix.trace().abs();
                if tr > INVARIANT_TOL * scale {
                    return Err(Error::InvariantViolation {
                        what: "sl trace",
                        residual: tr,
                        tol: INVARIANT_TOL * scale,
                    });
                }
            }
            AlgebraKind::Orthogonal => {
                let g = ambient.gram();
                let res = (matrix.transpose() * g + g * &matrix).norm();
                if res > INVARIANT_TOL * scale {
                    return Err(Error::InvariantViolation {
                        what: "o(p,q) skew-adjointness",
                        residual: res,
                        tol: INVARIANT_TOL * scale,
                    });
                }
            }
        }
        Ok(AlgebraElement {
            ambient,
            matrix,
            kind,
        })
    }

    pub fn zero(ambient: MetricSpace, kind: AlgebraKind) -> Self {
        let n = ambient.dimension();
        AlgebraElement {
            ambient,
            matrix: DMatrix::zeros(n, n),
            kind,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn ambient(&self) -> &MetricSpace {
        &self.ambient
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }
}

/// Commutator `[A, B] = AB − BA`. Both arguments must live in the same
/// algebra over the same ambient space.
pub fn bracket(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    if a.ambient != b.ambient || a.kind != b.kind {
        return Err(Error::MismatchedAmbient);
    }
    let m = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
    // The commutator stays in the algebra exactly; skip re-validation to
    // avoid spurious rejections from rounding on large inputs.
    Ok(AlgebraElement {
        ambient: a.ambient.clone(),
        matrix: m,
        kind: a.kind,
    })
}

/// Exponential of a two-step nilpotent element: `exp(ξ) = id + ξ`.
///
/// Requires `ξ² = 0` to a scale-relative `1e-12`; this covers the gauge
/// stabiliser elements of both the projective picture (`im ξ ≤ F`,
/// `ξ F⁽¹⁾ = 0`) and the Lie sphere picture (`ξ ∈ ∧²f` with `f` null).
pub fn exp_two_step_nilpotent(xi: &AlgebraElement) -> Result<DMatrix<f64>> {
    let sq = &xi.matrix * &xi.matrix;
    let scale = 1.0 + xi.matrix.norm() * xi.matrix.norm();
    let res = sq.norm();
    if res > 1e-12 * scale {
        return Err(Error::NotNilpotent { residual: res });
    }
    let n = xi.ambient.dimension();
    Ok(DMatrix::identity(n, n) + &xi.matrix)
}
