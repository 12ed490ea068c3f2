//! Rank-tolerant subspace estimation and residual projections.
//!
//! Subspaces of the ambient `R^N` at a grid point are carried as
//! [`SubbundleSample`]s: an orthonormal basis cut off at a relative
//! singular value tolerance, with a near-degeneracy flag instead of a
//! silent decision whenever the cutoff falls inside the ambiguous band.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::jet::JetVec;
use crate::multilinear::MetricSpace;

/// Which geometric bundle a sample represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleLabel {
    F,
    F1,
    F2,
    LittleF,
    LittleF1,
    LittleF2,
    S1Sphere,
    S2Sphere,
    S1Split,
    S2Split,
    U,
    Theta,
    Psi,
    Other,
}

/// An ordered basis of a subspace of `R^N` at one grid point.
#[derive(Debug, Clone)]
pub struct SubbundleSample {
    pub point: (f64, f64),
    pub basis: Vec<DVector<f64>>,
    pub rank: usize,
    pub tol: f64,
    pub label: BundleLabel,
    /// Set when some singular value fell inside `[tol/10, 10·tol]` relative
    /// to the largest; the rank decision is then unreliable.
    pub near_degenerate: bool,
}

/// Relative singular value cutoff used throughout.
pub const RANK_TOL: f64 = 1e-8;

impl SubbundleSample {
    /// Orthonormal column basis of the span of `columns`, rank decided by
    /// singular values relative to the largest.
    pub fn from_columns(
        point: (f64, f64),
        columns: &[DVector<f64>],
        tol: f64,
        label: BundleLabel,
    ) -> Self {
        assert!(!columns.is_empty());
        let n = columns[0].len();
        let mat = DMatrix::from_columns(columns);
        let svd = crate::linalg::svd(&mat);
        let smax = svd.singular_values.max();
        let mut rank = 0;
        let mut near = false;
        for &s in svd.singular_values.iter() {
            let rel = if smax > 0.0 { s / smax } else { 0.0 };
            if rel > tol {
                rank += 1;
            }
            if rel > tol / 10.0 && rel < tol * 10.0 {
                near = true;
            }
        }
        let basis = (0..rank)
            .map(|k| DVector::from_iterator(n, svd.u.column(k).iter().copied()))
            .collect();
        SubbundleSample {
            point,
            basis,
            rank,
            tol,
            label,
            near_degenerate: near,
        }
    }

    pub fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.basis)
    }

    /// Euclidean distance from `v` to the span (basis is orthonormal).
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        let mut w = v.clone();
        for b in &self.basis {
            let c = b.dot(v);
            w -= b * c;
        }
        w.norm()
    }

    /// Distance between two subspaces as `‖P_a − P_b‖`; 0 when they agree.
    pub fn subspace_distance(&self, other: &SubbundleSample) -> f64 {
        subspace_distance(&self.basis_matrix(), &other.basis_matrix())
    }
}

/// `‖P_a − P_b‖_F`, the projector gap between the column spans of `a` and
/// `b`. Inputs need not be orthonormal.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let pa = projector(a);
    let pb = projector(b);
    (pa - pb).norm()
}

fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = crate::linalg::svd(basis);
    let smax = svd.singular_values.max();
    let mut p = DMatrix::zeros(basis.nrows(), basis.nrows());
    for k in 0..svd.singular_values.len() {
        if smax > 0.0 && svd.singular_values[k] / smax > RANK_TOL {
            let col = svd.u.column(k);
            p += DMatrix::from_fn(basis.nrows(), basis.nrows(), |i, j| col[i] * col[j]);
        }
    }
    p
}

/// Span of `σ` and all iterated coordinate derivatives `d_{X_J}σ` with
/// `|J| ≤ order`, across the supplied section lifts.
pub fn span_with_derivatives(
    sections: &[JetVec],
    order: usize,
    tol: f64,
    point: (f64, f64),
    label: BundleLabel,
) -> Result<SubbundleSample> {
    assert!(!sections.is_empty());
    let degree = sections.iter().map(|s| s.degree()).min().unwrap();
    if order > degree {
        return Err(Error::JetDegree { degree, order });
    }
    let mut cols = Vec::new();
    for s in sections {
        for total in 0..=order {
            for a in (0..=total).rev() {
                let b = total - a;
                cols.push(s.deriv(a, b));
            }
        }
    }
    Ok(SubbundleSample::from_columns(point, &cols, tol, label))
}

/// Euclidean-orthonormal basis of the metric-orthogonal complement
/// `W^⊥ = { v : (v, w) = 0 ∀ w ∈ W }` of the span of `basis`.
pub fn metric_orthogonal_complement(basis: &DMatrix<f64>, space: &MetricSpace) -> DMatrix<f64> {
    // W^⊥ = euclidean nullspace of Bᵀ G.
    let bt_g = basis.transpose() * space.gram();
    nullspace(&bt_g)
}

/// Euclidean-orthonormal basis of the nullspace of `m`.
pub fn nullspace(m: &DMatrix<f64>) -> DMatrix<f64> {
    crate::linalg::svd(m).kernel(RANK_TOL)
}

/// Residual of `v` against membership in the span of `basis`, measured by
/// pairing with the metric-orthogonal complement. Vanishes iff `v` lies in
/// the span, the form being non-degenerate.
pub fn metric_membership_residual(
    v: &DVector<f64>,
    basis: &DMatrix<f64>,
    space: &MetricSpace,
) -> f64 {
    let comp = metric_orthogonal_complement(basis, space);
    if comp.ncols() == 0 {
        return 0.0;
    }
    (comp.transpose() * space.gram() * v).norm()
}
