//! The quadratic differential `q(X, Y) = tr(σ ↦ η(X) d_Y σ)` of an
//! `f∧f^⊥`-valued 1-form on a Legendre map.
//!
//! For closed forms `q` decides triviality: `q ≡ 0` exactly when
//! `η = dξ` with `ξ ∈ Γ(∧²f)`.

use nalgebra::{DMatrix, DVector};

use super::LiftedSurface;
use crate::deform::OneForm;
use crate::error::{Error, Result};
use crate::grid::ParamGrid;

/// Symmetric 2×2 coefficient matrix of `q` in parameter coordinates at one
/// point.
#[derive(Debug, Clone, Copy)]
pub struct QuadDiff {
    pub point: (f64, f64),
    /// `m[i][j] = q(∂_i, ∂_j)` with `0 ↦ ∂u`, `1 ↦ ∂v`.
    pub m: [[f64; 2]; 2],
}

impl QuadDiff {
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn symmetry_defect(&self) -> f64 {
        (self.m[0][1] - self.m[1][0]).abs()
    }
}

/// `q` over the grid, with the worst `f∧f^⊥`-containment defect seen while
/// decomposing `η`.
#[derive(Debug)]
pub struct QuadDiffField {
    pub grid: ParamGrid,
    pub values: Vec<Option<QuadDiff>>,
    pub max_abs: f64,
    pub containment_residual: f64,
}

/// Least-squares coordinates of `w` in the column span of `basis`,
/// returning `(coords, residual)`.
fn lstsq(basis: &DMatrix<f64>, w: &DVector<f64>) -> (DVector<f64>, f64) {
    crate::linalg::lstsq(basis, w, 1e-12)
}

/// Vectorised basis of `f∧f^⊥` (as matrices) at one Legendre point.
pub(crate) fn wedge_basis_matrix(
    sigma: &DVector<f64>,
    sigma_tilde: &DVector<f64>,
    space: &crate::multilinear::MetricSpace,
) -> DMatrix<f64> {
    let n = space.dimension();
    let f_mat = DMatrix::from_columns(&[sigma.clone(), sigma_tilde.clone()]);
    let fperp = crate::subbundle::metric_orthogonal_complement(&f_mat, space);
    let wedge = |a: &DVector<f64>, b: &DVector<f64>| -> DVector<f64> {
        let ga = space.gram() * a;
        let gb = space.gram() * b;
        let m = b * ga.transpose() - a * gb.transpose();
        DVector::from_iterator(n * n, m.iter().copied())
    };
    let mut cols = Vec::new();
    for z in fperp.column_iter() {
        let z = z.into_owned();
        cols.push(wedge(sigma, &z));
        cols.push(wedge(sigma_tilde, &z));
    }
    cols.push(wedge(sigma, sigma_tilde));
    DMatrix::from_columns(&cols)
}

/// Worst relative `f∧f^⊥`-containment defect of `η` over interior points,
/// with the offending parameter point.
pub fn wedge_containment_residual(eta: &OneForm, ls: &LiftedSurface) -> Result<(f64, (f64, f64))> {
    let space = &ls.spec.space;
    let n = space.dimension();
    let mut worst: f64 = 0.0;
    let mut at = (0.0, 0.0);
    for ((i, j), data) in ls.interior_ok() {
        let sigma_t = data.sigma_tilde.as_ref().ok_or(Error::GeometryMismatch {
            required: "a Legendre lift",
            actual: ls.spec.kind.key().into(),
        })?;
        let p = ls.grid.point(i, j);
        let (eu, ev) = eta.values(p.0, p.1)?;
        let basis = wedge_basis_matrix(&data.sigma.value(), &sigma_t.value(), space);
        for m in [&eu, &ev] {
            let flat = DVector::from_iterator(n * n, m.iter().copied());
            let (_, res) = lstsq(&basis, &flat);
            let rel = res / (1.0 + flat.norm());
            if rel > worst {
                worst = rel;
                at = p;
            }
        }
    }
    Ok((worst, at))
}

pub fn quadratic_differential(eta: &OneForm, ls: &LiftedSurface) -> Result<QuadDiffField> {
    let space = &ls.spec.space;
    let n = space.dimension();
    let mut values: Vec<Option<QuadDiff>> = vec![None; ls.grid.len()];
    let mut max_abs: f64 = 0.0;
    let mut containment: f64 = 0.0;

    for ((i, j), data) in ls.interior_ok() {
        let sigma_t = data.sigma_tilde.as_ref().ok_or(Error::GeometryMismatch {
            required: "a Legendre lift (rank-2 plane)",
            actual: ls.spec.kind.key().into(),
        })?;
        let p = ls.grid.point(i, j);
        let (eu, ev) = eta.values(p.0, p.1)?;

        let s = data.sigma.value();
        let t = sigma_t.value();
        let f_mat = DMatrix::from_columns(&[s.clone(), t.clone()]);
        // f∧f^⊥ basis as matrices: σ∧z, σ̃∧z for z in a f^⊥ frame, plus σ∧σ̃
        let basis = wedge_basis_matrix(&s, &t, space);

        let mut q = [[0.0f64; 2]; 2];
        for (xi, ex) in [(0usize, &eu), (1usize, &ev)] {
            // containment of η(∂_xi) in f∧f^⊥
            let flat = DVector::from_iterator(n * n, ex.iter().copied());
            let (_, res) = lstsq(&basis, &flat);
            let rel = res / (1.0 + flat.norm());
            containment = containment.max(rel);
            if rel > 1e-7 {
                return Err(Error::FormRejected {
                    reason: format!("η is not f∧f^⊥-valued at ({:.4}, {:.4})", p.0, p.1),
                    residual: rel,
                });
            }
            for (yi, (a, b)) in [(0usize, (1, 0)), (1usize, (0, 1))] {
                // trace of τ ↦ η(X) d_Y τ on the frame (σ, σ̃)
                let ds = data.sigma.deriv(a, b);
                let dt = sigma_t.deriv(a, b);
                let w1 = ex * ds;
                let w2 = ex * dt;
                let (c1, r1) = lstsq(&f_mat, &w1);
                let (c2, r2) = lstsq(&f_mat, &w2);
                // the images must land in f; leakage counts as containment error
                let leak = (r1 + r2) / (1.0 + w1.norm() + w2.norm());
                containment = containment.max(leak);
                q[xi][yi] = c1[0] + c2[1];
            }
        }
        let qd = QuadDiff { point: p, m: q };
        max_abs = max_abs.max(qd.max_abs());
        values[ls.grid.index(i, j)] = Some(qd);
    }

    Ok(QuadDiffField {
        grid: ls.grid.clone(),
        values,
        max_abs,
        containment_residual: containment,
    })
}
