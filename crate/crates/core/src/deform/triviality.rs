use nalgebra::{DMatrix, DVector};

use super::{wedge_matrix_jet, OneForm};
use crate::error::{Error, Result};
use crate::geometry::{psi_basis, quadratic_differential, GeometryKind, LiftedSurface};
use crate::jet::JetMat;

/// Outcome of the triviality solve.
#[derive(Debug, Clone)]
pub struct TrivialityOutcome {
    pub trivial: bool,
    /// Worst relative least-squares residual of `dξ = η` (projective and
    /// Lie sphere solves).
    pub solve_residual: f64,
    /// `max |q|` for the Lie sphere route.
    pub q_norm: Option<f64>,
    /// Recovered potential coefficient per grid point (`ξ = λ·ψ` or
    /// `ξ = λ·σ∧σ̃`), for callers that want to inspect it.
    pub lambda: Vec<Option<f64>>,
    /// The Lie cyclide splitting was constant (Dupin cyclide input); the
    /// group-level uniqueness statement then has an extra branch.
    pub dupin: bool,
}

/// Decide whether `η` is a trivial deformation form and, where the
/// geometry admits it, reconstruct the potential.
///
/// * projective: solve `dξ = η` pointwise for `ξ = λ·ψ`, `ψ` the `Ψ`
///   generator, by least squares in `(λ, λ_u, λ_v)`;
/// * Lie sphere: the quadratic differential must vanish, cross-checked by
///   the same least-squares reconstruction with `ξ = λ·σ∧σ̃ ∈ ∧²f`;
/// * conformal: trivial iff `η = 0`.
pub fn triviality_solve(eta: &OneForm, ls: &LiftedSurface) -> Result<TrivialityOutcome> {
    match ls.spec.kind {
        GeometryKind::Projective => projective_solve(eta, ls),
        GeometryKind::Conformal => {
            let norm = eta.max_norm(&ls.grid)?;
            Ok(TrivialityOutcome {
                trivial: norm < 1e-10,
                solve_residual: norm,
                q_norm: None,
                lambda: vec![None; ls.grid.len()],
                dupin: false,
            })
        }
        GeometryKind::LieSphere33 | GeometryKind::LieSphere42 => lie_solve(eta, ls),
    }
}

/// Pointwise least squares for `dξ = η` against a rank-1 potential line
/// `ξ = λ·P(u,v)`: unknowns `(λ, λ_u, λ_v)` at each point, equations
/// `η_u = λ_u P + λ P_u`, `η_v = λ_v P + λ P_v`.
fn potential_lstsq(
    eta: &OneForm,
    ls: &LiftedSurface,
    generator: impl Fn(f64, f64, usize) -> Result<JetMat>,
) -> Result<(f64, Vec<Option<f64>>)> {
    let n = ls.spec.space.dimension();
    let mut worst: f64 = 0.0;
    let mut lambda = vec![None; ls.grid.len()];
    for ((i, j), _) in ls.interior_ok() {
        let (u, v) = ls.grid.point(i, j);
        let (eu, ev) = eta.values(u, v)?;
        let p = generator(u, v, 1)?;
        let p0 = p.value();
        let pu = p.deriv(1, 0);
        let pv = p.deriv(0, 1);
        // columns: λ, λ_u, λ_v
        let rows = 2 * n * n;
        let mut a = DMatrix::zeros(rows, 3);
        let mut b = DVector::zeros(rows);
        for r in 0..n {
            for c in 0..n {
                let idx = r * n + c;
                a[(idx, 0)] = pu[(r, c)];
                a[(idx, 1)] = p0[(r, c)];
                b[idx] = eu[(r, c)];
                let idx2 = n * n + idx;
                a[(idx2, 0)] = pv[(r, c)];
                a[(idx2, 2)] = p0[(r, c)];
                b[idx2] = ev[(r, c)];
            }
        }
        let (x, raw) = crate::linalg::lstsq(&a, &b, 1e-12);
        let res = raw / (1.0 + b.norm());
        worst = worst.max(res);
        lambda[ls.grid.index(i, j)] = Some(x[0]);
    }
    Ok((worst, lambda))
}

fn projective_solve(eta: &OneForm, ls: &LiftedSurface) -> Result<TrivialityOutcome> {
    let section = ls.section.clone();
    let (residual, lambda) = potential_lstsq(eta, ls, move |u, v, d| {
        let sigma = section.eval(u, v, d + 2)?;
        let adapted = crate::geometry::adapted_frame(&sigma)?;
        Ok(psi_basis(&sigma, &adapted).to_degree(d))
    })?;
    Ok(TrivialityOutcome {
        trivial: residual < 1e-8,
        solve_residual: residual,
        q_norm: None,
        lambda,
        dupin: false,
    })
}

fn lie_solve(eta: &OneForm, ls: &LiftedSurface) -> Result<TrivialityOutcome> {
    // Triviality itself is decided by q and the potential solve; the Dupin
    // degeneracy only widens the group-level uniqueness (the ρ involution),
    // so it is reported rather than fatal.
    let dupin = crate::geometry::is_dupin(ls)?;
    let q = quadratic_differential(eta, ls)?;
    let section = ls.section.clone();
    let section_tilde = ls.section_tilde.clone().ok_or(Error::GeometryMismatch {
        required: "a Legendre lift",
        actual: ls.spec.kind.key().into(),
    })?;
    let space = ls.spec.space.clone();
    let (residual, lambda) = potential_lstsq(eta, ls, move |u, v, d| {
        let s = section.eval(u, v, d)?;
        let t = section_tilde.eval(u, v, d)?;
        Ok(wedge_matrix_jet(&s, &t, &space).to_degree(d))
    })?;
    let q_pass = q.max_abs < 1e-8;
    let solve_pass = residual < 1e-8;
    Ok(TrivialityOutcome {
        trivial: q_pass && solve_pass,
        solve_residual: residual,
        q_norm: Some(q.max_abs),
        lambda,
        dupin,
    })
}
