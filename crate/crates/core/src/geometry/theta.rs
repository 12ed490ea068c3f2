//! The admissibility bundle `Θ` and triviality bundle `Ψ` of a projective
//! surface.
//!
//! In the adapted frame `(σ, σ_u, σ_v, σ_uv)` with jet-exact dual
//! `(ℓ₀, ℓ₁, ℓ₂, ℓ₃)`, the bundle `Θ = {A : AF = 0, AF⁽¹⁾ ≤ F}` is spanned
//! by the five dyads
//!
//! ```text
//! σ⊗ℓ₁, σ⊗ℓ₂, σ⊗ℓ₃, σ_u⊗ℓ₃, σ_v⊗ℓ₃,
//! ```
//!
//! all trace-free by duality, and `Ψ = {A : AF⁽¹⁾ = 0, im A ≤ F}` is the
//! line spanned by `σ⊗ℓ₃`. The frames carry jets so sampled `Θ`-valued
//! 1-forms come with the coefficient derivatives the higher-order
//! conditions need.

use nalgebra::DMatrix;

use super::AdaptedFrame;
use crate::jet::{JetMat, JetVec};
use crate::subbundle::nullspace;

/// Jet-valued generators of `Θ` at a point.
pub struct ThetaFrame {
    /// `σ⊗ℓ₁, σ⊗ℓ₂, σ⊗ℓ₃, σ_u⊗ℓ₃, σ_v⊗ℓ₃` in this order.
    pub gens: Vec<JetMat>,
}

/// Outer product `col ⊗ (row r of dual)` with jet entries.
fn outer(col: &JetVec, dual: &JetMat, r: usize) -> JetMat {
    let d = col.degree().min(dual.degree());
    JetMat::from_fn(dual.ncols(), dual.ncols(), |i, j| {
        col.comp(i).to_degree(d).mul(&dual.entry(r, j).to_degree(d))
    })
}

pub fn theta_basis(sigma: &JetVec, adapted: &AdaptedFrame) -> ThetaFrame {
    let su = sigma.du();
    let sv = sigma.dv();
    ThetaFrame {
        gens: vec![
            outer(sigma, &adapted.dual, 1),
            outer(sigma, &adapted.dual, 2),
            outer(sigma, &adapted.dual, 3),
            outer(&su, &adapted.dual, 3),
            outer(&sv, &adapted.dual, 3),
        ],
    }
}

/// The rank-1 bundle `Ψ`: generator `σ⊗ℓ₃`.
pub fn psi_basis(sigma: &JetVec, adapted: &AdaptedFrame) -> JetMat {
    outer(sigma, &adapted.dual, 3)
}

/// Dimension of `Θ` computed independently of the frame: the nullspace of
/// the linear constraints `Aσ = 0`, `Aσ_u, Aσ_v ∈ ⟨σ⟩`, `tr A = 0` on the
/// 16-dimensional matrix space.
pub fn theta_dimension(adapted: &AdaptedFrame) -> usize {
    let frame = adapted.frame.value();
    let dual = adapted.dual.value();
    let sigma = frame.column(0).into_owned();
    let su = frame.column(1).into_owned();
    let sv = frame.column(2).into_owned();
    // rows of `dual` are the functionals ℓ_r; A's column action is probed
    // against them.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let vec_index = |i: usize, j: usize| i * 4 + j; // A[(i,j)]
                                                    // Aσ = 0: 4 equations
    for i in 0..4 {
        let mut row = vec![0.0; 16];
        for j in 0..4 {
            row[vec_index(i, j)] = sigma[j];
        }
        rows.push(row);
    }
    // ℓ_r(A σ_u) = 0 for r ∈ {1,2,3} (component of Aσ_u outside ⟨σ⟩)
    for target in [&su, &sv] {
        for r in 1..4 {
            let mut row = vec![0.0; 16];
            for i in 0..4 {
                for j in 0..4 {
                    row[vec_index(i, j)] += dual[(r, i)] * target[j];
                }
            }
            rows.push(row);
        }
    }
    // trace
    let mut row = vec![0.0; 16];
    for i in 0..4 {
        row[vec_index(i, i)] = 1.0;
    }
    rows.push(row);

    let m = DMatrix::from_fn(rows.len(), 16, |i, j| rows[i][j]);
    nullspace(&m).ncols()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::geometry::projective_lift;
    use crate::grid::ParamGrid;

    #[test]
    fn theta_generators_satisfy_the_defining_conditions() {
        let e = parse("(1, u, v, u*v)").unwrap();
        let g = ParamGrid::new((-1.0, 1.0), (-1.0, 1.0), 9, 9, false, false).unwrap();
        let ls = projective_lift(&e, &g, 4).unwrap();
        for ((_, _), d) in ls.interior_ok() {
            let adapted = d.adapted.as_ref().unwrap();
            let frame = theta_basis(&d.sigma, adapted);
            let sigma = d.sigma.value();
            let su = d.sigma.deriv(1, 0);
            let sv = d.sigma.deriv(0, 1);
            for gen in &frame.gens {
                let a = gen.value();
                assert!((&a * &sigma).norm() < 1e-12, "AF ≠ 0");
                // A σ_u, A σ_v ∈ ⟨σ⟩
                for t in [&su, &sv] {
                    let img = &a * t;
                    let coeff = img.dot(&sigma) / sigma.dot(&sigma);
                    assert!((img - &sigma * coeff).norm() < 1e-10, "AF^(1) ⊄ F");
                }
                assert!(a.trace().abs() < 1e-12, "trace ≠ 0");
            }
        }
    }

    #[test]
    fn theta_dimension_constant_on_the_quadric() {
        let e = parse("(1, u, v, u*v)").unwrap();
        let g = ParamGrid::new((-1.0, 1.0), (-1.0, 1.0), 9, 9, false, false).unwrap();
        let ls = projective_lift(&e, &g, 3).unwrap();
        let mut dims = std::collections::BTreeSet::new();
        for ((_, _), d) in ls.interior_ok() {
            dims.insert(theta_dimension(d.adapted.as_ref().unwrap()));
        }
        assert_eq!(dims.len(), 1, "dimension not constant: {dims:?}");
        // and the frame generators span exactly that dimension
        assert_eq!(dims.into_iter().next().unwrap(), 5);
    }

    #[test]
    fn psi_is_a_two_step_nilpotent_line() {
        let e = parse("(1, u, v, u*v)").unwrap();
        let g = ParamGrid::new((-1.0, 1.0), (-1.0, 1.0), 9, 9, false, false).unwrap();
        let ls = projective_lift(&e, &g, 3).unwrap();
        for ((_, _), d) in ls.interior_ok() {
            let psi = psi_basis(&d.sigma, d.adapted.as_ref().unwrap()).value();
            assert!((&psi * &psi).norm() < 1e-12, "ψ² ≠ 0");
            // kernel contains F^(1), image inside F
            let f1 = d.f1.basis_matrix();
            assert!((&psi * &f1).norm() < 1e-10);
            let img = &psi * d.sigma.deriv(1, 1);
            let sigma = d.sigma.value();
            let c = img.dot(&sigma) / sigma.dot(&sigma);
            assert!((img - sigma * c).norm() < 1e-10);
        }
    }
}
