//! The contact lift `f = F ∧ F⁽¹⁾` of a projective surface and the
//! transfer of deformation forms through the induced isomorphism
//! `φ: sl(4) → o(3,3)`.
//!
//! `φ(A)(v∧w) = Av∧w + v∧Aw` is constant across the grid, so it
//! intertwines the trivial connections: closed `Θ`-valued forms map to
//! closed `f∧f^⊥`-valued forms, `Ψ` maps onto `∧²f`, and the triviality
//! verdict is preserved in both directions.

use std::rc::Rc;

use nalgebra::{DMatrix, DVector};

use crate::deform::{induced_action_jet, OneForm};
use crate::error::{Error, Result};
use crate::geometry::quaddiff::wedge_containment_residual;
use crate::geometry::{
    legendre_from_sections, psi_basis, theta_basis, GeometryKind, GeometrySpec, LiftedSurface,
    SectionEval,
};
use crate::jet::{Jet2, JetVec};
use crate::multilinear::{induced_action, AlgebraKind, WedgeSpace};
use crate::subbundle::subspace_distance;

/// Both sides of the correspondence for one surface, plus the fixed
/// isomorphism data.
pub struct BridgeContext {
    pub projective: LiftedSurface,
    pub lie: LiftedSurface,
    pub wedge: WedgeSpace,
}

/// Wedge of two jet vectors into the lexicographic ∧² basis.
pub fn wedge2_jet(a: &JetVec, b: &JetVec, ws: &WedgeSpace) -> JetVec {
    let d = a.degree().min(b.degree());
    JetVec::new(
        ws.basis_order()
            .iter()
            .map(|&(i, j)| {
                a.comp(i)
                    .to_degree(d)
                    .mul(&b.comp(j).to_degree(d))
                    .sub(&a.comp(j).to_degree(d).mul(&b.comp(i).to_degree(d)))
            })
            .collect(),
    )
}

/// Decomposability defect of a 2-vector under the volume pairing:
/// `w` is decomposable iff `w∧w = 0` iff `⟨w, w⟩ = 0`.
pub fn pluecker_residual(w: &DVector<f64>, ws: &WedgeSpace) -> f64 {
    let g = ws.space().gram();
    ((w.transpose() * g * w)[(0, 0)]).abs() / (1.0 + w.norm_squared())
}

/// Build the Legendre lift `f = F∧F⁽¹⁾ = ⟨σ∧σ_u, σ∧σ_v⟩` of a projective
/// surface over `R^{3,3}` (the volume pairing on `∧²R⁴`).
pub fn contact_lift(ls: &LiftedSurface) -> Result<LiftedSurface> {
    if ls.spec.kind != GeometryKind::Projective {
        return Err(Error::GeometryMismatch {
            required: "a projective lift",
            actual: ls.spec.kind.key().into(),
        });
    }
    let ws = WedgeSpace::volume_pairing_r4()?;
    let spec = GeometrySpec::lie_sphere_33();
    let section_src = ls.section.clone();
    let ws1 = ws.clone();
    let section = SectionEval(Rc::new(move |u, v, d| {
        let sigma = section_src.eval(u, v, d + 1)?;
        Ok(wedge2_jet(&sigma, &sigma.du(), &ws1))
    }));
    let section_src2 = ls.section.clone();
    let ws2 = ws.clone();
    let section_tilde = SectionEval(Rc::new(move |u, v, d| {
        let sigma = section_src2.eval(u, v, d + 1)?;
        Ok(wedge2_jet(&sigma, &sigma.dv(), &ws2))
    }));
    legendre_from_sections(
        spec,
        &ls.grid,
        ls.degree,
        section,
        section_tilde,
        format!("contact_lift({})", ls.source),
    )
}

pub fn bridge(ls: &LiftedSurface) -> Result<BridgeContext> {
    let lie = contact_lift(ls)?;
    Ok(BridgeContext {
        projective: ls.clone(),
        lie,
        wedge: WedgeSpace::volume_pairing_r4()?,
    })
}

/// Push a `Θ`-valued form through `φ`: pointwise `φ∘η`. Containment in
/// `f∧f^⊥` is certified on the grid and a violation rejects the
/// transfer.
pub fn transfer_form(eta: &OneForm, ctx: &BridgeContext) -> Result<OneForm> {
    let ws = ctx.wedge.clone();
    let inner = eta.clone();
    let transferred = OneForm::from_fn(
        ws.space().clone(),
        AlgebraKind::Orthogonal,
        format!("phi({})", eta.label),
        move |u, v, d| {
            let (mu, mv) = inner.eval(u, v, d)?;
            Ok((induced_action_jet(&mu, &ws), induced_action_jet(&mv, &ws)))
        },
    );
    let (containment, at) = wedge_containment_residual(&transferred, &ctx.lie)?;
    if containment > 1e-10 {
        return Err(Error::FormRejected {
            reason: format!(
                "transferred form is not f∧f^⊥-valued at ({:.4}, {:.4})",
                at.0, at.1
            ),
            residual: containment,
        });
    }
    Ok(transferred)
}

fn flat(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.nrows() * m.ncols(), m.iter().copied())
}

/// Subspace-level audit of the isomorphism at one grid point: distances
/// `φ(Θ_p) ↔ (f∧f^⊥)_p` and `φ(Ψ_p) ↔ (∧²f)_p`.
pub fn subspace_audit(ctx: &BridgeContext, i: usize, j: usize) -> Result<(f64, f64)> {
    let pd = ctx
        .projective
        .point(i, j)
        .ok_or_else(|| Error::Other("flagged point".into()))?;
    let ld = ctx
        .lie
        .point(i, j)
        .ok_or_else(|| Error::Other("flagged point on the lie side".into()))?;
    let adapted = pd.adapted.as_ref().expect("projective adapted frame");
    let theta = theta_basis(&pd.sigma, adapted);
    let psi = psi_basis(&pd.sigma, adapted);

    let phi_theta = DMatrix::from_columns(
        &theta
            .gens
            .iter()
            .map(|g| Ok(flat(&induced_action(&g.value(), &ctx.wedge)?)))
            .collect::<Result<Vec<_>>>()?,
    );

    let s = ld.sigma.value();
    let t = ld.sigma_tilde.as_ref().unwrap().value();
    let space = &ctx.lie.spec.space;
    let f_wedge_fperp = crate::geometry::quaddiff::wedge_basis_matrix(&s, &t, space);
    let theta_dist = subspace_distance(&phi_theta, &f_wedge_fperp);

    let phi_psi = DMatrix::from_columns(&[flat(&induced_action(&psi.value(), &ctx.wedge)?)]);
    let ga = space.gram() * &s;
    let gb = space.gram() * &t;
    let wedge2f = DMatrix::from_columns(&[flat(&(&t * ga.transpose() - &s * gb.transpose()))]);
    let psi_dist = subspace_distance(&phi_psi, &wedge2f);

    Ok((theta_dist, psi_dist))
}


/// Distance of the contact lift's derived bundle from
/// `F⁽¹⁾∧F⁽¹⁾ + F∧R⁴` at one point.
pub fn derived_bundle_identity(ctx: &BridgeContext, i: usize, j: usize) -> Result<f64> {
    let pd = ctx
        .projective
        .point(i, j)
        .ok_or_else(|| Error::Other("flagged point".into()))?;
    let ld = ctx
        .lie
        .point(i, j)
        .ok_or_else(|| Error::Other("flagged point on the lie side".into()))?;
    let ws = &ctx.wedge;
    let sigma = &pd.sigma;
    let degree = sigma.degree();

    let f1 = ld.f1.basis_matrix();

    let su = sigma.du();
    let sv = sigma.dv();
    let mut cols = vec![
        wedge2_jet(sigma, &su, ws).value(),
        wedge2_jet(sigma, &sv, ws).value(),
        wedge2_jet(&su, &sv, ws).value(),
    ];
    for k in 0..4 {
        let e = JetVec::new(
            (0..4)
                .map(|c| {
                    if c == k {
                        Jet2::constant(1.0, degree)
                    } else {
                        Jet2::zero(degree)
                    }
                })
                .collect(),
        );
        cols.push(wedge2_jet(sigma, &e, ws).value());
    }
    let expected = DMatrix::from_columns(&cols);
    Ok(subspace_distance(&f1, &expected))
}
