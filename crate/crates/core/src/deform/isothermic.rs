use super::{closure_residual, wedge_matrix_jet, OneForm};
use crate::dsl::BuiltinSurface;
use crate::error::{Error, Result};
use crate::geometry::{light_cone_jet, LiftedSurface};
use crate::jet::{Jet2, JetVec};
use crate::multilinear::{AlgebraKind, MetricSpace};

/// The flat-gauge derivative of the dual lift: for a Christoffel pair
/// `(x, x*)` in conformal coordinates,
/// `w(X) = (d_X x*, −(x·d_X x*), (x·d_X x*))` satisfies `(σ, w(X)) = 0`,
/// so `η(X) = σ ∧ w(X)` is `F∧F^⊥`-valued; closedness follows from the
/// Christoffel relation `dx* = (x_u du − x_v dv)/|x_u|²`.
fn dual_tangent_jets(x: &JetVec, xstar_deriv: &JetVec) -> JetVec {
    let d = x.degree().min(xstar_deriv.degree());
    let mut dot = Jet2::zero(d);
    for k in 0..3 {
        dot = dot.add(
            &x.comp(k)
                .to_degree(d)
                .mul(&xstar_deriv.comp(k).to_degree(d)),
        );
    }
    JetVec::new(vec![
        xstar_deriv.comp(0).to_degree(d),
        xstar_deriv.comp(1).to_degree(d),
        xstar_deriv.comp(2).to_degree(d),
        dot.neg(),
        dot,
    ])
}

/// Build the isothermic deformation form `η(X) = σ ∧ w(X)` of a built-in
/// isothermic surface on its conformal lift, then certify it post-hoc:
/// closedness and `F∧F^⊥`-containment are checked over the grid, and the
/// form is rejected if either fails. The recipe is input, the residuals
/// are the authority.
pub fn isothermic_form(builtin: &BuiltinSurface, ls: &LiftedSurface) -> Result<OneForm> {
    let dual = builtin.dual_expr().ok_or_else(|| {
        Error::Other(format!(
            "built-in surface `{}` has no Christoffel dual",
            builtin.name
        ))
    })?;
    let surface = builtin.expr();
    let space = MetricSpace::indefinite(4, 1);
    let eta = OneForm::from_fn(
        space.clone(),
        AlgebraKind::Orthogonal,
        format!("isothermic({})", builtin.name),
        move |u, v, d| {
            let x = surface.eval_jet(u, v, d + 1)?;
            let xs = dual.eval_jet(u, v, d + 1)?;
            let sigma = light_cone_jet(&x);
            let wu = dual_tangent_jets(&x, &xs.du());
            let wv = dual_tangent_jets(&x, &xs.dv());
            Ok((
                wedge_matrix_jet(&sigma.to_degree(d), &wu.to_degree(d), &space),
                wedge_matrix_jet(&sigma.to_degree(d), &wv.to_degree(d), &space),
            ))
        },
    );
    certify(&eta, ls)?;
    Ok(eta)
}

/// The same construction pushed into the Lie sphere picture: on the
/// `R^{4,2}` Legendre lift of the same surface, `η(X) = σ_pt ∧ ŵ(X)` with
/// `ŵ` the zero-extended flat-gauge dual derivative. Values lie in
/// `f∧f^⊥` because `ŵ ⊥ σ̃` reduces to `x*_X ⊥ ν`.
pub fn lie_isothermic_form(builtin: &BuiltinSurface, ls: &LiftedSurface) -> Result<OneForm> {
    let dual = builtin.dual_expr().ok_or_else(|| {
        Error::Other(format!(
            "built-in surface `{}` has no Christoffel dual",
            builtin.name
        ))
    })?;
    let surface = builtin.expr();
    let space = MetricSpace::indefinite(4, 2);
    let eta = OneForm::from_fn(
        space.clone(),
        AlgebraKind::Orthogonal,
        format!("lie_isothermic({})", builtin.name),
        move |u, v, d| {
            let x = surface.eval_jet(u, v, d + 1)?;
            let xs = dual.eval_jet(u, v, d + 1)?;
            let sigma = crate::geometry::point_sphere_jet(&x);
            let extend = |w: JetVec| {
                let deg = w.degree();
                let mut comps = w.comps().to_vec();
                comps.push(Jet2::zero(deg));
                JetVec::new(comps)
            };
            let wu = extend(dual_tangent_jets(&x, &xs.du()));
            let wv = extend(dual_tangent_jets(&x, &xs.dv()));
            Ok((
                wedge_matrix_jet(&sigma.to_degree(d), &wu.to_degree(d), &space),
                wedge_matrix_jet(&sigma.to_degree(d), &wv.to_degree(d), &space),
            ))
        },
    );
    // closedness certification; f∧f^⊥ containment is certified by the
    // quadratic-differential decomposition wherever q is evaluated
    let closure = closure_residual(&eta, &ls.grid)?;
    if closure.max() > 1e-8 {
        return Err(Error::FormRejected {
            reason: "candidate form rejected: not closed".into(),
            residual: closure.max(),
        });
    }
    Ok(eta)
}

/// Exact `∧²f`-valued potential form `η = d(λ·σ∧σ̃)` on a Legendre lift —
/// the trivial deformations of the Lie sphere picture.
pub fn lie_wedge_exact_form(ls: &LiftedSurface, lambda: super::CoeffField) -> Result<OneForm> {
    let section = ls.section.clone();
    let section_tilde = ls.section_tilde.clone().ok_or(Error::GeometryMismatch {
        required: "a Legendre lift",
        actual: ls.spec.kind.key().into(),
    })?;
    let space = ls.spec.space.clone();
    let sp = space.clone();
    Ok(OneForm::exact(
        space,
        AlgebraKind::Orthogonal,
        "d(λ·σ∧σ̃)",
        move |u, v, d| {
            let s = section.eval(u, v, d)?;
            let t = section_tilde.eval(u, v, d)?;
            let xi = wedge_matrix_jet(&s, &t, &sp);
            Ok(xi.scale_jet(&lambda.eval_jet(u, v, xi.degree())))
        },
    ))
}

/// A form with an injected curvature-sphere component
/// `t·(σ₁ ∧ d σ₁)`: not closed and with `q ≠ 0`; the canonical
/// non-trivial (indeed inadmissible) probe input for the `q` machinery.
pub fn sphere_injected_form(ls: &LiftedSurface, t: f64) -> Result<OneForm> {
    let section = ls.section.clone();
    let section_tilde = ls.section_tilde.clone().ok_or(Error::GeometryMismatch {
        required: "a Legendre lift",
        actual: ls.spec.kind.key().into(),
    })?;
    let space = ls.spec.space.clone();
    let sp = space.clone();
    Ok(OneForm::from_fn(
        space,
        AlgebraKind::Orthogonal,
        format!("{t}·σ₁∧dσ₁"),
        move |u, v, d| {
            let s = section.eval(u, v, d + 2)?;
            let st = section_tilde.eval(u, v, d + 2)?;
            let cur = crate::geometry::curvature_spheres(&s, &st, &sp, (u, v))?;
            let s1 = cur.s1;
            Ok((
                wedge_matrix_jet(&s1.to_degree(d), &s1.du().to_degree(d), &sp).scale(t),
                wedge_matrix_jet(&s1.to_degree(d), &s1.dv().to_degree(d), &sp).scale(t),
            ))
        },
    ))
}

fn certify(eta: &OneForm, ls: &LiftedSurface) -> Result<()> {
    let closure = closure_residual(eta, &ls.grid)?;
    if closure.max() > 1e-8 {
        return Err(Error::FormRejected {
            reason: "candidate form rejected: not closed".into(),
            residual: closure.max(),
        });
    }
    // F∧F^⊥ containment: decompose η(X) against the wedge basis σ∧z,
    // z ∈ F^⊥, and measure the leftover
    let space = &ls.spec.space;
    let mut worst: f64 = 0.0;
    for ((i, j), data) in ls.interior_ok() {
        let p = ls.grid.point(i, j);
        let (mu, mv) = eta.values(p.0, p.1)?;
        let sigma = data.sigma.value();
        let fperp = crate::subbundle::metric_orthogonal_complement(
            &nalgebra::DMatrix::from_columns(std::slice::from_ref(&sigma)),
            space,
        );
        let n = space.dimension();
        let wedge_flat = |a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>| {
            let ga = space.gram() * a;
            let gb = space.gram() * b;
            let m = b * ga.transpose() - a * gb.transpose();
            nalgebra::DVector::from_iterator(n * n, m.iter().copied())
        };
        let cols: Vec<nalgebra::DVector<f64>> = fperp
            .column_iter()
            .map(|z| wedge_flat(&sigma, &z.into_owned()))
            .collect();
        let basis = nalgebra::DMatrix::from_columns(&cols);
        for m in [&mu, &mv] {
            let flat = nalgebra::DVector::from_iterator(n * n, m.iter().copied());
            let (_, res) = crate::linalg::lstsq(&basis, &flat, 1e-12);
            worst = worst.max(res / (1.0 + flat.norm()));
        }
    }
    if worst > 1e-10 {
        return Err(Error::FormRejected {
            reason: "candidate form rejected: not F∧F^⊥-valued".into(),
            residual: worst,
        });
    }
    Ok(())
}
