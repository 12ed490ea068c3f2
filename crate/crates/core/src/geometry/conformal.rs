use std::rc::Rc;

use nalgebra::DMatrix;

use super::{flag, GeometrySpec, LiftBuilder, LiftedSurface, PointData, SectionEval};
use crate::dsl::SurfaceExpr;
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::jet::{Jet2, JetVec};
use crate::multilinear::MetricSpace;
use crate::subbundle::{span_with_derivatives, BundleLabel, RANK_TOL};

/// Light-cone lift `σ = (x, (1−|x|²)/2, (1+|x|²)/2)` in signature
/// `(+,+,+,+,−)` order; `(σ,σ) = 0` holds identically in jet arithmetic.
pub fn light_cone_jet(x: &JetVec) -> JetVec {
    assert_eq!(x.dim(), 3, "light-cone lift expects a map into R^3");
    let d = x.degree();
    let mut norm_sq = Jet2::zero(d);
    for k in 0..3 {
        norm_sq = norm_sq.add(&x.comp(k).mul(x.comp(k)));
    }
    let half = Jet2::constant(0.5, d);
    let p = half.sub(&norm_sq.scale(0.5));
    let q = half.add(&norm_sq.scale(0.5));
    JetVec::new(vec![
        x.comp(0).clone(),
        x.comp(1).clone(),
        x.comp(2).clone(),
        p,
        q,
    ])
}

pub fn lift(expr: &SurfaceExpr, grid: &ParamGrid, degree: usize) -> Result<LiftedSurface> {
    if expr.arity() != 3 {
        return Err(Error::Other(format!(
            "conformal lift needs a 3-component immersion, got {} components",
            expr.arity()
        )));
    }
    let space = MetricSpace::indefinite(4, 1);
    let mut builder = LiftBuilder::new(grid.len());
    for (i, j) in grid.indices() {
        let p = grid.point(i, j);
        let x = match expr.eval_jet(p.0, p.1, degree) {
            Ok(x) => x,
            Err(e) => {
                flag(&mut builder.flagged, i, j, p, e.to_string());
                continue;
            }
        };
        match analyze_point(&x, &space, p) {
            Ok(data) => builder.points[grid.index(i, j)] = Some(data),
            Err(reason) => flag(&mut builder.flagged, i, j, p, reason),
        }
    }
    let source = expr.to_string();
    let e = expr.clone();
    let section = SectionEval(Rc::new(move |u, v, d| {
        Ok(light_cone_jet(&e.eval_jet(u, v, d)?))
    }));
    builder.finish(
        GeometrySpec::conformal(),
        grid.clone(),
        degree,
        section,
        None,
        source,
    )
}

fn analyze_point(
    x: &JetVec,
    space: &MetricSpace,
    p: (f64, f64),
) -> std::result::Result<PointData, String> {
    // immersion: dx has rank 2
    let dx = DMatrix::from_columns(&[x.deriv(1, 0), x.deriv(0, 1)]);
    let sv = crate::linalg::svd(&dx).singular_values;
    if sv.min() < RANK_TOL * sv.max() {
        return Err("not an immersion (rank dx < 2)".into());
    }
    let sigma = light_cone_jet(x);
    // nullity of the lift is an algebraic identity; certify anyway
    let null_res = sigma.inner(&sigma, space).max_abs_coeff();
    let scale = 1.0 + sigma.max_abs_coeff();
    if null_res > 1e-12 * scale * scale {
        return Err(format!("light-cone lift not null: {null_res:.3e}"));
    }
    let f1 = span_with_derivatives(
        std::slice::from_ref(&sigma),
        1,
        RANK_TOL,
        p,
        BundleLabel::F1,
    )
    .map_err(|e| e.to_string())?;
    if f1.rank != 3 {
        return Err(format!("F^(1) rank {} ≠ 3", f1.rank));
    }
    // F^(1) ≤ F^⊥: every basis vector pairs to zero with σ
    let mut pair_res: f64 = 0.0;
    for b in &f1.basis {
        pair_res = pair_res.max(space.inner(b, &sigma.value()).abs());
    }
    if pair_res > 1e-10 * scale {
        return Err(format!("F^(1) ⊄ F^⊥: {pair_res:.3e}"));
    }
    Ok(PointData {
        sigma,
        sigma_tilde: None,
        f1,
        f2: None,
        adapted: None,
        asymptotic: None,
        curvature: None,
    })
}
