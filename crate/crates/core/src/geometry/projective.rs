use std::rc::Rc;

use super::{flag, GeometrySpec, LiftBuilder, LiftedSurface, PointData, SectionEval};
use crate::directions::asymptotic_directions;
use crate::dsl::SurfaceExpr;
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::jet::JetVec;
use crate::subbundle::{span_with_derivatives, BundleLabel, RANK_TOL};

fn homogenize(expr: &SurfaceExpr) -> Result<SurfaceExpr> {
    match expr.arity() {
        4 => Ok(expr.clone()),
        3 => {
            let mut components = vec![crate::dsl::Expr::Num(1.0)];
            components.extend(expr.components.iter().cloned());
            Ok(SurfaceExpr { components })
        }
        n => Err(Error::Other(format!(
            "projective lift needs 3 or 4 components, got {n}"
        ))),
    }
}

pub fn lift(expr: &SurfaceExpr, grid: &ParamGrid, degree: usize) -> Result<LiftedSurface> {
    let expr = homogenize(expr)?;
    let mut builder = LiftBuilder::new(grid.len());
    for (i, j) in grid.indices() {
        let p = grid.point(i, j);
        let sigma = match expr.eval_jet(p.0, p.1, degree) {
            Ok(s) => s,
            Err(e) => {
                flag(&mut builder.flagged, i, j, p, e.to_string());
                continue;
            }
        };
        match analyze_point(&sigma, p) {
            Ok(data) => builder.points[grid.index(i, j)] = Some(data),
            Err(reason) => flag(&mut builder.flagged, i, j, p, reason),
        }
    }
    let source = expr.to_string();
    let section_expr = expr.clone();
    let section = SectionEval(Rc::new(move |u, v, d| section_expr.eval_jet(u, v, d)));
    builder.finish(
        GeometrySpec::projective(),
        grid.clone(),
        degree,
        section,
        None,
        source,
    )
}

fn analyze_point(sigma: &JetVec, p: (f64, f64)) -> std::result::Result<PointData, String> {
    let f1 = span_with_derivatives(std::slice::from_ref(sigma), 1, RANK_TOL, p, BundleLabel::F1)
        .map_err(|e| e.to_string())?;
    if f1.rank != 3 {
        return Err(format!("F^(1) rank {} ≠ 3 (not an immersion)", f1.rank));
    }
    let f2 = span_with_derivatives(std::slice::from_ref(sigma), 2, RANK_TOL, p, BundleLabel::F2)
        .map_err(|e| e.to_string())?;
    if f2.rank != 4 {
        return Err(format!("F^(2) rank {} ≠ 4", f2.rank));
    }
    let adapted = super::adapted_frame(sigma).map_err(|e| e.to_string())?;
    let asymptotic = asymptotic_directions(sigma, &f1, p).ok();
    Ok(PointData {
        sigma: sigma.clone(),
        sigma_tilde: None,
        f1,
        f2: Some(f2),
        adapted: Some(adapted),
        asymptotic,
        curvature: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::Realness;
    use crate::dsl::parse;

    fn grid() -> ParamGrid {
        ParamGrid::new((-1.0, 1.0), (-1.0, 1.0), 9, 9, false, false).unwrap()
    }

    #[test]
    fn quadric_lift_is_valid_with_coordinate_asymptotics() {
        let e = parse("(1, u, v, u*v)").unwrap();
        let ls = lift(&e, &grid(), 3).unwrap();
        assert!(ls.flagged.is_empty());
        let d = ls.point(4, 4).unwrap();
        let (a1, a2) = d.asymptotic.as_ref().unwrap();
        assert_eq!(a1.realness, Realness::Real);
        assert!(a1.direction.0.abs().max(a2.direction.0.abs()) > 0.999);
    }

    #[test]
    fn plane_rejected_everywhere() {
        let e = parse("(1, u, v, 0)").unwrap();
        match lift(&e, &grid(), 3) {
            Err(Error::GeometryAssumption { .. }) => {}
            Ok(_) => panic!("expected geometry assumption failure"),
            Err(other) => panic!("expected geometry assumption failure, got {other}"),
        }
    }

    #[test]
    fn elliptic_paraboloid_has_complex_asymptotics() {
        let e = parse("(1, u, v, u*u + v*v)").unwrap();
        let ls = lift(&e, &grid(), 3).unwrap();
        let d = ls.point(2, 6).unwrap();
        let (a1, _) = d.asymptotic.as_ref().unwrap();
        assert_eq!(a1.realness, Realness::ComplexPair);
    }

    #[test]
    fn three_component_input_homogenised() {
        let e = parse("(u, v, u*v)").unwrap();
        let ls = lift(&e, &grid(), 3).unwrap();
        assert_eq!(ls.point(4, 4).unwrap().sigma.dim(), 4);
        assert_eq!(ls.point(4, 4).unwrap().sigma.value()[0], 1.0);
    }
}
