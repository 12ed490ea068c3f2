//! Browser bindings: parse a surface, lift it into a chosen geometry and
//! expose three interactive operations — surface analysis (ranks,
//! curvature/asymptotic direction fields), the deformability check
//! (residual heatmaps and verdicts per order), and the contact-order probe
//! at a grid point. All results cross the boundary as JSON strings; the
//! page renders them onto canvases.

use deforma::bridge;
use deforma::deform::{
    chart_condition_tower, closure_residual, contact_order_probe, covector_set,
    invariant_condition_tower, isothermic_form, lie_isothermic_form, maurer_cartan_residual,
    sample_theta_form, triviality_solve, CoeffField, OneForm, RepContext,
};
use deforma::dsl;
use deforma::geometry::{
    conformal_lift, legendre_lift, projective_lift, GeometryKind, LiftedSurface,
};
use deforma::grid::ParamGrid;
use deforma::report::ResidualField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct GridEcho {
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
    nu: usize,
    nv: usize,
}

#[derive(Serialize)]
struct AnalyzeOut {
    geometry: String,
    surface: String,
    grid: GridEcho,
    /// embedded positions for the 3D-ish preview (first three coordinates
    /// of the underlying immersion where available)
    positions: Vec<Option<[f64; 3]>>,
    /// unit direction fields in parameter space (two per point when real)
    directions: Vec<Option<[[f64; 2]; 2]>>,
    complex_directions: Vec<bool>,
    flagged: Vec<[f64; 2]>,
    dupin: Option<bool>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct FieldOut {
    name: String,
    values: Vec<Option<f64>>,
    max: f64,
    mean: f64,
}

#[derive(Serialize)]
struct CheckOut {
    geometry: String,
    eta: String,
    grid: GridEcho,
    fields: Vec<FieldOut>,
    verdicts: Vec<(String, bool)>,
    triviality: Option<String>,
    q_norm: Option<f64>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct ProbeOut {
    point: [usize; 2],
    ratio: f64,
    estimated_order: f64,
    target: usize,
    within_band: bool,
    negligible: bool,
    defect_coarse: f64,
    defect_fine: f64,
}

fn echo(grid: &ParamGrid) -> GridEcho {
    GridEcho {
        u0: grid.u_range.0,
        u1: grid.u_range.1,
        v0: grid.v_range.0,
        v1: grid.v_range.1,
        nu: grid.nu,
        nv: grid.nv,
    }
}

fn make_grid(
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
    nu: usize,
    nv: usize,
) -> Result<ParamGrid, String> {
    ParamGrid::new((u0, u1), (v0, v1), nu, nv, false, false).map_err(|e| e.to_string())
}

fn lift(
    surface: &str,
    geometry: &str,
    grid: &ParamGrid,
) -> Result<(LiftedSurface, dsl::SurfaceExpr), String> {
    let text = match dsl::builtin(surface) {
        Some(b) => b.dsl.to_string(),
        None => surface.to_string(),
    };
    let expr = dsl::parse(&text).map_err(|e| e.to_string())?;
    let ls = match GeometryKind::from_key(geometry) {
        Some(GeometryKind::Projective) => projective_lift(&expr, grid, 4),
        Some(GeometryKind::Conformal) => conformal_lift(&expr, grid, 4),
        Some(GeometryKind::LieSphere42) => legendre_lift(&expr, grid, 4),
        Some(GeometryKind::LieSphere33) => {
            projective_lift(&expr, grid, 4).and_then(|p| bridge::contact_lift(&p))
        }
        None => return Err(format!("unknown geometry `{geometry}`")),
    }
    .map_err(|e| e.to_string())?;
    Ok((ls, expr))
}

fn build_form(
    ls: &LiftedSurface,
    surface: &str,
    expr: &dsl::SurfaceExpr,
    form: &str,
    seed: u64,
) -> Result<OneForm, String> {
    match form {
        "zero" => Ok(OneForm::zero(ls.spec.space.clone(), ls.spec.group)),
        "builtin_isothermic" => match ls.spec.kind {
            GeometryKind::Conformal => {
                let b =
                    dsl::builtin(surface).ok_or("builtin_isothermic needs a built-in surface")?;
                isothermic_form(b, ls).map_err(|e| e.to_string())
            }
            GeometryKind::LieSphere42 => {
                let b =
                    dsl::builtin(surface).ok_or("builtin_isothermic needs a built-in surface")?;
                lie_isothermic_form(b, ls).map_err(|e| e.to_string())
            }
            GeometryKind::Projective | GeometryKind::LieSphere33 => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let proj = projective_lift(expr, &ls.grid, ls.degree).map_err(|e| e.to_string())?;
                let eta = deforma::deform::closed_quadric_form(
                    proj.section.clone(),
                    CoeffField::sample_u_only(&mut rng),
                    CoeffField::sample_v_only(&mut rng),
                    CoeffField::sample(&mut rng),
                    "closed family",
                );
                if ls.spec.kind == GeometryKind::LieSphere33 {
                    let ctx = bridge::bridge(&proj).map_err(|e| e.to_string())?;
                    bridge::transfer_form(&eta, &ctx).map_err(|e| e.to_string())
                } else {
                    Ok(eta)
                }
            }
        },
        "theta_sampler" => {
            if ls.spec.kind != GeometryKind::Projective {
                return Err("theta_sampler needs the projective geometry".into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(sample_theta_form(
                ls.section.clone(),
                &mut rng,
                "theta sample",
            ))
        }
        other => Err(format!("unknown form `{other}`")),
    }
}

fn field_out(name: &str, f: &ResidualField) -> FieldOut {
    FieldOut {
        name: name.into(),
        values: f.values.clone(),
        max: f.max(),
        mean: f.mean(),
    }
}

/// Lift a surface and report its pointwise structure: embedded positions,
/// asymptotic or curvature direction fields, flagged points, Dupin
/// detection for Legendre lifts.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn analyze_surface(
    surface: &str,
    geometry: &str,
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
    nu: usize,
    nv: usize,
) -> Result<String, JsValue> {
    let inner = || -> Result<AnalyzeOut, String> {
        let grid = make_grid(u0, u1, v0, v1, nu, nv)?;
        let (ls, expr) = lift(surface, geometry, &grid)?;
        let mut positions = vec![None; grid.len()];
        let mut directions = vec![None; grid.len()];
        let mut complex = vec![false; grid.len()];
        let mut notes = Vec::new();
        for (i, j) in grid.indices() {
            let idx = grid.index(i, j);
            let (u, v) = grid.point(i, j);
            if let Ok(x) = expr.eval_jet(u, v, 0) {
                let x = x.value();
                positions[idx] = match x.len() {
                    // euclidean immersion
                    3 => Some([x[0], x[1], x[2]]),
                    // projective lift drawn in the affine chart x₀ = 1
                    4 if x[0].abs() > 1e-6 => Some([x[1] / x[0], x[2] / x[0], x[3] / x[0]]),
                    _ => None,
                };
            }
            if let Some(data) = ls.point(i, j) {
                if let Some((d1, d2)) = &data.asymptotic {
                    directions[idx] = Some([
                        [d1.direction.0, d1.direction.1],
                        [d2.direction.0, d2.direction.1],
                    ]);
                    complex[idx] = d1.realness == deforma::directions::Realness::ComplexPair;
                }
                if let Some(cur) = &data.curvature {
                    let (a1, b1) = cur.t1.value();
                    let (a2, b2) = cur.t2.value();
                    directions[idx] = Some([[a1, b1], [a2, b2]]);
                }
            }
        }
        let dupin = match ls.spec.kind {
            GeometryKind::LieSphere33 | GeometryKind::LieSphere42 => {
                deforma::geometry::is_dupin(&ls).ok()
            }
            _ => None,
        };
        if let Some(true) = dupin {
            notes.push("Dupin cyclide: the Lie cyclide splitting is constant".into());
        }
        Ok(AnalyzeOut {
            geometry: geometry.into(),
            surface: surface.into(),
            grid: echo(&grid),
            positions,
            directions,
            complex_directions: complex,
            flagged: ls.flagged.iter().map(|f| [f.u, f.v]).collect(),
            dupin,
            notes,
        })
    };
    inner()
        .map(|out| serde_json::to_string(&out).expect("serialise"))
        .map_err(|e| JsValue::from_str(&e))
}

/// Run the deformability check: closure / Maurer–Cartan residual fields,
/// chart and invariant condition fields through the requested order, and
/// the triviality solve.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn run_check(
    surface: &str,
    geometry: &str,
    form: &str,
    order: usize,
    seed: u64,
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
    nu: usize,
    nv: usize,
) -> Result<String, JsValue> {
    let inner = || -> Result<CheckOut, String> {
        if !(1..=3).contains(&order) {
            return Err("order must be 1, 2 or 3".into());
        }
        let grid = make_grid(u0, u1, v0, v1, nu, nv)?;
        let (ls, expr) = lift(surface, geometry, &grid)?;
        let eta = build_form(&ls, surface, &expr, form, seed)?;
        let mut fields = Vec::new();
        let mut verdicts = Vec::new();
        let mut notes = Vec::new();

        let closure = closure_residual(&eta, &grid).map_err(|e| e.to_string())?;
        verdicts.push(("closure".into(), closure.max() < 1e-8));
        fields.push(field_out("closure", &closure));
        let mc = maurer_cartan_residual(&eta, &grid).map_err(|e| e.to_string())?;
        verdicts.push(("maurer_cartan".into(), mc.max() < 1e-6));
        fields.push(field_out("maurer_cartan", &mc));

        let ctx = RepContext::new(&ls).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v0s = covector_set(ctx.rep_space.dimension(), &mut rng);
        let inv =
            invariant_condition_tower(&eta, &ls, &ctx, order - 1).map_err(|e| e.to_string())?;
        let chart =
            chart_condition_tower(&eta, &ls, &ctx, &v0s, order - 1).map_err(|e| e.to_string())?;
        for r in 0..order {
            let pass = inv[r].max() < 1e-7 && chart[r].max() < 1e-7;
            verdicts.push((format!("order_{r}"), pass));
            fields.push(field_out(&format!("invariant_order_{r}"), &inv[r]));
            fields.push(field_out(&format!("chart_order_{r}"), &chart[r]));
            if !pass && r == 2 {
                notes.push("rigidity witnessed at third order".into());
            }
        }

        let (triviality, q_norm) = match triviality_solve(&eta, &ls) {
            Ok(out) => {
                if out.dupin {
                    notes.push("Dupin input: uniqueness has the involution branch".into());
                }
                (
                    Some(
                        if out.trivial {
                            "trivial"
                        } else {
                            "non_trivial"
                        }
                        .to_string(),
                    ),
                    out.q_norm,
                )
            }
            Err(e) => {
                notes.push(format!("triviality solve skipped: {e}"));
                (None, None)
            }
        };
        Ok(CheckOut {
            geometry: geometry.into(),
            eta: eta.label.clone(),
            grid: echo(&grid),
            fields,
            verdicts,
            triviality,
            q_norm,
            notes,
        })
    };
    inner()
        .map(|out| serde_json::to_string(&out).expect("serialise"))
        .map_err(|e| JsValue::from_str(&e))
}

/// Probe the contact order of the deformation generated by the chosen form
/// at a grid point: defect ratio ≈ 2^(k+1) certifies order-k agreement.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn probe_contact(
    surface: &str,
    geometry: &str,
    form: &str,
    k: usize,
    seed: u64,
    i: usize,
    j: usize,
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
    nu: usize,
    nv: usize,
) -> Result<String, JsValue> {
    let inner = || -> Result<ProbeOut, String> {
        let grid = make_grid(u0, u1, v0, v1, nu, nv)?;
        let (ls, expr) = lift(surface, geometry, &grid)?;
        let eta = build_form(&ls, surface, &expr, form, seed)?;
        let probe = contact_order_probe(&ls, &eta, (i, j), k).map_err(|e| e.to_string())?;
        Ok(ProbeOut {
            point: [probe.point.0, probe.point.1],
            ratio: probe.ratio,
            estimated_order: probe.estimated_order,
            target: probe.target,
            within_band: probe.within_band,
            negligible: probe.negligible,
            defect_coarse: probe.defect_coarse,
            defect_fine: probe.defect_fine,
        })
    };
    inner()
        .map(|out| serde_json::to_string(&out).expect("serialise"))
        .map_err(|e| JsValue::from_str(&e))
}

/// Names the page can use to prefill the surface box.
#[wasm_bindgen]
pub fn builtin_surfaces() -> String {
    serde_json::to_string(&dsl::builtin_names()).expect("serialise")
}
