use std::rc::Rc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use deforma::bridge;
use deforma::deform::{
    chart_condition_residual_at, closure_residual, contact_order_probe, covector_set,
    integrate_gauge, invariant_condition_residual_at, isothermic_form, lie_isothermic_form,
    maurer_cartan_residual, sample_theta_form, triviality_solve, CoeffField, OneForm, RepContext,
};
use deforma::dsl;
use deforma::geometry::{
    conformal_lift, legendre_lift, projective_lift, quadratic_differential, GeometryKind,
    LiftedSurface,
};
use deforma::grid::ParamGrid;
use deforma::multilinear::AlgebraKind;
use deforma::report::{DeformationReport, ResidualField};

use crate::config::RunConfig;

/// Failure modes with their process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// exit 2: configuration or input schema problems
    Config(String),
    /// exit 3: geometry assumption violations
    Geometry(String),
    /// exit 4: numerical certification failures
    Certification(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Geometry(_) => 3,
            RunError::Certification(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Geometry(m) | RunError::Certification(m) => m,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CliReport {
    pub report_version: u32,
    pub config_echo: RunConfig,
    #[serde(flatten)]
    pub report: DeformationReport,
    pub timing_ms: u64,
}

/// Execute a run. Returns the report plus the process exit code demanded
/// by the verdicts.
pub fn run(config: &RunConfig) -> Result<(CliReport, i32), RunError> {
    let start = std::time::Instant::now();
    let grid = ParamGrid::new(
        (config.grid.u0, config.grid.u1),
        (config.grid.v0, config.grid.v1),
        config.grid.nu,
        config.grid.nv,
        config.grid.periodic_u,
        config.grid.periodic_v,
    )
    .map_err(|e| RunError::Config(e.to_string()))?;

    let surface_text = match dsl::builtin(&config.surface) {
        Some(b) => b.dsl.to_string(),
        None => config.surface.clone(),
    };
    let expr = dsl::parse(&surface_text).map_err(|e| RunError::Config(e.to_string()))?;

    // degree 4 keeps order-3 condition derivatives exact
    let degree = 4;
    let ls = match GeometryKind::from_key(&config.geometry) {
        Some(GeometryKind::Projective) => projective_lift(&expr, &grid, degree),
        Some(GeometryKind::Conformal) => conformal_lift(&expr, &grid, degree),
        Some(GeometryKind::LieSphere42) => legendre_lift(&expr, &grid, degree),
        Some(GeometryKind::LieSphere33) => {
            projective_lift(&expr, &grid, degree).and_then(|pls| bridge::contact_lift(&pls))
        }
        None => {
            return Err(RunError::Config(format!(
                "unknown geometry {}",
                config.geometry
            )))
        }
    }
    .map_err(|e| RunError::Geometry(e.to_string()))?;

    let eta = build_form(config, &ls, &expr).map_err(map_form_err)?;

    let mut report = DeformationReport::new(&config.geometry, &eta.label);
    for f in &ls.flagged {
        report.flagged_points.push((f.u, f.v));
    }

    let tol_closure = config.tolerance("closure", 1e-8);
    let tol_mc = config.tolerance("maurer_cartan", 1e-6);
    let tol_inv = config.tolerance("invariant", 1e-7);
    let tol_chart = config.tolerance("chart", 1e-7);

    let mut combined = deforma::report::ResidualField::new(&grid);
    let closure =
        closure_residual(&eta, &grid).map_err(|e| RunError::Certification(e.to_string()))?;
    combined.merge_max(&closure);
    report.record("closure", &closure, tol_closure);
    let mc =
        maurer_cartan_residual(&eta, &grid).map_err(|e| RunError::Certification(e.to_string()))?;
    report.record("maurer_cartan", &mc, tol_mc);

    let ctx = RepContext::new(&ls).map_err(|e| RunError::Certification(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let v0s = covector_set(ctx.rep_space.dimension(), &mut rng);

    let zero_form = eta
        .max_norm(&grid)
        .map_err(|e| RunError::Certification(e.to_string()))?
        < 1e-14;

    let mut order_fail = None;
    for r in 0..config.order {
        let inv = invariant_condition_residual_at(&eta, &ls, &ctx, r)
            .map_err(|e| RunError::Certification(e.to_string()))?;
        let mut chart = ResidualField::new(&grid);
        for v0 in &v0s {
            let f = chart_condition_residual_at(&eta, &ls, &ctx, v0, r)
                .map_err(|e| RunError::Certification(e.to_string()))?;
            chart.merge_max(&f);
        }
        combined.merge_max(&inv);
        combined.merge_max(&chart);
        report.record(&format!("invariant_order_{r}"), &inv, tol_inv);
        report.record(&format!("chart_order_{r}"), &chart, tol_chart);
        let pass = inv.max() < tol_inv && chart.max() < tol_chart;
        report.verdicts.insert(format!("order_{r}"), pass);
        if !pass && order_fail.is_none() {
            order_fail = Some(r);
        }
    }

    // triviality
    match triviality_solve(&eta, &ls) {
        Ok(out) => {
            report.triviality = Some(if out.trivial {
                "trivial".into()
            } else {
                "non_trivial".into()
            });
            report.record_info("triviality_solve", out.solve_residual);
            if let Some(q) = out.q_norm {
                report.record_info("q_norm", q);
            }
            if out.dupin {
                report
                    .notes
                    .push("dupin cyclide input: uniqueness has the extra involution branch".into());
            }
        }
        Err(e) => report.notes.push(format!("triviality solve skipped: {e}")),
    }

    // Lie sphere containment + quadratic differential
    if matches!(
        ls.spec.kind,
        GeometryKind::LieSphere33 | GeometryKind::LieSphere42
    ) && !zero_form
    {
        match quadratic_differential(&eta, &ls) {
            Ok(q) => {
                report.record_scalar(
                    "wedge_containment",
                    q.containment_residual,
                    config.tolerance("containment", 1e-7),
                    q.containment_residual < config.tolerance("containment", 1e-7),
                );
            }
            Err(e) => {
                return Err(RunError::Certification(format!(
                    "quadratic differential rejected the form: {e}"
                )))
            }
        }
    }

    // gauge integration and contact probes
    if config.gauge || config.probe_points > 0 {
        if mc.max() < tol_mc {
            let n = eta.space.dimension();
            let base = (grid.nu / 2, grid.nv / 2);
            match integrate_gauge(&eta, &grid, &DMatrix::identity(n, n), base) {
                Ok(g) => {
                    report.record_scalar(
                        "gauge_path_defect",
                        g.path_defect,
                        1e-6,
                        g.path_defect < 1e-6,
                    );
                    report.record_info("gauge_reprojections", g.corrections as f64);
                    for (name, m) in [
                        ("monodromy_u", g.monodromy_u),
                        ("monodromy_v", g.monodromy_v),
                    ] {
                        if let Some(m) = m {
                            report.record_info(name, m);
                            if m > 1e-6 {
                                report.notes.push(format!(
                                    "non-trivial {name}: the deformation does not close up around the period"
                                ));
                            }
                        }
                    }
                    let probes = probe_points(&ls, config.probe_points);
                    let mut worst_ratio_defect: f64 = 0.0;
                    let mut all_in_band = true;
                    for p in probes {
                        let probe = contact_order_probe(&ls, &eta, p, config.order)
                            .map_err(|e| RunError::Certification(e.to_string()))?;
                        if !probe.negligible {
                            let target = 2f64.powi(config.order as i32 + 1);
                            worst_ratio_defect =
                                worst_ratio_defect.max((probe.ratio - target).abs() / target);
                        }
                        all_in_band &= probe.within_band;
                    }
                    if config.probe_points > 0 {
                        report.record_scalar(
                            "contact_probe_ratio_defect",
                            worst_ratio_defect,
                            0.15,
                            all_in_band,
                        );
                    }
                }
                Err(e) => report.notes.push(format!("gauge integration skipped: {e}")),
            }
        } else {
            report
                .notes
                .push("gauge integration skipped: Maurer-Cartan residual too large".into());
        }
    }

    if let Some(path) = &config.mesh_dump {
        // worst condition residual per point, for external plotting
        dump_mesh(path, &combined).map_err(|e| RunError::Config(e.to_string()))?;
    }

    let all_pass = report.all_pass();
    if let Some(r) = order_fail {
        if !zero_form && r == 2 {
            report.notes.push("rigidity witnessed".into());
        }
    }

    let timing_ms = if config.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let exit = if all_pass { 0 } else { 4 };
    Ok((
        CliReport {
            report_version: 1,
            config_echo: config.clone(),
            report,
            timing_ms,
        },
        exit,
    ))
}

fn map_form_err(e: FormBuildError) -> RunError {
    match e {
        FormBuildError::Config(m) => RunError::Config(m),
        FormBuildError::Certification(m) => RunError::Certification(m),
    }
}

enum FormBuildError {
    Config(String),
    Certification(String),
}

fn build_form(
    config: &RunConfig,
    ls: &LiftedSurface,
    expr: &dsl::SurfaceExpr,
) -> Result<OneForm, FormBuildError> {
    let kind = ls.spec.kind;
    match config.form.as_str() {
        "zero" => Ok(OneForm::zero(ls.spec.space.clone(), ls.spec.group)),
        "builtin_isothermic" => match kind {
            GeometryKind::Conformal => {
                let b = dsl::builtin(&config.surface).ok_or_else(|| {
                    FormBuildError::Config(format!(
                        "builtin_isothermic needs a built-in surface, got `{}`",
                        config.surface
                    ))
                })?;
                isothermic_form(b, ls).map_err(|e| FormBuildError::Certification(e.to_string()))
            }
            GeometryKind::LieSphere42 => {
                let b = dsl::builtin(&config.surface).ok_or_else(|| {
                    FormBuildError::Config(format!(
                        "builtin_isothermic needs a built-in surface, got `{}`",
                        config.surface
                    ))
                })?;
                lie_isothermic_form(b, ls).map_err(|e| FormBuildError::Certification(e.to_string()))
            }
            GeometryKind::Projective | GeometryKind::LieSphere33 => {
                // the closed family of the graph quadric
                if config.surface != "quadric" {
                    return Err(FormBuildError::Config(
                        "builtin_isothermic in the projective picture needs surface = quadric"
                            .into(),
                    ));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                let proj = projective_lift(expr, &ls.grid, ls.degree)
                    .map_err(|e| FormBuildError::Certification(e.to_string()))?;
                let eta = deforma::deform::closed_quadric_form(
                    proj.section.clone(),
                    CoeffField::sample_u_only(&mut rng),
                    CoeffField::sample_v_only(&mut rng),
                    CoeffField::sample(&mut rng),
                    "closed_quadric(builtin)",
                );
                if kind == GeometryKind::LieSphere33 {
                    let ctx = bridge::bridge(&proj)
                        .map_err(|e| FormBuildError::Certification(e.to_string()))?;
                    bridge::transfer_form(&eta, &ctx)
                        .map_err(|e| FormBuildError::Certification(e.to_string()))
                } else {
                    Ok(eta)
                }
            }
        },
        "theta_sampler" => match kind {
            GeometryKind::Projective => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                Ok(sample_theta_form(
                    ls.section.clone(),
                    &mut rng,
                    format!("theta_sample(seed={})", config.seed),
                ))
            }
            GeometryKind::LieSphere33 => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                let proj = projective_lift(expr, &ls.grid, ls.degree)
                    .map_err(|e| FormBuildError::Certification(e.to_string()))?;
                let eta = sample_theta_form(
                    proj.section.clone(),
                    &mut rng,
                    format!("theta_sample(seed={})", config.seed),
                );
                let ctx = bridge::bridge(&proj)
                    .map_err(|e| FormBuildError::Certification(e.to_string()))?;
                bridge::transfer_form(&eta, &ctx)
                    .map_err(|e| FormBuildError::Certification(e.to_string()))
            }
            _ => Err(FormBuildError::Config(
                "theta_sampler needs a projective picture (projective or lie_sphere_33)".into(),
            )),
        },
        table if table.starts_with("table:") => {
            let path = &table["table:".len()..];
            load_table(path, ls).map_err(FormBuildError::Config)
        }
        other => Err(FormBuildError::Config(format!(
            "unknown form source `{other}`"
        ))),
    }
}

#[derive(serde::Deserialize)]
struct TableFile {
    nu: usize,
    nv: usize,
    /// row-major per point: two n×n matrices as nested arrays
    eta_u: Vec<Vec<Vec<f64>>>,
    eta_v: Vec<Vec<Vec<f64>>>,
}

fn load_table(path: &str, ls: &LiftedSurface) -> Result<OneForm, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("table `{path}`: {e}"))?;
    let table: TableFile =
        serde_json::from_str(&text).map_err(|e| format!("table `{path}`: {e}"))?;
    if table.nu != ls.grid.nu || table.nv != ls.grid.nv {
        return Err(format!(
            "table dims {}×{} do not match grid {}×{}",
            table.nu, table.nv, ls.grid.nu, ls.grid.nv
        ));
    }
    let n = ls.spec.space.dimension();
    let expected = ls.grid.len();
    if table.eta_u.len() != expected || table.eta_v.len() != expected {
        return Err("table point count does not match the grid".into());
    }
    let to_matrix = |rows: &Vec<Vec<f64>>| -> Result<DMatrix<f64>, String> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(format!("table matrices must be {n}×{n}"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    };
    let mut entries = Vec::with_capacity(expected);
    for (mu, mv) in table.eta_u.iter().zip(&table.eta_v) {
        entries.push((to_matrix(mu)?, to_matrix(mv)?));
    }
    Ok(OneForm::from_table(
        ls.spec.space.clone(),
        match ls.spec.group {
            AlgebraKind::SpecialLinear => AlgebraKind::SpecialLinear,
            AlgebraKind::Orthogonal => AlgebraKind::Orthogonal,
        },
        format!("table({path})"),
        ls.grid.clone(),
        Rc::new(entries),
    ))
}

fn probe_points(ls: &LiftedSurface, count: usize) -> Vec<(usize, usize)> {
    let interior: Vec<(usize, usize)> = ls.interior_ok().map(|(p, _)| p).collect();
    if interior.is_empty() || count == 0 {
        return Vec::new();
    }
    let step = (interior.len() / count.max(1)).max(1);
    interior.into_iter().step_by(step).take(count).collect()
}

fn dump_mesh(path: &str, field: &ResidualField) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "u,v,value")?;
    for (i, j) in field.grid.indices() {
        if let Some(v) = field.get(i, j) {
            let (u, vv) = field.grid.point(i, j);
            writeln!(out, "{u},{vv},{v:e}")?;
        }
    }
    Ok(())
}
