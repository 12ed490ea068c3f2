//! Acceptance suite: every criterion's pinned tolerance is asserted here and
//! one summary line per criterion is printed (visible with
//! `cargo test --test acceptance -- --nocapture`).

use deforma::bridge::{bridge, derived_bundle_identity, subspace_audit, transfer_form};
use deforma::deform::*;
use deforma::dsl::{builtin, parse};
use deforma::geometry::*;
use deforma::grid::ParamGrid;
use deforma::multilinear::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn trace_free_sample(rng: &mut impl Rng) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
    let tr = m.trace() / 4.0;
    for i in 0..4 {
        m[(i, i)] -= tr;
    }
    m
}

#[test]
fn a1_isomorphism_suite() {
    let ws = WedgeSpace::volume_pairing_r4().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = trace_free_sample(&mut rng);
        let b = trace_free_sample(&mut rng);
        let comm = &a * &b - &b * &a;
        let lhs = induced_action(&comm, &ws).unwrap();
        let pa = induced_action(&a, &ws).unwrap();
        let pb = induced_action(&b, &ws).unwrap();
        let rhs = &pa * &pb - &pb * &pa;
        worst = worst.max((lhs - rhs).norm());
        // φ lands in o(3,3)
        AlgebraElement::new(ws.space().clone(), pa, AlgebraKind::Orthogonal).unwrap();
    }
    assert!(worst < 1e-11, "homomorphism residual {worst}");
    assert_eq!(ws.space().signature(), Some((3, 3)));
    println!("A1 isomorphism suite: PASS (max homomorphism residual {worst:.3e}, signature (3,3))");
}

fn cylinder_grid() -> ParamGrid {
    ParamGrid::new((0.2, 5.8), (-1.0, 1.0), 16, 12, false, false).unwrap()
}

#[test]
fn a2_isothermic_witness() {
    let b = builtin("cylinder").unwrap();
    let grid = cylinder_grid();
    let ls = conformal_lift(&b.expr(), &grid, 3).unwrap();
    // the builder itself certifies closure (1e-8) and F∧F^⊥ containment (1e-10)
    let eta = isothermic_form(b, &ls).unwrap();
    let closure = closure_residual(&eta, &grid).unwrap();
    assert!(closure.max() < 1e-8, "closure {}", closure.max());

    // F∧F^⊥ and the F∧F^(1) refinement, via wedge-basis decomposition
    let space = &ls.spec.space;
    let n = space.dimension();
    let mut perp_res: f64 = 0.0;
    let mut refined_res: f64 = 0.0;
    for ((i, j), data) in ls.interior_ok() {
        let p = ls.grid.point(i, j);
        let (mu, mv) = eta.values(p.0, p.1).unwrap();
        let sigma = data.sigma.value();
        let wedge_flat = |a: &DVector<f64>, bb: &DVector<f64>| {
            let ga = space.gram() * a;
            let gb = space.gram() * bb;
            let m = bb * ga.transpose() - a * gb.transpose();
            DVector::from_iterator(n * n, m.iter().copied())
        };
        let fperp = deforma::subbundle::metric_orthogonal_complement(
            &DMatrix::from_columns(&[sigma.clone()]),
            space,
        );
        let full: Vec<DVector<f64>> = fperp
            .column_iter()
            .map(|z| wedge_flat(&sigma, &z.into_owned()))
            .collect();
        let refined: Vec<DVector<f64>> = data
            .f1
            .basis
            .iter()
            .map(|z| wedge_flat(&sigma, z))
            .collect();
        for m in [&mu, &mv] {
            let flat = DVector::from_iterator(n * n, m.iter().copied());
            let (_, r1) = deforma::linalg::lstsq(&DMatrix::from_columns(&full), &flat, 1e-12);
            perp_res = perp_res.max(r1 / (1.0 + flat.norm()));
            let (_, r2) = deforma::linalg::lstsq(&DMatrix::from_columns(&refined), &flat, 1e-12);
            refined_res = refined_res.max(r2 / (1.0 + flat.norm()));
        }
    }
    assert!(perp_res < 1e-10, "F∧F^⊥ containment {perp_res}");
    assert!(refined_res < 1e-8, "F∧F^(1) refinement {refined_res}");

    // order-2 invariant and chart conditions at ≥ 95% of interior points
    let ctx = RepContext::new(&ls).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let v0s = covector_set(5, &mut rng);
    let inv = invariant_condition_residual(&eta, &ls, &ctx, 2).unwrap();
    let chart = chart_condition_residual(&eta, &ls, &ctx, &v0s, 1).unwrap();
    assert!(
        inv.pass_fraction(1e-8) >= 0.95,
        "invariant pass fraction {}",
        inv.pass_fraction(1e-8)
    );
    assert!(
        chart.pass_fraction(1e-8) >= 0.95,
        "chart pass fraction {}",
        chart.pass_fraction(1e-8)
    );

    // a non-zero closed conformal form is never trivial
    let solve = triviality_solve(&eta, &ls).unwrap();
    assert!(!solve.trivial, "conformal witness must be non-trivial");

    // gauge + defect-ratio certification at 5 probe points
    let gauge = integrate_gauge(&eta, &grid, &DMatrix::identity(5, 5), (8, 6)).unwrap();
    assert!(
        gauge.path_defect < 1e-6,
        "path defect {}",
        gauge.path_defect
    );
    let mut ratios = Vec::new();
    for p in [(3, 3), (8, 6), (12, 4), (5, 8), (10, 9)] {
        let probe = contact_order_probe(&ls, &eta, p, 2).unwrap();
        assert!(
            probe.ratio >= 6.8 && probe.ratio <= 9.2,
            "probe ratio {} at {:?}",
            probe.ratio,
            p
        );
        ratios.push(probe.ratio);
    }
    println!(
        "A2 isothermic witness: PASS (closure {:.1e}, containment {:.1e}, refinement {:.1e}, ratios {:?})",
        closure.max(),
        perp_res,
        refined_res,
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
}

struct GeometryForms {
    name: &'static str,
    /// admissible pairs carry the lift the form lives on
    admissible: Vec<(LiftedSurface, OneForm)>,
    inadmissible: Vec<(LiftedSurface, OneForm)>,
}

fn conformal_grid(name: &str) -> ParamGrid {
    match name {
        // keep the sphere's stereographic chart away from its periphery
        "sphere" => ParamGrid::new((-0.8, 0.8), (-0.8, 0.8), 10, 10, false, false).unwrap(),
        _ => ParamGrid::new((0.2, 5.8), (-1.0, 1.0), 10, 10, false, false).unwrap(),
    }
}

fn forms_for_three_geometries(count: usize, seed: u64) -> Vec<GeometryForms> {
    let mut out = Vec::new();

    // projective: the graph quadric with its closed Θ-valued family
    let quadric = parse("(1, u, v, u*v)").unwrap();
    let pg = ParamGrid::new((-1.0, 1.0), (-1.0, 1.0), 10, 10, false, false).unwrap();
    let pls = projective_lift(&quadric, &pg, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut admissible = Vec::new();
    let mut inadmissible = Vec::new();
    for k in 0..count {
        admissible.push((
            pls.clone(),
            closed_quadric_form(
                pls.section.clone(),
                CoeffField::sample_u_only(&mut rng),
                CoeffField::sample_v_only(&mut rng),
                CoeffField::sample(&mut rng),
                format!("closed_quadric#{k}"),
            ),
        ));
        inadmissible.push((
            pls.clone(),
            random_algebra_form(
                MetricSpace::plain(4),
                AlgebraKind::SpecialLinear,
                &mut rng,
                format!("random_sl4#{k}"),
            ),
        ));
    }
    out.push(GeometryForms {
        name: "projective",
        admissible,
        inadmissible,
    });

    // conformal: all three isothermic built-ins with scaled witness forms
    let surfaces: Vec<(&str, LiftedSurface, OneForm)> = ["cylinder", "cone", "sphere"]
        .iter()
        .map(|name| {
            let b = builtin(name).unwrap();
            let ls = conformal_lift(&b.expr(), &conformal_grid(name), 3).unwrap();
            let iso = isothermic_form(b, &ls).unwrap();
            (*name, ls, iso)
        })
        .collect();
    let mut admissible = Vec::new();
    let mut inadmissible = Vec::new();
    for k in 0..count {
        let (_, ls, iso) = &surfaces[k % surfaces.len()];
        let t: f64 = rng.gen_range(0.25..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        admissible.push((ls.clone(), iso.scale(t)));
        inadmissible.push((
            ls.clone(),
            random_algebra_form(
                MetricSpace::indefinite(4, 1),
                AlgebraKind::Orthogonal,
                &mut rng,
                format!("random_o41#{k}"),
            ),
        ));
    }
    out.push(GeometryForms {
        name: "conformal",
        admissible,
        inadmissible,
    });

    // Lie sphere (4,2): cylinder and cone Legendre lifts; conformal-induced
    // forms plus exact ∧²f potentials (the sphere is umbilic, no lift)
    let lie_surfaces: Vec<(&str, LiftedSurface, OneForm)> = ["cylinder", "cone"]
        .iter()
        .map(|name| {
            let b = builtin(name).unwrap();
            let ls = legendre_lift(&b.expr(), &conformal_grid(name), 3).unwrap();
            let liso = lie_isothermic_form(b, &ls).unwrap();
            (*name, ls, liso)
        })
        .collect();
    let mut admissible = Vec::new();
    let mut inadmissible = Vec::new();
    for k in 0..count {
        let (_, ls, liso) = &lie_surfaces[k % lie_surfaces.len()];
        let t: f64 = rng.gen_range(0.25..2.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let dxi = lie_wedge_exact_form(ls, CoeffField::sample(&mut rng)).unwrap();
        admissible.push((ls.clone(), liso.scale(t).add(&dxi)));
        inadmissible.push((
            ls.clone(),
            random_algebra_form(
                MetricSpace::indefinite(4, 2),
                AlgebraKind::Orthogonal,
                &mut rng,
                format!("random_o42#{k}"),
            ),
        ));
    }
    out.push(GeometryForms {
        name: "lie_sphere_42",
        admissible,
        inadmissible,
    });

    out
}

#[test]
fn a3_chart_invariant_equivalence() {
    let tol = 1e-7;
    let geoms = forms_for_three_geometries(20, 42);
    for g in &geoms {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let dim = RepContext::new(&g.admissible[0].0)
            .unwrap()
            .rep_space
            .dimension();
        let v0s = covector_set(dim, &mut rng);
        for (idx, (ls, eta)) in g.admissible.iter().enumerate() {
            let rep = equivalence_audit(eta, ls, 2, &v0s, tol).unwrap();
            assert!(
                rep.verdicts_agree(),
                "{} admissible #{idx}: verdicts disagree {:?}",
                g.name,
                rep.per_order
            );
            // admissible forms pass both formulations through order 1
            assert!(rep.per_order[1].chart_pass && rep.per_order[1].invariant_pass);
        }
        for (idx, (ls, eta)) in g.inadmissible.iter().enumerate() {
            let rep = equivalence_audit(eta, ls, 2, &v0s, tol).unwrap();
            assert!(
                rep.verdicts_agree(),
                "{} inadmissible #{idx}: verdicts disagree",
                g.name
            );
            assert!(
                !rep.per_order[2].chart_pass && !rep.per_order[2].invariant_pass,
                "{} inadmissible #{idx} unexpectedly passed",
                g.name
            );
            // generic violations are loud, not borderline
            assert!(
                rep.per_order[2].chart_max > 1e-3,
                "{} inadmissible #{idx} suspiciously quiet: {}",
                g.name,
                rep.per_order[2].chart_max
            );
        }
        // the zero form passes both formulations at every order
        let ls0 = &g.admissible[0].0;
        let zero = OneForm::zero(ls0.spec.space.clone(), ls0.spec.group);
        let rep = equivalence_audit(&zero, ls0, 2, &v0s, tol).unwrap();
        assert!(rep.verdicts_agree());
        assert!(rep.per_order[2].chart_pass && rep.per_order[2].invariant_pass);
    }
    println!(
        "A3 chart⇔invariant equivalence: PASS (20 admissible + 20 inadmissible × {} geometries, pointwise agreement at 1e-7)",
        geoms.len()
    );
}

#[test]
fn a4_third_order_rigidity() {
    let tol = 1e-6;
    let geoms = forms_for_three_geometries(20, 4242);
    let mut min_ratio = f64::INFINITY;
    for g in &geoms {
        for (idx, (ls, eta)) in g.admissible.iter().enumerate() {
            let audit = third_order_audit(eta, ls, tol).unwrap();
            assert!(
                audit.ratio > 0.1,
                "{} admissible #{idx}: rigidity ratio {} ≤ 0.1",
                g.name,
                audit.ratio
            );
            min_ratio = min_ratio.min(audit.ratio);
        }
        // η = 0 passes all third-order conditions
        let ls0 = &g.admissible[0].0;
        let zero = OneForm::zero(ls0.spec.space.clone(), ls0.spec.group);
        let audit = third_order_audit(&zero, ls0, tol).unwrap();
        assert!(audit.passes, "{}: zero form failed the audit", g.name);
    }
    println!(
        "A4 third-order rigidity: PASS (min residual ratio {min_ratio:.3} > 0.1; zero form passes)"
    );
}

#[test]
fn a5_triviality_q_coherence() {
    let b = builtin("cylinder").unwrap();
    let grid = ParamGrid::new((0.2, 5.8), (-1.0, 1.0), 12, 10, false, false).unwrap();
    let ls = legendre_lift(&b.expr(), &grid, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_q_trivial: f64 = 0.0;
    let mut least_q_injected = f64::INFINITY;
    for k in 0..20 {
        let dxi = lie_wedge_exact_form(&ls, CoeffField::sample(&mut rng)).unwrap();
        let q = quadratic_differential(&dxi, &ls).unwrap();
        assert!(q.max_abs < 1e-10, "dξ #{k}: |q| = {}", q.max_abs);
        worst_q_trivial = worst_q_trivial.max(q.max_abs);
        let sol = triviality_solve(&dxi, &ls).unwrap();
        assert!(
            sol.trivial,
            "dξ #{k}: solve failed ({})",
            sol.solve_residual
        );

        let t: f64 = rng.gen_range(0.1..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let injected = dxi.add(&sphere_injected_form(&ls, t).unwrap());
        let qi = quadratic_differential(&injected, &ls).unwrap();
        assert!(qi.max_abs > 1e-4, "injected #{k}: |q| = {}", qi.max_abs);
        least_q_injected = least_q_injected.min(qi.max_abs);
        let soli = triviality_solve(&injected, &ls).unwrap();
        assert!(!soli.trivial, "injected #{k}: solve unexpectedly succeeded");
    }
    println!(
        "A5 triviality/q coherence: PASS (trivial max|q| {worst_q_trivial:.2e} < 1e-10, injected min|q| {least_q_injected:.2e} > 1e-4)"
    );
}

#[test]
fn a6_bridge_coherence() {
    let quadric = parse("(1, u, v, u*v)").unwrap();
    let pg = ParamGrid::new((-1.0, 1.0), (-1.0, 1.0), 10, 10, false, false).unwrap();
    let pls = projective_lift(&quadric, &pg, 4).unwrap();
    let ctx = bridge(&pls).unwrap();

    // the contact lift is a valid Legendre map into (3,3): rank-2, null,
    // signature (1,1) structure — validated by the lift itself
    assert!(ctx.lie.flagged.is_empty());

    let mut worst_f1: f64 = 0.0;
    let mut worst_theta: f64 = 0.0;
    let mut worst_psi: f64 = 0.0;
    for (i, j) in pg.interior_indices() {
        worst_f1 = worst_f1.max(derived_bundle_identity(&ctx, i, j).unwrap());
        let (td, pd) = subspace_audit(&ctx, i, j).unwrap();
        worst_theta = worst_theta.max(td);
        worst_psi = worst_psi.max(pd);
    }
    assert!(worst_f1 < 1e-9, "derived bundle identity {worst_f1}");
    assert!(worst_theta < 1e-9, "φ(Θ) ↔ f∧f^⊥ distance {worst_theta}");
    assert!(worst_psi < 1e-9, "φ(Ψ) ↔ ∧²f distance {worst_psi}");

    // transfer preserves closedness and the triviality verdict
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    for k in 0..10 {
        let trivial_draw = k % 2 == 0;
        let eta = if trivial_draw {
            closed_quadric_form(
                pls.section.clone(),
                CoeffField::constant(0.0),
                CoeffField::constant(0.0),
                CoeffField::sample(&mut rng),
                format!("trivial#{k}"),
            )
        } else {
            closed_quadric_form(
                pls.section.clone(),
                CoeffField::sample_u_only(&mut rng),
                CoeffField::sample_v_only(&mut rng),
                CoeffField::sample(&mut rng),
                format!("nontrivial#{k}"),
            )
        };
        let closure_before = closure_residual(&eta, &pg).unwrap().max();
        let transferred = transfer_form(&eta, &ctx).unwrap();
        let closure_after = closure_residual(&transferred, &pg).unwrap().max();
        assert!(closure_before < 1e-10 && closure_after < 1e-10);

        if k < 2 {
            // the chart⇔invariant equivalence also holds in the 15-dim
            // wedge representation of the (3,3) side
            let rep = RepContext::new(&ctx.lie).unwrap();
            let mut rng_v = ChaCha8Rng::seed_from_u64(42);
            let v0s = covector_set(rep.rep_space.dimension(), &mut rng_v);
            let audit = equivalence_audit(&transferred, &ctx.lie, 1, &v0s, 1e-7).unwrap();
            assert!(audit.verdicts_agree());
            assert!(audit.per_order[1].chart_pass && audit.per_order[1].invariant_pass);
        }

        let proj_verdict = triviality_solve(&eta, &pls).unwrap().trivial;
        let lie_solution = triviality_solve(&transferred, &ctx.lie).unwrap();
        assert_eq!(
            proj_verdict, lie_solution.trivial,
            "triviality disagreement on form #{k}"
        );
        assert_eq!(
            proj_verdict, trivial_draw,
            "unexpected verdict on form #{k}"
        );
        // the q route agrees as well
        let q = lie_solution.q_norm.unwrap();
        if trivial_draw {
            assert!(q < 1e-8, "trivial transfer has q = {q}");
        } else {
            assert!(q > 1e-4, "nontrivial transfer has q = {q}");
        }
        checked += 1;
    }
    println!(
        "A6 bridge coherence: PASS (f1 identity {worst_f1:.2e}, φ(Θ) {worst_theta:.2e}, φ(Ψ) {worst_psi:.2e}, {checked} transfers verdict-exact)"
    );
}

#[test]
fn a7_numerics_substrate() {
    // jets vs central finite differences at h = 1e-4 on all built-ins
    let h = 1e-4;
    let mut worst_fd: f64 = 0.0;
    for name in [
        "cylinder",
        "cone",
        "sphere",
        "quadric",
        "elliptic_paraboloid",
        "torus",
    ] {
        let b = builtin(name).unwrap();
        let e = b.expr();
        for &(u, v) in &[(0.4, 0.3), (1.1, -0.35), (0.8, 0.55)] {
            let jets = e.eval_jet(u, v, 2).unwrap();
            let val = |du: f64, dv: f64| e.eval_jet(u + du, v + dv, 0).unwrap().value();
            let f00 = val(0.0, 0.0);
            for comp in 0..jets.dim() {
                let pick = |m: &DVector<f64>| m[comp];
                // first derivatives
                let du_fd = (pick(&val(h, 0.0)) - pick(&val(-h, 0.0))) / (2.0 * h);
                let dv_fd = (pick(&val(0.0, h)) - pick(&val(0.0, -h))) / (2.0 * h);
                worst_fd = worst_fd.max((jets.comp(comp).coeff(1, 0) - du_fd).abs());
                worst_fd = worst_fd.max((jets.comp(comp).coeff(0, 1) - dv_fd).abs());
                // second derivatives (coefficients are ∂²/2 and ∂∂)
                let duu = (pick(&val(h, 0.0)) - 2.0 * pick(&f00) + pick(&val(-h, 0.0))) / (h * h);
                let dvv = (pick(&val(0.0, h)) - 2.0 * pick(&f00) + pick(&val(0.0, -h))) / (h * h);
                let duv = (pick(&val(h, h)) - pick(&val(h, -h)) - pick(&val(-h, h))
                    + pick(&val(-h, -h)))
                    / (4.0 * h * h);
                worst_fd = worst_fd.max((jets.comp(comp).coeff(2, 0) - duu / 2.0).abs());
                worst_fd = worst_fd.max((jets.comp(comp).coeff(0, 2) - dvv / 2.0).abs());
                worst_fd = worst_fd.max((jets.comp(comp).coeff(1, 1) - duv).abs());
            }
        }
    }
    assert!(worst_fd < 1e-6, "jet vs FD coefficient error {worst_fd}");

    // constant forms integrate to g₀·exp(uA)
    let mut a = DMatrix::zeros(4, 4);
    a[(0, 1)] = 0.8;
    a[(1, 0)] = -0.3;
    a[(2, 3)] = 0.5;
    a[(0, 0)] = 0.1;
    a[(1, 1)] = -0.1;
    let am = a.clone();
    let eta = OneForm::from_fn(
        MetricSpace::plain(4),
        AlgebraKind::SpecialLinear,
        "const",
        move |_, _, d| {
            let m = deforma::jet::JetMat::from_fn(4, 4, |i, j| {
                deforma::jet::Jet2::constant(am[(i, j)], d)
            });
            Ok((m, deforma::jet::JetMat::zero(4, 4, d)))
        },
    );
    let grid = ParamGrid::new((0.0, 1.0), (0.0, 1.0), 9, 8, false, false).unwrap();
    let gauge = integrate_gauge(&eta, &grid, &DMatrix::identity(4, 4), (0, 0)).unwrap();
    let expm = |m: &DMatrix<f64>| {
        let mut s = DMatrix::identity(4, 4);
        let mut term = DMatrix::identity(4, 4);
        for k in 1..25 {
            term = &term * m / (k as f64);
            s += &term;
        }
        s
    };
    let mut worst_gauge: f64 = 0.0;
    for i in 0..grid.nu {
        let expected = expm(&(&a * grid.u(i)));
        worst_gauge = worst_gauge.max((gauge.at(i, 3) - expected).norm());
    }
    assert!(worst_gauge < 1e-9, "gauge vs exponential {worst_gauge}");

    // abelian Maurer-Cartan = closure on F∧F^⊥-valued forms
    let b = builtin("cylinder").unwrap();
    let cg = cylinder_grid();
    let cls = conformal_lift(&b.expr(), &cg, 3).unwrap();
    let iso = isothermic_form(b, &cls).unwrap();
    let mut worst_abelian: f64 = 0.0;
    for (i, j) in cg.indices() {
        let (u, v) = cg.point(i, j);
        let (mu, mv) = iso.values(u, v).unwrap();
        worst_abelian = worst_abelian.max((&mu * &mv - &mv * &mu).norm());
    }
    assert!(worst_abelian < 1e-12, "bracket on F∧F^⊥ {worst_abelian}");

    println!(
        "A7 numerics substrate: PASS (jet/FD {worst_fd:.2e}, gauge/exp {worst_gauge:.2e}, abelian bracket {worst_abelian:.2e})"
    );
}

#[test]
fn a8_parser_corpus() {
    let corpus = [
        "(cos(u), sin(u), v)",
        "(1, u, v, u*v)",
        "(1, u, v, u*u + v*v)",
        "(u, v, u*v)",
        "(u^2, v^2, u*v, 1)",
        "(sqrt(1 + u*u), v, u)",
        "(exp(u), exp(-v), u + v)",
        "(u/(1 + v*v), v, u*u)",
        "(neg(u), -v, u - v)",
        "(2*u/(1 + u*u + v*v), 2*v/(1 + u*u + v*v), (u*u + v*v - 1)/(1 + u*u + v*v))",
        "((2 + cos(v))*cos(u), (2 + cos(v))*sin(u), sin(v))",
        "(u + v, u - v, u*v, u/v)",
        "(1.5e0*u, 2.25*v, 0.5)",
        "(u^-1, v^-2, 1)",
        "(u^3 - 3*u*v^2, 3*u^2*v - v^3, u)",
        "(sin(u*v), cos(u/2), exp(v/3))",
        "(u*(1 + v*v)/2 - u*u*u/6, v*v*v/6 - u*u*v/2 - v/2, (u*u - v*v)/2)",
        "(-u, -(u + v), -u*v)",
        "(-(u^2), (-u)^2, v)",
        "(sin(cos(u)), cos(sin(v)), u)",
        "(1/(2 + sin(u)), v, u)",
        "(u - -v, u - (-v), v)",
        "(0.25, u, v)",
        "(u*2^3, v, 1)",
        "(sqrt(4 + u^2)*cos(v), sqrt(4 + u^2)*sin(v), u)",
        "(exp(v*0.7071067811865476)*cos(u), exp(v*0.7071067811865476)*sin(u), exp(v*0.7071067811865476))",
        "(u + v + 1, u*v*2, u/2/3)",
        "(cos(u)^2, sin(u)^2, v)",
        "( u , v , u * v )",
        "(u, v, u*v, u*u, v*v)",
    ];
    assert_eq!(corpus.len(), 30);
    for text in corpus {
        let first = parse(text).unwrap_or_else(|e| panic!("`{text}`: {e}"));
        let printed = first.to_string();
        let second = parse(&printed).unwrap_or_else(|e| panic!("reparse `{printed}`: {e}"));
        assert_eq!(first, second, "round trip changed `{text}`");
        assert_eq!(
            printed,
            second.to_string(),
            "printing not idempotent for `{text}`"
        );
    }

    let malformed = [
        "(u + )",
        "(u, v",
        "u, v, 1)",
        "(u, v, )",
        "(tan(u), v, 1)",
        "(u, v, 1) trailing",
        "(u ^ v, v, 1)",
        "(u, v, sin())",
        "(, u, v)",
        "(u, v, 3..2)",
    ];
    assert_eq!(malformed.len(), 10);
    for text in malformed {
        match parse(text) {
            Err(deforma::Error::Parse { offset, expected }) => {
                assert!(
                    offset <= text.len(),
                    "`{text}`: offset {offset} out of range"
                );
                assert!(!expected.is_empty());
            }
            Err(deforma::Error::UnknownIdentifier { offset, .. }) => {
                assert!(offset < text.len());
            }
            Err(other) => panic!("`{text}`: unexpected error type {other}"),
            Ok(_) => panic!("`{text}` parsed but should not"),
        }
    }
    println!("A8 parser corpus: PASS (30 round-trips, 10 positioned rejections)");
}
