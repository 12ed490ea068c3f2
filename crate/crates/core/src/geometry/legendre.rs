use std::rc::Rc;

use nalgebra::{DMatrix, DVector};

use super::{flag, GeometrySpec, LiftBuilder, LiftedSurface, PointData, SectionEval};
use crate::directions::{solve_binary_quadratic, JetDirection, QuadraticRoots};
use crate::dsl::SurfaceExpr;
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::jet::{Jet2, JetMat, JetVec};
use crate::multilinear::MetricSpace;
use crate::subbundle::{
    metric_membership_residual, metric_orthogonal_complement, span_with_derivatives, BundleLabel,
    SubbundleSample, RANK_TOL,
};

/// Curvature sphere congruences and curvature directions at a point, all
/// with jet-valued data so that the Lie cyclide splitting can take second
/// derivatives of the sphere lifts.
#[derive(Clone)]
pub struct CurvatureData {
    pub space: MetricSpace,
    pub sigma: JetVec,
    pub sigma_tilde: JetVec,
    /// Curvature directions: `d_{T_i} σ_i ∈ f`.
    pub t1: JetDirection,
    pub t2: JetDirection,
    /// Curvature sphere lifts `σ_i = a_i σ + b_i σ̃`.
    pub s1: JetVec,
    pub s2: JetVec,
    /// Worst `‖d_{T_i}σ_i mod f‖ / (1 + ‖d_{T_i}σ_i‖)` over `i`.
    pub residual: f64,
}

fn lex_triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut t = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                t.push((i, j, k));
            }
        }
    }
    t
}

/// `a ∧ b ∧ c` componentwise in the lexicographic ∧³ basis, with jet
/// entries truncated to the smallest operand degree.
fn wedge3(a: &JetVec, b: &JetVec, c: &JetVec, triples: &[(usize, usize, usize)]) -> JetVec {
    let d = a.degree().min(b.degree()).min(c.degree());
    let minor = |p: usize, q: usize, x: &JetVec, y: &JetVec| {
        x.comp(p)
            .to_degree(d)
            .mul(&y.comp(q).to_degree(d))
            .sub(&x.comp(q).to_degree(d).mul(&y.comp(p).to_degree(d)))
    };
    JetVec::new(
        triples
            .iter()
            .map(|&(i, j, k)| {
                let m_jk = minor(j, k, b, c);
                let m_ik = minor(i, k, b, c);
                let m_ij = minor(i, j, b, c);
                a.comp(i)
                    .to_degree(d)
                    .mul(&m_jk)
                    .sub(&a.comp(j).to_degree(d).mul(&m_ik))
                    .add(&a.comp(k).to_degree(d).mul(&m_ij))
            })
            .collect(),
    )
}

fn det2(m: &JetMat) -> Jet2 {
    m.entry(0, 0)
        .mul(m.entry(1, 1))
        .sub(&m.entry(0, 1).mul(m.entry(1, 0)))
}

/// Kernel direction of a singular 2×2 jet matrix, pivoting on the row with
/// the larger constant term.
fn kernel2(m: &JetMat) -> (Jet2, Jet2) {
    let r0 = m.entry(0, 0).value().abs().max(m.entry(0, 1).value().abs());
    let r1 = m.entry(1, 0).value().abs().max(m.entry(1, 1).value().abs());
    if r0 >= r1 {
        (m.entry(0, 1).clone(), m.entry(0, 0).neg())
    } else {
        (m.entry(1, 1).clone(), m.entry(1, 0).neg())
    }
}

/// Compute the curvature sphere congruences of the Legendre plane spanned
/// by `σ, σ̃`.
///
/// A direction `X` is a curvature direction iff the pair
/// `(d_X σ, d_X σ̃) mod f` is linearly dependent in `f^⊥/f`; the vanishing
/// determinant of that pencil is the induced conformal structure. Both the
/// roots (curvature directions) and the kernels (sphere lifts) are solved
/// in jet arithmetic, so their own derivatives stay available downstream.
pub fn curvature_spheres(
    sigma: &JetVec,
    sigma_tilde: &JetVec,
    space: &MetricSpace,
    point: (f64, f64),
) -> Result<CurvatureData> {
    let n = space.dimension();
    let scale = 1.0 + sigma.max_abs_coeff().max(sigma_tilde.max_abs_coeff());

    // f must be null rank 2
    let pairings = [
        sigma.inner(sigma, space),
        sigma_tilde.inner(sigma_tilde, space),
        sigma.inner(sigma_tilde, space),
    ];
    for p in &pairings {
        if p.value().abs() > 1e-9 * scale * scale {
            return Err(Error::InvariantViolation {
                what: "legendre plane nullity",
                residual: p.value().abs(),
                tol: 1e-9 * scale * scale,
            });
        }
    }

    let su = sigma.du();
    let sv = sigma.dv();
    let tu = sigma_tilde.du();
    let tv = sigma_tilde.dv();

    // contact: f^(1) ≤ f^⊥
    for (a, b) in [
        (&su, sigma_tilde),
        (&sv, sigma_tilde),
        (&tu, sigma),
        (&tv, sigma),
    ] {
        let r = a.inner(b, space).value().abs();
        if r > 1e-9 * scale * scale {
            return Err(Error::InvariantViolation {
                what: "contact condition f^(1) ≤ f^⊥",
                residual: r,
                tol: 1e-9 * scale * scale,
            });
        }
    }

    let triples = lex_triples(n);
    let w_u = wedge3(&su, sigma, sigma_tilde, &triples);
    let w_v = wedge3(&sv, sigma, sigma_tilde, &triples);
    let wt_u = wedge3(&tu, sigma, sigma_tilde, &triples);
    let wt_v = wedge3(&tv, sigma, sigma_tilde, &triples);

    // immersion: the four images must span a rank-2 space of ∧³
    let stacked = DMatrix::from_columns(&[w_u.value(), w_v.value(), wt_u.value(), wt_v.value()]);
    let svd = crate::linalg::svd(&stacked);
    let rank = svd.rank(RANK_TOL);
    if rank < 2 {
        return Err(Error::GeometryMismatch {
            required: "an immersed Legendre map (rank-2 pencil)",
            actual: format!("pencil rank {rank}"),
        });
    }
    let q = svd.u.columns(0, 2).into_owned();

    // 2×2 pencil N(α,β) = α·U + β·V in the reduced coordinates
    let reduce = |col_a: &JetVec, col_b: &JetVec| {
        let d = col_a.degree();
        JetMat::from_fn(2, 2, |r, c| {
            let w = if c == 0 { col_a } else { col_b };
            let mut sum = Jet2::zero(d);
            for k in 0..w.dim() {
                sum = sum.add(&w.comp(k).scale(q[(k, r)]));
            }
            sum
        })
    };
    let u_mat = reduce(&w_u, &wt_u);
    let v_mat = reduce(&w_v, &wt_v);

    let a = det2(&u_mat);
    let c = det2(&v_mat);
    let b = u_mat
        .entry(0, 0)
        .mul(v_mat.entry(1, 1))
        .add(&v_mat.entry(0, 0).mul(u_mat.entry(1, 1)))
        .sub(&u_mat.entry(0, 1).mul(v_mat.entry(1, 0)))
        .sub(&v_mat.entry(0, 1).mul(u_mat.entry(1, 0)))
        .scale(0.5);

    let qscale = a.value().abs().max(b.value().abs()).max(c.value().abs());
    let disc = b.mul(&b).sub(&a.mul(&c)).value();
    if qscale < 1e-12 * scale * scale {
        return Err(Error::ConformalSignature {
            u: point.0,
            v: point.1,
        });
    }
    if disc < 1e-10 * qscale * qscale {
        if disc < -1e-10 * qscale * qscale {
            return Err(Error::ConformalSignature {
                u: point.0,
                v: point.1,
            });
        }
        return Err(Error::Umbilic {
            u: point.0,
            v: point.1,
        });
    }

    let (t1, t2) = match solve_binary_quadratic(&a, &b, &c, point)? {
        QuadraticRoots::Real(r1, r2) => (r1, r2),
        QuadraticRoots::Complex(_, _) => {
            return Err(Error::ConformalSignature {
                u: point.0,
                v: point.1,
            })
        }
    };

    let sphere_for = |t: &JetDirection| -> Result<(JetVec, (f64, f64))> {
        let n_mat = u_mat.scale_jet(&t.alpha).add(&v_mat.scale_jet(&t.beta));
        let (ka, kb) = kernel2(&n_mat);
        let norm_sq = ka.mul(&ka).add(&kb.mul(&kb));
        if norm_sq.value() <= 1e-20 {
            return Err(Error::Umbilic {
                u: point.0,
                v: point.1,
            });
        }
        let inv = norm_sq.sqrt()?.recip()?;
        let d = inv.degree();
        let ka = ka.mul(&inv);
        let kb = kb.mul(&inv);
        let coeffs = (ka.value(), kb.value());
        Ok((
            sigma
                .to_degree(d)
                .scale_jet(&ka)
                .add(&sigma_tilde.to_degree(d).scale_jet(&kb)),
            coeffs,
        ))
    };
    let (s1, k1) = sphere_for(&t1)?;
    let (s2, k2) = sphere_for(&t2)?;

    // the two sphere lines must be genuinely distinct; a collapsing pair
    // betrays a (near-)umbilic even when the direction quadratic looks
    // healthy, because its coefficient scale collapses alongside
    let sep = (k1.0 * k2.1 - k1.1 * k2.0).abs();
    if sep < 1e-3 {
        return Err(Error::Umbilic {
            u: point.0,
            v: point.1,
        });
    }

    // certification: d_{T_i} σ_i ∈ f
    let f_basis = DMatrix::from_columns(&[sigma.value(), sigma_tilde.value()]);
    let mut residual: f64 = 0.0;
    for (t, s) in [(&t1, &s1), (&t2, &s2)] {
        let ds = t.deriv_of(s).value();
        residual =
            residual.max(metric_membership_residual(&ds, &f_basis, space) / (1.0 + ds.norm()));
    }

    Ok(CurvatureData {
        space: space.clone(),
        sigma: sigma.clone(),
        sigma_tilde: sigma_tilde.clone(),
        t1,
        t2,
        s1,
        s2,
        residual,
    })
}

/// `S₁ = ⟨σ₁, d_Y σ₁, d_Y d_Y σ₁⟩` with `Y = T₂` (and symmetrically `S₂`):
/// the orthogonal Lie cyclide splitting of the ambient space.
pub fn lie_cyclide_splitting(
    cur: &CurvatureData,
    point: (f64, f64),
) -> Result<(SubbundleSample, SubbundleSample)> {
    let build = |s: &JetVec, t: &JetDirection, label: BundleLabel| -> Result<SubbundleSample> {
        let d1 = t.deriv_of(s);
        let d2 = t.deriv_of(&d1);
        let cols = vec![s.value(), d1.value(), d2.value()];
        let sample = SubbundleSample::from_columns(point, &cols, RANK_TOL, label);
        if sample.rank != 3 {
            return Err(Error::SplittingDegenerate {
                u: point.0,
                v: point.1,
            });
        }
        Ok(sample)
    };
    let s1 = build(&cur.s1, &cur.t2, BundleLabel::S1Split)?;
    let s2 = build(&cur.s2, &cur.t1, BundleLabel::S2Split)?;
    // direct sum must fill the ambient space
    let mut all = s1.basis.clone();
    all.extend(s2.basis.iter().cloned());
    let union = SubbundleSample::from_columns(point, &all, RANK_TOL, BundleLabel::Other);
    if union.rank != cur.space.dimension() {
        return Err(Error::SplittingDegenerate {
            u: point.0,
            v: point.1,
        });
    }
    Ok((s1, s2))
}

/// Max `|⟨b₁, b₂⟩|` over the two orthonormal bases; the splitting is
/// orthogonal when this vanishes.
pub fn splitting_orthogonality_residual(
    s1: &SubbundleSample,
    s2: &SubbundleSample,
    space: &MetricSpace,
) -> f64 {
    let mut m: f64 = 0.0;
    for b1 in &s1.basis {
        for b2 in &s2.basis {
            m = m.max(space.inner(b1, b2).abs());
        }
    }
    m
}

/// Directional derived bundle `f_i = f + d_{T_i} f`, rank 3.
pub fn directional_derived(
    cur: &CurvatureData,
    which: usize,
    point: (f64, f64),
) -> SubbundleSample {
    let t = if which == 1 { &cur.t1 } else { &cur.t2 };
    let label = if which == 1 {
        BundleLabel::LittleF1
    } else {
        BundleLabel::LittleF2
    };
    let cols = vec![
        cur.sigma.value(),
        cur.sigma_tilde.value(),
        t.deriv_of(&cur.sigma).value(),
        t.deriv_of(&cur.sigma_tilde).value(),
    ];
    SubbundleSample::from_columns(point, &cols, RANK_TOL, label)
}

/// Point-sphere lift `(x, (1−|x|²)/2, (1+|x|²)/2, 0)` in `R^{4,2}`.
pub fn point_sphere_jet(x: &JetVec) -> JetVec {
    let d = x.degree();
    let conf = super::conformal::light_cone_jet(x);
    let mut comps: Vec<Jet2> = conf.comps().to_vec();
    comps.push(Jet2::zero(d));
    JetVec::new(comps)
}

/// Tangent-plane lift `(ν, −x·ν, x·ν, 1)` in `R^{4,2}`.
pub fn tangent_plane_jet(x: &JetVec, normal: &JetVec) -> JetVec {
    let d = x.degree().min(normal.degree());
    let mut dot = Jet2::zero(d);
    for k in 0..3 {
        dot = dot.add(&x.comp(k).to_degree(d).mul(&normal.comp(k).to_degree(d)));
    }
    JetVec::new(vec![
        normal.comp(0).to_degree(d),
        normal.comp(1).to_degree(d),
        normal.comp(2).to_degree(d),
        dot.neg(),
        dot,
        Jet2::constant(1.0, d),
    ])
}

/// Unit normal `x_u × x_v / |x_u × x_v|` as jets (one degree below `x`).
pub fn unit_normal_jet(x: &JetVec) -> Result<JetVec> {
    let xu = x.du();
    let xv = x.dv();
    let d = xu.degree();
    let cross = |i: usize, j: usize| xu.comp(i).mul(xv.comp(j)).sub(&xu.comp(j).mul(xv.comp(i)));
    let n = JetVec::new(vec![cross(1, 2), cross(2, 0), cross(0, 1)]);
    let mut norm_sq = Jet2::zero(d);
    for k in 0..3 {
        norm_sq = norm_sq.add(&n.comp(k).mul(n.comp(k)));
    }
    if norm_sq.value() <= 0.0 {
        return Err(Error::Other("normal undefined: |x_u × x_v| = 0".into()));
    }
    let inv = norm_sq.sqrt()?.recip()?;
    Ok(n.scale_jet(&inv))
}

pub fn lift(expr: &SurfaceExpr, grid: &ParamGrid, degree: usize) -> Result<LiftedSurface> {
    if expr.arity() != 3 {
        return Err(Error::Other(format!(
            "legendre lift needs a 3-component immersion, got {} components",
            expr.arity()
        )));
    }
    let e_sigma = expr.clone();
    let section = SectionEval(Rc::new(move |u, v, d| {
        Ok(point_sphere_jet(&e_sigma.eval_jet(u, v, d)?))
    }));
    let e_tilde = expr.clone();
    // evaluate x one degree higher so the normal (and σ̃) land at `d`
    let section_tilde = SectionEval(Rc::new(move |u, v, d| {
        let x = e_tilde.eval_jet(u, v, d + 1)?;
        let nu = unit_normal_jet(&x)?;
        Ok(tangent_plane_jet(&x.to_degree(d), &nu))
    }));
    from_sections(
        GeometrySpec::lie_sphere_42(),
        grid,
        degree,
        section,
        section_tilde,
        expr.to_string(),
    )
}

pub fn from_sections(
    spec: GeometrySpec,
    grid: &ParamGrid,
    degree: usize,
    section: SectionEval,
    section_tilde: SectionEval,
    source: String,
) -> Result<LiftedSurface> {
    let mut builder = LiftBuilder::new(grid.len());
    for (i, j) in grid.indices() {
        let p = grid.point(i, j);
        let jets = section
            .eval(p.0, p.1, degree)
            .and_then(|s| Ok((s, section_tilde.eval(p.0, p.1, degree)?)));
        let (sigma, sigma_tilde) = match jets {
            Ok(pair) => pair,
            Err(e) => {
                flag(&mut builder.flagged, i, j, p, e.to_string());
                continue;
            }
        };
        match analyze_point(&sigma, &sigma_tilde, &spec.space, p) {
            Ok(data) => builder.points[grid.index(i, j)] = Some(data),
            Err(reason) => flag(&mut builder.flagged, i, j, p, reason),
        }
    }
    builder.finish(
        spec,
        grid.clone(),
        degree,
        section,
        Some(section_tilde),
        source,
    )
}

fn analyze_point(
    sigma: &JetVec,
    sigma_tilde: &JetVec,
    space: &MetricSpace,
    p: (f64, f64),
) -> std::result::Result<PointData, String> {
    let cur = curvature_spheres(sigma, sigma_tilde, space, p).map_err(|e| e.to_string())?;
    if cur.residual > 1e-9 {
        return Err(format!(
            "curvature sphere residual {:.3e} exceeds 1e-9",
            cur.residual
        ));
    }
    let f1 = span_with_derivatives(
        &[sigma.clone(), sigma_tilde.clone()],
        1,
        RANK_TOL,
        p,
        BundleLabel::LittleF1,
    )
    .map_err(|e| e.to_string())?;
    Ok(PointData {
        sigma: sigma.clone(),
        sigma_tilde: Some(sigma_tilde.clone()),
        f1,
        f2: None,
        adapted: None,
        asymptotic: None,
        curvature: Some(cur),
    })
}

/// Quotient coordinates of `f^⊥/f`: returns `(basis of f^⊥ completing f,
/// coordinate extractor)` — used by tests as an independent oracle route.
pub fn quotient_frame(
    sigma: &DVector<f64>,
    sigma_tilde: &DVector<f64>,
    space: &MetricSpace,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let f = DMatrix::from_columns(&[sigma.clone(), sigma_tilde.clone()]);
    let fperp = metric_orthogonal_complement(&f, space);
    (f, fperp)
}
