use std::fmt;
use std::rc::Rc;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::Result;
use crate::geometry::{theta_basis, AdaptedFrame, SectionEval};
use crate::grid::ParamGrid;
use crate::jet::{Jet2, JetMat, JetVec};
use crate::multilinear::{AlgebraKind, MetricSpace};

/// Evaluator signature of a 1-form: `(u, v, degree) ↦ (η_u, η_v)` jets.
pub type FormEval = dyn Fn(f64, f64, usize) -> Result<(JetMat, JetMat)>;

/// An algebra-valued 1-form `η = η_u du + η_v dv` over the parameter
/// domain.
///
/// Forms are carried as analytic evaluators producing the coefficient
/// matrices with jet entries at any requested point and degree; the
/// higher-order deformation conditions differentiate those coefficients,
/// and gauge integration evaluates them off the grid. Numeric tables are
/// wrapped with finite-difference jets (see [`OneForm::from_table`]).
#[derive(Clone)]
pub struct OneForm {
    pub space: MetricSpace,
    pub kind: AlgebraKind,
    pub label: String,
    eval: Rc<FormEval>,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm({})", self.label)
    }
}

impl OneForm {
    pub fn from_fn(
        space: MetricSpace,
        kind: AlgebraKind,
        label: impl Into<String>,
        eval: impl Fn(f64, f64, usize) -> Result<(JetMat, JetMat)> + 'static,
    ) -> Self {
        OneForm {
            space,
            kind,
            label: label.into(),
            eval: Rc::new(eval),
        }
    }

    pub fn zero(space: MetricSpace, kind: AlgebraKind) -> Self {
        let n = space.dimension();
        OneForm::from_fn(space, kind, "zero", move |_, _, d| {
            Ok((JetMat::zero(n, n, d), JetMat::zero(n, n, d)))
        })
    }

    /// Coefficient jets at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64, degree: usize) -> Result<(JetMat, JetMat)> {
        (self.eval)(u, v, degree)
    }

    /// Coefficient values at `(u, v)`.
    pub fn values(&self, u: f64, v: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let (a, b) = self.eval(u, v, 0)?;
        Ok((a.value(), b.value()))
    }

    /// `t·η`.
    pub fn scale(&self, t: f64) -> OneForm {
        let inner = self.eval.clone();
        OneForm {
            space: self.space.clone(),
            kind: self.kind,
            label: format!("{} * {t}", self.label),
            eval: Rc::new(move |u, v, d| {
                let (a, b) = inner(u, v, d)?;
                Ok((a.scale(t), b.scale(t)))
            }),
        }
    }

    /// `η + η'`.
    pub fn add(&self, other: &OneForm) -> OneForm {
        let a = self.eval.clone();
        let b = other.eval.clone();
        OneForm {
            space: self.space.clone(),
            kind: self.kind,
            label: format!("{} + {}", self.label, other.label),
            eval: Rc::new(move |u, v, d| {
                let (au, av) = a(u, v, d)?;
                let (bu, bv) = b(u, v, d)?;
                Ok((au.add(&bu), av.add(&bv)))
            }),
        }
    }

    /// Exact form `η = dξ` of a matrix-valued potential.
    pub fn exact(
        space: MetricSpace,
        kind: AlgebraKind,
        label: impl Into<String>,
        xi: impl Fn(f64, f64, usize) -> Result<JetMat> + 'static,
    ) -> Self {
        OneForm::from_fn(space, kind, label, move |u, v, d| {
            let x = xi(u, v, d + 1)?;
            Ok((x.du(), x.dv()))
        })
    }

    /// Wrap per-node coefficient tables; jets come from central finite
    /// differences (degree ≤ 2), off-node evaluation re-centres the nearest
    /// node's Taylor polynomial. Accuracy is `O(h²)`, which the
    /// cross-checks against analytic forms make visible.
    pub fn from_table(
        space: MetricSpace,
        kind: AlgebraKind,
        label: impl Into<String>,
        grid: ParamGrid,
        table: Rc<Vec<(DMatrix<f64>, DMatrix<f64>)>>,
    ) -> Self {
        let n = space.dimension();
        OneForm::from_fn(space, kind, label, move |u, v, degree| {
            let d = degree.min(2);
            let iu = (((u - grid.u_range.0) / grid.hu()).round() as isize)
                .clamp(1, grid.nu as isize - 2) as usize;
            let iv = (((v - grid.v_range.0) / grid.hv()).round() as isize)
                .clamp(1, grid.nv as isize - 2) as usize;
            let (u0, v0) = grid.point(iu, iv);
            let (hu, hv) = (grid.hu(), grid.hv());
            let at = |di: isize, dj: isize| {
                &table[grid.index((iu as isize + di) as usize, (iv as isize + dj) as usize)]
            };
            type Pick<'a> = &'a dyn Fn(&(DMatrix<f64>, DMatrix<f64>)) -> f64;
            let fd_jet = |pick: Pick| -> Jet2 {
                let c = pick(at(0, 0));
                let mut j = Jet2::constant(c, d);
                if d >= 1 {
                    j.set_coeff(1, 0, (pick(at(1, 0)) - pick(at(-1, 0))) / (2.0 * hu));
                    j.set_coeff(0, 1, (pick(at(0, 1)) - pick(at(0, -1))) / (2.0 * hv));
                }
                if d >= 2 {
                    j.set_coeff(
                        2,
                        0,
                        (pick(at(1, 0)) - 2.0 * c + pick(at(-1, 0))) / (2.0 * hu * hu),
                    );
                    j.set_coeff(
                        0,
                        2,
                        (pick(at(0, 1)) - 2.0 * c + pick(at(0, -1))) / (2.0 * hv * hv),
                    );
                    j.set_coeff(
                        1,
                        1,
                        (pick(at(1, 1)) - pick(at(1, -1)) - pick(at(-1, 1)) + pick(at(-1, -1)))
                            / (4.0 * hu * hv),
                    );
                }
                j.recenter(u - u0, v - v0)
            };
            let mut mu = JetMat::zero(n, n, d);
            let mut mv = JetMat::zero(n, n, d);
            for i in 0..n {
                for j in 0..n {
                    *mu.entry_mut(i, j) = fd_jet(&|t| t.0[(i, j)]);
                    *mv.entry_mut(i, j) = fd_jet(&|t| t.1[(i, j)]);
                }
            }
            Ok((mu, mv))
        })
    }

    /// `max(‖η_u‖_F, ‖η_v‖_F)` over grid nodes.
    pub fn max_norm(&self, grid: &ParamGrid) -> Result<f64> {
        let mut m: f64 = 0.0;
        for (i, j) in grid.indices() {
            let (u, v) = grid.point(i, j);
            let (a, b) = self.values(u, v)?;
            m = m.max(a.norm()).max(b.norm());
        }
        Ok(m)
    }
}

/// Wedge of two vectors as an `o(p,q)` matrix with jet entries:
/// `(a∧b)x = (a,x)b − (b,x)a`, i.e. `M = b(Ga)ᵀ − a(Gb)ᵀ`.
pub fn wedge_matrix_jet(a: &JetVec, b: &JetVec, space: &MetricSpace) -> JetMat {
    let n = space.dimension();
    assert_eq!(a.dim(), n);
    assert_eq!(b.dim(), n);
    let d = a.degree().min(b.degree());
    let g = space.gram();
    let weight = |x: &JetVec, j: usize| {
        let mut s = Jet2::zero(d);
        for k in 0..n {
            if g[(j, k)] != 0.0 {
                s = s.add(&x.comp(k).to_degree(d).scale(g[(j, k)]));
            }
        }
        s
    };
    JetMat::from_fn(n, n, |i, j| {
        let ga = weight(a, j);
        let gb = weight(b, j);
        b.comp(i)
            .to_degree(d)
            .mul(&ga)
            .sub(&a.comp(i).to_degree(d).mul(&gb))
    })
}

/// A smooth scalar coefficient field with closed-form jets:
/// `c₀ + c₁u + c₂v + c₃uv + c₄·sin u + c₅·cos v`.
#[derive(Debug, Clone, Copy)]
pub struct CoeffField {
    pub c: [f64; 6],
}

impl CoeffField {
    pub fn constant(c0: f64) -> Self {
        CoeffField {
            c: [c0, 0.0, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// Random field with all basis functions active and an O(1) constant
    /// part, so samples stay well away from zero.
    pub fn sample(rng: &mut impl Rng) -> Self {
        let mut c = [0.0f64; 6];
        for x in c.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        c[0] = c[0].signum() * (0.4 + c[0].abs());
        CoeffField { c }
    }

    /// Random field depending on `u` alone.
    pub fn sample_u_only(rng: &mut impl Rng) -> Self {
        let mut f = Self::sample(rng);
        f.c[2] = 0.0;
        f.c[3] = 0.0;
        f.c[5] = 0.0;
        f
    }

    /// Random field depending on `v` alone.
    pub fn sample_v_only(rng: &mut impl Rng) -> Self {
        let mut f = Self::sample(rng);
        f.c[1] = 0.0;
        f.c[3] = 0.0;
        f.c[4] = 0.0;
        f
    }

    pub fn eval_jet(&self, u: f64, v: f64, d: usize) -> Jet2 {
        let ju = Jet2::variable_u(u, d);
        let jv = Jet2::variable_v(v, d);
        Jet2::constant(self.c[0], d)
            .add(&ju.scale(self.c[1]))
            .add(&jv.scale(self.c[2]))
            .add(&ju.mul(&jv).scale(self.c[3]))
            .add(&ju.sin().scale(self.c[4]))
            .add(&jv.cos().scale(self.c[5]))
    }
}

fn adapted_frame_at(
    section: &SectionEval,
    u: f64,
    v: f64,
    degree: usize,
) -> Result<(JetVec, AdaptedFrame)> {
    // frame/dual land two degrees below σ
    let sigma = section.eval(u, v, degree + 2)?;
    let adapted = crate::geometry::adapted_frame(&sigma)?;
    Ok((sigma, adapted))
}

/// A smooth `Θ`-valued 1-form on a projective surface with random
/// coefficient fields. Not closed in general.
pub fn sample_theta_form(
    section: SectionEval,
    rng: &mut impl Rng,
    label: impl Into<String>,
) -> OneForm {
    let coeffs_u: Vec<CoeffField> = (0..5).map(|_| CoeffField::sample(rng)).collect();
    let coeffs_v: Vec<CoeffField> = (0..5).map(|_| CoeffField::sample(rng)).collect();
    OneForm::from_fn(
        MetricSpace::plain(4),
        AlgebraKind::SpecialLinear,
        label,
        move |u, v, d| {
            let (sigma, adapted) = adapted_frame_at(&section, u, v, d)?;
            let gens = theta_basis(&sigma, &adapted).gens;
            let mut mu = JetMat::zero(4, 4, d);
            let mut mv = JetMat::zero(4, 4, d);
            for (k, gen) in gens.iter().enumerate() {
                let gen = gen.to_degree(d);
                mu = mu.add(&gen.scale_jet(&coeffs_u[k].eval_jet(u, v, d)));
                mv = mv.add(&gen.scale_jet(&coeffs_v[k].eval_jet(u, v, d)));
            }
            Ok((mu, mv))
        },
    )
}

/// The closed `Θ`-valued family of the graph quadric `(1, u, v, uv)`:
///
/// ```text
/// η_u = α₁P₁ + α₂P₂ − (∂_u α₂)P₃ − α₂P₄ + α₁P₅
/// η_v = α₂P₁ + β₂P₂ − (∂_v α₂)P₃ + β₂P₄ − α₂P₅
/// ```
///
/// with `α₁ = α₁(u)`, `β₂ = β₂(v)` and `α₂(u,v)` free. Closedness follows
/// from the quadric's frame derivative relations; the form is trivial
/// exactly when `α₁ = β₂ = 0` (then `η = d(−α₂·σ⊗ℓ₃)`). Certified
/// numerically wherever it is used.
pub fn closed_quadric_form(
    section: SectionEval,
    alpha1: CoeffField,
    beta2: CoeffField,
    alpha2: CoeffField,
    label: impl Into<String>,
) -> OneForm {
    OneForm::from_fn(
        MetricSpace::plain(4),
        AlgebraKind::SpecialLinear,
        label,
        move |u, v, d| {
            let (sigma, adapted) = adapted_frame_at(&section, u, v, d)?;
            let p = theta_basis(&sigma, &adapted).gens;
            let a1 = alpha1.eval_jet(u, v, d);
            let b2 = beta2.eval_jet(u, v, d);
            let a2 = alpha2.eval_jet(u, v, d + 1);
            let a2u = a2.du().to_degree(d);
            let a2v = a2.dv().to_degree(d);
            let a2 = a2.to_degree(d);
            let pk = |k: usize| p[k].to_degree(d);
            let mu = pk(0)
                .scale_jet(&a1)
                .add(&pk(1).scale_jet(&a2))
                .sub(&pk(2).scale_jet(&a2u))
                .sub(&pk(3).scale_jet(&a2))
                .add(&pk(4).scale_jet(&a1));
            let mv = pk(0)
                .scale_jet(&a2)
                .add(&pk(1).scale_jet(&b2))
                .sub(&pk(2).scale_jet(&a2v))
                .add(&pk(3).scale_jet(&b2))
                .sub(&pk(4).scale_jet(&a2));
            Ok((mu, mv))
        },
    )
}

/// A smooth algebra-valued 1-form with no admissibility structure at all;
/// the generic inadmissible test input.
pub fn random_algebra_form(
    space: MetricSpace,
    kind: AlgebraKind,
    rng: &mut impl Rng,
    label: impl Into<String>,
) -> OneForm {
    let basis = algebra_basis(&space, kind);
    let coeffs: Vec<(CoeffField, CoeffField)> = basis
        .iter()
        .map(|_| (CoeffField::sample(rng), CoeffField::sample(rng)))
        .collect();
    let n = space.dimension();
    OneForm::from_fn(space, kind, label, move |u, v, d| {
        let mut mu = JetMat::zero(n, n, d);
        let mut mv = JetMat::zero(n, n, d);
        for (b, (cu, cv)) in basis.iter().zip(&coeffs) {
            let bj = JetMat::from_fn(n, n, |i, j| Jet2::constant(b[(i, j)], d));
            mu = mu.add(&bj.scale_jet(&cu.eval_jet(u, v, d)));
            mv = mv.add(&bj.scale_jet(&cv.eval_jet(u, v, d)));
        }
        Ok((mu, mv))
    })
}

/// A basis of `sl(n)` or `o(p,q)` as plain matrices.
pub fn algebra_basis(space: &MetricSpace, kind: AlgebraKind) -> Vec<DMatrix<f64>> {
    let n = space.dimension();
    let mut basis = Vec::new();
    match kind {
        AlgebraKind::SpecialLinear => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut m = DMatrix::zeros(n, n);
                        m[(i, j)] = 1.0;
                        basis.push(m);
                    }
                }
            }
            for i in 0..(n - 1) {
                let mut m = DMatrix::zeros(n, n);
                m[(i, i)] = 1.0;
                m[(i + 1, i + 1)] = -1.0;
                basis.push(m);
            }
        }
        AlgebraKind::Orthogonal => {
            let g = space.gram();
            for i in 0..n {
                for j in (i + 1)..n {
                    // e_i ∧ e_j as a matrix
                    let gi = g.column(i).into_owned();
                    let gj = g.column(j).into_owned();
                    let mut m = DMatrix::zeros(n, n);
                    for r in 0..n {
                        for c in 0..n {
                            let ei = if r == i { 1.0 } else { 0.0 };
                            let ej = if r == j { 1.0 } else { 0.0 };
                            m[(r, c)] += ej * gi[c] - ei * gj[c];
                        }
                    }
                    basis.push(m);
                }
            }
        }
    }
    basis
}
