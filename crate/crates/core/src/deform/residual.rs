use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::OneForm;
use crate::error::Result;
use crate::geometry::{GeometryKind, LiftedSurface, PointData};
use crate::jet::{Jet2, JetMat, JetVec};
use crate::multilinear::{MetricSpace, WedgeSpace};
use crate::report::ResidualField;

/// Representation data shared by all condition evaluations on one lift:
/// the projective representation space `V` the chart conditions live in,
/// and the wedge machinery for Legendre maps (whose `V` is `∧²R^{s,t}`).
pub struct RepContext {
    pub rep_space: MetricSpace,
    wedge: Option<WedgeSpace>,
}

impl RepContext {
    pub fn new(ls: &LiftedSurface) -> Result<Self> {
        match ls.spec.kind {
            GeometryKind::Projective | GeometryKind::Conformal => Ok(RepContext {
                rep_space: ls.spec.space.clone(),
                wedge: None,
            }),
            GeometryKind::LieSphere33 | GeometryKind::LieSphere42 => {
                let ws = WedgeSpace::from_metric(ls.spec.space.clone())?;
                Ok(RepContext {
                    rep_space: ws.space().clone(),
                    wedge: Some(ws),
                })
            }
        }
    }

    /// The section of the representation bundle as jets: σ itself, or
    /// `σ∧σ̃` for Legendre maps.
    pub fn section(&self, data: &PointData) -> JetVec {
        match &self.wedge {
            None => data.sigma.clone(),
            Some(ws) => {
                let s = &data.sigma;
                let t = data.sigma_tilde.as_ref().expect("legendre point data");
                let d = s.degree().min(t.degree());
                JetVec::new(
                    ws.basis_order()
                        .iter()
                        .map(|&(i, j)| {
                            s.comp(i)
                                .to_degree(d)
                                .mul(&t.comp(j).to_degree(d))
                                .sub(&s.comp(j).to_degree(d).mul(&t.comp(i).to_degree(d)))
                        })
                        .collect(),
                )
            }
        }
    }

    /// Transport a form coefficient into the representation: identity, or
    /// the induced action on `∧²` for Legendre maps.
    pub fn form_matrix(&self, m: &JetMat) -> JetMat {
        match &self.wedge {
            None => m.clone(),
            Some(ws) => induced_action_jet(m, ws),
        }
    }

    /// Residual of `w ∈ V` against membership in the rep line/subspace `F`.
    /// Raw norm, no normalisation.
    pub fn membership_raw(&self, w: &DVector<f64>, data: &PointData) -> f64 {
        match &self.wedge {
            None => match &data.adapted {
                // projective: coefficients along the complement part
                // (σ_u, σ_v, w) of the adapted frame
                Some(ad) => {
                    let coords = ad.dual.value() * w;
                    coords.rows(1, 3).norm()
                }
                // conformal: pair against the metric complement of ⟨σ⟩
                None => {
                    let basis = DMatrix::from_columns(&[data.sigma.value()]);
                    crate::subbundle::metric_membership_residual(w, &basis, &self.rep_space)
                }
            },
            Some(_) => {
                let f = self.section(data).value();
                let basis = DMatrix::from_columns(&[f]);
                crate::subbundle::metric_membership_residual(w, &basis, &self.rep_space)
            }
        }
    }
}

/// Induced action `φ(A)(v∧w) = Av∧w + v∧Aw` with jet entries.
pub fn induced_action_jet(a: &JetMat, ws: &WedgeSpace) -> JetMat {
    let pairs = ws.basis_order();
    let m = pairs.len();
    let d = a.degree();
    JetMat::from_fn(m, m, |row, col| {
        let (i, j) = pairs[row];
        let (k, l) = pairs[col];
        let mut c = Jet2::zero(d);
        if j == l {
            c = c.add(a.entry(i, k));
        }
        if i == l {
            c = c.sub(a.entry(j, k));
        }
        if i == k {
            c = c.add(a.entry(j, l));
        }
        if j == k {
            c = c.sub(a.entry(i, l));
        }
        c
    })
}

/// The chart covector sampling set: canonical duals plus 8 seeded
/// pseudo-random unit covectors.
pub fn covector_set(dim: usize, rng: &mut impl Rng) -> Vec<DVector<f64>> {
    let mut set = Vec::with_capacity(dim + 8);
    for i in 0..dim {
        set.push(DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 }));
    }
    for _ in 0..8 {
        let mut v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0f64..1.0));
        let n = v.norm();
        if n > 1e-9 {
            v /= n;
        } else {
            v[0] = 1.0;
        }
        set.push(v);
    }
    set
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Multisets of `r` coordinate directions, as `(a, b)` counts of `∂u, ∂v`.
fn multisets(r: usize) -> Vec<(usize, usize)> {
    (0..=r).map(|a| (a, r - a)).collect()
}

/// Chart condition residuals for all orders `r ≤ r_max` and all covectors
/// at once: per point, `η` is evaluated a single time and every covector's
/// normalised section is differentiated once. Returns one field per order,
/// each holding `max_{v₀, Y, |J| = r}` of
/// `‖η(Y) d_{X_J}σ − Σ_{K⊆J} v₀(η(Y) d_{X_K}σ) d_{X_{J∖K}}σ‖`.
///
/// Points where a chart is invalid (`|v₀(σ)|` too small relative to
/// `‖σ‖‖v₀‖`) are skipped for that covector and counted.
pub fn chart_condition_tower(
    eta: &OneForm,
    ls: &LiftedSurface,
    ctx: &RepContext,
    v0s: &[DVector<f64>],
    r_max: usize,
) -> Result<Vec<ResidualField>> {
    let mut fields: Vec<ResidualField> =
        (0..=r_max).map(|_| ResidualField::new(&ls.grid)).collect();
    for ((i, j), data) in ls.interior_ok() {
        let p = ls.grid.point(i, j);
        let sigma = ctx.section(data);
        let sigma_norm = sigma.value().norm();
        let (mu, mv) = eta.eval(p.0, p.1, 0)?;
        let reps = [ctx.form_matrix(&mu).value(), ctx.form_matrix(&mv).value()];

        for v0 in v0s {
            let t = sigma.value().dot(v0);
            if t.abs() < 1e-3 * sigma_norm * v0.norm() {
                for f in fields.iter_mut() {
                    f.skip();
                }
                continue;
            }
            // normalise v₀(σ) = 1 in jets
            let mut pairing = Jet2::zero(sigma.degree());
            for k in 0..sigma.dim() {
                pairing = pairing.add(&sigma.comp(k).scale(v0[k]));
            }
            let chart = sigma.scale_jet(&pairing.recip()?);

            let mut derivs = std::collections::HashMap::new();
            for a in 0..=r_max {
                for b in 0..=(r_max - a) {
                    derivs.insert((a, b), chart.deriv(a, b));
                }
            }
            let deriv_scale = derivs
                .values()
                .fold(0.0f64, |m, d: &DVector<f64>| m.max(d.norm()));

            for m_y in &reps {
                let denom = (1.0 + m_y.norm()) * (1.0 + deriv_scale);
                let mapped: std::collections::HashMap<(usize, usize), DVector<f64>> =
                    derivs.iter().map(|(&k, d)| (k, m_y * d)).collect();
                for (r, field) in fields.iter_mut().enumerate() {
                    let mut worst: f64 = 0.0;
                    for &(a, b) in &multisets(r) {
                        let lhs = &mapped[&(a, b)];
                        let mut rhs = DVector::zeros(lhs.len());
                        for ka in 0..=a {
                            for kb in 0..=b {
                                let w = binom(a, ka) * binom(b, kb);
                                let inner = v0.dot(&mapped[&(ka, kb)]);
                                rhs += &derivs[&(a - ka, b - kb)] * (w * inner);
                            }
                        }
                        worst = worst.max((lhs - rhs).norm() / denom);
                    }
                    field.set(i, j, worst);
                }
            }
        }
    }
    Ok(fields)
}

/// Chart condition residual at exactly order `r` for one covector.
pub fn chart_condition_residual_at(
    eta: &OneForm,
    ls: &LiftedSurface,
    ctx: &RepContext,
    v0: &DVector<f64>,
    r: usize,
) -> Result<ResidualField> {
    let tower = chart_condition_tower(eta, ls, ctx, std::slice::from_ref(v0), r)?;
    Ok(tower.into_iter().nth(r).expect("tower has r+1 levels"))
}

/// Max chart residual over all orders `r' ≤ r` and all covectors in `v0s`.
pub fn chart_condition_residual(
    eta: &OneForm,
    ls: &LiftedSurface,
    ctx: &RepContext,
    v0s: &[DVector<f64>],
    r: usize,
) -> Result<ResidualField> {
    let tower = chart_condition_tower(eta, ls, ctx, v0s, r)?;
    let mut acc = ResidualField::new(&ls.grid);
    for f in &tower {
        acc.merge_max(f);
    }
    Ok(acc)
}

/// Invariant condition residuals for all orders `r ≤ r_max` in one pass:
/// per order, `max_{Y, |J| = r} ‖(d_{X_J} η(Y)) σ  mod F‖`, normalised per
/// point by `(1+‖d_{X_J}η(Y)‖)(1+‖σ‖)`.
pub fn invariant_condition_tower(
    eta: &OneForm,
    ls: &LiftedSurface,
    ctx: &RepContext,
    r_max: usize,
) -> Result<Vec<ResidualField>> {
    let mut fields: Vec<ResidualField> =
        (0..=r_max).map(|_| ResidualField::new(&ls.grid)).collect();
    for ((i, j), data) in ls.interior_ok() {
        let p = ls.grid.point(i, j);
        let (mu, mv) = eta.eval(p.0, p.1, r_max)?;
        let reps = [ctx.form_matrix(&mu), ctx.form_matrix(&mv)];
        let sigma = ctx.section(data).value();
        for m_y in &reps {
            for (r, field) in fields.iter_mut().enumerate() {
                let mut worst: f64 = 0.0;
                for &(a, b) in &multisets(r) {
                    let d_mat = m_y.deriv(a, b);
                    let w = &d_mat * &sigma;
                    let raw = ctx.membership_raw(&w, data);
                    let denom = (1.0 + d_mat.norm()) * (1.0 + sigma.norm());
                    worst = worst.max(raw / denom);
                }
                field.set(i, j, worst);
            }
        }
    }
    Ok(fields)
}

/// Invariant condition residual at exactly order `r`.
pub fn invariant_condition_residual_at(
    eta: &OneForm,
    ls: &LiftedSurface,
    ctx: &RepContext,
    r: usize,
) -> Result<ResidualField> {
    let tower = invariant_condition_tower(eta, ls, ctx, r)?;
    Ok(tower.into_iter().nth(r).expect("tower has r+1 levels"))
}

/// Max invariant residual over all orders `r < k`.
pub fn invariant_condition_residual(
    eta: &OneForm,
    ls: &LiftedSurface,
    ctx: &RepContext,
    k: usize,
) -> Result<ResidualField> {
    let tower = invariant_condition_tower(eta, ls, ctx, k.saturating_sub(1))?;
    let mut acc = ResidualField::new(&ls.grid);
    for f in &tower {
        acc.merge_max(f);
    }
    Ok(acc)
}

/// `‖∂_u η_v − ∂_v η_u‖` pointwise, scale-relative.
pub fn closure_residual(eta: &OneForm, grid: &crate::grid::ParamGrid) -> Result<ResidualField> {
    let mut field = ResidualField::new(grid);
    for (i, j) in grid.indices() {
        let (u, v) = grid.point(i, j);
        let (mu, mv) = eta.eval(u, v, 1)?;
        let d = (mv.deriv(1, 0) - mu.deriv(0, 1)).norm();
        let scale = 1.0 + mu.value().norm() + mv.value().norm();
        field.set(i, j, d / scale);
    }
    Ok(field)
}

/// `‖∂_u η_v − ∂_v η_u + [η_u, η_v]‖` pointwise, scale-relative.
pub fn maurer_cartan_residual(
    eta: &OneForm,
    grid: &crate::grid::ParamGrid,
) -> Result<ResidualField> {
    let mut field = ResidualField::new(grid);
    for (i, j) in grid.indices() {
        let (u, v) = grid.point(i, j);
        let (mu, mv) = eta.eval(u, v, 1)?;
        let a = mu.value();
        let b = mv.value();
        let d = (mv.deriv(1, 0) - mu.deriv(0, 1) + (&a * &b - &b * &a)).norm();
        let scale = 1.0 + a.norm() + b.norm();
        field.set(i, j, d / scale);
    }
    Ok(field)
}
