use super::{invariant_condition_residual, maurer_cartan_residual, OneForm, RepContext};
use crate::error::Result;
use crate::geometry::{GeometryKind, LiftedSurface};

/// One link of the third-order derivation chain: a named residual, raw and
/// relative to `‖η‖`.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub name: &'static str,
    pub raw: f64,
    pub relative: f64,
}

/// The third-order rigidity audit: the second-order preconditions, the
/// order-2 condition itself, and the facts it forces, evaluated as a
/// residual chain. For a non-zero admissible form the first failing link
/// pinpoints where third-order contact breaks down.
#[derive(Debug, Clone)]
pub struct ThirdOrderAudit {
    pub links: Vec<ChainLink>,
    pub eta_norm: f64,
    pub first_failing: Option<&'static str>,
    /// Max relative residual over the third-order links (the headline
    /// rigidity witness; > tolerance for every non-zero admissible form).
    pub ratio: f64,
    /// All links pass at `tol` — true only for η = 0 on the surfaces
    /// treated here.
    pub passes: bool,
}

/// Evaluate the third-order chain for `η` on `ls` at tolerance `tol`
/// (links compare their relative residual against `tol`).
pub fn third_order_audit(eta: &OneForm, ls: &LiftedSurface, tol: f64) -> Result<ThirdOrderAudit> {
    let ctx = RepContext::new(ls)?;
    let eta_norm = eta.max_norm(&ls.grid)?;
    let denom = eta_norm.max(1e-300);
    let mut links: Vec<ChainLink> = Vec::new();

    let push = |links: &mut Vec<ChainLink>, name: &'static str, raw: f64| {
        links.push(ChainLink {
            name,
            raw,
            relative: raw / denom,
        });
    };

    // (0) second-order admissibility: orders r ≤ 1 plus integrability;
    // these residuals are already scale-relative, record them verbatim
    let pre = invariant_condition_residual(eta, ls, &ctx, 2)?.max();
    links.push(ChainLink {
        name: "order_2_admissibility",
        raw: pre,
        relative: pre,
    });
    let mc = maurer_cartan_residual(eta, &ls.grid)?.max();
    links.push(ChainLink {
        name: "maurer_cartan",
        raw: mc,
        relative: mc,
    });

    // (i) the order-2 condition (d_{X₁X₂}η(Y))F ≤ F, raw
    let mut third_raw: f64 = 0.0;
    for ((i, j), data) in ls.interior_ok() {
        let p = ls.grid.point(i, j);
        let (mu, mv) = eta.eval(p.0, p.1, 2)?;
        let sigma = ctx.section(data).value();
        for m in [ctx.form_matrix(&mu), ctx.form_matrix(&mv)] {
            for (a, b) in [(2usize, 0usize), (1, 1), (0, 2)] {
                let d_mat = m.deriv(a, b);
                third_raw = third_raw.max(ctx.membership_raw(&(&d_mat * &sigma), data));
            }
        }
    }
    push(&mut links, "third_order_condition", third_raw);

    // (ii) forced intermediate facts, per geometry
    match ls.spec.kind {
        GeometryKind::Projective => {
            // v₀(η(X)d_Yσ) = 0 forces η F⁽¹⁾ = 0
            let mut raw: f64 = 0.0;
            for ((i, j), data) in ls.interior_ok() {
                let p = ls.grid.point(i, j);
                let (mu, mv) = eta.values(p.0, p.1)?;
                for m in [&mu, &mv] {
                    for b in &data.f1.basis {
                        raw = raw.max((m * b).norm());
                    }
                }
            }
            push(&mut links, "eta_kills_f1", raw);
        }
        GeometryKind::Conformal => {
            let mut d_raw: f64 = 0.0;
            let mut f1_raw: f64 = 0.0;
            for ((i, j), data) in ls.interior_ok() {
                let p = ls.grid.point(i, j);
                let (mu, mv) = eta.eval(p.0, p.1, 1)?;
                let sigma = data.sigma.value();
                for m in [&mu, &mv] {
                    for (a, b) in [(1usize, 0usize), (0, 1)] {
                        d_raw = d_raw.max((m.deriv(a, b) * &sigma).norm());
                    }
                    for bvec in &data.f1.basis {
                        f1_raw = f1_raw.max((m.value() * bvec).norm());
                    }
                }
            }
            push(&mut links, "deriv_eta_kills_f", d_raw);
            push(&mut links, "eta_kills_f1", f1_raw);
        }
        GeometryKind::LieSphere33 | GeometryKind::LieSphere42 => {
            let space = &ls.spec.space;
            let mut d_raw: f64 = 0.0;
            let mut perp_raw: f64 = 0.0;
            for ((i, j), data) in ls.interior_ok() {
                let p = ls.grid.point(i, j);
                let (mu, mv) = eta.eval(p.0, p.1, 1)?;
                let sigma = data.sigma.value();
                let sigma_t = data
                    .sigma_tilde
                    .as_ref()
                    .expect("legendre point data")
                    .value();
                let f_mat = nalgebra::DMatrix::from_columns(&[sigma.clone(), sigma_t.clone()]);
                let fperp = crate::subbundle::metric_orthogonal_complement(&f_mat, space);
                for m in [&mu, &mv] {
                    for (a, b) in [(1usize, 0usize), (0, 1)] {
                        let d_mat = m.deriv(a, b);
                        d_raw = d_raw.max((&d_mat * &sigma).norm());
                        d_raw = d_raw.max((&d_mat * &sigma_t).norm());
                    }
                    for z in fperp.column_iter() {
                        perp_raw = perp_raw.max((m.value() * z.into_owned()).norm());
                    }
                }
            }
            push(&mut links, "deriv_eta_kills_f", d_raw);
            push(&mut links, "eta_kills_fperp", perp_raw);
        }
    }

    push(&mut links, "eta_norm", eta_norm);

    let first_failing = links.iter().find(|l| l.relative > tol).map(|l| l.name);
    let ratio = links
        .iter()
        .filter(|l| {
            l.name != "eta_norm" && l.name != "order_2_admissibility" && l.name != "maurer_cartan"
        })
        .fold(0.0f64, |m, l| m.max(l.relative));
    let passes = links.iter().all(|l| l.raw < tol);
    Ok(ThirdOrderAudit {
        links,
        eta_norm,
        first_failing,
        ratio,
        passes,
    })
}
