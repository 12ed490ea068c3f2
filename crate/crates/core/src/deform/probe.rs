use nalgebra::{DMatrix, DVector};

use super::gauge::integrate_segment;
use super::OneForm;
use crate::error::{Error, Result};
use crate::geometry::{GeometryKind, LiftedSurface};
use crate::multilinear::WedgeSpace;

/// Result of the defect-ratio certification of contact order at a point.
///
/// If the deformed and original lifts agree to order exactly `k` at `p`,
/// the chart difference at parameter offset `h` scales like `h^{k+1}`, so
/// halving `h` divides the defect by `2^{k+1}`.
#[derive(Debug, Clone)]
pub struct ContactProbe {
    pub point: (usize, usize),
    pub h: f64,
    pub defect_coarse: f64,
    pub defect_fine: f64,
    pub ratio: f64,
    /// `log₂(ratio) − 1`.
    pub estimated_order: f64,
    pub target: usize,
    /// ratio within ±15% of `2^{target+1}`.
    pub within_band: bool,
    /// defects at rounding level: agreement to all probed orders.
    pub negligible: bool,
}

/// `Λ²g` acting on the wedge square: `(Λ²g)(v∧w) = gv ∧ gw`.
fn wedge_rep_group(g: &DMatrix<f64>, ws: &WedgeSpace) -> DMatrix<f64> {
    let pairs = ws.basis_order();
    DMatrix::from_fn(pairs.len(), pairs.len(), |row, col| {
        let (i, j) = pairs[row];
        let (k, l) = pairs[col];
        g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]
    })
}

/// Probe the contact order of the deformation generated by `η` at grid
/// point `p`, against target order `k`.
///
/// The probe freezes `g(p)`, so only the relative gauge
/// `Ω(p→q) = g(p)⁻¹g(q)` matters; it is integrated analytically along the
/// probe segments (left translation invariance of the defect).
pub fn contact_order_probe(
    ls: &LiftedSurface,
    eta: &OneForm,
    p: (usize, usize),
    k: usize,
) -> Result<ContactProbe> {
    if !ls.grid.is_interior(p.0, p.1) {
        return Err(Error::Other("probe point must be interior".into()));
    }
    let wedge = match ls.spec.kind {
        GeometryKind::LieSphere33 | GeometryKind::LieSphere42 => {
            Some(WedgeSpace::from_metric(ls.spec.space.clone())?)
        }
        _ => None,
    };
    let rep_value = |u: f64, v: f64| -> Result<DVector<f64>> {
        match &wedge {
            None => Ok(ls.section.eval(u, v, 0)?.value()),
            Some(ws) => {
                let s = ls.section.eval(u, v, 0)?.value();
                let t = ls
                    .section_tilde
                    .as_ref()
                    .expect("legendre lift has a second section")
                    .eval(u, v, 0)?
                    .value();
                Ok(DVector::from_iterator(
                    ws.basis_order().len(),
                    ws.basis_order()
                        .iter()
                        .map(|&(i, j)| s[i] * t[j] - s[j] * t[i]),
                ))
            }
        }
    };

    let (u0, v0) = ls.grid.point(p.0, p.1);
    let sigma_p = rep_value(u0, v0)?;
    // chart covector: the canonical dual with the largest pairing at p
    let v0_idx = sigma_p.iamax();
    let chart = |w: &DVector<f64>| -> Result<DVector<f64>> {
        let t = w[v0_idx];
        if t.abs() < 1e-9 * w.norm() {
            return Err(Error::Other("chart invalid along probe segment".into()));
        }
        Ok(w / t)
    };

    let n_eta = eta.space.dimension();
    let identity = DMatrix::identity(n_eta, n_eta);
    let dirs = [
        (1.0, 0.0),
        (0.0, 1.0),
        (
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
        ),
        (
            std::f64::consts::FRAC_1_SQRT_2,
            -std::f64::consts::FRAC_1_SQRT_2,
        ),
    ];
    let h = 0.04f64.min(0.8 * ls.grid.hu().min(ls.grid.hv()));

    let defect_at = |hh: f64| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (du, dv) in dirs {
            let q = (u0 + hh * du, v0 + hh * dv);
            let omega = integrate_segment(eta, &identity, (u0, v0), q)?;
            let omega_rep = match &wedge {
                None => omega,
                Some(ws) => wedge_rep_group(&omega, ws),
            };
            let sigma_q = rep_value(q.0, q.1)?;
            let s = chart(&sigma_q)?;
            let s_hat = chart(&(omega_rep * &sigma_q))?;
            worst = worst.max((s_hat - &s).norm() / (1.0 + s.norm()));
        }
        Ok(worst)
    };

    let defect_coarse = defect_at(h)?;
    let defect_fine = defect_at(h / 2.0)?;
    let negligible = defect_coarse < 1e-12;
    let ratio = if negligible {
        f64::INFINITY
    } else {
        defect_coarse / defect_fine.max(1e-300)
    };
    let estimated_order = if negligible {
        f64::INFINITY
    } else {
        ratio.log2() - 1.0
    };
    let target_ratio = 2f64.powi(k as i32 + 1);
    let within_band = negligible || ((ratio - target_ratio).abs() <= 0.15 * target_ratio);
    Ok(ContactProbe {
        point: p,
        h,
        defect_coarse,
        defect_fine,
        ratio,
        estimated_order,
        target: k,
        within_band,
        negligible,
    })
}
