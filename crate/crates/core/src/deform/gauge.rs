use nalgebra::DMatrix;

use super::{maurer_cartan_residual, OneForm};
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::multilinear::AlgebraKind;

/// A group-valued map on the grid: the integrated gauge `g` with
/// `g⁻¹dg = η`, its base data, and the integration diagnostics.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    pub grid: ParamGrid,
    pub mats: Vec<DMatrix<f64>>,
    pub base: (usize, usize),
    pub g0: DMatrix<f64>,
    /// Max over nodes of `‖g_cols→rows − g_rows→cols‖`; small iff the
    /// Maurer–Cartan equation holds (Frobenius integrability).
    pub path_defect: f64,
    /// Number of steps at which the group-membership drift exceeded `1e-8`
    /// and the matrix was re-projected.
    pub corrections: usize,
    /// For periodic directions: `max ‖g(start)⁻¹·g(end) − id‖` across the
    /// transverse lines. Integration happens on the universal-cover strip;
    /// a non-trivial monodromy means the deformation does not close up
    /// around the period, and is reported rather than resolved.
    pub monodromy_u: Option<f64>,
    pub monodromy_v: Option<f64>,
}

impl GaugeMap {
    pub fn at(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.mats[self.grid.index(i, j)]
    }
}

/// Target integration substep length; keeps the classical 4th-order
/// one-step error near 1e-12 per unit parameter length for O(1) forms.
const SUBSTEP: f64 = 0.005;

fn rk4_segment(
    eta: &OneForm,
    mut g: DMatrix<f64>,
    from: (f64, f64),
    to: (f64, f64),
) -> Result<DMatrix<f64>> {
    let (du, dv) = (to.0 - from.0, to.1 - from.1);
    let len = (du * du + dv * dv).sqrt();
    if len == 0.0 {
        return Ok(g);
    }
    let steps = (len / SUBSTEP).ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    // dg/dt = g · A(t) with A(t) = du·η_u + dv·η_v along the straight segment
    let a_at = |t: f64| -> Result<DMatrix<f64>> {
        let (u, v) = (from.0 + t * du, from.1 + t * dv);
        let (mu, mv) = eta.values(u, v)?;
        Ok(mu * du + mv * dv)
    };
    for s in 0..steps {
        let t0 = s as f64 * h;
        let a1 = a_at(t0)?;
        let a2 = a_at(t0 + h / 2.0)?;
        let a4 = a_at(t0 + h)?;
        let k1 = &g * &a1;
        let k2 = (&g + &k1 * (h / 2.0)) * &a2;
        let k3 = (&g + &k2 * (h / 2.0)) * &a2;
        let k4 = (&g + &k3 * h) * &a4;
        g += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(g)
}

fn group_drift(g: &DMatrix<f64>, eta: &OneForm) -> f64 {
    match eta.kind {
        AlgebraKind::SpecialLinear => (g.determinant() - 1.0).abs(),
        AlgebraKind::Orthogonal => {
            let gram = eta.space.gram();
            (g.transpose() * gram * g - gram).norm()
        }
    }
}

fn project_to_group(g: &DMatrix<f64>, eta: &OneForm) -> DMatrix<f64> {
    match eta.kind {
        AlgebraKind::SpecialLinear => {
            let det = g.determinant();
            if det <= 0.0 {
                return g.clone();
            }
            let n = g.nrows() as f64;
            g / det.powf(1.0 / n)
        }
        AlgebraKind::Orthogonal => {
            // Newton step for gᵀ·Gram·g = Gram (Gram involutive)
            let gram = eta.space.gram();
            let mut m = g.clone();
            for _ in 0..3 {
                let inv_t = match m.clone().try_inverse() {
                    Some(inv) => inv.transpose(),
                    None => return m,
                };
                m = (&m + gram * inv_t * gram) * 0.5;
            }
            m
        }
    }
}

/// Integrate `g⁻¹dg = η` over the grid from `g(base) = g0`.
///
/// Rows are integrated from a base column (itself integrated from the base
/// point); a second sweep with the opposite nesting measures the
/// path-independence defect. Requires the Maurer–Cartan residual of `η` to
/// be below `1e-6` on the grid.
pub fn integrate_gauge(
    eta: &OneForm,
    grid: &ParamGrid,
    g0: &DMatrix<f64>,
    base: (usize, usize),
) -> Result<GaugeMap> {
    let mc = maurer_cartan_residual(eta, grid)?.max();
    if mc > 1e-6 {
        return Err(Error::FormRejected {
            reason: "gauge integration requires the Maurer-Cartan equation".into(),
            residual: mc,
        });
    }
    let sweep = |col_first: bool| -> Result<Vec<DMatrix<f64>>> {
        let mut mats: Vec<Option<DMatrix<f64>>> = vec![None; grid.len()];
        mats[grid.index(base.0, base.1)] = Some(g0.clone());
        let (bi, bj) = base;
        // base column (varying j at i = bi) or base row (varying i at j = bj),
        // then sweep the cross direction from each base-line node
        if col_first {
            for j in (bj + 1)..grid.nv {
                let prev = mats[grid.index(bi, j - 1)].clone().unwrap();
                mats[grid.index(bi, j)] = Some(rk4_segment(
                    eta,
                    prev,
                    grid.point(bi, j - 1),
                    grid.point(bi, j),
                )?);
            }
            for j in (0..bj).rev() {
                let prev = mats[grid.index(bi, j + 1)].clone().unwrap();
                mats[grid.index(bi, j)] = Some(rk4_segment(
                    eta,
                    prev,
                    grid.point(bi, j + 1),
                    grid.point(bi, j),
                )?);
            }
            for j in 0..grid.nv {
                for i in (bi + 1)..grid.nu {
                    let prev = mats[grid.index(i - 1, j)].clone().unwrap();
                    mats[grid.index(i, j)] = Some(rk4_segment(
                        eta,
                        prev,
                        grid.point(i - 1, j),
                        grid.point(i, j),
                    )?);
                }
                for i in (0..bi).rev() {
                    let prev = mats[grid.index(i + 1, j)].clone().unwrap();
                    mats[grid.index(i, j)] = Some(rk4_segment(
                        eta,
                        prev,
                        grid.point(i + 1, j),
                        grid.point(i, j),
                    )?);
                }
            }
        } else {
            for i in (bi + 1)..grid.nu {
                let prev = mats[grid.index(i - 1, bj)].clone().unwrap();
                mats[grid.index(i, bj)] = Some(rk4_segment(
                    eta,
                    prev,
                    grid.point(i - 1, bj),
                    grid.point(i, bj),
                )?);
            }
            for i in (0..bi).rev() {
                let prev = mats[grid.index(i + 1, bj)].clone().unwrap();
                mats[grid.index(i, bj)] = Some(rk4_segment(
                    eta,
                    prev,
                    grid.point(i + 1, bj),
                    grid.point(i, bj),
                )?);
            }
            for i in 0..grid.nu {
                for j in (bj + 1)..grid.nv {
                    let prev = mats[grid.index(i, j - 1)].clone().unwrap();
                    mats[grid.index(i, j)] = Some(rk4_segment(
                        eta,
                        prev,
                        grid.point(i, j - 1),
                        grid.point(i, j),
                    )?);
                }
                for j in (0..bj).rev() {
                    let prev = mats[grid.index(i, j + 1)].clone().unwrap();
                    mats[grid.index(i, j)] = Some(rk4_segment(
                        eta,
                        prev,
                        grid.point(i, j + 1),
                        grid.point(i, j),
                    )?);
                }
            }
        }
        Ok(mats.into_iter().map(|m| m.unwrap()).collect())
    };

    let mut mats = sweep(true)?;
    let alt = sweep(false)?;
    let mut path_defect: f64 = 0.0;
    for (a, b) in mats.iter().zip(&alt) {
        path_defect = path_defect.max((a - b).norm());
    }

    let mut corrections = 0usize;
    for g in mats.iter_mut() {
        let drift = group_drift(g, eta);
        if drift > 1e-8 {
            if drift > 1e-2 {
                return Err(Error::GaugeDrift { drift });
            }
            *g = project_to_group(g, eta);
            corrections += 1;
        }
    }

    let id = DMatrix::identity(g0.nrows(), g0.ncols());
    let monodromy_u = grid.periodic_u.then(|| {
        (0..grid.nv).fold(0.0f64, |m, j| {
            let start = &mats[grid.index(0, j)];
            let end = &mats[grid.index(grid.nu - 1, j)];
            match start.clone().try_inverse() {
                Some(inv) => m.max((inv * end - &id).norm()),
                None => f64::INFINITY,
            }
        })
    });
    let monodromy_v = grid.periodic_v.then(|| {
        (0..grid.nu).fold(0.0f64, |m, i| {
            let start = &mats[grid.index(i, 0)];
            let end = &mats[grid.index(i, grid.nv - 1)];
            match start.clone().try_inverse() {
                Some(inv) => m.max((inv * end - &id).norm()),
                None => f64::INFINITY,
            }
        })
    });

    Ok(GaugeMap {
        grid: grid.clone(),
        mats,
        base,
        g0: g0.clone(),
        path_defect,
        corrections,
        monodromy_u,
        monodromy_v,
    })
}

/// Integrate from `g_from` at `from` to the parameter point `to` along the
/// straight segment; used by the contact-order probe to leave the grid.
pub fn integrate_segment(
    eta: &OneForm,
    g_from: &DMatrix<f64>,
    from: (f64, f64),
    to: (f64, f64),
) -> Result<DMatrix<f64>> {
    rk4_segment(eta, g_from.clone(), from, to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet2, JetMat};
    use crate::multilinear::MetricSpace;

    fn constant_form(a: DMatrix<f64>) -> OneForm {
        OneForm::from_fn(
            MetricSpace::plain(4),
            AlgebraKind::SpecialLinear,
            "const",
            move |_, _, d| {
                let m = JetMat::from_fn(4, 4, |i, j| Jet2::constant(a[(i, j)], d));
                Ok((m.clone(), JetMat::zero(4, 4, d)))
            },
        )
    }

    #[test]
    fn zero_form_integrates_to_constant() {
        let grid = ParamGrid::new((0.0, 1.0), (0.0, 1.0), 8, 8, false, false).unwrap();
        let eta = OneForm::zero(MetricSpace::plain(4), AlgebraKind::SpecialLinear);
        let g0 = DMatrix::identity(4, 4);
        let gauge = integrate_gauge(&eta, &grid, &g0, (0, 0)).unwrap();
        for m in &gauge.mats {
            assert!((m - &g0).norm() < 1e-15);
        }
        assert_eq!(gauge.corrections, 0);
    }

    #[test]
    fn constant_u_form_matches_matrix_exponential() {
        let mut a = DMatrix::zeros(4, 4);
        a[(0, 1)] = 0.8;
        a[(1, 0)] = -0.3;
        a[(2, 3)] = 0.5;
        a[(3, 2)] = 0.1;
        a[(0, 0)] = 0.2;
        a[(1, 1)] = -0.2;
        let grid = ParamGrid::new((0.0, 1.0), (0.0, 1.0), 9, 8, false, false).unwrap();
        let eta = constant_form(a.clone());
        let g0 = DMatrix::identity(4, 4);
        let gauge = integrate_gauge(&eta, &grid, &g0, (0, 0)).unwrap();
        // g(u, v) = exp(u·A): compare against a scaled-and-squared series
        let expm = |m: &DMatrix<f64>| {
            let mut s = DMatrix::identity(4, 4);
            let mut term = DMatrix::identity(4, 4);
            for k in 1..24 {
                term = &term * m / (k as f64);
                s += &term;
            }
            s
        };
        for i in 0..grid.nu {
            let u = grid.u(i);
            let expected = expm(&(&a * u));
            let got = gauge.at(i, 4);
            assert!(
                (got - &expected).norm() < 1e-9,
                "u = {u}: error {}",
                (got - &expected).norm()
            );
        }
        assert!(gauge.path_defect < 1e-9);
    }

    #[test]
    fn non_integrable_form_rejected() {
        // η_u = v·A, η_v = 0 violates Maurer–Cartan for A ≠ 0
        let mut a = DMatrix::zeros(4, 4);
        a[(0, 1)] = 1.0;
        let eta = OneForm::from_fn(
            MetricSpace::plain(4),
            AlgebraKind::SpecialLinear,
            "sheared",
            move |_, v, d| {
                let jv = Jet2::variable_v(v, d);
                let m = JetMat::from_fn(4, 4, |i, j| {
                    if (i, j) == (0, 1) {
                        jv.clone()
                    } else {
                        Jet2::zero(d)
                    }
                });
                Ok((m, JetMat::zero(4, 4, d)))
            },
        );
        let grid = ParamGrid::new((0.0, 1.0), (0.0, 1.0), 8, 8, false, false).unwrap();
        assert!(matches!(
            integrate_gauge(&eta, &grid, &DMatrix::identity(4, 4), (0, 0)),
            Err(Error::FormRejected { .. })
        ));
    }
}
