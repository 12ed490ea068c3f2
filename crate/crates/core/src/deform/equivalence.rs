use nalgebra::DVector;

use super::{chart_condition_tower, invariant_condition_tower, OneForm, RepContext};
use crate::error::Result;
use crate::geometry::LiftedSurface;
use crate::report::ResidualField;

/// Per-order comparison of the chart-based and invariant formulations.
#[derive(Debug, Clone)]
pub struct OrderVerdict {
    pub r: usize,
    pub chart_max: f64,
    pub invariant_max: f64,
    /// Cumulative verdicts: all orders ≤ r pass.
    pub chart_pass: bool,
    pub invariant_pass: bool,
    /// Grid points where the cumulative pointwise verdicts differ.
    pub pointwise_disagreements: usize,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub per_order: Vec<OrderVerdict>,
    pub tol: f64,
    pub skipped_chart_points: usize,
}

impl EquivalenceReport {
    pub fn verdicts_agree(&self) -> bool {
        self.per_order
            .iter()
            .all(|o| o.chart_pass == o.invariant_pass && o.pointwise_disagreements == 0)
    }
}

/// Audit the equivalence `chart conditions for all v₀ ⇔ invariant
/// conditions` through order `r_max`, comparing cumulative verdicts per
/// point at tolerance `tol` on both sides.
pub fn equivalence_audit(
    eta: &OneForm,
    ls: &LiftedSurface,
    r_max: usize,
    v0s: &[DVector<f64>],
    tol: f64,
) -> Result<EquivalenceReport> {
    let ctx = RepContext::new(ls)?;
    let chart_tower = chart_condition_tower(eta, ls, &ctx, v0s, r_max)?;
    let inv_tower = invariant_condition_tower(eta, ls, &ctx, r_max)?;
    let skipped = chart_tower.iter().map(|f| f.skipped).sum();

    let mut per_order = Vec::new();
    let mut chart_cum = ResidualField::new(&ls.grid);
    let mut inv_cum = ResidualField::new(&ls.grid);
    for r in 0..=r_max {
        chart_cum.merge_max(&chart_tower[r]);
        inv_cum.merge_max(&inv_tower[r]);

        let mut disagreements = 0usize;
        for (i, j) in ls.grid.indices() {
            if let (Some(c), Some(iv)) = (chart_cum.get(i, j), inv_cum.get(i, j)) {
                if (c < tol) != (iv < tol) {
                    disagreements += 1;
                }
            }
        }
        per_order.push(OrderVerdict {
            r,
            chart_max: chart_cum.max(),
            invariant_max: inv_cum.max(),
            chart_pass: chart_cum.max() < tol,
            invariant_pass: inv_cum.max() < tol,
            pointwise_disagreements: disagreements,
        });
    }
    Ok(EquivalenceReport {
        per_order,
        tol,
        skipped_chart_points: skipped,
    })
}
