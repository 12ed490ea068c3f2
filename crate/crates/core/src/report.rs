//! Residual fields and the machine-readable deformation report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grid::ParamGrid;

/// A per-grid-point scalar residual; `None` marks skipped points (invalid
/// chart, flagged geometry).
#[derive(Debug, Clone)]
pub struct ResidualField {
    pub grid: ParamGrid,
    pub values: Vec<Option<f64>>,
    pub skipped: usize,
}

impl ResidualField {
    pub fn new(grid: &ParamGrid) -> Self {
        ResidualField {
            grid: grid.clone(),
            values: vec![None; grid.len()],
            skipped: 0,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let idx = self.grid.index(i, j);
        self.values[idx] = Some(match self.values[idx] {
            Some(old) => old.max(value),
            None => value,
        });
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[self.grid.index(i, j)]
    }

    /// Pointwise max with another field over the same grid.
    pub fn merge_max(&mut self, other: &ResidualField) {
        assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a = match (*a, *b) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (Some(x), None) => Some(x),
                (None, y) => y,
            };
        }
        self.skipped += other.skipped;
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().fold(0.0f64, |m, &v| m.max(v))
    }

    pub fn mean(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for v in self.values.iter().flatten() {
            sum += v;
            n += 1;
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    pub fn argmax_point(&self) -> (f64, f64) {
        let mut best = (0.0, 0.0);
        let mut best_v = -1.0;
        for (i, j) in self.grid.indices() {
            if let Some(v) = self.get(i, j) {
                if v > best_v {
                    best_v = v;
                    best = self.grid.point(i, j);
                }
            }
        }
        best
    }

    /// Fraction of evaluated points below `tol`.
    pub fn pass_fraction(&self, tol: f64) -> f64 {
        let mut pass = 0usize;
        let mut n = 0usize;
        for v in self.values.iter().flatten() {
            n += 1;
            if *v < tol {
                pass += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            pass as f64 / n as f64
        }
    }

    pub fn summary(&self) -> ResidualSummary {
        ResidualSummary {
            max: self.max(),
            mean: self.mean(),
            argmax_point: self.argmax_point(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max: f64,
    pub mean: f64,
    pub argmax_point: (f64, f64),
}

/// The structured outcome of a deformability run; the CLI wraps this with
/// the echoed configuration and serialises it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformationReport {
    pub report_version: u32,
    pub geometry: String,
    /// Verdict per named check (`order_0`, `order_1`, …, `closure`,
    /// `maurer_cartan`, `triviality`, …): pass ⇔ every residual involved
    /// stayed under its tolerance.
    pub verdicts: BTreeMap<String, bool>,
    pub residuals: BTreeMap<String, ResidualSummary>,
    pub tolerances: BTreeMap<String, f64>,
    pub flagged_points: Vec<(f64, f64)>,
    /// Outcome of the triviality solve (`trivial` / `non_trivial`), kept
    /// apart from the pass/fail verdicts: a non-trivial deformation is a
    /// finding, not a failure.
    pub triviality: Option<String>,
    /// Provenance of the tested form.
    pub eta_source: String,
    pub notes: Vec<String>,
}

impl DeformationReport {
    pub fn new(geometry: &str, eta_source: &str) -> Self {
        DeformationReport {
            report_version: 1,
            geometry: geometry.into(),
            verdicts: BTreeMap::new(),
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            flagged_points: Vec::new(),
            triviality: None,
            eta_source: eta_source.into(),
            notes: Vec::new(),
        }
    }

    /// Record a residual with its tolerance and derived verdict.
    pub fn record(&mut self, name: &str, field: &ResidualField, tol: f64) {
        self.residuals.insert(name.into(), field.summary());
        self.tolerances.insert(name.into(), tol);
        self.verdicts.insert(name.into(), field.max() < tol);
    }

    pub fn record_scalar(&mut self, name: &str, value: f64, tol: f64, pass: bool) {
        self.record_info(name, value);
        self.tolerances.insert(name.into(), tol);
        self.verdicts.insert(name.into(), pass);
    }

    /// Record a residual with no verdict attached (informational only).
    pub fn record_info(&mut self, name: &str, value: f64) {
        self.residuals.insert(
            name.into(),
            ResidualSummary {
                max: value,
                mean: value,
                argmax_point: (0.0, 0.0),
            },
        );
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }
}
