//! The deformability calculus: condition residuals, equivalence audits,
//! triviality solves, gauge integration and contact-order probing.
//!
//! A 1-form `η` is a k-th order infinitesimal deformation of a lift `F`
//! when it satisfies the Maurer–Cartan equation together with, for every
//! `r < k`, either the chart conditions
//! `η(Y) d_{X_J}σ = Σ_{K⊆J} v₀(η(Y) d_{X_K}σ) d_{X_{J∖K}}σ` for all
//! covectors `v₀`, or equivalently the invariant conditions
//! `(d_{X_J}η(Y)) F ≤ F`. Everything here evaluates those conditions as
//! residual fields over the grid and acts on the verdicts: solving for
//! trivialising potentials, integrating `g⁻¹dg = η`, and certifying
//! contact order by defect-ratio probes.

mod audit;
mod equivalence;
mod form;
mod gauge;
mod isothermic;
mod probe;
mod residual;
mod triviality;

pub use audit::{third_order_audit, ChainLink, ThirdOrderAudit};
pub use equivalence::{equivalence_audit, EquivalenceReport, OrderVerdict};
pub use form::{
    algebra_basis, closed_quadric_form, random_algebra_form, sample_theta_form, wedge_matrix_jet,
    CoeffField, OneForm,
};
pub use gauge::{integrate_gauge, GaugeMap};
pub use isothermic::{
    isothermic_form, lie_isothermic_form, lie_wedge_exact_form, sphere_injected_form,
};
pub use probe::{contact_order_probe, ContactProbe};
pub use residual::{
    chart_condition_residual, chart_condition_residual_at, chart_condition_tower, closure_residual,
    covector_set, induced_action_jet, invariant_condition_residual,
    invariant_condition_residual_at, invariant_condition_tower, maurer_cartan_residual, RepContext,
};
pub use triviality::{triviality_solve, TrivialityOutcome};
