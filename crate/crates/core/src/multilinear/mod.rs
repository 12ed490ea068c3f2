//! Linear and multilinear algebra over indefinite inner product spaces.
//!
//! Everything downstream leans on three pieces: ambient spaces `R^{p,q}`
//! with an involutive Gram matrix, elements of `sl(n)` and `o(p,q)` with
//! validated invariants, and the wedge square `∧²V` together with the
//! induced action `A ↦ (v∧w ↦ Av∧w + v∧Aw)` of an algebra element on it.

mod algebra;
mod metric;
mod wedge;

pub use algebra::{bracket, exp_two_step_nilpotent, AlgebraElement, AlgebraKind};
pub use metric::MetricSpace;
pub use wedge::{induced_action, induced_action_element, wedge, WedgeSpace};
