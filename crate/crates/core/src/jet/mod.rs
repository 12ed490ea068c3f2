//! Truncated bivariate Taylor arithmetic.
//!
//! A [`Jet2`] stores the Taylor coefficients of a germ `R² → R` at an
//! implicit base point, up to a fixed total degree ≤ 4. Arithmetic on jets
//! is exact truncated series arithmetic, so iterated coordinate derivatives
//! `d_{X_J}σ` extracted from evaluated jets are exact up to rounding — no
//! step-size error enters any differential condition computed from them.
//!
//! [`JetVec`] and [`JetMat`] are vectors and matrices with jet entries;
//! they carry the derivative data of sections and of algebra-valued 1-form
//! coefficients across a grid.

mod matrix;
mod scalar;
mod vector;

pub use matrix::JetMat;
pub use scalar::Jet2;
pub use vector::{iterated_derivative, JetVec};
