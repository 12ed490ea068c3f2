//! Deformation calculus for surfaces lifted into projective, conformal and
//! Lie sphere geometry.
//!
//! A surface is given as a closed-form immersion `Σ → R^N` (see [`dsl`]),
//! lifted to a line or plane subbundle of a trivial bundle over a parameter
//! grid, and probed for k-th order deformability: does a non-trivial
//! Lie-algebra valued 1-form exist whose gauge primitives deform the lift
//! while agreeing with it to order k pointwise?
//!
//! The crate is organised around the objects of that question:
//!
//! * [`multilinear`] — indefinite inner product spaces, `sl(n)`/`o(p,q)`
//!   elements, wedge squares and the induced algebra action.
//! * [`jet`] — truncated bivariate Taylor arithmetic; the exact derivative
//!   engine behind every differential condition evaluated here.
//! * [`dsl`] — a small expression language for surfaces and their duals.
//! * [`geometry`] — the three lifts and their admissibility structures.
//! * [`deform`] — condition residuals, triviality solves, gauge integration
//!   and direct contact-order probing.
//! * [`bridge`] — the contact lift `P(R^4) → Z ⊂ P(∧²R^6)` and the transfer
//!   of deformation forms along it.
//!
//! All computations are pointwise over an immutable grid; everything is
//! deterministic for a fixed seed.

pub mod bridge;
pub mod deform;
pub mod directions;
pub mod dsl;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod jet;
pub mod linalg;
pub mod multilinear;
pub mod report;
pub mod subbundle;

pub use error::{Error, Result};
