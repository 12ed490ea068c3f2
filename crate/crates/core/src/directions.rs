//! Parameter-space direction fields and the quadratic equations that
//! produce them.
//!
//! Asymptotic directions (projective) and curvature directions (Lie
//! sphere) both arise as the roots `(α : β)` of a binary quadratic
//! `A α² + 2B αβ + C β²`. The solver below works over jets, so the roots
//! come back with their own derivative data when the coefficients carry
//! jets; plain numeric use is the degree-0 case of the same code path.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::jet::{Jet2, JetVec};
use crate::subbundle::{nullspace, SubbundleSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realness {
    Real,
    ComplexPair,
}

/// A unit direction in parameter space at a grid point.
#[derive(Debug, Clone)]
pub struct DirectionField {
    pub point: (f64, f64),
    pub direction: (f64, f64),
    pub realness: Realness,
}

/// A direction with jet-valued components, normalised to unit length with
/// the sign fixed by the first non-vanishing component at the base point.
#[derive(Debug, Clone)]
pub struct JetDirection {
    pub alpha: Jet2,
    pub beta: Jet2,
}

impl JetDirection {
    pub fn value(&self) -> (f64, f64) {
        (self.alpha.value(), self.beta.value())
    }

    pub fn to_field(&self, point: (f64, f64)) -> DirectionField {
        DirectionField {
            point,
            direction: self.value(),
            realness: Realness::Real,
        }
    }

    /// Directional derivative of a jet vector along this direction.
    pub fn deriv_of(&self, jv: &JetVec) -> JetVec {
        jv.dir_deriv(&self.alpha, &self.beta)
    }
}

/// Outcome of solving `A α² + 2B αβ + C β² = 0`.
pub enum QuadraticRoots {
    Real(JetDirection, JetDirection),
    /// Discriminant negative at the point; the pair is complex conjugate.
    /// The returned directions are the normalised real and imaginary parts
    /// of one root.
    Complex(DirectionField, DirectionField),
}

fn normalize(alpha: Jet2, beta: Jet2) -> Result<JetDirection> {
    let degree = alpha.degree().min(beta.degree());
    let alpha = alpha.to_degree(degree);
    let beta = beta.to_degree(degree);
    let norm_sq = alpha.mul(&alpha).add(&beta.mul(&beta));
    if norm_sq.value() <= 0.0 {
        return Err(Error::DegenerateQuadratic);
    }
    let inv = norm_sq.sqrt()?.recip()?;
    let mut a = alpha.mul(&inv);
    let mut b = beta.mul(&inv);
    let lead = if a.value().abs() > 1e-12 {
        a.value()
    } else {
        b.value()
    };
    if lead < 0.0 {
        a = a.neg();
        b = b.neg();
    }
    Ok(JetDirection { alpha: a, beta: b })
}

/// Solve the binary quadratic with jet coefficients. Tolerances are
/// relative to the largest coefficient magnitude.
pub fn solve_binary_quadratic(
    a: &Jet2,
    b: &Jet2,
    c: &Jet2,
    point: (f64, f64),
) -> Result<QuadraticRoots> {
    let scale = a.value().abs().max(b.value().abs()).max(c.value().abs());
    if scale < 1e-13 {
        return Err(Error::DegenerateQuadratic);
    }
    let disc = b.mul(b).sub(&a.mul(c));
    let d0 = disc.value();
    if d0 < -1e-12 * scale * scale {
        // complex conjugate roots (−B ± i√(AC−B²)) : A
        let re = DVector::from_row_slice(&[-b.value(), a.value()]);
        let im = DVector::from_row_slice(&[(-d0).sqrt(), 0.0]);
        let nre = re.norm();
        let nim = im.norm();
        return Ok(QuadraticRoots::Complex(
            DirectionField {
                point,
                direction: (re[0] / nre, re[1] / nre),
                realness: Realness::ComplexPair,
            },
            DirectionField {
                point,
                direction: (im[0] / nim, im[1] / nim),
                realness: Realness::ComplexPair,
            },
        ));
    }
    // Numerically stable split: q = −(B + sign(B)·√disc); roots (q, A), (C, q).
    let sqrt_disc = if d0 > 1e-12 * scale * scale {
        disc.sqrt()?
    } else {
        // double root at the point; derivative data of the root is not
        // meaningful here, callers treat this as (near-)umbilic
        Jet2::constant(0.0, disc.degree())
    };
    let sgn = if b.value() >= 0.0 { 1.0 } else { -1.0 };
    let q = b.add(&sqrt_disc.scale(sgn)).neg();

    let r1 = normalize(q.clone(), a.clone())?;
    let r2 = normalize(c.clone(), q)?;
    Ok(QuadraticRoots::Real(r1, r2))
}

/// Asymptotic directions of a projective surface: the roots of
/// `α²·π(σ_uu) + 2αβ·π(σ_uv) + β²·π(σ_vv) = 0` where `π` is the projection
/// onto the line `R⁴ / F⁽¹⁾`.
pub fn asymptotic_directions(
    sigma: &JetVec,
    f1: &SubbundleSample,
    point: (f64, f64),
) -> Result<(DirectionField, DirectionField)> {
    assert_eq!(f1.rank, 3, "asymptotic directions need rank-3 F^(1)");
    // functional vanishing on F^(1): left nullspace of the basis matrix
    let ell = nullspace(&f1.basis_matrix().transpose());
    assert_eq!(ell.ncols(), 1);
    let ell = ell.column(0);
    let a = ell.dot(&sigma.deriv(2, 0));
    let b = ell.dot(&sigma.deriv(1, 1));
    let c = ell.dot(&sigma.deriv(0, 2));
    match solve_binary_quadratic(
        &Jet2::constant(a, 0),
        &Jet2::constant(b, 0),
        &Jet2::constant(c, 0),
        point,
    )? {
        QuadraticRoots::Real(r1, r2) => Ok((r1.to_field(point), r2.to_field(point))),
        QuadraticRoots::Complex(d1, d2) => Ok((d1, d2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::subbundle::{span_with_derivatives, BundleLabel, RANK_TOL};

    fn dirs_for(dsl: &str, u: f64, v: f64) -> Result<(DirectionField, DirectionField)> {
        let s = parse(dsl).unwrap();
        let jets = s.eval_jet(u, v, 3).unwrap();
        let f1 =
            span_with_derivatives(&[jets.clone()], 1, RANK_TOL, (u, v), BundleLabel::F1).unwrap();
        asymptotic_directions(&jets, &f1, (u, v))
    }

    #[test]
    fn quadric_has_coordinate_asymptotic_directions() {
        let (d1, d2) = dirs_for("(1, u, v, u*v)", 0.3, -0.2).unwrap();
        assert_eq!(d1.realness, Realness::Real);
        // roots are ∂u and ∂v in some order
        let along_u = |d: &DirectionField| d.direction.0.abs() > 0.999;
        let along_v = |d: &DirectionField| d.direction.1.abs() > 0.999;
        assert!(
            (along_u(&d1) && along_v(&d2)) || (along_v(&d1) && along_u(&d2)),
            "{:?} {:?}",
            d1.direction,
            d2.direction
        );
    }

    #[test]
    fn elliptic_paraboloid_is_complex() {
        let (d1, _) = dirs_for("(1, u, v, u*u + v*v)", 0.1, 0.4).unwrap();
        assert_eq!(d1.realness, Realness::ComplexPair);
    }

    #[test]
    fn hyperbolic_paraboloid_diagonals() {
        let (d1, d2) = dirs_for("(1, u, v, u*u - v*v)", 0.0, 0.0).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        for d in [&d1, &d2] {
            assert_eq!(d.realness, Realness::Real);
            assert!((d.direction.0.abs() - s).abs() < 1e-12);
            assert!((d.direction.1.abs() - s).abs() < 1e-12);
            // sign convention: first component positive
            assert!(d.direction.0 > 0.0);
        }
        assert!(
            (d1.direction.1 * d2.direction.1) < 0.0,
            "two distinct diagonals"
        );
    }

    #[test]
    fn plane_is_degenerate() {
        assert!(matches!(
            dirs_for("(1, u, v, 0)", 0.0, 0.0),
            Err(Error::DegenerateQuadratic)
        ));
    }

    #[test]
    fn projective_invariance_under_rescaling() {
        // multiply the lift by a positive factor λ(u,v) = exp(u/2)·(1+v²/4)
        let s = parse("(1, u, v, u*v)").unwrap();
        let lam = parse("(exp(u/2)*(1 + v*v/4), u, v)").unwrap().components[0].clone();
        let (u0, v0) = (0.45, -0.8);
        let jets = s.eval_jet(u0, v0, 3).unwrap();
        let scaled = jets.scale_jet(&lam.eval_jet(u0, v0, 3).unwrap());
        let f1 =
            span_with_derivatives(&[jets.clone()], 1, RANK_TOL, (u0, v0), BundleLabel::F1).unwrap();
        let f1s = span_with_derivatives(&[scaled.clone()], 1, RANK_TOL, (u0, v0), BundleLabel::F1)
            .unwrap();
        let (a1, a2) = asymptotic_directions(&jets, &f1, (u0, v0)).unwrap();
        let (b1, b2) = asymptotic_directions(&scaled, &f1s, (u0, v0)).unwrap();
        let diff = |x: &DirectionField, y: &DirectionField| {
            let d = (x.direction.0 - y.direction.0).abs() + (x.direction.1 - y.direction.1).abs();
            let f = (x.direction.0 + y.direction.0).abs() + (x.direction.1 + y.direction.1).abs();
            d.min(f)
        };
        let m = (diff(&a1, &b1) + diff(&a2, &b2)).min(diff(&a1, &b2) + diff(&a2, &b1));
        assert!(m < 1e-10, "direction drift {m}");
    }
}
