use nalgebra::DVector;

use super::Jet2;
use crate::error::{Error, Result};
use crate::multilinear::MetricSpace;

/// A vector-valued jet: one [`Jet2`] per ambient coordinate, all sharing
/// degree and base point.
#[derive(Debug, Clone)]
pub struct JetVec {
    comps: Vec<Jet2>,
}

impl JetVec {
    pub fn new(comps: Vec<Jet2>) -> Self {
        assert!(!comps.is_empty());
        let d = comps[0].degree();
        assert!(comps.iter().all(|c| c.degree() == d), "mixed jet degrees");
        JetVec { comps }
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        JetVec {
            comps: vec![Jet2::zero(degree); dim],
        }
    }

    pub fn from_constant(v: &DVector<f64>, degree: usize) -> Self {
        JetVec {
            comps: v.iter().map(|&c| Jet2::constant(c, degree)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn degree(&self) -> usize {
        self.comps[0].degree()
    }

    pub fn comp(&self, i: usize) -> &Jet2 {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[Jet2] {
        &self.comps
    }

    pub fn map<F: Fn(&Jet2) -> Jet2>(&self, f: F) -> JetVec {
        JetVec {
            comps: self.comps.iter().map(f).collect(),
        }
    }

    /// Point value as a numeric vector.
    pub fn value(&self) -> DVector<f64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(|c| c.value()))
    }

    /// Value of `∂_u^a ∂_v^b σ` at the base point.
    pub fn deriv(&self, a: usize, b: usize) -> DVector<f64> {
        DVector::from_iterator(self.comps.len(), self.comps.iter().map(|c| c.deriv(a, b)))
    }

    pub fn du(&self) -> JetVec {
        self.map(|c| c.du())
    }

    pub fn dv(&self) -> JetVec {
        self.map(|c| c.dv())
    }

    pub fn to_degree(&self, degree: usize) -> JetVec {
        self.map(|c| c.to_degree(degree))
    }

    pub fn add(&self, other: &JetVec) -> JetVec {
        assert_eq!(self.dim(), other.dim());
        JetVec {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &JetVec) -> JetVec {
        assert_eq!(self.dim(), other.dim());
        JetVec {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// Multiply every component by a scalar jet.
    pub fn scale_jet(&self, s: &Jet2) -> JetVec {
        self.map(|c| c.mul(s))
    }

    pub fn scale(&self, s: f64) -> JetVec {
        self.map(|c| c.scale(s))
    }

    /// Directional derivative along a jet-valued direction field
    /// `Y = α ∂u + β ∂v`; drops the degree by one.
    pub fn dir_deriv(&self, alpha: &Jet2, beta: &Jet2) -> JetVec {
        let d = self.degree().saturating_sub(1);
        self.du()
            .scale_jet(&alpha.to_degree(d))
            .add(&self.dv().scale_jet(&beta.to_degree(d)))
    }

    /// Pairing `(σ, τ)` under a metric, as a jet.
    pub fn inner(&self, other: &JetVec, space: &MetricSpace) -> Jet2 {
        assert_eq!(self.dim(), space.dimension());
        assert_eq!(other.dim(), space.dimension());
        let g = space.gram();
        let mut sum = Jet2::zero(self.degree().min(other.degree()));
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                let gij = g[(i, j)];
                if gij != 0.0 {
                    sum = sum.add(
                        &self.comps[i]
                            .to_degree(sum.degree())
                            .mul(&other.comps[j].to_degree(sum.degree()))
                            .scale(gij),
                    );
                }
            }
        }
        sum
    }

    /// Evaluate every component's Taylor polynomial at an offset.
    pub fn eval_offset(&self, du: f64, dv: f64) -> DVector<f64> {
        DVector::from_iterator(
            self.comps.len(),
            self.comps.iter().map(|c| c.eval_offset(du, dv)),
        )
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs_coeff()))
    }
}

/// Iterated coordinate derivative `d_{X_J}σ` for a multiset `J` containing
/// `a` copies of `∂u` and `b` copies of `∂v`. The order of `J` is
/// irrelevant because coordinate fields commute.
pub fn iterated_derivative(jv: &JetVec, a: usize, b: usize) -> Result<DVector<f64>> {
    if a + b > jv.degree() {
        return Err(Error::JetDegree {
            degree: jv.degree(),
            order: a + b,
        });
    }
    Ok(jv.deriv(a, b))
}
