use super::ast::{BinOp, Expr, Func, SurfaceExpr};
use crate::error::{Error, Result};
use crate::jet::{Jet2, JetVec};

impl Expr {
    /// Evaluate to a jet at base point `(u, v)`.
    pub fn eval_jet(&self, u: f64, v: f64, degree: usize) -> Result<Jet2> {
        match self {
            Expr::Num(x) => Ok(Jet2::constant(*x, degree)),
            Expr::U => Ok(Jet2::variable_u(u, degree)),
            Expr::V => Ok(Jet2::variable_v(v, degree)),
            Expr::Bin(op, l, r) => {
                let a = l.eval_jet(u, v, degree)?;
                let b = r.eval_jet(u, v, degree)?;
                match op {
                    BinOp::Add => Ok(a.add(&b)),
                    BinOp::Sub => Ok(a.sub(&b)),
                    BinOp::Mul => Ok(a.mul(&b)),
                    BinOp::Div => a
                        .div(&b)
                        .map_err(|_| self.domain_error(u, v, "division by zero")),
                }
            }
            Expr::Pow(b, n) => {
                let base = b.eval_jet(u, v, degree)?;
                base.powi(*n)
                    .map_err(|_| self.domain_error(u, v, "zero base with negative exponent"))
            }
            Expr::Call(func, arg) => {
                let a = arg.eval_jet(u, v, degree)?;
                match func {
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Exp => Ok(a.exp()),
                    Func::Sqrt => a
                        .sqrt()
                        .map_err(|_| self.domain_error(u, v, "sqrt of non-positive value")),
                    Func::Neg => Ok(a.neg()),
                }
            }
            Expr::Neg(inner) => Ok(inner.eval_jet(u, v, degree)?.neg()),
        }
    }

    /// Plain value; degree-0 jet evaluation.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.eval_jet(u, v, 0)?.value())
    }

    fn domain_error(&self, u: f64, v: f64, reason: &'static str) -> Error {
        Error::EvalDomain {
            subtree: self.to_string(),
            u,
            v,
            reason,
        }
    }
}

impl SurfaceExpr {
    /// Evaluate all components to a vector-valued jet at `(u, v)`.
    pub fn eval_jet(&self, u: f64, v: f64, degree: usize) -> Result<JetVec> {
        let comps = self
            .components
            .iter()
            .map(|c| c.eval_jet(u, v, degree))
            .collect::<Result<Vec<_>>>()?;
        Ok(JetVec::new(comps))
    }
}
