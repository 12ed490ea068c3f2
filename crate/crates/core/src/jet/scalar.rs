use crate::error::{Error, Result};

/// Truncated bivariate Taylor polynomial of total degree ≤ `degree`.
///
/// Coefficient `(a, b)` equals `∂_u^a ∂_v^b f / (a! b!)` of the represented
/// germ at the (implicit) base point. Coefficients are stored in the
/// triangle order `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    degree: usize,
    coeffs: Vec<f64>,
}

#[inline]
fn tri_len(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

#[inline]
fn idx(a: usize, b: usize) -> usize {
    let t = a + b;
    t * (t + 1) / 2 + b
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Jet2 {
    pub fn zero(degree: usize) -> Self {
        Jet2 {
            degree,
            coeffs: vec![0.0; tri_len(degree)],
        }
    }

    pub fn constant(c: f64, degree: usize) -> Self {
        let mut j = Self::zero(degree);
        j.coeffs[0] = c;
        j
    }

    /// The coordinate function `u` as a jet at base point `u0`.
    pub fn variable_u(u0: f64, degree: usize) -> Self {
        let mut j = Self::constant(u0, degree);
        if degree >= 1 {
            j.coeffs[idx(1, 0)] = 1.0;
        }
        j
    }

    /// The coordinate function `v` as a jet at base point `v0`.
    pub fn variable_v(v0: f64, degree: usize) -> Self {
        let mut j = Self::constant(v0, degree);
        if degree >= 1 {
            j.coeffs[idx(0, 1)] = 1.0;
        }
        j
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Taylor coefficient `(a, b)`; zero beyond the stored degree.
    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        if a + b > self.degree {
            0.0
        } else {
            self.coeffs[idx(a, b)]
        }
    }

    pub fn set_coeff(&mut self, a: usize, b: usize, value: f64) {
        assert!(a + b <= self.degree, "coefficient outside jet degree");
        self.coeffs[idx(a, b)] = value;
    }

    /// Value of `∂_u^a ∂_v^b f` at the base point: `a! b!` times the
    /// Taylor coefficient.
    pub fn deriv(&self, a: usize, b: usize) -> f64 {
        self.coeff(a, b) * factorial(a) * factorial(b)
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Truncate or zero-extend to a new degree.
    pub fn to_degree(&self, degree: usize) -> Jet2 {
        let mut out = Jet2::zero(degree);
        for a in 0..=degree.min(self.degree) {
            for b in 0..=(degree.min(self.degree) - a) {
                out.coeffs[idx(a, b)] = self.coeff(a, b);
            }
        }
        out
    }

    /// Jet of `∂f/∂u`, one degree lower.
    pub fn du(&self) -> Jet2 {
        let d = self.degree.saturating_sub(1);
        let mut out = Jet2::zero(d);
        for a in 0..=d {
            for b in 0..=(d - a) {
                out.coeffs[idx(a, b)] = (a as f64 + 1.0) * self.coeff(a + 1, b);
            }
        }
        out
    }

    /// Jet of `∂f/∂v`, one degree lower.
    pub fn dv(&self) -> Jet2 {
        let d = self.degree.saturating_sub(1);
        let mut out = Jet2::zero(d);
        for a in 0..=d {
            for b in 0..=(d - a) {
                out.coeffs[idx(a, b)] = (b as f64 + 1.0) * self.coeff(a, b + 1);
            }
        }
        out
    }

    /// Re-expand the stored polynomial about a shifted base point. Exact
    /// for the polynomial the jet stores (not for the underlying germ).
    pub fn recenter(&self, du: f64, dv: f64) -> Jet2 {
        let d = self.degree;
        let mut out = Jet2::zero(d);
        // coefficient (a,b) about the new point: Σ_{p≥a, q≥b} C(p,a)C(q,b) c_{pq} du^{p−a} dv^{q−b}
        let binom = |n: usize, k: usize| -> f64 {
            let mut r = 1.0;
            for i in 0..k {
                r = r * (n - i) as f64 / (i + 1) as f64;
            }
            r
        };
        for a in 0..=d {
            for b in 0..=(d - a) {
                let mut sum = 0.0;
                for p in a..=d {
                    for q in b..=(d - p) {
                        sum += binom(p, a)
                            * binom(q, b)
                            * self.coeff(p, q)
                            * du.powi((p - a) as i32)
                            * dv.powi((q - b) as i32);
                    }
                }
                out.coeffs[idx(a, b)] = sum;
            }
        }
        out
    }

    /// Evaluate the Taylor polynomial at offset `(du, dv)` from the base
    /// point.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        let mut sum = 0.0;
        for a in 0..=self.degree {
            for b in 0..=(self.degree - a) {
                sum += self.coeff(a, b) * du.powi(a as i32) * dv.powi(b as i32);
            }
        }
        sum
    }

    pub fn add(&self, other: &Jet2) -> Jet2 {
        assert_eq!(self.degree, other.degree, "jet degree mismatch");
        Jet2 {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Jet2) -> Jet2 {
        assert_eq!(self.degree, other.degree, "jet degree mismatch");
        Jet2 {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    pub fn neg(&self) -> Jet2 {
        Jet2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|x| s * x).collect(),
        }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Jet2) -> Jet2 {
        assert_eq!(self.degree, other.degree, "jet degree mismatch");
        let d = self.degree;
        let mut out = Jet2::zero(d);
        for a1 in 0..=d {
            for b1 in 0..=(d - a1) {
                let x = self.coeffs[idx(a1, b1)];
                if x == 0.0 {
                    continue;
                }
                for a2 in 0..=(d - a1 - b1) {
                    for b2 in 0..=(d - a1 - b1 - a2) {
                        let y = other.coeffs[idx(a2, b2)];
                        if y != 0.0 {
                            out.coeffs[idx(a1 + a2, b1 + b2)] += x * y;
                        }
                    }
                }
            }
        }
        out
    }

    /// Compose a univariate function with this jet. `derivs[k]` must hold
    /// `f^{(k)}` evaluated at the jet's constant term, for `k = 0..=degree`.
    fn compose(&self, derivs: &[f64]) -> Jet2 {
        let d = self.degree;
        debug_assert!(derivs.len() > d);
        // p = nilpotent part of self
        let mut p = self.clone();
        p.coeffs[0] = 0.0;
        // Horner evaluation of Σ f^{(k)}/k! · p^k
        let mut result = Jet2::constant(derivs[d] / factorial(d), d);
        for k in (0..d).rev() {
            result = result.mul(&p);
            result.coeffs[0] += derivs[k] / factorial(k);
        }
        result
    }

    pub fn sin(&self) -> Jet2 {
        let x0 = self.value();
        let cycle = [x0.sin(), x0.cos(), -x0.sin(), -x0.cos()];
        let derivs: Vec<f64> = (0..=self.degree).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    pub fn cos(&self) -> Jet2 {
        let x0 = self.value();
        let cycle = [x0.cos(), -x0.sin(), -x0.cos(), x0.sin()];
        let derivs: Vec<f64> = (0..=self.degree).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value().exp();
        let derivs = vec![e; self.degree + 1];
        self.compose(&derivs)
    }

    pub fn sqrt(&self) -> Result<Jet2> {
        let x0 = self.value();
        if x0 <= 0.0 {
            return Err(Error::JetSqrtDomain);
        }
        // f^{(k+1)} = f^{(k)} · (1/2 − k) / x0
        let mut derivs = Vec::with_capacity(self.degree + 1);
        let mut cur = x0.sqrt();
        for k in 0..=self.degree {
            derivs.push(cur);
            cur *= (0.5 - k as f64) / x0;
        }
        Ok(self.compose(&derivs))
    }

    pub fn recip(&self) -> Result<Jet2> {
        let x0 = self.value();
        if x0 == 0.0 {
            return Err(Error::JetDivisionByZero);
        }
        let mut derivs = Vec::with_capacity(self.degree + 1);
        let mut cur = 1.0 / x0;
        for k in 0..=self.degree {
            derivs.push(cur);
            cur *= -((k + 1) as f64) / x0;
        }
        Ok(self.compose(&derivs))
    }

    pub fn div(&self, other: &Jet2) -> Result<Jet2> {
        Ok(self.mul(&other.recip()?))
    }

    /// Integer power by repeated truncated multiplication. Exact for
    /// polynomial jets; negative exponents go through [`Jet2::recip`].
    pub fn powi(&self, n: i64) -> Result<Jet2> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut result = Jet2::constant(1.0, self.degree);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// Max absolute coefficient; a cheap proxy for the size of the germ.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
