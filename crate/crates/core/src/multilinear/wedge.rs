use nalgebra::{DMatrix, DVector};

use super::{AlgebraElement, AlgebraKind, MetricSpace};
use crate::error::{Error, Result};

/// The wedge square `∧²V` of an `n`-dimensional base space, with basis
/// `e_i ∧ e_j` (`i < j`) in lexicographic order.
///
/// The induced bilinear form comes in two flavours:
///
/// * base space with metric: `⟨v∧w, x∧y⟩ = (v,x)(w,y) − (v,y)(w,x)`,
/// * base `R⁴` without metric: the `SL(4)`-invariant volume pairing
///   `v∧w∧x∧y = ⟨v∧w, x∧y⟩ · e₁∧e₂∧e₃∧e₄`, which has signature (3,3).
#[derive(Debug, Clone)]
pub struct WedgeSpace {
    base: MetricSpace,
    pairs: Vec<(usize, usize)>,
    space: MetricSpace,
}

fn lex_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Sign of the permutation sending `(i,j,k,l)` to `(0,1,2,3)`, or 0 if the
/// indices are not all distinct.
fn perm_sign4(idx: [usize; 4]) -> f64 {
    let mut seen = [false; 4];
    for &i in &idx {
        if i > 3 || seen[i] {
            return 0.0;
        }
        seen[i] = true;
    }
    let mut v = idx;
    let mut sign = 1.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if v[a] > v[b] {
                v.swap(a, b);
                sign = -sign;
            }
        }
    }
    sign
}

impl WedgeSpace {
    /// Wedge square of a metric space, with the induced metric pairing.
    pub fn from_metric(base: MetricSpace) -> Result<Self> {
        let pairs = lex_pairs(base.dimension());
        let m = pairs.len();
        let g = base.gram();
        let induced = DMatrix::from_fn(m, m, |r, c| {
            let (i, j) = pairs[r];
            let (k, l) = pairs[c];
            g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]
        });
        let space = MetricSpace::with_gram(induced)?;
        Ok(WedgeSpace { base, pairs, space })
    }

    /// Wedge square of plain `R⁴` with the volume pairing; signature (3,3).
    pub fn volume_pairing_r4() -> Result<Self> {
        let base = MetricSpace::plain(4);
        let pairs = lex_pairs(4);
        let induced = DMatrix::from_fn(6, 6, |r, c| {
            let (i, j) = pairs[r];
            let (k, l) = pairs[c];
            perm_sign4([i, j, k, l])
        });
        let space = MetricSpace::with_gram(induced)?;
        Ok(WedgeSpace { base, pairs, space })
    }

    pub fn base(&self) -> &MetricSpace {
        &self.base
    }

    pub fn dimension(&self) -> usize {
        self.pairs.len()
    }

    pub fn basis_order(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The wedge square as a metric space in its own right (basis `e_i∧e_j`,
    /// Gram matrix the induced pairing).
    pub fn space(&self) -> &MetricSpace {
        &self.space
    }
}

/// `v ∧ w` with components `v_i w_j − v_j w_i` in lexicographic basis order.
pub fn wedge(v: &DVector<f64>, w: &DVector<f64>, ws: &WedgeSpace) -> Result<DVector<f64>> {
    let n = ws.base.dimension();
    if v.len() != n || w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len().max(w.len()),
        });
    }
    Ok(DVector::from_iterator(
        ws.pairs.len(),
        ws.pairs.iter().map(|&(i, j)| v[i] * w[j] - v[j] * w[i]),
    ))
}

/// The induced action of an algebra element on the wedge square:
/// `φ(A)(v∧w) = Av∧w + v∧Aw`.
///
/// For `A ∈ sl(4)` and the volume pairing this is the isomorphism onto
/// `o(3,3)`; for `A ∈ o(p,q)` and the induced metric pairing the result is
/// skew-adjoint again.
pub fn induced_action(a: &DMatrix<f64>, ws: &WedgeSpace) -> Result<DMatrix<f64>> {
    let n = ws.base.dimension();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.nrows(),
        });
    }
    let m = ws.pairs.len();
    let mut phi = DMatrix::zeros(m, m);
    for (col, &(k, l)) in ws.pairs.iter().enumerate() {
        // φ(A) e_k∧e_l = (A e_k)∧e_l + e_k∧(A e_l)
        for (row, &(i, j)) in ws.pairs.iter().enumerate() {
            // coefficient of e_i∧e_j in (A e_k)∧e_l: A[i,k]·δ_{jl} − A[j,k]·δ_{il}
            let mut c = 0.0;
            if j == l {
                c += a[(i, k)];
            }
            if i == l {
                c -= a[(j, k)];
            }
            if i == k {
                c += a[(j, l)];
            }
            if j == k {
                c -= a[(i, l)];
            }
            phi[(row, col)] = c;
        }
    }
    Ok(phi)
}

/// Convenience: the induced action as a validated [`AlgebraElement`] of the
/// orthogonal algebra of the wedge space.
pub fn induced_action_element(a: &AlgebraElement, ws: &WedgeSpace) -> Result<AlgebraElement> {
    let phi = induced_action(a.matrix(), ws)?;
    AlgebraElement::new(ws.space().clone(), phi, AlgebraKind::Orthogonal)
}
