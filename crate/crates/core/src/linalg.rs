//! One-sided Jacobi SVD and the least-squares helpers built on it.
//!
//! The matrices this crate decomposes are small (≤ 40×20) but routinely
//! carry repeated singular values — wedge bases and indefinite-metric
//! complements come in symmetric pairs — and the Golub–Reinsch
//! implementation in nalgebra 0.33 returns inconsistent factors on such
//! inputs (orthonormal `U`, `V` with `UΣVᵀ ≠ A`). One-sided Jacobi
//! orthogonalises the columns directly, converges unconditionally, and is
//! accurate down to the smallest singular values, which is what the
//! rank-tolerant subspace machinery needs.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct Svd {
    /// Left singular vectors, `m × n`; columns with vanishing singular
    /// value are zero.
    pub u: DMatrix<f64>,
    /// Singular values, descending; one per column of the input.
    pub singular_values: DVector<f64>,
    /// Right singular vectors transposed, `n × n` (always full).
    pub v_t: DMatrix<f64>,
}

/// One-sided Jacobi SVD. Wide inputs are zero-padded to square internally
/// (zero rows are invariant under the column rotations), so the full
/// right-singular basis is available for kernel extraction.
pub fn svd(a: &DMatrix<f64>) -> Svd {
    let (m, n) = (a.nrows(), a.ncols());
    let rows = m.max(n);
    let mut w = DMatrix::zeros(rows, n);
    w.view_mut((0, 0), (m, n)).copy_from(a);
    let mut v = DMatrix::identity(n, n);
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let ap = w.column(p);
                let aq = w.column(q);
                let alpha = ap.dot(&ap);
                let beta = aq.dot(&aq);
                let gamma = ap.dot(&aq);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let rel = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                off = off.max(rel);
                if rel <= eps {
                    continue;
                }
                // Jacobi rotation zeroing the (p, q) column inner product
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if off <= eps {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = DMatrix::zeros(m, n);
    let mut sv = DVector::zeros(n);
    let mut v_sorted = DMatrix::zeros(n, n);
    for (new_idx, &old_idx) in order.iter().enumerate() {
        sv[new_idx] = norms[old_idx];
        if norms[old_idx] > 0.0 {
            for i in 0..m {
                u[(i, new_idx)] = w[(i, old_idx)] / norms[old_idx];
            }
        }
        v_sorted.set_column(new_idx, &v.column(old_idx));
    }
    Svd {
        u,
        singular_values: sv,
        v_t: v_sorted.transpose(),
    }
}

impl Svd {
    /// Minimum-norm least squares solution of `A x = b`; singular values
    /// below `eps` relative to the largest are treated as zero.
    pub fn solve(&self, b: &DVector<f64>, eps: f64) -> DVector<f64> {
        let smax = self.singular_values.max().max(1e-300);
        let n = self.singular_values.len();
        let mut y = DVector::zeros(n);
        for i in 0..n {
            let s = self.singular_values[i];
            if s / smax > eps {
                y[i] = self.u.column(i).dot(b) / s;
            }
        }
        self.v_t.transpose() * y
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.max();
        if smax <= 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s / smax > rel_tol)
            .count()
    }

    /// Euclidean-orthonormal kernel basis: right singular vectors whose
    /// singular value is at or below `rel_tol` relative to the largest.
    pub fn kernel(&self, rel_tol: f64) -> DMatrix<f64> {
        let n = self.v_t.nrows();
        let smax = self.singular_values.max().max(1e-300);
        let cols: Vec<DVector<f64>> = (0..n)
            .filter(|&i| self.singular_values[i] / smax <= rel_tol)
            .map(|i| self.v_t.row(i).transpose())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
}

/// Least squares with residual, `(x, ‖Ax − b‖)`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, eps: f64) -> (DVector<f64>, f64) {
    let dec = svd(a);
    let x = dec.solve(b, eps);
    let res = (a * &x - b).norm();
    (x, res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruction_error(a: &DMatrix<f64>) -> f64 {
        let dec = svd(a);
        let sigma = DMatrix::from_fn(a.ncols(), a.ncols(), |i, j| {
            if i == j {
                dec.singular_values[i]
            } else {
                0.0
            }
        });
        (&dec.u * sigma * &dec.v_t - a).norm()
    }

    #[test]
    fn factors_reconstruct_with_repeated_singular_values() {
        let mut a = DMatrix::zeros(8, 6);
        for i in 0..3 {
            a[(i, i)] = 2.0;
            a[(i + 3, i + 3)] = 2.0;
        }
        a[(6, 0)] = 1.0;
        a[(7, 3)] = 1.0;
        assert!(reconstruction_error(&a) < 1e-12);
    }

    #[test]
    fn rank_deficient_least_squares_is_exact_on_members() {
        let c0 = DVector::from_row_slice(&[1.0, 0.0, 2.0, 0.0, 0.0, 1.0]);
        let c1 = DVector::from_row_slice(&[0.0, 1.0, 3.0, 0.0, 1.0, 0.0]);
        let c2 = &c0 + &c1;
        let a = DMatrix::from_columns(&[c0.clone(), c1.clone(), c2]);
        let b = &c0 * 2.0 - &c1;
        let (x, res) = lstsq(&a, &b, 1e-12);
        assert!(res < 1e-12, "residual {res}");
        assert!((&a * x - b).norm() < 1e-12);
    }

    #[test]
    fn wide_matrices_expose_the_kernel() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let dec = svd(&a);
        let kernel = dec.kernel(1e-12);
        assert_eq!(kernel.ncols(), 2);
        assert!((a * &kernel).norm() < 1e-13);
    }

    #[test]
    fn random_reconstruction_and_orthogonality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (m, n) in [(5, 5), (9, 4), (3, 7), (20, 9)] {
            let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
            assert!(reconstruction_error(&a) < 1e-12 * (1.0 + a.norm()));
            let dec = svd(&a);
            let vvt = &dec.v_t * dec.v_t.transpose();
            assert!((vvt - DMatrix::identity(n, n)).norm() < 1e-12);
        }
    }
}
