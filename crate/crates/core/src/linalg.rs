//! Householder QR with column pivoting, sized for the small dense designs
//! (a dozen columns or so) the engine fits thousands of times.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

/// Relative pivot threshold below which a column counts as linearly
/// dependent on the columns pivoted before it. Columns are normalised to
/// unit length first, so the threshold is scale free.
pub(crate) const RANK_TOL: f64 = 1e-10;

pub(crate) struct Qr {
    n: usize,
    m: usize,
    /// Column-major n x m; R on and above the diagonal, Householder
    /// vectors (implicit leading 1) below it.
    a: Vec<f64>,
    tau: Vec<f64>,
    perm: Vec<usize>,
    scale: Vec<f64>,
}

fn col_norm(col: &[f64]) -> f64 {
    sqrt(col.iter().map(|v| v * v).sum())
}

impl Qr {
    /// Factors a column-major `n x m` matrix. On rank deficiency returns
    /// the original index of the first dependent column.
    pub(crate) fn factor(mut a: Vec<f64>, n: usize, m: usize) -> Result<Self, usize> {
        debug_assert_eq!(a.len(), n * m);
        if m > n {
            return Err(n);
        }
        let mut scale = vec![0.0; m];
        for j in 0..m {
            let col = &mut a[j * n..(j + 1) * n];
            let s = col_norm(col);
            if !(s > 0.0) || !s.is_finite() {
                return Err(j);
            }
            scale[j] = s;
            col.iter_mut().for_each(|v| *v /= s);
        }

        let mut perm: Vec<usize> = (0..m).collect();
        let mut tau = vec![0.0; m];
        let mut r00 = 0.0;

        for k in 0..m {
            // pivot: largest remaining column norm below row k
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..m {
                let nrm = col_norm(&a[j * n + k..(j + 1) * n]);
                if nrm > best_norm {
                    best_norm = nrm;
                    best = j;
                }
            }
            if best != k {
                for i in 0..n {
                    a.swap(k * n + i, best * n + i);
                }
                perm.swap(k, best);
            }
            if k == 0 {
                r00 = best_norm;
            }
            if !(best_norm > RANK_TOL * r00) {
                return Err(perm[k]);
            }

            let x0 = a[k * n + k];
            let beta = if x0 >= 0.0 { -best_norm } else { best_norm };
            let t = (beta - x0) / beta;
            let inv = 1.0 / (x0 - beta);
            for i in k + 1..n {
                a[k * n + i] *= inv;
            }
            a[k * n + k] = beta;
            tau[k] = t;

            for j in k + 1..m {
                let mut w = a[j * n + k];
                for i in k + 1..n {
                    w += a[k * n + i] * a[j * n + i];
                }
                w *= t;
                a[j * n + k] -= w;
                for i in k + 1..n {
                    a[j * n + i] -= w * a[k * n + i];
                }
            }
        }

        Ok(Qr {
            n,
            m,
            a,
            tau,
            perm,
            scale,
        })
    }

    fn apply_reflector(&self, k: usize, b: &mut [f64]) {
        let n = self.n;
        let v = &self.a[k * n..(k + 1) * n];
        let mut w = b[k];
        for i in k + 1..n {
            w += v[i] * b[i];
        }
        w *= self.tau[k];
        b[k] -= w;
        for i in k + 1..n {
            b[i] -= w * v[i];
        }
    }

    /// Least-squares coefficients for `rhs`, in the original column order
    /// and scale.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut b = rhs.to_vec();
        for k in 0..m {
            self.apply_reflector(k, &mut b);
        }
        let mut x = vec![0.0; m];
        for k in (0..m).rev() {
            let mut s = b[k];
            for j in k + 1..m {
                s -= self.a[j * n + k] * x[j];
            }
            x[k] = s / self.a[k * n + k];
        }
        let mut coef = vec![0.0; m];
        for k in 0..m {
            let orig = self.perm[k];
            coef[orig] = x[k] / self.scale[orig];
        }
        coef
    }

    /// Diagonal of the hat matrix `X (X'X)^-1 X'`, i.e. the squared row
    /// norms of the thin Q factor.
    pub(crate) fn hat_diagonal(&self) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut h = vec![0.0; n];
        let mut q = vec![0.0; n];
        for k in 0..m {
            q.iter_mut().for_each(|v| *v = 0.0);
            q[k] = 1.0;
            for r in (0..m).rev() {
                self.apply_reflector(r, &mut q);
            }
            for i in 0..n {
                h[i] += q[i] * q[i];
            }
        }
        h
    }
}
