//! Symmetric tridiagonal eigenproblems by Sturm-sequence bisection and
//! inverse iteration.

use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    /// `off[i]` couples sites `i` and `i + 1`.
    pub off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { T::zero() }
                + if i + 1 < n { self.off[i].abs() } else { T::zero() };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.len() {
            let e2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { T::zero() };
            q = self.diag[i] - x - if i > 0 { e2 / q } else { T::zero() };
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to roundoff.
    pub fn eigenvalue(&self, k: usize) -> T {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.bounds();
        let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
        let pad = scale * T::epsilon() * T::lit(4.0);
        lo = lo - pad;
        hi = hi + pad;
        for _ in 0..400 {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= T::lit(2.0) * T::epsilon() * scale {
                break;
            }
        }
        lo + (hi - lo) / T::lit(2.0)
    }

    pub fn lowest(&self, k: usize) -> Vec<T> {
        (0..k.min(self.len())).map(|i| self.eigenvalue(i)).collect()
    }

    /// Normalized eigenvector for eigenvalue `lambda` by inverse iteration,
    /// orthogonalized against `against` (vectors of nearby eigenvalues).
    pub fn eigenvector(&self, lambda: T, against: &[Vec<T>]) -> Vec<T> {
        let n = self.len();
        if n == 1 {
            return vec![T::one()];
        }
        let (lo, hi) = self.bounds();
        let scale = lo.abs().max(hi.abs()).max(T::one());
        let shift = lambda + scale * T::epsilon() * T::lit(8.0);
        let mut x: Vec<T> = (0..n).map(|i| T::one() + T::lit(0.01) * T::from_usize(i % 7).unwrap()).collect();
        for _ in 0..4 {
            for a in against {
                let c = super::dot(a, &x);
                super::axpy(-c, a, &mut x);
            }
            super::normalize(&mut x);
            x = self.solve_shifted(shift, &x);
        }
        for a in against {
            let c = super::dot(a, &x);
            super::axpy(-c, a, &mut x);
        }
        super::normalize(&mut x);
        // Fix the sign so the largest component is positive.
        let big = x.iter().copied().fold(T::zero(), |m, v| if v.abs() > m.abs() { v } else { m });
        if big < T::zero() {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    /// Solves `(T − σ) y = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, sigma: T, b: &[T]) -> Vec<T> {
        let n = self.len();
        let tiny = T::min_positive_value().sqrt();
        // Bands of the LU factors: main, first and second superdiagonal.
        let mut d: Vec<T> = self.diag.iter().map(|&v| v - sigma).collect();
        let mut du: Vec<T> = self.off.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut dl: Vec<T> = self.off.clone();
        let mut y = b.to_vec();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == T::zero() {
                    d[i] = tiny;
                }
                let m = dl[i] / d[i];
                dl[i] = m;
                d[i + 1] -= m * du[i];
                y[i + 1] = y[i + 1] - m * y[i];
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = m;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - m * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du[i + 1];
                }
                y.swap(i, i + 1);
                y[i + 1] = y[i + 1] - m * y[i];
            }
        }
        if d[n - 1] == T::zero() {
            d[n - 1] = tiny;
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        x
    }

    pub fn to_dense(&self) -> Vec<T> {
        let n = self.len();
        let mut a = vec![T::zero(); n * n];
        for i in 0..n {
            a[i * n + i] = self.diag[i];
            if i + 1 < n {
                a[i * n + i + 1] = self.off[i];
                a[(i + 1) * n + i] = self.off[i];
            }
        }
        a
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::sym_eigen;

    #[test]
    fn uniform_chain_closed_form() {
        let n = 12;
        let t = SymTridiagonal::new(vec![0.0; n], vec![-1.0; n - 1]);
        for k in 0..n {
            let want = -2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_dense_and_vectors_are_eigenvectors() {
        let diag: Vec<f64> = (0..20).map(|i| -0.7 * i as f64).collect();
        let off: Vec<f64> = (1..20).map(|b| -(b as f64).sqrt() * 1.3).collect();
        let t = SymTridiagonal::new(diag, off);
        let dense = sym_eigen(&t.to_dense(), 20, false).unwrap();
        let mut prev: Vec<Vec<f64>> = Vec::new();
        for k in 0..20 {
            let lam = t.eigenvalue(k);
            assert!((lam - dense.values[k]).abs() < 1e-12, "k={k}");
            if k < 3 {
                let v = t.eigenvector(lam, &prev);
                let tv = t.apply(&v);
                let res: f64 = tv.iter().zip(&v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
                assert!(res < 1e-10, "residual {res}");
                prev.push(v);
            }
        }
    }

    #[test]
    fn pivoting_path() {
        // Zero diagonal forces row swaps in the shifted solve.
        let t: SymTridiagonal<f64> = SymTridiagonal::new(vec![0.0; 4], vec![1.0, 2.0, 1.0]);
        let lam = t.eigenvalue(0);
        let v = t.eigenvector(lam, &[]);
        let tv = t.apply(&v);
        for i in 0..4 {
            assert!((tv[i] - lam * v[i]).abs() < 1e-10);
        }
    }
}
