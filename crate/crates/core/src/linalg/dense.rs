//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit QL with Wilkinson-style shifts.

use crate::error::{Error, Result};
use crate::real::Real;

/// Eigenvalues in ascending order; eigenvector `j` is `vectors[j*n..(j+1)*n]`.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub n: usize,
    pub values: Vec<T>,
    pub vectors: Option<Vec<T>>,
}

impl<T: Real> Eigen<T> {
    pub fn vector(&self, j: usize) -> &[T] {
        let v = self.vectors.as_ref().expect("eigenvectors were not requested");
        &v[j * self.n..(j + 1) * self.n]
    }
}

/// Diagonalizes the row-major symmetric matrix `a` (only symmetry of the
/// input is assumed, not checked).
pub fn sym_eigen<T: Real>(a: &[T], n: usize, want_vectors: bool) -> Result<Eigen<T>> {
    assert_eq!(a.len(), n * n, "matrix size");
    if n == 0 {
        return Ok(Eigen { n, values: vec![], vectors: want_vectors.then(Vec::new) });
    }
    let mut v: Vec<T> = a.to_vec();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e, n, want_vectors);
    tql2(&mut v, &mut d, &mut e, n, want_vectors)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = vec![T::zero(); n * n];
        for (j, &src) in order.iter().enumerate() {
            for i in 0..n {
                out[j * n + i] = v[i * n + src];
            }
        }
        out
    });
    Ok(Eigen { n, values, vectors })
}

/// Householder reduction to tridiagonal form (diagonal `d`, subdiagonal
/// `e[1..]`). With `accumulate` the orthogonal transform is left in `v`.
fn tred2<T: Real>(v: &mut [T], d: &mut [T], e: &mut [T], n: usize, accumulate: bool) {
    let idx = |r: usize, c: usize| r * n + c;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
                v[idx(j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let t = f * e[k] + g * d[k];
                    v[idx(k, j)] -= t;
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    if !accumulate {
        for j in 0..n {
            d[j] = v[idx(j, j)];
        }
        e[0] = T::zero();
        return;
    }
    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    let t = g * d[k];
                    v[idx(k, j)] -= t;
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = T::zero();
    }
    v[idx(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicit QL on the tridiagonal `(d, e)`, rotating `v` when requested.
fn tql2<T: Real>(v: &mut [T], d: &mut [T], e: &mut [T], n: usize, vectors: bool) -> Result<()> {
    let idx = |r: usize, c: usize| r * n + c;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::NonConvergence("QL iteration exceeded 100 sweeps".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            let hk = v[idx(k, i + 1)];
                            v[idx(k, i + 1)] = s * v[idx(k, i)] + c * hk;
                            v[idx(k, i)] = c * v[idx(k, i)] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x = next();
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    #[test]
    fn agrees_with_nalgebra() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4), (40, 5)] {
            let a = sample(n, seed);
            let ours = sym_eigen(&a, n, true).unwrap();
            let m = nalgebra::DMatrix::from_row_slice(n, n, &a);
            let mut want: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            want.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (x, y) in ours.values.iter().zip(&want) {
                assert!((x - y).abs() < 1e-12, "n={n}: {x} vs {y}");
            }
            let vals_only = sym_eigen(&a, n, false).unwrap();
            for (x, y) in vals_only.values.iter().zip(&want) {
                assert!((x - y).abs() < 1e-12);
            }
            for j in 0..n {
                let v = ours.vector(j);
                for i in 0..n {
                    let av: f64 = (0..n).map(|k| a[i * n + k] * v[k]).sum();
                    assert!((av - ours.values[j] * v[i]).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn single_precision() {
        let a: Vec<f32> = vec![2.0, 1.0, 1.0, 2.0];
        let e = sym_eigen(&a, 2, true).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-6);
        assert!((e.values[1] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_spectrum() {
        let n = 6;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = if i < 3 { 1.0 } else { 2.0 };
        }
        let e = sym_eigen(&a, n, true).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
    }
}
