//! Linear algebra kernels, generic over the scalar type.

pub mod cg;
pub mod dense;
pub mod lanczos;
pub mod tridiag;

use crate::real::Real;

/// A symmetric operator known only through its action on vectors.
pub trait LinearOperator<T: Real> {
    fn dim(&self) -> usize;
    /// `y ← A x`.
    fn apply(&self, x: &[T], y: &mut [T]);
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Square matrix from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, T)>) -> Self {
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<T> = Vec::with_capacity(trip.len());
        let mut last = None;
        for (r, c, v) in trip {
            assert!(r < n && c < n, "entry ({r},{c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            ptr[r + 1] += ptr[r];
        }
        CsrMatrix { n, ptr, cols, vals }
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        CsrMatrix { n, ptr: (0..=n).collect(), cols: (0..n).collect(), vals: d.to_vec() }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.ptr[r]..self.ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let s = &self.cols[self.ptr[r]..self.ptr[r + 1]];
        match s.binary_search(&c) {
            Ok(k) => self.vals[self.ptr[r] + k],
            Err(_) => T::zero(),
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.n * self.n];
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                a[r * self.n + c] += v;
            }
        }
        a
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> T {
        (0..self.n).map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<T>()).fold(T::zero(), T::max)
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.n).all(|r| self.row(r).all(|(c, v)| (self.get(c, r) - v).abs() <= tol))
    }

    /// `Σ_i coeff_i · M_i` over matrices of equal size.
    pub fn linear_combination(terms: &[(T, &CsrMatrix<T>)]) -> Self {
        let n = terms.first().map_or(0, |t| t.1.n);
        let mut trip = Vec::with_capacity(terms.iter().map(|t| t.1.nnz()).sum());
        for &(a, m) in terms {
            assert_eq!(m.n, n, "dimension mismatch");
            if a == T::zero() {
                continue;
            }
            for r in 0..n {
                for (c, v) in m.row(r) {
                    trip.push((r, c, a * v));
                }
            }
        }
        Self::from_triplets(n, trip)
    }

    /// Principal submatrix on the given (sorted or unsorted) index set.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &r) in idx.iter().enumerate() {
            pos[r] = i;
        }
        let mut trip = Vec::new();
        for (i, &r) in idx.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    trip.push((i, pos[c], v));
                }
            }
        }
        Self::from_triplets(idx.len(), trip)
    }

    /// `⟨x, A y⟩`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        (0..self.n).map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<T>()).sum()
    }
}

impl<T: Real> LinearOperator<T> for CsrMatrix<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        for r in 0..self.n {
            let mut s = T::zero();
            for k in self.ptr[r]..self.ptr[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[r] = s;
        }
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y ← y + a x`.
pub fn axpy<T: Real>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn normalize<T: Real>(a: &mut [T]) -> T {
    let s = norm(a);
    if s > T::zero() {
        for v in a.iter_mut() {
            *v /= s;
        }
    }
    s
}
