//! Conjugate gradients for symmetric positive definite systems.

use super::{axpy, dot, norm};
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub relative_residual: T,
}

/// Solves `A x = b` where `apply(v, out)` writes `A v`. Fails with a
/// degenerate error on nonpositive curvature, which signals that `A` is not
/// positive definite on the Krylov space.
pub fn solve<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    b: &[T],
    rel_tol: T,
    max_iter: usize,
) -> Result<CgOutcome<T>> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![T::zero(); n];
    if bnorm == T::zero() {
        return Ok(CgOutcome { x, iterations: 0, relative_residual: T::zero() });
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![T::zero(); n];
    let mut rr = dot(&r, &r);
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let curv = dot(&p, &ap);
        if curv <= T::zero() {
            return Err(Error::Degenerate(format!("nonpositive curvature {curv} at CG step {it}")));
        }
        let alpha = rr / curv;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let rel = rr_new.sqrt() / bnorm;
        if rel <= rel_tol {
            return Ok(CgOutcome { x, iterations: it, relative_residual: rel });
        }
        let beta = rr_new / rr;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    Err(Error::NonConvergence(format!("CG did not reach {rel_tol} in {max_iter} iterations")))
}
