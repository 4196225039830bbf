//! Lowest eigenpairs of a large symmetric operator: thick-restart Lanczos
//! with full reorthogonalization.

use super::{axpy, dense, dot, normalize, LinearOperator};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng;
use crate::tolerances;

#[derive(Clone, Debug)]
pub struct LanczosConfig {
    /// Residual target relative to the estimated operator norm.
    pub tol: f64,
    /// Krylov basis size before a restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Operators at or below this dimension are diagonalized densely.
    pub dense_below: usize,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tol: tolerances::EIGEN_RESIDUAL,
            max_basis: 96,
            max_restarts: 400,
            dense_below: 256,
            seed: 0x1a2c_205,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KrylovEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
    /// `‖A u − θ u‖` for each returned pair.
    pub residuals: Vec<T>,
    pub matvecs: usize,
}

/// Materializes `a` column by column.
pub fn to_dense<T: Real, A: LinearOperator<T> + ?Sized>(a: &A) -> Vec<T> {
    let n = a.dim();
    let mut out = vec![T::zero(); n * n];
    let mut e = vec![T::zero(); n];
    let mut col = vec![T::zero(); n];
    for j in 0..n {
        e[j] = T::one();
        a.apply(&e, &mut col);
        e[j] = T::zero();
        for i in 0..n {
            out[i * n + j] = col[i];
        }
    }
    out
}

fn canonical_sign<T: Real>(v: &mut [T]) {
    let big = v.iter().copied().fold(T::zero(), |m, x| if x.abs() > m.abs() { x } else { m });
    if big < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn random_unit<T: Real>(n: usize, r: &mut rng::Stream, against: &[Vec<T>]) -> Vec<T> {
    let mut v: Vec<T> = (0..n).map(|_| T::lit(rng::uniform(r) - 0.5)).collect();
    for _ in 0..2 {
        for b in against {
            let c = dot(b, &v);
            axpy(-c, b, &mut v);
        }
    }
    normalize(&mut v);
    v
}

/// The `k` lowest eigenpairs of `a`, ascending.
pub fn lowest<T: Real, A: LinearOperator<T> + ?Sized>(a: &A, k: usize, cfg: &LanczosConfig) -> Result<KrylovEigen<T>> {
    let n = a.dim();
    if k == 0 || k > n {
        return Err(Error::Config(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    if n <= cfg.dense_below.max(k + 2) {
        let e = dense::sym_eigen(&to_dense(a), n, true)?;
        let mut vectors: Vec<Vec<T>> = (0..k).map(|j| e.vector(j).to_vec()).collect();
        vectors.iter_mut().for_each(|v| canonical_sign(v));
        return Ok(KrylovEigen { values: e.values[..k].to_vec(), vectors, residuals: vec![T::zero(); k], matvecs: n });
    }

    let m_max = cfg.max_basis.max(k + 12).min(n);
    let keep = (k + 6).max(m_max / 3).min(m_max - 4);
    let mut r = rng::stream(cfg.seed, 0);
    let mut basis: Vec<Vec<T>> = vec![random_unit(n, &mut r, &[])];
    let mut proj = vec![T::zero(); m_max * m_max];
    let mut w = vec![T::zero(); n];
    let mut matvecs = 0;
    let mut anorm = T::zero();
    let tol = T::lit(cfg.tol);

    for _restart in 0..=cfg.max_restarts {
        let beta_last;
        let mut resid_dir: Option<Vec<T>> = None;
        let mut j = basis.len() - 1;
        loop {
            a.apply(&basis[j], &mut w);
            matvecs += 1;
            let mut h = vec![T::zero(); j + 1];
            for _pass in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(b, &w);
                    axpy(-c, b, &mut w);
                    h[i] += c;
                }
            }
            for (i, &hi) in h.iter().enumerate() {
                proj[i * m_max + j] = hi;
                proj[j * m_max + i] = hi;
            }
            anorm = anorm.max(h[j].abs());
            let beta = super::norm(&w);
            if j + 1 == m_max || basis.len() == n {
                beta_last = beta;
                if beta > T::zero() {
                    let mut d = w.clone();
                    normalize(&mut d);
                    resid_dir = Some(d);
                }
                break;
            }
            let next = if beta <= T::lit(1e-13) * anorm.max(T::one()) {
                // Invariant subspace: continue with a fresh direction.
                random_unit(n, &mut r, &basis)
            } else {
                w.iter().map(|&x| x / beta).collect()
            };
            basis.push(next);
            j += 1;
        }

        let m = basis.len();
        let mut small = vec![T::zero(); m * m];
        for i in 0..m {
            for l in 0..m {
                small[i * m + l] = proj[i * m_max + l];
            }
        }
        let e = dense::sym_eigen(&small, m, true)?;
        for &t in &e.values {
            anorm = anorm.max(t.abs());
        }
        let res: Vec<T> = (0..m).map(|i| (beta_last * e.vector(i)[m - 1]).abs()).collect();
        let scale = anorm.max(T::one());
        let converged = res[..k].iter().all(|&x| x <= tol * scale) || m == n;
        if converged {
            let mut vectors = Vec::with_capacity(k);
            for i in 0..k {
                let y = e.vector(i);
                let mut u = vec![T::zero(); n];
                for (l, b) in basis.iter().enumerate() {
                    axpy(y[l], b, &mut u);
                }
                normalize(&mut u);
                canonical_sign(&mut u);
                vectors.push(u);
            }
            return Ok(KrylovEigen { values: e.values[..k].to_vec(), vectors, residuals: res[..k].to_vec(), matvecs });
        }

        // Thick restart: keep the lowest Ritz vectors plus the residual direction.
        let mut kept: Vec<Vec<T>> = Vec::with_capacity(keep + 1);
        for i in 0..keep {
            let y = e.vector(i);
            let mut u = vec![T::zero(); n];
            for (l, b) in basis.iter().enumerate() {
                axpy(y[l], b, &mut u);
            }
            normalize(&mut u);
            kept.push(u);
        }
        proj.iter_mut().for_each(|x| *x = T::zero());
        for i in 0..keep {
            proj[i * m_max + i] = e.values[i];
            let c = beta_last * e.vector(i)[m - 1];
            proj[i * m_max + keep] = c;
            proj[keep * m_max + i] = c;
        }
        let d = match resid_dir {
            Some(d) => d,
            None => random_unit(n, &mut r, &kept),
        };
        kept.push(d);
        basis = kept;
    }
    Err(Error::NonConvergence(format!(
        "Lanczos did not reach residual {} within {} restarts",
        cfg.tol, cfg.max_restarts
    )))
}
