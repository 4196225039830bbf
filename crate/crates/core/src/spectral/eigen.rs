use crate::error::{Error, Result};
use crate::linalg::lanczos::{self, LanczosConfig};
use crate::linalg::{dense, LinearOperator};
use crate::tolerances;

/// Lowest eigenpairs, ascending, with their residual norms.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub method: &'static str,
}

impl Spectrum {
    pub fn gap(&self) -> f64 {
        self.values[1] - self.values[0]
    }
}

fn residual(op: &(impl LinearOperator<f64> + ?Sized), value: f64, v: &[f64]) -> f64 {
    let mut av = vec![0.0; v.len()];
    op.apply(v, &mut av);
    av.iter().zip(v).map(|(a, x)| (a - value * x).powi(2)).sum::<f64>().sqrt()
}

/// The `count` algebraically smallest eigenpairs; dense at or below
/// `dense_limit`, Lanczos above.
pub fn lowest_eigenpairs_with(
    op: &(impl LinearOperator<f64> + ?Sized),
    count: usize,
    dense_limit: usize,
    seed: u64,
) -> Result<Spectrum> {
    let n = op.dim();
    if count == 0 || count > n {
        return Err(Error::Config(format!("requested {count} eigenpairs of a {n}-dimensional operator")));
    }
    let (values, vectors, method) = if n <= dense_limit {
        let e = dense::sym_eigen(&lanczos::to_dense(op), n, true)?;
        ((0..count).map(|j| e.values[j]).collect::<Vec<_>>(), (0..count).map(|j| e.vector(j).to_vec()).collect::<Vec<_>>(), "dense")
    } else {
        let cfg = LanczosConfig { dense_below: 0, seed, ..Default::default() };
        let e = lanczos::lowest(op, count, &cfg)?;
        (e.values, e.vectors, "lanczos")
    };
    let residuals = values.iter().zip(&vectors).map(|(&e, v)| residual(op, e, v)).collect();
    Ok(Spectrum { values, vectors, residuals, method })
}

pub fn lowest_eigenpairs(op: &(impl LinearOperator<f64> + ?Sized), count: usize) -> Result<Spectrum> {
    lowest_eigenpairs_with(op, count, tolerances::DENSE_LIMIT, 7)
}

/// Eigenvalues only, for scans.
pub fn lowest_values(op: &(impl LinearOperator<f64> + ?Sized), count: usize) -> Result<Vec<f64>> {
    let n = op.dim();
    if n <= tolerances::SCAN_DENSE_LIMIT {
        let e = dense::sym_eigen(&lanczos::to_dense(op), n, false)?;
        Ok(e.values[..count.min(n)].to_vec())
    } else {
        let cfg = LanczosConfig { dense_below: 0, ..Default::default() };
        Ok(lanczos::lowest(op, count, &cfg)?.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_star, Graph, GraphKind};
    use crate::spectral::operator::{build_operator, Couplings, Mode};

    #[test]
    fn single_vertex_closed_form() {
        let g = Graph::new(GraphKind::Generic, 1, []).unwrap();
        let (om, de) = (0.37, 1.3);
        let op = build_operator(&g, Couplings::new(om, de), Mode::Restricted, None).unwrap();
        let s = lowest_eigenpairs(&op.matrix, 2).unwrap();
        let r = (de * de + 4.0 * om * om).sqrt();
        assert!((s.values[0] - (-de - r) / 2.0).abs() < 1e-14);
        assert!((s.gap() - r).abs() < 1e-14);
    }

    #[test]
    fn diagonal_operator_levels() {
        let g = generate_star(2, 2).unwrap();
        let op = build_operator(&g, Couplings::new(0.0, 1.0), Mode::Restricted, None).unwrap();
        let s = lowest_eigenpairs(&op.matrix, 13).unwrap();
        let want = [-3.0, -2.0, -2.0, -2.0, -2.0, -2.0, -2.0, -1.0, -1.0, -1.0, -1.0, -1.0, 0.0];
        for (a, b) in s.values.iter().zip(want) {
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn krylov_matches_dense() {
        let g = generate_star(2, 2).unwrap();
        let op = build_operator(&g, Couplings::new(0.2, 1.0), Mode::Restricted, None).unwrap();
        let d = lowest_eigenpairs_with(&op.matrix, 3, 100, 1).unwrap();
        let k = lowest_eigenpairs_with(&op.matrix, 3, 0, 1).unwrap();
        for i in 0..3 {
            assert!((d.values[i] - k.values[i]).abs() < 1e-10);
            assert!(k.residuals[i] < 1e-9 * op.matrix.norm_bound());
        }
    }
}
