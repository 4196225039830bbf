//! Term-by-term assembly of the annealing Hamiltonians
//! `H = −δ n̂ + U·violations − Ω X + λ (D − H_se)` on a basis.

use serde::{Deserialize, Serialize};

use super::basis::{Basis, BasisKind};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::landscape::{exchange_moves, Config};
use crate::linalg::{CsrMatrix, LinearOperator};
use crate::tolerances;

/// Coefficients of the generators, all in the same energy unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub omega: f64,
    pub delta: f64,
    #[serde(default)]
    pub lambda: f64,
    /// Blockade penalty `U`, penalty mode only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<f64>,
}

impl Couplings {
    pub fn new(omega: f64, delta: f64) -> Self {
        Couplings { omega, delta, lambda: 0.0, penalty: None }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// The individual generators on a fixed basis.
#[derive(Clone, Debug)]
pub struct Terms {
    pub basis: Basis,
    /// `|z|` per basis state.
    pub size: Vec<f64>,
    /// Occupied edges per basis state (nonzero only in penalty mode).
    pub violations: Vec<f64>,
    /// Free vertices (`H_fv` diagonal).
    pub free: Vec<f64>,
    /// Number of valid spin exchanges (diagonal of the configuration-graph degree).
    pub exchange_degree: Vec<f64>,
    /// `Σ_u σ^x_u` restricted to the basis.
    pub flip: CsrMatrix<f64>,
    /// Spin-exchange adjacency `H_se`.
    pub exchange: CsrMatrix<f64>,
}

fn symmetrized(basis: &Basis, neighbors: impl Fn(Config, &mut Vec<Config>)) -> Result<CsrMatrix<f64>> {
    let mut trip = Vec::new();
    let mut buf = Vec::new();
    for i in 0..basis.dim() {
        buf.clear();
        neighbors(basis.state(i), &mut buf);
        for &y in &buf {
            let (j, _) = basis
                .locate(y)
                .ok_or_else(|| Error::Config(format!("configuration {y:#x} lies outside the basis")))?;
            // ⟨m'|T|m⟩ = √(N_m/N_m') Σ_{z' ∈ O_m'} T_{z' z_m}
            trip.push((j, i, (basis.orbit(i) / basis.orbit(j)).sqrt()));
        }
        if trip.len() > tolerances::NNZ_LIMIT {
            return Err(Error::Capacity(format!("operator exceeds {} nonzeros", tolerances::NNZ_LIMIT)));
        }
    }
    Ok(CsrMatrix::from_triplets(basis.dim(), trip))
}

impl Terms {
    pub fn new(g: &Graph, basis: Basis) -> Result<Self> {
        if basis.vertices() != g.n() {
            return Err(Error::Config("basis and graph disagree on the vertex count".into()));
        }
        let masks = g.neighbor_masks()?;
        let n = g.n();
        let penalty = basis.kind() == BasisKind::Penalty;
        let dim = basis.dim();
        let mut size = Vec::with_capacity(dim);
        let mut violations = Vec::with_capacity(dim);
        let mut free = Vec::with_capacity(dim);
        let mut exchange_degree = Vec::with_capacity(dim);
        for &z in basis.states() {
            size.push(z.count_ones() as f64);
            violations.push(g.edges().iter().filter(|&&(u, v)| z >> u & 1 == 1 && z >> v & 1 == 1).count() as f64);
            free.push((0..n).filter(|&u| z >> u & 1 == 0 && masks[u] & z == 0).count() as f64);
            let independent = !penalty || g.is_independent(z);
            exchange_degree.push(if independent { exchange_moves(z, &masks, g).count() as f64 } else { 0.0 });
        }

        let flip = if basis.manifold().is_some() {
            CsrMatrix::from_triplets(dim, Vec::new())
        } else {
            symmetrized(&basis, |z, out| {
                for u in 0..n {
                    let y = z ^ (1u128 << u);
                    if penalty || z >> u & 1 == 1 || masks[u] & z == 0 {
                        out.push(y);
                    }
                }
            })?
        };
        let exchange = symmetrized(&basis, |z, out| {
            if penalty && !g.is_independent(z) {
                return;
            }
            for (u, v) in exchange_moves(z, &masks, g) {
                out.push(z ^ (1u128 << u) ^ (1u128 << v));
            }
        })?;
        Ok(Terms { basis, size, violations, free, exchange_degree, flip, exchange })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Matrix-free Hamiltonian for the given couplings.
    pub fn hamiltonian(&self, c: Couplings) -> Result<Hamiltonian<'_>> {
        let u = match (self.basis.kind(), c.penalty) {
            (BasisKind::Penalty, Some(u)) => u,
            (BasisKind::Penalty, None) => return Err(Error::Config("penalty mode needs a blockade penalty U".into())),
            (_, _) => 0.0,
        };
        if self.basis.kind() == BasisKind::Penalty && c.lambda != 0.0 {
            return Err(Error::Config("the delocalizer is defined on the restricted space only".into()));
        }
        let diag = (0..self.dim())
            .map(|i| -c.delta * self.size[i] + u * self.violations[i] + c.lambda * self.exchange_degree[i])
            .collect();
        Ok(Hamiltonian { terms: self, diag, omega: c.omega, lambda: c.lambda })
    }

    /// Assembled sparse matrix for the given couplings.
    pub fn assemble(&self, c: Couplings) -> Result<CsrMatrix<f64>> {
        let h = self.hamiltonian(c)?;
        let d = CsrMatrix::diagonal(&h.diag);
        Ok(CsrMatrix::linear_combination(&[(1.0, &d), (-c.omega, &self.flip), (-c.lambda, &self.exchange)]))
    }

    /// Delocalizer `H_ℓ = D − H_se`.
    pub fn laplacian(&self) -> CsrMatrix<f64> {
        let d = CsrMatrix::diagonal(&self.exchange_degree);
        CsrMatrix::linear_combination(&[(1.0, &d), (-1.0, &self.exchange)])
    }

    /// Second-order effective Hamiltonian on manifold `b`, in units of
    /// `Ω²/δ`: `−(H_se + b − H_fv)` restricted to the manifold's states.
    pub fn second_order_block(&self, b: usize) -> (Vec<usize>, CsrMatrix<f64>) {
        let idx = self.basis.manifold_indices(b);
        let se = self.exchange.submatrix(&idx);
        let diag: Vec<f64> = idx.iter().map(|&i| -(self.size[i] - self.free[i])).collect();
        let m = CsrMatrix::linear_combination(&[(1.0, &CsrMatrix::diagonal(&diag)), (-1.0, &se)]);
        (idx, m)
    }
}

/// `H` applied without assembling the sum of the terms.
pub struct Hamiltonian<'a> {
    terms: &'a Terms,
    diag: Vec<f64>,
    omega: f64,
    lambda: f64,
}

impl Hamiltonian<'_> {
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }
}

impl LinearOperator<f64> for Hamiltonian<'_> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let t = self.terms;
        let (flip, ex) = (&t.flip, &t.exchange);
        for r in 0..self.diag.len() {
            let mut s = self.diag[r] * x[r];
            let mut f = 0.0;
            for (c, v) in flip.row(r) {
                f += v * x[c];
            }
            s -= self.omega * f;
            if self.lambda != 0.0 {
                let mut e = 0.0;
                for (c, v) in ex.row(r) {
                    e += v * x[c];
                }
                s -= self.lambda * e;
            }
            y[r] = s;
        }
    }
}

/// Construction mode of [`build_operator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Restricted,
    Penalty,
    /// Restricted space of a star graph, reduced to the branch-symmetric sector.
    StarSymmetric,
}

/// A basis, its generators, the couplings and the assembled matrix.
#[derive(Clone, Debug)]
pub struct OperatorHandle {
    pub terms: Terms,
    pub couplings: Couplings,
    pub matrix: CsrMatrix<f64>,
}

impl OperatorHandle {
    pub fn dim(&self) -> usize {
        self.terms.dim()
    }

    pub fn basis(&self) -> &Basis {
        &self.terms.basis
    }
}

pub fn build_terms(g: &Graph, mode: Mode, manifold: Option<usize>) -> Result<Terms> {
    let basis = match mode {
        Mode::Restricted => Basis::restricted(g, manifold)?,
        Mode::Penalty => Basis::penalty(g, manifold)?,
        Mode::StarSymmetric => Basis::for_graph(g, true, manifold)?,
    };
    Terms::new(g, basis)
}

pub fn build_operator(g: &Graph, couplings: Couplings, mode: Mode, manifold: Option<usize>) -> Result<OperatorHandle> {
    if mode == Mode::Penalty && couplings.penalty.is_none() {
        return Err(Error::Config("penalty mode needs a blockade penalty U".into()));
    }
    let terms = build_terms(g, mode, manifold)?;
    let matrix = terms.assemble(couplings)?;
    Ok(OperatorHandle { terms, couplings, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_star, generate_unit_disk, GraphKind};
    use crate::linalg::dense::sym_eigen;

    #[test]
    fn single_vertex() {
        let g = Graph::new(GraphKind::Generic, 1, []).unwrap();
        let op = build_operator(&g, Couplings::new(0.3, 1.0), Mode::Restricted, None).unwrap();
        assert_eq!(op.matrix.to_dense(), vec![0.0, -0.3, -0.3, -1.0]);
    }

    #[test]
    fn star22_dimension_and_symmetry() {
        let g = generate_star(2, 2).unwrap();
        let op = build_operator(&g, Couplings::new(0.2, 1.0).with_lambda(0.7), Mode::Restricted, None).unwrap();
        assert_eq!(op.dim(), 13);
        assert!(op.matrix.is_symmetric(1e-14));
        let mut y = vec![0.0; 13];
        let x: Vec<f64> = (0..13).map(|i| (i as f64).cos()).collect();
        op.terms.hamiltonian(op.couplings).unwrap().apply(&x, &mut y);
        let mut y2 = vec![0.0; 13];
        op.matrix.apply(&x, &mut y2);
        for i in 0..13 {
            assert!((y[i] - y2[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn penalty_requires_u() {
        let g = generate_star(1, 2).unwrap();
        assert!(matches!(build_operator(&g, Couplings::new(1.0, 1.0), Mode::Penalty, None), Err(Error::Config(_))));
        let c = Couplings { penalty: Some(5.0), ..Couplings::new(1.0, 1.0) };
        let op = build_operator(&g, c, Mode::Penalty, None).unwrap();
        assert_eq!(op.dim(), 8);
        // Configuration 0b011 (vertices 0 and 1 occupied) violates one edge.
        let i = op.basis().locate(0b011).unwrap().0;
        assert_eq!(op.matrix.get(i, i), -2.0 + 5.0);
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = generate_unit_disk(4, 3, 0.8, 2.0, 3).unwrap();
        let t = build_terms(&g, Mode::Restricted, None).unwrap();
        let l = t.laplacian();
        for r in 0..t.dim() {
            assert!(l.row(r).map(|(_, v)| v).sum::<f64>().abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_sector_spectrum_matches_full() {
        for (n_b, l) in [(3, 2), (2, 4), (3, 3)] {
            let g = generate_star(n_b, l).unwrap();
            let c = Couplings::new(0.45, 1.0).with_lambda(0.3);
            let full = build_operator(&g, c, Mode::Restricted, None).unwrap();
            let sym = build_operator(&g, c, Mode::StarSymmetric, None).unwrap();
            assert!(sym.matrix.is_symmetric(1e-13));
            let ef = sym_eigen(&full.matrix.to_dense(), full.dim(), false).unwrap();
            let es = sym_eigen(&sym.matrix.to_dense(), sym.dim(), false).unwrap();
            // Every sector level is a level of the full space, and the two
            // lowest levels lie in the sector.
            for &e in &es.values {
                assert!(ef.values.iter().any(|&f| (e - f).abs() < 1e-10));
            }
            for k in 0..2 {
                assert!((es.values[k] - ef.values[k]).abs() < 1e-10, "n_b={n_b} l={l} k={k}");
            }
        }
    }
}
