//! Path-integral Monte Carlo for `H = H_d + H_od` on the independent sets,
//! with `H_d = −δ|z| + λ D(z)` and `H_od = −Ω X − λ H_se`.
//!
//! The partition function is Trotterized as
//! `Tr[(e^{−τ H_od} e^{−τ H_d})^M]`, `τ = β/M`. Every entry of `−τ H_od`
//! is nonnegative, so the slice kernel `K = e^{−τ H_od}` is built by scaling
//! and squaring a Taylor series with no cancellation and worldline weights
//! are positive.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::landscape::{independence_polynomial, BoundKind, BoundParams, Config};
use crate::linalg::dense::sym_eigen;
use crate::rng::{self, uniform};
use crate::spectral::{build_terms, Couplings, Mode, Terms};

/// Largest restricted dimension handled with dense kernels.
pub const QMC_DENSE_LIMIT: usize = 1024;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QmcConfig {
    pub omega: f64,
    pub delta: f64,
    pub lambda: f64,
    pub beta: f64,
    pub slices: usize,
    pub sweeps: usize,
    pub burn_in: usize,
    /// Probability that a proposal flips one spin on every slice.
    pub line_weight: f64,
    pub seed: u64,
}

impl Default for QmcConfig {
    fn default() -> Self {
        QmcConfig { omega: 1.0, delta: 1.0, lambda: 0.0, beta: 2.0, slices: 64, sweeps: 10_000, burn_in: 1000, line_weight: 0.2, seed: 0 }
    }
}

/// Dense row-major `d × d` product.
fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == 0.0 {
                continue;
            }
            let (row, brow) = (&mut c[i * d..(i + 1) * d], &b[k * d..(k + 1) * d]);
            for (y, &z) in row.iter_mut().zip(brow) {
                *y += x * z;
            }
        }
    }
    c
}

/// `e^A` for a matrix with nonnegative entries.
fn exp_nonnegative(a: &[f64], d: usize) -> Vec<f64> {
    let norm = (0..d).map(|i| a[i * d..(i + 1) * d].iter().sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.5 {
        s += 1;
    }
    let scale = f64::powi(2.0, -s);
    let a: Vec<f64> = a.iter().map(|x| x * scale).collect();
    let mut result = vec![0.0; d * d];
    let mut term = vec![0.0; d * d];
    for i in 0..d {
        result[i * d + i] = 1.0;
        term[i * d + i] = 1.0;
    }
    for k in 1..=30 {
        term = matmul(&term, &a, d);
        let inv = 1.0 / k as f64;
        let mut largest: f64 = 0.0;
        for (r, t) in result.iter_mut().zip(term.iter_mut()) {
            *t *= inv;
            *r += *t;
            largest = largest.max(*t);
        }
        if largest == 0.0 {
            break;
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result, d);
    }
    result
}

/// Worldline model: slice kernel and diagonal energies on a restricted basis.
pub struct Worldlines {
    pub states: Vec<Config>,
    index: HashMap<Config, usize>,
    n: usize,
    pub slices: usize,
    pub tau: f64,
    /// `ln K` (row-major).
    log_kernel: Vec<f64>,
    pub kernel: Vec<f64>,
    /// `H_d` per basis state.
    pub diag: Vec<f64>,
    pub line_weight: f64,
}

/// One worldline proposal with its exact probability of being proposed and
/// the change of log weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldlineMove {
    pub to: Vec<usize>,
    pub proposal: f64,
    pub delta_log_w: f64,
}

impl Worldlines {
    pub fn new(g: &Graph, omega: f64, delta: f64, lambda: f64, beta: f64, slices: usize, line_weight: f64) -> Result<Self> {
        let terms = build_terms(g, Mode::Restricted, None)?;
        Self::from_terms(&terms, g.n(), omega, delta, lambda, beta, slices, line_weight)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_terms(terms: &Terms, n: usize, omega: f64, delta: f64, lambda: f64, beta: f64, slices: usize, line_weight: f64) -> Result<Self> {
        if slices < 2 {
            return Err(Error::Config("need at least two Trotter slices".into()));
        }
        if !(beta > 0.0) || omega < 0.0 || lambda < 0.0 {
            return Err(Error::Config("need β > 0, Ω ≥ 0 and λ ≥ 0".into()));
        }
        if !(0.0..=1.0).contains(&line_weight) {
            return Err(Error::Config("line weight must lie in [0, 1]".into()));
        }
        let d = terms.dim();
        if d > QMC_DENSE_LIMIT {
            return Err(Error::Capacity(format!("restricted dimension {d} exceeds {QMC_DENSE_LIMIT}")));
        }
        let tau = beta / slices as f64;
        let mut a = vec![0.0; d * d];
        for r in 0..d {
            for (c, v) in terms.flip.row(r) {
                a[r * d + c] += tau * omega * v;
            }
            for (c, v) in terms.exchange.row(r) {
                a[r * d + c] += tau * lambda * v;
            }
        }
        let kernel = exp_nonnegative(&a, d);
        let log_kernel = kernel.iter().map(|&k| if k > 0.0 { k.ln() } else { f64::NEG_INFINITY }).collect();
        let diag = (0..d).map(|i| -delta * terms.size[i] + lambda * terms.exchange_degree[i]).collect();
        let states = terms.basis.states().to_vec();
        let index = states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
        Ok(Worldlines { states, index, n, slices, tau, log_kernel, kernel, diag, line_weight })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    fn lk(&self, i: usize, j: usize) -> f64 {
        self.log_kernel[i * self.dim() + j]
    }

    /// `Σ_m ln K(z_{m+1}, z_m) − τ H_d(z_m)`, cyclic in `m`.
    pub fn log_weight(&self, w: &[usize]) -> f64 {
        let m = w.len();
        (0..m).map(|s| self.lk(w[(s + 1) % m], w[s]) - self.tau * self.diag[w[s]]).sum()
    }

    fn flipped(&self, i: usize, v: usize) -> Option<usize> {
        self.index.get(&(self.states[i] ^ 1 << v)).copied()
    }

    fn slice_delta(&self, w: &[usize], s: usize, j: usize) -> f64 {
        let m = w.len();
        let (p, nx, i) = (w[(s + m - 1) % m], w[(s + 1) % m], w[s]);
        (self.lk(nx, j) + self.lk(j, p) - self.tau * self.diag[j]) - (self.lk(nx, i) + self.lk(i, p) - self.tau * self.diag[i])
    }

    /// Draws and applies one proposal. Returns whether it was a line move
    /// and `Some(accepted)`, or `None` for a null proposal.
    pub fn step<R: rand::RngCore + ?Sized>(&self, w: &mut [usize], rng: &mut R) -> (bool, Option<bool>) {
        let line = uniform(rng) < self.line_weight;
        if line {
            let v = ((uniform(rng) * self.n as f64) as usize).min(self.n - 1);
            let to: Option<Vec<usize>> = w.iter().map(|&i| self.flipped(i, v)).collect();
            let Some(to) = to else { return (true, None) };
            let d = self.log_weight(&to) - self.log_weight(w);
            let ok = d >= 0.0 || uniform(rng) < d.exp();
            if ok {
                w.copy_from_slice(&to);
            }
            (true, Some(ok))
        } else {
            let s = ((uniform(rng) * w.len() as f64) as usize).min(w.len() - 1);
            let v = ((uniform(rng) * self.n as f64) as usize).min(self.n - 1);
            let Some(j) = self.flipped(w[s], v) else { return (false, None) };
            let d = self.slice_delta(w, s, j);
            let ok = d >= 0.0 || uniform(rng) < d.exp();
            if ok {
                w[s] = j;
            }
            (false, Some(ok))
        }
    }

    /// Every non-null proposal from `w` with its exact probability.
    pub fn moves(&self, w: &[usize]) -> Vec<WorldlineMove> {
        let m = w.len();
        let base = self.log_weight(w);
        let mut out = Vec::new();
        let pl = self.line_weight / self.n as f64;
        let ps = (1.0 - self.line_weight) / (self.n * m) as f64;
        for v in 0..self.n {
            if pl > 0.0 {
                if let Some(to) = w.iter().map(|&i| self.flipped(i, v)).collect::<Option<Vec<_>>>() {
                    let d = self.log_weight(&to) - base;
                    out.push(WorldlineMove { to, proposal: pl, delta_log_w: d });
                }
            }
            if ps > 0.0 {
                for s in 0..m {
                    if let Some(j) = self.flipped(w[s], v) {
                        let mut to = w.to_vec();
                        to[s] = j;
                        let d = self.log_weight(&to) - base;
                        out.push(WorldlineMove { to, proposal: ps, delta_log_w: d });
                    }
                }
            }
        }
        out
    }

    /// Slice-1 marginal of the Trotterized weight, `diag((K E)^M)/Tr`, with
    /// `E = e^{−τ H_d}`.
    pub fn trotter_marginal(&self) -> Vec<f64> {
        let d = self.dim();
        let mut ke = self.kernel.clone();
        for i in 0..d {
            for j in 0..d {
                ke[i * d + j] *= (-self.tau * self.diag[j]).exp();
            }
        }
        let mut acc: Option<Vec<f64>> = None;
        let mut base = ke;
        let mut p = self.slices;
        while p > 0 {
            if p & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => matmul(&a, &base, d),
                });
            }
            p >>= 1;
            if p > 0 {
                base = matmul(&base, &base, d);
            }
        }
        let m = acc.unwrap();
        let diag: Vec<f64> = (0..d).map(|i| m[i * d + i]).collect();
        let z: f64 = diag.iter().sum();
        diag.into_iter().map(|x| x / z).collect()
    }
}

/// Diagonal of `e^{−βH}/Z` on the restricted space, by dense diagonalization.
pub fn exact_gibbs_diagonal(g: &Graph, omega: f64, delta: f64, lambda: f64, beta: f64) -> Result<(Vec<Config>, Vec<f64>)> {
    let terms = build_terms(g, Mode::Restricted, None)?;
    let d = terms.dim();
    if d > crate::tolerances::DENSE_LIMIT {
        return Err(Error::Capacity(format!("dimension {d} exceeds the dense limit")));
    }
    let h = terms.assemble(Couplings::new(omega, delta).with_lambda(lambda))?.to_dense();
    Ok((terms.basis.states().to_vec(), gibbs_diagonal(&h, d, beta)?))
}

fn gibbs_diagonal(h: &[f64], d: usize, beta: f64) -> Result<Vec<f64>> {
    let e = sym_eigen(h, d, true)?;
    let e0 = e.values[0];
    let w: Vec<f64> = e.values.iter().map(|&x| (-beta * (x - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    let mut rho = vec![0.0; d];
    for (j, wj) in w.iter().enumerate() {
        for (r, v) in rho.iter_mut().zip(e.vector(j)) {
            *r += wj * v * v / z;
        }
    }
    Ok(rho)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QmcResult {
    pub states: Vec<Config>,
    /// Sampled slice-1 marginal over `states`.
    pub marginal: Vec<f64>,
    /// The same marginal averaged over all slices.
    pub slice_averaged: Vec<f64>,
    pub slice_acceptance: f64,
    pub line_acceptance: f64,
    /// Exact total-variation distance between the Trotterized marginals at
    /// `M` and `2M`.
    pub trotter_proxy: f64,
    /// Slices changed by the largest update (the normalization keeps `M`).
    pub max_slices_modified: usize,
    pub config: QmcConfig,
}

pub fn qmc_run(g: &Graph, cfg: &QmcConfig) -> Result<QmcResult> {
    let wl = Worldlines::new(g, cfg.omega, cfg.delta, cfg.lambda, cfg.beta, cfg.slices, cfg.line_weight)?;
    let wl2 = Worldlines::new(g, cfg.omega, cfg.delta, cfg.lambda, cfg.beta, 2 * cfg.slices, cfg.line_weight)?;
    let trotter_proxy = crate::classical_mc::total_variation(&wl.trotter_marginal(), &wl2.trotter_marginal());
    let mut rng = rng::stream(cfg.seed, 0x716d63);
    let mut w = vec![0usize; cfg.slices];
    let empty = wl.index.get(&0).copied().ok_or_else(|| Error::Config("empty set missing from basis".into()))?;
    w.iter_mut().for_each(|x| *x = empty);
    let mut counts = vec![0u64; wl.dim()];
    let mut all = vec![0u64; wl.dim()];
    let (mut s_prop, mut s_acc, mut l_prop, mut l_acc) = (0u64, 0u64, 0u64, 0u64);
    let per_sweep = cfg.slices * wl.n;
    for sweep in 0..cfg.burn_in + cfg.sweeps {
        for _ in 0..per_sweep {
            let (line, res) = wl.step(&mut w, &mut rng);
            let acc = res == Some(true);
            if line {
                l_prop += 1;
                l_acc += acc as u64;
            } else {
                s_prop += 1;
                s_acc += acc as u64;
            }
        }
        if !wl.log_weight(&w).is_finite() {
            return Err(Error::NonConvergence("worldline weight left the positive cone".into()));
        }
        if sweep >= cfg.burn_in {
            counts[w[0]] += 1;
            for &i in &w {
                all[i] += 1;
            }
        }
    }
    Ok(QmcResult {
        states: wl.states.clone(),
        marginal: counts.iter().map(|&c| c as f64 / cfg.sweeps as f64).collect(),
        slice_averaged: all.iter().map(|&c| c as f64 / (cfg.sweeps * cfg.slices) as f64).collect(),
        slice_acceptance: s_acc as f64 / s_prop.max(1) as f64,
        line_acceptance: l_acc as f64 / l_prop.max(1) as f64,
        trotter_proxy,
        max_slices_modified: if cfg.line_weight > 0.0 { cfg.slices } else { 1 },
        config: cfg.clone(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QmcBoundEntry {
    pub b: usize,
    pub e_max: f64,
    pub z_max: Config,
    pub rho_max: f64,
    /// Restricted dimension (sets of size ≤ b − 1).
    pub restricted_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QmcBound {
    pub entries: Vec<QmcBoundEntry>,
    /// `ln(1/2ε)/(2nk n^k) · max_b D_{b−1}/(e_max^{(b)} D_b)`.
    pub bound: f64,
    pub k: usize,
    pub eps: f64,
}

/// `e_max^{(r,b)} = ρ_{z_max} D_{b−1}` from the exact Gibbs state of `H`
/// restricted to sets of size ≤ b − 1, where `z_max` maximizes `ρ` among
/// configurations within `k` flips of a size-`b` set.
pub fn e_max(terms: &Terms, b: usize, couplings: Couplings, beta: f64, k: usize, d_prev: f64) -> Result<QmcBoundEntry> {
    let idx: Vec<usize> = (0..terms.dim()).filter(|&i| terms.basis.size(i) < b).collect();
    let top: Vec<Config> = terms.basis.manifold_indices(b).into_iter().map(|i| terms.basis.state(i)).collect();
    if idx.is_empty() || top.is_empty() {
        return Err(Error::Config(format!("manifold {b} or its restricted space is empty")));
    }
    if idx.len() > crate::tolerances::DENSE_LIMIT {
        return Err(Error::Capacity(format!("restricted dimension {} exceeds the dense limit", idx.len())));
    }
    let h = terms.assemble(couplings)?.submatrix(&idx).to_dense();
    let rho = gibbs_diagonal(&h, idx.len(), beta)?;
    let mut best: Option<(f64, Config)> = None;
    for (j, &i) in idx.iter().enumerate() {
        let z = terms.basis.state(i);
        if top.iter().any(|&y| ((z ^ y).count_ones() as usize) <= k) && best.is_none_or(|(r, _)| rho[j] > r) {
            best = Some((rho[j], z));
        }
    }
    let (rho_max, z_max) = best.ok_or_else(|| Error::Config(format!("no configuration within {k} flips of manifold {b}")))?;
    Ok(QmcBoundEntry { b, e_max: rho_max * d_prev, z_max, rho_max, restricted_dim: idx.len() })
}

pub fn qmc_bound_inputs(g: &Graph, couplings: Couplings, beta: f64, k: usize, eps: f64) -> Result<QmcBound> {
    if k == 0 {
        return Err(Error::Config("k must be positive".into()));
    }
    let p = independence_polynomial(g)?;
    let terms = build_terms(g, Mode::Restricted, None)?;
    let mut entries = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for b in crate::landscape::bottleneck_range(&p) {
        if b == 0 {
            continue;
        }
        let e = e_max(&terms, b, couplings, beta, k, p.count_f64(b - 1))?;
        let params = BoundParams { k, eps, e_max: e.e_max, ..Default::default() };
        let single = crate::landscape::classical_bound_at(&p, BoundKind::Qmc, &params, b)?;
        best = best.max(single);
        entries.push(e);
    }
    Ok(QmcBound { entries, bound: best, k, eps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical_mc::total_variation;
    use crate::graphs::{generate_star, GraphKind};

    fn path(n: usize) -> Graph {
        Graph::new(GraphKind::Generic, n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn kernel_matches_spectral_exponential() {
        let g = generate_star(2, 2).unwrap();
        let wl = Worldlines::new(&g, 0.7, 1.0, 0.4, 2.0, 4, 0.2).unwrap();
        let terms = build_terms(&g, Mode::Restricted, None).unwrap();
        let d = terms.dim();
        let od = terms.assemble(Couplings::new(0.7, 0.0).with_lambda(0.4)).unwrap().to_dense();
        let mut hod = od.clone();
        for i in 0..d {
            hod[i * d + i] -= 0.4 * terms.exchange_degree[i];
        }
        let e = sym_eigen(&hod, d, true).unwrap();
        for i in 0..d {
            for j in 0..d {
                let want: f64 = (0..d).map(|m| (-0.5 * e.values[m]).exp() * e.vector(m)[i] * e.vector(m)[j]).sum();
                assert!((wl.kernel[i * d + j] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn worldline_detailed_balance() {
        let g = path(3);
        let wl = Worldlines::new(&g, 0.8, 1.0, 0.5, 1.5, 3, 0.3).unwrap();
        let d = wl.dim();
        let m = wl.slices;
        let all: Vec<Vec<usize>> = (0..d.pow(m as u32)).map(|mut c| (0..m).map(|_| { let x = c % d; c /= d; x }).collect()).collect();
        let lw: HashMap<Vec<usize>, f64> = all.iter().map(|w| (w.clone(), wl.log_weight(w))).collect();
        let shift = lw.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let p = |from: &Vec<usize>, to: &Vec<usize>| -> f64 {
            wl.moves(from).iter().filter(|x| &x.to == to).map(|x| x.proposal * x.delta_log_w.exp().min(1.0)).sum()
        };
        for w in &all {
            for mv in wl.moves(w) {
                let a = (lw[w] - shift).exp() * p(w, &mv.to);
                let b = (lw[&mv.to] - shift).exp() * p(&mv.to, w);
                assert!((a - b).abs() < 1e-12, "{w:?} -> {:?}: {a} vs {b}", mv.to);
            }
        }
    }

    #[test]
    fn weight_is_cyclic() {
        let g = generate_star(2, 2).unwrap();
        let wl = Worldlines::new(&g, 0.5, 1.0, 1.0, 2.0, 5, 0.2).unwrap();
        let w = vec![0, 1, 1, 3, 0];
        let mut r = w.clone();
        r.rotate_left(2);
        assert!((wl.log_weight(&w) - wl.log_weight(&r)).abs() < 1e-12);
    }

    #[test]
    fn classical_limit_matches_gibbs() {
        let g = generate_star(2, 2).unwrap();
        let wl = Worldlines::new(&g, 0.0, 1.0, 0.0, 1.0, 4, 0.5).unwrap();
        let (_, exact) = exact_gibbs_diagonal(&g, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(total_variation(&wl.trotter_marginal(), &exact) < 1e-12);
    }

    #[test]
    fn trotter_error_shrinks() {
        let g = path(4);
        let (_, exact) = exact_gibbs_diagonal(&g, 0.8, 1.0, 0.5, 2.0).unwrap();
        let errs: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&m| total_variation(&Worldlines::new(&g, 0.8, 1.0, 0.5, 2.0, m, 0.2).unwrap().trotter_marginal(), &exact))
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn symmetric_two_level() {
        let g = Graph::new(GraphKind::Generic, 1, []).unwrap();
        let (_, rho) = exact_gibbs_diagonal(&g, 1.0, 0.0, 0.0, 20.0).unwrap();
        assert!((rho[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sampled_marginal_on_star22() {
        let g = generate_star(2, 2).unwrap();
        let cfg = QmcConfig { omega: 0.3, delta: 1.0, lambda: 1.0, beta: 2.0, slices: 16, sweeps: 200_000, burn_in: 1000, seed: 3, ..Default::default() };
        let r = qmc_run(&g, &cfg).unwrap();
        let wl = Worldlines::new(&g, 0.3, 1.0, 1.0, 2.0, 16, 0.2).unwrap();
        let t = wl.trotter_marginal();
        assert!(total_variation(&r.marginal, &t) < 0.05);
        assert!(total_variation(&r.slice_averaged, &t) < 0.03);
    }

    #[test]
    fn infinite_temperature_e_max() {
        let g = generate_star(2, 2).unwrap();
        let terms = build_terms(&g, Mode::Restricted, None).unwrap();
        let e = e_max(&terms, 3, Couplings::new(1.0, 1.0), 1e-12, 1, 6.0).unwrap();
        // Uniform over the 12 sets of size ≤ 2.
        assert!((e.e_max - 6.0 / 12.0).abs() < 1e-9);
    }

    #[test]
    fn unit_e_max_reduces_to_local_tempering() {
        let p = independence_polynomial(&generate_star(3, 2).unwrap()).unwrap();
        let a = crate::landscape::classical_bound(&p, BoundKind::Qmc, &BoundParams { k: 2, k_prime: 2, eps: 0.1, e_max: 1.0 }).unwrap();
        let b = crate::landscape::classical_bound(&p, BoundKind::PtLocal, &BoundParams { k: 2, k_prime: 2, eps: 0.1, e_max: 1.0 }).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
}
