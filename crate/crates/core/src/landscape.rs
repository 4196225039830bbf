//! Independent-set landscapes: counts D_b, configuration graphs under spin
//! exchange, their Laplacian gaps, and classical runtime lower bounds.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::linalg::{dense, lanczos, CsrMatrix};
use crate::tolerances;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Occupation bitmask; bit `u` set means vertex `u` is in the set.
pub type Config = u128;

#[inline]
pub fn popcount(z: Config) -> usize {
    z.count_ones() as usize
}

/// Counts `D_b` of independent sets of every size `b = 0..=α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ProfileFile", into = "ProfileFile")]
pub struct LandscapeProfile {
    n: usize,
    counts: Vec<BigUint>,
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    n: usize,
    alpha: usize,
    counts: Vec<String>,
}

impl TryFrom<ProfileFile> for LandscapeProfile {
    type Error = Error;
    fn try_from(f: ProfileFile) -> Result<Self> {
        let counts = f
            .counts
            .iter()
            .map(|s| s.parse::<BigUint>().map_err(|e| Error::Parse(format!("count {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let p = LandscapeProfile::new(f.n, counts)?;
        if p.alpha() != f.alpha {
            return Err(Error::Parse(format!("alpha {} disagrees with counts", f.alpha)));
        }
        Ok(p)
    }
}

impl From<LandscapeProfile> for ProfileFile {
    fn from(p: LandscapeProfile) -> Self {
        ProfileFile { n: p.n, alpha: p.alpha(), counts: p.counts.iter().map(|c| c.to_string()).collect() }
    }
}

impl LandscapeProfile {
    /// Trailing zero counts are trimmed; `D_0` must be 1 and no interior
    /// count may vanish.
    pub fn new(n: usize, mut counts: Vec<BigUint>) -> Result<Self> {
        while counts.len() > 1 && counts.last().is_some_and(Zero::is_zero) {
            counts.pop();
        }
        if counts.first() != Some(&BigUint::one()) {
            return Err(Error::Config("D_0 must equal 1".into()));
        }
        if counts.iter().any(Zero::is_zero) {
            return Err(Error::Config("independent-set counts cannot have interior zeros".into()));
        }
        if counts.len() > n + 1 {
            return Err(Error::Config(format!("α = {} exceeds n = {n}", counts.len() - 1)));
        }
        Ok(LandscapeProfile { n, counts })
    }

    pub fn from_u64(n: usize, counts: &[u64]) -> Result<Self> {
        Self::new(n, counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of the maximum independent set.
    pub fn alpha(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn count(&self, b: usize) -> &BigUint {
        &self.counts[b]
    }

    pub fn count_f64(&self, b: usize) -> f64 {
        self.counts[b].to_f64().unwrap_or(f64::INFINITY)
    }

    /// `D_{b-1} / D_b`, accurate even when both counts overflow `f64`.
    pub fn ratio(&self, b: usize) -> f64 {
        big_ratio(&self.counts[b - 1], &self.counts[b])
    }

    /// Smallest `b` with `D_b ≥ D_{b+1} ≥ … ≥ D_α`.
    pub fn b_star(&self) -> usize {
        let mut b = self.alpha();
        while b > 0 && self.counts[b - 1] >= self.counts[b] {
            b -= 1;
        }
        b
    }

    /// Indices `b` where `D_b > D_{b-1}` after the sequence has already
    /// decreased somewhere before `b`.
    pub fn unimodality_violations(&self) -> Vec<usize> {
        let mut descended = false;
        let mut out = Vec::new();
        for b in 1..self.counts.len() {
            if self.counts[b] < self.counts[b - 1] {
                descended = true;
            } else if self.counts[b] > self.counts[b - 1] && descended {
                out.push(b);
            }
        }
        out
    }

    pub fn is_unimodal(&self) -> bool {
        self.unimodality_violations().is_empty()
    }

    /// Total number of independent sets.
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

pub(crate) fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = a.bits().max(b.bits()).saturating_sub(1000);
    let (a, b) = (a >> shift, b >> shift);
    a.to_f64().unwrap_or(f64::INFINITY) / b.to_f64().unwrap_or(f64::INFINITY)
}

type Poly = Vec<BigUint>;

fn poly_mul(a: &[BigUint], b: &[BigUint]) -> Poly {
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[BigUint], b: &[BigUint]) -> Poly {
    let mut out = vec![BigUint::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

/// Independence polynomial of a forest by the standard in/out tree recursion.
fn forest_polynomial(g: &Graph) -> Poly {
    let n = g.n();
    let mut total: Poly = vec![BigUint::one()];
    let mut seen = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        // Iterative post-order over the tree containing `root`.
        let mut order = Vec::new();
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    stack.push(v);
                }
            }
        }
        let mut incl: HashMap<usize, Poly> = HashMap::new();
        let mut excl: HashMap<usize, Poly> = HashMap::new();
        for &u in order.iter().rev() {
            let mut pin: Poly = vec![BigUint::zero(), BigUint::one()];
            let mut pout: Poly = vec![BigUint::one()];
            for &v in g.neighbors(u) {
                if v == parent[u] {
                    continue;
                }
                let vi = incl.remove(&v).expect("child processed");
                let vo = excl.remove(&v).expect("child processed");
                pin = poly_mul(&pin, &vo);
                pout = poly_mul(&pout, &poly_add(&vi, &vo));
            }
            incl.insert(u, pin);
            excl.insert(u, pout);
        }
        let tree = poly_add(&incl[&root], &excl[&root]);
        total = poly_mul(&total, &tree);
    }
    total
}

/// Branching counter `I(R) = I(R − v) + x·I(R − N[v])` on the lowest vertex,
/// memoized on the remaining vertex set. Branching in vertex order makes the
/// memo act like a transfer matrix on lattice-ordered instances.
struct MaskCounter<'a> {
    closed: &'a [Config],
    memo: HashMap<Config, Vec<u128>>,
}

impl MaskCounter<'_> {
    fn count(&mut self, rest: Config) -> Result<Vec<u128>> {
        if rest == 0 {
            return Ok(vec![1]);
        }
        if let Some(p) = self.memo.get(&rest) {
            return Ok(p.clone());
        }
        if self.memo.len() >= tolerances::COUNT_MEMO_LIMIT {
            return Err(Error::Capacity("independence polynomial memo limit reached".into()));
        }
        let v = rest.trailing_zeros() as usize;
        let a = self.count(rest & !(1u128 << v))?;
        let b = self.count(rest & !self.closed[v])?;
        let mut out = vec![0u128; a.len().max(b.len() + 1)];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i + 1] += y;
        }
        self.memo.insert(rest, out.clone());
        Ok(out)
    }
}

/// Exact landscape profile of `g`.
pub fn independence_polynomial(g: &Graph) -> Result<LandscapeProfile> {
    let poly = if g.is_forest() {
        forest_polynomial(g)
    } else {
        let masks = g.neighbor_masks()?;
        let closed: Vec<Config> = masks.iter().enumerate().map(|(u, m)| m | 1u128 << u).collect();
        let all = if g.n() == 128 { u128::MAX } else { (1u128 << g.n()) - 1 };
        let mut c = MaskCounter { closed: &closed, memo: HashMap::new() };
        c.count(all)?.into_iter().map(BigUint::from).collect()
    };
    LandscapeProfile::new(g.n(), poly)
}

/// All independent sets, in increasing bitmask order.
pub fn enumerate_independent_sets(g: &Graph, limit: usize) -> Result<Vec<Config>> {
    let masks = g.neighbor_masks()?;
    let n = g.n();
    let mut out = Vec::new();
    // Depth-first over candidate vertices above the last one added.
    let mut stack: Vec<(Config, Config)> = vec![(0, if n == 128 { u128::MAX } else { (1u128 << n) - 1 })];
    while let Some((z, cand)) = stack.pop() {
        out.push(z);
        if out.len() > limit {
            return Err(Error::Capacity(format!("more than {limit} independent sets")));
        }
        let mut c = cand;
        while c != 0 {
            let v = c.trailing_zeros() as usize;
            c &= c - 1;
            let above = if v == 127 { 0 } else { !((1u128 << (v + 1)) - 1) };
            stack.push((z | 1u128 << v, cand & above & !masks[v]));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Independent sets of size `b` connected by single spin exchanges
/// (move one occupied vertex onto an empty neighbor).
#[derive(Clone, Debug)]
pub struct ConfigurationGraph {
    pub b: usize,
    pub nodes: Vec<Config>,
    pub adj: Vec<Vec<usize>>,
}

impl ConfigurationGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected components, largest first.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.len()];
        let mut comps = Vec::new();
        for s in 0..self.len() {
            if label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut comp = vec![s];
            label[s] = id;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
        comps
    }

    /// Graph Laplacian restricted to `nodes` (indices into `self.nodes`).
    pub fn laplacian(&self, nodes: &[usize]) -> CsrMatrix<f64> {
        let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut trip = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            trip.push((i, i, self.adj[u].len() as f64));
            for v in &self.adj[u] {
                if let Some(&j) = pos.get(v) {
                    trip.push((i, j, -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(nodes.len(), trip)
    }
}

pub fn configuration_graph(g: &Graph, b: usize) -> Result<ConfigurationGraph> {
    let masks = g.neighbor_masks()?;
    let nodes: Vec<Config> = enumerate_independent_sets(g, tolerances::ENUMERATION_LIMIT)?
        .into_iter()
        .filter(|&z| popcount(z) == b)
        .collect();
    let index: HashMap<Config, usize> = nodes.iter().enumerate().map(|(i, &z)| (z, i)).collect();
    let mut adj = vec![Vec::new(); nodes.len()];
    for (i, &z) in nodes.iter().enumerate() {
        for (u, v) in exchange_moves(z, &masks, g) {
            let z2 = z & !(1u128 << u) | 1u128 << v;
            adj[i].push(index[&z2]);
        }
        adj[i].sort_unstable();
    }
    Ok(ConfigurationGraph { b, nodes, adj })
}

/// Valid exchanges `(u, v)`: `u` occupied, `v` an empty neighbor of `u`, and
/// no other occupied vertex adjacent to `v`.
pub fn exchange_moves<'a>(z: Config, masks: &'a [Config], g: &'a Graph) -> impl Iterator<Item = (usize, usize)> + 'a {
    (0..g.n()).filter(move |&u| z >> u & 1 == 1).flat_map(move |u| {
        let rest = z & !(1u128 << u);
        g.neighbors(u)
            .iter()
            .copied()
            .filter(move |&v| z >> v & 1 == 0 && masks[v] & rest == 0)
            .map(move |v| (u, v))
    })
}

/// Spectral gap of the configuration-graph Laplacian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LaplacianGap {
    Finite(f64),
    /// A single configuration has no nonzero Laplacian eigenvalue.
    Infinite,
}

impl LaplacianGap {
    pub fn value(&self) -> Option<f64> {
        match self {
            LaplacianGap::Finite(v) => Some(*v),
            LaplacianGap::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaplacianGapReport {
    pub b: usize,
    pub gap: LaplacianGap,
    pub nodes: usize,
    pub components: usize,
    pub largest_component: usize,
}

impl LaplacianGapReport {
    pub fn connected(&self) -> bool {
        self.components <= 1
    }
}

/// Laplacian gap of the largest connected component of the manifold.
pub fn laplacian_gap(cg: &ConfigurationGraph) -> Result<LaplacianGapReport> {
    if cg.is_empty() {
        return Err(Error::Config(format!("manifold b = {} is empty", cg.b)));
    }
    let comps = cg.components();
    let largest = &comps[0];
    let gap = if largest.len() == 1 {
        LaplacianGap::Infinite
    } else {
        let lap = cg.laplacian(largest);
        let vals = if largest.len() <= tolerances::LAPLACIAN_DENSE_LIMIT {
            dense::sym_eigen(&lap.to_dense(), largest.len(), false)?.values
        } else {
            lanczos::lowest(&lap, 2, &lanczos::LanczosConfig::default())?.values
        };
        LaplacianGap::Finite(vals[1] - vals[0])
    };
    Ok(LaplacianGapReport {
        b: cg.b,
        gap,
        nodes: cg.len(),
        components: comps.len(),
        largest_component: largest.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Sa,
    PtLocal,
    PtIsoenergetic,
    Qmc,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundParams {
    /// Spins altered per local update.
    pub k: usize,
    /// Spins altered per replica in a collective update.
    pub k_prime: usize,
    /// Target total-variation error, in (0, 1/2).
    pub eps: f64,
    /// Population enhancement factor for the quantum Monte Carlo bound.
    pub e_max: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams { k: 1, k_prime: 1, eps: 0.25, e_max: 1.0 }
    }
}

/// Sizes `b` entering the bottleneck maximization: `(b_star, α]`, or `α`
/// alone when that range is empty.
pub fn bottleneck_range(p: &LandscapeProfile) -> std::ops::RangeInclusive<usize> {
    let a = p.alpha();
    let bs = p.b_star();
    if bs < a {
        bs + 1..=a
    } else {
        a..=a
    }
}

fn check_bound_params(p: &LandscapeProfile, params: &BoundParams) -> Result<()> {
    if !(params.eps > 0.0 && params.eps < 0.5) {
        return Err(Error::Config(format!("eps = {} outside (0, 1/2)", params.eps)));
    }
    if params.k == 0 || params.k_prime == 0 {
        return Err(Error::Config("k and k' must be positive".into()));
    }
    if !(params.e_max > 0.0) {
        return Err(Error::Config("e_max must be positive".into()));
    }
    if p.alpha() == 0 {
        return Err(Error::Config("graph has no vertices".into()));
    }
    Ok(())
}

/// Runtime lower bound, in sweeps of `n` proposals, for the chosen algorithm.
pub fn classical_bound(p: &LandscapeProfile, kind: BoundKind, params: &BoundParams) -> Result<f64> {
    check_bound_params(p, params)?;
    let mut best = f64::NEG_INFINITY;
    for b in bottleneck_range(p) {
        best = best.max(classical_bound_at(p, kind, params, b)?);
    }
    Ok(best)
}

/// The bound's argument at a single bottleneck size `b`.
pub fn classical_bound_at(p: &LandscapeProfile, kind: BoundKind, params: &BoundParams, b: usize) -> Result<f64> {
    check_bound_params(p, params)?;
    if b == 0 || b > p.alpha() {
        return Err(Error::Config(format!("b = {b} outside 1..={}", p.alpha())));
    }
    let n = p.n() as f64;
    let lead = (1.0 / (2.0 * params.eps)).ln();
    let k = params.k as f64;
    let kp = params.k_prime as f64;
    Ok(match kind {
        BoundKind::Sa => lead / (2.0 * n * k) * p.ratio(b),
        BoundKind::PtLocal => lead / (2.0 * n * kp * n.powf(kp)) * p.ratio(b),
        BoundKind::Qmc => lead / (2.0 * n * k * n.powf(k)) * p.ratio(b) / params.e_max,
        BoundKind::PtIsoenergetic => {
            let a = p.alpha();
            let mut flow = kp * n.powf(kp) / p.ratio(b);
            for b1 in b..=a {
                let Some(top) = (2 * (b - 1)).checked_sub(b1) else { continue };
                for b2 in 0..=top {
                    for kk in (b1 + 1 - b)..=(b - 1 - b2) {
                        let num = p.count(b1) * p.count(b2);
                        let den = p.count(b1 - kk) * p.count(b2 + kk);
                        flow += big_ratio(&num, &den);
                    }
                }
            }
            lead / (2.0 * n) / flow
        }
    })
}

/// Result of scanning a collection of profiles for non-unimodal counts.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct UnimodalityReport {
    pub instances: usize,
    /// `(instance index, violating b values)` for every offending profile.
    pub violations: Vec<(usize, Vec<usize>)>,
}

pub fn unimodality_scan<'a>(profiles: impl IntoIterator<Item = &'a LandscapeProfile>) -> UnimodalityReport {
    let mut r = UnimodalityReport::default();
    for (i, p) in profiles.into_iter().enumerate() {
        r.instances += 1;
        let v = p.unimodality_violations();
        if !v.is_empty() {
            r.violations.push((i, v));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_star, generate_unit_disk, GraphKind};

    fn brute(g: &Graph) -> Vec<u64> {
        let mut d = vec![0u64; g.n() + 1];
        for z in 0u128..1 << g.n() {
            if g.is_independent(z) {
                d[popcount(z)] += 1;
            }
        }
        while d.len() > 1 && *d.last().unwrap() == 0 {
            d.pop();
        }
        d
    }

    #[test]
    fn star_2_2_profile() {
        let g = generate_star(2, 2).unwrap();
        let p = independence_polynomial(&g).unwrap();
        assert_eq!(p, LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap());
        assert_eq!(p.b_star(), 2);
        assert_eq!(bottleneck_range(&p), 3..=3);
    }

    #[test]
    fn counters_agree_with_brute_force() {
        for seed in 0..20 {
            let g = generate_unit_disk(4, 3, 0.8, 2.0, seed).unwrap();
            let p = independence_polynomial(&g).unwrap();
            let want = LandscapeProfile::from_u64(g.n(), &brute(&g)).unwrap();
            assert_eq!(p, want, "seed {seed}");
            let sets = enumerate_independent_sets(&g, 1 << 20).unwrap();
            assert_eq!(BigUint::from(sets.len()), p.total());
        }
    }

    #[test]
    fn path_and_empty_graph() {
        // Independent sets of a path of 4: 1 + 4x + 3x^2.
        let g = Graph::new(GraphKind::Generic, 4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(independence_polynomial(&g).unwrap().counts(), LandscapeProfile::from_u64(4, &[1, 4, 3]).unwrap().counts());
        let e = Graph::new(GraphKind::Generic, 3, []).unwrap();
        assert_eq!(independence_polynomial(&e).unwrap(), LandscapeProfile::from_u64(3, &[1, 3, 3, 1]).unwrap());
    }

    #[test]
    fn sa_bound_star_2_2() {
        let p = LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap();
        let v = classical_bound(&p, BoundKind::Sa, &BoundParams::default()).unwrap();
        assert!((v - 0.6 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!((v - 0.41589).abs() < 1e-5);
    }

    #[test]
    fn qmc_bound_reduces_to_pt_local() {
        let p = LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap();
        let params = BoundParams { k: 2, k_prime: 2, ..Default::default() };
        let q = classical_bound(&p, BoundKind::Qmc, &params).unwrap();
        let pt = classical_bound(&p, BoundKind::PtLocal, &params).unwrap();
        assert!((q - pt).abs() <= 1e-15 * pt);
    }

    #[test]
    fn bound_rejects_bad_eps() {
        let p = LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap();
        for eps in [0.0, 0.5, 0.7] {
            let params = BoundParams { eps, ..Default::default() };
            assert!(classical_bound(&p, BoundKind::Sa, &params).is_err());
        }
    }

    #[test]
    fn isoenergetic_bound_star_2_2() {
        // b = 3 only: b1' = 3, b2' ∈ {0, 1}, k ∈ [1, 2 - b2'].
        // flow = n·D3/D2 + D3D0/(D2D1) + D3D0/(D1D2) + D3D1/(D2D2).
        let p = LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap();
        let flow = 5.0 / 6.0 + 1.0 / 30.0 + 1.0 / 30.0 + 5.0 / 36.0;
        let want = std::f64::consts::LN_2 / 10.0 / flow;
        let got = classical_bound(&p, BoundKind::PtIsoenergetic, &BoundParams::default()).unwrap();
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn profile_json_uses_decimal_strings() {
        let p = LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":5,"alpha":3,"counts":["1","5","6","1"]}"#);
        let back: LandscapeProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<LandscapeProfile>(r#"{"n":5,"alpha":2,"counts":["1","5","6","1"]}"#).is_err());
    }

    #[test]
    fn unimodality_detection() {
        let good = LandscapeProfile::from_u64(9, &[1, 9, 20, 20, 3]).unwrap();
        let bad = LandscapeProfile::from_u64(9, &[1, 9, 5, 7, 1]).unwrap();
        assert!(good.is_unimodal());
        assert_eq!(bad.unimodality_violations(), vec![3]);
        let r = unimodality_scan([&good, &bad]);
        assert_eq!(r.instances, 2);
        assert_eq!(r.violations, vec![(1, vec![3])]);
    }

    #[test]
    fn star_manifolds() {
        let g = generate_star(2, 2).unwrap();
        let cg = configuration_graph(&g, 3).unwrap();
        assert_eq!(cg.len(), 1);
        assert_eq!(laplacian_gap(&cg).unwrap().gap, LaplacianGap::Infinite);
        let cg2 = configuration_graph(&g, 2).unwrap();
        assert_eq!(cg2.len(), 6);
        let r = laplacian_gap(&cg2).unwrap();
        assert!(r.gap.value().unwrap() > 0.0);
        let s = serde_json::to_string(&LaplacianGap::Infinite).unwrap();
        assert_eq!(s, r#"{"kind":"infinite"}"#);
    }
}
