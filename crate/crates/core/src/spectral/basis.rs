//! Hilbert-space bases: independent sets (optionally one manifold), the full
//! hypercube for penalty mode, and the branch-permutation-symmetric sector
//! of a star graph.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graphs::{Graph, GraphKind};
use crate::landscape::{enumerate_independent_sets, popcount, Config};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// Independent sets only (infinite blockade).
    Restricted,
    /// All `2^n` configurations; violations cost a finite penalty.
    Penalty,
    /// Star graph, states symmetrized over permutations of the branches.
    StarSymmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct StarShape {
    n_b: usize,
    l: usize,
}

impl StarShape {
    fn pattern(&self, z: Config, i: usize) -> u32 {
        ((z >> (1 + i * self.l)) & ((1u128 << self.l) - 1)) as u32
    }

    /// Representative of the orbit of `z`: branch patterns sorted ascending.
    fn canonical(&self, z: Config) -> (Config, f64) {
        let mut pats: Vec<u32> = (0..self.n_b).map(|i| self.pattern(z, i)).collect();
        pats.sort_unstable();
        let mut rep = z & 1;
        for (i, &p) in pats.iter().enumerate() {
            rep |= (p as Config) << (1 + i * self.l);
        }
        (rep, orbit_size(&pats))
    }
}

/// `n!/Π m_s!` for a sorted pattern list with multiplicities `m_s`.
fn orbit_size(sorted: &[u32]) -> f64 {
    let mut size = 1.0;
    let mut run = 0;
    for (i, &p) in sorted.iter().enumerate() {
        run = if i > 0 && sorted[i - 1] == p { run + 1 } else { 1 };
        size *= (i + 1) as f64 / run as f64;
    }
    size
}

#[derive(Clone, Debug)]
pub struct Basis {
    kind: BasisKind,
    n: usize,
    states: Vec<Config>,
    /// Orbit sizes (all 1 outside the symmetric sector).
    orbits: Vec<f64>,
    index: HashMap<Config, usize>,
    star: Option<StarShape>,
    manifold: Option<usize>,
}

impl Basis {
    fn from_states(kind: BasisKind, n: usize, states: Vec<Config>, orbits: Vec<f64>, star: Option<StarShape>, manifold: Option<usize>) -> Self {
        let index = states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
        Basis { kind, n, states, orbits, index, star, manifold }
    }

    /// Independent sets of `g`, or only those of size `b`.
    pub fn restricted(g: &Graph, manifold: Option<usize>) -> Result<Self> {
        let mut states = enumerate_independent_sets(g, tolerances::ENUMERATION_LIMIT)?;
        if let Some(b) = manifold {
            states.retain(|&z| popcount(z) == b);
        }
        let k = states.len();
        Ok(Self::from_states(BasisKind::Restricted, g.n(), states, vec![1.0; k], None, manifold))
    }

    /// Every configuration of `n ≤ 24` spins.
    pub fn penalty(g: &Graph, manifold: Option<usize>) -> Result<Self> {
        if g.n() > 24 {
            return Err(Error::Capacity(format!("penalty basis on {} vertices", g.n())));
        }
        let states: Vec<Config> = (0..1u128 << g.n()).filter(|&z| manifold.is_none_or(|b| popcount(z) == b)).collect();
        let k = states.len();
        Ok(Self::from_states(BasisKind::Penalty, g.n(), states, vec![1.0; k], None, manifold))
    }

    /// Branch-symmetric independent sets of `star(n_b, l)`. The ground state
    /// and the states it couples to under any branch-symmetric Hamiltonian
    /// live in this sector.
    pub fn star_symmetric(n_b: usize, l: usize, manifold: Option<usize>) -> Result<Self> {
        if n_b == 0 || l == 0 || 1 + n_b * l > 128 || l > 30 {
            return Err(Error::Config(format!("star sector needs 1 ≤ n_b, 1 ≤ l ≤ 30, n ≤ 128 (got n_b={n_b}, l={l})")));
        }
        let shape = StarShape { n_b, l };
        // Independent sets of a path of l vertices; bit 0 touches the center.
        let pats: Vec<u32> = (0..1u32 << l).filter(|&p| p & (p >> 1) == 0).collect();
        let free: Vec<u32> = pats.iter().copied().filter(|&p| p & 1 == 0).collect();
        let mut states = Vec::new();
        let mut orbits = Vec::new();
        for (center, list) in [(0u128, &pats), (1u128, &free)] {
            let mut idx = vec![0usize; n_b];
            loop {
                let chosen: Vec<u32> = idx.iter().map(|&i| list[i]).collect();
                let mut z = center;
                for (i, &p) in chosen.iter().enumerate() {
                    z |= (p as Config) << (1 + i * l);
                }
                if manifold.is_none_or(|b| popcount(z) == b) {
                    states.push(z);
                    orbits.push(orbit_size(&chosen));
                    if states.len() > tolerances::ENUMERATION_LIMIT {
                        return Err(Error::Capacity("star sector exceeds the enumeration limit".into()));
                    }
                }
                // Next nondecreasing index tuple.
                let mut k = n_b;
                while k > 0 && idx[k - 1] == list.len() - 1 {
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                let v = idx[k - 1] + 1;
                idx[k - 1..].iter_mut().for_each(|x| *x = v);
            }
        }
        Ok(Self::from_states(BasisKind::StarSymmetric, 1 + n_b * l, states, orbits, Some(shape), manifold))
    }

    /// Restricted basis for `g`, or the symmetric sector when `g` is a
    /// generated star and `symmetric` is set.
    pub fn for_graph(g: &Graph, symmetric: bool, manifold: Option<usize>) -> Result<Self> {
        if symmetric {
            if g.kind() != GraphKind::Star {
                return Err(Error::Config("symmetric sector requires a star graph".into()));
            }
            let get = |k: &str| g.meta().get(k).and_then(|v| v.as_u64()).map(|v| v as usize);
            match (get("n_b"), get("l")) {
                (Some(n_b), Some(l)) => Self::star_symmetric(n_b, l, manifold),
                _ => Err(Error::Config("star graph is missing n_b / l metadata".into())),
            }
        } else {
            Self::restricted(g, manifold)
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of vertices of the underlying graph.
    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn manifold(&self) -> Option<usize> {
        self.manifold
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Config] {
        &self.states
    }

    pub fn state(&self, i: usize) -> Config {
        self.states[i]
    }

    /// Number of configurations represented by basis state `i`.
    pub fn orbit(&self, i: usize) -> f64 {
        self.orbits[i]
    }

    /// Independent-set size of basis state `i`.
    pub fn size(&self, i: usize) -> usize {
        popcount(self.states[i])
    }

    /// Basis index and orbit size for configuration `z`, if represented.
    pub fn locate(&self, z: Config) -> Option<(usize, f64)> {
        match self.star {
            Some(s) => {
                let (rep, size) = s.canonical(z);
                self.index.get(&rep).map(|&i| (i, size))
            }
            None => self.index.get(&z).map(|&i| (i, 1.0)),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.star.is_some()
    }

    /// Indices of basis states with exactly `b` occupied vertices.
    pub fn manifold_indices(&self, b: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.size(i) == b).collect()
    }

    /// Largest occupied size present in the basis.
    pub fn max_size(&self) -> usize {
        (0..self.dim()).map(|i| self.size(i)).max().unwrap_or(0)
    }

    /// Amplitudes on individual configurations, for bases that are not
    /// symmetrized; symmetric-sector vectors are expanded over their orbits
    /// when the expansion stays below `limit` configurations.
    pub fn expand(&self, v: &[f64], limit: usize) -> Result<Vec<(Config, f64)>> {
        let Some(s) = self.star else {
            return Ok(self.states.iter().copied().zip(v.iter().copied()).collect());
        };
        let total: f64 = self.orbits.iter().sum();
        if total > limit as f64 {
            return Err(Error::Capacity(format!("expansion over {total} configurations")));
        }
        let mut out = Vec::new();
        for (i, &z) in self.states.iter().enumerate() {
            if v[i] == 0.0 {
                continue;
            }
            let amp = v[i] / self.orbits[i].sqrt();
            let pats: Vec<u32> = (0..s.n_b).map(|k| s.pattern(z, k)).collect();
            let mut perm = pats.clone();
            // Distinct permutations of the sorted pattern list.
            loop {
                let mut y = z & 1;
                for (k, &p) in perm.iter().enumerate() {
                    y |= (p as Config) << (1 + k * s.l);
                }
                out.push((y, amp));
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
        out.sort_unstable_by_key(|e| e.0);
        Ok(out)
    }
}

fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
