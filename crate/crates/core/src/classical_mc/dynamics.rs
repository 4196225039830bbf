//! Metropolis-Hastings dynamics on independent-set configurations.
//!
//! A proposal is a spin flip with probability `w_f` (uniform vertex) or a
//! spin exchange with probability `w_e` (uniform directed edge `(u, v)`,
//! applied only when `u` is occupied and `v` empty). Both proposal measures
//! are symmetric, so acceptance is `min(1, e^{−βΔH})`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::landscape::{popcount, Config};
use crate::rng::uniform;

/// Treatment of configurations that are not independent sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// Proposals leaving the independent sets are rejected.
    Restricted,
    /// Every configuration is allowed with energy `U` per violated edge.
    Penalty { u: f64 },
}

impl Default for Constraint {
    fn default() -> Self {
        Constraint::Restricted
    }
}

/// Relative weights of spin-flip and spin-exchange proposals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateMix {
    pub flip: f64,
    pub exchange: f64,
}

impl Default for UpdateMix {
    fn default() -> Self {
        UpdateMix { flip: 0.5, exchange: 0.5 }
    }
}

impl UpdateMix {
    /// Largest number of spins one proposal alters.
    pub fn k(&self) -> usize {
        if self.exchange > 0.0 {
            2
        } else {
            1
        }
    }
}

#[derive(Clone, Debug)]
pub struct Dynamics {
    n: usize,
    masks: Vec<Config>,
    arcs: Vec<(usize, usize)>,
    flip: f64,
    constraint: Constraint,
    delta: f64,
}

/// One proposal: the new configuration, its probability of being proposed
/// and the energy change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Move {
    pub to: Config,
    pub proposal: f64,
    pub delta_h: f64,
}

impl Dynamics {
    pub fn new(g: &Graph, mix: UpdateMix, constraint: Constraint, delta: f64) -> Result<Self> {
        if !(mix.flip >= 0.0 && mix.exchange >= 0.0) || mix.flip + mix.exchange <= 0.0 {
            return Err(Error::Config(format!("update mix {mix:?} needs nonnegative weights with a positive sum")));
        }
        if let Constraint::Penalty { u } = constraint {
            if !(u > 0.0) {
                return Err(Error::Config("penalty U must be positive".into()));
            }
        }
        let arcs: Vec<(usize, usize)> = g.edges().iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        let total = mix.flip + mix.exchange;
        let flip = if arcs.is_empty() { 1.0 } else { mix.flip / total };
        if flip == 0.0 && arcs.is_empty() {
            return Err(Error::Config("exchange-only dynamics on a graph without edges".into()));
        }
        Ok(Dynamics { n: g.n(), masks: g.neighbor_masks()?, arcs, flip, constraint, delta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn violations(&self, z: Config) -> usize {
        (0..self.n).filter(|&u| z >> u & 1 == 1).map(|u| popcount(z & self.masks[u] & ((1 << u) - 1))).sum()
    }

    /// `−δ|z| + U·(violated edges)`; infinite outside the independent sets in
    /// restricted mode.
    pub fn energy(&self, z: Config) -> f64 {
        let v = self.violations(z);
        let base = -self.delta * popcount(z) as f64;
        match self.constraint {
            Constraint::Restricted if v > 0 => f64::INFINITY,
            Constraint::Restricted => base,
            Constraint::Penalty { u } => base + u * v as f64,
        }
    }

    fn flip_move(&self, z: Config, v: usize) -> Option<(Config, f64)> {
        let bit = 1u128 << v;
        let others = popcount(z & self.masks[v]) as f64;
        let to = z ^ bit;
        let sign = if z & bit == 0 { 1.0 } else { -1.0 };
        match self.constraint {
            Constraint::Restricted if sign > 0.0 && others > 0.0 => None,
            Constraint::Restricted => Some((to, -self.delta * sign)),
            Constraint::Penalty { u } => Some((to, sign * (u * others - self.delta))),
        }
    }

    fn exchange_move(&self, z: Config, u: usize, v: usize) -> Option<(Config, f64)> {
        if z >> u & 1 == 0 || z >> v & 1 == 1 {
            return None;
        }
        let rest = z & !(1u128 << u);
        let lost = popcount(rest & self.masks[u]) as f64;
        let gained = popcount(rest & self.masks[v]) as f64;
        let to = rest | 1 << v;
        match self.constraint {
            Constraint::Restricted if gained > 0.0 => None,
            Constraint::Restricted => Some((to, 0.0)),
            Constraint::Penalty { u: pen } => Some((to, pen * (gained - lost))),
        }
    }

    /// Draws a proposal; `None` is a null move.
    pub fn propose<R: RngCore + ?Sized>(&self, z: Config, rng: &mut R) -> Option<(Config, f64)> {
        let r = uniform(rng);
        if r < self.flip {
            let v = (uniform(rng) * self.n as f64) as usize;
            self.flip_move(z, v.min(self.n - 1))
        } else {
            let i = (uniform(rng) * self.arcs.len() as f64) as usize;
            let (u, v) = self.arcs[i.min(self.arcs.len() - 1)];
            self.exchange_move(z, u, v)
        }
    }

    /// One Metropolis step at inverse temperature `beta`; returns whether
    /// the proposal was accepted.
    pub fn step<R: RngCore + ?Sized>(&self, z: &mut Config, beta: f64, rng: &mut R) -> bool {
        let Some((to, dh)) = self.propose(*z, rng) else {
            return false;
        };
        if dh <= 0.0 || uniform(rng) < (-beta * dh).exp() {
            *z = to;
            true
        } else {
            false
        }
    }

    /// Every non-null proposal from `z` with its exact probability.
    pub fn moves(&self, z: Config) -> Vec<Move> {
        let mut out = Vec::new();
        let pf = self.flip / self.n as f64;
        for v in 0..self.n {
            if let Some((to, dh)) = self.flip_move(z, v) {
                out.push(Move { to, proposal: pf, delta_h: dh });
            }
        }
        if !self.arcs.is_empty() && self.flip < 1.0 {
            let pe = (1.0 - self.flip) / self.arcs.len() as f64;
            for &(u, v) in &self.arcs {
                if let Some((to, dh)) = self.exchange_move(z, u, v) {
                    out.push(Move { to, proposal: pe, delta_h: dh });
                }
            }
        }
        out
    }

    /// States visited by the dynamics: the independent sets in restricted
    /// mode, all `2^n` configurations with a penalty.
    pub fn state_space(&self, g: &Graph, limit: usize) -> Result<Vec<Config>> {
        match self.constraint {
            Constraint::Restricted => crate::landscape::enumerate_independent_sets(g, limit),
            Constraint::Penalty { .. } => {
                if self.n > 24 || (1usize << self.n) > limit {
                    return Err(Error::Capacity(format!("2^{} configurations exceed the limit {limit}", self.n)));
                }
                Ok((0..1u128 << self.n).collect())
            }
        }
    }

    /// Row-stochastic transition matrix over `states` (dense, row-major).
    pub fn transition_matrix(&self, states: &[Config], beta: f64) -> Result<Vec<f64>> {
        let index: std::collections::HashMap<Config, usize> = states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
        let d = states.len();
        let mut p = vec![0.0; d * d];
        for (i, &z) in states.iter().enumerate() {
            let mut stay = 1.0;
            for m in self.moves(z) {
                let j = *index.get(&m.to).ok_or_else(|| Error::Config("move leaves the supplied state space".into()))?;
                let a = m.proposal * (-beta * m.delta_h).exp().min(1.0);
                p[i * d + j] += a;
                stay -= a;
            }
            p[i * d + i] += stay;
        }
        Ok(p)
    }
}

/// Gibbs weights `e^{−βH}/Z` over `states`.
pub fn gibbs(dynamics: &Dynamics, states: &[Config], beta: f64) -> Vec<f64> {
    let e: Vec<f64> = states.iter().map(|&z| dynamics.energy(z)).collect();
    let e0 = e.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = e.iter().map(|&x| (-beta * (x - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Total-variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_star, GraphKind};

    #[test]
    fn transition_rows_are_stochastic_and_balanced() {
        let g = generate_star(2, 2).unwrap();
        for c in [Constraint::Restricted, Constraint::Penalty { u: 2.0 }] {
            let d = Dynamics::new(&g, UpdateMix::default(), c, 1.0).unwrap();
            let s = d.state_space(&g, 1 << 12).unwrap();
            let p = d.transition_matrix(&s, 1.3).unwrap();
            let pi = gibbs(&d, &s, 1.3);
            let n = s.len();
            for i in 0..n {
                assert!((p[i * n..(i + 1) * n].iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for j in 0..n {
                    assert!((pi[i] * p[i * n + j] - pi[j] * p[j * n + i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn adding_to_empty_vertex_is_downhill() {
        let g = Graph::new(GraphKind::Generic, 1, []).unwrap();
        let d = Dynamics::new(&g, UpdateMix { flip: 1.0, exchange: 0.0 }, Constraint::Restricted, 1.0).unwrap();
        let m = d.moves(0);
        assert_eq!(m, vec![Move { to: 1, proposal: 1.0, delta_h: -1.0 }]);
    }

    #[test]
    fn zero_mix_rejected() {
        let g = generate_star(2, 2).unwrap();
        assert!(Dynamics::new(&g, UpdateMix { flip: 0.0, exchange: 0.0 }, Constraint::Restricted, 1.0).is_err());
    }
}
