//! Parallel tempering with replica exchange and isoenergetic cluster moves.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::dynamics::{Constraint, Dynamics, UpdateMix};
use super::sa::{resolve_target, McResult};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::landscape::{popcount, Config};
use crate::rng::{self, uniform};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PtConfig {
    /// Sorted ascending; one replica per entry.
    pub betas: Vec<f64>,
    pub sweeps: usize,
    pub mix: UpdateMix,
    pub constraint: Constraint,
    pub delta: f64,
    /// Attempt replica exchanges every this many sweeps (0 disables them).
    pub swap_every: usize,
    /// Attempt one isoenergetic cluster move per sweep.
    pub isoenergetic: bool,
    pub seed: u64,
    pub stream: u64,
    pub target: Option<usize>,
    pub stop_at_hit: bool,
}

impl Default for PtConfig {
    fn default() -> Self {
        PtConfig {
            betas: super::sa::geometric_schedule(0.2, 2.0, 4),
            sweeps: 1000,
            mix: UpdateMix::default(),
            constraint: Constraint::Restricted,
            delta: 1.0,
            swap_every: 1,
            isoenergetic: false,
            seed: 0,
            stream: 0,
            target: None,
            stop_at_hit: false,
        }
    }
}

/// The replica ensemble and its moves.
pub struct Tempering<'a> {
    pub dynamics: &'a Dynamics,
    g: &'a Graph,
    pub betas: Vec<f64>,
    pub states: Vec<Config>,
}

impl<'a> Tempering<'a> {
    pub fn new(dynamics: &'a Dynamics, g: &'a Graph, betas: Vec<f64>, start: Config) -> Self {
        let m = betas.len();
        Tempering { dynamics, g, betas, states: vec![start; m] }
    }

    /// One sweep of local updates on every replica; returns accepted counts.
    pub fn sweep<R: RngCore + ?Sized>(&mut self, rng: &mut R, accepted: &mut [usize]) {
        for (r, z) in self.states.iter_mut().enumerate() {
            for _ in 0..self.dynamics.n() {
                if self.dynamics.step(z, self.betas[r], rng) {
                    accepted[r] += 1;
                }
            }
        }
    }

    /// Exchange attempts between every adjacent pair, accepted with
    /// `min(1, e^{(β_i − β_j)(H_i − H_j)})`.
    pub fn swaps<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> usize {
        let mut done = 0;
        for i in 0..self.betas.len().saturating_sub(1) {
            let j = i + 1;
            let x = (self.betas[i] - self.betas[j]) * (self.dynamics.energy(self.states[i]) - self.dynamics.energy(self.states[j]));
            if x >= 0.0 || uniform(rng) < x.exp() {
                self.states.swap(i, j);
                done += 1;
            }
        }
        done
    }

    /// Connected components of the problem graph induced on `z_i ⊕ z_j`.
    pub fn clusters(&self, i: usize, j: usize) -> Vec<Config> {
        let diff = self.states[i] ^ self.states[j];
        let mut seen: Config = 0;
        let mut out = Vec::new();
        for s in 0..self.g.n() {
            if diff >> s & 1 == 0 || seen >> s & 1 == 1 {
                continue;
            }
            let mut comp: Config = 1 << s;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in self.g.neighbors(u) {
                    if diff >> v & 1 == 1 && comp >> v & 1 == 0 {
                        comp |= 1 << v;
                        stack.push(v);
                    }
                }
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    /// Swaps a uniformly chosen cluster of the symmetric difference between
    /// a uniformly chosen adjacent replica pair. The total energy is
    /// unchanged in restricted mode; the move is accepted with
    /// `min(1, e^{−β_i ΔH_i − β_j ΔH_j})`, which is 1 at equal `β`.
    pub fn isoenergetic<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> bool {
        let m = self.betas.len();
        if m < 2 {
            return false;
        }
        let i = ((uniform(rng) * (m - 1) as f64) as usize).min(m - 2);
        let j = i + 1;
        let cl = self.clusters(i, j);
        if cl.is_empty() {
            return false;
        }
        let c = cl[((uniform(rng) * cl.len() as f64) as usize).min(cl.len() - 1)];
        let (zi, zj) = (self.states[i] ^ c, self.states[j] ^ c);
        let d = self.dynamics;
        let dhi = d.energy(zi) - d.energy(self.states[i]);
        let dhj = d.energy(zj) - d.energy(self.states[j]);
        let x = -self.betas[i] * dhi - self.betas[j] * dhj;
        if x >= 0.0 || uniform(rng) < x.exp() {
            self.states[i] = zi;
            self.states[j] = zj;
            true
        } else {
            false
        }
    }
}

pub fn pt_run(g: &Graph, cfg: &PtConfig) -> Result<McResult> {
    let dynamics = Dynamics::new(g, cfg.mix, cfg.constraint, cfg.delta)?;
    let m = cfg.betas.len();
    if m == 0 {
        return Err(Error::Config("no replicas".into()));
    }
    if cfg.isoenergetic && m < 2 {
        return Err(Error::Config("isoenergetic updates need at least two replicas".into()));
    }
    if cfg.swap_every > 0 && m < 2 {
        return Err(Error::Config("replica exchange needs at least two replicas".into()));
    }
    if cfg.betas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("β ladder must be sorted".into()));
    }
    let target = resolve_target(g, cfg.target)?;
    let mut rng = rng::stream(cfg.seed, cfg.stream);
    let mut t = Tempering::new(&dynamics, g, cfg.betas.clone(), 0);
    let valid = |z: Config| dynamics.violations(z) == 0;
    let mut best: Config = 0;
    let mut first_hit = (target == 0).then_some(0.0);
    let mut accepted = vec![0usize; m];
    let mut sweeps = 0;
    for s in 0..cfg.sweeps {
        t.sweep(&mut rng, &mut accepted);
        if cfg.swap_every > 0 && (s + 1) % cfg.swap_every == 0 {
            t.swaps(&mut rng);
        }
        if cfg.isoenergetic {
            t.isoenergetic(&mut rng);
        }
        sweeps = s + 1;
        for &z in &t.states {
            if valid(z) && popcount(z) > popcount(best) {
                best = z;
            }
        }
        if first_hit.is_none() && popcount(best) >= target {
            first_hit = Some(sweeps as f64);
            if cfg.stop_at_hit {
                break;
            }
        }
    }
    let proposals = (sweeps * dynamics.n()).max(1) as f64;
    Ok(McResult {
        best,
        best_size: popcount(best),
        target,
        first_hit,
        sweeps,
        acceptance: cfg.betas.iter().zip(&accepted).map(|(&b, &a)| (b, a as f64 / proposals)).collect(),
        trace: Vec::new(),
        seed: cfg.seed,
        stream: cfg.stream,
        k: cfg.mix.k(),
    })
}

/// Per-replica visit frequencies over `states` at fixed ladder, recorded
/// once per sweep after `burn_in`.
pub fn pt_histograms(g: &Graph, cfg: &PtConfig, states: &[Config], burn_in: usize) -> Result<Vec<Vec<f64>>> {
    let dynamics = Dynamics::new(g, cfg.mix, cfg.constraint, cfg.delta)?;
    let index: std::collections::HashMap<Config, usize> = states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
    let mut rng = rng::stream(cfg.seed, cfg.stream);
    let m = cfg.betas.len();
    let mut t = Tempering::new(&dynamics, g, cfg.betas.clone(), 0);
    let mut acc = vec![0; m];
    let mut counts = vec![vec![0u64; states.len()]; m];
    for s in 0..burn_in + cfg.sweeps {
        t.sweep(&mut rng, &mut acc);
        if cfg.swap_every > 0 && (s + 1) % cfg.swap_every == 0 {
            t.swaps(&mut rng);
        }
        if cfg.isoenergetic {
            t.isoenergetic(&mut rng);
        }
        if s >= burn_in {
            for r in 0..m {
                let i = *index.get(&t.states[r]).ok_or_else(|| Error::Config("replica left the state space".into()))?;
                counts[r][i] += 1;
            }
        }
    }
    Ok(counts.into_iter().map(|c| c.into_iter().map(|x| x as f64 / cfg.sweeps as f64).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical_mc::dynamics::{gibbs, total_variation};
    use crate::graphs::generate_star;

    #[test]
    fn identical_replicas_have_no_clusters() {
        let g = generate_star(2, 2).unwrap();
        let d = Dynamics::new(&g, UpdateMix::default(), Constraint::Restricted, 1.0).unwrap();
        let mut t = Tempering::new(&d, &g, vec![1.0, 2.0], 0b00110);
        assert!(t.clusters(0, 1).is_empty());
        let mut r = rng::stream(1, 0);
        assert!(!t.isoenergetic(&mut r));
        assert_eq!(t.states, vec![0b00110; 2]);
    }

    #[test]
    fn equal_beta_swaps_always_accepted() {
        let g = generate_star(2, 2).unwrap();
        let d = Dynamics::new(&g, UpdateMix::default(), Constraint::Restricted, 1.0).unwrap();
        let mut t = Tempering::new(&d, &g, vec![1.5, 1.5], 0);
        t.states = vec![0b00010, 0b10100];
        let mut r = rng::stream(2, 0);
        for _ in 0..50 {
            assert_eq!(t.swaps(&mut r), 1);
        }
    }

    #[test]
    fn isoenergetic_move_conserves_total_size() {
        let g = generate_star(3, 2).unwrap();
        let d = Dynamics::new(&g, UpdateMix::default(), Constraint::Restricted, 1.0).unwrap();
        let mut t = Tempering::new(&d, &g, vec![1.0, 1.0], 0);
        let mut r = rng::stream(5, 0);
        let mut acc = vec![0; 2];
        for _ in 0..300 {
            t.sweep(&mut r, &mut acc);
            let before = popcount(t.states[0]) + popcount(t.states[1]);
            assert!(t.isoenergetic(&mut r) || t.clusters(0, 1).is_empty());
            assert_eq!(popcount(t.states[0]) + popcount(t.states[1]), before);
            assert!(t.states.iter().all(|&z| g.is_independent(z)));
        }
    }

    #[test]
    fn ladder_marginals_follow_gibbs() {
        let g = generate_star(2, 2).unwrap();
        let cfg = PtConfig { sweeps: 100_000, isoenergetic: true, seed: 4, ..Default::default() };
        let d = Dynamics::new(&g, cfg.mix, cfg.constraint, 1.0).unwrap();
        let s = d.state_space(&g, 100).unwrap();
        let h = pt_histograms(&g, &cfg, &s, 500).unwrap();
        for (r, &b) in cfg.betas.iter().enumerate() {
            assert!(total_variation(&h[r], &gibbs(&d, &s, b)) < 0.03, "replica {r}");
        }
    }

    #[test]
    fn isoenergetic_needs_two_replicas() {
        let g = generate_star(2, 2).unwrap();
        let cfg = PtConfig { betas: vec![1.0], swap_every: 0, isoenergetic: true, ..Default::default() };
        assert!(matches!(pt_run(&g, &cfg), Err(Error::Config(_))));
    }
}
