//! Simulated annealing.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::dynamics::{Constraint, Dynamics, UpdateMix};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::landscape::{independence_polynomial, popcount, Config};
use crate::rng;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaConfig {
    /// Inverse temperatures in units of `1/δ`, non-decreasing.
    pub betas: Vec<f64>,
    pub sweeps_per_beta: usize,
    pub mix: UpdateMix,
    pub constraint: Constraint,
    pub delta: f64,
    pub seed: u64,
    pub stream: u64,
    /// Size counted as a solution; the independence number when absent.
    pub target: Option<usize>,
    pub start: Config,
    /// Record `(sweep, energy)` every this many sweeps.
    pub trace_every: Option<usize>,
    /// Stop at the first solution.
    pub stop_at_hit: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            betas: geometric_schedule(0.1, 5.0, 100),
            sweeps_per_beta: 1,
            mix: UpdateMix::default(),
            constraint: Constraint::Restricted,
            delta: 1.0,
            seed: 0,
            stream: 0,
            target: None,
            start: 0,
            trace_every: None,
            stop_at_hit: false,
        }
    }
}

/// `steps` inverse temperatures spaced geometrically from `lo` to `hi`.
pub fn geometric_schedule(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![hi],
        _ => (0..steps).map(|i| lo * (hi / lo).powf(i as f64 / (steps - 1) as f64)).collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McResult {
    pub best: Config,
    pub best_size: usize,
    pub target: usize,
    /// First time, in sweeps of `n` proposals, a target-size set was held.
    pub first_hit: Option<f64>,
    pub sweeps: usize,
    /// `(β, acceptance rate)` per schedule step (per replica for tempering).
    pub acceptance: Vec<(f64, f64)>,
    pub trace: Vec<(usize, f64)>,
    pub seed: u64,
    pub stream: u64,
    /// Largest number of spins one proposal alters.
    pub k: usize,
}

impl McResult {
    pub fn success(&self) -> bool {
        self.first_hit.is_some()
    }
}

pub(crate) fn resolve_target(g: &Graph, target: Option<usize>) -> Result<usize> {
    match target {
        Some(t) => Ok(t),
        None => Ok(independence_polynomial(g)?.alpha()),
    }
}

pub fn sa_run(g: &Graph, cfg: &SaConfig) -> Result<McResult> {
    let dynamics = Dynamics::new(g, cfg.mix, cfg.constraint, cfg.delta)?;
    if cfg.betas.windows(2).any(|w| w[1] < w[0]) || cfg.betas.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::Config("β schedule must be finite, nonnegative and non-decreasing".into()));
    }
    if !dynamics.energy(cfg.start).is_finite() {
        return Err(Error::Config("start configuration is not an independent set".into()));
    }
    let target = resolve_target(g, cfg.target)?;
    let mut rng = rng::stream(cfg.seed, cfg.stream);
    run_schedule(&dynamics, cfg, target, &mut rng)
}

fn run_schedule<R: RngCore>(d: &Dynamics, cfg: &SaConfig, target: usize, rng: &mut R) -> Result<McResult> {
    let n = d.n();
    let mut z = cfg.start;
    let valid = |z: Config| d.violations(z) == 0;
    let mut best = z;
    let mut first_hit = (popcount(z) >= target && valid(z)).then_some(0.0);
    let mut acceptance = Vec::with_capacity(cfg.betas.len());
    let mut trace = Vec::new();
    let mut sweep = 0;
    'outer: for &beta in &cfg.betas {
        let mut accepted = 0usize;
        let mut proposed = 0usize;
        for _ in 0..cfg.sweeps_per_beta {
            for p in 0..n {
                proposed += 1;
                if d.step(&mut z, beta, rng) {
                    accepted += 1;
                    if valid(z) && popcount(z) > popcount(best) {
                        best = z;
                    }
                    if first_hit.is_none() && popcount(z) >= target && valid(z) {
                        first_hit = Some(sweep as f64 + (p + 1) as f64 / n as f64);
                        if cfg.stop_at_hit {
                            acceptance.push((beta, accepted as f64 / proposed as f64));
                            sweep += 1;
                            break 'outer;
                        }
                    }
                }
            }
            sweep += 1;
            if let Some(every) = cfg.trace_every {
                if every > 0 && sweep % every == 0 {
                    trace.push((sweep, d.energy(z)));
                }
            }
        }
        acceptance.push((beta, if proposed > 0 { accepted as f64 / proposed as f64 } else { 0.0 }));
    }
    Ok(McResult {
        best,
        best_size: popcount(best),
        target,
        first_hit,
        sweeps: sweep,
        acceptance,
        trace,
        seed: cfg.seed,
        stream: cfg.stream,
        k: cfg.mix.k(),
    })
}

/// Visit frequencies over `states` of the fixed-`β` chain, recorded once per
/// sweep after `burn_in` sweeps.
pub fn stationary_histogram(
    d: &Dynamics,
    states: &[Config],
    beta: f64,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let index: std::collections::HashMap<Config, usize> = states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
    let mut rng = rng::stream(seed, 0);
    let mut z = states.iter().copied().find(|&z| d.energy(z).is_finite()).ok_or_else(|| Error::Config("no valid state".into()))?;
    let mut counts = vec![0u64; states.len()];
    for s in 0..burn_in + sweeps {
        for _ in 0..d.n() {
            d.step(&mut z, beta, &mut rng);
        }
        if s >= burn_in {
            counts[*index.get(&z).ok_or_else(|| Error::Config("chain left the state space".into()))?] += 1;
        }
    }
    Ok(counts.into_iter().map(|c| c as f64 / sweeps as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical_mc::dynamics::{gibbs, total_variation};
    use crate::graphs::{branch_vertex, generate_star, GraphKind};

    #[test]
    fn single_vertex_hits_immediately() {
        let g = Graph::new(GraphKind::Generic, 1, []).unwrap();
        let cfg = SaConfig { betas: vec![1.0; 10], ..Default::default() };
        let r = sa_run(&g, &cfg).unwrap();
        assert!(r.first_hit.unwrap() <= 10.0);
        assert_eq!(r.acceptance.len(), 10);
    }

    #[test]
    fn zero_temperature_walk_on_star22() {
        let g = generate_star(2, 2).unwrap();
        let start = 1 << branch_vertex(2, 0, 0) | 1 << branch_vertex(2, 1, 0);
        for seed in 0..20 {
            let cfg = SaConfig { betas: vec![1e6; 200], start, seed, ..Default::default() };
            let r = sa_run(&g, &cfg).unwrap();
            assert_eq!(r.best, 1 | 1 << branch_vertex(2, 0, 1) | 1 << branch_vertex(2, 1, 1));
            assert!(r.success());
        }
    }

    #[test]
    fn seeded_runs_reproduce() {
        let g = generate_star(3, 2).unwrap();
        let cfg = SaConfig { seed: 9, trace_every: Some(5), ..Default::default() };
        let a = serde_json::to_string(&sa_run(&g, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&sa_run(&g, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn star22_gibbs_at_beta_one() {
        let g = generate_star(2, 2).unwrap();
        let d = Dynamics::new(&g, UpdateMix::default(), Constraint::Restricted, 1.0).unwrap();
        let s = d.state_space(&g, 100).unwrap();
        let h = stationary_histogram(&d, &s, 1.0, 200_000, 1000, 3).unwrap();
        assert!(total_variation(&h, &gibbs(&d, &s, 1.0)) < 0.02);
    }
}
