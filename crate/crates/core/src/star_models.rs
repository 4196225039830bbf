//! Closed-form predictions for star graphs: `n_b` branches of `ℓ` vertices
//! joined at a central vertex.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::branch_vertex;
use crate::landscape::Config;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarPrediction {
    pub n_b: usize,
    pub l: usize,
    pub n: usize,
    pub alpha: usize,
    /// Largest adjacency eigenvalue of the per-branch domain-wall path.
    pub c_l: f64,
    /// `(Ω/δ)⋆`.
    pub crossing: f64,
    /// `−E⋆/n` with `δ = 1`.
    pub e_star_per_n: f64,
    /// Leading-order resolvent gap `2Ω [sin(π/(ℓ/2+2))/√(ℓ/4+1)]^{n_b}`.
    pub tilde_gap: f64,
    pub omega: f64,
    /// `D_{α−1}` split by the occupation of the central vertex.
    pub central_absent: BigUint,
    pub central_present: BigUint,
    /// Uses `⟨E|H_se|E⟩ ≈ c_ℓ n_b`, exact only as `n_b → ∞`.
    pub asymptotic: bool,
}

impl StarPrediction {
    pub fn d_alpha_minus_one(&self) -> BigUint {
        &self.central_absent + &self.central_present
    }
}

fn check_l(l: usize) -> Result<()> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::Config(format!("branch length ℓ = {l} must be even and at least 2")));
    }
    Ok(())
}

/// `2 cos(π/(ℓ/2+2))`.
pub fn c_l(l: usize) -> f64 {
    2.0 * (std::f64::consts::PI / (l / 2 + 2) as f64).cos()
}

/// `sin(π/(ℓ/2+2))/√(ℓ/4+1)`, the per-branch factor of the resolvent gap.
pub fn branch_factor(l: usize) -> f64 {
    (std::f64::consts::PI / (l / 2 + 2) as f64).sin() / (l as f64 / 4.0 + 1.0).sqrt()
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

pub fn star_level_crossing(n_b: usize, l: usize, omega: f64) -> Result<StarPrediction> {
    check_l(l)?;
    let c = c_l(l);
    let radicand = c * n_b as f64 - 1.0;
    if n_b < 2 || radicand <= 0.0 {
        return Err(Error::Config(format!("c_ℓ n_b − 1 = {radicand} must be positive (n_b ≥ 2)")));
    }
    let half = l / 2;
    let n = l * n_b + 1;
    let alpha = half * n_b + 1;
    Ok(StarPrediction {
        n_b,
        l,
        n,
        alpha,
        c_l: c,
        crossing: (1.0 / radicand).sqrt(),
        e_star_per_n: alpha as f64 / n as f64 * (1.0 + 1.0 / radicand),
        tilde_gap: 2.0 * omega * branch_factor(l).powi(n_b as i32),
        omega,
        // Center empty: every branch path of ℓ vertices holds its ℓ/2 + 1
        // maximum sets. Center occupied: one branch (ℓ − 1 free vertices)
        // falls one short of ℓ/2, C(ℓ/2 + 1, 2) ways.
        central_absent: BigUint::from(half + 1).pow(n_b as u32),
        central_present: BigUint::from(n_b) * binomial(half + 1, 2),
        asymptotic: true,
    })
}

/// `Π_i sin(π x_i/(ℓ/2+2))/√(ℓ/4+1)` for domain-wall positions `x_i ∈ 1..=ℓ/2+1`.
pub fn star_wavefunction(n_b: usize, l: usize, x: &[usize]) -> Result<f64> {
    check_l(l)?;
    if x.len() != n_b {
        return Err(Error::Config(format!("expected {n_b} domain-wall positions, got {}", x.len())));
    }
    let m = l / 2 + 1;
    let norm = (l as f64 / 4.0 + 1.0).sqrt();
    x.iter().try_fold(1.0, |acc, &xi| {
        if xi == 0 || xi > m {
            return Err(Error::Config(format!("domain-wall position {xi} outside 1..={m}")));
        }
        Ok(acc * (std::f64::consts::PI * xi as f64 / (m + 1) as f64).sin() / norm)
    })
}

/// Branch configuration with the domain wall at `x`: the first `x − 1` even
/// positions from the center, then every odd position beyond.
pub fn domain_wall_positions(l: usize, x: usize) -> Vec<usize> {
    let even = (0..x - 1).map(|k| 2 * k);
    let odd = (2 * (x - 1) + 1..l).step_by(2);
    even.chain(odd).collect()
}

/// The product state on the center-empty maximum manifold of `star(n_b, ℓ)`.
pub fn domain_wall_state(n_b: usize, l: usize, limit: usize) -> Result<Vec<(Config, f64)>> {
    check_l(l)?;
    let m = l / 2 + 1;
    let count = (m as f64).powi(n_b as i32);
    if count > limit as f64 || 1 + n_b * l > 128 {
        return Err(Error::Capacity(format!("{count} domain-wall configurations exceed the limit {limit}")));
    }
    let masks: Vec<Config> = (1..=m)
        .map(|x| domain_wall_positions(l, x).iter().fold(0, |z, &p| z | 1 << branch_vertex(l, 0, p)))
        .collect();
    let mut out = Vec::with_capacity(count as usize);
    let mut x = vec![1usize; n_b];
    loop {
        let z = x.iter().enumerate().fold(0 as Config, |z, (br, &xi)| z | masks[xi - 1] << (br * l));
        out.push((z, star_wavefunction(n_b, l, &x)?));
        let mut i = 0;
        while i < n_b && x[i] == m {
            x[i] = 1;
            i += 1;
        }
        if i == n_b {
            break;
        }
        x[i] += 1;
    }
    Ok(out)
}
