//! Lowest-order gap estimate from Hamming distances between the
//! configurations carrying `|G⟩` and `|E⟩`.

use serde::{Deserialize, Serialize};

use crate::landscape::Config;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HammingEstimate {
    pub estimate: f64,
    /// `(d, Σ_{d(z,z')=d} G_z E_{z'})` for every distance that occurs.
    pub histogram: Vec<(usize, f64)>,
}

/// `2 Σ_{z,z'} r^{d(z,z')} G_z E_{z'}` with `r = (Ω/δ)⋆`.
pub fn hamming_gap_estimate(g: &[(Config, f64)], e: &[(Config, f64)], ratio: f64) -> HammingEstimate {
    let gs: Vec<_> = g.iter().copied().filter(|x| x.1 != 0.0).collect();
    let es: Vec<_> = e.iter().copied().filter(|x| x.1 != 0.0).collect();
    let mut mass: Vec<f64> = Vec::new();
    for &(z, a) in &gs {
        for &(y, b) in &es {
            let d = (z ^ y).count_ones() as usize;
            if mass.len() <= d {
                mass.resize(d + 1, 0.0);
            }
            mass[d] += a * b;
        }
    }
    let estimate = 2.0 * mass.iter().enumerate().map(|(d, m)| ratio.powi(d as i32) * m).sum::<f64>();
    let histogram = mass.into_iter().enumerate().filter(|x| x.1 != 0.0).collect();
    HammingEstimate { estimate, histogram }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair_at_distance_one() {
        let r = hamming_gap_estimate(&[(0b01, 1.0)], &[(0b11, 1.0)], 0.3);
        assert!((r.estimate - 0.6).abs() < 1e-15);
        assert_eq!(r.histogram, vec![(1, 1.0)]);
    }

    #[test]
    fn leading_power_dominates_as_ratio_vanishes() {
        let g = [(0b0000_0111u128, 0.8), (0b0011_1000, 0.6)];
        let e = [(0b0001_1000u128, 1.0)];
        // Distances 5 and 1; as r → 0 the d = 1 term takes over.
        let (r1, r2) = (1e-3, 1e-4);
        let a = hamming_gap_estimate(&g, &e, r1).estimate;
        let b = hamming_gap_estimate(&g, &e, r2).estimate;
        let slope = (a.ln() - b.ln()) / (r1.ln() - r2.ln());
        assert!((slope - 1.0).abs() < 1e-6);
    }
}
