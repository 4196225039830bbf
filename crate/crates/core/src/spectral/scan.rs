//! Minimum-gap search along the annealing path.

use serde::{Deserialize, Serialize};

use super::eigen::lowest_values;
use super::operator::{Couplings, Terms};
use crate::error::{Error, Result};
use crate::tolerances;

/// Which coupling is held at 1 and sets the energy unit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyUnit {
    /// `δ = 1`; the scan runs over `Ω/δ`.
    #[default]
    Delta,
    /// `Ω = 1`; the scan runs over `δ/Ω`.
    Omega,
}

impl EnergyUnit {
    /// Couplings at scan coordinate `x`.
    pub fn couplings(self, x: f64, lambda: f64) -> Couplings {
        match self {
            EnergyUnit::Delta => Couplings::new(x, 1.0).with_lambda(lambda),
            EnergyUnit::Omega => Couplings::new(1.0, x).with_lambda(lambda),
        }
    }

    /// `Ω/δ` at scan coordinate `x`.
    pub fn omega_over_delta(self, x: f64) -> f64 {
        match self {
            EnergyUnit::Delta => x,
            EnergyUnit::Omega => 1.0 / x,
        }
    }

    /// Scan coordinate for a given `Ω/δ`.
    pub fn coordinate(self, omega_over_delta: f64) -> f64 {
        self.omega_over_delta(omega_over_delta)
    }

    pub fn default_range(self) -> (f64, f64) {
        match self {
            EnergyUnit::Delta => (0.02, 2.0),
            EnergyUnit::Omega => (0.5, 50.0),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanConfig {
    pub unit: EnergyUnit,
    /// Scan interval of the coordinate (`Ω/δ` or `δ/Ω`).
    pub range: (f64, f64),
    pub points: usize,
    pub rel_tol: f64,
    pub lambda: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let unit = EnergyUnit::Delta;
        ScanConfig { unit, range: unit.default_range(), points: tolerances::SCAN_GRID, rel_tol: tolerances::GOLDEN_REL_TOL, lambda: 0.0 }
    }
}

impl ScanConfig {
    pub fn in_unit(unit: EnergyUnit) -> Self {
        ScanConfig { unit, range: unit.default_range(), ..Default::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapScan {
    pub unit: EnergyUnit,
    pub lambda: f64,
    /// Minimizing scan coordinate.
    pub coordinate: f64,
    /// `(Ω/δ)⋆`.
    pub crossing: f64,
    /// `Δ_QAA` in the chosen unit.
    pub gap: f64,
    /// Ground energy at the minimum, in the chosen unit.
    pub e_star: f64,
    /// Set when the smallest grid gap sits on the edge of the range.
    pub boundary_minimum: bool,
    /// Final bracket and the gaps at its ends.
    pub bracket: (f64, f64),
    pub bracket_gaps: (f64, f64),
    pub grid: Vec<(f64, f64)>,
    pub evaluations: usize,
}

/// `(E_0, E_1)` of `terms` at scan coordinate `x`.
pub fn levels_at(terms: &Terms, unit: EnergyUnit, x: f64, lambda: f64) -> Result<(f64, f64)> {
    let h = terms.hamiltonian(unit.couplings(x, lambda))?;
    let v = lowest_values(&h, 2)?;
    if v.len() < 2 {
        return Err(Error::Config("gap of a one-dimensional space".into()));
    }
    Ok((v[0], v[1]))
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let geometric = lo > 0.0 && hi / lo > 10.0;
    (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            if geometric {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect()
}

/// Coarse grid followed by golden-section refinement around the smallest
/// gap.
pub fn min_gap_scan(terms: &Terms, cfg: &ScanConfig) -> Result<GapScan> {
    let (lo, hi) = cfg.range;
    if !(lo > 0.0 && hi > lo && cfg.points >= 3 && cfg.rel_tol > 0.0) {
        return Err(Error::Config(format!("invalid scan range ({lo}, {hi}) with {} points", cfg.points)));
    }
    let mut evaluations = 0;
    let mut gap_at = |x: f64| -> Result<(f64, f64)> {
        evaluations += 1;
        let (e0, e1) = levels_at(terms, cfg.unit, x, cfg.lambda)?;
        Ok((e1 - e0, e0))
    };
    let xs = grid(lo, hi, cfg.points);
    let mut samples = Vec::with_capacity(xs.len());
    for &x in &xs {
        samples.push((x, gap_at(x)?.0));
    }
    let i = (0..samples.len()).min_by(|&a, &b| samples[a].1.total_cmp(&samples[b].1)).unwrap();
    let last = samples.len() - 1;
    if i == 0 || i == last {
        let (g, e0) = gap_at(xs[i])?;
        let nb = if i == 0 { samples[1].1 } else { samples[last - 1].1 };
        let br = if i == 0 { (xs[0], xs[1]) } else { (xs[last - 1], xs[last]) };
        return Ok(GapScan {
            unit: cfg.unit,
            lambda: cfg.lambda,
            coordinate: xs[i],
            crossing: cfg.unit.omega_over_delta(xs[i]),
            gap: g,
            e_star: e0,
            boundary_minimum: true,
            bracket: br,
            bracket_gaps: if i == 0 { (g, nb) } else { (nb, g) },
            grid: samples,
            evaluations,
        });
    }

    // Golden section on [a, b] with interior points c < d.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
    let (mut fa, mut fb) = (samples[i - 1].1, samples[i + 1].1);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = gap_at(c)?.0;
    let mut fd = gap_at(d)?.0;
    while (b - a) > cfg.rel_tol * (a.abs() + b.abs()) / 2.0 {
        if fc <= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gap_at(c)?.0;
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gap_at(d)?.0;
        }
    }
    let x = if fc <= fd { c } else { d };
    let (g, e0) = gap_at(x)?;
    Ok(GapScan {
        unit: cfg.unit,
        lambda: cfg.lambda,
        coordinate: x,
        crossing: cfg.unit.omega_over_delta(x),
        gap: g,
        e_star: e0,
        boundary_minimum: false,
        bracket: (a, b),
        bracket_gaps: (fa, fb),
        grid: samples,
        evaluations,
    })
}
