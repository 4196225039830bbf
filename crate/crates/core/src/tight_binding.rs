//! The `λ → ∞` reduction to a chain over the uniform superpositions `|S_b⟩`:
//! `H_tb = −Σ_b δ b |b⟩⟨b| − Σ_{b≥1} t_b (|b⟩⟨b−1| + h.c.)` with
//! `t_b = Ω b √(D_b/D_{b−1})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::landscape::{configuration_graph, independence_polynomial, LandscapeProfile};
use crate::linalg::tridiag::SymTridiagonal;
use crate::real::Real;
use crate::spectral::{build_terms, min_gap_scan, EnergyUnit, GapScan, Mode, ScanConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainModel<T> {
    pub alpha: usize,
    /// `couplings[b − 1] = t_b`, coupling sites `b − 1` and `b`.
    pub couplings: Vec<T>,
    pub omega: T,
}

impl<T: Real> ChainModel<T> {
    pub fn from_couplings(couplings: Vec<T>, omega: T) -> Result<Self> {
        if let Some(b) = couplings.iter().position(|&t| !(t > T::zero()) || !t.is_finite()) {
            return Err(Error::Config(format!("broken chain: coupling t_{} = {} is not positive", b + 1, couplings[b])));
        }
        Ok(ChainModel { alpha: couplings.len(), couplings, omega })
    }

    /// `t_b`, for `1 ≤ b ≤ α`.
    pub fn t(&self, b: usize) -> T {
        self.couplings[b - 1]
    }

    /// `H_tb` at detuning `δ` on sites `0..=last`.
    pub fn hamiltonian(&self, delta: T, last: usize) -> SymTridiagonal<T> {
        let diag = (0..=last).map(|b| -delta * T::from_usize(b).unwrap()).collect();
        let off = (1..=last).map(|b| -self.t(b)).collect();
        SymTridiagonal::new(diag, off)
    }

    /// Full chain, sites `0..=α`.
    pub fn full(&self, delta: T) -> SymTridiagonal<T> {
        self.hamiltonian(delta, self.alpha)
    }

    /// Bulk chain, sites `0..α` (the last site removed).
    pub fn bulk(&self, delta: T) -> SymTridiagonal<T> {
        self.hamiltonian(delta, self.alpha - 1)
    }

    pub fn gap(&self, delta: T) -> T {
        let h = self.full(delta);
        h.eigenvalue(1) - h.eigenvalue(0)
    }

    pub fn bulk_gap(&self, delta: T) -> T {
        let h = self.bulk(delta);
        if h.len() < 2 {
            return T::infinity();
        }
        h.eigenvalue(1) - h.eigenvalue(0)
    }

    /// Index `b` of the smallest coupling `t_b`.
    pub fn weakest(&self) -> usize {
        1 + (0..self.alpha).min_by(|&a, &b| self.couplings[a].partial_cmp(&self.couplings[b]).unwrap()).unwrap()
    }
}

/// Chain couplings of a landscape profile.
pub fn build_chain<T: Real>(p: &LandscapeProfile, omega: T) -> Result<ChainModel<T>> {
    let couplings = (1..=p.alpha())
        .map(|b| {
            // ratio(b) = D_{b−1}/D_b
            let r = p.ratio(b);
            omega * T::from_usize(b).unwrap() / T::lit(r).sqrt()
        })
        .collect();
    ChainModel::from_couplings(couplings, omega)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainGapProfile {
    /// Detuning where the bulk ground energy meets the last site's, `E₀ = −δ⋆ α`.
    pub delta_star: f64,
    /// Minimum gap of the full chain over the scan.
    pub gap: f64,
    /// Detuning of the minimum gap.
    pub delta_min: f64,
    /// `t_α |⟨ψ₀(δ⋆)|α − 1⟩|`, the coupling of the last site to the bulk ground state.
    pub bj_coupling: f64,
    /// Overlap `|⟨ψ₀(δ⋆)|α − 1⟩|`.
    pub bulk_overlap: f64,
    pub weakest: usize,
    pub range: (f64, f64),
    /// The minimum sits on the scan edge or the resonance lies outside the range.
    pub boundary: bool,
    pub curve: Vec<(f64, f64)>,
}

/// `δ⋆` by bisection on `E₀^bulk(δ) + δα`, which is negative at `δ = 0`
/// and grows without bound.
pub fn resonance<T: Real>(chain: &ChainModel<T>) -> Result<T> {
    if chain.alpha < 2 {
        return Err(Error::Config("a chain with α < 2 has no interior resonance".into()));
    }
    let a = T::from_usize(chain.alpha).unwrap();
    let f = |d: T| chain.bulk(d).eigenvalue(0) + d * a;
    let mut hi = T::one();
    let mut tries = 0;
    while f(hi) <= T::zero() {
        hi *= T::lit(2.0);
        tries += 1;
        if tries > 200 {
            return Err(Error::NonConvergence("resonance bracket not found".into()));
        }
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if f(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= T::epsilon() * T::lit(8.0) * hi {
            break;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// Gap curve of the chain over `range` (default `[δ⋆/50, 2δ⋆]`), refined by
/// golden section around the grid minimum and around `δ⋆`.
pub fn chain_gap_profile<T: Real>(chain: &ChainModel<T>, range: Option<(f64, f64)>, points: usize) -> Result<ChainGapProfile> {
    let dstar = resonance(chain)?;
    let ds = dstar.to_f64_lossy();
    let (lo, hi) = range.unwrap_or((0.02 * ds, 2.0 * ds));
    if !(hi > lo && lo >= 0.0 && points >= 3) {
        return Err(Error::Config(format!("invalid detuning range ({lo}, {hi})")));
    }
    let gap = |d: f64| chain.gap(T::lit(d)).to_f64_lossy();
    let curve: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let d = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (d, gap(d))
        })
        .collect();
    let golden = |mut a: f64, mut b: f64| {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (gap(c), gap(d));
        while b - a > 1e-12 * b.abs().max(1.0) {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = gap(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = gap(d);
            }
        }
        if fc <= fd {
            (c, fc)
        } else {
            (d, fd)
        }
    };
    let i = (0..points).min_by(|&a, &b| curve[a].1.total_cmp(&curve[b].1)).unwrap();
    let (mut dmin, mut gmin) = curve[i];
    let mut candidates = vec![golden(curve[i.saturating_sub(1)].0, curve[(i + 1).min(points - 1)].0)];
    // The resonance dip can be narrower than a grid cell.
    let cell = (hi - lo) / (points - 1) as f64;
    if ds > lo && ds < hi {
        candidates.push(golden((ds - cell).max(lo), (ds + cell).min(hi)));
    }
    for (x, g) in candidates {
        if g < gmin {
            dmin = x;
            gmin = g;
        }
    }
    let edge = 1e-9 * (hi - lo);
    let boundary = dmin - lo < edge || hi - dmin < edge || ds < lo || ds > hi;
    let bulk = chain.bulk(dstar);
    let psi0 = bulk.eigenvector(bulk.eigenvalue(0), &[]);
    let overlap = psi0[chain.alpha - 1].abs();
    Ok(ChainGapProfile {
        delta_star: ds,
        gap: gmin,
        delta_min: dmin,
        bj_coupling: (chain.t(chain.alpha) * T::lit(overlap.to_f64_lossy())).to_f64_lossy(),
        bulk_overlap: overlap.to_f64_lossy(),
        weakest: chain.weakest(),
        range: (lo, hi),
        boundary,
        curve,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BulkDiagnostics {
    /// `∫₀¹ t(x)^{−1/2} dx` for `t(x) = t_b/α` at `x = b/α`.
    pub u1: f64,
    /// `3π²/(α u1)²`.
    pub fundamental_bound: f64,
    /// `(δ, Δ_bulk(δ))`.
    pub bulk_gaps: Vec<(f64, f64)>,
    /// Samples with `Δ_bulk < fundamental_bound`.
    pub violations: usize,
    /// The same comparison per site, `Δ_bulk/α` against the bound.
    pub density_violations: usize,
    pub fit: Option<CouplingFit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingFit {
    pub a: f64,
    pub c: f64,
    pub residual: f64,
}

/// Trapezoid rule for `∫₀¹ t(x)^{−1/2}` over the nodes `x = b/α`; the first
/// cell, where `t ∝ √x`, is integrated exactly (`(4/3) f₁/α`).
pub fn u1<T: Real>(chain: &ChainModel<T>) -> f64 {
    let a = chain.alpha as f64;
    let f = |b: usize| (chain.t(b).to_f64_lossy() / a).powf(-0.5);
    let mut s = (4.0 / 3.0) * f(1);
    for b in 1..=chain.alpha {
        let w = if b == 1 || b == chain.alpha { 0.5 } else { 1.0 };
        if chain.alpha > 1 {
            s += w * f(b);
        }
    }
    s / a
}

/// Weighted least squares of `ln(t(x)/√x) = ln A + c ln(1 − x)` over
/// `x = b/α < 1`, with the last two couplings weighted by 1/4.
pub fn fit_couplings<T: Real>(chain: &ChainModel<T>) -> Result<CouplingFit> {
    let a = chain.alpha as f64;
    if chain.alpha < 4 {
        return Err(Error::Config("coupling fit needs α ≥ 4".into()));
    }
    let mut rows = Vec::new();
    for b in 1..chain.alpha {
        let x = b as f64 / a;
        let t = chain.t(b).to_f64_lossy() / a;
        if t <= 0.0 {
            return Err(Error::Degenerate(format!("nonpositive coupling t_{b}")));
        }
        let w = if b + 2 >= chain.alpha { 0.25 } else { 1.0 };
        rows.push((w, (1.0 - x).ln(), (t / x.sqrt()).ln()));
    }
    let sw: f64 = rows.iter().map(|r| r.0).sum();
    let mx = rows.iter().map(|r| r.0 * r.1).sum::<f64>() / sw;
    let my = rows.iter().map(|r| r.0 * r.2).sum::<f64>() / sw;
    let sxx: f64 = rows.iter().map(|r| r.0 * (r.1 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| r.0 * (r.1 - mx) * (r.2 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Degenerate("coupling fit is singular".into()));
    }
    let c = sxy / sxx;
    let ln_a = my - c * mx;
    let residual = (rows.iter().map(|r| r.0 * (r.2 - ln_a - c * r.1).powi(2)).sum::<f64>() / sw).sqrt();
    Ok(CouplingFit { a: ln_a.exp(), c, residual })
}

/// Continuum diagnostics: `u(1)`, the fundamental-gap bound and the bulk gap
/// at `samples` detunings in `[0, 2δ⋆]`.
pub fn bulk_diagnostics<T: Real>(chain: &ChainModel<T>, samples: usize) -> Result<BulkDiagnostics> {
    let dstar = resonance(chain)?.to_f64_lossy();
    let u = u1(chain);
    let a = chain.alpha as f64;
    let bound = 3.0 * std::f64::consts::PI.powi(2) / (a * u).powi(2);
    let n = samples.max(2);
    let bulk_gaps: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let d = 2.0 * dstar * i as f64 / (n - 1) as f64;
            (d, chain.bulk_gap(T::lit(d)).to_f64_lossy())
        })
        .collect();
    let violations = bulk_gaps.iter().filter(|g| g.1 < bound).count();
    let density_violations = bulk_gaps.iter().filter(|g| g.1 / a < bound).count();
    let fit = fit_couplings(chain).ok();
    Ok(BulkDiagnostics { u1: u, fundamental_bound: bound, bulk_gaps, violations, density_violations, fit })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Segment {
    pub delta_start: f64,
    pub delta_end: f64,
    /// `|dδ/dt|`.
    pub rate: f64,
    pub duration: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schedule {
    pub segments: Vec<Segment>,
    pub total_duration: f64,
    /// Adiabatic safety factor in `|dδ/dt| = c Δ²`.
    pub c: f64,
    pub window: (f64, f64),
    /// `(t, δ(t))` samples.
    pub samples: Vec<(f64, f64)>,
}

/// Linear sweep over the scanned range that slows to `c Δ_tb²` inside a
/// window of width `width_factor · Δ_tb` centered on `δ⋆`. Outside the
/// window the rate is `c g²` with `g` the smallest gap of the curve there.
pub fn synthesize_schedule(profile: &ChainGapProfile, c: f64, width_factor: f64, resolution: usize) -> Result<Schedule> {
    if profile.boundary || !(profile.delta_star > profile.range.0 && profile.delta_star < profile.range.1) {
        return Err(Error::Config("no resolved resonance to slow down at".into()));
    }
    if !(c > 0.0 && width_factor > 0.0 && profile.gap > 0.0) {
        return Err(Error::Config("schedule needs c > 0, a positive window and a positive gap".into()));
    }
    let (lo, hi) = profile.range;
    let half = 0.5 * width_factor * profile.gap;
    let w = ((profile.delta_star - half).max(lo), (profile.delta_star + half).min(hi));
    let outside = profile.curve.iter().filter(|p| p.0 < w.0 || p.0 > w.1).map(|p| p.1).fold(f64::INFINITY, f64::min);
    let fast = c * if outside.is_finite() { outside.max(profile.gap) } else { profile.gap }.powi(2);
    let slow = c * profile.gap.powi(2);
    let mut segments = Vec::new();
    for (s, e, r) in [(lo, w.0, fast), (w.0, w.1, slow), (w.1, hi, fast)] {
        if e > s {
            segments.push(Segment { delta_start: s, delta_end: e, rate: r, duration: (e - s) / r });
        }
    }
    let total_duration = segments.iter().map(|s| s.duration).sum();
    let mut samples = Vec::new();
    let res = resolution.max(2);
    let mut t0 = 0.0;
    for s in &segments {
        for k in 0..res {
            let f = k as f64 / res as f64;
            samples.push((t0 + f * s.duration, s.delta_start + f * (s.delta_end - s.delta_start)));
        }
        t0 += s.duration;
    }
    samples.push((t0, hi));
    Ok(Schedule { segments, total_duration, c, window: w, samples })
}

/// Whether every manifold `0 ≤ b ≤ α` is connected under spin exchange, so
/// that the `λ → ∞` low-energy space is spanned by the `|S_b⟩`.
pub fn manifolds_connected(g: &Graph) -> Result<bool> {
    let alpha = independence_polynomial(g)?.alpha();
    for b in 0..=alpha {
        if configuration_graph(g, b)?.components().len() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainComparison {
    pub chain: ChainGapProfile,
    /// Minimum gap of the full modified Hamiltonian with `Ω = 1`, scanning `δ`.
    pub full: GapScan,
    pub lambda: f64,
    /// `|Δ_tb − Δ_full|/Δ_tb`.
    pub relative_difference: f64,
    pub connected: bool,
}

/// Chain gap at `Ω = 1` against the full restricted-space gap of
/// `−δ n̂ − Ω X + λ H_ℓ` over the same detuning window.
pub fn compare_with_full(g: &Graph, lambda: f64, points: usize) -> Result<ChainComparison> {
    let p = independence_polynomial(g)?;
    let chain: ChainModel<f64> = build_chain(&p, 1.0)?;
    let profile = chain_gap_profile(&chain, None, points)?;
    let terms = build_terms(g, Mode::Restricted, None)?;
    let cfg = ScanConfig { unit: EnergyUnit::Omega, range: profile.range, points, lambda, ..Default::default() };
    let mut full = min_gap_scan(&terms, &cfg)?;
    let cell = (profile.range.1 - profile.range.0) / (points - 1) as f64;
    let near = ((profile.delta_min - 2.0 * cell).max(profile.range.0), (profile.delta_min + 2.0 * cell).min(profile.range.1));
    let local = min_gap_scan(&terms, &ScanConfig { range: near, ..cfg })?;
    if local.gap < full.gap {
        full = GapScan { boundary_minimum: full.boundary_minimum && local.boundary_minimum, ..local };
    }
    let relative_difference = (profile.gap - full.gap).abs() / profile.gap;
    Ok(ChainComparison { relative_difference, connected: manifolds_connected(g)?, chain: profile, full, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_star;
    use crate::linalg::dense::sym_eigen;

    #[test]
    fn star22_couplings() {
        let p = LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap();
        let c: ChainModel<f64> = build_chain(&p, 1.0).unwrap();
        let want = [5f64.sqrt(), 2.0 * (6.0f64 / 5.0).sqrt(), 3.0 * (1.0f64 / 6.0).sqrt()];
        for (a, b) in c.couplings.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn edgeless_binomial_couplings() {
        let n = 7;
        let counts: Vec<u64> = (0..=n).map(|b| (0..b).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)).collect();
        let p = LandscapeProfile::from_u64(n, &counts).unwrap();
        let c: ChainModel<f64> = build_chain(&p, 0.5).unwrap();
        for b in 1..=n {
            let want = 0.5 * b as f64 * (((n - b + 1) as f64) / b as f64).sqrt();
            assert!((c.t(b) - want).abs() < 1e-13);
        }
        assert!((c.t(1) - 0.5 * (n as f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn single_precision_chain() {
        let p = LandscapeProfile::from_u64(5, &[1, 5, 6, 1]).unwrap();
        let c: ChainModel<f32> = build_chain(&p, 1.0).unwrap();
        let d: ChainModel<f64> = build_chain(&p, 1.0).unwrap();
        assert!((c.gap(0.7) as f64 - d.gap(0.7)).abs() < 1e-5);
    }

    #[test]
    fn three_site_resonance() {
        // Weak last link: the gap at resonance is twice the coupling of the
        // last site to the bulk ground state.
        let chain = ChainModel::from_couplings(vec![1.0, 0.01], 1.0).unwrap();
        let prof = chain_gap_profile(&chain, None, 65).unwrap();
        let h = chain.full(prof.delta_min);
        let dense = sym_eigen(&h.to_dense(), 3, false).unwrap();
        assert!((dense.values[1] - dense.values[0] - prof.gap).abs() < 1e-12);
        assert!((prof.gap - 2.0 * prof.bj_coupling).abs() < 0.02 * prof.gap, "{} vs {}", prof.gap, prof.bj_coupling);
        assert!((prof.delta_min - prof.delta_star).abs() < 1e-2 * prof.delta_star);
    }

    #[test]
    fn uniform_chain_bound() {
        // t(x) = t constant (t_b = α t): u1 = t^{-1/2} up to the first-cell rule.
        let (alpha, t) = (40usize, 0.7);
        let chain = ChainModel::from_couplings(vec![alpha as f64 * t; alpha], 1.0).unwrap();
        let u = u1(&chain);
        let want = (1.0 + 1.0 / (3.0 * alpha as f64)) / t.sqrt();
        assert!((u - want).abs() < 1e-12);
        // Uniform bulk of α sites at δ = 0: gap 2αt(cos(π/(α+1)) − cos(2π/(α+1))).
        let bulk_gap = chain.bulk_gap(0.0);
        let th = std::f64::consts::PI / (alpha as f64 + 1.0);
        let exact = 2.0 * alpha as f64 * t * (th.cos() - (2.0 * th).cos());
        assert!((bulk_gap - exact).abs() < 1e-10);
        let d = bulk_diagnostics(&chain, 9).unwrap();
        assert_eq!(d.violations, 0);
    }

    #[test]
    fn fit_recovers_universal_curve() {
        let alpha = 217;
        let couplings: Vec<f64> = (1..=alpha)
            .map(|b| {
                let x = b as f64 / alpha as f64;
                alpha as f64 * 1.80 * x.sqrt() * (1.0 - x).powf(1.04) + if b == alpha { 1e-3 } else { 0.0 }
            })
            .collect();
        let chain = ChainModel::from_couplings(couplings, 1.0).unwrap();
        let f = fit_couplings(&chain).unwrap();
        assert!((f.a - 1.80).abs() < 1e-9 && (f.c - 1.04).abs() < 1e-9, "{f:?}");
    }

    #[test]
    fn resonance_needs_two_links() {
        let chain = ChainModel::from_couplings(vec![1.0], 1.0).unwrap();
        assert!(matches!(resonance(&chain), Err(Error::Config(_))));
    }

    #[test]
    fn schedule_window_arithmetic() {
        let g = generate_star(6, 2).unwrap();
        let chain: ChainModel<f64> = build_chain(&independence_polynomial(&g).unwrap(), 1.0).unwrap();
        let prof = chain_gap_profile(&chain, None, 129).unwrap();
        let s = synthesize_schedule(&prof, 0.1, 1.0, 8).unwrap();
        let win = &s.segments[1];
        assert!((win.duration - 1.0 / (0.1 * prof.gap)).abs() < 1e-9 * win.duration);
        assert!(s.window.0 < prof.delta_star && prof.delta_star < s.window.1);
        assert!(prof.range.0 <= s.window.0 && s.window.1 <= prof.range.1);
    }

    #[test]
    fn star62_matches_full_at_large_lambda() {
        let c = compare_with_full(&generate_star(6, 2).unwrap(), 50.0, 64).unwrap();
        assert!(c.connected);
        assert!(c.relative_difference < 0.1, "{c:?}");
    }

    #[test]
    fn broken_chain_rejected() {
        assert!(ChainModel::from_couplings(vec![1.0, 0.0, 1.0], 1.0).is_err());
    }
}
