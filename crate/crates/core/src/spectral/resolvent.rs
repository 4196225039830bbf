//! Effective Hamiltonian `H_eff(z) = PHP + PHQ (z − QHQ)⁻¹ QHP` on the
//! two-state space `P = |G⟩⟨G| + |E⟩⟨E|` and the gap estimates built on it.

use serde::{Deserialize, Serialize};

use super::eigen::{lowest_eigenpairs, lowest_eigenpairs_with};
use super::operator::{Couplings, Hamiltonian, Terms};
use crate::error::{Error, Result};
use crate::linalg::{axpy, cg, dot, LinearOperator};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "order")]
pub enum ResolventMode {
    /// Linear solves against `QHQ − z` on the complement.
    Exact,
    /// The expansion in powers of the drive, truncated after order `L`.
    Series(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolventConfig {
    pub mode: ResolventMode,
    /// Finite-difference step relative to `|z₀|`.
    pub fd_rel_step: f64,
}

impl Default for ResolventConfig {
    fn default() -> Self {
        ResolventConfig { mode: ResolventMode::Exact, fd_rel_step: tolerances::FD_REL_STEP }
    }
}

/// Entries of the symmetric 2×2 effective Hamiltonian in the `(G, E)` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Heff {
    pub gg: f64,
    pub ee: f64,
    pub ge: f64,
}

impl Heff {
    /// `det[z − H_eff]` for this matrix.
    pub fn secular(&self, z: f64) -> f64 {
        (z - self.gg) * (z - self.ee) - self.ge * self.ge
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub m_gg: f64,
    pub m_ee: f64,
    pub m_ge: f64,
}

/// Overlap diagnostic of the resolvent's validity condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Validity {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    /// `|⟨ψ₀|G⟩⟨ψ₁|E⟩ − ⟨ψ₀|E⟩⟨ψ₁|G⟩|²`.
    pub overlap: f64,
    /// `overlap / (E₁ − E₀)`; the condition asks for this to be large.
    pub overlap_to_gap: f64,
    /// `overlap_to_gap ≥ 10`.
    pub hypothesis_holds: bool,
    /// Ground energy of `QHQ` on the complement minus `E₀`.
    pub delta_e: f64,
    /// `¼ (E₂ − E₁) · overlap`.
    pub lower_bound: f64,
    pub bound_holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolventReport {
    pub mode: ResolventMode,
    pub z0: f64,
    pub heff: Heff,
    /// `2 |⟨G|H_eff(z₀)|E⟩|`.
    pub tilde_gap: f64,
    pub slopes: Slopes,
    /// `"central"` or `"richardson"`.
    pub slope_method: String,
    /// `dH_eff/dz = −⟨y_i, y_j⟩` from the linear solves (exact mode only).
    pub slopes_exact: Option<Slopes>,
    pub f_gg: f64,
    pub f_ee: f64,
    /// `tilde_gap / √(f_gg f_ee)`.
    pub corrected_gap: f64,
    /// Gap of the linearized `H_eff(z)` without dropping `m_ge` or the
    /// diagonal detuning.
    pub linear_gap: f64,
    pub validity: Option<Validity>,
}

/// Restriction of `H − z` to the complement of `P`.
struct Complement<'a> {
    h: &'a Hamiltonian<'a>,
    p: [&'a [f64]; 2],
    shift: f64,
    /// Added on the `P` directions (used to push them out of the spectrum).
    p_weight: f64,
}

impl Complement<'_> {
    fn project(&self, v: &mut [f64]) {
        for p in self.p {
            let c = dot(p, v);
            axpy(-c, p, v);
        }
    }
}

impl LinearOperator<f64> for Complement<'_> {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut qx = x.to_vec();
        self.project(&mut qx);
        self.h.apply(&qx, y);
        axpy(-self.shift, &qx, y);
        self.project(y);
        if self.p_weight != 0.0 {
            for p in self.p {
                let c = dot(p, x);
                axpy(self.p_weight * c, p, y);
            }
        }
    }
}

/// Lowest eigenvalue of `QHQ` restricted to the complement of `span{G, E}`.
pub fn complement_ground(h: &Hamiltonian<'_>, g: &[f64], e: &[f64]) -> Result<f64> {
    let bound: f64 = h.diagonal().iter().fold(0.0, |m, d| m.max(d.abs()));
    let op = Complement { h, p: [g, e], shift: 0.0, p_weight: 10.0 * (bound + 1.0) + 1e3 };
    Ok(lowest_eigenpairs_with(&op, 1, tolerances::SCAN_DENSE_LIMIT, 11)?.values[0])
}

struct Solver<'a> {
    h: Hamiltonian<'a>,
    terms: &'a Terms,
    couplings: Couplings,
    g: &'a [f64],
    e: &'a [f64],
    hg: Vec<f64>,
    he: Vec<f64>,
    php: Heff,
}

impl<'a> Solver<'a> {
    fn new(terms: &'a Terms, couplings: Couplings, g: &'a [f64], e: &'a [f64]) -> Result<Self> {
        let h = terms.hamiltonian(couplings)?;
        let n = terms.dim();
        let (mut hg, mut he) = (vec![0.0; n], vec![0.0; n]);
        h.apply(g, &mut hg);
        h.apply(e, &mut he);
        let php = Heff { gg: dot(g, &hg), ee: dot(e, &he), ge: dot(g, &he) };
        Ok(Solver { h, terms, couplings, g, e, hg, he, php })
    }

    /// `QHP` columns for `G` and `E`.
    fn coupling_columns(&self) -> [Vec<f64>; 2] {
        let mut out = [self.hg.clone(), self.he.clone()];
        for col in out.iter_mut() {
            for p in [self.g, self.e] {
                let c = dot(p, col);
                axpy(-c, p, col);
            }
        }
        out
    }

    /// Exact `H_eff(z)` and `dH_eff/dz`.
    fn exact(&self, z: f64) -> Result<(Heff, Slopes)> {
        let op = Complement { h: &self.h, p: [self.g, self.e], shift: z, p_weight: 0.0 };
        let [bg, be] = self.coupling_columns();
        let max_iter = 20 * self.terms.dim() + 2000;
        let tol = tolerances::RESOLVENT_RESIDUAL;
        let solve = |b: &[f64]| cg::solve(|v, o| op.apply(v, o), b, tol, max_iter);
        let pole = |err: Error| -> Error {
            match complement_ground(&self.h, self.g, self.e) {
                Ok(r) => Error::NonConvergence(format!("pole proximity at z = {z}: smallest Ritz value of QHQ is {r} ({err})")),
                Err(_) => err,
            }
        };
        let yg = solve(&bg).map_err(pole)?.x;
        let ye = solve(&be).map_err(pole)?.x;
        // (z − QHQ)⁻¹ = −(QHQ − z)⁻¹ on the complement.
        let heff = Heff {
            gg: self.php.gg - dot(&bg, &yg),
            ee: self.php.ee - dot(&be, &ye),
            ge: self.php.ge - (dot(&bg, &ye) + dot(&be, &yg)) / 2.0,
        };
        let slopes = Slopes { m_gg: -dot(&yg, &yg), m_ee: -dot(&ye, &ye), m_ge: -dot(&yg, &ye) };
        Ok((heff, slopes))
    }

    /// Truncated expansion `PH_cP − Σ_{l≤L} P(−H_q Q (z − H_c)⁻¹)^l H_q P`.
    fn series(&self, z: f64, order: usize) -> Result<Heff> {
        let c = self.couplings;
        if c.lambda != 0.0 {
            return Err(Error::Config("the drive expansion assumes λ = 0".into()));
        }
        let cost: Vec<f64> = self.terms.size.iter().map(|s| -c.delta * s).collect();
        let n = self.terms.dim();
        let drive = |x: &[f64]| {
            let mut y = vec![0.0; n];
            self.terms.flip.apply(x, &mut y);
            y.iter_mut().for_each(|v| *v *= c.omega);
            y
        };
        let ecost = |v: &[f64]| v.iter().zip(&cost).map(|(a, b)| a * a * b).sum::<f64>();
        let mut out = Heff { gg: ecost(self.g), ee: ecost(self.e), ge: 0.0 };
        let mut acc = [[0.0; 2]; 2];
        for (col, p) in [self.g, self.e].into_iter().enumerate() {
            let mut w = drive(p);
            for l in 0..=order {
                acc[0][col] -= dot(self.g, &w);
                acc[1][col] -= dot(self.e, &w);
                if l == order {
                    break;
                }
                let mut r: Vec<f64> = w.iter().zip(&cost).map(|(x, cz)| x / (z - cz)).collect();
                for q in [self.g, self.e] {
                    let cq = dot(q, &r);
                    axpy(-cq, q, &mut r);
                }
                w = drive(&r);
                w.iter_mut().for_each(|v| *v = -*v);
            }
        }
        out.gg += acc[0][0];
        out.ee += acc[1][1];
        out.ge = (acc[0][1] + acc[1][0]) / 2.0;
        Ok(out)
    }

    fn heff(&self, z: f64, mode: ResolventMode) -> Result<Heff> {
        match mode {
            ResolventMode::Exact => Ok(self.exact(z)?.0),
            ResolventMode::Series(l) => self.series(z, l),
        }
    }
}

/// `H_eff(z)` for the given states and couplings.
pub fn effective_hamiltonian(terms: &Terms, couplings: Couplings, g: &[f64], e: &[f64], z: f64, mode: ResolventMode) -> Result<Heff> {
    check_states(g, e)?;
    Solver::new(terms, couplings, g, e)?.heff(z, mode)
}

fn check_states(g: &[f64], e: &[f64]) -> Result<()> {
    let ov = dot(g, e).abs();
    let ng = dot(g, g).sqrt();
    let ne = dot(e, e).sqrt();
    if ov > 1e-10 || (ng - 1.0).abs() > 1e-10 || (ne - 1.0).abs() > 1e-10 {
        return Err(Error::Config(format!("|G⟩ and |E⟩ must be orthonormal (overlap {ov:.2e})")));
    }
    Ok(())
}

fn slope(f: impl Fn(f64) -> Result<Heff>, z0: f64, h: f64) -> Result<Slopes> {
    let (a, b) = (f(z0 + h)?, f(z0 - h)?);
    Ok(Slopes { m_gg: (a.gg - b.gg) / (2.0 * h), m_ee: (a.ee - b.ee) / (2.0 * h), m_ge: (a.ge - b.ge) / (2.0 * h) })
}

/// Gap of the linearized effective Hamiltonian around `z₀`.
pub fn linear_gap(h: &Heff, s: &Slopes, z0: f64) -> f64 {
    let (fee, fgg, mge, a) = (1.0 - s.m_ee, 1.0 - s.m_gg, s.m_ge, h.ge);
    let e0 = (h.ee + h.gg) / 2.0 - z0;
    let e1 = (h.ee - h.gg) / 2.0;
    let inner = a * a * fee * fgg
        + 0.25 * ((fee + fgg) * e1 + (fgg - fee) * e0).powi(2)
        + a * mge * ((fee + fgg) * e0 + (fgg - fee) * e1)
        + mge * mge * (e0 * e0 - e1 * e1);
    2.0 * inner.max(0.0).sqrt() / (fgg * fee - mge * mge)
}

/// Resolvent gap estimates at `z₀` (normally the ground energy at the
/// crossing). With `with_validity` the three lowest exact eigenpairs are
/// computed for the overlap diagnostic.
pub fn resolvent_gap(
    terms: &Terms,
    couplings: Couplings,
    g: &[f64],
    e: &[f64],
    z0: f64,
    cfg: &ResolventConfig,
    with_validity: bool,
) -> Result<ResolventReport> {
    check_states(g, e)?;
    let solver = Solver::new(terms, couplings, g, e)?;
    let (heff, slopes_exact) = match cfg.mode {
        ResolventMode::Exact => {
            let (h, s) = solver.exact(z0)?;
            (h, Some(s))
        }
        ResolventMode::Series(l) => (solver.series(z0, l)?, None),
    };
    let h = cfg.fd_rel_step * z0.abs().max(1e-3);
    let f = |z: f64| solver.heff(z, cfg.mode);
    let d1 = slope(f, z0, h)?;
    let d2 = slope(f, z0, h / 2.0)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let (slopes, slope_method) = if rel(d1.m_gg, d2.m_gg) > 0.01 || rel(d1.m_ee, d2.m_ee) > 0.01 {
        let r = |x1: f64, x2: f64| (4.0 * x2 - x1) / 3.0;
        (Slopes { m_gg: r(d1.m_gg, d2.m_gg), m_ee: r(d1.m_ee, d2.m_ee), m_ge: r(d1.m_ge, d2.m_ge) }, "richardson")
    } else {
        (d2, "central")
    };
    let tilde_gap = 2.0 * heff.ge.abs();
    let (f_gg, f_ee) = (1.0 - slopes.m_gg, 1.0 - slopes.m_ee);
    let corrected_gap = tilde_gap / (f_gg * f_ee).sqrt();
    let linear_gap = linear_gap(&heff, &slopes, z0);
    let validity = if with_validity { Some(validity(&solver, g, e)?) } else { None };
    Ok(ResolventReport {
        mode: cfg.mode,
        z0,
        heff,
        tilde_gap,
        slopes,
        slope_method: slope_method.into(),
        slopes_exact,
        f_gg,
        f_ee,
        corrected_gap,
        linear_gap,
        validity,
    })
}

fn validity(solver: &Solver<'_>, g: &[f64], e: &[f64]) -> Result<Validity> {
    let n = solver.terms.dim();
    let s = lowest_eigenpairs(&solver.h, 3.min(n))?;
    if s.values.len() < 3 {
        return Err(Error::Config("validity check needs at least three levels".into()));
    }
    let (p0, p1) = (&s.vectors[0], &s.vectors[1]);
    let overlap = (dot(p0, g) * dot(p1, e) - dot(p0, e) * dot(p1, g)).powi(2);
    let gap = s.values[1] - s.values[0];
    let delta_e = complement_ground(&solver.h, g, e)? - s.values[0];
    let lower_bound = 0.25 * (s.values[2] - s.values[1]) * overlap;
    let overlap_to_gap = overlap / gap;
    Ok(Validity {
        e0: s.values[0],
        e1: s.values[1],
        e2: s.values[2],
        overlap,
        overlap_to_gap,
        hypothesis_holds: overlap_to_gap >= 10.0,
        delta_e,
        lower_bound,
        bound_holds: delta_e >= lower_bound * (1.0 - 1e-9) - 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_star;
    use crate::linalg::dense::sym_eigen;
    use crate::spectral::operator::{build_terms, Mode};
    use crate::spectral::perturbative::perturbative_states;
    use crate::spectral::scan::{min_gap_scan, ScanConfig};

    fn star_setup(n_b: usize) -> (Terms, Vec<f64>, Vec<f64>, Couplings, f64, f64) {
        let g = generate_star(n_b, 2).unwrap();
        let t = build_terms(&g, Mode::Restricted, None).unwrap();
        let p = perturbative_states(&t, None).unwrap();
        let s = min_gap_scan(&t, &ScanConfig::default()).unwrap();
        let c = Couplings::new(s.crossing, 1.0);
        (t, p.g.vector, p.e.vector, c, s.e_star, s.gap)
    }

    #[test]
    fn determinant_vanishes_at_exact_levels() {
        let (t, g, e, c, _, _) = star_setup(3);
        let h = t.assemble(c).unwrap();
        let ev = sym_eigen(&h.to_dense(), t.dim(), false).unwrap().values;
        for &z in &ev[..2] {
            let m = effective_hamiltonian(&t, c, &g, &e, z, ResolventMode::Exact).unwrap();
            let scale = (z - m.gg).abs().max((z - m.ee).abs()).max(1.0);
            assert!(m.secular(z).abs() < 1e-9 * scale * scale, "det = {}", m.secular(z));
        }
    }

    #[test]
    fn finite_difference_slopes_match_exact_derivative() {
        let (t, g, e, c, z0, _) = star_setup(4);
        let r = resolvent_gap(&t, c, &g, &e, z0, &ResolventConfig::default(), true).unwrap();
        let ex = r.slopes_exact.unwrap();
        assert!((r.slopes.m_gg - ex.m_gg).abs() < 1e-5 * ex.m_gg.abs().max(1.0));
        assert!((r.slopes.m_ee - ex.m_ee).abs() < 1e-5 * ex.m_ee.abs().max(1.0));
        assert!(r.f_gg >= 1.0 && r.f_ee >= 1.0);
        assert!(r.corrected_gap <= r.tilde_gap);
        let v = r.validity.unwrap();
        assert!(v.delta_e > 0.0);
    }

    #[test]
    fn linear_gap_matches_generalized_eigenproblem() {
        let h = Heff { gg: -3.1, ee: -2.9, ge: 0.04 };
        let s = Slopes { m_gg: -1.7, m_ee: -4.2, m_ge: -0.01 };
        let z0 = -3.05;
        // det[(1 − M)(z − z0) − (H − z0)] = 0 as a quadratic in w = z − z0.
        let (fgg, fee, mge) = (1.0 - s.m_gg, 1.0 - s.m_ee, s.m_ge);
        let (agg, aee, age) = (h.gg - z0, h.ee - z0, h.ge);
        let qa = fgg * fee - mge * mge;
        let qb = -(fgg * aee + fee * agg) - 2.0 * mge * age;
        let qc = agg * aee - age * age;
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        assert!((linear_gap(&h, &s, z0) - disc / qa).abs() < 1e-12);
    }

    #[test]
    fn series_converges_to_exact() {
        let (t, g, e, c, z0, _) = star_setup(3);
        let exact = effective_hamiltonian(&t, c, &g, &e, z0, ResolventMode::Exact).unwrap();
        let s = effective_hamiltonian(&t, c, &g, &e, z0, ResolventMode::Series(200)).unwrap();
        assert!((exact.ge - s.ge).abs() < 1e-8, "{} vs {}", exact.ge, s.ge);
        assert!((exact.gg - s.gg).abs() < 1e-8);
    }

    #[test]
    fn leading_order_uniform_states() {
        // |G⟩ = |S_α⟩, |E⟩ = |S_{α−1}⟩ on star(2,2): 2Ω·3·√(1/6).
        let g = generate_star(2, 2).unwrap();
        let t = build_terms(&g, Mode::Restricted, None).unwrap();
        let uniform = |b: usize| {
            let idx = t.basis.manifold_indices(b);
            let mut v = vec![0.0; t.dim()];
            idx.iter().for_each(|&i| v[i] = 1.0 / (idx.len() as f64).sqrt());
            v
        };
        let om = 0.3;
        let c = Couplings::new(om, 1.0);
        let h = effective_hamiltonian(&t, c, &uniform(3), &uniform(2), -3.0, ResolventMode::Series(0)).unwrap();
        assert!((2.0 * h.ge.abs() - 2.0 * om * 3.0 * (1.0f64 / 6.0).sqrt()).abs() < 1e-12);
    }
}
