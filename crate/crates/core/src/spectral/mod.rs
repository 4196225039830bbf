//! Annealing Hamiltonians on the independent-set space, their low-lying
//! spectra, and perturbative and resolvent estimates of the minimum gap.

pub mod basis;
pub mod eigen;
pub mod hamming;
pub mod operator;
pub mod perturbative;
pub mod resolvent;
pub mod scan;

use serde::{Deserialize, Serialize};

pub use basis::{Basis, BasisKind};
pub use eigen::{lowest_eigenpairs, Spectrum};
pub use hamming::{hamming_gap_estimate, HammingEstimate};
pub use operator::{build_operator, build_terms, Couplings, Mode, OperatorHandle, Terms};
pub use perturbative::{perturbative_states, PerturbativeStates};
pub use resolvent::{resolvent_gap, ResolventConfig, ResolventMode, ResolventReport};
pub use scan::{min_gap_scan, EnergyUnit, GapScan, ScanConfig};

use crate::error::Result;
use crate::graphs::Graph;

/// Options for [`gap_report`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapOptions {
    pub scan: ScanConfig,
    /// Use the branch-symmetric sector (star graphs only).
    pub symmetric: bool,
    /// Run the perturbative and resolvent analysis (requires `λ = 0`).
    pub resolvent: Option<ResolventConfig>,
    /// Compute the overlap diagnostic from exact eigenpairs.
    pub validity: bool,
    /// Compute the Hamming estimate when the states expand to at most this
    /// many configurations.
    pub hamming_limit: usize,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions { scan: ScanConfig::default(), symmetric: false, resolvent: Some(ResolventConfig::default()), validity: true, hamming_limit: 200_000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub basis: BasisKind,
    pub dim: usize,
    pub unit: EnergyUnit,
    pub lambda: f64,
    /// `Δ_QAA` in the chosen unit.
    pub gap: f64,
    /// `(Ω/δ)⋆`.
    pub crossing: f64,
    pub e_star: f64,
    pub boundary_minimum: bool,
    pub scan: GapScan,
    pub states: Option<PerturbativeSummary>,
    pub resolvent: Option<ResolventReport>,
    pub hamming: Option<HammingEstimate>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbativeSummary {
    pub alpha: usize,
    pub b_e: usize,
    pub predicted_crossing: f64,
    /// Predicted ground energy at the crossing with `δ = 1`.
    pub predicted_e_star: f64,
    pub g_exchange: f64,
    pub e_exchange: f64,
    pub e_free: f64,
    pub regime_lhs: f64,
    pub regime_rhs: f64,
    pub degenerate: bool,
}

impl From<&PerturbativeStates> for PerturbativeSummary {
    fn from(p: &PerturbativeStates) -> Self {
        PerturbativeSummary {
            alpha: p.alpha,
            b_e: p.e.b,
            predicted_crossing: p.crossing,
            predicted_e_star: p.e_star,
            g_exchange: p.g.exchange,
            e_exchange: p.e.exchange,
            e_free: p.e.free,
            regime_lhs: p.regime_lhs,
            regime_rhs: p.regime_rhs,
            degenerate: p.is_degenerate(),
        }
    }
}

/// Minimum gap of `g` followed, when `λ = 0`, by the perturbative states,
/// the resolvent estimates at the crossing and the Hamming estimate.
pub fn gap_report(g: &Graph, opts: &GapOptions) -> Result<GapReport> {
    let mode = if opts.symmetric { Mode::StarSymmetric } else { Mode::Restricted };
    let terms = build_terms(g, mode, None)?;
    let scan = min_gap_scan(&terms, &opts.scan)?;
    let mut states = None;
    let mut resolvent = None;
    let mut hamming = None;
    if opts.scan.lambda == 0.0 {
        if let Some(rcfg) = &opts.resolvent {
            let p = perturbative_states(&terms, None)?;
            states = Some(PerturbativeSummary::from(&p));
            p.require_nondegenerate()?;
            let c = opts.scan.unit.couplings(scan.coordinate, 0.0);
            resolvent = Some(resolvent_gap(&terms, c, &p.g.vector, &p.e.vector, scan.e_star, rcfg, opts.validity)?);
            if let (Ok(ge), Ok(ee)) = (terms.basis.expand(&p.g.vector, opts.hamming_limit), terms.basis.expand(&p.e.vector, opts.hamming_limit)) {
                hamming = Some(hamming_gap_estimate(&ge, &ee, scan.crossing));
            }
        }
    }
    Ok(GapReport {
        basis: terms.basis.kind(),
        dim: terms.dim(),
        unit: scan.unit,
        lambda: scan.lambda,
        gap: scan.gap,
        crossing: scan.crossing,
        e_star: scan.e_star,
        boundary_minimum: scan.boundary_minimum,
        scan,
        states,
        resolvent,
        hamming,
    })
}
