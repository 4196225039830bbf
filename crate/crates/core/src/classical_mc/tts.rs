//! Time to solution from repeated runs at several run lengths.

use serde::{Deserialize, Serialize};

use super::sa::{geometric_schedule, sa_run, SaConfig};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::rng::{self, uniform};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsPoint {
    /// Run length in sweeps.
    pub length: f64,
    pub trials: usize,
    pub successes: usize,
}

impl TtsPoint {
    pub fn p(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TtsEstimate {
    /// `min_T T ln(1 − p_target)/ln(1 − p(T))`; infinite when censored.
    pub tts: f64,
    pub best_length: f64,
    pub p_target: f64,
    /// `(T, p(T), TTS(T))`.
    pub points: Vec<(f64, f64, f64)>,
    /// Bootstrap percentile interval (2.5%, 97.5%).
    pub ci: (f64, f64),
    /// No run length succeeded.
    pub censored: bool,
}

/// `T ln(1 − p_target)/ln(1 − p)`, with `T` itself once `p = 1` and
/// infinity at `p = 0`.
pub fn tts_at(length: f64, p: f64, p_target: f64) -> f64 {
    if p <= 0.0 {
        f64::INFINITY
    } else if p >= 1.0 {
        length
    } else {
        length * (1.0 - p_target).ln() / (1.0 - p).ln()
    }
}

fn min_tts(points: &[TtsPoint], ps: &[f64], p_target: f64) -> (f64, f64) {
    points.iter().zip(ps).map(|(pt, &p)| (tts_at(pt.length, p, p_target), pt.length)).fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a })
}

pub fn estimate_tts(points: &[TtsPoint], p_target: f64, bootstrap: usize, seed: u64) -> Result<TtsEstimate> {
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(Error::Config(format!("p_target = {p_target} outside (0, 1)")));
    }
    if points.is_empty() || points.iter().any(|p| p.trials == 0 || p.successes > p.trials) {
        return Err(Error::Config("every run length needs trials ≥ successes and trials > 0".into()));
    }
    let ps: Vec<f64> = points.iter().map(TtsPoint::p).collect();
    let (tts, best_length) = min_tts(points, &ps, p_target);
    let censored = !tts.is_finite();
    let mut rng = rng::stream(seed, 0x7475);
    let mut samples: Vec<f64> = (0..bootstrap)
        .map(|_| {
            let q: Vec<f64> = points
                .iter()
                .zip(&ps)
                .map(|(pt, &p)| (0..pt.trials).filter(|_| uniform(&mut rng) < p).count() as f64 / pt.trials as f64)
                .collect();
            min_tts(points, &q, p_target).0
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let pick = |f: f64| {
        if samples.is_empty() {
            tts
        } else {
            samples[((f * (samples.len() - 1) as f64).round() as usize).min(samples.len() - 1)]
        }
    };
    Ok(TtsEstimate {
        tts,
        best_length,
        p_target,
        points: points.iter().zip(&ps).map(|(pt, &p)| (pt.length, p, tts_at(pt.length, p, p_target))).collect(),
        ci: (pick(0.025), pick(0.975)),
        censored,
    })
}

/// Runs `trials` annealings per length, each a geometric `β` ramp from
/// `beta_range.0` to `beta_range.1` over `length` sweeps, on independent
/// streams `(seed, length index · 2³² + trial)`.
pub fn sa_success_counts(g: &Graph, base: &SaConfig, beta_range: (f64, f64), lengths: &[usize], trials: usize) -> Result<Vec<TtsPoint>> {
    lengths
        .iter()
        .enumerate()
        .map(|(li, &len)| {
            let mut successes = 0;
            for t in 0..trials {
                let cfg = SaConfig {
                    betas: geometric_schedule(beta_range.0, beta_range.1, len),
                    sweeps_per_beta: 1,
                    stream: ((li as u64) << 32) | t as u64,
                    stop_at_hit: true,
                    trace_every: None,
                    ..base.clone()
                };
                if sa_run(g, &cfg)?.success() {
                    successes += 1;
                }
            }
            Ok(TtsPoint { length: len as f64, trials, successes })
        })
        .collect()
}
