//! Simulated annealing, parallel tempering and time-to-solution estimates
//! for the independent-set cost `H(z) = −δ|z| + U·(violated edges)`.

pub mod dynamics;
pub mod pt;
pub mod sa;
pub mod tts;

pub use dynamics::{gibbs, total_variation, Constraint, Dynamics, UpdateMix};
pub use pt::{pt_histograms, pt_run, PtConfig, Tempering};
pub use sa::{geometric_schedule, sa_run, stationary_histogram, McResult, SaConfig};
pub use tts::{estimate_tts, sa_success_counts, tts_at, TtsEstimate, TtsPoint};
