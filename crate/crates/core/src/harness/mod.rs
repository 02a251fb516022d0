//! Scenario configuration, experiment presets, seeded Monte-Carlo trials and
//! CSV output.

pub mod config;
pub mod csv;
pub mod presets;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrays::AnglePair;
use crate::error::{Error, Result};

pub use config::ScenarioConfig;
pub use csv::{emit_csv, parse_csv, to_csv_string};
pub use presets::{run_experiment, Preset};

/// One trial of one solver at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep: f64,
    pub solver: String,
    pub trial: usize,
    pub seed: u64,
    pub power_watts: f64,
    pub power_db: f64,
}

impl ResultRow {
    pub fn new(sweep: f64, solver: &str, trial: usize, seed: u64, power_watts: f64) -> Self {
        Self {
            sweep,
            solver: solver.to_string(),
            trial,
            seed,
            power_watts,
            power_db: 10.0 * power_watts.log10(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub preset: String,
    pub sweep_name: String,
    pub rows: Vec<ResultRow>,
    pub metadata: BTreeMap<String, String>,
}

impl ExperimentResult {
    /// Sweep values in row order, deduplicated.
    pub fn sweep_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if out.last() != Some(&r.sweep) && !out.contains(&r.sweep) {
                out.push(r.sweep);
            }
        }
        out
    }

    /// Trial-averaged power of `solver` at sweep value `sweep`.
    pub fn mean_power(&self, sweep: f64, solver: &str) -> Option<f64> {
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.sweep == sweep && r.solver == solver)
            .map(|r| r.power_watts)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under master seed `master`.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix(master ^ mix(trial))
}

/// Seed of an independent stream `stream` within a trial.
pub fn stream_seed(trial_seed: u64, stream: u64) -> u64 {
    mix(trial_seed.wrapping_add(mix(stream.wrapping_add(1))))
}

/// Shifts the azimuth by `error_deg` with a seeded random sign, clamped to the
/// open half-plane. Elevation is untouched.
pub fn inject_aoa_error(truth: &AnglePair, error_deg: f64, seed: u64) -> Result<AnglePair> {
    if !(error_deg >= 0.0 && error_deg.is_finite()) {
        return Err(Error::invalid(format!("AoA error must be nonnegative, got {error_deg}")));
    }
    if error_deg == 0.0 {
        return Ok(*truth);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    Ok(AnglePair::clamped(
        truth.azimuth + sign * error_deg.to_radians(),
        truth.elevation,
    ))
}
