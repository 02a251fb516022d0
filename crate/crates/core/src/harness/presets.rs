//! Named parameter sweeps. Every trial owns a seed derived from the master
//! seed; the same trial seed is reused across sweep values so curves compare
//! identical NIRS realizations.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::arrays::AnglePair;
use crate::error::{Error, Result};
use crate::estimation::estimate_knowledge;
use crate::linalg::CVec;
use crate::optimizers::{
    build_instance, dft_codebook_search, min_irs_elements, mmse_default, random_phase, reverse_alignment,
    solve_pgd, ReflectionModel, ReflectionSolution, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::power_model::sum_power;
use crate::scenario::Scenario;

use super::config::{RadarConfig, ScenarioConfig};
use super::{inject_aoa_error, stream_seed, trial_seed, ExperimentResult, ResultRow};

/// Realization count used for the analytic element threshold.
pub const DEFAULT_REALIZATIONS: usize = 20;
const SNAPSHOTS: usize = 64;
const MUSIC_STEP_DEG: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    PowerVsDistance,
    PowerVsElements,
    PowerVsAngle,
    PowerVsAoaError,
    PowerVsNumRadars,
    MinElementsValidation,
    EstimationPipeline,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::PowerVsDistance,
        Preset::PowerVsElements,
        Preset::PowerVsAngle,
        Preset::PowerVsAoaError,
        Preset::PowerVsNumRadars,
        Preset::MinElementsValidation,
        Preset::EstimationPipeline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PowerVsDistance => "power-vs-distance",
            Preset::PowerVsElements => "power-vs-elements",
            Preset::PowerVsAngle => "power-vs-angle",
            Preset::PowerVsAoaError => "power-vs-aoa-error",
            Preset::PowerVsNumRadars => "power-vs-num-radars",
            Preset::MinElementsValidation => "min-elements-validation",
            Preset::EstimationPipeline => "estimation-pipeline",
        }
    }

    fn sweep_name(self) -> &'static str {
        match self {
            Preset::PowerVsDistance => "target_height_m",
            Preset::PowerVsElements | Preset::MinElementsValidation => "n1",
            Preset::PowerVsAngle => "radar_angle_deg",
            Preset::PowerVsAoaError => "aoa_error_deg",
            Preset::PowerVsNumRadars => "num_radars",
            Preset::EstimationPipeline => "sensing_noise_dbm",
        }
    }

    fn sweep(self, cfg: &ScenarioConfig) -> Vec<f64> {
        let multi = cfg.radars.len() > 1;
        let ny = cfg.target.n1y as f64;
        match self {
            Preset::PowerVsDistance => vec![50.0, 100.0, 150.0, 200.0, 250.0, 300.0],
            Preset::PowerVsElements if multi => (1..=12).map(|i| 5.0 * i as f64 * ny).collect(),
            Preset::PowerVsElements | Preset::MinElementsValidation => (1..=10).map(|i| i as f64 * ny).collect(),
            Preset::PowerVsAngle => vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0],
            Preset::PowerVsAoaError => vec![0.0, 0.5, 1.0, 2.0],
            Preset::PowerVsNumRadars => vec![1.0, 2.0, 3.0, 4.0, 5.0],
            Preset::EstimationPipeline => vec![-140.0, -120.0, -100.0, -80.0, -60.0],
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::invalid(format!("unknown preset `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Runs `trials` seeded trials of every sweep value. Rows come out ordered by
/// sweep value, then solver, then trial.
pub fn run_experiment(preset: &str, config: &ScenarioConfig, trials: usize, master_seed: u64) -> Result<ExperimentResult> {
    let preset: Preset = preset.parse()?;
    config.validate()?;
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let sweep = preset.sweep(config);
    let jobs: Vec<(usize, usize)> = (0..sweep.len())
        .flat_map(|s| (0..trials).map(move |t| (s, t)))
        .collect();
    let stalled = AtomicUsize::new(0);
    let per_job: Vec<Vec<(usize, ResultRow)>> = jobs
        .par_iter()
        .map(|&(s, t)| {
            let seed = trial_seed(master_seed, t as u64);
            run_trial(preset, config, sweep[s], seed, &stalled).map(|rows| {
                rows.into_iter()
                    .enumerate()
                    .map(|(order, (solver, p))| (order, ResultRow::new(sweep[s], solver, t, seed, p)))
                    .collect()
            })
        })
        .collect::<Result<_>>()?;

    let mut keyed: Vec<(usize, usize, usize, ResultRow)> = jobs
        .iter()
        .zip(per_job)
        .flat_map(|(&(s, t), rows)| rows.into_iter().map(move |(o, r)| (s, o, t, r)))
        .collect();
    keyed.sort_by_key(|&(s, o, t, _)| (s, o, t));

    let mut metadata = std::collections::BTreeMap::new();
    let text = config.to_toml_string()?;
    let mut h = DefaultHasher::new();
    text.hash(&mut h);
    metadata.insert("config_hash".into(), format!("{:016x}", h.finish()));
    metadata.insert("master_seed".into(), master_seed.to_string());
    metadata.insert("trials".into(), trials.to_string());
    metadata.insert("pgd_tol".into(), format!("{DEFAULT_TOL:e}"));
    metadata.insert("pgd_max_iter".into(), DEFAULT_MAX_ITER.to_string());
    metadata.insert("pgd_stalled".into(), stalled.into_inner().to_string());
    if preset == Preset::MinElementsValidation {
        let t = &config.target;
        let zeta_bar = match &t.zeta {
            super::config::Zeta::Uniform(z) => *z,
            super::config::Zeta::PerElement(v) => v.iter().sum::<f64>() / v.len() as f64,
        };
        let n1 = min_irs_elements(zeta_bar, t.n2x * t.n2y, t.beta_max, DEFAULT_REALIZATIONS)?;
        metadata.insert("n1_min".into(), n1.to_string());
    }
    Ok(ExperimentResult {
        preset: preset.name().into(),
        sweep_name: preset.sweep_name().into(),
        rows: keyed.into_iter().map(|(_, _, _, r)| r).collect(),
        metadata,
    })
}

/// Config with the radars replaced by the first `k` layout positions, all
/// sharing the first configured radar's hardware.
fn with_layout(cfg: &ScenarioConfig, k: usize) -> ScenarioConfig {
    let layout = ScenarioConfig::with_radars(k);
    let h = cfg.target.position[2];
    let base = &cfg.radars[0];
    let mut out = cfg.clone();
    out.radars = layout
        .radars
        .iter()
        .map(|r| RadarConfig {
            position: [
                cfg.target.position[0] + r.position[0] * h / layout.target.position[2],
                cfg.target.position[1],
                0.0,
            ],
            bandwidth: r.bandwidth,
            ..base.clone()
        })
        .collect();
    out
}

/// Moves radar `i` to azimuth `±deg` below the target (radar 0 stays put when
/// there are several).
fn with_angle(cfg: &ScenarioConfig, deg: f64) -> ScenarioConfig {
    let mut out = cfg.clone();
    let [tx, ty, tz] = cfg.target.position;
    let multi = cfg.radars.len() > 1;
    for (i, r) in out.radars.iter_mut().enumerate() {
        let signed = match (multi, i) {
            (false, _) => deg,
            (true, 0) => continue,
            (true, i) if i % 2 == 1 => deg,
            _ => -deg,
        };
        let height = tz - r.position[2];
        r.position = [tx + height * signed.to_radians().tan(), ty, r.position[2]];
    }
    out
}

/// Power of each competing design under the true scenario.
fn compare_designs(
    truth: &Scenario,
    design: &ReflectionModel,
    seed: u64,
    stalled: &AtomicUsize,
) -> Result<Vec<(&'static str, f64)>> {
    let n1 = truth.n1();
    let beta = truth.target.irs.beta_max;
    let power = |theta: &CVec| sum_power(theta, truth);
    let mut out = Vec::with_capacity(5);
    let opt = optimal(design, stalled)?;
    out.push(("pgd", power(&opt.theta)?));
    if truth.num_radars() == 1 {
        let link = &design.links[0];
        let c = design.nirs_gains()[0];
        let ra = reverse_alignment(&link.u, c, beta)?;
        out.push(("reverse-alignment", power(&ra.theta)?));
    } else {
        let (_, mm) = mmse_default(design)?;
        out.push(("mmse", power(&mm.theta)?));
    }
    out.push(("dft-codebook", power(&dft_codebook_search(design).theta)?));
    out.push(("random-phase", power(&random_phase(n1, beta, stream_seed(seed, 1)))?));
    out.push(("no-irs", power(&CVec::zeros(n1))?));
    Ok(out)
}

/// PGD optimum of `model`. A run that exhausts its iteration budget still
/// yields its best iterate; such runs are counted in `stalled`.
fn optimal(model: &ReflectionModel, stalled: &AtomicUsize) -> Result<ReflectionSolution> {
    match solve_pgd(&build_instance(model), DEFAULT_TOL, DEFAULT_MAX_ITER) {
        Err(Error::ConvergenceFailure { best, .. }) => {
            stalled.fetch_add(1, Ordering::Relaxed);
            Ok(*best)
        }
        other => other,
    }
}

fn run_trial(
    preset: Preset,
    cfg: &ScenarioConfig,
    x: f64,
    seed: u64,
    stalled: &AtomicUsize,
) -> Result<Vec<(&'static str, f64)>> {
    let nirs_seed = stream_seed(seed, 0);
    match preset {
        Preset::PowerVsDistance => {
            let base = cfg.build(nirs_seed)?;
            let s = base.scaled_distances(x / cfg.target.position[2]);
            compare_designs(&s, &ReflectionModel::from_scenario(&s)?, seed, stalled)
        }
        Preset::PowerVsElements => {
            let mut c = cfg.clone();
            c.target.n1x = (x as usize) / c.target.n1y;
            let s = c.build(nirs_seed)?;
            compare_designs(&s, &ReflectionModel::from_scenario(&s)?, seed, stalled)
        }
        Preset::PowerVsAngle => {
            let s = with_angle(cfg, x).build(nirs_seed)?;
            compare_designs(&s, &ReflectionModel::from_scenario(&s)?, seed, stalled)
        }
        Preset::PowerVsNumRadars => {
            let s = with_layout(cfg, x as usize).build(nirs_seed)?;
            compare_designs(&s, &ReflectionModel::from_scenario(&s)?, seed, stalled)
        }
        Preset::PowerVsAoaError => {
            let s = cfg.build(nirs_seed)?;
            let truth = ReflectionModel::from_scenario(&s)?;
            let aoas: Vec<AnglePair> = (0..s.num_radars())
                .map(|k| inject_aoa_error(&s.aoa_at_target(k)?, x, stream_seed(seed, 100 + k as u64)))
                .collect::<Result<_>>()?;
            let g2: Vec<f64> = (0..s.num_radars())
                .map(|k| truth.links[k * s.num_radars() + k].weight.sqrt())
                .collect();
            let design = ReflectionModel::from_knowledge(&s.target, s.wavelength, &aoas, &g2)?;
            compare_designs(&s, &design, seed, stalled)
        }
        Preset::MinElementsValidation => {
            let mut c = cfg.clone();
            c.radars.truncate(1);
            c.target.n1x = (x as usize) / c.target.n1y;
            let s = c.build(nirs_seed)?;
            let m = ReflectionModel::from_scenario(&s)?;
            let ra = reverse_alignment(&m.links[0].u, m.nirs_gains()[0], s.target.irs.beta_max)?;
            let opt = optimal(&m, stalled)?;
            Ok(vec![
                ("reverse-alignment", sum_power(&ra.theta, &s)?),
                ("pgd", sum_power(&opt.theta, &s)?),
                ("no-irs", sum_power(&CVec::zeros(s.n1()), &s)?),
            ])
        }
        Preset::EstimationPipeline => {
            let mut c = cfg.clone();
            c.target.sensing_noise_dbm = x;
            let s = c.build(nirs_seed)?;
            let know = estimate_knowledge(&s, SNAPSHOTS, MUSIC_STEP_DEG.to_radians(), stream_seed(seed, 2))?;
            let est = ReflectionModel::from_knowledge(&s.target, s.wavelength, &know.aoas, &know.gains.g2_tx)?;
            let truth = ReflectionModel::from_scenario(&s)?;
            let a = optimal(&est, stalled)?;
            let b = optimal(&truth, stalled)?;
            Ok(vec![
                ("estimated-pgd", sum_power(&a.theta, &s)?),
                ("pgd", sum_power(&b.theta, &s)?),
                ("no-irs", sum_power(&CVec::zeros(s.n1()), &s)?),
            ])
        }
    }
}
