//! Target-side sensing: snapshots at the cross-shaped array, MUSIC direction
//! finding, least-squares signal recovery and transmit-gain estimation.

pub mod music;
pub mod snapshots;

pub use music::{music_aoa, AoaEstimate};
pub use snapshots::{collect_snapshots, SnapshotSet};

use crate::arrays::AnglePair;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scenario::Scenario;

/// Relative singular-value floor below which `A_S` counts as rank deficient.
const RANK_RTOL: f64 = 1e-10;

/// `ŝ(t) = (A_S^H A_S)^{-1} A_S^H z(t)` for every snapshot; `K × T`.
pub fn ls_recover(set: &SnapshotSet, a_s: &CMat) -> Result<CMat> {
    if a_s.nrows() != set.samples.nrows() {
        return Err(Error::invalid(format!(
            "steering matrix has {} rows for {} sensors",
            a_s.nrows(),
            set.samples.nrows()
        )));
    }
    if a_s.ncols() == 0 || a_s.ncols() > a_s.nrows() {
        return Err(Error::invalid("steering matrix must have 1..=L columns"));
    }
    let svd = a_s.clone().svd(true, true);
    let top = svd.singular_values.max();
    let bottom = svd.singular_values.min();
    if bottom <= RANK_RTOL * top {
        return Err(Error::Singular(format!(
            "steering matrix is rank deficient (σ_min/σ_max = {:.3e}); directions too close",
            bottom / top
        )));
    }
    svd.solve(&set.samples, 0.0).map_err(|e| Error::Singular(e.to_string()))
}

/// `P`-scaled transmit gains `|Ĝ_{T,k}|²`; receive gains equal them by reciprocity.
#[derive(Debug, Clone, PartialEq)]
pub struct GainEstimate {
    pub g2_tx: Vec<f64>,
    pub g2_rx: Vec<f64>,
}

/// `(1/T_p)·∫|ŝ_k(t)|² dt` by the rectangle rule over samples spread uniformly
/// across `[0, t_p)`; the pulse is silent for the rest of the PRI.
pub fn gain_estimate(recovered: &CMat, pri: f64, pulse_width: f64) -> Result<GainEstimate> {
    if recovered.ncols() == 0 {
        return Err(Error::invalid("no samples to integrate"));
    }
    if !(pulse_width > 0.0 && pulse_width < pri) {
        return Err(Error::invalid("need 0 < pulse width < PRI"));
    }
    let dt = pulse_width / recovered.ncols() as f64;
    let g2_tx: Vec<f64> = recovered
        .row_iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>() * dt / pri)
        .collect();
    Ok(GainEstimate {
        g2_rx: g2_tx.clone(),
        g2_tx,
    })
}

/// What the target learns from one pulse: arrival directions and gains, paired.
#[derive(Debug, Clone, PartialEq)]
pub struct Knowledge {
    pub aoas: Vec<AnglePair>,
    pub gains: GainEstimate,
}

/// Snapshots, MUSIC, LS recovery and gain estimation in sequence.
pub fn estimate_knowledge(scenario: &Scenario, n_snapshots: usize, grid_step: f64, seed: u64) -> Result<Knowledge> {
    let set = collect_snapshots(scenario, n_snapshots, seed)?;
    let est = music_aoa(&set, scenario.num_radars(), grid_step)?;
    let a_s = set.steering_matrix(&est.angles)?;
    let s_hat = ls_recover(&set, &a_s)?;
    let gains = gain_estimate(&s_hat, set.pri, set.pulse_width)?;
    Ok(Knowledge {
        aoas: est.angles,
        gains,
    })
}
