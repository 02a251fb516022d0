//! Radar waveforms, beamforming gains and the received-power objective.

use std::f64::consts::PI;

use crate::arrays::{cascaded_response, split_ts_response, upa_response, AnglePair, ArrayGeometry};
use crate::channel::{los_channel, Node};
use crate::error::{Error, Result};
use crate::linalg::{inner, CMat, CVec, C64};
use crate::scenario::{RadarNode, Scenario};

/// Transmitted pulse sample `x(t) = sqrt(P)·x̄(t)` for `t ∈ [0, T_p)`.
///
/// `x̄` is the unit-modulus chirp `exp(jπBt²/t_p)` scaled by `sqrt(T_p/t_p)`,
/// so that `(1/T_p)∫|x̄|² = 1` over one PRI.
pub fn chirp_waveform(t: f64, radar: &RadarNode) -> Result<C64> {
    if !(0.0..radar.pri).contains(&t) {
        return Err(Error::invalid(format!(
            "time {t} outside the PRI [0, {})",
            radar.pri
        )));
    }
    if t > radar.pulse_width {
        return Ok(C64::new(0.0, 0.0));
    }
    let amp = (radar.tx_power * radar.pri / radar.pulse_width).sqrt();
    let phase = PI * radar.bandwidth * t * t / radar.pulse_width;
    Ok(C64::from_polar(amp, phase))
}

/// `w = conj(a_R(ϑ, φ)) / sqrt(M)`.
pub fn matched_beamformer(geometry: &ArrayGeometry, steer: &AnglePair, wavelength: f64) -> Result<CVec> {
    let a = upa_response(geometry, steer, wavelength)?;
    let scale = 1.0 / (a.len() as f64).sqrt();
    Ok(a.map(|z| z.conj() * scale))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    /// `G_{T,k} = ρ_k · a_{R_k}^T w_k`.
    pub g_tx: Vec<C64>,
    /// `G_{R,k} = ρ_k · w_k^T a_{R_k}`.
    pub g_rx: Vec<C64>,
    /// `c_nirs[(k, j)] = ũ_{k,j}^H φ`, the NIRS reflection gain of link j→k.
    pub c_nirs: CMat,
}

pub fn beamforming_gains(scenario: &Scenario) -> Result<GainSet> {
    let k_count = scenario.num_radars();
    let mut g_tx = Vec::with_capacity(k_count);
    let mut g_rx = Vec::with_capacity(k_count);
    for (k, radar) in scenario.radars.iter().enumerate() {
        let rho = scenario.path_gain(k)?.value;
        let a = upa_response(&radar.geometry, &scenario.aod_at_radar(k)?, scenario.wavelength)?;
        let at_w: C64 = a.iter().zip(radar.beamformer.iter()).map(|(x, w)| x * w).sum();
        let wt_a: C64 = radar.beamformer.iter().zip(a.iter()).map(|(w, x)| w * x).sum();
        g_tx.push(rho * at_w);
        g_rx.push(rho * wt_a);
    }
    let t = &scenario.target;
    let surface = scenario.surface_responses()?;
    let mut c_nirs = CMat::zeros(k_count, k_count);
    for k in 0..k_count {
        for j in 0..k_count {
            let (_, nk) = split_ts_response(&surface[k], t.irs.nx, t.nirs.nx, t.surface_ny())?;
            let (_, nj) = split_ts_response(&surface[j], t.irs.nx, t.nirs.nx, t.surface_ny())?;
            let u_tilde = cascaded_response(&nk, &nj)?;
            c_nirs[(k, j)] = inner(&u_tilde, &t.nirs.phi);
        }
    }
    Ok(GainSet { g_tx, g_rx, c_nirs })
}

fn concat_reflection(theta: &CVec, scenario: &Scenario) -> Result<CVec> {
    scenario.target.irs.check_theta(theta)?;
    let phi = &scenario.target.nirs.phi;
    Ok(CVec::from_iterator(
        theta.len() + phi.len(),
        theta.iter().chain(phi.iter()).cloned(),
    ))
}

/// Reflection gain `a_T^T(k) · diag(θ̄) · a_T(j)`.
fn reflection_gain(a_k: &CVec, theta_bar: &CVec, a_j: &CVec) -> C64 {
    a_k.iter()
        .zip(theta_bar.iter())
        .zip(a_j.iter())
        .map(|((x, t), y)| x * t * y)
        .sum()
}

/// Received power at radar `k` over one PRI, in watts.
pub fn radar_power(k: usize, theta: &CVec, scenario: &Scenario) -> Result<f64> {
    if k >= scenario.num_radars() {
        return Err(Error::invalid(format!("radar index {k} out of range")));
    }
    let theta_bar = concat_reflection(theta, scenario)?;
    let gains = beamforming_gains(scenario)?;
    let surface = scenario.surface_responses()?;
    Ok(radar_power_with(k, &theta_bar, scenario, &gains, &surface))
}

fn radar_power_with(k: usize, theta_bar: &CVec, scenario: &Scenario, gains: &GainSet, surface: &[CVec]) -> f64 {
    let g_rx = gains.g_rx[k].norm_sqr();
    (0..scenario.num_radars())
        .map(|j| {
            let r = reflection_gain(&surface[k], theta_bar, &surface[j]);
            scenario.radars[j].tx_power * g_rx * gains.g_tx[j].norm_sqr() * r.norm_sqr()
        })
        .sum()
}

/// Sum of received powers over all radars, in watts.
pub fn sum_power(theta: &CVec, scenario: &Scenario) -> Result<f64> {
    let theta_bar = concat_reflection(theta, scenario)?;
    let gains = beamforming_gains(scenario)?;
    let surface = scenario.surface_responses()?;
    Ok((0..scenario.num_radars())
        .map(|k| radar_power_with(k, &theta_bar, scenario, &gains, &surface))
        .sum())
}

/// Per-transmitter echo coefficients `w_k^T H_{T→R_k} diag(θ̄) H_{R_j→T} w_j`,
/// built from the full channel matrices. The noiseless echo at radar `k` is
/// `Σ_j coeff[j]·x_j(t)`.
pub fn echo_coefficients(k: usize, theta: &CVec, scenario: &Scenario) -> Result<Vec<C64>> {
    let theta_bar = concat_reflection(theta, scenario)?;
    let t = &scenario.target;
    let lam = scenario.wavelength;
    let channel_to_target = |j: usize| -> Result<CMat> {
        let radar = &scenario.radars[j];
        let a_t = t.surface_response(&scenario.aoa_at_target(j)?, lam);
        let a_r = upa_response(&radar.geometry, &scenario.aod_at_radar(j)?, lam)?;
        Ok(los_channel(&a_t, &a_r, &scenario.path_gain(j)?)?
            .labelled(Node::Surface, Node::Radar(j))
            .matrix)
    };
    let back = channel_to_target(k)?.transpose();
    let wk = &scenario.radars[k].beamformer;
    let left = (wk.transpose() * back).transpose();
    let left = left.component_mul(&theta_bar);
    (0..scenario.num_radars())
        .map(|j| {
            let h = channel_to_target(j)?;
            let hw = h * &scenario.radars[j].beamformer;
            Ok(left.iter().zip(hw.iter()).map(|(a, b)| a * b).sum())
        })
        .collect()
}
