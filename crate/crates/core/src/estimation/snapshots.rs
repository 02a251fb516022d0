use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::arrays::{cssa_response, AnglePair, ArrayGeometry};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::power_model::{beamforming_gains, chirp_waveform};
use crate::scenario::Scenario;

/// Samples received by the cross-shaped sensing array during one pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    /// `L × T`, one column per sample time.
    pub samples: CMat,
    pub sample_times: Vec<f64>,
    pub noise_power: f64,
    pub geometry: ArrayGeometry,
    pub wavelength: f64,
    pub pri: f64,
    pub pulse_width: f64,
}

impl SnapshotSet {
    pub fn len(&self) -> usize {
        self.samples.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `A_S` for a set of arrival directions.
    pub fn steering_matrix(&self, angles: &[AnglePair]) -> Result<CMat> {
        let cols = angles
            .iter()
            .map(|a| cssa_response(&self.geometry, a, self.wavelength))
            .collect::<Result<Vec<_>>>()?;
        if cols.is_empty() {
            return Ok(CMat::zeros(self.geometry.element_count(), 0));
        }
        Ok(CMat::from_columns(&cols))
    }

    /// Sample covariance `Z Z^H / T`.
    pub fn covariance(&self) -> CMat {
        &self.samples * self.samples.adjoint() / C64::new(self.len() as f64, 0.0)
    }
}

/// `z(t_i) = A_S s(t_i) + n_S(t_i)` with `s_k(t) = G_{T,k} x_k(t)`, sampled at
/// `n` uniform instants over `[0, t_p)` of the first radar's pulse.
pub fn collect_snapshots(scenario: &Scenario, n: usize, seed: u64) -> Result<SnapshotSet> {
    if n == 0 {
        return Err(Error::invalid("need at least one snapshot"));
    }
    let first = &scenario.radars[0];
    let (pri, pulse_width) = (first.pri, first.pulse_width);
    if scenario
        .radars
        .iter()
        .any(|r| r.pri != pri || r.pulse_width != pulse_width)
    {
        return Err(Error::invalid("radars must share one pulse timing"));
    }
    let gains = beamforming_gains(scenario)?;
    let aoas = (0..scenario.num_radars())
        .map(|k| scenario.aoa_at_target(k))
        .collect::<Result<Vec<_>>>()?;
    let target = &scenario.target;
    let mut set = SnapshotSet {
        samples: CMat::zeros(target.cssa.element_count(), n),
        sample_times: (0..n).map(|i| i as f64 * pulse_width / n as f64).collect(),
        noise_power: target.sensing_noise,
        geometry: target.cssa,
        wavelength: scenario.wavelength,
        pri,
        pulse_width,
    };
    let a_s = set.steering_matrix(&aoas)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = (target.sensing_noise / 2.0).sqrt();
    for (i, &t) in set.sample_times.clone().iter().enumerate() {
        let s = scenario
            .radars
            .iter()
            .zip(&gains.g_tx)
            .map(|(r, g)| Ok(g * chirp_waveform(t, r)?))
            .collect::<Result<Vec<C64>>>()?;
        let z = &a_s * crate::linalg::CVec::from_vec(s);
        for l in 0..z.len() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            set.samples[(l, i)] = z[l] + C64::new(re, im) * sigma;
        }
    }
    Ok(set)
}
