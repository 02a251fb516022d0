//! Radar nodes, the target (IRS, NIRS, sensing array) and the geometry that
//! turns node positions into AoA/AoD pairs and distances.

use rand::Rng;

use crate::arrays::{upa_from_phases, AnglePair, ArrayGeometry, ArrayKind};
use crate::channel::{path_gain, PathGain};
use crate::error::{Error, Result};
use crate::linalg::{CVec, C64};

/// Mono-static radar with a UPA and a fixed transmit/receive beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarNode {
    pub geometry: ArrayGeometry,
    pub position: [f64; 3],
    /// Unit-norm beamformer `w`.
    pub beamformer: CVec,
    /// Transmit power P in watts.
    pub tx_power: f64,
    /// Pulse repetition interval T_p in seconds.
    pub pri: f64,
    /// Pulse duration t_p in seconds.
    pub pulse_width: f64,
    /// Chirp bandwidth B in hertz.
    pub bandwidth: f64,
    /// Receiver noise power σ² in watts.
    pub noise_power: f64,
}

impl RadarNode {
    pub fn validate(&self) -> Result<()> {
        if self.geometry.kind != ArrayKind::Upa {
            return Err(Error::invalid("radar arrays must be UPAs"));
        }
        self.geometry.validate()?;
        if self.beamformer.len() != self.geometry.element_count() {
            return Err(Error::invalid(format!(
                "beamformer has {} entries for {} antennas",
                self.beamformer.len(),
                self.geometry.element_count()
            )));
        }
        if (self.beamformer.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("beamformer must have unit norm"));
        }
        if !(self.pulse_width > 0.0 && self.pulse_width < self.pri) {
            return Err(Error::invalid(format!(
                "need 0 < pulse width < PRI, got {} and {}",
                self.pulse_width, self.pri
            )));
        }
        if !(self.tx_power >= 0.0 && self.tx_power.is_finite()) {
            return Err(Error::invalid("transmit power must be nonnegative"));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::invalid("bandwidth must be positive"));
        }
        Ok(())
    }
}

/// Tunable reflecting columns of the target surface.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsPanel {
    pub nx: usize,
    pub ny: usize,
    pub beta_max: f64,
}

impl IrsPanel {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_theta(&self, theta: &CVec) -> Result<()> {
        if theta.len() != self.len() {
            return Err(Error::invalid(format!(
                "reflection vector has {} entries, IRS has {}",
                theta.len(),
                self.len()
            )));
        }
        if let Some((n, z)) = theta
            .iter()
            .enumerate()
            .find(|(_, z)| z.norm() > self.beta_max * (1.0 + 1e-9) + 1e-12)
        {
            return Err(Error::invalid(format!(
                "|theta[{n}]| = {} exceeds beta_max = {}",
                z.norm(),
                self.beta_max
            )));
        }
        Ok(())
    }
}

/// Non-tunable coated columns: `φ_n = sqrt(1 − ζ_n)·e^{jψ_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NirsPanel {
    pub nx: usize,
    pub ny: usize,
    pub phi: CVec,
    pub zeta: Vec<f64>,
}

impl NirsPanel {
    pub fn new(nx: usize, ny: usize, zeta: Vec<f64>, phases: &[f64]) -> Result<Self> {
        let n = nx * ny;
        if zeta.len() != n || phases.len() != n {
            return Err(Error::invalid(format!(
                "NIRS needs {n} efficiencies and phases, got {} and {}",
                zeta.len(),
                phases.len()
            )));
        }
        if let Some(z) = zeta.iter().find(|z| !(0.0..=1.0).contains(*z)) {
            return Err(Error::invalid(format!("absorbing efficiency {z} outside [0, 1]")));
        }
        let phi = CVec::from_fn(n, |i, _| C64::from_polar((1.0 - zeta[i]).sqrt(), phases[i]));
        Ok(Self { nx, ny, phi, zeta })
    }

    /// Phases drawn uniform on `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(nx: usize, ny: usize, zeta: Vec<f64>, rng: &mut R) -> Result<Self> {
        let phases: Vec<f64> = (0..nx * ny)
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        Self::new(nx, ny, zeta, &phases)
    }

    pub fn mean_zeta(&self) -> f64 {
        if self.zeta.is_empty() {
            return 1.0;
        }
        self.zeta.iter().sum::<f64>() / self.zeta.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub position: [f64; 3],
    /// Element spacing Δ_e shared by the surface and the sensing array.
    pub spacing: f64,
    pub irs: IrsPanel,
    pub nirs: NirsPanel,
    pub cssa: ArrayGeometry,
    /// Sensing-array noise power σ²_S in watts.
    pub sensing_noise: f64,
}

impl Target {
    pub fn surface_nx(&self) -> usize {
        self.irs.nx + self.nirs.nx
    }

    pub fn surface_ny(&self) -> usize {
        self.irs.ny
    }

    /// Full target-surface response `a_T` toward an arrival direction.
    pub fn surface_response(&self, angles: &AnglePair, wavelength: f64) -> CVec {
        let (px, py) = angles.spatial_phases(self.spacing, wavelength);
        upa_from_phases(px, py, self.surface_nx(), self.surface_ny())
    }

    pub fn validate(&self) -> Result<()> {
        if self.irs.ny != self.nirs.ny {
            return Err(Error::invalid("IRS and NIRS must share the y dimension"));
        }
        if self.nirs.phi.len() != self.nirs.nx * self.nirs.ny {
            return Err(Error::invalid("NIRS coefficient count mismatch"));
        }
        if !(self.irs.beta_max > 0.0 && self.irs.beta_max <= 1.0) {
            return Err(Error::invalid(format!(
                "beta_max must lie in (0, 1], got {}",
                self.irs.beta_max
            )));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::invalid("target element spacing must be positive"));
        }
        if self.cssa.kind != ArrayKind::Cssa {
            return Err(Error::invalid("sensing array must be cross-shaped"));
        }
        self.cssa.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub wavelength: f64,
    /// Reference path gain at 1 m (linear).
    pub alpha: f64,
    pub radars: Vec<RadarNode>,
    pub target: Target,
}

/// Angles of direction `d` seen by an array whose normal points along `normal_z`
/// (+1 for upward-facing radars, −1 for the downward-facing target surface).
pub fn angles_from_direction(d: [f64; 3], normal_z: f64) -> Result<AnglePair> {
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if norm == 0.0 {
        return Err(Error::invalid("coincident nodes"));
    }
    let (x, y, z) = (d[0] / norm, d[1] / norm, d[2] / norm * normal_z);
    if z <= 0.0 {
        return Err(Error::invalid("node lies behind the array plane"));
    }
    AnglePair::new(x.atan2(z), y.clamp(-1.0, 1.0).asin())
}

fn diff(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) {
            return Err(Error::invalid("wavelength must be positive"));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::invalid("reference path gain must be positive"));
        }
        if self.radars.is_empty() {
            return Err(Error::invalid("scenario needs at least one radar"));
        }
        for (k, r) in self.radars.iter().enumerate() {
            r.validate()
                .map_err(|e| Error::invalid(format!("radar {k}: {e}")))?;
            self.aoa_at_target(k)?;
            self.aod_at_radar(k)?;
        }
        self.target.validate()
    }

    pub fn num_radars(&self) -> usize {
        self.radars.len()
    }

    pub fn n1(&self) -> usize {
        self.target.irs.len()
    }

    pub fn distance(&self, k: usize) -> f64 {
        let d = diff(self.target.position, self.radars[k].position);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// `(ϑ_{R_k→T}, φ_{R_k→T})`: direction of radar `k` seen from the target.
    pub fn aoa_at_target(&self, k: usize) -> Result<AnglePair> {
        angles_from_direction(diff(self.radars[k].position, self.target.position), -1.0)
    }

    /// `(ϑ_{T→R_k}, φ_{T→R_k})`: direction of the target seen from radar `k`.
    pub fn aod_at_radar(&self, k: usize) -> Result<AnglePair> {
        angles_from_direction(diff(self.target.position, self.radars[k].position), 1.0)
    }

    pub fn path_gain(&self, k: usize) -> Result<PathGain> {
        path_gain(self.distance(k), self.alpha, self.wavelength)
    }

    /// Surface responses toward every radar.
    pub fn surface_responses(&self) -> Result<Vec<CVec>> {
        (0..self.num_radars())
            .map(|k| {
                let a = self.aoa_at_target(k)?;
                Ok(self.target.surface_response(&a, self.wavelength))
            })
            .collect()
    }

    /// Scales every node position about the origin, keeping all angles.
    pub fn scaled_distances(&self, factor: f64) -> Scenario {
        let mut s = self.clone();
        let scale = |p: [f64; 3]| [p[0] * factor, p[1] * factor, p[2] * factor];
        s.target.position = scale(s.target.position);
        for r in &mut s.radars {
            r.position = scale(r.position);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn angles_from_layout() {
        let below = angles_from_direction([0.0, 0.0, -100.0], -1.0).unwrap();
        assert_eq!(below.azimuth, 0.0);
        let side = angles_from_direction([-100.0, 0.0, -100.0], -1.0).unwrap();
        assert!((side.azimuth + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let up = angles_from_direction([100.0, 0.0, 100.0], 1.0).unwrap();
        assert!((up.azimuth - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(angles_from_direction([0.0, 0.0, 100.0], -1.0).is_err());
        assert!(angles_from_direction([0.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn nirs_modulus_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = NirsPanel::random(10, 2, vec![0.8; 20], &mut rng).unwrap();
        assert!(n.phi.iter().all(|z| (z.norm() - 0.2f64.sqrt()).abs() < 1e-15));
        assert!((n.mean_zeta() - 0.8).abs() < 1e-15);
        assert!(NirsPanel::new(1, 1, vec![1.5], &[0.0]).is_err());
        assert!(NirsPanel::new(2, 1, vec![0.5], &[0.0]).is_err());
    }

    #[test]
    fn irs_theta_check() {
        let p = IrsPanel { nx: 2, ny: 1, beta_max: 0.5 };
        assert!(p.check_theta(&CVec::from_element(2, C64::new(0.5, 0.0))).is_ok());
        assert!(p.check_theta(&CVec::from_element(2, C64::new(0.6, 0.0))).is_err());
        assert!(p.check_theta(&CVec::from_element(3, C64::new(0.1, 0.0))).is_err());
    }
}
