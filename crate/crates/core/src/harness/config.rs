//! Scenario configuration as a TOML tree, with logarithmic units at the
//! boundary and field-path error reporting.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrays::ArrayGeometry;
use crate::error::{Error, Result};
use crate::power_model::matched_beamformer;
use crate::scenario::{angles_from_direction, IrsPanel, NirsPanel, RadarNode, Scenario, Target};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Absorbing efficiency: one value for every NIRS element or one per element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Zeta {
    Uniform(f64),
    PerElement(Vec<f64>),
}

impl From<f64> for Zeta {
    fn from(z: f64) -> Self {
        Zeta::Uniform(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadarConfig {
    pub position: [f64; 3],
    pub mx: usize,
    pub my: usize,
    pub spacing: f64,
    pub power_dbm: f64,
    pub pri: f64,
    pub pulse_width: f64,
    pub bandwidth: f64,
    pub noise_dbm: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self {
            position: [0.0, 0.0, 0.0],
            mx: 8,
            my: 8,
            spacing: 0.025,
            power_dbm: 15.0,
            pri: 100e-6,
            pulse_width: 30e-6,
            bandwidth: 100e6,
            noise_dbm: -90.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TargetConfig {
    pub position: [f64; 3],
    pub n1x: usize,
    pub n1y: usize,
    pub n2x: usize,
    pub n2y: usize,
    pub spacing: f64,
    pub beta_max: f64,
    pub zeta: Zeta,
    pub cssa_lx: usize,
    pub cssa_ly: usize,
    pub sensing_noise_dbm: f64,
}

impl Default for TargetConfig {
    fn default() -> Self {
        Self {
            position: [0.0, 0.0, 100.0],
            n1x: 4,
            n1y: 2,
            n2x: 100,
            n2y: 2,
            spacing: 0.0125,
            beta_max: 1.0,
            zeta: Zeta::Uniform(0.8),
            cssa_lx: 5,
            cssa_ly: 5,
            sensing_noise_dbm: -110.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub wavelength: f64,
    pub alpha_db: f64,
    pub seed: u64,
    pub radars: Vec<RadarConfig>,
    pub target: TargetConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::with_radars(1)
    }
}

/// Azimuths of the preset layout, in degrees: below the target, then ±45°,
/// then ±30°, ±60°.
const LAYOUT_DEG: [f64; 7] = [0.0, 45.0, -45.0, 30.0, -30.0, 60.0, -60.0];
/// Chirp bandwidths of the preset layout. Distinct sweeps keep the radars'
/// pulses incoherent at the sensing array.
const LAYOUT_BANDWIDTH: [f64; 7] = [100e6, 90e6, 110e6, 80e6, 120e6, 70e6, 130e6];

impl ScenarioConfig {
    /// Preset layout: `k` ground radars seen from the target at 0°, ±45°, ...
    /// One radar uses a 4×2 IRS, several radars a 25×2 IRS.
    pub fn with_radars(k: usize) -> Self {
        let mut target = TargetConfig::default();
        if k > 1 {
            target.n1x = 25;
        }
        let h = target.position[2];
        let radars = (0..k.min(LAYOUT_DEG.len()))
            .map(|i| RadarConfig {
                position: [h * LAYOUT_DEG[i].to_radians().tan(), 0.0, 0.0],
                bandwidth: LAYOUT_BANDWIDTH[i],
                ..RadarConfig::default()
            })
            .collect();
        Self {
            wavelength: 0.05,
            alpha_db: -30.0,
            seed: 1,
            radars,
            target,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let path = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "<root>".into());
            Error::config(path, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        positive("wavelength", self.wavelength)?;
        finite("alpha_db", self.alpha_db)?;
        if self.radars.is_empty() {
            return Err(Error::config("radars", "at least one radar is required"));
        }
        for (i, r) in self.radars.iter().enumerate() {
            let p = |f: &str| format!("radars[{i}].{f}");
            for (axis, v) in r.position.iter().enumerate() {
                finite(&format!("radars[{i}].position[{axis}]"), *v)?;
            }
            count(&p("mx"), r.mx)?;
            count(&p("my"), r.my)?;
            positive(&p("spacing"), r.spacing)?;
            finite(&p("power_dbm"), r.power_dbm)?;
            positive(&p("pri"), r.pri)?;
            positive(&p("pulse_width"), r.pulse_width)?;
            if r.pulse_width >= r.pri {
                return Err(Error::config(p("pulse_width"), "must be shorter than the PRI"));
            }
            positive(&p("bandwidth"), r.bandwidth)?;
            finite(&p("noise_dbm"), r.noise_dbm)?;
        }
        let t = &self.target;
        for (axis, v) in t.position.iter().enumerate() {
            finite(&format!("target.position[{axis}]"), *v)?;
        }
        count("target.n1x", t.n1x)?;
        count("target.n1y", t.n1y)?;
        count("target.n2x", t.n2x)?;
        count("target.n2y", t.n2y)?;
        if t.n1y != t.n2y {
            return Err(Error::config("target.n2y", "IRS and NIRS must have the same number of rows"));
        }
        positive("target.spacing", t.spacing)?;
        if !(t.beta_max > 0.0 && t.beta_max <= 1.0) {
            return Err(Error::config("target.beta_max", "must lie in (0, 1]"));
        }
        let n2 = t.n2x * t.n2y;
        match &t.zeta {
            Zeta::Uniform(z) if !(0.0..=1.0).contains(z) => {
                return Err(Error::config("target.zeta", "must lie in [0, 1]"));
            }
            Zeta::PerElement(v) => {
                if v.len() != n2 {
                    return Err(Error::config(
                        "target.zeta",
                        format!("expected {n2} entries, got {}", v.len()),
                    ));
                }
                if let Some(i) = v.iter().position(|z| !(0.0..=1.0).contains(z)) {
                    return Err(Error::config(format!("target.zeta[{i}]"), "must lie in [0, 1]"));
                }
            }
            _ => {}
        }
        for (name, l) in [("target.cssa_lx", t.cssa_lx), ("target.cssa_ly", t.cssa_ly)] {
            if l % 2 == 0 {
                return Err(Error::config(name, "cross arms need an odd number of devices"));
            }
        }
        finite("target.sensing_noise_dbm", t.sensing_noise_dbm)?;
        Ok(())
    }

    /// Concrete scenario; `seed` draws the NIRS phases.
    pub fn build(&self, seed: u64) -> Result<Scenario> {
        self.validate()?;
        let t = &self.target;
        let mut radars = Vec::with_capacity(self.radars.len());
        for (i, r) in self.radars.iter().enumerate() {
            let geometry = ArrayGeometry::upa(r.mx, r.my, r.spacing)?;
            let d = [
                t.position[0] - r.position[0],
                t.position[1] - r.position[1],
                t.position[2] - r.position[2],
            ];
            let steer = angles_from_direction(d, 1.0).map_err(|e| Error::config(format!("radars[{i}].position"), e.to_string()))?;
            radars.push(RadarNode {
                geometry,
                position: r.position,
                beamformer: matched_beamformer(&geometry, &steer, self.wavelength)?,
                tx_power: dbm_to_watts(r.power_dbm),
                pri: r.pri,
                pulse_width: r.pulse_width,
                bandwidth: r.bandwidth,
                noise_power: dbm_to_watts(r.noise_dbm),
            });
        }
        let n2 = t.n2x * t.n2y;
        let zeta = match &t.zeta {
            Zeta::Uniform(z) => vec![*z; n2],
            Zeta::PerElement(v) => v.clone(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenario = Scenario {
            wavelength: self.wavelength,
            alpha: db_to_linear(self.alpha_db),
            radars,
            target: Target {
                position: t.position,
                spacing: t.spacing,
                irs: IrsPanel {
                    nx: t.n1x,
                    ny: t.n1y,
                    beta_max: t.beta_max,
                },
                nirs: NirsPanel::random(t.n2x, t.n2y, zeta, &mut rng)?,
                cssa: ArrayGeometry::cssa(t.cssa_lx, t.cssa_ly, t.spacing)?,
                sensing_noise: dbm_to_watts(t.sensing_noise_dbm),
            },
        };
        scenario.validate().map_err(|e| Error::config("<scenario>", e.to_string()))?;
        Ok(scenario)
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be positive and finite, got {v}")))
    }
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, "must be finite"))
    }
}

fn count(path: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::config(path, "must be at least 1"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversions() {
        assert!((dbm_to_watts(15.0) - 0.031_622_776_601_683_79).abs() < 1e-15);
        assert!((db_to_linear(-30.0) - 1e-3).abs() < 1e-18);
        assert_eq!(dbm_to_watts(30.0), 1.0);
    }

    #[test]
    fn defaults_build() {
        let s = ScenarioConfig::with_radars(3).build(1).unwrap();
        assert_eq!(s.num_radars(), 3);
        assert_eq!(s.n1(), 50);
        assert_eq!(s.target.nirs.phi.len(), 200);
        assert_eq!(s.target.cssa.element_count(), 9);
        let a = s.aoa_at_target(1).unwrap();
        assert!((a.azimuth.abs() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((s.distance(1) - 100.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ScenarioConfig::with_radars(2);
        cfg.target.zeta = Zeta::PerElement(vec![0.7; 200]);
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = ScenarioConfig::from_toml_str("alpha_db = -20.0\n[[radars]]\npower_dbm = 10.0\n").unwrap();
        assert_eq!(cfg.alpha_db, -20.0);
        assert_eq!(cfg.radars[0].mx, 8);
        assert_eq!(cfg.target.n2x, 100);
    }

    #[test]
    fn errors_carry_field_paths() {
        let mut cfg = ScenarioConfig::with_radars(3);
        cfg.radars[2].pulse_width = 1.0;
        match cfg.validate() {
            Err(Error::Config { path, .. }) => assert_eq!(path, "radars[2].pulse_width"),
            other => panic!("{other:?}"),
        }
        let mut cfg = ScenarioConfig::default();
        cfg.target.zeta = Zeta::PerElement(vec![0.5; 3]);
        assert!(matches!(cfg.validate(), Err(Error::Config { path, .. }) if path == "target.zeta"));
        let mut cfg = ScenarioConfig::default();
        cfg.target.cssa_lx = 4;
        assert!(matches!(cfg.validate(), Err(Error::Config { path, .. }) if path == "target.cssa_lx"));
        assert!(matches!(
            ScenarioConfig::from_toml_str("wavelength = \"far\""),
            Err(Error::Config { .. })
        ));
        assert!(ScenarioConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn radar_above_target_is_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.radars[0].position = [0.0, 0.0, 200.0];
        assert!(matches!(cfg.build(1), Err(Error::Config { path, .. }) if path == "radars[0].position"));
    }
}
