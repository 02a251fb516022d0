use crate::arrays::{cssa_from_phases, AnglePair};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, CMat, C64};

use super::snapshots::SnapshotSet;

const COARSE_STEP_DEG: f64 = 1.0;
const MAX_AZ_DEG: f64 = 89.0;
const MAX_EL_DEG: f64 = 89.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AoaEstimate {
    /// Detected directions, strongest peak first.
    pub angles: Vec<AnglePair>,
    /// Coarse pseudo-spectrum, row-major over (azimuth, elevation).
    pub spectrum: Vec<f64>,
    pub azimuths: Vec<f64>,
    pub elevations: Vec<f64>,
    pub grid_step: f64,
}

struct Spectrum<'a> {
    noise: &'a CMat,
    set: &'a SnapshotSet,
}

impl Spectrum<'_> {
    /// `1 / ‖E_n^H a_S(ϑ, φ)‖²`.
    fn at(&self, az: f64, el: f64) -> f64 {
        let a = AnglePair::clamped(az, el);
        let (px, py) = a.spatial_phases(self.set.geometry.spacing, self.set.wavelength);
        let s = cssa_from_phases(px, py, self.set.geometry.nx, self.set.geometry.ny);
        let mut acc = 0.0;
        for c in 0..self.noise.ncols() {
            let p: C64 = self.noise.column(c).iter().zip(s.iter()).map(|(e, x)| e.conj() * x).sum();
            acc += p.norm_sqr();
        }
        1.0 / acc.max(f64::MIN_POSITIVE)
    }
}

fn axis(lo_deg: f64, hi_deg: f64, step_deg: f64) -> Vec<f64> {
    let n = ((hi_deg - lo_deg) / step_deg).round() as i64;
    (0..=n).map(|i| (lo_deg + i as f64 * step_deg).to_radians()).collect()
}

/// Noise subspace: eigenvectors of the `L − k` smallest covariance eigenvalues.
pub fn noise_subspace(covariance: &CMat, k_sources: usize) -> CMat {
    let eig = hermitian_part(covariance).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let keep = order.len() - k_sources;
    let cols: Vec<_> = order[..keep].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    CMat::from_columns(&cols)
}

/// MUSIC over azimuth (−89°, 89°) and elevation [0°, 89°].
///
/// A 1° grid locates the peaks; each is then refined on a `grid_step` grid
/// within one coarse cell. Elevation is searched on the nonnegative half
/// because the response depends on φ only through cos φ.
pub fn music_aoa(set: &SnapshotSet, k_sources: usize, grid_step: f64) -> Result<AoaEstimate> {
    let l = set.geometry.element_count();
    if k_sources == 0 || k_sources >= l {
        return Err(Error::invalid(format!(
            "source count must be in 1..{l}, got {k_sources}"
        )));
    }
    if set.len() < k_sources {
        return Err(Error::invalid("fewer snapshots than sources"));
    }
    if !(grid_step > 0.0) {
        return Err(Error::invalid("grid step must be positive"));
    }
    let noise = noise_subspace(&set.covariance(), k_sources);
    let spec = Spectrum { noise: &noise, set };

    let step_deg = grid_step.to_degrees();
    let coarse = COARSE_STEP_DEG.max(step_deg);
    let azimuths = axis(-MAX_AZ_DEG, MAX_AZ_DEG, coarse);
    let elevations = axis(0.0, MAX_EL_DEG, coarse);
    let (na, ne) = (azimuths.len(), elevations.len());
    let spectrum: Vec<f64> = (0..na * ne)
        .map(|i| spec.at(azimuths[i / ne], elevations[i % ne]))
        .collect();

    let mut peaks: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..na {
        for j in 0..ne {
            let v = spectrum[i * ne + j];
            let mut is_peak = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= na as i64 || b >= ne as i64 {
                        continue;
                    }
                    if spectrum[a as usize * ne + b as usize] > v {
                        is_peak = false;
                    }
                }
            }
            if is_peak {
                peaks.push((v, i, j));
            }
        }
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    // Peaks within two grid cells of a stronger one belong to the same lobe.
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for &(_, i, j) in &peaks {
        if chosen.len() == k_sources {
            break;
        }
        let close = chosen
            .iter()
            .any(|&(a, b)| a.abs_diff(i) <= 2 && b.abs_diff(j) <= 2);
        if !close {
            chosen.push((i, j));
        }
    }

    let fine = if coarse > step_deg { Some(step_deg) } else { None };
    let angles: Vec<AnglePair> = chosen
        .iter()
        .map(|&(i, j)| {
            let (az0, el0) = (azimuths[i].to_degrees(), elevations[j].to_degrees());
            let (az, el) = match fine {
                Some(step) => refine(&spec, az0, el0, coarse, step),
                None => (az0, el0),
            };
            AnglePair::clamped(az.to_radians(), el.to_radians())
        })
        .collect();

    if angles.len() < k_sources {
        return Err(Error::EstimationFailure {
            wanted: k_sources,
            found: angles,
        });
    }
    Ok(AoaEstimate {
        angles,
        spectrum,
        azimuths,
        elevations,
        grid_step,
    })
}

/// Best point of the `step` grid within `±half` degrees of a coarse peak.
fn refine(spec: &Spectrum, az0: f64, el0: f64, half: f64, step: f64) -> (f64, f64) {
    let n = (half / step).round() as i64;
    let mut best = (spec.at(az0.to_radians(), el0.to_radians()), az0, el0);
    for di in -n..=n {
        let az = az0 + di as f64 * step;
        if az.abs() > MAX_AZ_DEG {
            continue;
        }
        for dj in -n..=n {
            let el = el0 + dj as f64 * step;
            if !(0.0..=MAX_EL_DEG).contains(&el) {
                continue;
            }
            let v = spec.at(az.to_radians(), el.to_radians());
            if v > best.0 {
                best = (v, az, el);
            }
        }
    }
    (best.1, best.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::snapshots::collect_snapshots;
    use crate::optimizers::test_support::paper_scenario;

    fn close(a: f64, b: f64, tol_deg: f64) -> bool {
        (a - b).abs() <= tol_deg.to_radians() + 1e-12
    }

    #[test]
    fn single_source_at_nadir_is_exact() {
        let s = paper_scenario(1, 4, 0.8, 1);
        let set = collect_snapshots(&s, 64, 1).unwrap();
        let est = music_aoa(&set, 1, 0.1f64.to_radians()).unwrap();
        assert_eq!(est.angles[0].azimuth, 0.0);
        assert_eq!(est.angles[0].elevation, 0.0);
    }

    #[test]
    fn three_sources_recovered() {
        let s = paper_scenario(3, 4, 0.8, 2);
        let set = collect_snapshots(&s, 64, 2).unwrap();
        let est = music_aoa(&set, 3, 0.01f64.to_radians()).unwrap();
        for k in 0..3 {
            let truth = s.aoa_at_target(k).unwrap();
            assert!(
                est.angles.iter().any(|a| close(a.azimuth, truth.azimuth, 0.01) && close(a.elevation, truth.elevation, 0.01)),
                "{truth:?} not in {:?}",
                est.angles
            );
        }
    }

    #[test]
    fn truth_is_orthogonal_to_noise_subspace() {
        let s = paper_scenario(3, 4, 0.8, 3);
        let set = collect_snapshots(&s, 64, 3).unwrap();
        let en = noise_subspace(&set.covariance(), 3);
        for k in 0..3 {
            let a = set.steering_matrix(&[s.aoa_at_target(k).unwrap()]).unwrap();
            assert!((en.adjoint() * a).norm() < 1e-8);
        }
    }

    #[test]
    fn spectrum_ignores_covariance_scale() {
        let mut s = paper_scenario(2, 4, 0.8, 4);
        s.target.sensing_noise = 1e-12;
        let mut set = collect_snapshots(&s, 32, 4).unwrap();
        let a = music_aoa(&set, 2, 1f64.to_radians()).unwrap();
        set.samples *= C64::new(1e3, 0.0);
        let b = music_aoa(&set, 2, 1f64.to_radians()).unwrap();
        assert_eq!(a.angles, b.angles);
        for (x, y) in a.spectrum.iter().zip(&b.spectrum) {
            assert!((x - y).abs() <= 1e-6 * x.abs());
        }
    }

    #[test]
    fn noisy_single_source_accuracy() {
        // SNR 20 dB per element: σ² = P|G_T|² / 100.
        let mut s = paper_scenario(1, 4, 0.8, 5);
        s.radars[0].position = [100.0 * 20f64.to_radians().tan(), 0.0, 0.0];
        let g = crate::power_model::beamforming_gains(&s).unwrap();
        s.target.sensing_noise = s.radars[0].tx_power * g.g_tx[0].norm_sqr() / 100.0;
        let truth = s.aoa_at_target(0).unwrap().azimuth;
        let mut errs: Vec<f64> = (0..100)
            .map(|seed| {
                let set = collect_snapshots(&s, 64, seed).unwrap();
                let est = music_aoa(&set, 1, 0.05f64.to_radians()).unwrap();
                (est.angles[0].azimuth - truth).abs().to_degrees()
            })
            .collect();
        errs.sort_by(|a, b| a.total_cmp(b));
        assert!(errs[94] <= 0.5, "95th percentile {}", errs[94]);
    }

    #[test]
    fn bad_arguments() {
        let s = paper_scenario(1, 4, 0.8, 6);
        let set = collect_snapshots(&s, 4, 6).unwrap();
        assert!(music_aoa(&set, 9, 0.01).is_err());
        assert!(music_aoa(&set, 0, 0.01).is_err());
        assert!(music_aoa(&set, 5, 0.01).is_err());
    }
}
