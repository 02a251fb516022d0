//! Steering vectors and array responses for the radar UPAs, the target-surface
//! UPA (IRS + NIRS columns) and the cross-shaped sensing array.
//!
//! Element order is row-major over `(x, y)`: the UPA response is
//! `e_x ⊗ e_y`, so the y index varies fastest. Spatial phase arguments follow
//! `px = (2Δ/λ)·cosφ·cosϑ`, `py = (2Δ/λ)·cosφ·sinϑ`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, CVec, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrayKind {
    Upa,
    Cssa,
}

/// Element grid of a planar array.
///
/// For a CSSA, `nx`/`ny` are the arm lengths `Lx`/`Ly` (both odd) and the
/// two arms share their central device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub kind: ArrayKind,
    pub nx: usize,
    pub ny: usize,
    /// Inter-element spacing in meters.
    pub spacing: f64,
}

impl ArrayGeometry {
    pub fn upa(nx: usize, ny: usize, spacing: f64) -> Result<Self> {
        let g = Self {
            kind: ArrayKind::Upa,
            nx,
            ny,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn cssa(lx: usize, ly: usize, spacing: f64) -> Result<Self> {
        let g = Self {
            kind: ArrayKind::Cssa,
            nx: lx,
            ny: ly,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::invalid(format!(
                "array dimensions must be positive, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::invalid(format!(
                "element spacing must be positive, got {}",
                self.spacing
            )));
        }
        if self.kind == ArrayKind::Cssa && (self.nx % 2 == 0 || self.ny % 2 == 0) {
            return Err(Error::invalid(format!(
                "cross-shaped array arms must have odd length, got {}x{}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    pub fn element_count(&self) -> usize {
        match self.kind {
            ArrayKind::Upa => self.nx * self.ny,
            ArrayKind::Cssa => self.nx + self.ny - 1,
        }
    }
}

/// Azimuth/elevation pair `(ϑ, φ)` in radians, each in `(−π/2, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub azimuth: f64,
    pub elevation: f64,
}

impl AnglePair {
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        let open = |a: f64| a.is_finite() && a.abs() < FRAC_PI_2;
        if !open(azimuth) || !open(elevation) {
            return Err(Error::invalid(format!(
                "angles must lie in (-pi/2, pi/2), got ({azimuth}, {elevation})"
            )));
        }
        Ok(Self { azimuth, elevation })
    }

    pub fn from_degrees(azimuth: f64, elevation: f64) -> Result<Self> {
        Self::new(azimuth.to_radians(), elevation.to_radians())
    }

    /// Clamps both angles just inside the open interval.
    pub fn clamped(azimuth: f64, elevation: f64) -> Self {
        let lim = FRAC_PI_2 - 1e-9;
        Self {
            azimuth: azimuth.clamp(-lim, lim),
            elevation: elevation.clamp(-lim, lim),
        }
    }

    /// Spatial phase arguments `(px, py)` for an array with the given spacing.
    pub fn spatial_phases(&self, spacing: f64, wavelength: f64) -> (f64, f64) {
        let scale = 2.0 * spacing / wavelength * self.elevation.cos();
        (scale * self.azimuth.cos(), scale * self.azimuth.sin())
    }
}

/// 1D steering vector: entry `m` is `exp(−jπ·m·phi)`.
pub fn steer_1d(phi: f64, n: usize) -> Result<CVec> {
    if n == 0 {
        return Err(Error::invalid("steering vector length must be >= 1"));
    }
    Ok(steer(phi, n))
}

pub(crate) fn steer(phi: f64, n: usize) -> CVec {
    CVec::from_fn(n, |m, _| {
        if m == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, -PI * m as f64 * phi)
        }
    })
}

/// UPA response from precomputed spatial phases.
pub fn upa_from_phases(px: f64, py: f64, nx: usize, ny: usize) -> CVec {
    kron(&steer(px, nx), &steer(py, ny))
}

pub fn upa_response(geom: &ArrayGeometry, angles: &AnglePair, wavelength: f64) -> Result<CVec> {
    if geom.kind != ArrayKind::Upa {
        return Err(Error::invalid("upa_response needs a UPA geometry"));
    }
    check_wavelength(wavelength)?;
    geom.validate()?;
    let (px, py) = angles.spatial_phases(geom.spacing, wavelength);
    Ok(upa_from_phases(px, py, geom.nx, geom.ny))
}

/// Splits a target-surface response of `(n1x + n2x)·ny` entries into the IRS
/// columns (first `n1x`) and the NIRS columns (the remaining `n2x`).
pub fn split_ts_response(
    full: &CVec,
    n1x: usize,
    n2x: usize,
    ny: usize,
) -> Result<(CVec, CVec)> {
    let n1 = n1x * ny;
    if full.len() != (n1x + n2x) * ny {
        return Err(Error::invalid(format!(
            "response length {} does not match ({} + {}) x {}",
            full.len(),
            n1x,
            n2x,
            ny
        )));
    }
    let irs = full.rows(0, n1).into_owned();
    let nirs = full.rows(n1, full.len() - n1).into_owned();
    Ok((irs, nirs))
}

/// `(dx, dy)` grid offsets of each CSSA device relative to the shared centre,
/// in the order used by [`cssa_from_phases`].
pub fn cssa_positions(lx: usize, ly: usize) -> Vec<(i64, i64)> {
    let cx = (lx / 2) as i64;
    let cy = (ly / 2) as i64;
    let mut pos: Vec<(i64, i64)> = (0..lx as i64).map(|m| (m - cx, 0)).collect();
    pos.extend((0..ly as i64).filter(|&n| n != cy).map(|n| (0, n - cy)));
    pos
}

/// CSSA response from spatial phases: the x arm followed by the y arm with its
/// centre device removed. Both arms are offset so the centre device reads 1.
pub fn cssa_from_phases(px: f64, py: f64, lx: usize, ly: usize) -> CVec {
    let pos = cssa_positions(lx, ly);
    CVec::from_fn(pos.len(), |i, _| {
        let (dx, dy) = pos[i];
        if dx == 0 && dy == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, -PI * (dx as f64 * px + dy as f64 * py))
        }
    })
}

pub fn cssa_response(geom: &ArrayGeometry, angles: &AnglePair, wavelength: f64) -> Result<CVec> {
    if geom.kind != ArrayKind::Cssa {
        return Err(Error::invalid("cssa_response needs a cross-shaped geometry"));
    }
    check_wavelength(wavelength)?;
    geom.validate()?;
    let (px, py) = angles.spatial_phases(geom.spacing, wavelength);
    Ok(cssa_from_phases(px, py, geom.nx, geom.ny))
}

/// Cascaded response `ū` with `ū^H = a_k^T ⊙ a_j^T`, i.e. `ū = conj(a_k ⊙ a_j)`.
pub fn cascaded_response(a_k: &CVec, a_j: &CVec) -> Result<CVec> {
    if a_k.len() != a_j.len() {
        return Err(Error::invalid(format!(
            "cascaded response length mismatch: {} vs {}",
            a_k.len(),
            a_j.len()
        )));
    }
    Ok(a_k.zip_map(a_j, |x, y| (x * y).conj()))
}

fn check_wavelength(wavelength: f64) -> Result<()> {
    if wavelength > 0.0 && wavelength.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("wavelength must be positive, got {wavelength}")))
    }
}
