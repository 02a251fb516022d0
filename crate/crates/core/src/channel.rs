//! Far-field line-of-sight channels: path gains and rank-one outer-product
//! channel matrices.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};

/// Complex path gain `ρ = sqrt(α)/d · exp(−j2πd/λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGain {
    pub value: C64,
    pub distance: f64,
    /// Reference power gain at 1 m (linear).
    pub alpha: f64,
    pub wavelength: f64,
}

pub fn path_gain(distance: f64, alpha: f64, wavelength: f64) -> Result<PathGain> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::invalid(format!("distance must be positive, got {distance}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("reference gain must be positive, got {alpha}")));
    }
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::invalid(format!("wavelength must be positive, got {wavelength}")));
    }
    let phase = (-2.0 * PI * distance / wavelength).rem_euclid(2.0 * PI);
    Ok(PathGain {
        value: C64::from_polar(alpha.sqrt() / distance, phase),
        distance,
        alpha,
        wavelength,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Radar(usize),
    Irs,
    Nirs,
    Surface,
    Sensing,
    Unlabelled,
}

/// Channel from `tx` to `rx`; rows index receive elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LosChannel {
    pub matrix: CMat,
    pub rx: Node,
    pub tx: Node,
}

/// `H = ρ · a_rx · a_tx^T`.
pub fn los_channel(rx_response: &CVec, tx_response: &CVec, gain: &PathGain) -> Result<LosChannel> {
    if rx_response.is_empty() || tx_response.is_empty() {
        return Err(Error::invalid("array responses must be nonempty"));
    }
    let matrix = CMat::from_fn(rx_response.len(), tx_response.len(), |r, c| {
        gain.value * (rx_response[r] * tx_response[c])
    });
    Ok(LosChannel {
        matrix,
        rx: Node::Unlabelled,
        tx: Node::Unlabelled,
    })
}

impl LosChannel {
    pub fn labelled(mut self, rx: Node, tx: Node) -> Self {
        self.rx = rx;
        self.tx = tx;
        self
    }

    /// Reverse link under reciprocity: `H_{X→Y} = H_{Y→X}^T`.
    pub fn reversed(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            rx: self.tx,
            tx: self.rx,
        }
    }

    /// Stacks two channels sharing a transmitter (e.g. IRS over NIRS into the TS channel).
    pub fn stack(top: &LosChannel, bottom: &LosChannel, rx: Node) -> Result<LosChannel> {
        if top.matrix.ncols() != bottom.matrix.ncols() {
            return Err(Error::invalid("stacked channels need equal transmit dimensions"));
        }
        let (r1, r2) = (top.matrix.nrows(), bottom.matrix.nrows());
        let matrix = CMat::from_fn(r1 + r2, top.matrix.ncols(), |r, c| {
            if r < r1 {
                top.matrix[(r, c)]
            } else {
                bottom.matrix[(r - r1, c)]
            }
        });
        Ok(LosChannel {
            matrix,
            rx,
            tx: top.tx,
        })
    }
}
