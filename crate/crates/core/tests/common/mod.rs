#![allow(dead_code)]

use std::f64::consts::PI;

use irs_stealth::linalg::{CMat, CVec, C64};
use irs_stealth::optimizers::QcqpInstance;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn cn(rng: &mut ChaCha8Rng, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

/// Unit-modulus response with random phases, like a cascaded steering vector.
pub fn unit_response(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
}

/// Single-link instance `|u^H θ + C|²` with `C ~ CN(0, 40)`, the NIRS gain
/// statistics of a 200-element coating at 80% absorption.
pub fn single_instance(rng: &mut ChaCha8Rng, n: usize) -> (CVec, C64) {
    (unit_response(rng, n), cn(rng, 40.0))
}

/// `‖Dθ + e‖²` with Gaussian `D` (`links × n`) and `e`.
pub fn multi_instance(rng: &mut ChaCha8Rng, n: usize, links: usize, beta: f64) -> QcqpInstance {
    let d = CMat::from_fn(links, n, |_, _| cn(rng, 1.0));
    let e = CVec::from_fn(links, |_, _| cn(rng, 4.0 * n as f64));
    QcqpInstance::from_factors(d, e, beta)
}

fn polar_axis(step: f64, hi: f64) -> Vec<f64> {
    let n = (hi / step).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    if hi - v[n] > 1e-12 {
        v.push(hi);
    }
    v
}

/// Closest point of the polar grid to `z`: nearest grid phase on either side,
/// then the nearest amplitude to the projection on that ray.
fn closest_on_grid(z: C64, amps: &[f64], phases: &[f64]) -> C64 {
    let (r, psi) = (z.norm(), z.arg().rem_euclid(2.0 * PI));
    let step = phases[1] - phases[0];
    let i = ((psi / step).floor() as usize).min(phases.len() - 1);
    let candidates = [phases[i], phases[(i + 1) % phases.len()]];
    let mut best = (f64::INFINITY, C64::new(0.0, 0.0));
    for &ph in &candidates {
        let proj = r * (psi - ph).cos();
        let a_step = amps[1] - amps[0];
        let j = ((proj.max(0.0) / a_step).floor() as usize).min(amps.len() - 1);
        for &a in &[amps[j], amps[(j + 1).min(amps.len() - 1)]] {
            let p = C64::from_polar(a, ph);
            let dist = (p - z).norm_sqr();
            if dist < best.0 {
                best = (dist, p);
            }
        }
    }
    best.1
}

/// Exhaustive polar-grid minimum of `|u^H θ + c|²` for one or two elements.
/// Element one sweeps the full grid; element two takes its exact grid optimum.
pub fn grid_minimum(u: &CVec, c: C64, beta: f64, amp_step: f64, phase_step: f64) -> f64 {
    assert!(u.len() == 1 || u.len() == 2);
    let amps = polar_axis(amp_step, beta);
    let phases: Vec<f64> = polar_axis(phase_step, 2.0 * PI - 1e-9);
    let mut best = f64::INFINITY;
    for &a in &amps {
        for &ph in &phases {
            let t1 = C64::from_polar(a, ph);
            let partial = u[0].conj() * t1 + c;
            let f = if u.len() == 1 {
                partial.norm_sqr()
            } else {
                let u2 = u[1].conj();
                let t2 = closest_on_grid(-partial / u2, &amps, &phases);
                (u2 * t2 + partial).norm_sqr()
            };
            best = best.min(f);
        }
    }
    best
}

/// Largest objective gap between the continuous optimum and the grid: every
/// element can be moved onto the grid by at most half an amplitude step plus
/// half a phase arc.
pub fn grid_resolution_gap(u: &CVec, optimum: f64, beta: f64, amp_step: f64, phase_step: f64) -> f64 {
    let shift: f64 = u.iter().map(|x| x.norm()).sum::<f64>() * (0.5 * amp_step + 0.5 * beta * phase_step);
    (optimum.sqrt() + shift).powi(2) - optimum
}
