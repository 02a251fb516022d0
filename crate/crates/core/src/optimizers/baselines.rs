//! Reference designs: DFT codebook search and uniformly random phases.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CVec, C64};

use super::instance::ReflectionModel;
use super::ReflectionSolution;

/// Column `index` of the N₁-point DFT matrix at modulus β.
pub fn dft_codeword(n1: usize, index: usize, beta_max: f64) -> CVec {
    CVec::from_fn(n1, |n, _| {
        let k = (n * index) % n1.max(1);
        C64::from_polar(beta_max, -TAU * k as f64 / n1 as f64)
    })
}

/// Best codeword of the N₁-column DFT codebook; lowest index wins ties.
pub fn dft_codebook_search(model: &ReflectionModel) -> ReflectionSolution {
    let n1 = model.n1();
    let mut best: Option<(CVec, f64)> = None;
    for c in 0..n1 {
        let th = dft_codeword(n1, c, model.beta_max);
        let f = model.objective(&th);
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((th, f));
        }
    }
    let (theta, objective) = best.unwrap_or_else(|| (CVec::zeros(0), model.objective(&CVec::zeros(0))));
    ReflectionSolution {
        theta,
        objective,
        solver: "dft-codebook".into(),
        iterations: n1,
        kkt_residual: None,
        multipliers: None,
    }
}

/// `θ_n = β·e^{jψ_n}`, `ψ_n ~ U[0, 2π)`, reproducible per seed.
pub fn random_phase(n1: usize, beta_max: f64, seed: u64) -> CVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CVec::from_fn(n1, |_, _| C64::from_polar(beta_max, rng.random::<f64>() * TAU))
}
