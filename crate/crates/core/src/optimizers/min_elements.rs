//! Minimum IRS size for full single-radar stealth, and the statistics of the
//! NIRS reflection gain C it rests on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// `⌈sqrt(Σ_{i=1..I} σ²_C / (i·β²))⌉` with `σ²_C = (1 − ζ̄)·N₂`.
///
/// `|C|²` is exponential with mean σ²_C, so the largest of I independent
/// realizations has mean `σ²_C·H_I`; N₁ must cover `|C|/β` for that value.
pub fn min_irs_elements(zeta_bar: f64, n2: usize, beta_max: f64, realizations: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&zeta_bar) {
        return Err(Error::invalid(format!("mean absorbing efficiency {zeta_bar} outside [0, 1]")));
    }
    if !(beta_max > 0.0) {
        return Err(Error::invalid("beta_max must be positive"));
    }
    if realizations == 0 {
        return Err(Error::invalid("need at least one realization"));
    }
    let var = nirs_gain_variance(zeta_bar, n2);
    let harmonic: f64 = (1..=realizations).map(|i| 1.0 / i as f64).sum();
    Ok((var * harmonic / (beta_max * beta_max)).sqrt().ceil() as usize)
}

/// `σ²_C = (1 − ζ̄)·N₂`.
pub fn nirs_gain_variance(zeta_bar: f64, n2: usize) -> f64 {
    (1.0 - zeta_bar) * n2 as f64
}

/// Draws of `C = Σ_n sqrt(1 − ζ̄)·e^{jψ_n}` with uniform phases. The unit-modulus
/// cascaded response only rotates each term, so it is left out.
pub fn sample_nirs_gains(zeta_bar: f64, n2: usize, count: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = (1.0 - zeta_bar).sqrt();
    (0..count)
        .map(|_| {
            (0..n2)
                .map(|_| C64::from_polar(amp, rng.random::<f64>() * std::f64::consts::TAU))
                .sum()
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between the sample and Exponential(mean).
pub fn ks_exponential(samples: &[f64], mean: f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x / mean).exp();
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        assert_eq!(min_irs_elements(0.8, 200, 1.0, 1).unwrap(), 7);
        assert_eq!(min_irs_elements(0.8, 200, 1.0, 20).unwrap(), 12);
        assert_eq!(min_irs_elements(1.0, 200, 1.0, 20).unwrap(), 0);
        assert!(min_irs_elements(1.2, 200, 1.0, 20).is_err());
        assert!(min_irs_elements(0.8, 200, 1.0, 0).is_err());
    }

    #[test]
    fn smaller_cap_needs_more_elements() {
        let a = min_irs_elements(0.8, 200, 1.0, 20).unwrap();
        let b = min_irs_elements(0.8, 200, 0.5, 20).unwrap();
        assert!(b >= 2 * a - 1);
    }

    #[test]
    fn gain_statistics_match_model() {
        let c = sample_nirs_gains(0.8, 200, 10_000, 9);
        let power: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
        let var = power.iter().sum::<f64>() / power.len() as f64;
        assert!((var / 40.0 - 1.0).abs() < 0.05, "{var}");
        assert!(ks_exponential(&power, 40.0) < 0.02);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| -((1.0 - (i as f64 + 0.5) / n as f64).ln())).collect();
        assert!(ks_exponential(&xs, 1.0) <= 0.5 / n as f64 + 1e-12);
        assert!(ks_exponential(&xs, 3.0) > 0.3);
    }
}
