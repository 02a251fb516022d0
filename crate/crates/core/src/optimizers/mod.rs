//! Reflection-design algorithms: the convex QCQP solved by accelerated
//! projected gradient and certified through its Lagrangian, single-radar
//! reverse alignment, multi-radar MMSE, and the codebook/random baselines.

pub mod baselines;
pub mod instance;
pub mod lagrange;
pub mod min_elements;
pub mod mmse;
pub mod pgd;
pub mod reverse;

pub use baselines::{dft_codebook_search, random_phase};
pub use instance::{build_instance, LinkTerm, QcqpInstance, ReflectionModel};
pub use lagrange::{dual_value, kkt_certificate, lagrange_semiclosed, solve_lagrange, KktCertificate};
pub use min_elements::min_irs_elements;
pub use mmse::{mmse_default, mmse_delta_search, mmse_reflection};
pub use pgd::{solve_pgd, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use reverse::reverse_alignment;

use crate::linalg::CVec;

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSolution {
    pub theta: CVec,
    /// Objective in watts per watt of transmit power.
    pub objective: f64,
    pub solver: String,
    pub iterations: usize,
    pub kkt_residual: Option<f64>,
    pub multipliers: Option<Vec<f64>>,
}

#[cfg(test)]
pub(crate) mod test_support {
    use std::f64::consts::TAU;

    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    use super::QcqpInstance;
    use crate::harness::config::ScenarioConfig;
    use crate::linalg::{inner, CMat, CVec, C64};
    use crate::scenario::Scenario;

    /// Default layout with `k` radars, `n1x` IRS columns, uniform ζ and a
/// noiseless sensing array.
    pub fn paper_scenario(k: usize, n1x: usize, zeta: f64, seed: u64) -> Scenario {
        let mut cfg = ScenarioConfig::with_radars(k);
        cfg.target.n1x = n1x;
        cfg.target.zeta = zeta.into();
        let mut s = cfg.build(seed).unwrap();
        s.target.sensing_noise = 0.0;
        s
    }

    pub fn random_theta(n: usize, beta: f64, rng: &mut ChaCha8Rng) -> CVec {
        CVec::from_fn(n, |_, _| C64::from_polar(beta * rng.random::<f64>().sqrt(), rng.random::<f64>() * TAU))
    }

    fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> CVec {
        CVec::from_fn(n, |_, _| C64::from_polar(1.0, rng.random::<f64>() * TAU))
    }

    /// Unit-modulus `u`, `|C|` up to about `1.5·n·β`, and β.
    pub fn random_single(rng: &mut ChaCha8Rng, n: usize, beta: f64) -> (CVec, C64, f64) {
        let u = unit_vector(n, rng);
        let c = C64::from_polar(rng.random::<f64>() * 1.5 * n as f64 * beta, rng.random::<f64>() * TAU);
        (u, c, beta)
    }

    /// Sum of `links` weighted single-radar terms on `n` elements.
    pub fn random_multi(rng: &mut ChaCha8Rng, n: usize, links: usize, beta: f64) -> QcqpInstance {
        let mut d = CMat::zeros(links, n);
        let mut e = CVec::zeros(links);
        for r in 0..links {
            let (u, c, _) = random_single(rng, n, beta);
            let w = 0.5 + rng.random::<f64>();
            for col in 0..n {
                d[(r, col)] = u[col].conj() * w.sqrt();
            }
            e[r] = c * w.sqrt();
        }
        QcqpInstance::from_factors(d, e, beta)
    }

    /// Grid minimum of `|u^H θ + C|²` over `|θ_n| ≤ β` for `n ≤ 2`, and the
    /// largest gap the grid can leave above the continuous minimum.
    ///
    /// Element 1 sweeps the full polar grid. For two elements the inner
    /// element is the clamped best response to the outer one, snapped to the
    /// grid neighbourhood, so the search stays exhaustive over the outer grid.
    pub fn grid_search_min(u: &CVec, c: C64, beta: f64, amp_step: f64, phase_step: f64) -> (f64, f64) {
        let n = u.len();
        assert!(n == 1 || n == 2, "grid oracle handles one or two elements");
        let amps: Vec<f64> = (0..=((beta / amp_step).round() as usize))
            .map(|i| (i as f64 * amp_step).min(beta))
            .collect();
        let phases: Vec<f64> = (0..((TAU / phase_step).ceil() as usize))
            .map(|i| i as f64 * phase_step)
            .collect();
        let snap = |t: C64| -> Vec<C64> {
            let a = (t.norm() / amp_step).floor();
            let p = (t.arg().rem_euclid(TAU) / phase_step).floor();
            let mut out = Vec::with_capacity(9);
            for da in -1..=1 {
                for dp in -1..=1 {
                    let amp = ((a + da as f64) * amp_step).clamp(0.0, beta);
                    out.push(C64::from_polar(amp, (p + dp as f64) * phase_step));
                }
            }
            out
        };
        let mut best = f64::INFINITY;
        for &a in &amps {
            for &p in &phases {
                let t1 = C64::from_polar(a, p);
                if n == 1 {
                    best = best.min((u[0].conj() * t1 + c).norm_sqr());
                    continue;
                }
                let rest = u[0].conj() * t1 + c;
                // Continuous best θ₂ solves u₂* θ₂ = −rest, clamped to β.
                let mut t2 = -rest * u[1];
                if t2.norm() > beta {
                    t2 *= beta / t2.norm();
                }
                for cand in snap(t2) {
                    let theta = CVec::from_vec(vec![t1, cand]);
                    best = best.min((inner(u, &theta) + c).norm_sqr());
                }
            }
        }
        // Worst-case distance from any feasible point to the grid, per element.
        let cell = amp_step + beta * phase_step;
        let delta = n as f64 * cell;
        (best, 2.0 * best.sqrt() * delta + delta * delta)
    }
}
