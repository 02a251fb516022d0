//! Regularized least-squares nulling of the stacked cancellation equations
//! `D θ = −E φ`, and the search over the regularization weight δ.

use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::linalg::{max_modulus, CMat, CVec, C64};

use super::instance::ReflectionModel;
use super::ReflectionSolution;

const FEASIBILITY_RTOL: f64 = 1e-9;
const REFINE_STEPS: usize = 60;

/// Thin SVD of the stacked system, reused across δ values.
pub struct MmseSystem {
    svd: SVD<C64, nalgebra::Dyn, nalgebra::Dyn>,
    d: CMat,
    e: CVec,
    /// `U^H e`.
    projected: CVec,
    beta_max: f64,
}

impl MmseSystem {
    pub fn new(model: &ReflectionModel) -> Self {
        let (d, e) = model.stacked_system();
        let svd = d.clone().svd(true, true);
        let projected = svd.u.as_ref().expect("left vectors requested").adjoint() * &e;
        Self {
            svd,
            d,
            e,
            projected,
            beta_max: model.beta_max,
        }
    }

    /// `λ_max(D^H D)`.
    pub fn gram_norm(&self) -> f64 {
        let s = self.svd.singular_values.max();
        s * s
    }

    /// `θ = −(D^H D + δI)^{-1} D^H E φ`.
    pub fn theta(&self, delta: f64) -> Result<CVec> {
        if !(delta >= 0.0) {
            return Err(Error::invalid(format!("delta must be nonnegative, got {delta}")));
        }
        let top = self.svd.singular_values.max();
        let filtered = CVec::from_fn(self.projected.len(), |i, _| {
            let s = self.svd.singular_values[i];
            if s <= 1e-14 * top {
                C64::new(0.0, 0.0)
            } else {
                self.projected[i] * (s / (s * s + delta))
            }
        });
        let v_t = self.svd.v_t.as_ref().expect("right vectors requested");
        Ok(-(v_t.adjoint() * filtered))
    }

    /// `‖Dθ + Eφ‖²`.
    pub fn residual(&self, theta: &CVec) -> f64 {
        (&self.d * theta + &self.e).norm_squared()
    }

    pub fn feasible(&self, theta: &CVec) -> bool {
        max_modulus(theta) <= self.beta_max * (1.0 + FEASIBILITY_RTOL)
    }
}

pub fn mmse_reflection(model: &ReflectionModel, delta: f64) -> Result<CVec> {
    MmseSystem::new(model).theta(delta)
}

/// `count` log-spaced δ values over `[lo, hi]·λ_max(D^H D)`.
pub fn log_grid(system: &MmseSystem, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let scale = system.gram_norm().max(f64::MIN_POSITIVE);
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| {
            let f = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            10f64.powf(a + f * (b - a)) * scale
        })
        .collect()
}

/// Picks the feasible δ with the smallest residual, then bisects (in log δ)
/// toward the next-smaller infeasible grid value to sharpen the choice.
pub fn mmse_delta_search(model: &ReflectionModel, grid: &[f64]) -> Result<(f64, ReflectionSolution)> {
    let system = MmseSystem::new(model);
    search_on(&system, grid)
}

fn search_on(system: &MmseSystem, grid: &[f64]) -> Result<(f64, ReflectionSolution)> {
    if grid.is_empty() {
        return Err(Error::invalid("delta grid is empty"));
    }
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut best: Option<(usize, f64, CVec, f64)> = None;
    for (i, &d) in sorted.iter().enumerate() {
        let th = system.theta(d)?;
        if !system.feasible(&th) {
            continue;
        }
        let r = system.residual(&th);
        if best.as_ref().is_none_or(|b| r < b.3) {
            best = Some((i, d, th, r));
        }
    }
    let (idx, mut delta, mut theta, mut res) = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no delta in [{:.3e}, {:.3e}] meets the amplitude cap",
            sorted[0],
            sorted[sorted.len() - 1]
        ))
    })?;
    if idx > 0 && sorted[idx - 1] > 0.0 {
        let (mut lo, mut hi) = (sorted[idx - 1].ln(), delta.ln());
        for _ in 0..REFINE_STEPS {
            let mid = 0.5 * (lo + hi);
            let th = system.theta(mid.exp())?;
            if system.feasible(&th) {
                let r = system.residual(&th);
                if r <= res {
                    delta = mid.exp();
                    theta = th;
                    res = r;
                }
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok((
        delta,
        ReflectionSolution {
            theta,
            objective: res,
            solver: "mmse".into(),
            iterations: 0,
            kkt_residual: None,
            multipliers: None,
        },
    ))
}

/// δ search on the default 40-point grid over `[1e-12, 1e4]·λ_max(D^H D)`,
/// widening the upper end when nothing on the grid is feasible.
pub fn mmse_default(model: &ReflectionModel) -> Result<(f64, ReflectionSolution)> {
    let system = MmseSystem::new(model);
    let mut hi = 1e4;
    loop {
        let grid = log_grid(&system, 1e-12, hi, 40);
        match search_on(&system, &grid) {
            Err(Error::Infeasible(_)) if hi < 1e20 => hi *= 1e4,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;
    use crate::optimizers::test_support::paper_scenario;

    fn model(k: usize, n1x: usize, seed: u64) -> ReflectionModel {
        ReflectionModel::from_scenario(&paper_scenario(k, n1x, 0.8, seed)).unwrap()
    }

    #[test]
    fn single_radar_tiny_delta_cancels() {
        let m = model(1, 10, 1);
        let sys = MmseSystem::new(&m);
        let th = sys.theta(1e-14 * sys.gram_norm()).unwrap();
        let c = m.nirs_gains()[0];
        let r = inner(&m.links[0].u, &th) + c;
        assert!(r.norm() <= 1e-9 * c.norm(), "{}", r.norm());
        assert!(mmse_reflection(&m, -1.0).is_err());
    }

    #[test]
    fn huge_delta_shrinks_to_zero() {
        let m = model(3, 4, 2);
        let sys = MmseSystem::new(&m);
        assert!(sys.theta(1e12 * sys.gram_norm()).unwrap().norm() < 1e-9);
    }

    #[test]
    fn residual_monotone_in_delta() {
        let m = model(3, 6, 3);
        let sys = MmseSystem::new(&m);
        let grid = log_grid(&sys, 1e-10, 1e6, 50);
        let res: Vec<f64> = grid.iter().map(|&d| sys.residual(&sys.theta(d).unwrap())).collect();
        for w in res.windows(2) {
            assert!(w[0] <= w[1] * (1.0 + 1e-9) + 1e-30, "{} > {}", w[0], w[1]);
        }
    }

    #[test]
    fn picks_smallest_delta_when_all_feasible() {
        let m = model(1, 40, 4);
        let sys = MmseSystem::new(&m);
        let grid = log_grid(&sys, 1e-12, 1e4, 40);
        assert!(sys.feasible(&sys.theta(grid[0]).unwrap()));
        let (d, _) = mmse_delta_search(&m, &grid).unwrap();
        assert_eq!(d, grid[0]);
    }

    #[test]
    fn tight_cap_selects_feasibility_edge() {
        let mut m = model(3, 3, 5);
        m.beta_max = 0.2;
        let sys = MmseSystem::new(&m);
        let grid = log_grid(&sys, 1e-12, 1e8, 80);
        let feasible: Vec<bool> = grid.iter().map(|&d| sys.feasible(&sys.theta(d).unwrap())).collect();
        let first = feasible.iter().position(|&f| f).expect("large delta is feasible");
        assert!(first > 0, "cap should bind at small delta");
        let (d, sol) = mmse_delta_search(&m, &grid).unwrap();
        assert!(d <= grid[first] && d >= grid[first - 1]);
        assert!(sys.feasible(&sol.theta));
        let at_grid = sys.residual(&sys.theta(grid[first]).unwrap());
        assert!(sol.objective <= at_grid);
    }

    #[test]
    fn empty_or_infeasible_grid() {
        let mut m = model(3, 3, 6);
        assert!(mmse_delta_search(&m, &[]).is_err());
        m.beta_max = 1e-6;
        let sys = MmseSystem::new(&m);
        let grid = log_grid(&sys, 1e-12, 1e-6, 5);
        assert!(matches!(mmse_delta_search(&m, &grid), Err(Error::Infeasible(_))));
        assert!(mmse_default(&m).is_ok());
    }
}
