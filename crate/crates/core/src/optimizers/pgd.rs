//! Accelerated projected gradient for the box-constrained convex QCQP.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

use crate::linalg::{lambda_max_hermitian, CMat, CVec, C64, ZERO};

use super::instance::QcqpInstance;
use super::ReflectionSolution;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Iterations between subspace polishing attempts.
const POLISH_EVERY: usize = 20;
/// Gauss-Newton steps per polishing attempt.
const POLISH_STEPS: usize = 20;

/// Minimizes the instance over `|θ_n| ≤ β_max` starting from θ = 0.
///
/// Step `1/λ_max(Ũ)`, Nesterov momentum with a restart whenever the momentum
/// direction turns uphill. Stops once the gradient map `‖θ − Π(θ − ∇/L)‖` falls below
/// `tol · β_max · sqrt(N₁)`.
///
/// Every few iterations a Gauss-Newton refinement over the current active set
/// is tried and kept if it lowers the objective; this removes the slow tail on
/// ill-conditioned instances.
pub fn solve_pgd(inst: &QcqpInstance, tol: f64, max_iter: usize) -> Result<ReflectionSolution> {
    solve_pgd_from(inst, CVec::from_element(inst.n(), ZERO), tol, max_iter)
}

pub fn solve_pgd_from(inst: &QcqpInstance, start: CVec, tol: f64, max_iter: usize) -> Result<ReflectionSolution> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if start.len() != inst.n() {
        return Err(Error::invalid("warm start has the wrong length"));
    }
    let n = inst.n();
    let lipschitz = lambda_max_hermitian(&inst.u_tilde);
    if n == 0 || lipschitz <= 0.0 {
        let theta = CVec::from_element(n, ZERO);
        return Ok(solution(inst, theta, 0));
    }
    let step = C64::new(1.0 / lipschitz, 0.0);
    let threshold = tol * inst.beta_max * (n as f64).sqrt();

    let (d, e) = inst.factorization();
    let mut x = start;
    inst.project(&mut x);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut residual = f64::INFINITY;

    for it in 0..max_iter {
        residual = gradient_map_norm(inst, &x, step);
        if residual <= threshold {
            return Ok(solution(inst, x, it));
        }
        let mut x_new = &y - inst.gradient(&y) * step;
        inst.project(&mut x_new);
        // Gradient restart: drop momentum once it points uphill.
        let uphill = (&y - &x_new).dotc(&(&x_new - &x)).re > 0.0;
        if uphill {
            t = 1.0;
            y = x_new.clone();
        } else {
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let momentum = C64::new((t - 1.0) / t_new, 0.0);
            y = &x_new + (&x_new - &x) * momentum;
            t = t_new;
        }
        x = x_new;
        if (it + 1) % POLISH_EVERY == 0 {
            if let Some(p) = polish(inst, &d, &e, &x) {
                x = p;
                y = x.clone();
                t = 1.0;
            }
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: max_iter,
        residual,
        best: Box::new(solution(inst, x, max_iter)),
    })
}

/// Gauss-Newton refinement in which clamped elements keep modulus `β_max` and
/// only rotate, while free elements move by a least-squares correction capped
/// at the first one that reaches the bound. Each step is halved until the
/// objective drops. Returns `None` if no step helps.
fn polish(inst: &QcqpInstance, d: &CMat, e: &CVec, x: &CVec) -> Option<CVec> {
    let b = inst.beta_max;
    let mut best = x.clone();
    let mut f_best = inst.evaluate(x);
    let mut improved = false;
    for _ in 0..POLISH_STEPS {
        match gauss_newton_step(inst, d, e, &best, f_best) {
            Some((cand, f)) => {
                let gain = f_best - f;
                best = cand;
                f_best = f;
                improved = true;
                if f_best == 0.0 || gain <= 1e-3 * f_best {
                    break;
                }
            }
            None => break,
        }
    }
    debug_assert!(best.iter().all(|z| z.norm() <= b * (1.0 + 1e-12)));
    improved.then_some(best)
}

fn gauss_newton_step(inst: &QcqpInstance, d: &CMat, e: &CVec, x: &CVec, fx: f64) -> Option<(CVec, f64)> {
    let b = inst.beta_max;
    let n = x.len();
    let active: Vec<bool> = x.iter().map(|z| z.norm() >= b * (1.0 - 1e-9)).collect();
    // Real Jacobian columns: d/dφ for a clamped element, d/dRe and d/dIm otherwise.
    let mut cols: Vec<(usize, C64)> = Vec::with_capacity(2 * n);
    for k in 0..n {
        if active[k] {
            cols.push((k, C64::i() * x[k]));
        } else {
            cols.push((k, C64::new(1.0, 0.0)));
            cols.push((k, C64::i()));
        }
    }
    let m = d.nrows();
    let res = d * x + e;
    let jac = DMatrix::<f64>::from_fn(2 * m, cols.len(), |r, c| {
        let (k, dir) = cols[c];
        let v = d[(r % m, k)] * dir;
        if r < m { v.re } else { v.im }
    });
    let rhs = DVector::<f64>::from_fn(2 * m, |r, _| if r < m { -res[r].re } else { -res[r - m].im });
    let svd = jac.svd(true, true);
    let cutoff = 1e-12 * svd.singular_values.max();
    if cutoff <= 0.0 {
        return None;
    }
    let step = svd.solve(&rhs, cutoff).ok()?;

    let mut delta = CVec::from_element(n, ZERO);
    let mut rotation = vec![0.0; n];
    for (c, &(k, dir)) in cols.iter().enumerate() {
        if active[k] {
            rotation[k] = step[c];
        } else {
            delta[k] += dir * step[c];
        }
    }
    // Largest fraction keeping every free element inside its disk.
    let mut alpha = 1.0f64;
    for k in (0..n).filter(|&k| !active[k]) {
        let (z, dz) = (x[k], delta[k]);
        let qa = dz.norm_sqr();
        if qa == 0.0 {
            continue;
        }
        let qb = (z.conj() * dz).re;
        let qc = z.norm_sqr() - b * b;
        alpha = alpha.min(((-qb + (qb * qb - qa * qc).max(0.0).sqrt()) / qa).max(0.0));
    }
    while alpha > 1e-8 {
        let mut cand = x.clone();
        for k in 0..n {
            if active[k] {
                cand[k] *= C64::from_polar(1.0, alpha * rotation[k]);
            } else {
                cand[k] += delta[k] * alpha;
            }
        }
        inst.project(&mut cand);
        let f = inst.evaluate(&cand);
        if f < fx {
            return Some((cand, f));
        }
        alpha *= 0.5;
    }
    None
}

fn gradient_map_norm(inst: &QcqpInstance, x: &CVec, step: C64) -> f64 {
    let mut p = x - inst.gradient(x) * step;
    inst.project(&mut p);
    (x - p).norm()
}

fn solution(inst: &QcqpInstance, theta: CVec, iterations: usize) -> ReflectionSolution {
    ReflectionSolution {
        objective: inst.evaluate(&theta),
        theta,
        solver: "pgd".into(),
        iterations,
        kkt_residual: None,
        multipliers: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_modulus, ONE};
    use crate::optimizers::test_support::{grid_search_min, random_single};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_clamp_case() {
        let inst = QcqpInstance::single(&CVec::from_element(1, ONE), C64::new(2.0, 0.0), 1.0);
        let sol = solve_pgd(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((sol.theta[0] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_cancellation_when_enough_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let (u, c, beta) = random_single(&mut rng, 12, 1.0);
            let needed = (c.norm() / beta).ceil() as usize;
            if needed > u.len() {
                continue;
            }
            let sol = solve_pgd(&QcqpInstance::single(&u, c, beta), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert!(sol.objective <= 1e-8, "{}", sol.objective);
            assert!(max_modulus(&sol.theta) <= beta + 1e-9);
        }
    }

    #[test]
    fn matches_grid_oracle_for_two_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..3 {
            let (u, c, beta) = random_single(&mut rng, 2, 1.0);
            let inst = QcqpInstance::single(&u, c, beta);
            let sol = solve_pgd(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            let (grid, bound) = grid_search_min(&u, c, beta, 0.01, 0.01);
            assert!(sol.objective <= grid + 1e-12);
            assert!(grid - sol.objective <= bound, "{grid} vs {}", sol.objective);
        }
    }

    #[test]
    fn rejects_bad_tolerance_and_reports_budget() {
        let inst = QcqpInstance::single(&CVec::from_element(3, ONE), C64::new(2.5, 0.7), 1.0);
        assert!(solve_pgd(&inst, 0.0, 10).is_err());
        // Unit-modulus u with |C| just below N₁·β forces the iterate to the
        // boundary; one iteration is not enough.
        let tight = QcqpInstance::single(&CVec::from_element(3, ONE), C64::new(2.999, 0.0), 1.0);
        match solve_pgd(&tight, 1e-14, 1) {
            Err(Error::ConvergenceFailure { best, iterations, .. }) => {
                assert_eq!(iterations, 1);
                assert!(max_modulus(&best.theta) <= 1.0 + 1e-12);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }
}
