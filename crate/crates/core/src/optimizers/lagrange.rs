//! Lagrange-multiplier view of the QCQP: the stationary point for given
//! multipliers, multiplier recovery from a primal solution, and the dual
//! function used to certify a zero duality gap.

use crate::error::{Error, Result};
use crate::linalg::{pinv_quadratic_form, CMat, CVec, C64};

use super::instance::QcqpInstance;
use super::pgd::solve_pgd;
use super::ReflectionSolution;

/// Relative threshold below which a singular value of `Ũ + diag λ` counts as zero.
const SINGULAR_RTOL: f64 = 1e-13;

fn shifted(inst: &QcqpInstance, lambda: &[f64]) -> Result<CMat> {
    if lambda.len() != inst.n() {
        return Err(Error::invalid(format!(
            "{} multipliers for {} elements",
            lambda.len(),
            inst.n()
        )));
    }
    if let Some(l) = lambda.iter().find(|l| !(**l >= 0.0)) {
        return Err(Error::invalid(format!("multipliers must be nonnegative, got {l}")));
    }
    let mut m = inst.u_tilde.clone();
    for (i, l) in lambda.iter().enumerate() {
        m[(i, i)] += C64::new(*l, 0.0);
    }
    Ok(m)
}

/// `θ(λ) = −(Ũ + diag λ)^{-1} ṽ`.
pub fn lagrange_semiclosed(inst: &QcqpInstance, lambda: &[f64]) -> Result<CVec> {
    let m = shifted(inst, lambda)?;
    let svd = m.svd(true, true);
    let top = svd.singular_values.max();
    let bottom = svd.singular_values.min();
    if top == 0.0 || bottom <= SINGULAR_RTOL * top {
        return Err(Error::Singular(format!(
            "Ũ + diag(λ) is singular (σ_min/σ_max = {:.3e})",
            if top == 0.0 { 0.0 } else { bottom / top }
        )));
    }
    let x = svd
        .solve(&inst.v_tilde, 0.0)
        .map_err(|e| Error::Singular(e.to_string()))?;
    Ok(-x)
}

/// Dual function `g(λ) = C̃ − β²·1^T λ − ṽ^H (Ũ + diag λ)^+ ṽ`.
pub fn dual_value(inst: &QcqpInstance, lambda: &[f64]) -> Result<f64> {
    let m = shifted(inst, lambda)?;
    let b2 = inst.beta_max * inst.beta_max;
    Ok(inst.c_tilde - b2 * lambda.iter().sum::<f64>() - pinv_quadratic_form(&m, &inst.v_tilde, 1e-12))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktCertificate {
    pub multipliers: Vec<f64>,
    /// `‖(Ũ + diag λ)θ + ṽ‖`.
    pub stationarity: f64,
    /// `‖(λ_n (|θ_n|² − β²))_n‖`.
    pub slackness: f64,
    pub residual: f64,
}

/// Recovers `λ ≥ 0` from stationarity on the active set (`|θ_n| = β_max`);
/// inactive elements get `λ_n = 0`.
pub fn kkt_certificate(inst: &QcqpInstance, sol: &ReflectionSolution) -> KktCertificate {
    let theta = &sol.theta;
    let b = inst.beta_max;
    let grad = inst.gradient(theta);
    let multipliers: Vec<f64> = theta
        .iter()
        .zip(grad.iter())
        .map(|(t, g)| {
            let m = t.norm();
            if m >= b * (1.0 - 1e-9) && m > 0.0 {
                // Least-squares fit of λ_n θ_n = −g_n.
                (-(t.conj() * g).re / (m * m)).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let stationarity = grad
        .iter()
        .zip(theta.iter())
        .zip(multipliers.iter())
        .map(|((g, t), l)| (g + t * *l).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let slackness = theta
        .iter()
        .zip(multipliers.iter())
        .map(|(t, l)| (l * (t.norm_sqr() - b * b)).powi(2))
        .sum::<f64>()
        .sqrt();
    KktCertificate {
        multipliers,
        stationarity,
        slackness,
        residual: stationarity + slackness,
    }
}

/// Lagrange-multiplier solution: the optimal primal point, with its recovered
/// multipliers and KKT residual attached.
pub fn solve_lagrange(inst: &QcqpInstance, tol: f64, max_iter: usize) -> Result<ReflectionSolution> {
    let mut sol = solve_pgd(inst, tol, max_iter)?;
    let cert = kkt_certificate(inst, &sol);
    sol.solver = "lagrange".into();
    sol.kkt_residual = Some(cert.residual);
    sol.multipliers = Some(cert.multipliers);
    Ok(sol)
}
