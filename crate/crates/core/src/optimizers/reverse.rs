use crate::error::{Error, Result};
use crate::linalg::{inner, CVec, C64, ZERO};

use super::ReflectionSolution;

/// Closed-form single-radar design that anti-phases the IRS sum against the
/// NIRS gain `C`.
///
/// `⌊|C|/β⌋` elements (at most N₁) take `θ_n = −β·u_n·C/|C|`. If elements
/// remain, the next one carries the remainder `(|C| mod β)` with the same
/// phase and the rest stay at zero, so `u^H θ = −C` exactly. Otherwise every
/// element is at full amplitude and the residual is `(|C| − N₁β)²`.
pub fn reverse_alignment(u: &CVec, c: C64, beta_max: f64) -> Result<ReflectionSolution> {
    if !(beta_max > 0.0) {
        return Err(Error::invalid("beta_max must be positive"));
    }
    if let Some((n, z)) = u.iter().enumerate().find(|(_, z)| (z.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::invalid(format!(
            "cascaded response must be unit modulus, |u[{n}]| = {}",
            z.norm()
        )));
    }
    let n1 = u.len();
    let mut theta = CVec::from_element(n1, ZERO);
    let mag = c.norm();
    if mag > 0.0 {
        let dir = c / mag;
        let whole = (mag / beta_max).floor();
        let full = (whole as usize).min(n1);
        for n in 0..full {
            theta[n] = -u[n] * dir * beta_max;
        }
        if full < n1 {
            let rem = (mag - whole * beta_max).max(0.0);
            theta[full] = -u[full] * dir * rem;
        }
    }
    let objective = (inner(u, &theta) + c).norm_sqr();
    Ok(ReflectionSolution {
        theta,
        objective,
        solver: "reverse-alignment".into(),
        iterations: 0,
        kkt_residual: None,
        multipliers: None,
    })
}
