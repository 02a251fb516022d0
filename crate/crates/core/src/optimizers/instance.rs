use crate::arrays::{cascaded_response, split_ts_response, AnglePair};
use crate::error::{Error, Result};
use crate::linalg::{inner, CMat, CVec, C64, ZERO};
use crate::power_model::beamforming_gains;
use crate::scenario::{Scenario, Target};

/// One radar-pair term of the objective: `weight · |u^H θ + ũ^H φ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTerm {
    /// Receiving radar k.
    pub rx: usize,
    /// Transmitting radar j.
    pub tx: usize,
    /// `|G̃_{k,j}|² = |G_{R,k}|²·|G_{T,j}|²`.
    pub weight: f64,
    /// Cascaded IRS response `u_{k,j}`.
    pub u: CVec,
    /// Cascaded NIRS response `ũ_{k,j}`.
    pub u_tilde: CVec,
}

/// Everything the target needs to design θ: link weights, cascaded responses,
/// the NIRS coefficients and the amplitude cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionModel {
    pub links: Vec<LinkTerm>,
    pub phi: CVec,
    pub beta_max: f64,
}

impl ReflectionModel {
    /// Model from ground-truth geometry and gains.
    pub fn from_scenario(scenario: &Scenario) -> Result<Self> {
        let gains = beamforming_gains(scenario)?;
        let aoas: Vec<AnglePair> = (0..scenario.num_radars())
            .map(|k| scenario.aoa_at_target(k))
            .collect::<Result<_>>()?;
        let g_rx: Vec<f64> = gains.g_rx.iter().map(|g| g.norm_sqr()).collect();
        let g_tx: Vec<f64> = gains.g_tx.iter().map(|g| g.norm_sqr()).collect();
        Self::build(&scenario.target, scenario.wavelength, &aoas, &g_rx, &g_tx)
    }

    /// Model from the target's own knowledge: AoAs and `|G_{T,k}|²` estimates,
    /// with receive gains taken equal by reciprocity.
    pub fn from_knowledge(target: &Target, wavelength: f64, aoas: &[AnglePair], g2: &[f64]) -> Result<Self> {
        if aoas.len() != g2.len() {
            return Err(Error::invalid(format!(
                "{} AoAs but {} gain estimates",
                aoas.len(),
                g2.len()
            )));
        }
        Self::build(target, wavelength, aoas, g2, g2)
    }

    fn build(target: &Target, wavelength: f64, aoas: &[AnglePair], g_rx: &[f64], g_tx: &[f64]) -> Result<Self> {
        if aoas.is_empty() {
            return Err(Error::invalid("need at least one radar"));
        }
        let (n1x, n2x, ny) = (target.irs.nx, target.nirs.nx, target.surface_ny());
        let parts: Vec<(CVec, CVec)> = aoas
            .iter()
            .map(|a| split_ts_response(&target.surface_response(a, wavelength), n1x, n2x, ny))
            .collect::<Result<_>>()?;
        let mut links = Vec::with_capacity(aoas.len() * aoas.len());
        for (k, (irs_k, nirs_k)) in parts.iter().enumerate() {
            for (j, (irs_j, nirs_j)) in parts.iter().enumerate() {
                links.push(LinkTerm {
                    rx: k,
                    tx: j,
                    weight: g_rx[k] * g_tx[j],
                    u: cascaded_response(irs_k, irs_j)?,
                    u_tilde: cascaded_response(nirs_k, nirs_j)?,
                });
            }
        }
        Ok(Self {
            links,
            phi: target.nirs.phi.clone(),
            beta_max: target.irs.beta_max,
        })
    }

    pub fn n1(&self) -> usize {
        self.links.first().map_or(0, |l| l.u.len())
    }

    /// NIRS reflection gain `ũ^H φ` of each link.
    pub fn nirs_gains(&self) -> Vec<C64> {
        self.links.iter().map(|l| inner(&l.u_tilde, &self.phi)).collect()
    }

    /// `Σ weight·|u^H θ + ũ^H φ|²` (the received power divided by P).
    pub fn objective(&self, theta: &CVec) -> f64 {
        self.links
            .iter()
            .zip(self.nirs_gains())
            .map(|(l, c)| l.weight * (inner(&l.u, theta) + c).norm_sqr())
            .sum()
    }

    /// Stacked system `D θ = −e` with rows `G̃_{k,j} u_{k,j}^H` and `e = E φ`.
    ///
    /// Only `|G̃|` is known at the target; row phases cancel in every use.
    pub fn stacked_system(&self) -> (CMat, CVec) {
        let n1 = self.n1();
        let gains = self.nirs_gains();
        let d = CMat::from_fn(self.links.len(), n1, |r, c| {
            self.links[r].u[c].conj() * self.links[r].weight.sqrt()
        });
        let e = CVec::from_fn(self.links.len(), |r, _| gains[r] * self.links[r].weight.sqrt());
        (d, e)
    }
}

/// Box-constrained convex quadratic `θ^H Ũ θ + 2Re(ṽ^H θ) + C̃`, `|θ_n| ≤ β_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct QcqpInstance {
    pub u_tilde: CMat,
    pub v_tilde: CVec,
    pub c_tilde: f64,
    pub beta_max: f64,
    /// Optional factorization `‖Dθ + e‖²` of the same quadratic, used for
    /// accurate evaluation near zero.
    pub factors: Option<(CMat, CVec)>,
}

impl QcqpInstance {
    /// Single-radar data `(u u^H, C·u, |C|²)`.
    pub fn single(u: &CVec, c: C64, beta_max: f64) -> Self {
        let d = CMat::from_fn(1, u.len(), |_, c| u[c].conj());
        let e = CVec::from_element(1, c);
        Self::from_factors(d, e, beta_max)
    }

    /// Instance for `‖Dθ + e‖²`.
    pub fn from_factors(d: CMat, e: CVec, beta_max: f64) -> Self {
        let u_tilde = d.adjoint() * &d;
        let v_tilde = d.adjoint() * &e;
        let c_tilde = e.norm_squared();
        Self {
            u_tilde: crate::linalg::hermitian_part(&u_tilde),
            v_tilde,
            c_tilde,
            beta_max,
            factors: Some((d, e)),
        }
    }

    pub fn n(&self) -> usize {
        self.v_tilde.len()
    }

    pub fn evaluate(&self, theta: &CVec) -> f64 {
        match &self.factors {
            Some((d, e)) => (d * theta + e).norm_squared(),
            None => {
                let quad = inner(theta, &(&self.u_tilde * theta)).re;
                let lin = inner(&self.v_tilde, theta).re;
                (quad + 2.0 * lin + self.c_tilde).max(0.0)
            }
        }
    }

    /// Wirtinger gradient `Ũθ + ṽ`.
    pub fn gradient(&self, theta: &CVec) -> CVec {
        match &self.factors {
            Some((d, e)) => d.adjoint() * (d * theta + e),
            None => &self.u_tilde * theta + &self.v_tilde,
        }
    }

    /// Clamp every entry to modulus `β_max`.
    pub fn project(&self, theta: &mut CVec) {
        let b = self.beta_max;
        for z in theta.iter_mut() {
            let m = z.norm();
            if m > b {
                *z *= b / m;
            }
        }
    }

    /// A factor pair `(D, e)` with `‖Dθ + e‖²` equal to the objective up to an
    /// additive constant; derived from the eigendecomposition of Ũ when the
    /// instance carries none.
    pub fn factorization(&self) -> (CMat, CVec) {
        if let Some((d, e)) = &self.factors {
            return (d.clone(), e.clone());
        }
        let eig = self.u_tilde.clone().symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > 1e-14 * top)
            .collect();
        let n = self.n();
        let mut d = CMat::zeros(keep.len(), n);
        let mut e = CVec::zeros(keep.len());
        for (r, &i) in keep.iter().enumerate() {
            let v = eig.eigenvectors.column(i);
            let s = eig.eigenvalues[i].sqrt();
            for c in 0..n {
                d[(r, c)] = v[c].conj() * s;
            }
            e[r] = v.iter().zip(self.v_tilde.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() / s;
        }
        (d, e)
    }

    /// Same instance with the quadratic form dropped; evaluation then uses
    /// `θ^H Ũ θ + 2Re(ṽ^H θ) + C̃` directly.
    pub fn without_factors(mut self) -> Self {
        self.factors = None;
        self
    }
}

/// Ũ, ṽ and C̃ from the model's link sums.
pub fn build_instance(model: &ReflectionModel) -> QcqpInstance {
    let n1 = model.n1();
    let mut u_tilde = CMat::zeros(n1, n1);
    let mut v_tilde = CVec::from_element(n1, ZERO);
    let mut c_tilde = 0.0;
    for (l, c) in model.links.iter().zip(model.nirs_gains()) {
        let w = C64::new(l.weight, 0.0);
        u_tilde += (&l.u * l.u.adjoint()) * w;
        v_tilde += &l.u * (c * w);
        c_tilde += l.weight * c.norm_sqr();
    }
    let (d, e) = model.stacked_system();
    QcqpInstance {
        u_tilde: crate::linalg::hermitian_part(&u_tilde),
        v_tilde,
        c_tilde,
        beta_max: model.beta_max,
        factors: Some((d, e)),
    }
}
